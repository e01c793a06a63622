//! Exact conditional-independence tests on a small bag, plus the matching
//! information-theoretic view.

use relcausal::relcore::{empirical_ci, entropy_measures, probability, Assignment, AttrSet, Relation};

fn main() -> relcausal::Result<()> {
    let r = Relation::from_rows(
        "R",
        &["A", "B", "C"],
        &[&["a1", "b1", "c1"], &["a1", "b2", "c1"], &["a2", "b1", "c1"], &["a2", "b2", "c1"], &["a1", "b1", "c2"]],
    )?;
    let (a, b, c) = (AttrSet::parse_list("A"), AttrSet::parse_list("B"), AttrSet::parse_list("C"));

    let given = Assignment::new().with("C", "c1");
    let p = probability(&r, &Assignment::new().with("A", "a1").with("B", "b1"), &given)?;
    println!("Pr[A=a1, B=b1 | C=c1] = {p}");

    println!("A ⊥ B | C : {}", empirical_ci(&r, &a, &b, &c)?);
    println!("A ⊥ B     : {}", empirical_ci(&r, &a, &b, &AttrSet::new())?);

    let m = entropy_measures(&r, &a, &b, &c)?;
    println!("I(A;B|C) = {:.4} bits, I(A;B) = {:.4} bits", m.i_xy_given_z, m.i_xy);
    Ok(())
}
