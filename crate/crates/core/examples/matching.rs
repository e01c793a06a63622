//! Exact and coarsened matching on a joined table, with an exact rational
//! effect estimate.

use relcausal::causal::{build_unit_table, cem, estimate_ate, exact_match, CoarseningSpec, Coarsening, CompareOp, TreatmentSpec};
use relcausal::relcore::{natural_join, AttrSet, Relation};

fn main() -> relcausal::Result<()> {
    let students = Relation::from_rows(
        "Students",
        &["sid", "pid", "age", "tutoring", "gpa"],
        &[
            &["s1", "p1", "12", "1", "3.6"],
            &["s2", "p1", "14", "0", "3.1"],
            &["s3", "p2", "12", "0", "3.0"],
            &["s4", "p2", "15", "1", "3.8"],
            &["s5", "p3", "13", "1", "3.3"],
            &["s6", "p3", "12", "0", "2.9"],
        ],
    )?;
    let parents = Relation::from_rows(
        "Parents",
        &["pid", "income"],
        &[&["p1", "80000"], &["p2", "120000"], &["p3", "80000"]],
    )?;
    let u = natural_join(&students, &parents);
    let t = TreatmentSpec::new("tutoring", CompareOp::Eq, "1");
    let x = AttrSet::parse_list("age,income");
    let units = build_unit_table(&u, &t, &"gpa".into(), &x)?;

    match estimate_ate(&exact_match(&units, &x)?) {
        Ok(rep) => println!("exact matching: ATE = {} ({} valid groups)", rep.ate, rep.n_valid_groups),
        Err(e) => println!("exact matching: {e}"),
    }

    let spec = CoarseningSpec::identity().with("age", Coarsening::cutpoints(&["13"])?);
    let rep = estimate_ate(&cem(&units, &x, &spec)?)?;
    println!("coarsened matching: ATE = {} ≈ {:.3}", rep.ate, rep.ate_float);
    for g in &rep.groups {
        println!("  {:?}: {} treated, {} control, valid = {}", g.signature, g.n_treated, g.n_control, g.valid);
    }
    Ok(())
}
