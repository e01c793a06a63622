//! Embedded multivalued dependencies and why dangling tuples matter.

use relcausal::joinprop::{emvd_holds, semi_join_reduced, EmvdStatement};
use relcausal::relcore::{natural_join, AttrSet, Relation};

fn main() -> relcausal::Result<()> {
    // A and B combine freely in R
    let r = Relation::from_rows(
        "R",
        &["A", "B", "C"],
        &[&["a1", "b1", "c1"], &["a1", "b2", "c2"], &["a2", "b1", "c3"], &["a2", "b2", "c4"]],
    )?;
    let e = EmvdStatement::new(AttrSet::new(), AttrSet::parse_list("A"), AttrSet::parse_list("A,B"))?;
    println!("in R: {e} holds = {}", emvd_holds(&r, &e)?);

    let partners = [["c1", "d1"], ["c2", "d1"], ["c3", "d2"], ["c4", "d2"]];
    for (label, keep) in [("every R tuple has a partner", 4), ("c4 has no partner", 3)] {
        let rows: Vec<&[&str]> = partners[..keep].iter().map(|r| &r[..]).collect();
        let s = Relation::from_rows("S", &["C", "D"], &rows)?;
        let j = natural_join(&r, &s);
        println!(
            "{label}: semi-join reduced = {}, {e} holds in R ⋈ S = {}",
            semi_join_reduced(&[&r, &s])?,
            emvd_holds(&j, &e)?
        );
    }
    Ok(())
}
