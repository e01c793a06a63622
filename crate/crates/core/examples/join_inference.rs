//! Which independences survive a join, and which are lost: a two-relation
//! instance where A ⊥ B | C holds in R but not in R ⋈ S.

use std::collections::BTreeMap;

use relcausal::gaxioms::{parse_statements, CiSet};
use relcausal::joinprop::{infer_join_cis, InferOptions, JoinSpec, KeyClass};
use relcausal::relcore::{empirical_ci, natural_join, AttrSet, Relation};

fn main() -> relcausal::Result<()> {
    let r = Relation::from_rows(
        "R",
        &["A", "B", "C", "D"],
        &[&["a1", "b1", "c", "d1"], &["a1", "b2", "c", "d2"], &["a2", "b1", "c", "d3"], &["a2", "b2", "c", "d4"]],
    )?;
    let s = Relation::from_rows(
        "S",
        &["D", "E"],
        &[&["d1", "e1"], &["d1", "e2"], &["d2", "e1"], &["d2", "e2"], &["d2", "e3"], &["d3", "e1"], &["d4", "e1"]],
    )?;
    let j = natural_join(&r, &s);
    let (a, b) = (AttrSet::parse_list("A"), AttrSet::parse_list("B"));
    println!("|R ⋈ S| = {}", j.len());
    println!("A ⊥ B | C   in R: {}", empirical_ci(&r, &a, &b, &AttrSet::parse_list("C"))?);
    println!("A ⊥ B | C   in J: {}", empirical_ci(&j, &a, &b, &AttrSet::parse_list("C"))?);
    println!("A ⊥ B | C,D in J: {}", empirical_ci(&j, &a, &b, &AttrSet::parse_list("C,D"))?);

    let mut asserted = CiSet::new(j.schema());
    for st in parse_statements("A _|_ B | C @ R\nA _|_ B | C,D @ R")? {
        asserted.insert(st)?;
    }
    let schemas: BTreeMap<String, AttrSet> = [("R".into(), r.schema()), ("S".into(), s.schema())].into();
    let spec = JoinSpec::between(&r, &s, KeyClass::General)?;
    let inferred = infer_join_cis(&schemas, &asserted, &[spec], &InferOptions::default())?;
    println!("\nguaranteed in every join of this shape ({} statements), e.g.:", inferred.len());
    for st in inferred.statements().take(8) {
        println!("  {st}");
    }
    Ok(())
}
