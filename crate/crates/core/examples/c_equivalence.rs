//! Shrinking a covariate set without changing the estimate: a foreign key
//! lets covariates from the referenced table be dropped, and the
//! c-equivalence check confirms it on data.

use std::collections::BTreeMap;

use relcausal::causal::{check_c_equivalence, reduce_covariates_fk, CiSource};
use relcausal::relcore::{natural_join, AttrSet, ForeignKey, Relation};

fn main() -> relcausal::Result<()> {
    let students = Relation::from_rows(
        "Students",
        &["sid", "pid", "tutoring", "gpa"],
        &[
            &["s1", "p1", "1", "3.6"],
            &["s2", "p1", "0", "3.1"],
            &["s3", "p2", "0", "3.0"],
            &["s4", "p2", "1", "3.8"],
        ],
    )?;
    let parents = Relation::from_rows("Parents", &["pid", "income"], &[&["p1", "80000"], &["p2", "120000"]])?;
    let schemas: BTreeMap<String, AttrSet> =
        [("Students".into(), students.schema()), ("Parents".into(), parents.schema())].into();
    let fk = ForeignKey {
        from: "Students".into(),
        to: "Parents".into(),
        attributes: AttrSet::parse_list("pid"),
    };

    let x = AttrSet::parse_list("pid,income");
    let red = reduce_covariates_fk(&x, &schemas, &[fk], "Students");
    println!("covariates {{{x}}} reduce to {{{}}} (licensed: {})", red.covariates, red.reduced);

    let j = natural_join(&students, &parents);
    let verdict = check_c_equivalence(&CiSource::Data(&j), &"tutoring".into(), &"gpa".into(), &x, &red.covariates)?;
    println!("c-equivalence on the joined data: {verdict:?}");
    Ok(())
}
