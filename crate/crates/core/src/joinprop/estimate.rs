use crate::error::{Error, Result};
use crate::gaxioms::CiStatement;
use crate::rational::Rational;
use crate::relcore::{probability, Assignment, Relation};

/// Estimates `Pr_R[x, y, z]` as `Pr[x | z] · Pr[y | z] · Pr[z]`, the
/// factorization licensed by `ci`. The estimate equals the exact joint
/// probability whenever the statement holds in `r`; otherwise the gap is the
/// estimator's error.
pub fn factorized_count_estimate(ci: &CiStatement, r: &Relation, a: &Assignment) -> Result<Rational> {
    let needed = ci.attrs();
    if let Some(missing) = needed.iter().find(|n| a.get(n).is_none()) {
        return Err(Error::Argument(format!("assignment {a} does not bind `{missing}`")));
    }
    let (ax, ay, az) = (a.restrict(ci.x()), a.restrict(ci.y()), a.restrict(ci.z()));
    let pz = probability(r, &az, &Assignment::new())?;
    if pz == Rational::from_integer(0.into()) {
        return Err(Error::EmptyCondition {
            relation: r.name().to_owned(),
        });
    }
    Ok(probability(r, &ax, &az)? * probability(r, &ay, &az)? * pz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn single_row_is_certain() {
        let r = Relation::from_rows("R", &["A", "B", "C"], &[&["a", "b", "c"]]).unwrap();
        let a = Assignment::new().with("A", "a").with("B", "b").with("C", "c");
        let est = factorized_count_estimate(&CiStatement::of("A", "B", "C", "R"), &r, &a).unwrap();
        assert_eq!(est, ratio(1, 1));
    }

    #[test]
    fn unsupported_condition_is_an_error() {
        let r = Relation::from_rows("R", &["A", "B", "C"], &[&["a", "b", "c"]]).unwrap();
        let a = Assignment::new().with("A", "a").with("B", "b").with("C", "zz");
        assert!(factorized_count_estimate(&CiStatement::of("A", "B", "C", "R"), &r, &a).is_err());
        let partial = Assignment::new().with("A", "a");
        assert!(factorized_count_estimate(&CiStatement::of("A", "B", "C", "R"), &r, &partial).is_err());
    }
}
