use std::collections::{BTreeSet, HashMap};

use super::{Assignment, AttrSet, CiTester, Relation, Value};
use crate::error::{Error, Result};
use crate::rational::{from_counts, Rational};

/// Tolerance used when comparing floating-point information measures to zero.
pub const ENTROPY_TOLERANCE: f64 = 1e-9;

/// N_{R,a}: number of tuples (with duplicates) matching every binding of `a`.
pub fn count(r: &Relation, a: &Assignment) -> Result<u64> {
    Ok(r.matching(a)?.iter().map(|(_, m)| m).sum())
}

/// Pr_R[target | given] as an exact rational.
pub fn probability(r: &Relation, target: &Assignment, given: &Assignment) -> Result<Rational> {
    if !target.attrs().is_disjoint(&given.attrs()) {
        return Err(Error::Argument(format!(
            "target {target} and condition {given} bind the same attribute"
        )));
    }
    let denom = count(r, given)?;
    let joint = target
        .merge(given)
        .ok_or_else(|| Error::Argument("conflicting bindings".into()))?;
    let numer = count(r, &joint)?;
    if denom == 0 {
        return Err(Error::EmptyCondition {
            relation: r.name().to_owned(),
        });
    }
    Ok(from_counts(numer as u128, denom as u128))
}

/// Exact test of `x ⊥ y | z` over the tuple frequencies of `r`.
pub fn empirical_ci(r: &Relation, x: &AttrSet, y: &AttrSet, z: &AttrSet) -> Result<bool> {
    CiTester::new(r).holds(x, y, z)
}

fn check_disjoint(sets: &[&AttrSet]) -> Result<()> {
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if !sets[i].is_disjoint(sets[j]) {
                return Err(Error::Argument(format!(
                    "attribute sets {{{}}} and {{{}}} overlap",
                    sets[i], sets[j]
                )));
            }
        }
    }
    Ok(())
}

/// Shannon entropy (bits) of the marginal distribution of `x` in `r`.
pub fn entropy(r: &Relation, x: &AttrSet) -> Result<f64> {
    let n = r.len();
    if n == 0 {
        return Err(Error::EmptyRelation(r.name().to_owned()));
    }
    if x.is_empty() {
        return Ok(0.0);
    }
    let n = n as f64;
    let h = r
        .value_counts(x)?
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum::<f64>();
    Ok(h.max(0.0))
}

/// H(Y | X) = H(XY) - H(X).
pub fn conditional_entropy(r: &Relation, y: &AttrSet, x: &AttrSet) -> Result<f64> {
    Ok(entropy(r, &x.union(y))? - entropy(r, x)?)
}

/// I(X, Y | Z) = H(XZ) + H(YZ) - H(XYZ) - H(Z).
pub fn mutual_information(r: &Relation, x: &AttrSet, y: &AttrSet, z: &AttrSet) -> Result<f64> {
    check_disjoint(&[x, y, z])?;
    let xz = x.union(z);
    let yz = y.union(z);
    let i = entropy(r, &xz)? + entropy(r, &yz)? - entropy(r, &xz.union(y))? - entropy(r, z)?;
    // rounding can leave a tiny negative residue where the true value is 0
    Ok(i.max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyMeasures {
    /// H(X)
    pub h_x: f64,
    /// H(X | Y)
    pub h_x_given_y: f64,
    /// I(X, Y)
    pub i_xy: f64,
    /// I(X, Y | Z)
    pub i_xy_given_z: f64,
}

pub fn entropy_measures(r: &Relation, x: &AttrSet, y: &AttrSet, z: &AttrSet) -> Result<EntropyMeasures> {
    check_disjoint(&[x, y, z])?;
    if r.is_empty() {
        return Err(Error::EmptyRelation(r.name().to_owned()));
    }
    Ok(EntropyMeasures {
        h_x: entropy(r, x)?,
        h_x_given_y: conditional_entropy(r, x, y)?,
        i_xy: mutual_information(r, x, y, &AttrSet::new())?,
        i_xy_given_z: mutual_information(r, x, y, z)?,
    })
}

/// True iff no two tuples agree on `x` and differ on `y`.
pub fn functional_dependency_holds(r: &Relation, x: &AttrSet, y: &AttrSet) -> Result<bool> {
    let xp = r.positions(x)?;
    let yp = r.positions(y)?;
    let mut seen: HashMap<Vec<&Value>, Vec<&Value>> = HashMap::new();
    for (t, _) in r.tuples() {
        let xv: Vec<&Value> = xp.iter().map(|&p| &t[p]).collect();
        let yv: Vec<&Value> = yp.iter().map(|&p| &t[p]).collect();
        match seen.get(&xv) {
            Some(prev) if *prev != yv => return Ok(false),
            Some(_) => {}
            None => {
                seen.insert(xv, yv);
            }
        }
    }
    Ok(true)
}

/// A declared foreign key: `attributes` of `from` reference a key of `to`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct ForeignKey {
    pub from: String,
    pub to: String,
    pub attributes: AttrSet,
}

/// True iff `attrs` is a key of `referenced` and every `attrs` value of
/// `referencing` occurs in `referenced`. Attributes missing from either
/// schema make the check fail.
pub fn validate_foreign_key(referencing: &Relation, referenced: &Relation, attrs: &AttrSet) -> bool {
    if attrs.is_empty() || !attrs.is_subset(&referencing.schema()) || !attrs.is_subset(&referenced.schema()) {
        return false;
    }
    let Ok(key_counts) = referenced.value_counts(attrs) else {
        return false;
    };
    if key_counts.values().any(|&c| c > 1) {
        return false;
    }
    let Ok(used) = referencing.distinct_values(attrs) else {
        return false;
    };
    let keys: BTreeSet<&Vec<Value>> = key_counts.keys().collect();
    used.iter().all(|v| keys.contains(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn coin() -> Relation {
        Relation::from_rows("C", &["A", "K"], &[&["h", "k"], &["t", "k"]]).unwrap()
    }

    #[test]
    fn fair_coin_has_one_bit() {
        let h = entropy(&coin(), &AttrSet::single("A")).unwrap();
        assert!((h - 1.0).abs() < 1e-12);
        assert_eq!(entropy(&coin(), &AttrSet::single("K")).unwrap(), 0.0);
    }

    #[test]
    fn empty_relation_has_no_distribution() {
        let r = Relation::new("E", ["A", "B"]).unwrap();
        let a = AttrSet::single("A");
        let b = AttrSet::single("B");
        assert!(matches!(
            entropy_measures(&r, &a, &b, &AttrSet::new()),
            Err(Error::EmptyRelation(_))
        ));
    }

    #[test]
    fn probability_errors() {
        let r = coin();
        let zero = Assignment::new().with("A", "edge");
        assert!(matches!(
            probability(&r, &Assignment::new(), &zero),
            Err(Error::EmptyCondition { .. })
        ));
        let a = Assignment::new().with("A", "h");
        assert!(probability(&r, &a, &a).is_err());
        assert_eq!(probability(&r, &a, &Assignment::new()).unwrap(), ratio(1, 2));
        assert!(count(&r, &Assignment::new().with("Q", "1")).is_err());
    }

    #[test]
    fn overlapping_ci_sets_are_rejected() {
        let r = coin();
        let a = AttrSet::single("A");
        assert!(matches!(empirical_ci(&r, &a, &a, &AttrSet::new()), Err(Error::Argument(_))));
    }

    #[test]
    fn keyed_relation_dependencies() {
        let r = Relation::from_rows("K", &["id", "v", "w"], &[&["1", "x", "p"], &["2", "x", "q"], &["3", "y", "p"]]).unwrap();
        assert!(functional_dependency_holds(&r, &AttrSet::single("id"), &r.schema()).unwrap());
        assert!(!functional_dependency_holds(&r, &AttrSet::single("v"), &AttrSet::single("w")).unwrap());
        let vs = AttrSet::single("v");
        assert!(functional_dependency_holds(&r, &vs, &vs).unwrap());
    }

    #[test]
    fn foreign_key_checks() {
        let students = Relation::from_rows("Students", &["sid", "major"], &[&["s1", "cs"], &["s2", "math"]]).unwrap();
        let enroll = Relation::from_rows("Enroll", &["sid", "cid"], &[&["s1", "c1"], &["s1", "c2"], &["s2", "c1"]]).unwrap();
        let sid = AttrSet::single("sid");
        assert!(validate_foreign_key(&enroll, &students, &sid));
        // reversed direction: Enroll.sid is not a key
        assert!(!validate_foreign_key(&students, &enroll, &sid));
        let empty = Relation::new("Enroll", ["sid", "cid"]).unwrap();
        assert!(validate_foreign_key(&empty, &students, &sid));
        let dangling = Relation::from_rows("Enroll", &["sid", "cid"], &[&["s9", "c1"]]).unwrap();
        assert!(!validate_foreign_key(&dangling, &students, &sid));
    }
}
