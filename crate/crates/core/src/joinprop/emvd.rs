use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relcore::{natural_join, AttrSet, Relation, Value};

/// Embedded multivalued dependency `X ↠ Y | scope`: within the
/// duplicate-free projection onto `scope`, the `Y` values associated with an
/// `X` value are independent of the remaining scope attributes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EmvdStatement {
    pub x: AttrSet,
    pub y: AttrSet,
    pub scope: AttrSet,
}

impl EmvdStatement {
    pub fn new(x: AttrSet, y: AttrSet, scope: AttrSet) -> Result<Self> {
        if !x.union(&y).is_subset(&scope) {
            return Err(Error::Argument(format!(
                "EMVD sides {{{x}}} and {{{y}}} must lie inside the scope {{{scope}}}"
            )));
        }
        Ok(EmvdStatement { x, y, scope })
    }

    /// The scope attributes outside `X ∪ Y`.
    pub fn rest(&self) -> AttrSet {
        self.scope.difference(&self.x.union(&self.y))
    }
}

impl fmt::Display for EmvdStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.x.is_empty() {
            write!(f, "{{}} ->> {} | {}", self.y, self.scope)
        } else {
            write!(f, "{} ->> {} | {}", self.x, self.y, self.scope)
        }
    }
}

/// True iff the MVD `X ↠ Y` holds in the set projection of `r` onto the
/// statement's scope: for every `X` value, the `(Y, W)` combinations that
/// occur are exactly the product of the `Y` and `W` values that occur.
pub fn emvd_holds(r: &Relation, e: &EmvdStatement) -> Result<bool> {
    let y = e.y.difference(&e.x);
    let w = e.rest();
    let cols = |s: &AttrSet| -> Result<Vec<usize>> {
        s.iter()
            .map(|a| {
                r.position(a).ok_or_else(|| Error::UnknownAttribute {
                    attr: a.clone(),
                    relation: r.name().to_owned(),
                })
            })
            .collect()
    };
    let (xc, yc, wc) = (cols(&e.x)?, cols(&y)?, cols(&w)?);
    let pick = |t: &[Value], c: &[usize]| -> Vec<Value> { c.iter().map(|&i| t[i].clone()).collect() };

    #[derive(Default)]
    struct Group {
        ys: BTreeSet<Vec<Value>>,
        ws: BTreeSet<Vec<Value>>,
        pairs: BTreeSet<(Vec<Value>, Vec<Value>)>,
    }
    let mut groups: BTreeMap<Vec<Value>, Group> = BTreeMap::new();
    for (t, _) in r.tuples() {
        let g = groups.entry(pick(t, &xc)).or_default();
        let (yv, wv) = (pick(t, &yc), pick(t, &wc));
        g.ys.insert(yv.clone());
        g.ws.insert(wv.clone());
        g.pairs.insert((yv, wv));
    }
    Ok(groups.values().all(|g| g.pairs.len() == g.ys.len() * g.ws.len()))
}

/// True iff every tuple of every relation takes part in the natural join of
/// all of them (vacuously true for no relations).
pub fn semi_join_reduced(relations: &[&Relation]) -> Result<bool> {
    let Some((first, rest)) = relations.split_first() else {
        return Ok(true);
    };
    let joined = rest.iter().fold((*first).clone(), |acc, r| natural_join(&acc, r));
    for r in relations {
        let used = joined.distinct_values(&r.schema())?;
        if r.distinct_values(&r.schema())? != used {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product() -> Relation {
        Relation::from_rows(
            "R",
            &["A", "B", "C"],
            &[&["a1", "b1", "c"], &["a1", "b2", "c"], &["a2", "b1", "c"], &["a2", "b2", "c"]],
        )
        .unwrap()
    }

    #[test]
    fn product_satisfies_emvd_and_deletion_breaks_it() {
        let e = EmvdStatement::new(AttrSet::single("C"), AttrSet::single("A"), AttrSet::parse_list("A,B,C")).unwrap();
        assert!(emvd_holds(&product(), &e).unwrap());
        let broken = product().filter(|t| !(t[0].as_ref() == "a2" && t[1].as_ref() == "b2"));
        assert!(!emvd_holds(&broken, &e).unwrap());
    }

    #[test]
    fn duplicates_do_not_matter() {
        let mut r = product();
        r.push_weighted(vec!["a1".into(), "b1".into(), "c".into()], 5).unwrap();
        let e = EmvdStatement::new(AttrSet::single("C"), AttrSet::single("A"), AttrSet::parse_list("A,B,C")).unwrap();
        assert!(emvd_holds(&r, &e).unwrap());
    }

    #[test]
    fn scope_must_cover_sides() {
        assert!(EmvdStatement::new(AttrSet::single("A"), AttrSet::single("B"), AttrSet::single("A")).is_err());
    }

    #[test]
    fn dangling_tuples_break_reduction() {
        let r = Relation::from_rows("R", &["A", "D"], &[&["a", "d1"]]).unwrap();
        let mut s = Relation::from_rows("S", &["D", "E"], &[&["d1", "e"]]).unwrap();
        assert!(semi_join_reduced(&[&r, &s]).unwrap());
        s.push(vec!["d5".into(), "e".into()]).unwrap();
        assert!(!semi_join_reduced(&[&r, &s]).unwrap());
        assert!(semi_join_reduced(&[]).unwrap());
    }
}
