use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::CiStatement;
use crate::error::{Error, Result};
use crate::relcore::{Attr, AttrSet};

/// Inference rules over independence statements `I(X, Z, Y)`.
///
/// The first five (without strong union and transitivity) are the
/// graphoid rules; intersection only holds for strictly positive
/// distributions. Strong union and transitivity belong to the
/// graph-isomorph characterization and are only used for checking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Symmetry,
    Decomposition,
    WeakUnion,
    Contraction,
    Intersection,
    StrongUnion,
    Transitivity,
}

impl Axiom {
    pub const ALL: [Axiom; 7] = [
        Axiom::Symmetry,
        Axiom::Decomposition,
        Axiom::WeakUnion,
        Axiom::Contraction,
        Axiom::Intersection,
        Axiom::StrongUnion,
        Axiom::Transitivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Symmetry => "symmetry",
            Axiom::Decomposition => "decomposition",
            Axiom::WeakUnion => "weak_union",
            Axiom::Contraction => "contraction",
            Axiom::Intersection => "intersection",
            Axiom::StrongUnion => "strong_union",
            Axiom::Transitivity => "transitivity",
        }
    }

    /// Number of premises the rule takes.
    pub fn arity(self) -> usize {
        match self {
            Axiom::Contraction | Axiom::Intersection => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.name() == s.replace('-', "_"))
            .ok_or_else(|| Error::Parse(format!("unknown axiom `{s}`")))
    }
}

/// Result of one rule application. Transitivity concludes a disjunction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Conclusion {
    Holds(CiStatement),
    Either(CiStatement, CiStatement),
}

impl Conclusion {
    pub fn statement(&self) -> Option<&CiStatement> {
        match self {
            Conclusion::Holds(s) => Some(s),
            Conclusion::Either(..) => None,
        }
    }
}

/// Non-empty subsets of `s`, optionally excluding `s` itself.
pub(crate) fn subsets(s: &AttrSet, proper: bool) -> Vec<AttrSet> {
    let items: Vec<&Attr> = s.iter().collect();
    let n = items.len();
    if n == 0 {
        return Vec::new();
    }
    let full: u64 = (1u64 << n) - 1;
    (1..=full)
        .filter(|&m| !(proper && m == full))
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| items[i]).collect())
        .collect()
}

fn stmt(x: &AttrSet, y: &AttrSet, z: &AttrSet, ctx: &str) -> Option<CiStatement> {
    CiStatement::new(x.clone(), y.clone(), z.clone(), ctx).ok()
}

/// Applies one rule to the given premises and returns every conclusion it
/// licenses. A premise list that does not fit the rule's pattern yields
/// an empty list.
///
/// Decomposition and weak union are instantiated on every 2-partition of
/// either independent side. Strong union and transitivity range over the
/// attributes of `universe` not mentioned by the premise.
pub fn apply_axiom(axiom: Axiom, premises: &[CiStatement], universe: &AttrSet) -> Vec<Conclusion> {
    if premises.len() != axiom.arity() {
        return Vec::new();
    }
    let mut out: BTreeSet<Conclusion> = BTreeSet::new();
    match axiom {
        Axiom::Symmetry => {
            let p = &premises[0];
            if let Some(s) = stmt(p.y(), p.x(), p.z(), p.context()) {
                out.insert(Conclusion::Holds(s));
            }
        }
        Axiom::Decomposition => {
            let p = &premises[0];
            for (left, right) in p.orientations() {
                for part in subsets(right, true) {
                    out.extend(stmt(left, &part, p.z(), p.context()).map(Conclusion::Holds));
                }
            }
        }
        Axiom::WeakUnion => {
            let p = &premises[0];
            for (left, right) in p.orientations() {
                for moved in subsets(right, true) {
                    let cond = p.z().union(&moved);
                    let rest = right.difference(&moved);
                    out.extend(stmt(left, &rest, &cond, p.context()).map(Conclusion::Holds));
                }
            }
        }
        Axiom::Contraction => {
            // I(X,Z,Y) & I(X,Z∪Y,W) => I(X,Z,Y∪W)
            for (first, second) in [(&premises[0], &premises[1]), (&premises[1], &premises[0])] {
                if first.context() != second.context() {
                    continue;
                }
                for (x, y) in first.orientations() {
                    for (x2, w) in second.orientations() {
                        if x == x2 && *second.z() == first.z().union(y) {
                            out.extend(stmt(x, &y.union(w), first.z(), first.context()).map(Conclusion::Holds));
                        }
                    }
                }
            }
        }
        Axiom::Intersection => {
            // I(X,Z∪W,Y) & I(X,Z∪Y,W) => I(X,Z,Y∪W)
            let (p, q) = (&premises[0], &premises[1]);
            if p.context() == q.context() {
                for (x, y) in p.orientations() {
                    for (x2, w) in q.orientations() {
                        if x != x2 || !w.is_subset(p.z()) || !y.is_subset(q.z()) {
                            continue;
                        }
                        let z = p.z().difference(w);
                        if z == q.z().difference(y) {
                            out.extend(stmt(x, &y.union(w), &z, p.context()).map(Conclusion::Holds));
                        }
                    }
                }
            }
        }
        Axiom::StrongUnion => {
            let p = &premises[0];
            let free = universe.difference(&p.attrs());
            for extra in subsets(&free, false) {
                out.extend(stmt(p.x(), p.y(), &p.z().union(&extra), p.context()).map(Conclusion::Holds));
            }
        }
        Axiom::Transitivity => {
            let p = &premises[0];
            for gamma in universe.difference(&p.attrs()).iter() {
                let g = AttrSet::single(gamma.clone());
                if let (Some(a), Some(b)) = (
                    stmt(p.x(), &g, p.z(), p.context()),
                    stmt(&g, p.y(), p.z(), p.context()),
                ) {
                    out.insert(Conclusion::Either(a, b));
                }
            }
        }
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(s: &str) -> AttrSet {
        AttrSet::parse_list(s)
    }

    fn holds(v: &[Conclusion]) -> Vec<CiStatement> {
        v.iter().filter_map(|c| c.statement().cloned()).collect()
    }

    #[test]
    fn decomposition_splits_compound_side() {
        let p = CiStatement::of("X", "Y,W", "Z", "R");
        let got = holds(&apply_axiom(Axiom::Decomposition, &[p], &u("X,Y,W,Z")));
        assert_eq!(got, vec![CiStatement::of("X", "W", "Z", "R"), CiStatement::of("X", "Y", "Z", "R")]);
    }

    #[test]
    fn symmetry_is_a_fixed_point() {
        let p = CiStatement::of("A", "B", "C", "R");
        assert_eq!(holds(&apply_axiom(Axiom::Symmetry, std::slice::from_ref(&p), &u("A,B,C"))), vec![p]);
    }

    #[test]
    fn weak_union_moves_part_into_condition() {
        let p = CiStatement::of("A", "B,C", "", "R");
        let got = holds(&apply_axiom(Axiom::WeakUnion, &[p], &u("A,B,C")));
        assert!(got.contains(&CiStatement::of("A", "B", "C", "R")));
        assert!(got.contains(&CiStatement::of("A", "C", "B", "R")));
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn contraction_in_either_premise_order() {
        let p = CiStatement::of("A", "B", "C", "R");
        let q = CiStatement::of("A", "D", "B,C", "R");
        let want = vec![CiStatement::of("A", "B,D", "C", "R")];
        assert_eq!(holds(&apply_axiom(Axiom::Contraction, &[p.clone(), q.clone()], &u("A,B,C,D"))), want);
        assert_eq!(holds(&apply_axiom(Axiom::Contraction, &[q, p], &u("A,B,C,D"))), want);
    }

    #[test]
    fn intersection_pattern() {
        let p = CiStatement::of("X", "Y", "Z,W", "R");
        let q = CiStatement::of("X", "W", "Z,Y", "R");
        let got = holds(&apply_axiom(Axiom::Intersection, &[p, q], &u("X,Y,Z,W")));
        assert_eq!(got, vec![CiStatement::of("X", "W,Y", "Z", "R")]);
    }

    #[test]
    fn mismatches_are_empty_not_errors() {
        let p = CiStatement::of("A", "B", "C", "R");
        let q = CiStatement::of("A", "D", "C", "R");
        assert!(apply_axiom(Axiom::Contraction, &[p.clone(), q], &u("A,B,C,D")).is_empty());
        assert!(apply_axiom(Axiom::Contraction, std::slice::from_ref(&p), &u("A,B,C,D")).is_empty());
        let other_ctx = CiStatement::of("A", "D", "B,C", "S");
        assert!(apply_axiom(Axiom::Contraction, &[p, other_ctx], &u("A,B,C,D")).is_empty());
    }

    #[test]
    fn strong_union_and_transitivity_use_the_universe() {
        let p = CiStatement::of("A", "B", "C", "R");
        let su = holds(&apply_axiom(Axiom::StrongUnion, std::slice::from_ref(&p), &u("A,B,C,D")));
        assert_eq!(su, vec![CiStatement::of("A", "B", "C,D", "R")]);
        let tr = apply_axiom(Axiom::Transitivity, &[p], &u("A,B,C,D"));
        assert_eq!(
            tr,
            vec![Conclusion::Either(CiStatement::of("A", "D", "C", "R"), CiStatement::of("D", "B", "C", "R"))]
        );
    }

    #[test]
    fn axiom_names_parse() {
        for a in Axiom::ALL {
            assert_eq!(a.name().parse::<Axiom>().unwrap(), a);
        }
        assert_eq!("weak-union".parse::<Axiom>().unwrap(), Axiom::WeakUnion);
    }
}
