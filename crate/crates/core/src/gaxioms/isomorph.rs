use serde::Serialize;

use super::axioms::subsets;
use super::{apply_axiom, Axiom, CiSet, CiStatement, Conclusion};

/// A rule instance whose premises are in the set but whose conclusion is not.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub premises: Vec<CiStatement>,
    /// The missing conclusion; for transitivity both disjuncts are missing.
    pub missing: Vec<CiStatement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsomorphReport {
    /// True when no violation was found.
    pub satisfied: bool,
    /// Total number of violated rule instances.
    pub violation_count: usize,
    /// The first violations found, in a deterministic order.
    pub violations: Vec<Violation>,
}

const MAX_REPORTED: usize = 50;

/// Checks the rules characterizing separation in undirected graphs
/// (symmetry, decomposition, strong union, intersection, transitivity)
/// against `set`, within each context, over `set`'s universe.
pub fn check_graph_isomorph_axioms(set: &CiSet) -> IsomorphReport {
    let universe = set.universe();
    let mut violations = Vec::new();
    let mut count = 0usize;
    let mut record = |v: Violation| {
        count += 1;
        if violations.len() < MAX_REPORTED {
            violations.push(v);
        }
    };
    for p in set.iter() {
        for axiom in [Axiom::Decomposition, Axiom::StrongUnion] {
            for c in apply_axiom(axiom, std::slice::from_ref(p), universe) {
                if let Conclusion::Holds(s) = c {
                    if !set.contains(&s) {
                        record(Violation {
                            axiom,
                            premises: vec![p.clone()],
                            missing: vec![s],
                        });
                    }
                }
            }
        }
        for c in apply_axiom(Axiom::Transitivity, std::slice::from_ref(p), universe) {
            if let Conclusion::Either(a, b) = c {
                if !set.contains(&a) && !set.contains(&b) {
                    record(Violation {
                        axiom: Axiom::Transitivity,
                        premises: vec![p.clone()],
                        missing: vec![a, b],
                    });
                }
            }
        }
        // intersection partners of p, looked up directly
        for (x, y) in p.orientations() {
            for w in subsets(p.z(), false) {
                let z = p.z().difference(&w);
                let Ok(q) = CiStatement::new(x.clone(), w.clone(), z.union(y), p.context()) else {
                    continue;
                };
                if !set.contains(&q) {
                    continue;
                }
                let concl = CiStatement::new(x.clone(), y.union(&w), z, p.context()).expect("disjoint");
                // each unordered pair is visited from both premises; report once
                if !set.contains(&concl) && p <= &q {
                    record(Violation {
                        axiom: Axiom::Intersection,
                        premises: vec![p.clone(), q],
                        missing: vec![concl],
                    });
                }
            }
        }
    }
    IsomorphReport {
        satisfied: count == 0,
        violation_count: count,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaxioms::enumerate_triples;
    use crate::relcore::AttrSet;

    /// Separation statements of the path A - B - C.
    fn path_separations() -> CiSet {
        let u = AttrSet::of(&["A", "B", "C"]);
        let stmts = enumerate_triples(&u, None)
            .into_iter()
            .filter(|t| t.z.contains(&"B".into()) && !t.x.contains(&"B".into()) && !t.y.contains(&"B".into()))
            .map(|t| t.into_statement("G"));
        CiSet::from_statements(u, stmts).unwrap()
    }

    #[test]
    fn graph_separation_satisfies_all_rules() {
        let set = path_separations();
        assert_eq!(set.len(), 1);
        let report = check_graph_isomorph_axioms(&set);
        assert!(report.satisfied, "{:?}", report.violations);
    }

    #[test]
    fn missing_strong_union_is_reported() {
        let u = AttrSet::of(&["A", "B", "C"]);
        let set = CiSet::from_statements(u, [CiStatement::of("A", "B", "", "R")]).unwrap();
        let report = check_graph_isomorph_axioms(&set);
        assert!(!report.satisfied);
        assert!(report
            .violations
            .iter()
            .any(|v| v.axiom == Axiom::StrongUnion && v.missing == vec![CiStatement::of("A", "B", "C", "R")]));
    }
}
