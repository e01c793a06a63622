use std::fmt;

use serde::Serialize;

use super::UndirectedGraph;
use crate::error::{Error, Result};
use crate::gaxioms::{enumerate_triples, CiSet, CiStatement};
use crate::relcore::{Attr, AttrSet, CiTester, Relation};

/// A source of CI judgements over a fixed attribute universe.
pub trait CiOracle {
    fn universe(&self) -> AttrSet;

    fn independent(&self, x: &AttrSet, y: &AttrSet, z: &AttrSet) -> Result<bool>;

    /// Whether the underlying distribution is known to be strictly positive;
    /// `None` when the oracle cannot tell.
    fn strictly_positive(&self) -> Option<bool> {
        None
    }
}

impl CiOracle for CiTester {
    fn universe(&self) -> AttrSet {
        self.schema().clone()
    }

    fn independent(&self, x: &AttrSet, y: &AttrSet, z: &AttrSet) -> Result<bool> {
        self.holds(x, y, z)
    }

    fn strictly_positive(&self) -> Option<bool> {
        Some(self.is_strictly_positive())
    }
}

/// Membership in a CI set, restricted to one context.
pub struct StatementOracle<'a> {
    set: &'a CiSet,
    context: String,
}

impl<'a> StatementOracle<'a> {
    pub fn new(set: &'a CiSet, context: impl Into<String>) -> Self {
        StatementOracle {
            set,
            context: context.into(),
        }
    }
}

impl CiOracle for StatementOracle<'_> {
    fn universe(&self) -> AttrSet {
        self.set.universe().clone()
    }

    fn independent(&self, x: &AttrSet, y: &AttrSet, z: &AttrSet) -> Result<bool> {
        let s = CiStatement::new(x.clone(), y.clone(), z.clone(), self.context.as_str())?;
        Ok(self.set.contains(&s))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    /// Every independence of the model is a separation of the graph.
    DMap,
    /// Every separation of the graph is an independence of the model.
    IMap,
    /// Both.
    PMap,
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapKind::DMap => "d_map",
            MapKind::IMap => "i_map",
            MapKind::PMap => "p_map",
        })
    }
}

/// A triple on which graph and model disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapCounterexample {
    pub x: AttrSet,
    pub z: AttrSet,
    pub y: AttrSet,
    pub separated: bool,
    pub independent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapVerdict {
    pub kind: MapKind,
    pub holds: bool,
    /// Number of triples examined.
    pub checked: usize,
    /// Total number of disagreeing triples.
    pub violations: usize,
    /// The first disagreements, at most [`COUNTEREXAMPLE_CAP`].
    pub counterexamples: Vec<MapCounterexample>,
}

pub const COUNTEREXAMPLE_CAP: usize = 10;
/// Largest universe checked exhaustively when no subset-size limit is given.
pub const MAX_EXHAUSTIVE_VERTICES: usize = 8;
/// Largest universe accepted at all.
pub const MAX_LIMITED_VERTICES: usize = 16;

/// Compares graph separation with an oracle over all disjoint triples
/// (or those whose sets have at most `limit` elements).
pub fn verify_map(g: &UndirectedGraph, oracle: &dyn CiOracle, kind: MapKind, limit: Option<usize>) -> Result<MapVerdict> {
    let universe = oracle.universe();
    if g.vertices() != universe {
        return Err(Error::Argument(format!(
            "graph vertices {{{}}} differ from the oracle's attributes {{{universe}}}",
            g.vertices()
        )));
    }
    let bound = if limit.is_some() {
        MAX_LIMITED_VERTICES
    } else {
        MAX_EXHAUSTIVE_VERTICES
    };
    if universe.len() > bound {
        return Err(Error::ResourceLimit {
            what: "vertices for map verification",
            actual: universe.len(),
            bound,
        });
    }
    let mut verdict = MapVerdict {
        kind,
        holds: true,
        checked: 0,
        violations: 0,
        counterexamples: Vec::new(),
    };
    for t in enumerate_triples(&universe, limit) {
        let separated = g.separated(&t.x, &t.y, &t.z)?;
        let independent = oracle.independent(&t.x, &t.y, &t.z)?;
        verdict.checked += 1;
        let bad = match kind {
            MapKind::IMap => separated && !independent,
            MapKind::DMap => independent && !separated,
            MapKind::PMap => separated != independent,
        };
        if bad {
            verdict.holds = false;
            verdict.violations += 1;
            if verdict.counterexamples.len() < COUNTEREXAMPLE_CAP {
                verdict.counterexamples.push(MapCounterexample {
                    x: t.x,
                    z: t.z,
                    y: t.y,
                    separated,
                    independent,
                });
            }
        }
    }
    Ok(verdict)
}

/// Convenience: [`verify_map`] against the exact CIs of a relation.
pub fn verify_map_on(g: &UndirectedGraph, r: &Relation, kind: MapKind) -> Result<MapVerdict> {
    verify_map(g, &CiTester::new(r), kind, None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalImap {
    pub graph: UndirectedGraph,
    /// `Some(false)` means the construction may not be an I-map: the
    /// intersection rule it relies on can fail without positivity.
    pub strictly_positive: Option<bool>,
    pub warnings: Vec<String>,
}

/// Pairwise construction: `a` and `b` are adjacent unless the oracle says
/// `a ⊥ b` given all other attributes. Minimal and an I-map for strictly
/// positive distributions.
pub fn build_minimal_imap(oracle: &dyn CiOracle) -> Result<MinimalImap> {
    let universe = oracle.universe();
    if universe.len() > MAX_EXHAUSTIVE_VERTICES {
        return Err(Error::ResourceLimit {
            what: "attributes for I-map construction",
            actual: universe.len(),
            bound: MAX_EXHAUSTIVE_VERTICES,
        });
    }
    let mut g = UndirectedGraph::complete(&universe);
    let vs: Vec<&Attr> = universe.iter().collect();
    for (i, a) in vs.iter().enumerate() {
        for b in &vs[i + 1..] {
            let (sa, sb) = (AttrSet::single((*a).clone()), AttrSet::single((*b).clone()));
            let rest = universe.difference(&sa).difference(&sb);
            if oracle.independent(&sa, &sb, &rest)? {
                g.remove_edge(a, b);
            }
        }
    }
    let positive = oracle.strictly_positive();
    let mut warnings = Vec::new();
    match positive {
        Some(false) => warnings.push(
            "distribution is not strictly positive; the pairwise graph is unverified and may not be an I-map".to_owned(),
        ),
        None => warnings.push("positivity unknown; minimality and the I-map property are assumed".to_owned()),
        Some(true) => {}
    }
    Ok(MinimalImap {
        graph: g,
        strictly_positive: positive,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product(attrs: &[&str]) -> Relation {
        // full 0/1 grid over the attributes, each row once
        let mut r = Relation::new("R", attrs.iter().copied()).unwrap();
        for m in 0..(1u32 << attrs.len()) {
            r.push((0..attrs.len()).map(|i| if m >> i & 1 == 1 { "1".into() } else { "0".into() }).collect())
                .unwrap();
        }
        r
    }

    #[test]
    fn trivial_maps() {
        let r = product(&["A", "B", "C"]);
        let complete = UndirectedGraph::complete(&r.schema());
        assert!(verify_map_on(&complete, &r, MapKind::IMap).unwrap().holds);
        let empty = UndirectedGraph::new(&r.schema());
        assert!(verify_map_on(&empty, &r, MapKind::DMap).unwrap().holds);
        // the independent grid is even perfectly mapped by the empty graph
        assert!(verify_map_on(&empty, &r, MapKind::PMap).unwrap().holds);
        assert!(!verify_map_on(&complete, &r, MapKind::DMap).unwrap().holds);
    }

    #[test]
    fn counterexamples_are_capped() {
        let r = product(&["A", "B", "C", "D"]);
        let v = verify_map_on(&UndirectedGraph::complete(&r.schema()), &r, MapKind::DMap).unwrap();
        assert!(v.violations > COUNTEREXAMPLE_CAP);
        assert_eq!(v.counterexamples.len(), COUNTEREXAMPLE_CAP);
    }

    #[test]
    fn universe_mismatch_and_bounds() {
        let r = product(&["A", "B"]);
        let g = UndirectedGraph::new(&AttrSet::parse_list("A,B,C"));
        assert!(verify_map_on(&g, &r, MapKind::IMap).is_err());
        let big: Vec<String> = (0..9).map(|i| format!("V{i}")).collect();
        let names: Vec<&str> = big.iter().map(String::as_str).collect();
        let u = AttrSet::of(&names);
        let set = CiSet::new(u.clone());
        let oracle = StatementOracle::new(&set, "R");
        let g = UndirectedGraph::new(&u);
        assert!(matches!(verify_map(&g, &oracle, MapKind::IMap, None), Err(Error::ResourceLimit { .. })));
        assert!(verify_map(&g, &oracle, MapKind::IMap, Some(1)).is_ok());
    }

    #[test]
    fn independent_grid_gives_empty_imap() {
        let built = build_minimal_imap(&CiTester::new(&product(&["A", "B", "C"]))).unwrap();
        assert_eq!(built.graph.edge_count(), 0);
        assert_eq!(built.strictly_positive, Some(true));
        assert!(built.warnings.is_empty());
    }

    #[test]
    fn parity_relation_is_flagged() {
        let r = Relation::from_rows(
            "X",
            &["A", "B", "C"],
            &[&["0", "0", "0"], &["0", "1", "1"], &["1", "0", "1"], &["1", "1", "0"]],
        )
        .unwrap();
        let built = build_minimal_imap(&CiTester::new(&r)).unwrap();
        assert_eq!(built.strictly_positive, Some(false));
        assert!(!built.warnings.is_empty());
        // each pair is dependent given the third, so the graph is complete
        assert_eq!(built.graph.edge_count(), 3);
    }
}
