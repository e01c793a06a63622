use serde::Serialize;

use super::UndirectedGraph;
use crate::error::{Error, Result};
use crate::gaxioms::{CiStatement, JOIN_CONTEXT};
use crate::relcore::{Attr, AttrSet};

fn single_join_attr(join_attrs: &AttrSet) -> Result<&Attr> {
    match join_attrs.len() {
        1 => Ok(join_attrs.iter().next().expect("one element")),
        n => Err(Error::Precondition(format!(
            "graph-based propagation needs exactly one join attribute, got {n} ({{{join_attrs}}})"
        ))),
    }
}

/// For a relation `r_name` whose P-map is `g1`, joined on a single
/// attribute: every separation of `g1` holds in the join. Returns the
/// statement re-scoped to the join when `ci` is a separation of `g1`, and
/// `None` when it is not (in which case it need not even hold in `r_name`).
pub fn pmap_propagate(
    g1: &UndirectedGraph,
    r_name: &str,
    join_attrs: &AttrSet,
    ci: &CiStatement,
) -> Result<Option<CiStatement>> {
    let d = single_join_attr(join_attrs)?;
    if ci.context() != r_name {
        return Err(Error::Argument(format!("statement `{ci}` is not about `{r_name}`")));
    }
    if !g1.vertices().contains(d) {
        return Err(Error::Precondition(format!("join attribute `{d}` is not a vertex of the P-map")));
    }
    Ok(g1.separated(ci.x(), ci.y(), ci.z())?.then(|| ci.in_context(JOIN_CONTEXT)))
}

/// Which side the join vertex can be added to while keeping a separation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `x | z | y ∪ {d}` is a separation.
    WithY,
    /// `x ∪ {d} | z | y` is a separation.
    WithX,
    /// Both are.
    Both,
}

/// Given a separation `x | z | y` and a vertex `d` outside all three sets,
/// `d` can be added to at least one side; reports which.
pub fn either_or(g1: &UndirectedGraph, x: &AttrSet, y: &AttrSet, z: &AttrSet, d: &Attr) -> Result<Branch> {
    if x.contains(d) || y.contains(d) || z.contains(d) {
        return Err(Error::Precondition(format!("`{d}` already occurs in the statement")));
    }
    if !g1.separated(x, y, z)? {
        return Err(Error::Precondition(format!("{{{z}}} does not separate {{{x}}} from {{{y}}}")));
    }
    let with_y = g1.separated(x, &y.with(d.clone()), z)?;
    let with_x = g1.separated(&x.with(d.clone()), y, z)?;
    match (with_x, with_y) {
        (true, true) => Ok(Branch::Both),
        (false, true) => Ok(Branch::WithY),
        (true, false) => Ok(Branch::WithX),
        (false, false) => unreachable!("a vertex reaching both sides would connect them outside z"),
    }
}

/// Edge union of the P-maps of two relations that share exactly the join
/// vertex `d`. The result is an I-map of their join.
pub fn union_imap(g1: &UndirectedGraph, g2: &UndirectedGraph, d: &Attr) -> Result<UndirectedGraph> {
    for (name, g) in [("first", g1), ("second", g2)] {
        if !g.is_connected() {
            return Err(Error::Precondition(format!("the {name} graph is not connected")));
        }
    }
    let shared = g1.vertices().intersection(&g2.vertices());
    if shared != AttrSet::single(d.clone()) {
        return Err(Error::Precondition(format!(
            "the graphs must share exactly the vertex `{d}`, they share {{{shared}}}"
        )));
    }
    let mut g = UndirectedGraph::new(&g1.vertices().union(&g2.vertices()));
    for (a, b) in g1.edges().into_iter().chain(g2.edges()) {
        g.add_edge(&a, &b)?;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(list: &str) -> AttrSet {
        AttrSet::parse_list(list)
    }

    #[test]
    fn either_or_on_a_chain() {
        let g = UndirectedGraph::path(&["A", "B", "C", "D"]);
        assert_eq!(either_or(&g, &s("A"), &s("C"), &s("B"), &"D".into()).unwrap(), Branch::WithY);
        let mut iso = g.clone();
        iso.remove_edge(&"C".into(), &"D".into());
        assert_eq!(either_or(&iso, &s("A"), &s("C"), &s("B"), &"D".into()).unwrap(), Branch::Both);
        assert!(either_or(&g, &s("A"), &s("C"), &s(""), &"D".into()).is_err());
        assert!(either_or(&g, &s("A"), &s("C"), &s("B"), &"B".into()).is_err());
    }

    #[test]
    fn star_center_gives_both() {
        let g = UndirectedGraph::from_edges(&["Z", "X", "Y", "D"], &[("Z", "X"), ("Z", "Y"), ("Z", "D")]).unwrap();
        assert_eq!(either_or(&g, &s("X"), &s("Y"), &s("Z"), &"D".into()).unwrap(), Branch::Both);
    }

    #[test]
    fn union_of_chain_and_edge() {
        let g1 = UndirectedGraph::path(&["A", "B", "C", "D"]);
        let g2 = UndirectedGraph::path(&["D", "E"]);
        let u = union_imap(&g1, &g2, &"D".into()).unwrap();
        assert_eq!(u, UndirectedGraph::path(&["A", "B", "C", "D", "E"]));
        assert!(u.separated(&s("A"), &s("E"), &s("D")).unwrap());

        let single = UndirectedGraph::new(&s("D"));
        let u = union_imap(&single, &single, &"D".into()).unwrap();
        assert_eq!(u.vertex_count(), 1);
        assert!(u.separations(None).is_empty());
    }

    #[test]
    fn union_preconditions() {
        let g1 = UndirectedGraph::path(&["A", "B", "D"]);
        let disconnected = UndirectedGraph::new(&s("D,F"));
        let err = union_imap(&g1, &disconnected, &"D".into()).unwrap_err();
        assert!(err.to_string().contains("not connected"));
        let overlap = UndirectedGraph::path(&["B", "D", "F"]);
        assert!(union_imap(&g1, &overlap, &"D".into()).unwrap_err().to_string().contains("share exactly"));
    }

    #[test]
    fn propagation_requires_single_attribute() {
        let g = UndirectedGraph::path(&["A", "B", "D"]);
        let ci = CiStatement::of("A", "D", "B", "R");
        assert_eq!(pmap_propagate(&g, "R", &s("D"), &ci).unwrap(), Some(ci.in_context(JOIN_CONTEXT)));
        assert!(pmap_propagate(&g, "R", &s("B,D"), &ci).is_err());
        assert_eq!(pmap_propagate(&g, "R", &s("D"), &CiStatement::of("A", "D", "", "R")).unwrap(), None);
    }
}
