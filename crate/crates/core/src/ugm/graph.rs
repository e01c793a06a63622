use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaxioms::Triple;
use crate::relcore::{Attr, AttrSet};

/// The edge-list interchange form: `{"vertices": [...], "edges": [["A","B"], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeList {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

/// A simple undirected graph over attribute names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UndirectedGraph {
    adj: BTreeMap<Attr, BTreeSet<Attr>>,
}

impl UndirectedGraph {
    /// A graph with the given vertices and no edges.
    pub fn new(vertices: &AttrSet) -> Self {
        UndirectedGraph {
            adj: vertices.iter().map(|v| (v.clone(), BTreeSet::new())).collect(),
        }
    }

    pub fn from_edges(vertices: &[&str], edges: &[(&str, &str)]) -> Result<Self> {
        let mut g = UndirectedGraph::new(&AttrSet::of(vertices));
        for (a, b) in edges {
            g.add_edge(&Attr::from(*a), &Attr::from(*b))?;
        }
        Ok(g)
    }

    /// The path `v0 - v1 - ... - vk`.
    pub fn path(vertices: &[&str]) -> Self {
        let edges: Vec<(&str, &str)> = vertices.windows(2).map(|w| (w[0], w[1])).collect();
        UndirectedGraph::from_edges(vertices, &edges).expect("distinct path vertices")
    }

    pub fn complete(vertices: &AttrSet) -> Self {
        let mut g = UndirectedGraph::new(vertices);
        let vs: Vec<&Attr> = vertices.iter().collect();
        for (i, a) in vs.iter().enumerate() {
            for b in &vs[i + 1..] {
                g.add_edge(a, b).expect("declared vertices");
            }
        }
        g
    }

    pub fn add_edge(&mut self, a: &Attr, b: &Attr) -> Result<bool> {
        if a == b {
            return Err(Error::Argument(format!("self-loop on `{a}`")));
        }
        for v in [a, b] {
            if !self.adj.contains_key(v) {
                return Err(Error::Argument(format!("edge endpoint `{v}` is not a vertex")));
            }
        }
        let added = self.adj.get_mut(a).expect("checked").insert(b.clone());
        self.adj.get_mut(b).expect("checked").insert(a.clone());
        Ok(added)
    }

    pub fn remove_edge(&mut self, a: &Attr, b: &Attr) -> bool {
        let removed = self.adj.get_mut(a).is_some_and(|n| n.remove(b));
        if let Some(n) = self.adj.get_mut(b) {
            n.remove(a);
        }
        removed
    }

    pub fn has_edge(&self, a: &Attr, b: &Attr) -> bool {
        self.adj.get(a).is_some_and(|n| n.contains(b))
    }

    pub fn vertices(&self) -> AttrSet {
        self.adj.keys().cloned().collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: &Attr) -> impl Iterator<Item = &Attr> {
        self.adj.get(v).into_iter().flatten()
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(Attr, Attr)> {
        self.adj
            .iter()
            .flat_map(|(a, ns)| ns.iter().filter(move |b| a < *b).map(move |b| (a.clone(), b.clone())))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn is_connected(&self) -> bool {
        let Some(start) = self.adj.keys().next() else {
            return true;
        };
        self.reachable(&AttrSet::single(start.clone()), &AttrSet::new()).len() == self.adj.len()
    }

    /// Vertices reachable from `from` without entering `blocked`.
    fn reachable(&self, from: &AttrSet, blocked: &AttrSet) -> BTreeSet<Attr> {
        let mut seen: BTreeSet<Attr> = from.iter().cloned().collect();
        let mut queue: VecDeque<&Attr> = from.iter().collect();
        while let Some(v) = queue.pop_front() {
            for n in self.neighbors(v) {
                if !blocked.contains(n) && seen.insert(n.clone()) {
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    /// True iff every path from `x` to `y` passes through `z`.
    pub fn separated(&self, x: &AttrSet, y: &AttrSet, z: &AttrSet) -> Result<bool> {
        if x.is_empty() || y.is_empty() {
            return Err(Error::Argument("both separated sets must be non-empty".into()));
        }
        if !x.is_disjoint(y) || !x.is_disjoint(z) || !y.is_disjoint(z) {
            return Err(Error::Argument(format!("sets {{{x}}}, {{{y}}}, {{{z}}} overlap")));
        }
        if let Some(v) = x.iter().chain(y.iter()).chain(z.iter()).find(|v| !self.adj.contains_key(*v)) {
            return Err(Error::Argument(format!("`{v}` is not a vertex")));
        }
        let reach = self.reachable(x, z);
        Ok(y.iter().all(|v| !reach.contains(v)))
    }

    /// Every separation `x | z | y` of the graph, symmetric pairs once.
    pub fn separations(&self, max_set_size: Option<usize>) -> Vec<Triple> {
        crate::gaxioms::enumerate_triples(&self.vertices(), max_set_size)
            .into_iter()
            .filter(|t| self.separated(&t.x, &t.y, &t.z).expect("enumerated triples are valid"))
            .collect()
    }

    /// Graphviz text with vertices and edges sorted.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for v in self.adj.keys() {
            let _ = writeln!(out, "  \"{}\";", escape(v.as_str()));
        }
        for (a, b) in self.edges() {
            let _ = writeln!(out, "  \"{}\" -- \"{}\";", escape(a.as_str()), escape(b.as_str()));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_edge_list(&self) -> EdgeList {
        EdgeList {
            vertices: self.adj.keys().map(|v| v.to_string()).collect(),
            edges: self.edges().into_iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
        }
    }

    /// Builds a graph from an edge list; edge endpoints not listed as
    /// vertices are an error.
    pub fn from_edge_list(list: &EdgeList) -> Result<Self> {
        let vertices: AttrSet = list.vertices.iter().map(|v| Attr::from(v.as_str())).collect();
        if vertices.len() != list.vertices.len() {
            return Err(Error::Parse("duplicate vertex in edge list".into()));
        }
        let mut g = UndirectedGraph::new(&vertices);
        for [a, b] in &list.edges {
            g.add_edge(&Attr::from(a.as_str()), &Attr::from(b.as_str()))
                .map_err(|e| Error::Parse(format!("edge list: {e}")))?;
        }
        Ok(g)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        UndirectedGraph::from_edge_list(&serde_json::from_str(text)?)
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(list: &str) -> AttrSet {
        AttrSet::parse_list(list)
    }

    #[test]
    fn path_separation() {
        let g = UndirectedGraph::path(&["A", "B", "C", "D"]);
        assert!(g.separated(&s("A"), &s("D"), &s("B")).unwrap());
        assert!(!g.separated(&s("A"), &s("D"), &s("")).unwrap());
        assert!(g.separated(&s("A"), &s("C,D"), &s("B")).unwrap());
        assert!(!g.separated(&s("A,D"), &s("C"), &s("B")).unwrap());
        assert!(g.separated(&s("A"), &s("A"), &s("")).is_err());
        assert!(g.separated(&s("A"), &s("Q"), &s("")).is_err());
    }

    #[test]
    fn dot_is_sorted_and_deterministic() {
        let g = UndirectedGraph::from_edges(&["C", "A", "B"], &[("C", "B"), ("B", "A")]).unwrap();
        assert_eq!(g.to_dot(), "graph G {\n  \"A\";\n  \"B\";\n  \"C\";\n  \"A\" -- \"B\";\n  \"B\" -- \"C\";\n}\n");
        let empty = UndirectedGraph::new(&s("X"));
        assert_eq!(empty.to_dot(), "graph G {\n  \"X\";\n}\n");
    }

    #[test]
    fn edge_list_round_trip() {
        let g = UndirectedGraph::path(&["A", "B", "C"]);
        let text = serde_json::to_string(&g.to_edge_list()).unwrap();
        assert_eq!(text, r#"{"vertices":["A","B","C"],"edges":[["A","B"],["B","C"]]}"#);
        assert_eq!(UndirectedGraph::from_json(&text).unwrap(), g);
        assert!(UndirectedGraph::from_json(r#"{"vertices":["A"],"edges":[["A","B"]]}"#).is_err());
        assert!(UndirectedGraph::from_json(r#"{"vertices":["A"],"edges":[["A","A"]]}"#).is_err());
    }

    #[test]
    fn connectivity() {
        assert!(UndirectedGraph::path(&["A", "B"]).is_connected());
        assert!(!UndirectedGraph::new(&s("A,B")).is_connected());
        assert!(UndirectedGraph::new(&s("A")).is_connected());
    }
}
