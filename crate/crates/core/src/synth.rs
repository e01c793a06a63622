//! Seeded generators for synthetic instances: random bags, key-structured
//! relation pairs, and relations whose frequencies factorize over a given
//! undirected graph.
//!
//! The factor construction sets `N(t) = Π_{(u,v) ∈ E} f_uv(t[u], t[v])` over
//! the full value grid with random integer factors, so every separation of
//! the graph is an exact CI of the relation. Whether the graph is also a
//! perfect map depends on the draw; [`pmap_relation`] resamples until it is.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::relcore::{Attr, AttrSet, Relation, Value};
use crate::ugm::{verify_map_on, MapKind, UndirectedGraph};

/// The generator used throughout: deterministic for a given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn value(prefix: &str, i: usize) -> Value {
    Value::from(format!("{prefix}{i}"))
}

/// Value names used for attribute `a`: `a0`, `a1`, ... (lower-cased name).
fn prefix(a: &Attr) -> String {
    a.as_str().to_lowercase()
}

/// A bag of `rows` tuples drawn uniformly from `domain` values per attribute.
pub fn random_relation<R: Rng>(rng: &mut R, name: &str, attrs: &[&str], domain: usize, rows: usize) -> Relation {
    let mut r = Relation::new(name, attrs.iter().copied()).expect("distinct attribute names");
    let cols: Vec<Attr> = r.columns().to_vec();
    for _ in 0..rows {
        let t = cols.iter().map(|a| value(&prefix(a), rng.gen_range(0..domain))).collect();
        r.push(t).expect("arity matches");
    }
    r
}

/// Two random relations sharing between one and three attributes, each with
/// at most five attributes, domains up to three and up to forty rows.
pub fn random_pair<R: Rng>(rng: &mut R) -> (Relation, Relation) {
    let shared_n = rng.gen_range(1..=3);
    let shared: Vec<String> = (0..shared_n).map(|i| format!("J{i}")).collect();
    let r_own: Vec<String> = (0..rng.gen_range(1..=5 - shared_n)).map(|i| format!("R{i}")).collect();
    let s_own: Vec<String> = (0..rng.gen_range(1..=5 - shared_n)).map(|i| format!("S{i}")).collect();
    let domain = rng.gen_range(2..=3);
    let mut r_attrs: Vec<&str> = r_own.iter().chain(&shared).map(String::as_str).collect();
    let mut s_attrs: Vec<&str> = shared.iter().chain(&s_own).map(String::as_str).collect();
    r_attrs.shuffle(rng);
    s_attrs.shuffle(rng);
    let r_rows = rng.gen_range(1..=40);
    let s_rows = rng.gen_range(1..=40);
    (
        random_relation(rng, "R", &r_attrs, domain, r_rows),
        random_relation(rng, "S", &s_attrs, domain, s_rows),
    )
}

/// A referencing relation `R(A.., D)` and a referenced relation `S(D, B..)`
/// in which `D` is a key of `S` and every `D` value of `R` occurs in `S`.
pub fn fk_pair<R: Rng>(rng: &mut R) -> (Relation, Relation) {
    let keys = rng.gen_range(1..=4);
    let domain = rng.gen_range(2..=3);
    let r_n = rng.gen_range(1..=3);
    let s_n = rng.gen_range(1..=3);
    let r_names: Vec<String> = (0..r_n).map(|i| format!("A{i}")).collect();
    let s_names: Vec<String> = (0..s_n).map(|i| format!("B{i}")).collect();
    let mut r_attrs: Vec<&str> = r_names.iter().map(String::as_str).collect();
    r_attrs.push("D");
    let mut s_attrs = vec!["D"];
    s_attrs.extend(s_names.iter().map(String::as_str));

    let mut s = Relation::new("S", s_attrs.iter().copied()).expect("distinct");
    for k in 0..keys {
        let mut t = vec![value("d", k)];
        t.extend((0..s_n).map(|i| value(&format!("b{i}_"), rng.gen_range(0..domain))));
        s.push(t).expect("arity");
    }
    let mut r = Relation::new("R", r_attrs.iter().copied()).expect("distinct");
    for _ in 0..rng.gen_range(1..=40) {
        let mut t: Vec<Value> = (0..r_n).map(|i| value(&format!("a{i}_"), rng.gen_range(0..domain))).collect();
        t.push(value("d", rng.gen_range(0..keys)));
        r.push(t).expect("arity");
    }
    (r, s)
}

/// Two relations on a shared key `D` with identical key sets, each key
/// occurring once on both sides.
pub fn one_one_pair<R: Rng>(rng: &mut R) -> (Relation, Relation) {
    let keys = rng.gen_range(1..=12);
    let domain = rng.gen_range(2..=3);
    let build = |rng: &mut R, name: &str, p: &str, n: usize| {
        let names: Vec<String> = (0..n).map(|i| format!("{p}{i}")).collect();
        let mut attrs: Vec<&str> = names.iter().map(String::as_str).collect();
        attrs.push("D");
        let mut r = Relation::new(name, attrs.iter().copied()).expect("distinct");
        let mut order: Vec<usize> = (0..keys).collect();
        order.shuffle(rng);
        for k in order {
            let mut t: Vec<Value> = (0..n).map(|i| value(&format!("{}{i}_", p.to_lowercase()), rng.gen_range(0..domain))).collect();
            t.push(value("d", k));
            r.push(t).expect("arity");
        }
        r
    };
    let (rn, sn) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
    let r = build(rng, "R", "A", rn);
    let s = build(rng, "S", "B", sn);
    (r, s)
}

/// A random connected graph: a random spanning tree plus each remaining
/// pair with probability `extra_edge_p`.
pub fn random_connected_graph<R: Rng>(rng: &mut R, vertices: &[&str], extra_edge_p: f64) -> UndirectedGraph {
    let mut g = UndirectedGraph::new(&AttrSet::of(vertices));
    let mut order: Vec<Attr> = vertices.iter().map(|v| Attr::from(*v)).collect();
    order.shuffle(rng);
    for i in 1..order.len() {
        let j = rng.gen_range(0..i);
        g.add_edge(&order[i], &order[j]).expect("declared vertices");
    }
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if !g.has_edge(&order[i], &order[j]) && rng.gen_bool(extra_edge_p) {
                g.add_edge(&order[i], &order[j]).expect("declared vertices");
            }
        }
    }
    g
}

/// A random graph where each pair is adjacent with probability `p`.
pub fn random_graph<R: Rng>(rng: &mut R, vertices: &[&str], p: f64) -> UndirectedGraph {
    let mut g = UndirectedGraph::new(&AttrSet::of(vertices));
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            if rng.gen_bool(p) {
                g.add_edge(&vertices[i].into(), &vertices[j].into()).expect("declared vertices");
            }
        }
    }
    g
}

/// A relation over the graph's vertices with `domain` values each, whose
/// tuple counts are products of random edge factors in `1..=5`.
pub fn factor_relation<R: Rng>(rng: &mut R, name: &str, g: &UndirectedGraph, domain: usize) -> Relation {
    let vertices: Vec<Attr> = g.vertices().into_iter().collect();
    let n = vertices.len();
    let idx = |a: &Attr| vertices.iter().position(|v| v == a).expect("own vertex");
    let factors: Vec<(usize, usize, Vec<u64>)> = g
        .edges()
        .iter()
        .map(|(a, b)| (idx(a), idx(b), (0..domain * domain).map(|_| rng.gen_range(1..=5)).collect()))
        .collect();
    let mut r = Relation::new(name, vertices.iter().cloned()).expect("distinct vertices");
    let mut digits = vec![0usize; n];
    loop {
        let count: u64 = factors.iter().map(|(u, v, f)| f[digits[*u] * domain + digits[*v]]).product();
        let t = digits.iter().zip(&vertices).map(|(&d, a)| value(&prefix(a), d)).collect();
        r.push_weighted(t, count).expect("arity");
        // odometer increment
        let mut k = 0;
        while k < n {
            digits[k] += 1;
            if digits[k] < domain {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }
    r
}

/// A factor-constructed relation for which `g` is verified to be a perfect
/// map, or `None` after `tries` failed draws.
pub fn pmap_relation<R: Rng>(rng: &mut R, name: &str, g: &UndirectedGraph, domain: usize, tries: usize) -> Result<Option<Relation>> {
    for _ in 0..tries {
        let r = factor_relation(rng, name, g, domain);
        if verify_map_on(g, &r, MapKind::PMap)?.holds {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joinprop::{validate_key_class, JoinSpec, KeyClass};

    #[test]
    fn seeds_are_reproducible() {
        let a = random_relation(&mut rng(7), "R", &["A", "B"], 3, 10);
        let b = random_relation(&mut rng(7), "R", &["A", "B"], 3, 10);
        assert_eq!(a.expanded_rows().collect::<Vec<_>>(), b.expanded_rows().collect::<Vec<_>>());
    }

    #[test]
    fn key_structured_pairs_validate() {
        let mut g = rng(1);
        for _ in 0..20 {
            let (r, s) = fk_pair(&mut g);
            assert!(validate_key_class(&JoinSpec::between(&r, &s, KeyClass::ForeignKeyLeftToRight).unwrap(), &r, &s).unwrap());
            let (r, s) = one_one_pair(&mut g);
            assert!(validate_key_class(&JoinSpec::between(&r, &s, KeyClass::OneOne).unwrap(), &r, &s).unwrap());
        }
    }

    #[test]
    fn factor_relation_covers_the_grid() {
        let g = UndirectedGraph::path(&["A", "B", "C"]);
        let r = factor_relation(&mut rng(3), "R", &g, 2);
        assert_eq!(r.tuples().count(), 8);
        assert!(r.tuples().all(|(_, m)| (1..=25).contains(&m)));
    }

    #[test]
    fn connected_graphs_are_connected() {
        let mut g = rng(5);
        for _ in 0..20 {
            assert!(random_connected_graph(&mut g, &["A", "B", "C", "D", "E"], 0.2).is_connected());
        }
    }

    #[test]
    fn pmap_draws_are_perfect() {
        let g = UndirectedGraph::path(&["A", "B", "C", "D"]);
        let r = pmap_relation(&mut rng(11), "R", &g, 2, 50).unwrap().expect("a perfect draw");
        assert!(verify_map_on(&g, &r, MapKind::PMap).unwrap().holds);
    }
}
