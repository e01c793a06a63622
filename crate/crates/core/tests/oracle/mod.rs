//! Brute-force reference implementations used to check the library. They
//! share nothing with the library except reading raw tuples out of a
//! `Relation`.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use relcausal::relcore::Relation;

type Counts<K> = HashMap<K, u128>;

/// A bag as a plain list of (row, multiplicity).
#[derive(Clone, Debug)]
pub struct Table {
    pub cols: Vec<String>,
    pub rows: Vec<(Vec<String>, u64)>,
}

impl Table {
    pub fn new(cols: &[&str], rows: &[(&[&str], u64)]) -> Table {
        Table {
            cols: cols.iter().map(|c| c.to_string()).collect(),
            rows: rows.iter().map(|(r, m)| (r.iter().map(|v| v.to_string()).collect(), *m)).collect(),
        }
    }

    pub fn of(r: &Relation) -> Table {
        Table {
            cols: r.columns().iter().map(|a| a.as_str().to_owned()).collect(),
            rows: r
                .tuples()
                .map(|(t, m)| (t.iter().map(|v| v.to_string()).collect(), m))
                .collect(),
        }
    }

    pub fn total(&self) -> u64 {
        self.rows.iter().map(|(_, m)| m).sum()
    }

    fn pos(&self, c: &str) -> usize {
        self.cols.iter().position(|x| x == c).unwrap_or_else(|| panic!("no column {c}"))
    }

    fn key(&self, row: &[String], cols: &[String]) -> Vec<String> {
        cols.iter().map(|c| row[self.pos(c)].clone()).collect()
    }

    /// Nested-loop natural join; multiplicities multiply.
    pub fn join(&self, other: &Table) -> Table {
        let shared: Vec<String> = self.cols.iter().filter(|c| other.cols.contains(c)).cloned().collect();
        let extra: Vec<String> = other.cols.iter().filter(|c| !self.cols.contains(c)).cloned().collect();
        let mut cols = self.cols.clone();
        cols.extend(extra.iter().cloned());
        let mut rows = Vec::new();
        for (a, ma) in &self.rows {
            for (b, mb) in &other.rows {
                if shared.iter().all(|c| a[self.pos(c)] == b[other.pos(c)]) {
                    let mut row = a.clone();
                    row.extend(extra.iter().map(|c| b[other.pos(c)].clone()));
                    rows.push((row, ma * mb));
                }
            }
        }
        Table { cols, rows }
    }

    /// Exact CI: N(xyz)·N(z) = N(xz)·N(yz) for every x, y seen with each z.
    pub fn ci(&self, x: &[String], y: &[String], z: &[String]) -> bool {
        let mut nxyz: Counts<(Vec<String>, Vec<String>, Vec<String>)> = HashMap::new();
        let mut nxz: HashMap<(Vec<String>, Vec<String>), u128> = HashMap::new();
        let mut nyz: HashMap<(Vec<String>, Vec<String>), u128> = HashMap::new();
        let mut nz: HashMap<Vec<String>, u128> = HashMap::new();
        for (r, m) in &self.rows {
            let m = *m as u128;
            let (kx, ky, kz) = (self.key(r, x), self.key(r, y), self.key(r, z));
            *nxyz.entry((kx.clone(), ky.clone(), kz.clone())).or_default() += m;
            *nxz.entry((kx, kz.clone())).or_default() += m;
            *nyz.entry((ky, kz.clone())).or_default() += m;
            *nz.entry(kz).or_default() += m;
        }
        for ((kx, kz), a) in &nxz {
            for ((ky, kz2), b) in &nyz {
                if kz != kz2 {
                    continue;
                }
                let joint = nxyz.get(&(kx.clone(), ky.clone(), kz.clone())).copied().unwrap_or(0);
                if joint * nz[kz] != a * b {
                    return false;
                }
            }
        }
        true
    }

    /// Pr[target | given] by counting.
    pub fn prob(&self, target: &[(&str, &str)], given: &[(&str, &str)]) -> BigRational {
        let matches = |r: &[String], a: &[(&str, &str)]| a.iter().all(|(c, v)| r[self.pos(c)] == *v);
        let den: u64 = self.rows.iter().filter(|(r, _)| matches(r, given)).map(|(_, m)| m).sum();
        let num: u64 = self
            .rows
            .iter()
            .filter(|(r, _)| matches(r, given) && matches(r, target))
            .map(|(_, m)| m)
            .sum();
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// `x ->> y` on the duplicate-free projection onto `scope`: for every
    /// x-value, every y-part combines with every rest-part.
    pub fn emvd(&self, x: &[String], y: &[String], scope: &[String]) -> bool {
        let rest: Vec<String> = scope.iter().filter(|c| !x.contains(c) && !y.contains(c)).cloned().collect();
        let proj: HashSet<(Vec<String>, Vec<String>, Vec<String>)> = self
            .rows
            .iter()
            .map(|(r, _)| (self.key(r, x), self.key(r, y), self.key(r, &rest)))
            .collect();
        for (kx, ky, _) in &proj {
            for (kx2, _, kw) in &proj {
                if kx == kx2 && !proj.contains(&(kx.clone(), ky.clone(), kw.clone())) {
                    return false;
                }
            }
        }
        true
    }

    /// Distinct projected values.
    pub fn distinct(&self, cols: &[String]) -> BTreeSet<Vec<String>> {
        self.rows.iter().map(|(r, _)| self.key(r, cols)).collect()
    }
}

/// Disjoint (x, y, z) with x, y non-empty, each unordered {x, y} once.
pub fn triples(universe: &[String]) -> Vec<(Vec<String>, Vec<String>, Vec<String>)> {
    let n = universe.len();
    let pick = |m: u32| -> Vec<String> { (0..n).filter(|i| m >> i & 1 == 1).map(|i| universe[i].clone()).collect() };
    let mut out = Vec::new();
    let pow3 = 3u32.pow(n as u32);
    for code in 0..pow3 {
        // digit 0: unused, 1: x, 2: y; z is chosen from the unused ones
        let (mut x, mut y, mut c) = (0u32, 0u32, code);
        for i in 0..n {
            match c % 3 {
                1 => x |= 1 << i,
                2 => y |= 1 << i,
                _ => {}
            }
            c /= 3;
        }
        if x == 0 || y == 0 || x.trailing_zeros() > y.trailing_zeros() {
            continue;
        }
        let free = ((1u32 << n) - 1) & !(x | y);
        let mut z = free;
        loop {
            out.push((pick(x), pick(y), pick(z)));
            if z == 0 {
                break;
            }
            z = (z - 1) & free;
        }
    }
    out
}

/// Undirected graph over `0..n` as an adjacency matrix.
#[derive(Clone, Debug)]
pub struct Graph {
    pub names: Vec<String>,
    pub adj: Vec<Vec<bool>>,
}

impl Graph {
    pub fn new(names: &[String], edges: &[(String, String)]) -> Graph {
        let n = names.len();
        let mut adj = vec![vec![false; n]; n];
        let ix = |s: &str| names.iter().position(|x| x == s).unwrap();
        for (a, b) in edges {
            adj[ix(a)][ix(b)] = true;
            adj[ix(b)][ix(a)] = true;
        }
        Graph {
            names: names.to_vec(),
            adj,
        }
    }

    /// Every path from x to y passes through z (depth-first search on masks).
    pub fn separated_mask(&self, x: u32, y: u32, z: u32) -> bool {
        let n = self.names.len();
        let mut seen = x;
        let mut stack: Vec<usize> = (0..n).filter(|i| x >> i & 1 == 1).collect();
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if self.adj[v][w] && seen >> w & 1 == 0 && z >> w & 1 == 0 {
                    if y >> w & 1 == 1 {
                        return false;
                    }
                    seen |= 1 << w;
                    stack.push(w);
                }
            }
        }
        true
    }

    pub fn separated(&self, x: &[String], y: &[String], z: &[String]) -> bool {
        let m = |s: &[String]| s.iter().fold(0u32, |acc, a| acc | 1 << self.names.iter().position(|n| n == a).unwrap());
        self.separated_mask(m(x), m(y), m(z))
    }

    /// Checks symmetry, decomposition, intersection, strong union and
    /// transitivity of the separation relation by enumeration. Returns the
    /// first failing rule.
    pub fn isomorph_violation(&self) -> Option<&'static str> {
        let n = self.names.len();
        let full = (1u32 << n) - 1;
        let sep = |x: u32, y: u32, z: u32| self.separated_mask(x, y, z);
        let subsets = |m: u32| {
            let mut v = Vec::new();
            let mut s = m;
            loop {
                v.push(s);
                if s == 0 {
                    break;
                }
                s = (s - 1) & m;
            }
            v
        };
        for x in 1..=full {
            for y in subsets(full & !x) {
                if y == 0 {
                    continue;
                }
                for z in subsets(full & !x & !y) {
                    if !sep(x, y, z) {
                        continue;
                    }
                    if !sep(y, x, z) {
                        return Some("symmetry");
                    }
                    for part in subsets(y) {
                        if part != 0 && !sep(x, part, z) {
                            return Some("decomposition");
                        }
                    }
                    for w in subsets(full & !x & !y & !z) {
                        if !sep(x, y, z | w) {
                            return Some("strong union");
                        }
                    }
                    // intersection: sep(x, y, c∪w) and sep(x, w, c∪y) ⇒ sep(x, y∪w, c)
                    for w in subsets(z) {
                        let c = z & !w;
                        if w != 0 && sep(x, w, c | y) && !sep(x, y | w, c) {
                            return Some("intersection");
                        }
                    }
                    for g in 0..n {
                        let gm = 1u32 << g;
                        if (x | y | z) & gm == 0 && !sep(x, gm, z) && !sep(gm, y, z) {
                            return Some("transitivity");
                        }
                    }
                }
            }
        }
        None
    }
}

pub fn strs(list: &str) -> Vec<String> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_owned).collect()
}
