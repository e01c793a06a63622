use super::{CiSet, CiStatement};
use crate::error::{Error, Result};
use crate::relcore::{Attr, AttrSet, CiTester, Relation};

/// A disjoint triple `(x, y, z)` of attribute sets with non-empty `x`, `y`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub x: AttrSet,
    pub y: AttrSet,
    pub z: AttrSet,
}

impl Triple {
    pub fn into_statement(self, context: &str) -> CiStatement {
        CiStatement::new(self.x, self.y, self.z, context).expect("enumerated triples are disjoint")
    }
}

/// Calls `f(x, y, z)` with bitmasks over `n` items for every disjoint triple,
/// each unordered `{x, y}` pair once. `max_set_size` caps `|x|`, `|y|`, `|z|`.
pub(crate) fn for_each_mask_triple(n: usize, max_set_size: Option<usize>, mut f: impl FnMut(u64, u64, u64)) {
    assert!(n <= 30, "triple enumeration over more than 30 items");
    let cap = max_set_size.unwrap_or(n) as u32;
    let full: u64 = (1u64 << n) - 1;
    // z ranges over all subsets; x∪y over non-empty subsets of the rest.
    let mut z: u64 = 0;
    loop {
        if z.count_ones() <= cap {
            let rest = full & !z;
            let mut xy = rest;
            while xy != 0 {
                if xy.count_ones() >= 2 {
                    let low = xy & xy.wrapping_neg();
                    // x always holds the lowest item of x∪y
                    let others = xy & !low;
                    let mut sub = others;
                    loop {
                        let x = low | sub;
                        let y = xy & !x;
                        if y != 0 && x.count_ones() <= cap && y.count_ones() <= cap {
                            f(x, y, z);
                        }
                        if sub == 0 {
                            break;
                        }
                        sub = (sub - 1) & others;
                    }
                }
                xy = (xy - 1) & rest;
            }
        }
        if z == full {
            break;
        }
        z = ((z | !full) + 1) & full;
    }
}

pub(crate) fn mask_to_set(items: &[Attr], mask: u64) -> AttrSet {
    items
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, a)| a.clone())
        .collect()
}

/// All disjoint triples over `universe`, symmetric pairs listed once.
pub fn enumerate_triples(universe: &AttrSet, max_set_size: Option<usize>) -> Vec<Triple> {
    let items: Vec<Attr> = universe.iter().cloned().collect();
    let mut out = Vec::new();
    for_each_mask_triple(items.len(), max_set_size, |x, y, z| {
        out.push(Triple {
            x: mask_to_set(&items, x),
            y: mask_to_set(&items, y),
            z: mask_to_set(&items, z),
        })
    });
    out
}

/// Every CI that holds exactly in `r`, scoped to `r`'s name.
pub fn empirical_ci_set(r: &Relation, max_universe: usize) -> Result<CiSet> {
    let n = r.columns().len();
    if n > max_universe {
        return Err(Error::ResourceLimit {
            what: "relation attribute count",
            actual: n,
            bound: max_universe,
        });
    }
    let tester = CiTester::new(r);
    let items: Vec<Attr> = r.columns().to_vec();
    let positions = |m: u64| -> Vec<usize> { (0..n).filter(|i| m >> i & 1 == 1).collect() };
    let mut set = CiSet::new(r.schema());
    let mut found = Vec::new();
    for_each_mask_triple(n, None, |x, y, z| {
        if tester.holds_positions(&positions(x), &positions(y), &positions(z)) {
            found.push((x, y, z));
        }
    });
    for (x, y, z) in found {
        let s = CiStatement::new(mask_to_set(&items, x), mask_to_set(&items, y), mask_to_set(&items, z), r.name())?;
        set.insert(s)?;
    }
    Ok(set)
}
