use std::collections::HashMap;

use super::{AttrSet, Relation};
use crate::error::{Error, Result};

/// Above this many cells the tester switches from dense count arrays to maps.
const DENSE_LIMIT: usize = 1 << 22;

/// Reusable exact CI tester over one relation.
///
/// Values are dictionary-encoded once; each query then groups tuple counts
/// by the queried attribute sets and checks the integer identity
/// `N_xyz * N_z = N_xz * N_yz` for every `z` with `N_z > 0` and every `x`, `y`
/// that occur with that `z`.
#[derive(Clone, Debug)]
pub struct CiTester {
    schema: AttrSet,
    relation: String,
    columns: Vec<crate::relcore::Attr>,
    codes: Vec<Vec<u32>>,
    weights: Vec<u64>,
}

impl CiTester {
    pub fn new(r: &Relation) -> Self {
        let ncols = r.columns().len();
        let mut dicts: Vec<HashMap<&str, u32>> = vec![HashMap::new(); ncols];
        let mut merged: HashMap<Vec<u32>, u64> = HashMap::new();
        for (t, m) in r.tuples() {
            let code: Vec<u32> = t
                .iter()
                .enumerate()
                .map(|(c, v)| {
                    let d = &mut dicts[c];
                    let next = d.len() as u32;
                    *d.entry(v.as_ref()).or_insert(next)
                })
                .collect();
            *merged.entry(code).or_default() += m;
        }
        let mut entries: Vec<(Vec<u32>, u64)> = merged.into_iter().collect();
        entries.sort();
        let (codes, weights) = entries.into_iter().unzip();
        CiTester {
            schema: r.schema(),
            relation: r.name().to_owned(),
            columns: r.columns().to_vec(),
            codes,
            weights,
        }
    }

    pub fn schema(&self) -> &AttrSet {
        &self.schema
    }

    fn positions(&self, s: &AttrSet) -> Result<Vec<usize>> {
        s.iter()
            .map(|a| {
                self.columns.iter().position(|c| c == a).ok_or_else(|| Error::UnknownAttribute {
                    attr: a.clone(),
                    relation: self.relation.clone(),
                })
            })
            .collect()
    }

    /// Tests `x ⊥ y | z`. Sets must be disjoint and inside the schema;
    /// `x` and `y` must be non-empty. An empty `z` tests marginal independence.
    pub fn holds(&self, x: &AttrSet, y: &AttrSet, z: &AttrSet) -> Result<bool> {
        if x.is_empty() || y.is_empty() {
            return Err(Error::Argument("both sides of a CI must be non-empty".into()));
        }
        if !x.is_disjoint(y) || !x.is_disjoint(z) || !y.is_disjoint(z) {
            return Err(Error::Argument(format!(
                "CI sets overlap: X={{{x}}}, Y={{{y}}}, Z={{{z}}}"
            )));
        }
        let (xp, yp, zp) = (self.positions(x)?, self.positions(y)?, self.positions(z)?);
        Ok(self.holds_positions(&xp, &yp, &zp))
    }

    /// Same as [`holds`](Self::holds) on column indices, without validation.
    pub fn holds_positions(&self, x: &[usize], y: &[usize], z: &[usize]) -> bool {
        if self.codes.is_empty() {
            return true;
        }
        let (xi, nx) = self.group_ids(x);
        let (yi, ny) = self.group_ids(y);
        let (zi, nz) = self.group_ids(z);
        let cells = nx.checked_mul(ny).and_then(|v| v.checked_mul(nz));
        match cells {
            Some(c) if c <= DENSE_LIMIT => self.dense_check(&xi, nx, &yi, ny, &zi, nz),
            _ => self.sparse_check(&xi, &yi, &zi),
        }
    }

    /// Assigns every stored tuple a compact id for its projection onto `cols`.
    fn group_ids(&self, cols: &[usize]) -> (Vec<usize>, usize) {
        if cols.is_empty() {
            return (vec![0; self.codes.len()], 1);
        }
        if cols.len() == 1 {
            let c = cols[0];
            let mut remap: HashMap<u32, usize> = HashMap::new();
            let ids = self
                .codes
                .iter()
                .map(|row| {
                    let next = remap.len();
                    *remap.entry(row[c]).or_insert(next)
                })
                .collect();
            return (ids, remap.len());
        }
        let mut remap: HashMap<Vec<u32>, usize> = HashMap::new();
        let ids = self
            .codes
            .iter()
            .map(|row| {
                let key: Vec<u32> = cols.iter().map(|&c| row[c]).collect();
                let next = remap.len();
                *remap.entry(key).or_insert(next)
            })
            .collect();
        (ids, remap.len())
    }

    fn dense_check(&self, xi: &[usize], nx: usize, yi: &[usize], ny: usize, zi: &[usize], nz: usize) -> bool {
        let mut n_xyz = vec![0u128; nx * ny * nz];
        let mut n_xz = vec![0u128; nx * nz];
        let mut n_yz = vec![0u128; ny * nz];
        let mut n_z = vec![0u128; nz];
        for k in 0..self.codes.len() {
            let w = self.weights[k] as u128;
            let (x, y, z) = (xi[k], yi[k], zi[k]);
            n_xyz[(z * nx + x) * ny + y] += w;
            n_xz[z * nx + x] += w;
            n_yz[z * ny + y] += w;
            n_z[z] += w;
        }
        for z in 0..nz {
            let nzv = n_z[z];
            if nzv == 0 {
                continue;
            }
            for x in 0..nx {
                let a = n_xz[z * nx + x];
                if a == 0 {
                    continue;
                }
                for y in 0..ny {
                    let b = n_yz[z * ny + y];
                    if b == 0 {
                        continue;
                    }
                    if n_xyz[(z * nx + x) * ny + y] * nzv != a * b {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn sparse_check(&self, xi: &[usize], yi: &[usize], zi: &[usize]) -> bool {
        let mut n_xyz: HashMap<(usize, usize, usize), u128> = HashMap::new();
        let mut n_xz: HashMap<(usize, usize), u128> = HashMap::new();
        let mut n_yz: HashMap<(usize, usize), u128> = HashMap::new();
        let mut n_z: HashMap<usize, u128> = HashMap::new();
        for k in 0..self.codes.len() {
            let w = self.weights[k] as u128;
            let (x, y, z) = (xi[k], yi[k], zi[k]);
            *n_xyz.entry((x, y, z)).or_default() += w;
            *n_xz.entry((x, z)).or_default() += w;
            *n_yz.entry((y, z)).or_default() += w;
            *n_z.entry(z).or_default() += w;
        }
        // Every present (x,y,z) must satisfy the identity, and every x and y
        // seen with z must also be seen together (else 0 != N_xz * N_yz).
        let mut pairs: HashMap<usize, usize> = HashMap::new();
        for (&(x, y, z), &c) in &n_xyz {
            if c * n_z[&z] != n_xz[&(x, z)] * n_yz[&(y, z)] {
                return false;
            }
            *pairs.entry(z).or_default() += 1;
        }
        let mut xs: HashMap<usize, usize> = HashMap::new();
        for &(_, z) in n_xz.keys() {
            *xs.entry(z).or_default() += 1;
        }
        let mut ys: HashMap<usize, usize> = HashMap::new();
        for &(_, z) in n_yz.keys() {
            *ys.entry(z).or_default() += 1;
        }
        n_z.keys().all(|z| pairs.get(z).copied().unwrap_or(0) == xs[z] * ys[z])
    }

    /// True if every combination of observed per-attribute values occurs.
    pub fn is_strictly_positive(&self) -> bool {
        let ncols = self.columns.len();
        let mut cells: u128 = 1;
        for c in 0..ncols {
            let mut vals: Vec<u32> = self.codes.iter().map(|r| r[c]).collect();
            vals.sort_unstable();
            vals.dedup();
            cells = cells.saturating_mul(vals.len() as u128);
        }
        cells == self.codes.len() as u128
    }
}
