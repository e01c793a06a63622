use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use super::{Assignment, Attr, AttrSet};
use crate::error::{Error, Result};

/// Cell values are opaque strings.
pub type Value = Arc<str>;

/// Name and schema of a base relation that contributed to a (joined) relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseSchema {
    pub name: String,
    pub schema: AttrSet,
}

/// A bag of tuples over a fixed list of attributes.
///
/// Rows are stored with a multiplicity so that large bags (for example the
/// output of a join) stay compact. Two stored rows may hold equal values;
/// the bag is the sum of all stored multiplicities either way.
#[derive(Clone, Debug)]
pub struct Relation {
    name: String,
    columns: Vec<Attr>,
    rows: Vec<(Vec<Value>, u64)>,
    provenance: Vec<BaseSchema>,
}

impl Relation {
    /// Creates an empty relation. Attribute names must be non-empty and unique.
    pub fn new<A: Into<Attr>>(name: impl Into<String>, columns: impl IntoIterator<Item = A>) -> Result<Self> {
        let name = name.into();
        let columns: Vec<Attr> = columns.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for c in &columns {
            if c.as_str().is_empty() {
                return Err(Error::Schema(format!("relation `{name}` has an empty attribute name")));
            }
            if !seen.insert(c) {
                return Err(Error::Schema(format!("relation `{name}` repeats attribute `{c}`")));
            }
        }
        let schema = columns.iter().collect();
        Ok(Relation {
            provenance: vec![BaseSchema { name: name.clone(), schema }],
            name,
            columns,
            rows: Vec::new(),
        })
    }

    /// Convenience constructor from string literals, one slice per tuple.
    pub fn from_rows(name: &str, columns: &[&str], rows: &[&[&str]]) -> Result<Self> {
        let mut r = Relation::new(name, columns.iter().copied())?;
        for row in rows {
            r.push(row.iter().map(|v| Value::from(*v)).collect())?;
        }
        Ok(r)
    }

    pub fn push(&mut self, values: Vec<Value>) -> Result<()> {
        self.push_weighted(values, 1)
    }

    /// Adds `multiplicity` copies of a tuple.
    pub fn push_weighted(&mut self, values: Vec<Value>, multiplicity: u64) -> Result<()> {
        if values.len() != self.columns.len() {
            return Err(Error::Schema(format!(
                "tuple of arity {} does not match the {} attributes of `{}`",
                values.len(),
                self.columns.len(),
                self.name
            )));
        }
        if multiplicity > 0 {
            self.rows.push((values, multiplicity));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        let name = name.into();
        if self.provenance.len() == 1 {
            self.provenance[0].name = name.clone();
        }
        self.name = name;
        self
    }

    pub fn columns(&self) -> &[Attr] {
        &self.columns
    }

    pub fn schema(&self) -> AttrSet {
        self.columns.iter().collect()
    }

    /// Base relations this relation was built from (itself, for a base relation).
    pub fn provenance(&self) -> &[BaseSchema] {
        &self.provenance
    }

    pub fn position(&self, attr: &Attr) -> Option<usize> {
        self.columns.iter().position(|c| c == attr)
    }

    pub(crate) fn positions(&self, attrs: &AttrSet) -> Result<Vec<usize>> {
        attrs
            .iter()
            .map(|a| {
                self.position(a).ok_or_else(|| Error::UnknownAttribute {
                    attr: a.clone(),
                    relation: self.name.clone(),
                })
            })
            .collect()
    }

    /// Number of tuples, counting duplicates (N_R).
    pub fn len(&self) -> u64 {
        self.rows.iter().map(|(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Stored tuples with their multiplicities.
    pub fn tuples(&self) -> impl Iterator<Item = (&[Value], u64)> {
        self.rows.iter().map(|(v, m)| (v.as_slice(), *m))
    }

    /// Every tuple of the bag, duplicates repeated.
    pub fn expanded_rows(&self) -> impl Iterator<Item = &[Value]> {
        self.rows
            .iter()
            .flat_map(|(v, m)| std::iter::repeat_n(v.as_slice(), *m as usize))
    }

    /// Value of `attr` in a stored tuple.
    pub fn value<'a>(&self, tuple: &'a [Value], attr: &Attr) -> Option<&'a Value> {
        self.position(attr).map(|p| &tuple[p])
    }

    /// Set-semantics projection: the distinct value combinations of `attrs`.
    pub fn distinct_values(&self, attrs: &AttrSet) -> Result<BTreeSet<Vec<Value>>> {
        let pos = self.positions(attrs)?;
        Ok(self
            .rows
            .iter()
            .map(|(v, _)| pos.iter().map(|&p| v[p].clone()).collect())
            .collect())
    }

    /// Bag counts per value combination of `attrs`.
    pub fn value_counts(&self, attrs: &AttrSet) -> Result<HashMap<Vec<Value>, u64>> {
        let pos = self.positions(attrs)?;
        let mut out: HashMap<Vec<Value>, u64> = HashMap::new();
        for (v, m) in &self.rows {
            *out.entry(pos.iter().map(|&p| v[p].clone()).collect()).or_default() += m;
        }
        Ok(out)
    }

    /// Merges stored rows with equal values into one entry.
    pub fn consolidated(&self) -> Relation {
        let mut index: HashMap<&[Value], usize> = HashMap::new();
        let mut rows: Vec<(Vec<Value>, u64)> = Vec::new();
        for (v, m) in &self.rows {
            match index.get(v.as_slice()) {
                Some(&i) => rows[i].1 += m,
                None => {
                    index.insert(v.as_slice(), rows.len());
                    rows.push((v.clone(), *m));
                }
            }
        }
        Relation {
            name: self.name.clone(),
            columns: self.columns.clone(),
            rows,
            provenance: self.provenance.clone(),
        }
    }

    /// Tuples (with multiplicity) matching every binding of `a`.
    pub fn matching(&self, a: &Assignment) -> Result<Vec<(&[Value], u64)>> {
        let binds: Vec<(usize, &Value)> = a
            .iter()
            .map(|(attr, v)| {
                self.position(attr).map(|p| (p, v)).ok_or_else(|| Error::UnknownAttribute {
                    attr: attr.clone(),
                    relation: self.name.clone(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(self
            .tuples()
            .filter(|(t, _)| binds.iter().all(|(p, v)| &t[*p] == *v))
            .collect())
    }

    /// Keeps only tuples matching `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&[Value]) -> bool) -> Relation {
        Relation {
            name: self.name.clone(),
            columns: self.columns.clone(),
            rows: self.rows.iter().filter(|(v, _)| keep(v)).cloned().collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn natural_join(&self, other: &Relation) -> Relation {
        natural_join(self, other)
    }

    pub fn project(&self, attrs: &AttrSet) -> Result<Relation> {
        project(self, attrs)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.columns.iter().map(Attr::as_str).collect();
        writeln!(f, "{} ({})", self.name, names.join(", "))?;
        for row in self.expanded_rows() {
            let vals: Vec<&str> = row.iter().map(|v| v.as_ref()).collect();
            writeln!(f, "  {}", vals.join(", "))?;
        }
        Ok(())
    }
}

/// Natural join under bag semantics.
///
/// Output columns are the columns of `r` followed by the columns of `s` not
/// shared with `r`. Multiplicities multiply. With no shared attributes this
/// is the cross product.
pub fn natural_join(r: &Relation, s: &Relation) -> Relation {
    let shared: Vec<(usize, usize)> = r
        .columns
        .iter()
        .enumerate()
        .filter_map(|(i, a)| s.position(a).map(|j| (i, j)))
        .collect();
    let s_extra: Vec<usize> = (0..s.columns.len())
        .filter(|j| !shared.iter().any(|(_, sj)| sj == j))
        .collect();

    let mut columns = r.columns.clone();
    columns.extend(s_extra.iter().map(|&j| s.columns[j].clone()));

    let mut index: HashMap<Vec<&Value>, Vec<usize>> = HashMap::new();
    for (k, (v, _)) in s.rows.iter().enumerate() {
        let key: Vec<&Value> = shared.iter().map(|&(_, j)| &v[j]).collect();
        index.entry(key).or_default().push(k);
    }

    let mut rows = Vec::new();
    for (rv, rm) in &r.rows {
        let key: Vec<&Value> = shared.iter().map(|&(i, _)| &rv[i]).collect();
        if let Some(matches) = index.get(&key) {
            for &k in matches {
                let (sv, sm) = &s.rows[k];
                let mut out = rv.clone();
                out.extend(s_extra.iter().map(|&j| sv[j].clone()));
                rows.push((out, rm * sm));
            }
        }
    }

    let mut provenance = r.provenance.clone();
    for b in &s.provenance {
        if !provenance.iter().any(|p| p.name == b.name) {
            provenance.push(b.clone());
        }
    }
    Relation {
        name: format!("{}⋈{}", r.name, s.name),
        columns,
        rows,
        provenance,
    }
}

/// Duplicate-preserving projection onto `attrs` (columns in `attrs` order).
pub fn project(r: &Relation, attrs: &AttrSet) -> Result<Relation> {
    let pos = r.positions(attrs)?;
    let rows = r
        .rows
        .iter()
        .map(|(v, m)| (pos.iter().map(|&p| v[p].clone()).collect(), *m))
        .collect();
    Ok(Relation {
        name: r.name.clone(),
        columns: attrs.iter().cloned().collect(),
        rows,
        provenance: r.provenance.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r() -> Relation {
        Relation::from_rows("R", &["A", "B"], &[&["a1", "b1"], &["a1", "b2"], &["a1", "b1"]]).unwrap()
    }

    #[test]
    fn rejects_bad_schemas() {
        assert!(Relation::new("R", ["A", "A"]).is_err());
        assert!(Relation::new("R", [""]).is_err());
        let mut rel = Relation::new("R", ["A"]).unwrap();
        assert!(rel.push(vec![Value::from("x"), Value::from("y")]).is_err());
    }

    #[test]
    fn duplicates_are_bag_elements() {
        assert_eq!(r().len(), 3);
        assert_eq!(r().consolidated().tuples().count(), 2);
        assert_eq!(r().consolidated().len(), 3);
    }

    #[test]
    fn join_with_empty_partner_is_empty() {
        let s = Relation::new("S", ["B", "C"]).unwrap();
        let j = natural_join(&r(), &s);
        assert_eq!(j.len(), 0);
        assert_eq!(j.schema(), AttrSet::of(&["A", "B", "C"]));
    }

    #[test]
    fn disjoint_join_is_cross_product() {
        let s = Relation::from_rows("S", &["C"], &[&["c1"], &["c2"]]).unwrap();
        assert_eq!(natural_join(&r(), &s).len(), 6);
    }

    #[test]
    fn identical_schemas_intersect_as_bags() {
        let s = Relation::from_rows("S", &["B", "A"], &[&["b1", "a1"], &["b1", "a1"], &["b9", "a1"]]).unwrap();
        let j = natural_join(&r(), &s);
        // two copies of (a1,b1) in R times two in S
        assert_eq!(j.len(), 4);
        assert_eq!(j.columns().len(), 2);
    }

    #[test]
    fn projection_keeps_row_count() {
        let p = project(&r(), &AttrSet::single("A")).unwrap();
        assert_eq!(p.len(), 3);
        assert!(project(&r(), &AttrSet::single("Z")).is_err());
        let same = project(&r(), &r().schema()).unwrap();
        assert_eq!(same.len(), 3);
        assert_eq!(same.schema(), r().schema());
    }

    #[test]
    fn join_provenance_lists_both_bases() {
        let s = Relation::from_rows("S", &["B", "C"], &[&["b1", "c"]]).unwrap();
        let j = natural_join(&r(), &s);
        let names: Vec<&str> = j.provenance().iter().map(|b| b.name.as_str()).collect();
        assert_eq!(names, ["R", "S"]);
    }
}
