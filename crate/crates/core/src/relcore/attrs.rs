use std::collections::{btree_set, BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Value;

/// A named attribute. Equality is case-sensitive string equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Attr(String);

impl Attr {
    pub fn new(name: impl Into<String>) -> Self {
        Attr(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Attr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Attr {
    fn from(s: &str) -> Self {
        Attr(s.to_owned())
    }
}

impl From<String> for Attr {
    fn from(s: String) -> Self {
        Attr(s)
    }
}

impl From<&Attr> for Attr {
    fn from(a: &Attr) -> Self {
        a.clone()
    }
}

/// A set of attributes, ordered by name.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttrSet(BTreeSet<Attr>);

impl AttrSet {
    pub fn new() -> Self {
        AttrSet(BTreeSet::new())
    }

    /// Builds a set from attribute names.
    pub fn of<A: Into<Attr> + Clone>(names: &[A]) -> Self {
        names.iter().cloned().map(Into::into).collect()
    }

    /// Parses a comma-separated list; blank input is the empty set.
    pub fn parse_list(text: &str) -> Self {
        text.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(Attr::from)
            .collect()
    }

    pub fn single(a: impl Into<Attr>) -> Self {
        let mut s = AttrSet::new();
        s.insert(a.into());
        s
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, a: &Attr) -> bool {
        self.0.contains(a)
    }

    pub fn insert(&mut self, a: Attr) -> bool {
        self.0.insert(a)
    }

    pub fn remove(&mut self, a: &Attr) -> bool {
        self.0.remove(a)
    }

    pub fn iter(&self) -> btree_set::Iter<'_, Attr> {
        self.0.iter()
    }

    pub fn union(&self, other: &AttrSet) -> AttrSet {
        AttrSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &AttrSet) -> AttrSet {
        AttrSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &AttrSet) -> AttrSet {
        AttrSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &AttrSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &AttrSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn with(&self, a: impl Into<Attr>) -> AttrSet {
        let mut s = self.clone();
        s.insert(a.into());
        s
    }

    pub fn names(&self) -> Vec<String> {
        self.0.iter().map(|a| a.0.clone()).collect()
    }
}

impl fmt::Display for AttrSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for a in &self.0 {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            f.write_str(a.as_str())?;
        }
        Ok(())
    }
}

impl FromIterator<Attr> for AttrSet {
    fn from_iter<I: IntoIterator<Item = Attr>>(iter: I) -> Self {
        AttrSet(iter.into_iter().collect())
    }
}

impl<'a> FromIterator<&'a Attr> for AttrSet {
    fn from_iter<I: IntoIterator<Item = &'a Attr>>(iter: I) -> Self {
        AttrSet(iter.into_iter().cloned().collect())
    }
}

impl IntoIterator for AttrSet {
    type Item = Attr;
    type IntoIter = btree_set::IntoIter<Attr>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a AttrSet {
    type Item = &'a Attr;
    type IntoIter = btree_set::Iter<'a, Attr>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A partial binding of attributes to values, e.g. `{A=a1, C=c}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(BTreeMap<Attr, Value>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn with(mut self, attr: impl Into<Attr>, value: &str) -> Self {
        self.0.insert(attr.into(), Value::from(value));
        self
    }

    pub fn bind(&mut self, attr: Attr, value: Value) -> Option<Value> {
        self.0.insert(attr, value)
    }

    pub fn get(&self, attr: &Attr) -> Option<&Value> {
        self.0.get(attr)
    }

    pub fn attrs(&self) -> AttrSet {
        self.0.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Attr, &Value)> {
        self.0.iter()
    }

    /// The bindings of `attrs` only; attributes not bound here are skipped.
    pub fn restrict(&self, attrs: &AttrSet) -> Assignment {
        Assignment(self.0.iter().filter(|(a, _)| attrs.contains(a)).map(|(a, v)| (a.clone(), v.clone())).collect())
    }

    /// Union of two assignments; `None` if they bind an attribute differently.
    pub fn merge(&self, other: &Assignment) -> Option<Assignment> {
        let mut out = self.clone();
        for (a, v) in &other.0 {
            match out.0.get(a) {
                Some(existing) if existing != v => return None,
                _ => {
                    out.0.insert(a.clone(), v.clone());
                }
            }
        }
        Some(out)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}={v}")?;
        }
        f.write_str("}")
    }
}

impl FromIterator<(Attr, Value)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (Attr, Value)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}
