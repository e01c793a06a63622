use std::collections::{btree_map, BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::relcore::{Attr, AttrSet};

/// Context name for statements about a joined relation.
pub const JOIN_CONTEXT: &str = "JOIN";

/// `X ⊥ Y | Z` scoped to one relation (or to the join).
///
/// Stored canonically: the two independent sides are ordered so that
/// `x <= y` lexicographically on sorted attribute names, which makes the
/// symmetric forms of a statement compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CiStatement {
    x: AttrSet,
    y: AttrSet,
    z: AttrSet,
    context: String,
}

impl CiStatement {
    pub fn new(x: AttrSet, y: AttrSet, z: AttrSet, context: impl Into<String>) -> Result<Self> {
        if x.is_empty() || y.is_empty() {
            return Err(Error::Argument("both independent sides must be non-empty".into()));
        }
        if !x.is_disjoint(&y) || !x.is_disjoint(&z) || !y.is_disjoint(&z) {
            return Err(Error::Argument(format!(
                "CI sets must be disjoint, got X={{{x}}} Y={{{y}}} Z={{{z}}}"
            )));
        }
        let (x, y) = if y < x { (y, x) } else { (x, y) };
        Ok(CiStatement {
            x,
            y,
            z,
            context: context.into(),
        })
    }

    /// Shorthand for tests and examples: `CiStatement::of("A", "B", "C,D", "R")`.
    pub fn of(x: &str, y: &str, z: &str, context: &str) -> Self {
        CiStatement::new(
            AttrSet::parse_list(x),
            AttrSet::parse_list(y),
            AttrSet::parse_list(z),
            context,
        )
        .expect("well-formed CI literal")
    }

    pub fn x(&self) -> &AttrSet {
        &self.x
    }

    pub fn y(&self) -> &AttrSet {
        &self.y
    }

    pub fn z(&self) -> &AttrSet {
        &self.z
    }

    pub fn context(&self) -> &str {
        &self.context
    }

    pub fn attrs(&self) -> AttrSet {
        self.x.union(&self.y).union(&self.z)
    }

    pub fn in_context(&self, context: impl Into<String>) -> Self {
        CiStatement {
            context: context.into(),
            ..self.clone()
        }
    }

    /// Both orientations `(left, right)` of the independent sides.
    pub fn orientations(&self) -> [(&AttrSet, &AttrSet); 2] {
        [(&self.x, &self.y), (&self.y, &self.x)]
    }
}

impl fmt::Display for CiStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} _|_ {} ", self.x, self.y)?;
        if self.z.is_empty() {
            f.write_str("|-")?;
        } else {
            write!(f, "| {}", self.z)?;
        }
        write!(f, " @ {}", self.context)
    }
}

impl FromStr for CiStatement {
    type Err = Error;

    /// Parses `X1,X2 _|_ Y1 | Z1,Z2 @ Rel`; an empty `Z` is written `|-`.
    fn from_str(line: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("`{line}`: {why}"));
        let (body, context) = line.rsplit_once('@').ok_or_else(|| bad("missing `@ context`"))?;
        let context = context.trim();
        if context.is_empty() {
            return Err(bad("empty context"));
        }
        let (x, rest) = body.split_once("_|_").ok_or_else(|| bad("missing `_|_`"))?;
        let (y, z) = rest.split_once('|').ok_or_else(|| bad("missing `|` before the conditioning set"))?;
        let z = z.trim();
        let z = if z == "-" { "" } else { z };
        let parse_side = |s: &str| -> Result<AttrSet> {
            let names: Vec<&str> = s.split(',').map(str::trim).filter(|n| !n.is_empty()).collect();
            let set: AttrSet = names.iter().map(|n| Attr::from(*n)).collect();
            if set.len() != names.len() {
                return Err(bad("repeated attribute"));
            }
            Ok(set)
        };
        CiStatement::new(parse_side(x)?, parse_side(y)?, parse_side(z)?, context)
            .map_err(|e| bad(&e.to_string()))
    }
}

/// Parses one statement per line; blank lines and `#` comments are skipped.
pub fn parse_statements(text: &str) -> Result<Vec<CiStatement>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::parse)
        .collect()
}

/// A deduplicated set of CI statements over a declared attribute universe.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CiSet {
    universe: AttrSet,
    statements: BTreeSet<CiStatement>,
}

impl CiSet {
    pub fn new(universe: AttrSet) -> Self {
        CiSet {
            universe,
            statements: BTreeSet::new(),
        }
    }

    pub fn from_statements(universe: AttrSet, statements: impl IntoIterator<Item = CiStatement>) -> Result<Self> {
        let mut set = CiSet::new(universe);
        for s in statements {
            set.insert(s)?;
        }
        Ok(set)
    }

    pub fn universe(&self) -> &AttrSet {
        &self.universe
    }

    /// Adds a statement; its attributes must lie inside the universe.
    pub fn insert(&mut self, s: CiStatement) -> Result<bool> {
        if !s.attrs().is_subset(&self.universe) {
            return Err(Error::Argument(format!(
                "statement `{s}` mentions attributes outside the universe {{{}}}",
                self.universe
            )));
        }
        Ok(self.statements.insert(s))
    }

    pub fn contains(&self, s: &CiStatement) -> bool {
        self.statements.contains(s)
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &CiStatement> {
        self.statements.iter()
    }

    pub fn is_subset(&self, other: &CiSet) -> bool {
        self.statements.is_subset(&other.statements)
    }

    pub fn contexts(&self) -> BTreeSet<&str> {
        self.statements.iter().map(|s| s.context()).collect()
    }

    /// Statements grouped by context.
    pub fn by_context(&self) -> BTreeMap<String, Vec<CiStatement>> {
        let mut out: BTreeMap<String, Vec<CiStatement>> = BTreeMap::new();
        for s in &self.statements {
            match out.entry(s.context.clone()) {
                btree_map::Entry::Occupied(mut e) => e.get_mut().push(s.clone()),
                btree_map::Entry::Vacant(e) => {
                    e.insert(vec![s.clone()]);
                }
            }
        }
        out
    }

    /// Merges another set (universes are united).
    pub fn extend(&mut self, other: &CiSet) {
        self.universe = self.universe.union(&other.universe);
        self.statements.extend(other.statements.iter().cloned());
    }
}

impl<'a> IntoIterator for &'a CiSet {
    type Item = &'a CiStatement;
    type IntoIter = std::collections::btree_set::Iter<'a, CiStatement>;

    fn into_iter(self) -> Self::IntoIter {
        self.statements.iter()
    }
}
