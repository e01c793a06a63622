use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaxioms::{CiSet, CiStatement, JOIN_CONTEXT};
use crate::relcore::{validate_foreign_key, AttrSet, Relation};

/// What is known about the join attributes of a two-relation join.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KeyClass {
    #[default]
    General,
    /// The join attributes of the left relation reference a key of the right.
    ForeignKeyLeftToRight,
    /// The join attributes of the right relation reference a key of the left.
    ForeignKeyRightToLeft,
    /// The join attributes are a key on both sides with equal value sets.
    OneOne,
}

/// A two-relation natural join and its key structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JoinSpec {
    pub left: String,
    pub right: String,
    pub left_schema: AttrSet,
    pub right_schema: AttrSet,
    pub join_attrs: AttrSet,
    pub key_class: KeyClass,
}

impl JoinSpec {
    pub fn new(
        left: impl Into<String>,
        left_schema: AttrSet,
        right: impl Into<String>,
        right_schema: AttrSet,
        key_class: KeyClass,
    ) -> Result<Self> {
        let (left, right) = (left.into(), right.into());
        if left == right {
            return Err(Error::Argument(format!("self-join of `{left}` is not supported")));
        }
        let join_attrs = left_schema.intersection(&right_schema);
        if key_class != KeyClass::General && join_attrs.is_empty() {
            return Err(Error::Argument(format!(
                "`{left}` and `{right}` share no attributes, so no key relationship can hold"
            )));
        }
        Ok(JoinSpec {
            left,
            right,
            left_schema,
            right_schema,
            join_attrs,
            key_class,
        })
    }

    /// Convenience constructor from two relations.
    pub fn between(left: &Relation, right: &Relation, key_class: KeyClass) -> Result<Self> {
        JoinSpec::new(left.name(), left.schema(), right.name(), right.schema(), key_class)
    }

    pub fn joined_schema(&self) -> AttrSet {
        self.left_schema.union(&self.right_schema)
    }

    /// Joins on exactly one attribute are the setting of the P-map results.
    pub fn is_single_attribute(&self) -> bool {
        self.join_attrs.len() == 1
    }

    fn schema_of(&self, context: &str) -> Option<&AttrSet> {
        if context == self.left {
            Some(&self.left_schema)
        } else if context == self.right {
            Some(&self.right_schema)
        } else {
            None
        }
    }
}

/// Why a base-relation CI carries over to the join.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PropagationRule {
    /// The join attributes are inside the conditioning set.
    #[serde(rename = "rhs-rule")]
    Rhs,
    /// The join attributes are inside one of the independent sides.
    #[serde(rename = "lhs-rule")]
    Lhs,
    /// The statement comes from the referencing side of a foreign-key join.
    #[serde(rename = "fk-rule")]
    ForeignKey,
    /// The join is one-one.
    #[serde(rename = "one-one-rule")]
    OneOne,
}

impl PropagationRule {
    pub fn tag(self) -> &'static str {
        match self {
            PropagationRule::Rhs => "rhs-rule",
            PropagationRule::Lhs => "lhs-rule",
            PropagationRule::ForeignKey => "fk-rule",
            PropagationRule::OneOne => "one-one-rule",
        }
    }
}

impl fmt::Display for PropagationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Result of [`propagate_ci`]. `licensed == false` means no rule applies,
/// not that the statement fails in the join.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Propagation {
    pub licensed: bool,
    pub rules: Vec<PropagationRule>,
}

/// The CI every natural join satisfies: the attributes private to each side
/// are independent given the shared ones. Nothing is returned when either
/// side has no private attributes.
pub fn base_join_cis(spec: &JoinSpec) -> CiSet {
    let mut out = CiSet::new(spec.joined_schema());
    let r_only = spec.left_schema.difference(&spec.right_schema);
    let s_only = spec.right_schema.difference(&spec.left_schema);
    if let Ok(s) = CiStatement::new(r_only, s_only, spec.join_attrs.clone(), JOIN_CONTEXT) {
        out.insert(s).expect("inside the joined schema");
    }
    out
}

/// Which rules license carrying `ci` (a statement about `spec.left` or
/// `spec.right`) over to the join.
pub fn propagate_ci(ci: &CiStatement, spec: &JoinSpec) -> Result<Propagation> {
    let schema = spec.schema_of(ci.context()).ok_or_else(|| {
        Error::Argument(format!(
            "statement `{ci}` is not about `{}` or `{}`",
            spec.left, spec.right
        ))
    })?;
    if let Some(a) = ci.attrs().iter().find(|a| !schema.contains(a)) {
        return Err(Error::UnknownAttribute {
            attr: a.clone(),
            relation: ci.context().to_owned(),
        });
    }
    let j = &spec.join_attrs;
    let mut rules = BTreeSet::new();
    if j.is_subset(ci.z()) {
        rules.insert(PropagationRule::Rhs);
    }
    if j.is_subset(ci.x()) || j.is_subset(ci.y()) {
        rules.insert(PropagationRule::Lhs);
    }
    let referencing = match spec.key_class {
        KeyClass::ForeignKeyLeftToRight => Some(&spec.left),
        KeyClass::ForeignKeyRightToLeft => Some(&spec.right),
        _ => None,
    };
    if referencing.is_some_and(|r| r == ci.context()) {
        rules.insert(PropagationRule::ForeignKey);
    }
    if spec.key_class == KeyClass::OneOne {
        rules.insert(PropagationRule::OneOne);
    }
    Ok(Propagation {
        licensed: !rules.is_empty(),
        rules: rules.into_iter().collect(),
    })
}

/// True iff `attrs` is a key of `r` (no value combination repeats).
pub fn is_key(r: &Relation, attrs: &AttrSet) -> bool {
    !attrs.is_empty() && r.value_counts(attrs).is_ok_and(|c| c.values().all(|&n| n == 1))
}

/// Checks the key-class claim of `spec` against instances of both sides.
/// One-one joins need the join attributes to be a key of both relations
/// and the two projected value sets to be equal.
pub fn validate_key_class(spec: &JoinSpec, left: &Relation, right: &Relation) -> Result<bool> {
    if left.schema() != spec.left_schema || right.schema() != spec.right_schema {
        return Err(Error::Argument(format!(
            "instances do not match the schemas of join `{}` ⋈ `{}`",
            spec.left, spec.right
        )));
    }
    let j = &spec.join_attrs;
    Ok(match spec.key_class {
        KeyClass::General => true,
        KeyClass::ForeignKeyLeftToRight => validate_foreign_key(left, right, j),
        KeyClass::ForeignKeyRightToLeft => validate_foreign_key(right, left, j),
        KeyClass::OneOne => is_key(left, j) && is_key(right, j) && left.distinct_values(j)? == right.distinct_values(j)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(key_class: KeyClass) -> JoinSpec {
        JoinSpec::new("R", AttrSet::parse_list("A,B,C,D"), "S", AttrSet::parse_list("D,E"), key_class).unwrap()
    }

    #[test]
    fn base_ci_of_a_join() {
        let set = base_join_cis(&spec(KeyClass::General));
        let got: Vec<_> = set.iter().cloned().collect();
        assert_eq!(got, vec![CiStatement::of("A,B,C", "E", "D", JOIN_CONTEXT)]);

        let same = JoinSpec::new("R", AttrSet::parse_list("A,B"), "S", AttrSet::parse_list("A,B"), KeyClass::General).unwrap();
        assert!(base_join_cis(&same).is_empty());
    }

    #[test]
    fn rule_selection() {
        let general = spec(KeyClass::General);
        let p = propagate_ci(&CiStatement::of("A", "B", "C,D", "R"), &general).unwrap();
        assert_eq!(p.rules, vec![PropagationRule::Rhs]);
        let p = propagate_ci(&CiStatement::of("A", "B", "C", "R"), &general).unwrap();
        assert!(!p.licensed);
        let p = propagate_ci(&CiStatement::of("A", "B,D", "C", "R"), &general).unwrap();
        assert_eq!(p.rules, vec![PropagationRule::Lhs]);

        let fk = spec(KeyClass::ForeignKeyLeftToRight);
        assert_eq!(
            propagate_ci(&CiStatement::of("A", "B", "C", "R"), &fk).unwrap().rules,
            vec![PropagationRule::ForeignKey]
        );
        // the referenced side gets no fk licence
        assert!(!propagate_ci(&CiStatement::of("E", "D", "", "S"), &fk).unwrap().rules.contains(&PropagationRule::ForeignKey));
        assert!(propagate_ci(&CiStatement::of("A", "B", "C", "R"), &spec(KeyClass::OneOne)).unwrap().licensed);
    }

    #[test]
    fn context_and_schema_are_checked() {
        let s = spec(KeyClass::General);
        assert!(matches!(propagate_ci(&CiStatement::of("A", "B", "C", "T"), &s), Err(Error::Argument(_))));
        assert!(matches!(
            propagate_ci(&CiStatement::of("A", "E", "C", "R"), &s),
            Err(Error::UnknownAttribute { .. })
        ));
    }

    #[test]
    fn key_class_validation() {
        let r = Relation::from_rows("R", &["A", "D"], &[&["a1", "d1"], &["a2", "d1"], &["a3", "d2"]]).unwrap();
        let s = Relation::from_rows("S", &["D", "E"], &[&["d1", "e1"], &["d2", "e1"]]).unwrap();
        let fk = JoinSpec::between(&r, &s, KeyClass::ForeignKeyLeftToRight).unwrap();
        assert!(validate_key_class(&fk, &r, &s).unwrap());
        let oo = JoinSpec::between(&r, &s, KeyClass::OneOne).unwrap();
        assert!(!validate_key_class(&oo, &r, &s).unwrap());
        let backwards = JoinSpec::between(&r, &s, KeyClass::ForeignKeyRightToLeft).unwrap();
        assert!(!validate_key_class(&backwards, &r, &s).unwrap());
    }
}
