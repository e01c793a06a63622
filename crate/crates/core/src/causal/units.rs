use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{parse_decimal, Rational};
use crate::relcore::{Assignment, Attr, AttrSet, Relation, Value};

/// Comparison used by a treatment predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CompareOp {
    #[serde(rename = "=", alias = "==")]
    Eq,
    #[serde(rename = "!=", alias = "≠", alias = "<>")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=", alias = "≤")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=", alias = "≥")]
    Ge,
}

impl fmt::Display for CompareOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        })
    }
}

/// `T = 1` iff `attribute op value`.
///
/// When both sides parse as decimal numbers the comparison is numeric
/// (so `"5.0" = "5"`); otherwise `=` and `!=` compare strings and the
/// ordering operators are an error.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreatmentSpec {
    pub attribute: Attr,
    pub op: CompareOp,
    pub value: String,
}

impl TreatmentSpec {
    pub fn new(attribute: impl Into<Attr>, op: CompareOp, value: impl Into<String>) -> Self {
        TreatmentSpec {
            attribute: attribute.into(),
            op,
            value: value.into(),
        }
    }

    pub fn evaluate(&self, cell: &str) -> Result<bool> {
        use std::cmp::Ordering::*;
        let ord = match (parse_decimal(cell), parse_decimal(&self.value)) {
            (Ok(a), Ok(b)) => a.cmp(&b),
            _ => match self.op {
                CompareOp::Eq => return Ok(cell == self.value),
                CompareOp::Ne => return Ok(cell != self.value),
                _ => {
                    return Err(Error::Parse(format!(
                        "`{} {} {}` needs numbers, got `{cell}`",
                        self.attribute, self.op, self.value
                    )))
                }
            },
        };
        Ok(match self.op {
            CompareOp::Eq => ord == Equal,
            CompareOp::Ne => ord != Equal,
            CompareOp::Lt => ord == Less,
            CompareOp::Le => ord != Greater,
            CompareOp::Gt => ord == Greater,
            CompareOp::Ge => ord != Less,
        })
    }
}

impl fmt::Display for TreatmentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.attribute, self.op, self.value)
    }
}

/// One observational unit: treatment, observed outcome and covariates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unit {
    pub index: usize,
    pub treated: bool,
    pub outcome: Rational,
    pub covariates: Assignment,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitTable {
    pub treatment: TreatmentSpec,
    pub outcome: Attr,
    pub covariates: AttrSet,
    pub units: Vec<Unit>,
    /// Names of the base relations the units were built from.
    pub provenance: Vec<String>,
    pub warnings: Vec<String>,
}

impl UnitTable {
    pub fn treated_count(&self) -> usize {
        self.units.iter().filter(|u| u.treated).count()
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }
}

/// Largest number of units (tuples counted with multiplicity) accepted.
pub const MAX_UNITS: u64 = 5_000_000;

/// Turns every tuple of `u` (duplicates included) into a unit.
///
/// Adds a warning when `x` contains the join attributes of `u`'s base
/// relations while treatment and outcome come from different ones; see
/// [`detect_zero_ate`].
pub fn build_unit_table(u: &Relation, t: &TreatmentSpec, y: &Attr, x: &AttrSet) -> Result<UnitTable> {
    if x.contains(&t.attribute) || x.contains(y) || t.attribute == *y {
        return Err(Error::Argument(format!(
            "treatment `{}`, outcome `{y}` and covariates {{{x}}} must be distinct",
            t.attribute
        )));
    }
    let tp = position(u, &t.attribute)?;
    let yp = position(u, y)?;
    let xp: Vec<(Attr, usize)> = x.iter().map(|a| Ok((a.clone(), position(u, a)?))).collect::<Result<_>>()?;
    if u.len() > MAX_UNITS {
        return Err(Error::ResourceLimit {
            what: "units",
            actual: u.len() as usize,
            bound: MAX_UNITS as usize,
        });
    }

    let mut units = Vec::new();
    for (i, (tuple, mult)) in u.tuples().enumerate() {
        let row = i + 1;
        let treated = t.evaluate(&tuple[tp])?;
        let outcome = parse_decimal(&tuple[yp])
            .map_err(|_| Error::Parse(format!("`{}` row {row}: outcome `{}` is not numeric", u.name(), tuple[yp])))?;
        let mut covariates = Assignment::new();
        for (a, p) in &xp {
            covariates.bind(a.clone(), tuple[*p].clone());
        }
        for _ in 0..mult {
            units.push(Unit {
                index: units.len(),
                treated,
                outcome: outcome.clone(),
                covariates: covariates.clone(),
            });
        }
    }

    let mut warnings = Vec::new();
    let prov = u.provenance();
    let holders = |a: &Attr| -> Vec<&str> {
        prov.iter().filter(|b| b.schema.contains(a)).map(|b| b.name.as_str()).collect()
    };
    let (t_locs, y_locs) = (holders(&t.attribute), holders(y));
    let together = t_locs.iter().any(|n| y_locs.contains(n));
    if !together {
        if let (Some(t_loc), Some(y_loc)) = (t_locs.first(), y_locs.first()) {
            let shared = join_attributes(u);
            if detect_zero_ate(x, t_loc, y_loc, &shared) {
                warnings.push(zero_ate_message(&shared, t_loc, y_loc));
            }
        }
    }

    Ok(UnitTable {
        treatment: t.clone(),
        outcome: y.clone(),
        covariates: x.clone(),
        units,
        provenance: prov.iter().map(|b| b.name.clone()).collect(),
        warnings,
    })
}

fn position(u: &Relation, a: &Attr) -> Result<usize> {
    u.position(a).ok_or_else(|| Error::UnknownAttribute {
        attr: a.clone(),
        relation: u.name().to_owned(),
    })
}

/// Attributes that occur in more than one base relation of `u`.
pub fn join_attributes(u: &Relation) -> AttrSet {
    let mut seen: BTreeMap<&Attr, usize> = BTreeMap::new();
    for b in u.provenance() {
        for a in b.schema.iter() {
            *seen.entry(a).or_default() += 1;
        }
    }
    seen.into_iter().filter(|(_, n)| *n > 1).map(|(a, _)| a.clone()).collect()
}

pub(crate) fn zero_ate_message(join_attrs: &AttrSet, t_loc: &str, y_loc: &str) -> String {
    format!(
        "covariates contain the join attributes {{{join_attrs}}} while the treatment comes from `{t_loc}` and the \
         outcome from `{y_loc}`: ignorability holds trivially, and the adjusted effect is exactly zero"
    )
}

/// True when conditioning on `x` makes the effect vacuous: the treatment
/// and outcome sit in different relations and `x` contains the attributes
/// that join them, so treatment and outcome are independent given `x`.
pub fn detect_zero_ate(x: &AttrSet, t_loc: &str, y_loc: &str, join_attrs: &AttrSet) -> bool {
    t_loc != y_loc && join_attrs.is_subset(x)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SutvaViolation {
    /// Values of the provenance key, in key attribute order.
    pub key: Vec<String>,
    /// Rows of the join carrying this outcome tuple.
    pub joined_rows: u64,
    /// Copies of the tuple in the outcome relation.
    pub origin_rows: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SutvaReport {
    pub valid: bool,
    pub violations: Vec<SutvaViolation>,
}

/// Checks that no tuple of the outcome relation (identified by
/// `provenance_key`) shows up in more joined rows than it has copies, which
/// would let one outcome be shared by several units.
pub fn validate_sutva_units(
    joined: &Relation,
    outcome_origin: &Relation,
    y: &Attr,
    provenance_key: &AttrSet,
) -> Result<SutvaReport> {
    let key_and_y = provenance_key.with(y.clone());
    for r in [joined, outcome_origin] {
        if let Some(a) = key_and_y.iter().find(|a| r.position(a).is_none()) {
            return Err(Error::UnknownAttribute {
                attr: a.clone(),
                relation: r.name().to_owned(),
            });
        }
    }
    let in_join = joined.value_counts(provenance_key)?;
    let in_origin: HashMap<Vec<Value>, u64> = outcome_origin.value_counts(provenance_key)?;
    let mut violations: Vec<SutvaViolation> = in_join
        .into_iter()
        .filter_map(|(k, n)| {
            let origin = in_origin.get(&k).copied().unwrap_or(0);
            (n > origin).then(|| SutvaViolation {
                key: k.iter().map(|v| v.to_string()).collect(),
                joined_rows: n,
                origin_rows: origin,
            })
        })
        .collect();
    violations.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(SutvaReport {
        valid: violations.is_empty(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::relcore::natural_join;

    #[test]
    fn predicates() {
        let gt = TreatmentSpec::new("income", CompareOp::Gt, "100000");
        assert!(gt.evaluate("150000").unwrap());
        assert!(!gt.evaluate("100000").unwrap());
        assert!(gt.evaluate("rich").is_err());
        let eq = TreatmentSpec::new("w", CompareOp::Eq, "5");
        assert!(eq.evaluate("5.0").unwrap());
        assert!(TreatmentSpec::new("c", CompareOp::Ne, "red").evaluate("blue").unwrap());
        let op: CompareOp = serde_json::from_str("\"≥\"").unwrap();
        assert_eq!(op, CompareOp::Ge);
    }

    #[test]
    fn units_from_rows() {
        let r = Relation::from_rows("G", &["t", "y", "x"], &[&["1", "3.25", "a"], &["0", "1", "a"]]).unwrap();
        let u = build_unit_table(&r, &TreatmentSpec::new("t", CompareOp::Eq, "1"), &"y".into(), &AttrSet::single("x")).unwrap();
        assert_eq!(u.len(), 2);
        assert_eq!(u.units[0].outcome, ratio(13, 4));
        assert!(u.units[0].treated && !u.units[1].treated);
        assert!(u.warnings.is_empty());

        let bad = Relation::from_rows("G", &["t", "y"], &[&["1", "n/a"]]).unwrap();
        let err = build_unit_table(&bad, &TreatmentSpec::new("t", CompareOp::Eq, "1"), &"y".into(), &AttrSet::new());
        assert!(err.unwrap_err().to_string().contains("row 1"));
        assert!(build_unit_table(&r, &TreatmentSpec::new("t", CompareOp::Eq, "1"), &"y".into(), &AttrSet::single("t")).is_err());
    }

    #[test]
    fn zero_ate_trap_is_flagged() {
        let r = Relation::from_rows("R", &["T", "D"], &[&["1", "d"], &["0", "d"]]).unwrap();
        let s = Relation::from_rows("S", &["D", "Y"], &[&["d", "5"]]).unwrap();
        let j = natural_join(&r, &s);
        let u = build_unit_table(&j, &TreatmentSpec::new("T", CompareOp::Eq, "1"), &"Y".into(), &AttrSet::single("D")).unwrap();
        assert_eq!(u.warnings.len(), 1);
        assert!(detect_zero_ate(&AttrSet::single("D"), "R", "S", &AttrSet::single("D")));
        assert!(!detect_zero_ate(&AttrSet::single("D"), "R", "R", &AttrSet::single("D")));
        assert!(!detect_zero_ate(&AttrSet::new(), "R", "S", &AttrSet::single("D")));
    }

    #[test]
    fn shared_outcomes_violate_sutva() {
        let students = Relation::from_rows("S", &["sid", "gpa"], &[&["s1", "3.5"], &["s2", "3.0"]]).unwrap();
        let teaches = Relation::from_rows("T", &["pid", "sid"], &[&["p1", "s1"], &["p2", "s1"], &["p1", "s2"]]).unwrap();
        let j = natural_join(&teaches, &students);
        let rep = validate_sutva_units(&j, &students, &"gpa".into(), &AttrSet::single("sid")).unwrap();
        assert!(!rep.valid);
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].key, vec!["s1".to_owned()]);
        assert_eq!(rep.violations[0].joined_rows, 2);
    }
}
