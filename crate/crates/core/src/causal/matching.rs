use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use super::UnitTable;
use crate::error::{Error, Result};
use crate::rational::{parse_decimal, serialize_fraction, to_f64, Rational};
use crate::relcore::{Attr, AttrSet};

/// How one covariate is coarsened before matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coarsening {
    /// Keep values as they are.
    Identity,
    /// Numeric bins split at strictly increasing cutpoints; a value equal to
    /// a cutpoint falls in the bin above it.
    Cutpoints(Vec<Rational>),
    /// Explicit value-to-bin labels; unlisted values are an error.
    Map(BTreeMap<String, String>),
}

impl Coarsening {
    pub fn cutpoints(points: &[&str]) -> Result<Self> {
        let pts = points.iter().map(|p| parse_decimal(p)).collect::<Result<Vec<_>>>()?;
        if pts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument("cutpoints must be strictly increasing".into()));
        }
        Ok(Coarsening::Cutpoints(pts))
    }

    pub fn bin(&self, attr: &Attr, value: &str) -> Result<String> {
        match self {
            Coarsening::Identity => Ok(value.to_owned()),
            Coarsening::Map(m) => m
                .get(value)
                .cloned()
                .ok_or_else(|| Error::Argument(format!("`{attr}` value `{value}` falls in no bin"))),
            Coarsening::Cutpoints(pts) => {
                let v = parse_decimal(value)
                    .map_err(|_| Error::Argument(format!("`{attr}` value `{value}` falls in no numeric bin")))?;
                let i = pts.partition_point(|p| *p <= v);
                let show = |r: &Rational| {
                    if r.is_integer() {
                        r.numer().to_string()
                    } else {
                        crate::rational::to_fraction_string(r)
                    }
                };
                Ok(match (i, pts.len()) {
                    (_, 0) => "all".to_owned(),
                    (0, _) => format!("<{}", show(&pts[0])),
                    (i, n) if i == n => format!(">={}", show(&pts[n - 1])),
                    (i, _) => format!("[{},{})", show(&pts[i - 1]), show(&pts[i])),
                })
            }
        }
    }
}

/// Per-attribute coarsening; attributes without an entry are kept as is.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoarseningSpec {
    pub rules: BTreeMap<Attr, Coarsening>,
}

impl CoarseningSpec {
    pub fn identity() -> Self {
        CoarseningSpec::default()
    }

    pub fn with(mut self, attr: impl Into<Attr>, c: Coarsening) -> Self {
        self.rules.insert(attr.into(), c);
        self
    }
}

/// Units sharing one (possibly coarsened) covariate signature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchGroup {
    /// Signature values in covariate attribute order.
    pub signature: Vec<String>,
    pub treated: Vec<usize>,
    pub control: Vec<usize>,
    #[serde(serialize_with = "serialize_fraction")]
    pub treated_outcome_sum: Rational,
    #[serde(serialize_with = "serialize_fraction")]
    pub control_outcome_sum: Rational,
    /// At least one treated and one control unit.
    pub valid: bool,
}

impl MatchGroup {
    pub fn size(&self) -> usize {
        self.treated.len() + self.control.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchGroups {
    pub covariates: AttrSet,
    /// Sorted by signature.
    pub groups: Vec<MatchGroup>,
    /// Warnings carried over from unit construction.
    pub warnings: Vec<String>,
}

impl MatchGroups {
    pub fn valid_groups(&self) -> impl Iterator<Item = &MatchGroup> {
        self.groups.iter().filter(|g| g.valid)
    }
}

/// Groups units by their exact values on `x`.
pub fn exact_match(units: &UnitTable, x: &AttrSet) -> Result<MatchGroups> {
    cem(units, x, &CoarseningSpec::identity())
}

/// Coarsened exact matching: every covariate in `x` is binned per `c`,
/// then units with equal binned signatures form a group.
pub fn cem(units: &UnitTable, x: &AttrSet, c: &CoarseningSpec) -> Result<MatchGroups> {
    if !x.is_subset(&units.covariates) {
        return Err(Error::Argument(format!(
            "matching attributes {{{x}}} are not all covariates of the unit table {{{}}}",
            units.covariates
        )));
    }
    if let Some(a) = c.rules.keys().find(|a| !x.contains(a)) {
        return Err(Error::Argument(format!("coarsening given for `{a}`, which is not matched on")));
    }
    let mut groups: BTreeMap<Vec<String>, MatchGroup> = BTreeMap::new();
    for u in &units.units {
        let mut sig = Vec::with_capacity(x.len());
        for a in x.iter() {
            let v = u.covariates.get(a).expect("unit tables bind every covariate");
            sig.push(match c.rules.get(a) {
                Some(rule) => rule.bin(a, v)?,
                None => v.to_string(),
            });
        }
        let g = groups.entry(sig.clone()).or_insert_with(|| MatchGroup {
            signature: sig,
            treated: Vec::new(),
            control: Vec::new(),
            treated_outcome_sum: Rational::zero(),
            control_outcome_sum: Rational::zero(),
            valid: false,
        });
        if u.treated {
            g.treated.push(u.index);
            g.treated_outcome_sum += &u.outcome;
        } else {
            g.control.push(u.index);
            g.control_outcome_sum += &u.outcome;
        }
    }
    let groups = groups
        .into_values()
        .map(|mut g| {
            g.valid = !g.treated.is_empty() && !g.control.is_empty();
            g
        })
        .collect();
    Ok(MatchGroups {
        covariates: x.clone(),
        groups,
        warnings: units.warnings.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupDetail {
    pub signature: Vec<String>,
    pub n_treated: usize,
    pub n_control: usize,
    pub valid: bool,
    /// Share of matched units in this group (zero for invalid groups).
    #[serde(serialize_with = "serialize_fraction")]
    pub weight: Rational,
    /// Treated mean minus control mean (zero for invalid groups).
    #[serde(serialize_with = "serialize_fraction")]
    pub effect: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AteReport {
    #[serde(serialize_with = "serialize_fraction")]
    pub ate: Rational,
    /// `ate` as a float, for convenience only.
    pub ate_float: f64,
    pub n_matched: usize,
    pub n_dropped: usize,
    pub n_valid_groups: usize,
    pub warnings: Vec<String>,
    pub groups: Vec<GroupDetail>,
}

/// Adjusted estimand over valid groups: the group effects (treated mean
/// minus control mean) averaged with weights proportional to group size.
/// Units in invalid groups are dropped and counted.
pub fn estimate_ate(groups: &MatchGroups) -> Result<AteReport> {
    let n_matched: usize = groups.valid_groups().map(MatchGroup::size).sum();
    if n_matched == 0 {
        return Err(Error::Estimation(format!(
            "no group has both treated and control units ({} groups)",
            groups.groups.len()
        )));
    }
    let total = Rational::from_integer(n_matched.into());
    let mut ate = Rational::zero();
    let mut details = Vec::with_capacity(groups.groups.len());
    for g in &groups.groups {
        let (weight, effect) = if g.valid {
            let t = &g.treated_outcome_sum / Rational::from_integer(g.treated.len().into());
            let c = &g.control_outcome_sum / Rational::from_integer(g.control.len().into());
            (Rational::from_integer(g.size().into()) / &total, t - c)
        } else {
            (Rational::zero(), Rational::zero())
        };
        ate += &weight * &effect;
        details.push(GroupDetail {
            signature: g.signature.clone(),
            n_treated: g.treated.len(),
            n_control: g.control.len(),
            valid: g.valid,
            weight,
            effect,
        });
    }
    let n_all: usize = groups.groups.iter().map(MatchGroup::size).sum();
    Ok(AteReport {
        ate_float: to_f64(&ate),
        ate,
        n_matched,
        n_dropped: n_all - n_matched,
        n_valid_groups: groups.valid_groups().count(),
        warnings: groups.warnings.clone(),
        groups: details,
    })
}
