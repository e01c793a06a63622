use std::collections::BTreeMap;

use serde::Serialize;

use super::units::zero_ate_message;
use super::detect_zero_ate;
use crate::error::{Error, Result};
use crate::gaxioms::{derivable, CiSet, CiStatement, ClosureBounds, DerivationTrace, Mode};
use crate::relcore::{empirical_ci, Attr, AttrSet, ForeignKey, Relation};

/// Where CI judgements for causal checks come from.
#[derive(Clone, Copy)]
pub enum CiSource<'a> {
    /// Derivability from asserted statements in one context.
    Statements {
        set: &'a CiSet,
        context: &'a str,
        mode: Mode,
        bounds: ClosureBounds,
    },
    /// Exact tests on an instance.
    Data(&'a Relation),
}

impl CiSource<'_> {
    /// `x ⊥ y | z`, with attributes of `z` dropped from the sides first;
    /// an empty side makes the statement trivially true.
    pub fn holds(&self, x: &AttrSet, y: &AttrSet, z: &AttrSet) -> Result<bool> {
        let x = x.difference(z);
        let y = y.difference(z);
        if x.is_empty() || y.is_empty() {
            return Ok(true);
        }
        if !x.is_disjoint(&y) {
            return Err(Error::Argument(format!("independent sides {{{x}}} and {{{y}}} overlap")));
        }
        match self {
            CiSource::Data(r) => empirical_ci(r, &x, &y, z),
            CiSource::Statements {
                set,
                context,
                mode,
                bounds,
            } => {
                let goal = CiStatement::new(x, y, z.clone(), *context)?;
                Ok(derivable(set, &goal, *mode, bounds)?.derivable)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CEquivalence {
    /// `T ⊥ X' | X` and `Y ⊥ X | X', T`.
    EquivalentByI,
    /// `T ⊥ X | X'` and `Y ⊥ X' | X, T`.
    EquivalentByII,
    /// Neither sufficient condition could be shown; says nothing either way.
    NotEstablished,
}

/// Checks the two sufficient conditions for covariate sets `x` and `x2` to
/// yield the same adjusted estimand.
pub fn check_c_equivalence(
    oracle: &CiSource<'_>,
    t: &Attr,
    y: &Attr,
    x: &AttrSet,
    x2: &AttrSet,
) -> Result<CEquivalence> {
    if [x, x2].iter().any(|s| s.contains(t) || s.contains(y)) || t == y {
        return Err(Error::Argument(format!(
            "covariate sets must not contain the treatment `{t}` or the outcome `{y}`"
        )));
    }
    let ts = AttrSet::single(t.clone());
    let ys = AttrSet::single(y.clone());
    if oracle.holds(&ts, x2, x)? && oracle.holds(&ys, x, &x2.with(t.clone()))? {
        return Ok(CEquivalence::EquivalentByI);
    }
    if oracle.holds(&ts, x, x2)? && oracle.holds(&ys, x2, &x.with(t.clone()))? {
        return Ok(CEquivalence::EquivalentByII);
    }
    Ok(CEquivalence::NotEstablished)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CovariateReduction {
    pub covariates: AttrSet,
    pub reduced: bool,
    pub note: Option<String>,
}

/// Restricts `x` to the outcome relation `y_loc` when the restricted set
/// holds a foreign key from `y_loc` to every other relation that
/// contributes covariates. Only foreign keys declared directly from `y_loc`
/// count.
pub fn reduce_covariates_fk(
    x: &AttrSet,
    schemas: &BTreeMap<String, AttrSet>,
    fks: &[ForeignKey],
    y_loc: &str,
) -> CovariateReduction {
    let unchanged = |note: Option<String>| CovariateReduction {
        covariates: x.clone(),
        reduced: false,
        note,
    };
    let Some(home) = schemas.get(y_loc) else {
        return unchanged(Some(format!("unknown outcome relation `{y_loc}`; reduction not licensed")));
    };
    let xi = x.intersection(home);
    let outside = x.difference(&xi);
    if outside.is_empty() {
        return unchanged(None);
    }
    for (name, schema) in schemas {
        if name == y_loc || schema.is_disjoint(&outside) {
            continue;
        }
        let covered = fks
            .iter()
            .any(|fk| fk.from == y_loc && fk.to == *name && fk.attributes.is_subset(&xi));
        if !covered {
            return unchanged(Some(format!(
                "no foreign key from `{y_loc}` to `{name}` lies inside the covariates; reduction not licensed"
            )));
        }
    }
    CovariateReduction {
        covariates: xi,
        reduced: true,
        note: None,
    }
}

/// Treatment and outcome placement used to recognize the zero-effect case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinPlacement {
    pub t_loc: String,
    pub y_loc: String,
    pub join_attrs: AttrSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IgnorabilityStatus {
    /// `T ⊥ Y_pot | X` follows from the asserted statements.
    Derivable,
    /// Conditioning on the join attributes separates treatment and outcome,
    /// so ignorability holds, but the effect is zero.
    ImpliedByJoin,
    /// Cannot be established: it must be asserted by the user.
    Unverifiable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IgnorabilityVerdict {
    pub status: IgnorabilityStatus,
    pub trace: Option<DerivationTrace>,
    pub zero_ate_warning: Option<String>,
}

/// Whether strong ignorability `T ⊥ Y_pot | X` is derivable from asserted
/// statements, where `y_pot` is a proxy attribute standing for the
/// potential outcomes.
#[allow(clippy::too_many_arguments)]
pub fn check_ignorability_asserted(
    cis: &CiSet,
    context: &str,
    t: &Attr,
    y_pot: &Attr,
    x: &AttrSet,
    placement: Option<&JoinPlacement>,
    mode: Mode,
    bounds: &ClosureBounds,
) -> Result<IgnorabilityVerdict> {
    let zero_ate_warning = placement
        .filter(|p| detect_zero_ate(x, &p.t_loc, &p.y_loc, &p.join_attrs))
        .map(|p| zero_ate_message(&p.join_attrs, &p.t_loc, &p.y_loc));
    let goal = CiStatement::new(AttrSet::single(t.clone()), AttrSet::single(y_pot.clone()), x.clone(), context)?;
    let d = derivable(cis, &goal, mode, bounds)?;
    let status = if d.derivable {
        IgnorabilityStatus::Derivable
    } else if zero_ate_warning.is_some() {
        IgnorabilityStatus::ImpliedByJoin
    } else {
        IgnorabilityStatus::Unverifiable
    };
    Ok(IgnorabilityVerdict {
        status,
        trace: d.trace,
        zero_ate_warning,
    })
}
