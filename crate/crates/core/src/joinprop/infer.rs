use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{base_join_cis, propagate_ci, JoinSpec, KeyClass};
use crate::error::{Error, Result};
use crate::gaxioms::{closure, CiSet, CiStatement, ClosureBounds, Mode, JOIN_CONTEXT};
use crate::relcore::{AttrSet, CiTester, Relation};

/// Settings for [`infer_join_cis`].
#[derive(Clone, Copy, Debug, Default)]
pub struct InferOptions {
    pub mode: Mode,
    pub bounds: ClosureBounds,
}

/// A statement about the final join together with how it was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivedCi {
    #[serde(flatten)]
    pub statement: CiStatement,
    /// Every rule that contributed, e.g. `asserted`, `rhs-rule`, `closure`.
    pub rule_tags: BTreeSet<String>,
    /// One entry per stage, oldest first, e.g. `R: asserted`, `R⋈S: rhs-rule`.
    pub derivation: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JoinInference {
    /// Context shared by all output statements (the relation name when no
    /// join was performed).
    pub contexts: Vec<String>,
    pub statements: Vec<DerivedCi>,
    /// Downgraded key claims and similar remarks.
    pub notes: Vec<String>,
}

impl JoinInference {
    pub fn contains(&self, s: &CiStatement) -> bool {
        self.statements.binary_search_by(|d| d.statement.cmp(s)).is_ok()
    }

    pub fn get(&self, s: &CiStatement) -> Option<&DerivedCi> {
        self.statements.binary_search_by(|d| d.statement.cmp(s)).ok().map(|i| &self.statements[i])
    }

    pub fn statements(&self) -> impl Iterator<Item = &CiStatement> {
        self.statements.iter().map(|d| &d.statement)
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }
}

#[derive(Clone, Debug)]
struct Record {
    tags: BTreeSet<String>,
    derivation: Vec<String>,
}

type Records = BTreeMap<CiStatement, Record>;

fn add(records: &mut Records, s: CiStatement, tags: impl IntoIterator<Item = String>, derivation: Vec<String>) {
    let rec = records.entry(s).or_insert_with(|| Record {
        tags: BTreeSet::new(),
        derivation,
    });
    rec.tags.extend(tags);
}

fn mode_tag(mode: Mode) -> &'static str {
    match mode {
        Mode::Semigraphoid => "semigraphoid closure",
        Mode::Graphoid => "graphoid closure",
    }
}

/// Closes `records` and tags statements the closure added.
fn close(records: &mut Records, universe: AttrSet, label: &str, opts: &InferOptions) -> Result<()> {
    let set = CiSet::from_statements(universe, records.keys().cloned())?;
    for s in closure(&set, opts.mode, &opts.bounds)?.iter() {
        if !records.contains_key(s) {
            add(
                records,
                s.clone(),
                ["closure".to_owned()],
                vec![format!("{label}: {}", mode_tag(opts.mode))],
            );
        }
    }
    Ok(())
}

/// Orients every step so the relation new to the chain is on the right.
fn normalize(spec: &JoinSpec, joined: &BTreeSet<String>, first: bool) -> Result<(String, String, KeyClass)> {
    let (l, r) = (&spec.left, &spec.right);
    let mirrored = match spec.key_class {
        KeyClass::ForeignKeyLeftToRight => KeyClass::ForeignKeyRightToLeft,
        KeyClass::ForeignKeyRightToLeft => KeyClass::ForeignKeyLeftToRight,
        k => k,
    };
    if first {
        return Ok((l.clone(), r.clone(), spec.key_class));
    }
    match (joined.contains(l), joined.contains(r)) {
        (true, false) => Ok((l.clone(), r.clone(), spec.key_class)),
        (false, true) => Ok((r.clone(), l.clone(), mirrored)),
        (true, true) => Err(Error::Argument(format!(
            "join `{l}` ⋈ `{r}` closes a cycle; only tree-shaped join orders are supported"
        ))),
        (false, false) => Err(Error::Argument(format!(
            "join `{l}` ⋈ `{r}` does not touch the relations joined so far"
        ))),
    }
}

/// Infers CIs that hold in the left-deep join described by `specs`.
///
/// Each relation's asserted statements are first closed under the chosen
/// axioms. At every step the accumulated join contributes its statements,
/// the new relation its closed statements, and the pairwise base CI is
/// added; whatever one of the propagation rules licenses is kept and the
/// result is closed again. With no joins the closed assertions are
/// returned per relation.
///
/// Foreign keys whose referenced side is the accumulated join, and
/// one-one claims after the first step, are treated as general joins,
/// because the key property of a base relation does not survive earlier
/// joins.
pub fn infer_join_cis(
    schemas: &BTreeMap<String, AttrSet>,
    asserted: &CiSet,
    specs: &[JoinSpec],
    opts: &InferOptions,
) -> Result<JoinInference> {
    let schema = |name: &str| {
        schemas
            .get(name)
            .cloned()
            .ok_or_else(|| Error::Schema(format!("unknown relation `{name}`")))
    };
    let mut notes = Vec::new();

    // closed assertions per base relation
    let mut base: BTreeMap<String, Records> = BTreeMap::new();
    for (ctx, stmts) in asserted.by_context() {
        let sch = schema(&ctx)?;
        let mut recs = Records::new();
        for s in stmts {
            if let Some(a) = s.attrs().iter().find(|a| !sch.contains(a)) {
                return Err(Error::UnknownAttribute {
                    attr: a.clone(),
                    relation: ctx.clone(),
                });
            }
            add(&mut recs, s, ["asserted".to_owned()], vec![format!("{ctx}: asserted")]);
        }
        close(&mut recs, sch, &ctx, opts)?;
        base.insert(ctx, recs);
    }

    if specs.is_empty() {
        let statements = base
            .values()
            .flat_map(|r| r.iter())
            .map(|(s, r)| DerivedCi {
                statement: s.clone(),
                rule_tags: r.tags.clone(),
                derivation: r.derivation.clone(),
            })
            .collect();
        return Ok(JoinInference {
            contexts: base.keys().cloned().collect(),
            statements,
            notes,
        });
    }

    let mut joined: BTreeSet<String> = BTreeSet::new();
    let mut current: Records = Records::new();
    let mut current_schema = AttrSet::new();
    let mut label = String::new();
    for (i, spec) in specs.iter().enumerate() {
        let (left, right, mut key_class) = normalize(spec, &joined, i == 0)?;
        let right_schema = schema(&right)?;
        let (left_ctx, left_schema) = if i == 0 {
            joined.insert(left.clone());
            current = base.get(&left).cloned().unwrap_or_default();
            label = left.clone();
            (left.clone(), schema(&left)?)
        } else {
            (JOIN_CONTEXT.to_owned(), current_schema.clone())
        };
        let actual = left_schema.intersection(&right_schema);
        let declared = schema(&left)?.intersection(&right_schema);
        if key_class != KeyClass::General && actual != declared {
            notes.push(format!(
                "{label} ⋈ {right}: shared attributes {{{actual}}} differ from the declared key attributes {{{declared}}}; treated as a general join"
            ));
            key_class = KeyClass::General;
        }
        if i > 0 && matches!(key_class, KeyClass::ForeignKeyRightToLeft | KeyClass::OneOne) {
            notes.push(format!(
                "{label} ⋈ {right}: key claim on `{left}` need not hold in the accumulated join; treated as a general join"
            ));
            key_class = KeyClass::General;
        }
        let step_spec = JoinSpec::new(left_ctx.clone(), left_schema.clone(), right.clone(), right_schema.clone(), key_class)?;
        let step_label = format!("{label}⋈{right}");

        let mut next = Records::new();
        for s in base_join_cis(&step_spec).iter() {
            add(&mut next, s.clone(), ["join-base".to_owned()], vec![format!("{step_label}: join-base")]);
        }
        let right_records = base.get(&right).cloned().unwrap_or_default();
        for (s, rec) in current.iter().chain(right_records.iter()) {
            let p = propagate_ci(s, &step_spec)?;
            if !p.licensed {
                continue;
            }
            let tags: Vec<String> = p.rules.iter().map(|r| r.tag().to_owned()).collect();
            let mut derivation = rec.derivation.clone();
            derivation.push(format!("{step_label}: {}", tags.join("+")));
            add(
                &mut next,
                s.in_context(JOIN_CONTEXT),
                rec.tags.iter().cloned().chain(tags),
                derivation,
            );
        }
        current_schema = left_schema.union(&right_schema);
        close(&mut next, current_schema.clone(), &step_label, opts)?;
        current = next;
        joined.insert(right);
        label = format!("({step_label})");
    }

    Ok(JoinInference {
        contexts: vec![JOIN_CONTEXT.to_owned()],
        statements: current
            .into_iter()
            .map(|(s, r)| DerivedCi {
                statement: s,
                rule_tags: r.tags,
                derivation: r.derivation,
            })
            .collect(),
        notes,
    })
}

/// What to do when an asserted statement is false on the supplied data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditPolicy {
    #[default]
    Warn,
    Abort,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssertionCheck {
    pub statement: CiStatement,
    /// `None` when no instance of the statement's relation was supplied.
    pub holds: Option<bool>,
}

/// Tests asserted statements against instance data. Under
/// [`AuditPolicy::Abort`] any refuted statement is an error.
pub fn audit_assertions(
    asserted: &CiSet,
    relations: &BTreeMap<String, Relation>,
    policy: AuditPolicy,
) -> Result<Vec<AssertionCheck>> {
    let testers: BTreeMap<&str, CiTester> = relations.iter().map(|(n, r)| (n.as_str(), CiTester::new(r))).collect();
    let mut out = Vec::new();
    for s in asserted.iter() {
        let holds = match testers.get(s.context()) {
            Some(t) => Some(t.holds(s.x(), s.y(), s.z())?),
            None => None,
        };
        if policy == AuditPolicy::Abort && holds == Some(false) {
            return Err(Error::Precondition(format!("asserted statement `{s}` is false on the data")));
        }
        out.push(AssertionCheck {
            statement: s.clone(),
            holds,
        });
    }
    Ok(out)
}
