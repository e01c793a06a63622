use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::causal::{CompareOp, TreatmentSpec};
use crate::error::{Error, Result};
use crate::gaxioms::{parse_statements, CiSet, ClosureBounds, Mode};
use crate::joinprop::{validate_key_class, AuditPolicy, EmvdStatement, JoinSpec, KeyClass};
use crate::relcore::{natural_join, read_csv, Attr, AttrSet, ForeignKey, Relation};
use crate::ugm::UndirectedGraph;

/// The project file as written on disk. Paths are relative to the file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectManifest {
    #[serde(default)]
    pub relations: Vec<RelationEntry>,
    #[serde(default)]
    pub foreign_keys: Vec<ForeignKey>,
    /// Pairs `[left, right]`, optionally with a key class as third element.
    #[serde(default)]
    pub join_order: Vec<Vec<String>>,
    #[serde(default)]
    pub ci_files: Vec<PathBuf>,
    /// Relation name to a graph file (`{"vertices": [...], "edges": [[a, b], ...]}`).
    #[serde(default)]
    pub graphs: BTreeMap<String, PathBuf>,
    /// Inline analysis config, or the path of a JSON file holding one.
    #[serde(default)]
    pub analysis: Option<AnalysisSource>,
    #[serde(default)]
    pub emvds: Vec<EmvdEntry>,
    #[serde(default)]
    pub bounds: BoundsEntry,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub audit_policy: AuditPolicy,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationEntry {
    pub name: String,
    #[serde(default)]
    pub csv_path: Option<PathBuf>,
    #[serde(default)]
    pub attributes: Option<Vec<String>>,
    #[serde(default)]
    pub keys: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum AnalysisSource {
    Path(PathBuf),
    Inline(AnalysisConfig),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub treatment: TreatmentEntry,
    pub outcome: String,
    #[serde(default)]
    pub covariates: Vec<String>,
    #[serde(default)]
    pub matching: MatchingEntry,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreatmentEntry {
    pub attribute: String,
    pub op: CompareOp,
    pub value: serde_json::Value,
}

impl TreatmentEntry {
    pub fn spec(&self) -> Result<TreatmentSpec> {
        let value = match &self.value {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::Bool(b) => b.to_string(),
            other => return Err(Error::Parse(format!("treatment value `{other}` must be a string or number"))),
        };
        Ok(TreatmentSpec::new(self.attribute.as_str(), self.op, value))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchingMethod {
    #[default]
    Exact,
    Cem,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingEntry {
    #[serde(default)]
    pub method: MatchingMethod,
    /// Attribute to numeric cutpoints or to a value-to-bin map.
    #[serde(default)]
    pub cutpoints: BTreeMap<String, CutEntry>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum CutEntry {
    Points(Vec<serde_json::Value>),
    Map(BTreeMap<String, String>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmvdEntry {
    pub relation: String,
    pub x: Vec<String>,
    pub y: Vec<String>,
    /// Defaults to the relation's schema.
    #[serde(default)]
    pub scope: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsEntry {
    pub max_universe: Option<usize>,
    pub max_statements: Option<usize>,
}

/// One join step after key-class resolution.
#[derive(Clone, Debug)]
pub struct ResolvedJoin {
    pub spec: JoinSpec,
    /// The class as declared or inferred from foreign keys, before any
    /// downgrade.
    pub declared: KeyClass,
    /// `Some(false)` when instance data refutes the declared class.
    pub validated: Option<bool>,
}

/// A manifest with every referenced file loaded and cross-checked.
#[derive(Clone, Debug)]
pub struct Project {
    pub dir: PathBuf,
    pub manifest: ProjectManifest,
    pub schemas: BTreeMap<String, AttrSet>,
    pub keys: BTreeMap<String, Vec<AttrSet>>,
    /// Relations whose CSV was given.
    pub data: BTreeMap<String, Relation>,
    pub asserted: CiSet,
    pub graphs: BTreeMap<String, UndirectedGraph>,
    pub analysis: Option<AnalysisConfig>,
    pub emvds: Vec<(String, EmvdStatement)>,
}

fn names(list: &[String]) -> Result<AttrSet> {
    let set: AttrSet = list.iter().map(|s| Attr::from(s.as_str())).collect();
    if set.len() != list.len() {
        return Err(Error::Schema(format!("repeated attribute in [{}]", list.join(", "))));
    }
    Ok(set)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Schema(format!("cannot read `{}`: {e}", path.display())))
}

impl Project {
    pub fn load(path: &Path) -> Result<Project> {
        let text = read_text(path)?;
        let manifest: ProjectManifest = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("manifest `{}`: {e}", path.display())))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Project::from_manifest(manifest, dir)
    }

    pub fn from_manifest(manifest: ProjectManifest, dir: PathBuf) -> Result<Project> {
        let mut schemas = BTreeMap::new();
        let mut keys = BTreeMap::new();
        let mut data = BTreeMap::new();
        for rel in &manifest.relations {
            if schemas.contains_key(&rel.name) {
                return Err(Error::Schema(format!("relation `{}` is declared twice", rel.name)));
            }
            let declared = rel.attributes.as_deref().map(names).transpose()?;
            let loaded = match &rel.csv_path {
                Some(p) => Some(read_csv(&rel.name, dir.join(p)).map_err(|e| {
                    Error::Schema(format!("relation `{}`: cannot load `{}`: {e}", rel.name, p.display()))
                })?),
                None => None,
            };
            let schema = match (&declared, &loaded) {
                (Some(d), Some(r)) if *d != r.schema() => {
                    return Err(Error::Schema(format!(
                        "relation `{}`: CSV columns {{{}}} differ from the declared attributes {{{d}}}",
                        rel.name,
                        r.schema()
                    )))
                }
                (Some(d), _) => d.clone(),
                (None, Some(r)) => r.schema(),
                (None, None) => {
                    return Err(Error::Schema(format!(
                        "relation `{}` needs `attributes` or a `csv_path`",
                        rel.name
                    )))
                }
            };
            let mut ks = Vec::new();
            for k in &rel.keys {
                let k = names(k)?;
                if k.is_empty() || !k.is_subset(&schema) {
                    return Err(Error::Schema(format!(
                        "relation `{}`: key {{{k}}} is not a non-empty subset of {{{schema}}}",
                        rel.name
                    )));
                }
                ks.push(k);
            }
            keys.insert(rel.name.clone(), ks);
            schemas.insert(rel.name.clone(), schema);
            if let Some(r) = loaded {
                data.insert(rel.name.clone(), r);
            }
        }
        let schema_of = |name: &str, what: &str| {
            schemas
                .get(name)
                .ok_or_else(|| Error::Schema(format!("{what} refers to unknown relation `{name}`")))
        };

        for fk in &manifest.foreign_keys {
            for side in [&fk.from, &fk.to] {
                let s = schema_of(side, "foreign key")?;
                if fk.attributes.is_empty() || !fk.attributes.is_subset(s) {
                    return Err(Error::Schema(format!(
                        "foreign key {} → {}: attributes {{{}}} are not in `{side}`",
                        fk.from, fk.to, fk.attributes
                    )));
                }
            }
        }
        for step in &manifest.join_order {
            if !(2..=3).contains(&step.len()) {
                return Err(Error::Schema(format!(
                    "join_order entries are [left, right] or [left, right, key_class], got {step:?}"
                )));
            }
            schema_of(&step[0], "join_order")?;
            schema_of(&step[1], "join_order")?;
        }

        let universe: AttrSet = schemas.values().fold(AttrSet::new(), |acc, s| acc.union(s));
        let mut asserted = CiSet::new(universe);
        for p in &manifest.ci_files {
            let path = dir.join(p);
            let stmts = parse_statements(&read_text(&path)?)
                .map_err(|e| Error::Parse(format!("`{}`: {e}", p.display())))?;
            for s in stmts {
                let sch = schema_of(s.context(), "CI statement")?;
                if let Some(a) = s.attrs().iter().find(|a| !sch.contains(a)) {
                    return Err(Error::UnknownAttribute {
                        attr: a.clone(),
                        relation: s.context().to_owned(),
                    });
                }
                asserted.insert(s)?;
            }
        }

        let mut graphs = BTreeMap::new();
        for (name, p) in &manifest.graphs {
            let sch = schema_of(name, "graph")?;
            let g = UndirectedGraph::from_json(&read_text(&dir.join(p))?)
                .map_err(|e| Error::Parse(format!("graph `{}`: {e}", p.display())))?;
            if g.vertices() != *sch {
                return Err(Error::Schema(format!(
                    "graph for `{name}` has vertices {{{}}}, the relation has {{{sch}}}",
                    g.vertices()
                )));
            }
            graphs.insert(name.clone(), g);
        }

        let analysis = match &manifest.analysis {
            None => None,
            Some(AnalysisSource::Inline(a)) => Some(a.clone()),
            Some(AnalysisSource::Path(p)) => Some(
                serde_json::from_str(&read_text(&dir.join(p))?)
                    .map_err(|e| Error::Parse(format!("analysis `{}`: {e}", p.display())))?,
            ),
        };

        let mut emvds = Vec::new();
        for e in &manifest.emvds {
            let sch = schema_of(&e.relation, "EMVD")?;
            let scope = match &e.scope {
                Some(s) => names(s)?,
                None => sch.clone(),
            };
            if !scope.is_subset(sch) {
                return Err(Error::Schema(format!(
                    "EMVD scope {{{scope}}} is not inside `{}`",
                    e.relation
                )));
            }
            emvds.push((e.relation.clone(), EmvdStatement::new(names(&e.x)?, names(&e.y)?, scope)?));
        }

        Ok(Project {
            dir,
            manifest,
            schemas,
            keys,
            data,
            asserted,
            graphs,
            analysis,
            emvds,
        })
    }

    pub fn bounds(&self, max_universe: Option<usize>, max_statements: Option<usize>) -> ClosureBounds {
        let d = ClosureBounds::default();
        ClosureBounds {
            max_universe: max_universe.or(self.manifest.bounds.max_universe).unwrap_or(d.max_universe),
            max_statements: max_statements
                .or(self.manifest.bounds.max_statements)
                .unwrap_or(d.max_statements),
        }
    }

    /// Join steps with key classes taken from the entry or from declared
    /// foreign keys. A class refuted by the data is replaced by a general
    /// join.
    pub fn joins(&self) -> Result<Vec<ResolvedJoin>> {
        let mut out = Vec::new();
        for step in &self.manifest.join_order {
            let (l, r) = (&step[0], &step[1]);
            let (ls, rs) = (&self.schemas[l], &self.schemas[r]);
            let shared = ls.intersection(rs);
            let declared = match step.get(2) {
                Some(k) => serde_json::from_value(serde_json::Value::String(k.clone()))
                    .map_err(|_| Error::Parse(format!("unknown key class `{k}` in join_order")))?,
                None => self.infer_key_class(l, r, &shared),
            };
            let validated = match (self.data.get(l), self.data.get(r)) {
                (Some(ld), Some(rd)) if declared != KeyClass::General => {
                    let probe = JoinSpec::new(l.clone(), ls.clone(), r.clone(), rs.clone(), declared)?;
                    Some(validate_key_class(&probe, ld, rd)?)
                }
                _ => None,
            };
            let effective = if validated == Some(false) {
                KeyClass::General
            } else {
                declared
            };
            out.push(ResolvedJoin {
                spec: JoinSpec::new(l.clone(), ls.clone(), r.clone(), rs.clone(), effective)?,
                declared,
                validated,
            });
        }
        Ok(out)
    }

    fn infer_key_class(&self, l: &str, r: &str, shared: &AttrSet) -> KeyClass {
        let fk = |from: &str, to: &str| {
            self.manifest
                .foreign_keys
                .iter()
                .any(|f| f.from == from && f.to == to && f.attributes == *shared)
        };
        match (fk(l, r), fk(r, l)) {
            (true, true) => KeyClass::OneOne,
            (true, false) => KeyClass::ForeignKeyLeftToRight,
            (false, true) => KeyClass::ForeignKeyRightToLeft,
            (false, false) => KeyClass::General,
        }
    }

    /// Relations in the order they enter the join.
    pub fn join_sequence(&self) -> Vec<String> {
        let mut seq: Vec<String> = Vec::new();
        for step in &self.manifest.join_order {
            for n in &step[..2] {
                if !seq.contains(n) {
                    seq.push(n.clone());
                }
            }
        }
        if seq.is_empty() && self.schemas.len() == 1 {
            seq.extend(self.schemas.keys().cloned());
        }
        seq
    }

    /// The joined instance, or the single relation when no join is
    /// declared. Errors when a needed CSV is missing.
    pub fn materialize(&self) -> Result<Relation> {
        let seq = self.join_sequence();
        if seq.is_empty() {
            return Err(Error::Schema(if self.schemas.is_empty() {
                "the project declares no relations".to_owned()
            } else {
                "several relations but no join_order".to_owned()
            }));
        }
        let mut acc: Option<Relation> = None;
        for n in &seq {
            let r = self
                .data
                .get(n)
                .ok_or_else(|| Error::Schema(format!("relation `{n}` has no csv_path; instance data is required")))?;
            acc = Some(match acc {
                None => r.clone(),
                Some(a) => natural_join(&a, r),
            });
        }
        Ok(acc.expect("non-empty sequence"))
    }

    /// Whether every relation taking part in the join has data.
    pub fn has_all_data(&self) -> bool {
        let seq = self.join_sequence();
        !seq.is_empty() && seq.iter().all(|n| self.data.contains_key(n))
    }

    /// Base relations whose schema contains `attr`, in name order.
    pub fn holders(&self, attr: &str) -> BTreeSet<String> {
        self.schemas
            .iter()
            .filter(|(_, s)| s.contains(&attr.into()))
            .map(|(n, _)| n.clone())
            .collect()
    }
}
