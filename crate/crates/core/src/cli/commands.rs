use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value as Json};

use super::manifest::{CutEntry, MatchingMethod, Project};
use super::table::render_table;
use crate::causal::{
    build_unit_table, cem, estimate_ate, exact_match, reduce_covariates_fk, validate_sutva_units, Coarsening,
    CoarseningSpec,
};
use crate::error::{Error, Result};
use crate::gaxioms::{closure, derivable, CiStatement, Mode};
use crate::joinprop::{
    audit_assertions, emvd_holds, infer_join_cis, is_key, semi_join_reduced, AuditPolicy, InferOptions, JoinSpec,
    KeyClass,
};
use crate::rational::{to_f64, to_fraction_string};
use crate::relcore::{validate_foreign_key, Attr, AttrSet, CiTester, Relation};
use crate::synth;
use crate::ugm::{union_imap, verify_map_on, MapKind, MapVerdict, UndirectedGraph, MAX_EXHAUSTIVE_VERTICES};

/// Settings shared by all subcommands.
#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub audit: bool,
    pub max_universe: Option<usize>,
    pub max_statements: Option<usize>,
    pub seed: u64,
}

/// What a subcommand produces: a JSON document, its table rendering, and
/// diagnostics for stderr.
#[derive(Clone, Debug)]
pub struct Report {
    pub json: Json,
    pub table: String,
    pub warnings: Vec<String>,
}

fn to_json<T: Serialize>(v: &T) -> Json {
    serde_json::to_value(v).expect("report types serialize")
}

fn key_class_name(k: KeyClass) -> String {
    to_json(&k).as_str().unwrap_or_default().to_owned()
}

fn yes_no(b: Option<bool>) -> String {
    match b {
        Some(true) => "pass".into(),
        Some(false) => "FAIL".into(),
        None => "-".into(),
    }
}

fn key_class_notes(p: &Project) -> Result<(Vec<JoinSpec>, Vec<String>)> {
    let mut notes = Vec::new();
    let mut specs = Vec::new();
    for j in p.joins()? {
        if j.validated == Some(false) {
            notes.push(format!(
                "{} ⋈ {}: declared {} does not hold on the data; treated as a general join",
                j.spec.left,
                j.spec.right,
                key_class_name(j.declared)
            ));
        }
        specs.push(j.spec);
    }
    Ok((specs, notes))
}

pub fn infer(p: &Project, o: &Options) -> Result<Report> {
    let (specs, mut notes) = key_class_notes(p)?;
    let opts = InferOptions {
        mode: p.manifest.mode,
        bounds: p.bounds(o.max_universe, o.max_statements),
    };
    let inf = infer_join_cis(&p.schemas, &p.asserted, &specs, &opts)?;
    notes.extend(inf.notes.iter().cloned());
    let mut warnings = Vec::new();

    let mut audit: Option<Vec<Option<bool>>> = None;
    let mut assertion_audit = None;
    if o.audit {
        let mut testers: BTreeMap<String, CiTester> = BTreeMap::new();
        if specs.is_empty() {
            for (n, r) in &p.data {
                testers.insert(n.clone(), CiTester::new(r));
            }
        } else if p.has_all_data() {
            testers.insert(crate::gaxioms::JOIN_CONTEXT.to_owned(), CiTester::new(&p.materialize()?));
        } else {
            notes.push("audit skipped for the join: some relations have no csv_path".into());
        }
        let col = inf
            .statements()
            .map(|s| testers.get(s.context()).map(|t| t.holds(s.x(), s.y(), s.z())).transpose())
            .collect::<Result<Vec<_>>>()?;
        for (s, ok) in inf.statements().zip(&col) {
            if *ok == Some(false) {
                warnings.push(format!("inferred statement `{s}` fails on the data"));
            }
        }
        audit = Some(col);
        let checks = audit_assertions(&p.asserted, &p.data, p.manifest.audit_policy)?;
        for c in checks.iter().filter(|c| c.holds == Some(false)) {
            warnings.push(format!("asserted statement `{}` is false on the data", c.statement));
        }
        assertion_audit = Some(checks);
    }

    let statements: Vec<Json> = inf
        .statements
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let mut v = to_json(d);
            if let Some(col) = &audit {
                v["audit"] = to_json(&col[i]);
            }
            v
        })
        .collect();
    let mut json = json!({
        "contexts": inf.contexts,
        "statements": statements,
        "notes": notes,
    });
    if let Some(a) = &assertion_audit {
        json["assertion_audit"] = to_json(a);
    }

    let mut headers = vec!["statement", "rules"];
    if audit.is_some() {
        headers.push("audit");
    }
    let rows: Vec<Vec<String>> = inf
        .statements
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let mut row = vec![
                d.statement.to_string(),
                d.rule_tags.iter().cloned().collect::<Vec<_>>().join(","),
            ];
            if let Some(col) = &audit {
                row.push(yes_no(col[i]));
            }
            row
        })
        .collect();
    let mut table = render_table(&headers, &rows);
    table.push_str(&format!("{} statements\n", inf.len()));
    for n in &notes {
        table.push_str(&format!("note: {n}\n"));
    }
    if let Some(a) = &assertion_audit {
        let failed = a.iter().filter(|c| c.holds == Some(false)).count();
        table.push_str(&format!("asserted statements refuted by data: {failed} of {}\n", a.len()));
    }
    Ok(Report { json, table, warnings })
}

pub fn closure_cmd(p: &Project, o: &Options, mode: Option<Mode>, goal: Option<&str>) -> Result<Report> {
    let mode = mode.unwrap_or(p.manifest.mode);
    let bounds = p.bounds(o.max_universe, o.max_statements);
    let mode_name = to_json(&mode);
    if let Some(goal) = goal {
        let goal: CiStatement = goal.parse()?;
        let d = derivable(&p.asserted, &goal, mode, &bounds)?;
        let mut table = format!("{goal}: {}\n", if d.derivable { "derivable" } else { "not derivable" });
        if let Some(t) = &d.trace {
            for (i, s) in t.steps.iter().enumerate() {
                let premises: Vec<String> = s.premises.iter().map(ToString::to_string).collect();
                table.push_str(&format!("  {}. {} from {} => {}\n", i + 1, s.axiom, premises.join(" ; "), s.conclusion));
            }
        }
        let json = json!({ "mode": mode_name, "goal": goal.to_string(), "derivable": d.derivable, "trace": d.trace });
        return Ok(Report {
            json,
            table,
            warnings: Vec::new(),
        });
    }
    let closed = closure(&p.asserted, mode, &bounds)?;
    let statements: Vec<&CiStatement> = closed.iter().collect();
    let mut table: String = statements.iter().map(|s| format!("{s}\n")).collect();
    table.push_str(&format!("{} statements ({} asserted)\n", closed.len(), p.asserted.len()));
    let json = json!({
        "mode": mode_name,
        "asserted": p.asserted.len(),
        "count": closed.len(),
        "statements": statements,
    });
    Ok(Report {
        json,
        table,
        warnings: Vec::new(),
    })
}

pub fn emvd(p: &Project, o: &Options) -> Result<Report> {
    let seq = p.join_sequence();
    let joined = seq.len() > 1;
    let reduced = if joined && p.has_all_data() {
        let rels: Vec<&Relation> = seq.iter().map(|n| &p.data[n]).collect();
        Some(semi_join_reduced(&rels)?)
    } else {
        None
    };
    let join = if joined && o.audit && p.has_all_data() {
        Some(p.materialize()?)
    } else {
        None
    };
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for (rel, e) in &p.emvds {
        let in_base = p.data.get(rel).map(|r| emvd_holds(r, e)).transpose()?;
        let in_join_sequence = seq.contains(rel);
        let propagates = match (in_base, reduced) {
            (Some(b), Some(s)) if joined && in_join_sequence => Some(b && s),
            _ => None,
        };
        let in_join = match &join {
            Some(j) if in_join_sequence => Some(emvd_holds(j, e)?),
            _ => None,
        };
        entries.push(json!({
            "relation": rel,
            "emvd": e.to_string(),
            "holds_in_base": in_base,
            "propagation_licensed": propagates,
            "holds_in_join": in_join,
        }));
        let licensed = match propagates {
            Some(true) => "yes",
            Some(false) => "no",
            None => "-",
        };
        rows.push(vec![format!("{e} @ {rel}"), yes_no(in_base), licensed.to_owned(), yes_no(in_join)]);
    }
    let mut table = render_table(&["emvd", "base", "licensed in join", "join audit"], &rows);
    table.push_str(&format!("semi-join reduced: {}\n", yes_no(reduced)));
    let mut warnings = Vec::new();
    if reduced == Some(false) {
        warnings.push("the relations are not semi-join reduced; base EMVDs need not hold in the join".into());
    }
    Ok(Report {
        json: json!({ "semi_join_reduced": reduced, "emvds": entries }),
        table,
        warnings,
    })
}

#[derive(Clone, Debug, Serialize)]
struct Check {
    check: &'static str,
    subject: String,
    status: &'static str,
    detail: String,
}

fn check(check: &'static str, subject: impl Into<String>, ok: Option<bool>, detail: impl Into<String>) -> Check {
    Check {
        check,
        subject: subject.into(),
        status: match ok {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "skipped",
        },
        detail: detail.into(),
    }
}

/// Never fails: problems, including an unreadable manifest, are listed.
pub fn validate(path: &Path) -> Report {
    let checks = match Project::load(path) {
        Ok(p) => validate_project(&p).unwrap_or_else(|e| vec![check("validation", "project", Some(false), e.to_string())]),
        Err(e) => vec![check("manifest", path.display().to_string(), Some(false), e.to_string())],
    };
    let failed = checks.iter().filter(|c| c.status == "fail").count();
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| vec![c.check.to_owned(), c.subject.clone(), c.status.to_owned(), c.detail.clone()])
        .collect();
    let mut table = render_table(&["check", "subject", "status", "detail"], &rows);
    table.push_str(&format!("{} checks, {failed} failed\n", checks.len()));
    Report {
        json: json!({ "valid": failed == 0, "failed": failed, "checks": checks }),
        table,
        warnings: Vec::new(),
    }
}

fn validate_project(p: &Project) -> Result<Vec<Check>> {
    let mut out = vec![check(
        "manifest",
        "project",
        Some(true),
        format!("{} relations, {} asserted statements", p.schemas.len(), p.asserted.len()),
    )];
    for (name, keys) in &p.keys {
        for k in keys {
            match p.data.get(name) {
                Some(r) => out.push(check("key", format!("{name}({k})"), Some(is_key(r, k)), "")),
                None => out.push(check("key", format!("{name}({k})"), None, "no instance data")),
            }
        }
    }
    for fk in &p.manifest.foreign_keys {
        let subject = format!("{}({}) → {}", fk.from, fk.attributes, fk.to);
        match (p.data.get(&fk.from), p.data.get(&fk.to)) {
            (Some(a), Some(b)) => {
                let ok = validate_foreign_key(a, b, &fk.attributes);
                let detail = if ok {
                    String::new()
                } else if !is_key(b, &fk.attributes) {
                    format!("{{{}}} is not a key of `{}`", fk.attributes, fk.to)
                } else {
                    format!("dangling values in `{}`", fk.from)
                };
                out.push(check("foreign_key", subject, Some(ok), detail));
            }
            _ => out.push(check("foreign_key", subject, None, "no instance data")),
        }
    }
    for j in p.joins()? {
        if j.declared == KeyClass::General {
            continue;
        }
        let subject = format!("{} ⋈ {}", j.spec.left, j.spec.right);
        let detail = key_class_name(j.declared);
        out.push(match j.validated {
            Some(ok) => check("join_key_class", subject, Some(ok), detail),
            None => check("join_key_class", subject, None, format!("{detail}: no instance data")),
        });
    }
    for c in audit_assertions(&p.asserted, &p.data, AuditPolicy::Warn)? {
        let detail = if c.holds.is_none() { "no instance data" } else { "" };
        out.push(check("assertion", c.statement.to_string(), c.holds, detail));
    }
    if let Some(a) = &p.analysis {
        out.push(sutva_check(p, &a.outcome)?);
    }
    Ok(out)
}

fn sutva_check(p: &Project, outcome: &str) -> Result<Check> {
    let seq = p.join_sequence();
    let Some(origin) = seq.iter().find(|n| p.schemas[*n].contains(&outcome.into())) else {
        return Ok(check("sutva", outcome, Some(false), format!("no joined relation holds the outcome `{outcome}`")));
    };
    let subject = format!("{outcome} @ {origin}");
    if seq.len() < 2 {
        return Ok(check("sutva", subject, Some(true), "no join; every unit is its own tuple"));
    }
    let Some(key) = p.keys[origin].first() else {
        return Ok(check("sutva", subject, None, format!("`{origin}` declares no key to identify outcome tuples")));
    };
    if !p.has_all_data() {
        return Ok(check("sutva", subject, None, "no instance data"));
    }
    let join = p.materialize()?;
    let report = validate_sutva_units(&join, &p.data[origin], &outcome.into(), key)?;
    let detail = report
        .violations
        .iter()
        .map(|v| format!("{}=({}) in {} joined rows", key, v.key.join(","), v.joined_rows))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(check("sutva", subject, Some(report.valid), detail))
}

pub fn ate(p: &Project, _o: &Options) -> Result<Report> {
    let a = p
        .analysis
        .as_ref()
        .ok_or_else(|| Error::Schema("the manifest has no `analysis` section".into()))?;
    let t = a.treatment.spec()?;
    let y = a.outcome.as_str().into();
    let x: AttrSet = a.covariates.iter().map(|s| Attr::from(s.as_str())).collect();
    let u = p.materialize()?;
    let units = build_unit_table(&u, &t, &y, &x)?;
    let groups = match a.matching.method {
        MatchingMethod::Exact => {
            if !a.matching.cutpoints.is_empty() {
                return Err(Error::Schema("cutpoints are only used with \"method\": \"cem\"".into()));
            }
            exact_match(&units, &x)?
        }
        MatchingMethod::Cem => {
            let mut spec = CoarseningSpec::identity();
            for (attr, c) in &a.matching.cutpoints {
                let rule = match c {
                    CutEntry::Map(m) => Coarsening::Map(m.clone()),
                    CutEntry::Points(pts) => {
                        let pts: Vec<String> = pts
                            .iter()
                            .map(|v| match v {
                                Json::String(s) => s.clone(),
                                other => other.to_string(),
                            })
                            .collect();
                        Coarsening::cutpoints(&pts.iter().map(String::as_str).collect::<Vec<_>>())?
                    }
                };
                spec = spec.with(attr.as_str(), rule);
            }
            cem(&units, &x, &spec)?
        }
    };
    let report = estimate_ate(&groups)?;

    let seq = p.join_sequence();
    let y_loc = seq.iter().find(|n| p.schemas[*n].contains(&y)).cloned().unwrap_or_default();
    let reduction = reduce_covariates_fk(&x, &p.schemas, &p.manifest.foreign_keys, &y_loc);

    let mut json = to_json(&report);
    json["treatment"] = json!(format!("{} {} {}", t.attribute, t.op, t.value));
    json["outcome"] = json!(a.outcome);
    json["covariates"] = to_json(&x);
    json["method"] = json!(match a.matching.method {
        MatchingMethod::Exact => "exact",
        MatchingMethod::Cem => "cem",
    });
    json["n_units"] = json!(units.len());
    json["n_treated"] = json!(units.treated_count());
    json["covariate_reduction"] = to_json(&reduction);

    let mut table = String::new();
    for w in &report.warnings {
        table.push_str(&format!("WARNING: {w}\n"));
    }
    table.push_str(&format!(
        "ATE = {} (≈ {:.6})\nunits {} (treated {}), matched {}, dropped {}, valid groups {}\n",
        to_fraction_string(&report.ate),
        to_f64(&report.ate),
        units.len(),
        units.treated_count(),
        report.n_matched,
        report.n_dropped,
        report.n_valid_groups
    ));
    if reduction.reduced {
        table.push_str(&format!("covariates reducible to {{{}}} without changing the estimate\n", reduction.covariates));
    }
    let rows: Vec<Vec<String>> = report
        .groups
        .iter()
        .map(|g| {
            vec![
                g.signature.join(","),
                g.n_treated.to_string(),
                g.n_control.to_string(),
                if g.valid { "yes" } else { "no" }.to_owned(),
                to_fraction_string(&g.weight),
                to_fraction_string(&g.effect),
            ]
        })
        .collect();
    table.push_str(&render_table(&["group", "treated", "control", "valid", "weight", "effect"], &rows));
    Ok(Report {
        json,
        table,
        warnings: report.warnings.clone(),
    })
}

fn verdict_line(label: &str, v: &MapVerdict) -> String {
    format!(
        "{label}: {} ({} triples checked, {} violations)\n",
        if v.holds { "holds" } else { "FAILS" },
        v.checked,
        v.violations
    )
}

fn verify(g: &UndirectedGraph, r: &Relation, kind: MapKind) -> Result<MapVerdict> {
    if g.vertex_count() > MAX_EXHAUSTIVE_VERTICES {
        return crate::ugm::verify_map(g, &CiTester::new(r), kind, Some(2));
    }
    verify_map_on(g, r, kind)
}

pub fn imap(p: &Project, o: &Options) -> Result<Report> {
    let (l, r) = match p.manifest.join_order.first() {
        Some(step) => (step[0].clone(), step[1].clone()),
        None => {
            let mut it = p.graphs.keys();
            match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => (a.clone(), b.clone()),
                _ => {
                    return Err(Error::Precondition(
                        "imap needs a join_order entry or exactly two graph files".into(),
                    ))
                }
            }
        }
    };
    let graph = |n: &str| {
        p.graphs
            .get(n)
            .ok_or_else(|| Error::Precondition(format!("no P-map graph file for `{n}`")))
    };
    let (g1, g2) = (graph(&l)?, graph(&r)?);
    let shared = g1.vertices().intersection(&g2.vertices());
    let d = match shared.iter().collect::<Vec<_>>().as_slice() {
        [d] => (*d).clone(),
        _ => {
            return Err(Error::Precondition(format!(
                "single shared vertex: `{l}` and `{r}` share {{{shared}}}"
            )))
        }
    };
    let u = union_imap(g1, g2, &d)?;

    let mut notes = Vec::new();
    let instances = match (p.data.get(&l), p.data.get(&r)) {
        (Some(a), Some(b)) => Some((a.clone(), b.clone(), "instance data".to_owned())),
        _ if o.audit => {
            let mut rng = synth::rng(o.seed);
            let a = synth::pmap_relation(&mut rng, &l, g1, 2, 200)?;
            let b = synth::pmap_relation(&mut rng, &r, g2, 2, 200)?;
            match (a, b) {
                (Some(a), Some(b)) => Some((a, b, format!("factor-generated data (seed {})", o.seed))),
                _ => {
                    notes.push("no perfect-map draw found for the generated data; verification skipped".to_owned());
                    None
                }
            }
        }
        _ => {
            notes.push("no instance data; pass --audit to verify on generated data".to_owned());
            None
        }
    };
    let mut verification = Json::Null;
    let mut summary = String::new();
    if let Some((a, b, source)) = instances {
        let v1 = verify(g1, &a, MapKind::PMap)?;
        let v2 = verify(g2, &b, MapKind::PMap)?;
        let vj = verify(&u, &crate::relcore::natural_join(&a, &b), MapKind::IMap)?;
        summary.push_str(&format!("verified on {source}\n"));
        summary.push_str(&verdict_line(&format!("G({l}) P-map of {l}"), &v1));
        summary.push_str(&verdict_line(&format!("G({r}) P-map of {r}"), &v2));
        summary.push_str(&verdict_line("union graph I-map of the join", &vj));
        if !v1.holds || !v2.holds {
            notes.push("a base graph is not a perfect map of its relation; the union guarantee does not apply".into());
        }
        verification = json!({ "source": source, "left_pmap": v1, "right_pmap": v2, "union_imap": vj });
    }
    let edges: Vec<[String; 2]> = u.edges().into_iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect();
    let dot = u.to_dot();
    let mut table = dot.clone();
    table.push_str(&summary);
    for n in &notes {
        table.push_str(&format!("note: {n}\n"));
    }
    Ok(Report {
        json: json!({
            "left": l,
            "right": r,
            "shared_vertex": d.to_string(),
            "vertices": u.vertices(),
            "edges": edges,
            "dot": dot,
            "verification": verification,
            "notes": notes,
        }),
        table,
        warnings: Vec::new(),
    })
}
