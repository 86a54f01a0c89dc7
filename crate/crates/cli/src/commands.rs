//! Subcommand implementations. Each builds a [`Report`] holding both the
//! json result and the text lines.

use serde_json::{json, Map, Value};
use sheaf_core::corpus;
use sheaf_core::exactalg::FpGroup;
use sheaf_core::finspace::FiniteSpace;
use sheaf_core::godement::{flasque_witness, godement_resolution, is_flasque, lim_higher_oracle, sheaf_cohomology, Resolution};
use sheaf_core::sheaves::{check_sheaf_axioms, global_sections, minimal_open_cover, PresheafTable, Sheaf};
use sheaf_core::spectral::{
    acyclic_resolution_check, hypercohomology, spectral_sequence, stabilization_bound, AcyclicVerdict, Axis,
    DoubleComplex, SheafComplex, SpectralPages,
};

use crate::checks::CRITERIA;
use crate::error::{CliError, CliResult};
use crate::format::{canonical_string, num};
use crate::inputs::{ComplexInput, Inputs};

pub struct Report {
    pub command: &'static str,
    pub inputs: Inputs,
    pub result: Map<String, Value>,
    pub lines: Vec<String>,
}

impl Report {
    fn new(command: &'static str, inputs: Inputs) -> Report {
        Report { command, inputs, result: Map::new(), lines: Vec::new() }
    }

    fn set(&mut self, key: &str, value: Value) {
        self.result.insert(key.to_string(), value);
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn verdict(&mut self, v: bool) {
        self.set("verdict", json!(v));
        self.line(format!("verdict: {v}"));
    }
}

pub fn group_json(g: &FpGroup) -> Value {
    let inv = g.invariants();
    json!([inv.rank, inv.torsion.iter().map(num).collect::<Vec<_>>()])
}

fn groups_json(gs: &[FpGroup]) -> Value {
    Value::Array(gs.iter().map(group_json).collect())
}

fn groups_text(gs: &[FpGroup]) -> String {
    format!("({})", gs.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", "))
}

fn stalks_json(f: &Sheaf) -> Value {
    let x = f.space();
    Value::Object(x.points().map(|p| (x.name(p).to_string(), group_json(f.stalk(p)))).collect())
}

fn stalks_text(f: &Sheaf) -> String {
    let x = f.space();
    x.points().map(|p| format!("{}: {}", x.name(p), f.stalk(p))).collect::<Vec<_>>().join(", ")
}

fn open_json(x: &FiniteSpace, members: &[usize]) -> Value {
    json!(members.iter().map(|&p| x.name(p)).collect::<Vec<_>>())
}

fn space_summary(report: &mut Report, x: &FiniteSpace) {
    let covers: Vec<Value> = x.covers().iter().map(|&(lo, hi)| json!([x.name(lo), x.name(hi)])).collect();
    let closed: Vec<&str> = x.points().filter(|&p| x.is_closed_point(p)).map(|p| x.name(p)).collect();
    report.set(
        "space",
        json!({
            "points": x.names(),
            "covers": covers,
            "opens": x.count_opens().to_string(),
            "height": x.height(),
            "closed_points": closed,
        }),
    );
    report.line(format!("space: {} points, {} open sets, height {}", x.len(), x.count_opens(), x.height()));
    let pairs: Vec<String> = x.covers().iter().map(|&(lo, hi)| format!("{} < {}", x.name(lo), x.name(hi))).collect();
    report.line(format!("covers: {}", if pairs.is_empty() { "none".to_string() } else { pairs.join(", ") }));
}

pub fn check(mut inputs: Inputs, space: &str, sheaf: Option<&str>) -> CliResult<Report> {
    let (x, _) = inputs.space(space)?;
    let f = sheaf.map(|s| inputs.sheaf(Some(space), s)).transpose()?;
    let opens_cap = inputs.caps.opens;
    let mut report = Report::new("check", inputs);
    space_summary(&mut report, &x);
    let Some(f) = f else {
        report.verdict(true);
        return Ok(report);
    };
    report.set("stalks", stalks_json(&f));
    report.line(format!("stalks: {}", stalks_text(&f)));
    let table = PresheafTable::from_sheaf(&f, opens_cap)?;
    let mut rows = Vec::new();
    let mut all = true;
    for u in table.opens() {
        let cover = minimal_open_cover(&x, u);
        let rep = check_sheaf_axioms(&table, u, &cover)?;
        all &= rep.uniqueness && rep.gluing;
        rows.push(json!({
            "open": open_json(&x, u.members()),
            "cover": cover.iter().map(|c| open_json(&x, c.members())).collect::<Vec<_>>(),
            "uniqueness": rep.uniqueness,
            "gluing": rep.gluing,
            "ambiguity": group_json(&rep.ambiguity),
            "obstruction": group_json(&rep.obstruction),
        }));
        let mark = |ok: bool| if ok { "ok" } else { "FAILS" };
        report.line(format!(
            "open {}: uniqueness {}, gluing {}",
            x.describe(u),
            mark(rep.uniqueness),
            mark(rep.gluing)
        ));
    }
    report.set("axioms", Value::Array(rows));
    report.verdict(all);
    Ok(report)
}

pub fn cohomology(mut inputs: Inputs, space: Option<&str>, sheaf: &str, kmax: usize) -> CliResult<Report> {
    inputs.caps.check_degree(kmax)?;
    let f = inputs.sheaf(space, sheaf)?;
    let mut report = Report::new("cohomology", inputs);
    let groups = sheaf_cohomology(&f, kmax);
    let oracle = lim_higher_oracle(&f, kmax);
    let agrees = groups.iter().zip(&oracle).all(|(a, b)| a.invariants() == b.invariants());
    let h0 = groups[0].invariants() == global_sections(&f).group().invariants();
    report.set("max_degree", json!(kmax));
    report.set("groups", groups_json(&groups));
    report.set("oracle", groups_json(&oracle));
    report.set("oracle_agrees", json!(agrees));
    report.set("h0_equals_sections", json!(h0));
    for (k, g) in groups.iter().enumerate() {
        report.line(format!("H^{k} = {g}"));
    }
    report.line(format!("oracle: {}", groups_text(&oracle)));
    report.line(format!("oracle agrees: {agrees}"));
    report.line(format!("H^0 equals global sections: {h0}"));
    report.verdict(agrees && h0);
    Ok(report)
}

pub fn flasque(mut inputs: Inputs, space: Option<&str>, sheaf: &str) -> CliResult<Report> {
    let f = inputs.sheaf(space, sheaf)?;
    let cap = inputs.caps.opens;
    let mut report = Report::new("flasque", inputs);
    let witness = flasque_witness(&f, cap)?;
    let x = f.space();
    match &witness {
        Some(u) => {
            report.set("witness", open_json(x, u.members()));
            report.line(format!("global sections do not surject onto the sections over {}", x.describe(u)));
        }
        None => {
            report.set("witness", Value::Null);
            report.line("global sections surject onto the sections over every open set");
        }
    }
    report.verdict(witness.is_none());
    Ok(report)
}

fn page_grid_json(groups: &[Vec<FpGroup>]) -> Value {
    Value::Array(groups.iter().map(|col| groups_json(col)).collect())
}

/// Rows from the top `q` down, columns by `p`.
fn page_grid_text(groups: &[Vec<FpGroup>], indent: &str) -> Vec<String> {
    let qmax = groups.first().map_or(0, |c| c.len().saturating_sub(1));
    let cells: Vec<Vec<String>> = groups.iter().map(|c| c.iter().map(|g| g.to_string()).collect()).collect();
    let width = cells.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(1);
    (0..=qmax)
        .rev()
        .map(|q| {
            let row: Vec<String> = cells.iter().map(|c| format!("{:>width$}", c[q])).collect();
            format!("{indent}q={q} | {}", row.join("  "))
        })
        .collect()
}

fn pages_json(ss: &SpectralPages, upto: usize) -> Value {
    let pages: Vec<Value> = ss.pages[..=upto.min(ss.pages.len() - 1)]
        .iter()
        .map(|page| {
            let (dp, dq) = ss.bidegree(page.r);
            json!({ "r": page.r, "bidegree": [dp, dq], "groups": page_grid_json(&page.groups) })
        })
        .collect();
    json!({
        "axis": ss.axis.name(),
        "bound": ss.bound,
        "pages": pages,
        "einf": page_grid_json(&ss.einf),
        "graded_total": page_grid_json(&ss.graded_total),
        "total": groups_json(&ss.total),
        "extension_flags": ss.extension_flags,
        "degeneration_page": ss.degeneration_page(None),
        "recurrence_holds": ss.recurrence_failures().is_empty(),
        "differentials_well_formed": ss.differentials_well_formed(),
        "converges": ss.convergence_failures().is_empty(),
        "rank_sums_agree": ss.rank_sums_agree(),
    })
}

fn pages_text(report: &mut Report, ss: &SpectralPages, upto: usize) {
    report.line(format!("{} filtration, stable from E_{}", ss.axis.name(), ss.bound));
    for page in &ss.pages[..=upto.min(ss.pages.len() - 1)] {
        let (dp, dq) = ss.bidegree(page.r);
        report.line(format!("  E_{} (d_{} of bidegree ({dp}, {dq})):", page.r, page.r));
        for l in page_grid_text(&page.groups, "    ") {
            report.line(l);
        }
    }
    report.line("  E_inf:");
    for l in page_grid_text(&ss.einf, "    ") {
        report.line(l);
    }
    report.line(format!("  degenerates at E_{}", ss.degeneration_page(None)));
    let flags = if ss.extension_flags.is_empty() {
        "none".to_string()
    } else {
        ss.extension_flags.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ")
    };
    report.line(format!("  extension problems in degrees: {flags}"));
}

fn sequence_ok(ss: &SpectralPages) -> bool {
    ss.recurrence_failures().is_empty()
        && ss.differentials_well_formed()
        && ss.convergence_failures().is_empty()
        && ss.rank_sums_agree()
}

pub fn hyper(
    mut inputs: Inputs,
    space: Option<&str>,
    complex: &str,
    kmax: usize,
    pages: Option<usize>,
) -> CliResult<Report> {
    inputs.caps.check_degree(kmax)?;
    if let Some(r) = pages {
        inputs.caps.check_pages(r)?;
    }
    let l = match inputs.complex(space, complex, kmax)? {
        ComplexInput::Sheaves(l) => l,
        ComplexInput::Resolution(r) => SheafComplex::new(r.terms, r.differentials)?,
        ComplexInput::Double(_) => return Err(CliError::Usage("hyper needs a complex of sheaves".into())),
    };
    let x = l.term(0).space().clone();
    let mut report = Report::new("hyper", inputs);
    // the Godement double complex has kmax + 2 columns and one row per term
    report.inputs.caps.check_pages((kmax + 1).max(l.len() - 1) + 2)?;
    let h = hypercohomology(&x, &l, kmax)?;
    let upto = pages.unwrap_or(h.by_p.bound);
    report.set("max_degree", json!(kmax));
    report.set("groups", groups_json(&h.groups));
    for (k, g) in h.groups.iter().enumerate() {
        report.line(format!("H^{k} = {g}"));
    }
    report.set("by_p", pages_json(&h.by_p, upto));
    report.set("by_q", pages_json(&h.by_q, upto));
    pages_text(&mut report, &h.by_p, upto);
    pages_text(&mut report, &h.by_q, upto);
    report.verdict(sequence_ok(&h.by_p) && sequence_ok(&h.by_q));
    Ok(report)
}

pub fn ss(mut inputs: Inputs, complex: &str, axis: Axis, pages: Option<usize>) -> CliResult<Report> {
    if let Some(r) = pages {
        inputs.caps.check_pages(r)?;
    }
    let k: DoubleComplex = match inputs.complex(None, complex, 0)? {
        ComplexInput::Double(k) => k,
        _ => return Err(CliError::Usage("ss needs a double complex".into())),
    };
    let bound = stabilization_bound(&k);
    inputs.caps.check_pages(bound)?;
    let mut report = Report::new("ss", inputs);
    let ss = spectral_sequence(&k, axis, bound.max(pages.unwrap_or(0)))?;
    let upto = pages.unwrap_or(bound);
    report.set("pmax", json!(k.pmax()));
    report.set("qmax", json!(k.qmax()));
    report.line(format!("double complex with p <= {}, q <= {}", k.pmax(), k.qmax()));
    for (n, g) in ss.total.iter().enumerate() {
        report.line(format!("H_D^{n} = {g}"));
    }
    report.set("sequence", pages_json(&ss, upto));
    pages_text(&mut report, &ss, upto);
    report.verdict(sequence_ok(&ss));
    Ok(report)
}

pub fn resolve(mut inputs: Inputs, space: Option<&str>, sheaf: &str, kmax: usize) -> CliResult<Report> {
    inputs.caps.check_degree(kmax)?;
    let f = inputs.sheaf(space, sheaf)?;
    let cap = inputs.caps.opens;
    let mut report = Report::new("resolve", inputs);
    let res = godement_resolution(&f, kmax);
    let mut terms = Vec::new();
    for (k, t) in res.terms().iter().enumerate() {
        let flasque = is_flasque(t, cap)?;
        let gamma = global_sections(t);
        terms.push(json!({
            "degree": k,
            "stalks": stalks_json(t),
            "global_sections": group_json(gamma.group()),
            "flasque": flasque,
        }));
        report.line(format!("C^{k}: {}; sections {}; flasque {flasque}", stalks_text(t), gamma.group()));
    }
    let quotients: Vec<Value> = res.steps.iter().map(|s| stalks_json(&s.quotient)).collect();
    for (k, s) in res.steps.iter().enumerate() {
        report.line(format!("Q^{}: {}", k + 1, stalks_text(&s.quotient)));
    }
    let failures = res.resolution.exactness_failures()?;
    let x = f.space();
    report.set("max_degree", json!(kmax));
    report.set("terms", Value::Array(terms));
    report.set("quotients", Value::Array(quotients));
    report.set(
        "exactness_failures",
        json!(failures.iter().map(|&(k, p)| json!([k, x.name(p)])).collect::<Vec<_>>()),
    );
    report.line(format!("stalkwise exact: {}", failures.is_empty()));
    report.verdict(failures.is_empty());
    Ok(report)
}

fn verdict_json(v: &AcyclicVerdict) -> Value {
    match v {
        AcyclicVerdict::Isomorphic => json!({ "kind": "Isomorphic" }),
        AcyclicVerdict::NotAcyclic { term, degree } => json!({ "kind": "NotAcyclic", "term": term, "degree": degree }),
        AcyclicVerdict::Mismatch { degree } => json!({ "kind": "Mismatch", "degree": degree }),
    }
}

fn verdict_text(v: &AcyclicVerdict) -> String {
    match v {
        AcyclicVerdict::Isomorphic => "H^k(X, F) agrees with the cohomology of the global sections".into(),
        AcyclicVerdict::NotAcyclic { term, degree } => format!("term L^{term} is not acyclic: H^{degree} is nonzero"),
        AcyclicVerdict::Mismatch { degree } => format!("acyclic terms, yet the groups differ in degree {degree}"),
    }
}

pub fn acyclic_check(
    mut inputs: Inputs,
    space: Option<&str>,
    sheaf: Option<&str>,
    complex: Option<&str>,
    kmax: usize,
) -> CliResult<Report> {
    inputs.caps.check_degree(kmax)?;
    let r: Resolution = match (sheaf, complex) {
        (Some(s), None) => godement_resolution(&inputs.sheaf(space, s)?, kmax).resolution,
        (None, Some(c)) => match inputs.complex(space, c, kmax)? {
            ComplexInput::Resolution(r) => r,
            _ => return Err(CliError::Usage(format!("{c} is not a resolution"))),
        },
        _ => return Err(CliError::Usage("acyclic-check needs exactly one of --sheaf and --complex".into())),
    };
    let mut report = Report::new("acyclic-check", inputs);
    let rep = acyclic_resolution_check(&r, kmax)?;
    let terms: Vec<Value> = rep
        .terms
        .iter()
        .map(|t| json!({ "term": t.term, "cohomology": groups_json(&t.cohomology), "acyclic": t.acyclic() }))
        .collect();
    for t in &rep.terms {
        report.line(format!("L^{}: H^* = {}, acyclic {}", t.term, groups_text(&t.cohomology), t.acyclic()));
    }
    report.set("max_degree", json!(kmax));
    report.set("terms", Value::Array(terms));
    report.set("sections_cohomology", groups_json(&rep.sections_cohomology));
    report.set("sheaf_cohomology", groups_json(&rep.sheaf_cohomology));
    report.set("groups_agree", json!(rep.groups_agree));
    report.set("rows_concentrated", json!(rep.rows_concentrated));
    report.set("columns_concentrated", json!(rep.columns_concentrated));
    report.set("outcome", verdict_json(&rep.verdict));
    report.line(format!("h^k(L(X)) = {}", groups_text(&rep.sections_cohomology)));
    report.line(format!("H^k(X, F) = {}", groups_text(&rep.sheaf_cohomology)));
    report.line(format!("groups agree: {}", rep.groups_agree));
    report.line(verdict_text(&rep.verdict));
    report.verdict(rep.holds());
    Ok(report)
}

pub fn corpus_list(inputs: Inputs) -> CliResult<Report> {
    let mut report = Report::new("corpus list", inputs);
    let spaces: Vec<Value> = corpus::SPACES
        .iter()
        .map(|s| {
            let x = corpus::space(s).unwrap();
            report.line(format!("space {s}: {} points, {} open sets", x.len(), x.count_opens()));
            json!({ "name": s, "points": x.len(), "opens": x.count_opens().to_string() })
        })
        .collect();
    let sheaves: Vec<Value> = corpus::SHEAVES.iter().map(|(s, f)| json!([s, f])).collect();
    for (s, f) in corpus::SHEAVES {
        report.line(format!("sheaf {f} on {s}"));
    }
    for r in corpus::RESOLUTIONS {
        report.line(format!("resolution {r}"));
    }
    for k in corpus::DOUBLE_COMPLEXES {
        report.line(format!("double complex {k}"));
    }
    report.line("complexes single_<sheaf> and godement_<sheaf> on any space");
    report.set("spaces", Value::Array(spaces));
    report.set("sheaves", Value::Array(sheaves));
    report.set("resolutions", json!(corpus::RESOLUTIONS));
    report.set("double_complexes", json!(corpus::DOUBLE_COMPLEXES));
    report.set("complexes", json!(["single_<sheaf>", "godement_<sheaf>"]));
    Ok(report)
}

pub fn corpus_run(inputs: Inputs, criterion: Option<usize>) -> CliResult<Report> {
    let selected: Vec<_> = match criterion {
        Some(n) => {
            let c = CRITERIA
                .iter()
                .find(|c| c.number == n)
                .ok_or_else(|| CliError::Usage(format!("no criterion {n}; they run from 1 to {}", CRITERIA.len())))?;
            vec![c]
        }
        None => CRITERIA.iter().collect(),
    };
    let cap = inputs.caps.opens;
    let mut report = Report::new("corpus run", inputs);
    let mut rows = Vec::new();
    let mut all = true;
    for c in selected {
        let outcome = c.run(cap);
        all &= outcome.is_ok();
        let (pass, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        report.line(format!("criterion {:>2} {}  {}: {detail}", c.number, if pass { "PASS" } else { "FAIL" }, c.name));
        rows.push(json!({ "criterion": c.number, "name": c.name, "pass": pass, "detail": detail }));
    }
    report.set("criteria", Value::Array(rows));
    report.verdict(all);
    Ok(report)
}

/// The canonical document of a bundled space, sheaf or complex.
pub fn corpus_export(
    mut inputs: Inputs,
    space: Option<&str>,
    sheaf: Option<&str>,
    complex: Option<&str>,
    kmax: usize,
) -> CliResult<String> {
    let role = match (space, sheaf, complex) {
        (_, Some(_), Some(_)) => return Err(CliError::Usage("export takes one of --sheaf and --complex".into())),
        (_, Some(f), None) => {
            inputs.sheaf(space, f)?;
            "sheaf"
        }
        (_, None, Some(c)) => {
            inputs.complex(space, c, kmax)?;
            "complex"
        }
        (Some(x), None, None) => {
            inputs.space(x)?;
            "space"
        }
        (None, None, None) => return Err(CliError::Usage("nothing to export".into())),
    };
    let rec = inputs.records.iter().rev().find(|r| r.role == role).expect("input was recorded");
    Ok(canonical_string(&rec.canonical))
}
