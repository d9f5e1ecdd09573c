//! Command-line front end for `qsymkit`.
//!
//! [`run`] computes the whole report before anything is written, so output
//! does not depend on thread scheduling. Exit codes: 0 success, 1 domain
//! error or failed check, 2 malformed input.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qsymkit::classical::{
    classical_solutions, enumerate_graph_automorphisms, enumerate_metric_automorphisms, group_order_and_orbits, perms,
    PermutationSolution,
};
use qsymkit::continuum::{coefficient_relations, derive_conclusions, expand_isometry_relations, GeneratingSeries, SpaceKind};
use qsymkit::models::{cantor_witness_model, noncommutativity_witness, verify_model, MatrixModel, ModelFamily};
use qsymkit::ncstar::{abelianize, proves_commutator_zero, zero_one_solutions, Presentation, RelationSet, RewriteSystem};
use qsymkit::presentations::{
    cantor_level_presentation, cantor_limit_presentation, edge_orthogonality_presentation,
    magic_unitary_presentation, metric_commutation_presentation, qiso_quadratic_presentation,
    tree_diagram_presentation, CantorForm,
};
use qsymkit::rational::{fmt_q, parse_q};
use qsymkit::spaces::{graph_to_metric, laplacian, truncate, FiniteGraph, FiniteMetricSpace, TreeDiagram};
use qsymkit::{Error, RatMatrix};

#[derive(Parser, Debug)]
#[command(name = "qsymkit", version, about = "Presentations, oracles and matrix models for quantum symmetry groups")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Degree bound for rewriting-based checks.
    #[arg(long, global = true, default_value_t = 4)]
    pub degree_bound: usize,

    /// Largest vertex count accepted by the brute-force oracles.
    #[arg(long, global = true, default_value_t = 12)]
    pub size_cap: usize,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Laplacian of a finite metric space.
    Laplacian {
        #[arg(long)]
        metric: PathBuf,
    },
    /// Classical automorphisms of a metric space, graph or truncated tree.
    Aut(ObjectArgs),
    /// Build a presentation.
    Present(SourceArgs),
    /// Commutative quotient of a presentation.
    Abelianize(SourceArgs),
    /// All {0,1} points of the commutative quotient.
    Solve01(SourceArgs),
    /// Check a matrix model against a presentation.
    VerifyModel {
        /// Model file: {"dim": n, "assignment": {"name": [["a/b", ...], ...]}}.
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Search a model family for two non-commuting generators.
    Witness {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_enum, default_value_t = FamilyKind::TwoProjection)]
        family: FamilyKind,
        /// Slopes t of the rank-one projections onto (1, t), comma separated.
        #[arg(long, default_value = "0,1")]
        params: String,
        /// Largest number of 2x2 blocks per generator.
        #[arg(long, default_value_t = 2)]
        max_blocks: usize,
    },
    /// Cantor tower presentations and the level-2 witness.
    Cantor {
        /// Level of the tower.
        #[arg(long, conflicts_with = "limit")]
        level: Option<usize>,
        #[arg(long, value_enum, default_value_t = FormArg::Reduced)]
        form: FormArg,
        /// Depth of the limit presentation.
        #[arg(long)]
        limit: Option<usize>,
        /// Print the level-2 witness model instead of a presentation.
        #[arg(long, conflicts_with_all = ["level", "limit"])]
        witness: bool,
    },
    /// Coefficient relations for isometric coactions on [0,1] or the circle.
    Continuum {
        #[arg(long, value_enum)]
        space: SpaceArg,
        /// Series cutoff N.
        #[arg(long)]
        degree: usize,
    },
    /// Run the consistency checks available for an input object.
    Check(ObjectArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ObjectArgs {
    /// Metric space file: {"n": k, "sqdist": [["0", "1", ...], ...]}.
    #[arg(long, group = "object")]
    pub metric: Option<PathBuf>,
    /// Graph file: {"vertices": [...], "edges": [[a, b], ...], "directed": false}.
    #[arg(long, group = "object")]
    pub graph: Option<PathBuf>,
    /// Tree diagram file: {"levels": [1, ...], "parents": [[...], ...]}.
    #[arg(long, group = "object")]
    pub tree: Option<PathBuf>,
    /// Truncation level for trees (default: full depth).
    #[arg(long)]
    pub level: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct SourceArgs {
    /// Relation scheme; inferred from the input when omitted.
    #[arg(long, value_enum)]
    pub scheme: Option<Scheme>,
    #[command(flatten)]
    pub object: ObjectArgs,
    /// Size of a magic unitary, Cantor level or Cantor limit depth.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Magic,
    Commutation,
    Qiso,
    Edge,
    Tree,
    CantorRaw,
    CantorReduced,
    CantorLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Permutation,
    TwoProjection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Raw,
    Reduced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    Interval,
    Circle,
}

/// Outcome of a run: report text plus exit code.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Domain(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Domain(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Domain(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_parse() {
            CliError::Parse(e.to_string())
        } else {
            CliError::Domain(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn load_metric(path: &Path) -> CliResult<FiniteMetricSpace> {
    Ok(FiniteMetricSpace::from_json(&read(path)?)?)
}

fn load_graph(path: &Path) -> CliResult<FiniteGraph> {
    Ok(FiniteGraph::from_json(&read(path)?)?)
}

fn load_tree(path: &Path) -> CliResult<TreeDiagram> {
    Ok(TreeDiagram::from_json(&read(path)?)?)
}

enum Object {
    Metric(FiniteMetricSpace),
    Graph(FiniteGraph),
    Tree(TreeDiagram, usize),
}

fn load_object(a: &ObjectArgs) -> CliResult<Option<Object>> {
    Ok(match (&a.metric, &a.graph, &a.tree) {
        (Some(p), _, _) => Some(Object::Metric(load_metric(p)?)),
        (_, Some(p), _) => Some(Object::Graph(load_graph(p)?)),
        (_, _, Some(p)) => {
            let t = load_tree(p)?;
            let level = a.level.unwrap_or(t.depth());
            Some(Object::Tree(t, level))
        }
        _ => None,
    })
}

fn need_n(n: Option<usize>, scheme: &str) -> CliResult<usize> {
    n.ok_or_else(|| CliError::Domain(format!("scheme {scheme} needs --n")))
}

fn build(src: &SourceArgs) -> CliResult<Presentation> {
    let obj = load_object(&src.object)?;
    let scheme = match (src.scheme, &obj) {
        (Some(s), _) => s,
        (None, Some(Object::Metric(_))) => Scheme::Commutation,
        (None, Some(Object::Graph(_))) => Scheme::Edge,
        (None, Some(Object::Tree(..))) => Scheme::Tree,
        (None, None) => Scheme::Magic,
    };
    let metric_of = |obj: &Option<Object>| -> CliResult<FiniteMetricSpace> {
        match obj {
            Some(Object::Metric(x)) => Ok(x.clone()),
            Some(Object::Graph(g)) => Ok(graph_to_metric(g)?),
            _ => Err(CliError::Domain("this scheme needs --metric or --graph".into())),
        }
    };
    Ok(match scheme {
        Scheme::Magic => magic_unitary_presentation(need_n(src.n, "magic")?)?,
        Scheme::Commutation => metric_commutation_presentation(&metric_of(&obj)?),
        Scheme::Qiso => qiso_quadratic_presentation(&metric_of(&obj)?),
        Scheme::Edge => match &obj {
            Some(Object::Graph(g)) => edge_orthogonality_presentation(g)?,
            Some(Object::Tree(t, level)) => edge_orthogonality_presentation(&truncate(t, *level)?)?,
            _ => return Err(CliError::Domain("edge scheme needs --graph or --tree".into())),
        },
        Scheme::Tree => match &obj {
            Some(Object::Tree(t, level)) => tree_diagram_presentation(t, *level)?,
            _ => return Err(CliError::Domain("tree scheme needs --tree".into())),
        },
        Scheme::CantorRaw => cantor_level_presentation(need_n(src.n, "cantor-raw")?, CantorForm::Raw)?,
        Scheme::CantorReduced => cantor_level_presentation(need_n(src.n, "cantor-reduced")?, CantorForm::Reduced)?,
        Scheme::CantorLimit => cantor_limit_presentation(need_n(src.n, "cantor-limit")?)?,
    })
}

fn q_rows(m: &RatMatrix) -> Value {
    json!(m.rows().iter().map(|r| r.iter().map(fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn presentation_json(p: &Presentation) -> Value {
    let al = p.alphabet();
    json!({
        "builder": p.provenance.as_ref().map(|x| x.builder.clone()),
        "input": p.provenance.as_ref().map(|x| x.input_hash.clone()),
        "meta": p.meta.iter().map(|(k, v)| json!([k, v])).collect::<Vec<_>>(),
        "generators": al.symbols().iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
        "nonselfadjoint": al.symbols().iter().filter(|s| !s.selfadjoint).map(|s| s.name.clone()).collect::<Vec<_>>(),
        "blocks": p.blocks().iter().map(|b| json!({
            "label": b.label,
            "size": b.size,
            "entries": (0..b.size).map(|i| (0..b.size).map(|j| b.entry(i, j).to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "relations": relations_json(p.relations()),
    })
}

fn relations_json(r: &RelationSet) -> Value {
    json!(r.iter().map(|p| p.to_string()).collect::<Vec<_>>())
}

fn perm_lines(sols: &[PermutationSolution]) -> String {
    sols.iter().map(|s| format!("{}\n", s.one_line())).collect()
}

struct Report {
    text: String,
    json: Value,
    code: u8,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { text, json, code: 0 }
    }
}

/// Executes one subcommand and renders its report.
pub fn run(cfg: &RunConfig) -> CliResult<Outcome> {
    let report = dispatch(cfg)?;
    let stdout = match cfg.format {
        Format::Text => report.text,
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report.json).expect("serializable")),
    };
    Ok(Outcome {
        stdout,
        code: report.code,
    })
}

fn dispatch(cfg: &RunConfig) -> CliResult<Report> {
    match &cfg.command {
        Command::Laplacian { metric } => {
            let l = laplacian(&load_metric(metric)?)?;
            Ok(Report::ok(format!("{l}\n"), json!({ "laplacian": q_rows(&l) })))
        }
        Command::Aut(obj) => aut(obj, cfg.size_cap),
        Command::Present(src) => {
            let p = build(src)?;
            Ok(Report::ok(p.to_string(), presentation_json(&p)))
        }
        Command::Abelianize(src) => {
            let c = abelianize(&build(src)?);
            let json = json!({
                "variables": c.var_names(),
                "idempotent": c.var_names().iter().zip(c.idempotent()).filter(|(_, &i)| i).map(|(n, _)| n).collect::<Vec<_>>(),
                "text": c.to_string(),
            });
            Ok(Report::ok(c.to_string(), json))
        }
        Command::Solve01(src) => {
            let p = build(src)?;
            let c = abelianize(&p);
            let sols = zero_one_solutions(&c)?;
            let mut text = format!("variables {}\n", c.var_names().join(" "));
            for s in &sols {
                let line: Vec<String> = s.iter().map(|v| v.to_string()).collect();
                writeln!(text, "{}", line.join(" ")).unwrap();
            }
            writeln!(text, "solutions={}", sols.len()).unwrap();
            Ok(Report::ok(text, json!({ "variables": c.var_names(), "solutions": sols })))
        }
        Command::VerifyModel { model, source } => {
            let p = build(source)?;
            let m = MatrixModel::from_json(p.alphabet(), &read(model)?)?;
            let report = verify_model(&m, &p)?;
            let json = json!({
                "pass": report.passed(),
                "relations": report.residuals.iter().map(|r| json!({
                    "relation": r.relation.to_string(),
                    "zero": r.is_zero(),
                    "residual": q_rows(&r.residual),
                })).collect::<Vec<_>>(),
            });
            Ok(Report {
                text: report.to_string(),
                json,
                code: if report.passed() { 0 } else { 1 },
            })
        }
        Command::Witness {
            source,
            family,
            params,
            max_blocks,
        } => {
            let p = build(source)?;
            let fam = match family {
                FamilyKind::Permutation => ModelFamily::PermutationDiagonalSums,
                FamilyKind::TwoProjection => ModelFamily::TwoProjectionBlocks {
                    params: params.split(',').map(parse_q).collect::<qsymkit::Result<Vec<_>>>()?,
                    max_blocks: *max_blocks,
                },
            };
            witness_report(&p, &fam)
        }
        Command::Cantor {
            level,
            form,
            limit,
            witness,
        } => {
            if *witness {
                return cantor_witness_report(cfg.degree_bound);
            }
            let p = match (level, limit) {
                (_, Some(d)) => cantor_limit_presentation(*d)?,
                (Some(n), None) => cantor_level_presentation(
                    *n,
                    match form {
                        FormArg::Raw => CantorForm::Raw,
                        FormArg::Reduced => CantorForm::Reduced,
                    },
                )?,
                (None, None) => return Err(CliError::Domain("cantor needs --level, --limit or --witness".into())),
            };
            Ok(Report::ok(p.to_string(), presentation_json(&p)))
        }
        Command::Continuum { space, degree } => {
            let kind = match space {
                SpaceArg::Interval => SpaceKind::Interval,
                SpaceArg::Circle => SpaceKind::Circle,
            };
            let s = GeneratingSeries::new(kind, *degree)?;
            let before = expand_isometry_relations(&s);
            let after = derive_conclusions(&before, kind);
            let mut text = format!("# space={kind} N={degree}\n# coefficients\n");
            for ((j, k), r) in coefficient_relations(&s) {
                if !r.is_zero() {
                    writeln!(text, "[{j},{k}] {r} = 0").unwrap();
                }
            }
            writeln!(text, "# relations {}", before.len()).unwrap();
            text.push_str(&before.to_string());
            writeln!(text, "# conclusions {}", after.len()).unwrap();
            text.push_str(&after.to_string());
            let json = json!({
                "space": kind.to_string(),
                "degree": degree,
                "relations": relations_json(&before),
                "conclusions": relations_json(&after),
            });
            Ok(Report::ok(text, json))
        }
        Command::Check(obj) => check(obj, cfg),
    }
}

fn object_automorphisms(obj: &Object, cap: usize) -> CliResult<Vec<PermutationSolution>> {
    Ok(match obj {
        Object::Metric(x) => enumerate_metric_automorphisms(x, cap)?,
        Object::Graph(g) => enumerate_graph_automorphisms(g, cap)?,
        Object::Tree(t, level) => enumerate_graph_automorphisms(&truncate(t, *level)?, cap)?,
    })
}

fn aut(args: &ObjectArgs, cap: usize) -> CliResult<Report> {
    let obj = load_object(args)?.ok_or_else(|| CliError::Domain("aut needs --metric, --graph or --tree".into()))?;
    let sols = object_automorphisms(&obj, cap)?;
    let summary = group_order_and_orbits(&sols)?;
    let text = format!("{}order={}\n", perm_lines(&sols), summary.order);
    let json = json!({ "permutations": perms(&sols), "order": summary.order, "orbits": summary.orbits });
    Ok(Report::ok(text, json))
}

fn witness_report(p: &Presentation, fam: &ModelFamily) -> CliResult<Report> {
    let al = p.alphabet();
    Ok(match noncommutativity_witness(p, fam)? {
        Some(w) => {
            let (a, b) = (al.name(w.pair.0), al.name(w.pair.1));
            let comm = w.model.matrix(w.pair.0).commutator(w.model.matrix(w.pair.1));
            let text = format!("witness {a} {b}\n{}commutator = {comm}\n", w.model);
            let json = json!({
                "witness": [a, b],
                "dim": w.model.dim(),
                "assignment": al.symbols().iter().map(|s| json!([s.name, q_rows(w.model.matrix(s.id))])).collect::<Vec<_>>(),
                "commutator": q_rows(&comm),
            });
            Report::ok(text, json)
        }
        None => Report::ok("no witness found in family\n".into(), json!({ "witness": null })),
    })
}

fn cantor_witness_report(degree_bound: usize) -> CliResult<Report> {
    let p = cantor_level_presentation(2, CantorForm::Reduced)?;
    let m = cantor_witness_model();
    let report = verify_model(&m, &p)?;
    let al = p.alphabet();
    let (q1, q4) = (al.id("q1")?, al.id("q4")?);
    let comm = m.matrix(q1).commutator(m.matrix(q4));
    let verdict = proves_commutator_zero(q1, q4, &p, degree_bound)?;
    let found = noncommutativity_witness(&p, &ModelFamily::two_projection_default())?;
    let search = match &found {
        Some(w) => format!("{} {} (dim {})", al.name(w.pair.0), al.name(w.pair.1), w.model.dim()),
        None => "none".into(),
    };
    let mut text = m.to_string();
    writeln!(
        text,
        "verify: {} ({} relations)",
        if report.passed() { "pass" } else { "fail" },
        report.residuals.len()
    )
    .unwrap();
    writeln!(text, "commutator q1 q4 = {comm}").unwrap();
    writeln!(text, "rewriting q1 q4 - q4 q1 at degree {degree_bound}: {verdict:?}").unwrap();
    writeln!(text, "family search: {search}").unwrap();
    let json = json!({
        "pass": report.passed(),
        "commutator": q_rows(&comm),
        "rewriting": format!("{verdict:?}"),
        "search": search,
    });
    Ok(Report {
        text,
        json,
        code: if report.passed() { 0 } else { 1 },
    })
}

struct Checks {
    lines: Vec<(String, bool, String)>,
}

impl Checks {
    fn record(&mut self, name: &str, ok: bool, detail: String) {
        self.lines.push((name.to_string(), ok, detail));
    }
}

fn check(args: &ObjectArgs, cfg: &RunConfig) -> CliResult<Report> {
    let obj = load_object(args)?.ok_or_else(|| CliError::Domain("check needs --metric, --graph or --tree".into()))?;
    let mut c = Checks { lines: Vec::new() };
    let auts = object_automorphisms(&obj, cfg.size_cap)?;
    let group = group_order_and_orbits(&auts);
    c.record("group-closure", group.is_ok(), format!("order={}", auts.len()));
    match &obj {
        Object::Metric(x) => {
            if x.n() >= 2 {
                let l = laplacian(x)?;
                let rows_zero = l.row_sums().iter().all(|s| s == &Default::default());
                c.record("laplacian-row-sums", rows_zero, String::new());
                c.record("laplacian-symmetric", l.is_symmetric(), String::new());
                let commute = auts.iter().all(|s| {
                    let p = RatMatrix::permutation(&s.perm);
                    (&p * &l) == (&l * &p)
                });
                c.record("laplacian-commutes-with-isometries", commute, String::new());
            }
            let pc = metric_commutation_presentation(x);
            let pq = qiso_quadratic_presentation(x);
            let sc = classical_solutions(&pc)?;
            let sq = classical_solutions(&pq)?;
            c.record("commutation-vs-oracle", perms(&sc) == perms(&auts), format!("{}", sc.len()));
            c.record("qiso-vs-oracle", perms(&sq) == perms(&auts), format!("{}", sq.len()));
            if x.n() <= 3 {
                c.record(
                    "qiso-implied-by-commutation",
                    implied(&pq, &pc, cfg.degree_bound)?,
                    format!("degree {}", cfg.degree_bound),
                );
                c.record(
                    "commutation-implied-by-qiso",
                    implied(&pc, &pq, cfg.degree_bound)?,
                    format!("degree {}", cfg.degree_bound),
                );
            }
        }
        Object::Graph(g) => {
            let pe = edge_orthogonality_presentation(g)?;
            let se = classical_solutions(&pe)?;
            c.record("edge-scheme-vs-oracle", perms(&se) == perms(&auts), format!("{}", se.len()));
            let pm = metric_commutation_presentation(&graph_to_metric(g)?);
            let sm = classical_solutions(&pm)?;
            c.record("graph-metric-vs-oracle", perms(&sm) == perms(&auts), format!("{}", sm.len()));
        }
        Object::Tree(t, level) => {
            if *level >= 1 {
                let pt = tree_diagram_presentation(t, *level)?;
                let st = classical_solutions(&pt)?;
                let g = truncate(t, *level)?;
                let pe = edge_orthogonality_presentation(&g)?;
                let se = classical_solutions(&pe)?;
                let offset: usize = t.levels()[..*level].iter().sum();
                let restricted: std::collections::BTreeSet<Vec<usize>> = se
                    .iter()
                    .map(|s| s.perm[offset..].iter().map(|v| v - offset).collect())
                    .collect();
                let tree_perms: std::collections::BTreeSet<Vec<usize>> = perms(&st).into_iter().collect();
                c.record("tree-vs-edge-scheme", restricted == tree_perms, format!("{}", st.len()));
                c.record("edge-scheme-vs-oracle", perms(&se) == perms(&auts), format!("{}", se.len()));
            }
        }
    }
    let failed = c.lines.iter().filter(|l| !l.1).count();
    let mut text = String::new();
    for (name, ok, detail) in &c.lines {
        let status = if *ok { "PASS" } else { "FAIL" };
        if detail.is_empty() {
            writeln!(text, "{status} {name}").unwrap();
        } else {
            writeln!(text, "{status} {name} ({detail})").unwrap();
        }
    }
    writeln!(text, "checks passed={} failed={failed}", c.lines.len() - failed).unwrap();
    let json = json!({
        "checks": c.lines.iter().map(|(n, ok, d)| json!({"name": n, "pass": ok, "detail": d})).collect::<Vec<_>>(),
        "failed": failed,
    });
    Ok(Report {
        text,
        json,
        code: if failed == 0 { 0 } else { 1 },
    })
}

/// Every relation of `a` reduces to zero modulo `b`.
fn implied(a: &Presentation, b: &Presentation, bound: usize) -> CliResult<bool> {
    let mut sys = RewriteSystem::from_presentation(b);
    for r in a.relations().iter() {
        let r = r.rename_into(b.alphabet())?;
        if !sys.reduce(&r, bound)?.is_zero {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Applies `QSYMKIT_THREADS` to the global rayon pool.
pub fn configure_threads() {
    if let Some(n) = std::env::var("QSYMKIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}
