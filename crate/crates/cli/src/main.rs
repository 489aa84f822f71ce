//! `feedcent` command-line front end.
//!
//! Exit codes: 0 success, 1 domain error (parse, class violation, failed
//! precondition), 2 usage error (bad flags, unreadable or unwritable files).
//! Nothing is written to stdout or `--output` unless the command succeeds.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use feedcent::axioms::{
    check_axiom, default_measures, reference_pattern, satisfaction_matrix, AxiomId, Instance, MatrixConfig,
    DEFAULT_TOLERANCE,
};
use feedcent::centrality::{eigenvector_centrality, katz_centrality, katz_prestige, pagerank, residual};
use feedcent::classes::classify;
use feedcent::components::strongly_connected_components;
use feedcent::format::{format_groups, parse_graph, parse_groups};
use feedcent::process::{
    geometric_tail_bound, recursion_deviation, sum_series, ProcessKind, Recursion, Spread,
};
use feedcent::scalar::{format_significant, parse_rational};
use feedcent::spectral::principal_eigenvalue;
use feedcent::transforms::{
    ec_regularize, edge_compensation, edge_multiplication, euler_construct, groups_from_pairs,
    out_degree_normalize, proportional_combine, recombine, DEFAULT_CYCLE_CAP,
};
use feedcent::{CentralityVector, Error, ExactGraph, FloatGraph, Graph, GraphClass, Measure, NodeId, Scalar};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "feedcent", version, about = "Feedback centralities on directed weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one centrality measure.
    Centrality(CentralityArgs),
    /// Run a spread process and report its partial sums or Cesàro averages.
    Simulate(SimulateArgs),
    /// Run the axiom satisfaction matrix, or check one axiom on one instance.
    CheckAxioms(CheckArgs),
    /// Build the cycle graph of an out-regular strongly connected graph.
    EulerConstruct(EulerArgs),
    /// Apply a graph transformation and emit the resulting `.dg` graph.
    Transform(TransformArgs),
    /// Decide membership in a measure's admissible class.
    Classify(ClassifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Rational,
    Float,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureArg {
    Ev,
    Katz,
    Kp,
    Pr,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProcessArg {
    Distributed,
    Parallel,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    All,
    Kp,
    Ev,
    Katz,
}

#[derive(Args)]
struct Io {
    #[arg(long)]
    input: PathBuf,
    /// Write the result here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "float")]
    mode: Mode,
}

#[derive(Args)]
struct CentralityArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long, value_enum)]
    measure: MeasureArg,
    /// Decay factor for `katz` and `pr`; decimal or `p/q`.
    #[arg(long)]
    alpha: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long, value_enum)]
    process: ProcessArg,
    #[arg(long)]
    alpha: String,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Report `partial_sum / steps` instead of the partial sum.
    #[arg(long)]
    cesaro: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// Graph of a single instance; without it the full matrix runs.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Second graph for a single LOC instance.
    #[arg(long)]
    other: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "float")]
    mode: Mode,
    /// Measures to include (repeatable); all four by default.
    #[arg(long, value_enum)]
    measure: Vec<MeasureArg>,
    /// Axiom tags to include (repeatable): LOC ED NC NC-SOR NC-ANY EM EC BL CY.
    #[arg(long)]
    axiom: Vec<String>,
    #[arg(long)]
    katz_alpha: Option<String>,
    #[arg(long)]
    pagerank_alpha: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Admissible instances per cell.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    min_nodes: Option<usize>,
    #[arg(long)]
    max_nodes: Option<usize>,
    /// Directory for shrunk counterexamples of failing cells.
    #[arg(long)]
    witness_dir: Option<PathBuf>,
    /// Node `u` of a single instance (ED source, NC, EM, EC, BL).
    #[arg(long)]
    node: Option<String>,
    /// ED target or NC node `w` of a single instance.
    #[arg(long)]
    target: Option<String>,
    /// EM or EC factor `x` of a single instance.
    #[arg(long)]
    factor: Option<String>,
}

#[derive(Args)]
struct EulerArgs {
    #[arg(long)]
    input: PathBuf,
    /// Cycle graph destination.
    #[arg(long)]
    output: PathBuf,
    /// Sidecar grouping destination.
    #[arg(long)]
    groups: PathBuf,
    /// Refuse to build more than this many cycle nodes.
    #[arg(long, default_value_t = DEFAULT_CYCLE_CAP)]
    cap: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct TransformArgs {
    #[command(subcommand)]
    op: TransformOp,
}

#[derive(Subcommand)]
enum TransformOp {
    /// Recombine a cycle graph along a sidecar grouping.
    CombineGroups {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        groups: PathBuf,
        #[arg(long, value_enum, default_value = "kp")]
        measure: MeasureArg,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Divide every edge by its source's out-degree.
    Normalize {
        #[command(flatten)]
        io: Io,
    },
    /// Rescale a strongly connected graph into an out-regular one.
    EcRegularize {
        #[command(flatten)]
        io: Io,
    },
    /// Multiply the outgoing edges of a node.
    Em {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        node: String,
        #[arg(long)]
        factor: String,
    },
    /// Edge compensation at a node.
    Ec {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        node: String,
        #[arg(long)]
        factor: String,
    },
    /// Proportionally combine `node` into `into`.
    Combine {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        node: String,
        #[arg(long)]
        into: String,
        #[arg(long, value_enum)]
        measure: MeasureArg,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Reverse every edge.
    Opposite {
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    io: Io,
    #[arg(long, value_enum)]
    class: ClassArg,
    /// Decay factor for the Katz class.
    #[arg(long)]
    alpha: Option<String>,
}

enum Failure {
    Usage(String),
    Domain(String),
}

fn domain(e: impl Into<Error>) -> Failure {
    Failure::Domain(e.into().to_string())
}

type Outcome<T> = Result<T, Failure>;

/// A finished result: text plus where it goes.
struct Emit {
    path: Option<PathBuf>,
    text: String,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let echo = argv[1..].to_vec();
    let emits = match run(cli.command, echo) {
        Ok(e) => e,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    // Files first, so a write failure never leaves stdout half-done.
    for e in emits.iter().filter(|e| e.path.is_some()) {
        let path = e.path.as_ref().expect("filtered");
        if let Err(err) = fs::write(path, &e.text) {
            eprintln!("usage error: cannot write {}: {err}", path.display());
            return ExitCode::from(2);
        }
    }
    for e in emits.iter().filter(|e| e.path.is_none()) {
        print!("{}", e.text);
    }
    ExitCode::SUCCESS
}

fn run(command: Command, echo: Vec<String>) -> Outcome<Vec<Emit>> {
    let verb = echo.first().cloned().unwrap_or_default();
    let doc = |values: Value, values_full: Value, diagnostics: Value| {
        let mut m = Map::new();
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
        m.insert("command".into(), json!({ "verb": verb, "args": echo }));
        m.insert("values".into(), values);
        m.insert("values_full".into(), values_full);
        m.insert("diagnostics".into(), diagnostics);
        let mut text = serde_json::to_string_pretty(&Value::Object(m)).expect("serializable");
        text.push('\n');
        text
    };
    match command {
        Command::Centrality(a) => {
            let (values, full, diag) = match a.io.mode {
                Mode::Rational => centrality_doc::<feedcent::Rational>(&a)?,
                Mode::Float => centrality_doc::<f64>(&a)?,
            };
            Ok(vec![Emit { path: a.io.output.clone(), text: doc(values, full, diag) }])
        }
        Command::Simulate(a) => {
            let (values, full, diag) = match a.io.mode {
                Mode::Rational => simulate_doc::<feedcent::Rational>(&a)?,
                Mode::Float => simulate_doc::<f64>(&a)?,
            };
            Ok(vec![Emit { path: a.io.output.clone(), text: doc(values, full, diag) }])
        }
        Command::Classify(a) => {
            let (values, full, diag) = match a.io.mode {
                Mode::Rational => classify_doc::<feedcent::Rational>(&a)?,
                Mode::Float => classify_doc::<f64>(&a)?,
            };
            Ok(vec![Emit { path: a.io.output.clone(), text: doc(values, full, diag) }])
        }
        Command::CheckAxioms(a) => {
            let (values, full, diag, mut files) = if a.input.is_some() {
                let (v, f, d) = match a.mode {
                    Mode::Rational => single_check::<feedcent::Rational>(&a)?,
                    Mode::Float => single_check::<f64>(&a)?,
                };
                (v, f, d, Vec::new())
            } else {
                matrix_doc(&a)?
            };
            files.push(Emit { path: a.output.clone(), text: doc(values, full, diag) });
            Ok(files)
        }
        Command::EulerConstruct(a) => {
            let g = read_exact(&a.input)?;
            let syn = euler_construct(&g, a.cap).map_err(domain)?;
            let groups = syn.groups();
            let n = syn.cycle_graph.node_count();
            let mut values = Map::new();
            let mut sizes = Map::new();
            for grp in &groups {
                let share = feedcent::Rational::new((grp.members.len() as i64).into(), (n as i64).into());
                values.insert(grp.original.to_string(), json!(share.to_text()));
                sizes.insert(grp.original.to_string(), json!(grp.members.len()));
            }
            let walk: Vec<&str> = syn.euler_walk.iter().map(|&v| syn.original_ids[v].as_str()).collect();
            let diag = json!({
                "n": n,
                "group_sizes": sizes,
                "euler_walk": walk,
                "cycle_graph": a.output.display().to_string(),
                "groups": a.groups.display().to_string(),
            });
            let values = Value::Object(values);
            Ok(vec![
                Emit { path: Some(a.output.clone()), text: syn.cycle_graph.to_dg() },
                Emit { path: Some(a.groups.clone()), text: format_groups(&syn.sidecar_pairs()) },
                Emit { path: a.report.clone(), text: doc(values.clone(), values, diag) },
            ])
        }
        Command::Transform(t) => transform(t.op),
    }
}

fn read_text(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn read_exact(path: &Path) -> Outcome<ExactGraph> {
    parse_graph(&read_text(path)?).map_err(|e| Failure::Domain(format!("parse: {}: {e}", path.display())))
}

fn read_graph<W: Scalar>(path: &Path) -> Outcome<Graph<W>> {
    Ok(Graph::from_exact(&read_exact(path)?))
}

fn parse_number<W: Scalar>(flag: &str, text: &str) -> Outcome<W> {
    parse_rational(text)
        .map(|r| W::from_rational(&r))
        .map_err(|e| Failure::Usage(format!("--{flag}: {e}")))
}

fn parse_alpha<W: Scalar>(measure: MeasureArg, alpha: Option<&str>) -> Outcome<Option<W>> {
    match (measure, alpha) {
        (MeasureArg::Katz, None) => Err(Failure::Usage("--alpha is required for katz".into())),
        (MeasureArg::Pr, None) => Ok(Some(W::from_ratio(17, 20))),
        (MeasureArg::Katz | MeasureArg::Pr, Some(a)) => parse_number("alpha", a).map(Some),
        (_, Some(_)) => Err(Failure::Usage("--alpha only applies to katz and pr".into())),
        (_, None) => Ok(None),
    }
}

fn to_measure<W: Scalar>(m: MeasureArg, alpha: &Option<W>) -> Measure {
    let a = alpha.as_ref().map(Scalar::to_f64).unwrap_or(0.0);
    match m {
        MeasureArg::Ev => Measure::Eigenvector,
        MeasureArg::Katz => Measure::Katz(a),
        MeasureArg::Kp => Measure::KatzPrestige,
        MeasureArg::Pr => Measure::PageRank(a),
    }
}

fn solve_measure<W: Scalar>(g: &Graph<W>, m: MeasureArg, alpha: &Option<W>) -> Outcome<CentralityVector<W>> {
    let r = match (m, alpha) {
        (MeasureArg::Ev, _) => eigenvector_centrality(g),
        (MeasureArg::Kp, _) => katz_prestige(g),
        (MeasureArg::Katz, Some(a)) => katz_centrality(g, a),
        (MeasureArg::Pr, Some(a)) => pagerank(g, a),
        _ => unreachable!("alpha parsed for katz and pr"),
    };
    r.map_err(domain)
}

fn short<W: Scalar>(x: &W) -> Value {
    if W::EXACT {
        json!(x.to_text())
    } else {
        json!(format_significant(x.to_f64(), 6))
    }
}

fn full<W: Scalar>(x: &W) -> Value {
    if W::EXACT {
        json!(x.to_text())
    } else {
        serde_json::Number::from_f64(x.to_f64()).map(Value::Number).unwrap_or(Value::Null)
    }
}

fn per_node<W: Scalar>(ids: &[NodeId], xs: &[W], f: fn(&W) -> Value) -> Value {
    Value::Object(ids.iter().zip(xs).map(|(id, x)| (id.to_string(), f(x))).collect())
}

fn float_or_null(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn class_json<W: Scalar>(g: &Graph<W>, class: GraphClass) -> Value {
    match classify(g, class) {
        Ok(v) => json!({
            "class": class.to_string(),
            "member": v.member,
            "diagnostic": v.diagnostic,
        }),
        Err(e) => json!({ "class": class.to_string(), "member": Value::Null, "diagnostic": e.to_string() }),
    }
}

type Doc = (Value, Value, Value);

fn centrality_doc<W: Scalar>(a: &CentralityArgs) -> Outcome<Doc> {
    let alpha = parse_alpha::<W>(a.measure, a.alpha.as_deref())?;
    let g = read_graph::<W>(&a.io.input)?;
    let measure = to_measure(a.measure, &alpha);
    let cv = solve_measure(&g, a.measure, &alpha)?;
    let lambda = principal_eigenvalue(&g).map_err(domain)?;
    let diag = json!({
        "measure": measure.to_string(),
        "alpha": alpha.as_ref().map(|x| x.to_text()),
        "lambda": float_or_null(lambda),
        "residual": residual(&g, &cv).to_text(),
        "total": cv.total().to_text(),
        "class": class_json(&g, measure.class()),
    });
    Ok((per_node(&cv.ids, &cv.values, short), per_node(&cv.ids, &cv.values, full), diag))
}

fn simulate_doc<W: Scalar>(a: &SimulateArgs) -> Outcome<Doc> {
    let alpha = parse_number::<W>("alpha", &a.alpha)?;
    let g = read_graph::<W>(&a.io.input)?;
    let kind = match a.process {
        ProcessArg::Distributed => ProcessKind::distributed(alpha),
        ProcessArg::Parallel => ProcessKind::parallel(alpha),
    };
    if a.cesaro && a.steps == 0 {
        return Err(Failure::Usage("--cesaro needs --steps > 0".into()));
    }
    let acc = sum_series(&g, &kind, a.steps).map_err(domain)?;
    let (xs, recursion) = if a.cesaro {
        (acc.cesaro().expect("steps > 0"), Recursion::Cesaro)
    } else {
        (acc.partial_sum.clone(), Recursion::Series)
    };
    let mut diag = Map::new();
    diag.insert(
        "process".into(),
        json!(match kind.spread {
            Spread::Distributed => "DISTRIBUTED",
            Spread::Parallel => "PARALLEL",
        }),
    );
    diag.insert("alpha".into(), json!(kind.alpha.to_text()));
    diag.insert("steps".into(), json!(a.steps));
    diag.insert("statistic".into(), json!(if a.cesaro { "cesaro_average" } else { "partial_sum" }));
    diag.insert("last_total".into(), json!(acc.last.total().to_text()));
    diag.insert(
        "recursion_deviation".into(),
        json!(recursion_deviation(&g, &kind, &xs, recursion).to_text()),
    );
    if !a.cesaro {
        match geometric_tail_bound(&g, &kind, a.steps) {
            Ok(bound) => {
                let ids = g.ids();
                let m: Map<String, Value> =
                    ids.iter().zip(bound).map(|(id, b)| (id.to_string(), float_or_null(b))).collect();
                diag.insert("tail_bound".into(), Value::Object(m));
            }
            Err(e) => {
                diag.insert("tail_bound".into(), Value::Null);
                diag.insert("tail_bound_note".into(), json!(e.to_string()));
            }
        }
    }
    Ok((per_node(g.ids(), &xs, short), per_node(g.ids(), &xs, full), Value::Object(diag)))
}

fn classify_doc<W: Scalar>(a: &ClassifyArgs) -> Outcome<Doc> {
    let class = match (a.class, &a.alpha) {
        (ClassArg::All, None) => GraphClass::All,
        (ClassArg::Kp, None) => GraphClass::KatzPrestige,
        (ClassArg::Ev, None) => GraphClass::Eigenvector,
        (ClassArg::Katz, Some(t)) => GraphClass::Katz(parse_number::<f64>("alpha", t)?),
        (ClassArg::Katz, None) => return Err(Failure::Usage("--alpha is required for the katz class".into())),
        (_, Some(_)) => return Err(Failure::Usage("--alpha only applies to the katz class".into())),
    };
    let g = read_graph::<W>(&a.io.input)?;
    let verdict = classify(&g, class).map_err(domain)?;
    let partition = strongly_connected_components(&g);
    let comps: Map<String, Value> = g
        .ids()
        .iter()
        .enumerate()
        .map(|(v, id)| (id.to_string(), json!(partition.component_of[v])))
        .collect();
    let diag = json!({
        "class": class.to_string(),
        "member": verdict.member,
        "diagnostic": verdict.diagnostic,
        "lambda": verdict.lambda.map(float_or_null),
        "components": partition.len(),
    });
    let comps = Value::Object(comps);
    Ok((comps.clone(), comps, diag))
}

fn matrix_measures(a: &CheckArgs) -> Outcome<Vec<Measure>> {
    let katz = a.katz_alpha.as_deref().map(|t| parse_number::<f64>("katz-alpha", t)).transpose()?;
    let pr = a.pagerank_alpha.as_deref().map(|t| parse_number::<f64>("pagerank-alpha", t)).transpose()?;
    let defaults = default_measures();
    let pick = |m: MeasureArg| -> Measure {
        let d = defaults.iter().find(|d| d.short_name() == to_measure::<f64>(m, &None).short_name()).copied();
        match d.expect("all four defaults") {
            Measure::Katz(x) => Measure::Katz(katz.unwrap_or(x)),
            Measure::PageRank(x) => Measure::PageRank(pr.unwrap_or(x)),
            other => other,
        }
    };
    let chosen = if a.measure.is_empty() {
        vec![MeasureArg::Ev, MeasureArg::Katz, MeasureArg::Kp, MeasureArg::Pr]
    } else {
        a.measure.clone()
    };
    Ok(chosen.into_iter().map(pick).collect())
}

fn axiom_list(a: &CheckArgs) -> Outcome<Vec<AxiomId>> {
    if a.axiom.is_empty() {
        return Ok(AxiomId::ALL.to_vec());
    }
    a.axiom
        .iter()
        .map(|t| AxiomId::from_tag(t).ok_or_else(|| Failure::Usage(format!("unknown axiom `{t}`"))))
        .collect()
}

fn matrix_doc(a: &CheckArgs) -> Outcome<(Value, Value, Value, Vec<Emit>)> {
    if a.other.is_some() || a.node.is_some() || a.target.is_some() || a.factor.is_some() {
        return Err(Failure::Usage("instance flags need --input".into()));
    }
    if a.mode == Mode::Rational {
        return Err(Failure::Usage("the matrix runs in float mode".into()));
    }
    let measures = matrix_measures(a)?;
    let axioms = axiom_list(a)?;
    let d = MatrixConfig::default();
    let config = MatrixConfig {
        seed: a.seed.unwrap_or(d.seed),
        trials: a.trials.unwrap_or(d.trials),
        max_attempts: a.trials.map(|t| t * 10).unwrap_or(d.max_attempts),
        min_nodes: a.min_nodes.unwrap_or(d.min_nodes),
        max_nodes: a.max_nodes.unwrap_or(d.max_nodes),
        tolerance: a.tolerance.unwrap_or(d.tolerance),
    };
    if config.min_nodes < 2 || config.min_nodes > config.max_nodes {
        return Err(Failure::Usage("need 2 <= --min-nodes <= --max-nodes".into()));
    }
    let report = satisfaction_matrix(&measures, &axioms, &config).map_err(domain)?;
    let mut values = Map::new();
    let mut cells = Vec::new();
    let mut files = Vec::new();
    for c in &report.cells {
        let key = format!("{}/{}", c.measure, c.axiom);
        values.insert(key, json!(c.status.to_string()));
        let witness = c.witness.as_ref().map(|w| match &a.witness_dir {
            Some(dir) => {
                let name = format!("{}_{}.dg", c.measure.short_name(), c.axiom.tag().to_lowercase());
                let path = dir.join(name);
                files.push(Emit { path: Some(path.clone()), text: w.shrunk.clone() });
                json!({ "path": path.display().to_string(), "trial": w.seed, "max_deviation": float_or_null(w.max_deviation) })
            }
            None => json!({ "instance": w.shrunk, "trial": w.seed, "max_deviation": float_or_null(w.max_deviation) }),
        });
        cells.push(json!({
            "measure": c.measure.to_string(),
            "axiom": c.axiom.tag(),
            "status": c.status.to_string(),
            "expected": reference_pattern(&c.measure, c.axiom).map(|s| s.to_string()),
            "admissible": c.admissible,
            "skipped": c.skipped,
            "failures": c.failures,
            "max_deviation": float_or_null(c.max_deviation),
            "witness": witness,
        }));
    }
    let diag = json!({
        "seed": config.seed,
        "trials": config.trials,
        "tolerance": config.tolerance,
        "min_nodes": config.min_nodes,
        "max_nodes": config.max_nodes,
        "matches_reference": report.mismatches().is_empty(),
        "cells": cells,
    });
    let values = Value::Object(values);
    Ok((values.clone(), values, diag, files))
}

fn single_check<W: Scalar>(a: &CheckArgs) -> Outcome<Doc> {
    let measures = matrix_measures(a)?;
    let axioms = axiom_list(a)?;
    if measures.len() != 1 || axioms.len() != 1 || a.measure.len() != 1 {
        return Err(Failure::Usage("a single instance needs exactly one --measure and one --axiom".into()));
    }
    let (measure, axiom) = (measures[0], axioms[0]);
    let g = read_graph::<W>(a.input.as_ref().expect("checked by caller"))?;
    let need = |flag: &str, v: &Option<String>| -> Outcome<String> {
        v.clone().ok_or_else(|| Failure::Usage(format!("{axiom} needs --{flag}")))
    };
    let node_id = |v: String| NodeId::new(v).map_err(domain);
    let instance: Instance<W> = match axiom {
        AxiomId::Locality => {
            let h = read_graph::<W>(a.other.as_ref().ok_or_else(|| Failure::Usage("LOC needs --other".into()))?)?;
            Instance::Locality { g, h }
        }
        AxiomId::EdgeDeletion => Instance::EdgeDeletion {
            g,
            src: node_id(need("node", &a.node)?)?,
            dst: node_id(need("target", &a.target)?)?,
        },
        AxiomId::NodeCombination(_) => Instance::NodeCombination {
            g,
            u: node_id(need("node", &a.node)?)?,
            w: node_id(need("target", &a.target)?)?,
        },
        AxiomId::EdgeMultiplication => Instance::EdgeMultiplication {
            g,
            u: node_id(need("node", &a.node)?)?,
            x: parse_number("factor", &need("factor", &a.factor)?)?,
        },
        AxiomId::EdgeCompensation => Instance::EdgeCompensation {
            g,
            u: node_id(need("node", &a.node)?)?,
            x: parse_number("factor", &need("factor", &a.factor)?)?,
        },
        AxiomId::Baseline => Instance::Baseline { g, v: node_id(need("node", &a.node)?)? },
        AxiomId::Cycle => Instance::Cycle { g },
    };
    let v = check_axiom(axiom, &measure, &instance, a.tolerance.unwrap_or(DEFAULT_TOLERANCE)).map_err(domain)?;
    let status = if v.skipped() {
        "SKIPPED"
    } else if v.passed {
        "PASS"
    } else {
        "FAIL"
    };
    let key = format!("{measure}/{axiom}");
    let values = json!({ key: status });
    let diag = json!({
        "measure": measure.to_string(),
        "axiom": axiom.tag(),
        "status": status,
        "max_deviation": float_or_null(v.max_deviation),
        "tolerance": v.tolerance,
        "skipped_reason": v.skipped_reason,
    });
    Ok((values.clone(), values, diag))
}

fn transform(op: TransformOp) -> Outcome<Vec<Emit>> {
    let (io, text) = match op {
        TransformOp::CombineGroups { io, groups, measure, alpha } => {
            let text = match io.mode {
                Mode::Rational => combine_groups::<feedcent::Rational>(&io, &groups, measure, alpha.as_deref())?,
                Mode::Float => combine_groups::<f64>(&io, &groups, measure, alpha.as_deref())?,
            };
            (io, text)
        }
        TransformOp::Normalize { io } => {
            let text = match io.mode {
                Mode::Rational => out_degree_normalize(&read_graph::<feedcent::Rational>(&io.input)?).to_dg(),
                Mode::Float => out_degree_normalize(&read_graph::<f64>(&io.input)?).to_dg(),
            };
            (io, text)
        }
        TransformOp::EcRegularize { io } => {
            if io.mode == Mode::Rational {
                return Err(Failure::Domain("transforms: ec-regularize needs --mode float".into()));
            }
            let g: FloatGraph = read_graph(&io.input)?;
            let (out, _) = ec_regularize(&g).map_err(domain)?;
            (io, out.to_dg())
        }
        TransformOp::Em { io, node, factor } => {
            let text = match io.mode {
                Mode::Rational => scale_node::<feedcent::Rational>(&io, &node, &factor, true)?,
                Mode::Float => scale_node::<f64>(&io, &node, &factor, true)?,
            };
            (io, text)
        }
        TransformOp::Ec { io, node, factor } => {
            let text = match io.mode {
                Mode::Rational => scale_node::<feedcent::Rational>(&io, &node, &factor, false)?,
                Mode::Float => scale_node::<f64>(&io, &node, &factor, false)?,
            };
            (io, text)
        }
        TransformOp::Combine { io, node, into, measure, alpha } => {
            let text = match io.mode {
                Mode::Rational => combine_pair::<feedcent::Rational>(&io, &node, &into, measure, alpha.as_deref())?,
                Mode::Float => combine_pair::<f64>(&io, &node, &into, measure, alpha.as_deref())?,
            };
            (io, text)
        }
        TransformOp::Opposite { io } => {
            let text = read_exact(&io.input)?.opposite().to_dg();
            (io, text)
        }
    };
    Ok(vec![Emit { path: io.output, text }])
}

fn combine_groups<W: Scalar>(io: &Io, groups: &Path, m: MeasureArg, alpha: Option<&str>) -> Outcome<String> {
    let alpha = parse_alpha::<W>(m, alpha)?;
    let g = read_graph::<W>(&io.input)?;
    let pairs = parse_groups(&read_text(groups)?)
        .map_err(|e| Failure::Domain(format!("parse: {}: {e}", groups.display())))?;
    let grouping = groups_from_pairs(&g, &pairs).map_err(domain)?;
    let cv = solve_measure(&g, m, &alpha)?;
    let r = recombine(&g, &grouping, &cv).map_err(domain)?;
    Ok(r.graph.to_dg())
}

fn scale_node<W: Scalar>(io: &Io, node: &str, factor: &str, multiply: bool) -> Outcome<String> {
    let x = parse_number::<W>("factor", factor)?;
    let g = read_graph::<W>(&io.input)?;
    let u = g.require(node).map_err(domain)?;
    let out = if multiply {
        edge_multiplication(&g, u, &x)
    } else {
        edge_compensation(&g, u, &x)
    };
    Ok(out.map_err(domain)?.to_dg())
}

fn combine_pair<W: Scalar>(io: &Io, u: &str, w: &str, m: MeasureArg, alpha: Option<&str>) -> Outcome<String> {
    let alpha = parse_alpha::<W>(m, alpha)?;
    let g = read_graph::<W>(&io.input)?;
    let cv = solve_measure(&g, m, &alpha)?;
    Ok(proportional_combine(&g, &cv, u, w).map_err(domain)?.to_dg())
}
