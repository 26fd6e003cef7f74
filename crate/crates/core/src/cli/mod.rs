//! The `cubeset` command line: argument parsing, subcommand dispatch and output records.

pub mod record;
pub mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::census::{
    asymptotic_estimate, count_with, f_k, f_k_lower, lower_bound_assembly, ratio_table, sandwich,
    sap_sum, CountMethod, MAX_COUNT_DIMENSION, MAX_EXTENDED_DIMENSION,
};
use crate::combinatorics::{greedy_cover, CoverInstance};
use crate::containers::{container_pipeline, ContainerParams, PipelineRecord, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::graph::{build_hypercube, vertex_from_bits, Parity, RegularBipartiteGraph, Side};
use crate::graph_io::load_graph;
use crate::iso::{
    check_small_set_boundary, check_small_set_expansion, layer_ratio, min_ball_neighborhood,
    min_neighborhood, SearchMode,
};
use crate::vertex_set::Vertex;
use record::Record;
use verify::{container_sets, run_pipeline_sweep, verify_suite, Suite, SuiteConfig};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "cubeset",
    version,
    about = "Independent sets and graph containers on the hypercube"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: RunConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Exact number of independent sets of Q_d.
    Count,
    /// Sum of 2^-|N(A)| over small even A, the count sandwich, and f(k).
    Sum,
    /// Asymptotic estimate, lower-bound assembly and the ratio table.
    Bounds,
    /// Two-stage containers for each 2-linked A, one JSON line per set.
    Containers,
    /// Neighborhood minima, layer ratios and small-set expansion.
    Iso,
    /// Greedy cover of the even side by the odd side.
    Cover,
    /// Run an invariant suite.
    Verify,
    /// Validate a graph file, or Q_d, and report its parameters.
    GraphCheck,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct RunConfig {
    /// Dimension of the hypercube.
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Closure size |[A]| of the container family.
    #[arg(long, global = true)]
    pub a: Option<usize>,
    /// Neighborhood size |N(A)| of the container family.
    #[arg(long, global = true)]
    pub g: Option<usize>,
    /// Anchor vertex: a bit string of length d on Q_d, otherwise a decimal id.
    #[arg(long, global = true)]
    pub v: Option<String>,
    /// Degree threshold of the first approximation
    #[arg(long, global = true)]
    pub phi: Option<usize>,
    /// Degree threshold of the refinement
    #[arg(long, global = true)]
    pub psi: Option<usize>,
    /// Slack of the refinement; defaults to c / log2 d
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Constant in gamma
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// Constant in psi
    #[arg(long, global = true)]
    pub cprime: Option<f64>,
    /// Master seed for all randomized steps
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Redraws allowed per randomized construction
    #[arg(long, global = true)]
    pub max_retries: Option<u32>,
    /// exact (= split), split, pairs or branch.
    #[arg(long, global = true, value_parser = parse_method)]
    pub method: Option<CountMethod>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    #[serde(skip)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Worker threads for exhaustive sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub parallelism: usize,
    /// Invariant suite for `verify`
    #[arg(long, global = true, value_enum)]
    pub suite: Option<Suite>,
    /// Regular bipartite graph file used in place of Q_d.
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    /// Allow counting at d = 6.
    #[arg(long, global = true)]
    pub extended: bool,
    /// Leave timing fields out of the output.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub no_timing: bool,
    /// Random sets drawn where a sweep is not exhaustive.
    #[arg(long, global = true, default_value_t = 1000)]
    pub samples: usize,
    /// Enumeration budget.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Use the literal product index in the f(k) lower formula.
    #[arg(long, global = true)]
    pub literal: bool,
}

fn parse_method(s: &str) -> std::result::Result<CountMethod, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// What a subcommand produced.
struct Outcome {
    records: Vec<Value>,
    /// Header and rows for `--format csv`.
    table: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
    passed: bool,
}

impl Outcome {
    fn single(output: Value) -> Self {
        Outcome {
            records: vec![output],
            table: None,
            passed: true,
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        e if e.is_budget() => EXIT_BUDGET,
        Error::RandomizedFailure { .. } => EXIT_FAILED,
        _ => EXIT_USAGE,
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let start = Instant::now();
    let opts = &cli.opts;
    let outcome = match cli.command {
        Command::Count => count(opts)?,
        Command::Sum => sum(opts)?,
        Command::Bounds => bounds(opts)?,
        Command::Containers => containers(opts)?,
        Command::Iso => iso(opts)?,
        Command::Cover => cover(opts)?,
        Command::Verify => verify(opts)?,
        Command::GraphCheck => graph_check(opts)?,
    };
    if opts.format == Format::Csv && outcome.table.is_none() {
        return Err(Error::Domain(
            "csv output is only available for count, bounds, containers and iso".into(),
        ));
    }
    let elapsed = (!opts.no_timing).then(|| start.elapsed().as_secs_f64() * 1000.0);
    let sink: Box<dyn Write> = match &opts.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    match opts.format {
        Format::Json => {
            let inputs = serde_json::to_value(opts).expect("options serialize");
            for output in &outcome.records {
                let rec = Record {
                    schema_version: SCHEMA_VERSION,
                    subcommand: cli.command,
                    inputs: &inputs,
                    outputs: output,
                    elapsed_ms: elapsed,
                };
                serde_json::to_writer(&mut w, &rec).map_err(|e| Error::Io(e.to_string()))?;
                writeln!(w)?;
            }
        }
        Format::Csv => {
            let (header, rows) = outcome.table.as_ref().expect("checked above");
            writeln!(w, "{}", header.join(","))?;
            for row in rows {
                writeln!(
                    w,
                    "{}",
                    row.iter()
                        .map(|c| record::csv_field(c))
                        .collect::<Vec<_>>()
                        .join(",")
                )?;
            }
        }
        Format::Text => {
            for (i, output) in outcome.records.iter().enumerate() {
                if i > 0 {
                    writeln!(w)?;
                }
                record::write_text(&mut w, "", output)?;
            }
            if let Some(ms) = elapsed {
                writeln!(w, "elapsed_ms: {ms:.1}")?;
            }
        }
    }
    w.flush()?;
    Ok(if outcome.passed { EXIT_OK } else { EXIT_FAILED })
}

fn require_d(opts: &RunConfig) -> Result<usize> {
    opts.d
        .ok_or_else(|| Error::Domain("this subcommand needs --d".into()))
}

/// The loaded `--graph`, or `Q_d`.
fn host(opts: &RunConfig) -> Result<RegularBipartiteGraph> {
    match &opts.graph {
        Some(path) => load_graph(path),
        None => build_hypercube(require_d(opts)?),
    }
}

fn container_params(opts: &RunConfig, d: usize) -> Result<ContainerParams> {
    let mut p =
        ContainerParams::with_constants(d, opts.c.unwrap_or(1.0), opts.cprime.unwrap_or(1.0))?;
    p.phi = opts.phi.unwrap_or(p.phi);
    p.psi = opts.psi.unwrap_or(p.psi);
    p.gamma = opts.gamma.unwrap_or(p.gamma);
    p.max_retries = opts.max_retries.unwrap_or(p.max_retries);
    p.seed = opts.seed;
    p.validate(d)?;
    Ok(p)
}

fn parse_vertex(g: &RegularBipartiteGraph, s: &str) -> Result<Vertex> {
    let is_bits = s.len() == g.degree() && s.chars().all(|c| c == '0' || c == '1');
    let v = if g.is_hypercube() && is_bits {
        vertex_from_bits(s)?
    } else {
        s.parse::<u32>()
            .map(Vertex)
            .map_err(|_| Error::Domain(format!("bad vertex {s:?}")))?
    };
    if v.index() >= g.vertex_count() {
        return Err(Error::Domain(format!("vertex {v} outside the graph")));
    }
    Ok(v)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("records serialize to JSON")
}

fn count(opts: &RunConfig) -> Result<Outcome> {
    let d = require_d(opts)?;
    let method = opts.method.unwrap_or_default();
    let n = count_with(d, method, opts.extended, opts.parallelism)?;
    let output = json!({ "d": d, "method": method, "count": n.to_string() });
    let row = vec![
        d.to_string(),
        to_value(&method).as_str().unwrap_or_default().to_owned(),
        n.to_string(),
    ];
    Ok(Outcome {
        table: Some((vec!["d", "method", "count"], vec![row])),
        ..Outcome::single(output)
    })
}

fn sum(opts: &RunConfig) -> Result<Outcome> {
    let d = require_d(opts)?;
    let s = sap_sum(d)?;
    let mut output = json!({ "d": d, "sum": s, "sum_approx": s.to_f64() });
    let map = output.as_object_mut().expect("object literal");
    if d >= 2 {
        map.insert("sandwich".into(), to_value(&sandwich(d)?));
    }
    let fk: Vec<Value> = (0..=4)
        .map(|k| {
            let exact = f_k(d, k, opts.budget)?;
            let lower = f_k_lower(d, k, opts.literal);
            Ok(json!({ "k": k, "exact": exact.to_string(), "lower": lower.to_string() }))
        })
        .collect::<Result<_>>()?;
    map.insert("f_k".into(), Value::Array(fk));
    Ok(Outcome::single(output))
}

fn bounds(opts: &RunConfig) -> Result<Outcome> {
    let d = require_d(opts)?;
    let mut output = Map::new();
    output.insert("d".into(), json!(d));
    output.insert("asymptote_log2".into(), to_value(&asymptotic_estimate(d)?));
    if d <= 30 {
        output.insert("lower_bound".into(), to_value(&lower_bound_assembly(d)?));
    }
    let top = d.min(if opts.extended {
        MAX_EXTENDED_DIMENSION
    } else {
        MAX_COUNT_DIMENSION
    });
    let table = ratio_table(top, opts.extended, opts.parallelism)?;
    let rows = table
        .iter()
        .map(|r| {
            vec![
                r.d.to_string(),
                r.count.to_string(),
                r.asymptote.to_decimal(20),
                format!("{:.12}", r.ratio),
            ]
        })
        .collect();
    output.insert("ratio_table".into(), to_value(&table));
    Ok(Outcome {
        table: Some((vec!["d", "count", "asymptote_log2", "ratio"], rows)),
        ..Outcome::single(Value::Object(output))
    })
}

fn pipeline_row(r: &PipelineRecord) -> Vec<String> {
    let ids = r
        .set
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    vec![
        ids,
        r.a.to_string(),
        r.g.to_string(),
        r.t.to_string(),
        r.v.to_string(),
        r.fprime.count().to_string(),
        r.f.count().to_string(),
        r.s.count().to_string(),
        r.seed.to_string(),
        r.phi_valid.to_string(),
        r.psi.is_valid().to_string(),
        r.psi.size_bound.to_string(),
        r.step1.to_string(),
        r.step2.to_string(),
        r.reconstructed.to_string(),
    ]
}

const PIPELINE_HEADER: [&str; 15] = [
    "A",
    "a",
    "g",
    "t",
    "v",
    "fprime",
    "f",
    "s",
    "seed",
    "phi_valid",
    "psi_valid",
    "size_bound",
    "step1",
    "step2",
    "reconstructed",
];

fn containers(opts: &RunConfig) -> Result<Outcome> {
    let g = host(opts)?;
    let params = container_params(opts, g.degree())?;
    let (records, summary) = match (opts.a, opts.g, &opts.v) {
        (Some(a), Some(gs), Some(v)) => {
            let v = parse_vertex(&g, v)?;
            let mut report = container_pipeline(&g, a, gs, v, &params, opts.budget)?;
            let records = std::mem::take(&mut report.records);
            let mut summary = to_value(&report);
            let map = summary.as_object_mut().expect("report is an object");
            map.remove("records");
            map.insert("coverage".into(), json!(report.coverage()));
            map.insert("passed".into(), json!(report.passed()));
            (records, summary)
        }
        (None, None, None) => {
            let cfg = SuiteConfig {
                samples: opts.samples,
                budget: opts.budget,
                ..SuiteConfig::new(params.clone())
            };
            let sets = container_sets(&g, &cfg)?;
            let records = run_pipeline_sweep(&g, &sets, &params, opts.parallelism, opts.budget)?;
            let failures: Vec<_> = records.iter().filter(|r| !r.ok()).map(|r| &r.set).collect();
            let covered = records.iter().filter(|r| r.reconstructed).count();
            let summary = json!({
                "sets": records.len(),
                "exhaustive": g.class_x().count() <= 8,
                "covered": covered,
                "coverage": if records.is_empty() { 1.0 } else { covered as f64 / records.len() as f64 },
                "failures": failures,
                "passed": failures.is_empty(),
            });
            (records, summary)
        }
        _ => return Err(Error::Domain("--a, --g and --v go together".into())),
    };
    let passed = summary["passed"].as_bool().unwrap_or(false);
    let rows = records.iter().map(pipeline_row).collect();
    let mut out: Vec<Value> = records
        .iter()
        .map(|r| {
            let mut v = to_value(r);
            v.as_object_mut()
                .expect("record is an object")
                .insert("kind".into(), json!("set"));
            v
        })
        .collect();
    let mut summary = summary;
    let map = summary.as_object_mut().expect("summary is an object");
    map.insert("kind".into(), json!("summary"));
    map.insert("params".into(), to_value(&params));
    out.push(summary);
    Ok(Outcome {
        records: out,
        table: Some((PIPELINE_HEADER.to_vec(), rows)),
        passed,
    })
}

fn iso(opts: &RunConfig) -> Result<Outcome> {
    let d = require_d(opts)?;
    let mut output = Map::new();
    let mut passed = true;
    output.insert("d".into(), json!(d));
    if d <= 5 {
        let minima: Vec<Value> = (1..=1usize << (d - 1))
            .map(|size| {
                let exact = min_neighborhood(d, Parity::Even, size, SearchMode::Exhaustive)?;
                let ball = min_ball_neighborhood(d, Parity::Even, size)?;
                passed &= exact.min_neighborhood == ball;
                Ok(json!({ "size": size, "min_neighborhood": exact.min_neighborhood, "ball_minimum": ball, "minimizer": exact.minimizer }))
            })
            .collect::<Result<_>>()?;
        output.insert("min_neighborhood".into(), Value::Array(minima));
    }
    if (2..=5).contains(&d) {
        let report = check_small_set_boundary(d)?;
        passed &= report.positive && report.third_when_low_radius;
        output.insert("small_set_boundary".into(), to_value(&report));
    }
    if d <= 12 {
        let exp = check_small_set_expansion(d, d, opts.samples, opts.seed)?;
        passed &= exp.holds.unwrap_or(true);
        output.insert("expansion".into(), to_value(&exp));
    }
    let layers = (0..=d / 2)
        .map(|i| layer_ratio(d, i))
        .collect::<Result<Vec<_>>>()?;
    passed &= layers.iter().all(|l| l.holds());
    let rows = layers
        .iter()
        .map(|l| {
            let show =
                |r: Option<num_rational::Rational64>| r.map_or("inf".to_owned(), |r| r.to_string());
            vec![
                l.d.to_string(),
                l.i.to_string(),
                l.layer_size.to_string(),
                l.upper_size.to_string(),
                show(l.observed),
                show(l.bound),
                l.holds().to_string(),
            ]
        })
        .collect();
    output.insert("layer_ratios".into(), to_value(&layers));
    output.insert("passed".into(), json!(passed));
    Ok(Outcome {
        records: vec![Value::Object(output)],
        table: Some((
            vec![
                "d",
                "i",
                "layer_size",
                "upper_size",
                "observed",
                "bound",
                "holds",
            ],
            rows,
        )),
        passed,
    })
}

fn cover(opts: &RunConfig) -> Result<Outcome> {
    let g = host(opts)?;
    let (inst, _, q_ids) = CoverInstance::from_graph(&g, g.class(Side::X), g.class(Side::Y));
    let c = greedy_cover(&inst)?;
    let chosen = g.set_of(c.chosen.iter().map(|i| q_ids[i.index()]));
    let within = c.bound.is_some_and(|b| chosen.count() as f64 <= b);
    let output = json!({
        "p_count": inst.p_count(),
        "q_count": inst.q_count(),
        "size": chosen.count(),
        "min_degree_p": c.min_degree_p,
        "max_degree_q": c.max_degree_q,
        "bound": c.bound,
        "within_bound": within,
        "chosen": chosen,
    });
    Ok(Outcome {
        passed: within,
        ..Outcome::single(output)
    })
}

fn verify(opts: &RunConfig) -> Result<Outcome> {
    let suite = opts
        .suite
        .ok_or_else(|| Error::Domain("verify needs --suite".into()))?;
    let graph = opts.graph.as_ref().map(load_graph).transpose()?;
    let d = match (&graph, opts.d) {
        (_, Some(d)) => d,
        (Some(g), None) => g.degree(),
        (None, None) => return Err(Error::Domain("verify needs --d or --graph".into())),
    };
    let params = container_params(
        opts,
        graph.as_ref().map_or(d, RegularBipartiteGraph::degree),
    )?;
    let cfg = SuiteConfig {
        samples: opts.samples,
        parallelism: opts.parallelism,
        budget: opts.budget,
        graph,
        ..SuiteConfig::new(params)
    };
    let report = verify_suite(suite, d, &cfg)?;
    let passed = report.passed;
    let mut output = to_value(&report);
    output
        .as_object_mut()
        .expect("report is an object")
        .insert("seed".into(), json!(opts.seed));
    Ok(Outcome {
        passed,
        ..Outcome::single(output)
    })
}

fn graph_check(opts: &RunConfig) -> Result<Outcome> {
    let loaded = match &opts.graph {
        Some(path) => load_graph(path),
        None => build_hypercube(require_d(opts)?),
    };
    let g = match loaded {
        Ok(g) => g,
        Err(e @ (Error::Parse { .. } | Error::Regularity { .. } | Error::Bipartiteness { .. })) => {
            let output = json!({ "valid": false, "error": e.to_string() });
            return Ok(Outcome {
                passed: false,
                ..Outcome::single(output)
            });
        }
        Err(e) => return Err(e),
    };
    g.validate()?;
    let output = json!({
        "valid": true,
        "hypercube": g.is_hypercube(),
        "degree": g.degree(),
        "n_x": g.class_x().count(),
        "n_y": g.class_y().count(),
        "edges": g.edge_count(),
        "co_degree": g.co_degree(),
    });
    Ok(Outcome::single(output))
}
