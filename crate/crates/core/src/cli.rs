//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::constraints::{Source, VarClass};
use crate::netmodel::NetworkModel;
use crate::pipeline::{links_json, stats_json, CompileError, Compiled, DEFAULT_SCALE};
use crate::qubo::{ModelMetrics, QuboModel};
use crate::solve::{
    brute::DEFAULT_MAX_VARS, brute_force_qubo, exhaustive_optimum, open_links, simulated_annealing, AnnealParams,
    SolveResult,
};
use crate::validate::{equivalence_suite, ValidateOptions};

pub const EXIT_OTHER: u8 = 1;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_INFEASIBLE: u8 = 4;
pub const EXIT_VALIDATION: u8 = 5;

#[derive(Debug, Parser)]
#[command(name = "gridqubo", version, about = "Minimum-loss grid reconfiguration as a QUBO model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exhaustive,
    Sa,
    Brute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Qubo,
    Lp,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a network into a model file plus metrics.
    Build {
        /// Network JSON file or `builtin:baran-wu-33`.
        #[arg(long, visible_alias = "network")]
        input: String,
        #[arg(long, default_value_t = DEFAULT_SCALE)]
        scale: f64,
        /// Model JSON path; metrics and histogram are written next to it.
        #[arg(long, default_value = "model.json")]
        out: PathBuf,
    },
    /// Print the reduction, cycle basis and variable census of a network.
    Inspect {
        #[arg(long, visible_alias = "network")]
        input: String,
        /// Also write the constraint list as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a network (any method) or a model file (`sa`, `brute`).
    Solve {
        /// Network JSON, `builtin:…`, or a model JSON written by `build`.
        #[arg(long)]
        input: String,
        /// Network used to decode a model-file input.
        #[arg(long)]
        network: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::Exhaustive)]
        method: Method,
        #[arg(long, default_value_t = DEFAULT_SCALE)]
        scale: f64,
        #[arg(long, default_value_t = 20_000)]
        sweeps: usize,
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Starting temperature (default: largest absolute coefficient).
        #[arg(long)]
        t_start: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        t_end: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_VARS)]
        max_brute_vars: usize,
        /// Solution JSON path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the equivalence suite over every spanning tree.
    Validate {
        #[arg(long, visible_alias = "network")]
        input: String,
        /// Check this model file instead of the freshly compiled one.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SCALE)]
        scale: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_VARS)]
        max_brute_vars: usize,
    },
    /// Write a model (or a compiled network) in another format.
    Export {
        #[arg(long)]
        input: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_SCALE)]
        scale: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub error: anyhow::Error,
}

impl CliError {
    fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        CliError { code, error: error.into() }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(error: anyhow::Error) -> Self {
        CliError { code: EXIT_OTHER, error }
    }
}

impl From<CompileError> for CliError {
    fn from(e: CompileError) -> Self {
        let code = match e {
            CompileError::Qubo(_) => EXIT_INPUT,
            CompileError::Topology(_) => EXIT_OTHER,
        };
        CliError::new(code, e)
    }
}

type CliResult = Result<(), CliError>;

const BUILTIN_PREFIX: &str = "builtin:";

pub fn load_network(spec: &str) -> Result<NetworkModel, CliError> {
    if let Some(name) = spec.strip_prefix(BUILTIN_PREFIX) {
        return NetworkModel::builtin(name)
            .ok_or_else(|| CliError::new(EXIT_INPUT, anyhow::anyhow!("unknown builtin network {name:?}")));
    }
    let bytes = fs::read(spec).with_context(|| format!("reading {spec}")).map_err(|e| CliError::new(EXIT_INPUT, e))?;
    NetworkModel::parse(&bytes)
        .with_context(|| spec.to_string())
        .map_err(|e| CliError::new(EXIT_INPUT, e))
}

enum Input {
    Network(NetworkModel),
    Model(QuboModel),
}

fn load_input(spec: &str) -> Result<Input, CliError> {
    if !spec.starts_with(BUILTIN_PREFIX) {
        let text = fs::read_to_string(spec)
            .with_context(|| format!("reading {spec}"))
            .map_err(|e| CliError::new(EXIT_INPUT, e))?;
        let is_model = serde_json::from_str::<serde_json::Value>(&text)
            .map(|v| v.get("variables").is_some())
            .unwrap_or(false);
        if is_model {
            return QuboModel::from_json(&text)
                .map(Input::Model)
                .with_context(|| spec.to_string())
                .map_err(|e| CliError::new(EXIT_INPUT, e));
        }
    }
    load_network(spec).map(Input::Network)
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Counts reported for the bundled 33-node network in the literature.
struct Reference {
    variables: [(VarClass, usize); 6],
    total_variables: usize,
    interactions: [(Source, usize); 7],
    total_interactions: usize,
}

const BARAN_WU_REFERENCE: Reference = Reference {
    variables: [
        (VarClass::E, 24),
        (VarClass::D, 4),
        (VarClass::P, 23),
        (VarClass::Z, 577),
        (VarClass::Y, 434),
        (VarClass::Ancilla, 12),
    ],
    total_variables: 1074,
    interactions: [
        (Source::Vertex, 24),
        (Source::Edge, 13),
        (Source::Cycle, 72),
        (Source::Path, 14),
        (Source::EdgePath, 17),
        (Source::ZDef, 3029),
        (Source::Losses, 6997),
    ],
    total_interactions: 10166,
};

fn is_bundled(net: &NetworkModel) -> bool {
    NetworkModel::builtin("baran-wu-33").is_some_and(|b| &b == net)
}

pub fn render_metrics(m: &ModelMetrics, with_reference: bool) -> String {
    let reference = with_reference.then_some(&BARAN_WU_REFERENCE);
    let cell = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
    let mut s = String::new();
    s.push_str(&format!("{:<12} {:>8} {:>10}\n", "variables", "model", "reference"));
    for c in VarClass::ALL {
        let r = reference.and_then(|r| r.variables.iter().find(|(k, _)| *k == c).map(|(_, n)| *n));
        s.push_str(&format!("{:<12} {:>8} {:>10}\n", c.label(), m.variables[&c], cell(r)));
    }
    s.push_str(&format!(
        "{:<12} {:>8} {:>10}\n\n",
        "total",
        m.total_variables,
        cell(reference.map(|r| r.total_variables))
    ));
    s.push_str(&format!("{:<12} {:>8} {:>10}\n", "interactions", "model", "reference"));
    for src in Source::ALL {
        let r = reference.and_then(|r| r.interactions.iter().find(|(k, _)| *k == src).map(|(_, n)| *n));
        s.push_str(&format!("{:<12} {:>8} {:>10}\n", src.label(), m.interactions[&src], cell(r)));
    }
    s.push_str(&format!(
        "{:<12} {:>8} {:>10}\n\n",
        "total",
        m.total_interactions,
        cell(reference.map(|r| r.total_interactions))
    ));
    s.push_str("(a pair fed by several sources counts once per source; the total counts distinct pairs)\n");
    if let Some((d, n)) = m.histogram_peak() {
        s.push_str(&format!("histogram peak: {n} variables with {d} interactions"));
        if with_reference {
            s.push_str(" (reference: 436 with 4)");
        }
        s.push('\n');
    }
    s.push_str(&format!(
        "degree min/mean/max: {}/{:.2}/{}\n",
        m.min_degree, m.mean_degree, m.max_degree
    ));
    s
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "model".into());
    out.with_file_name(format!("{stem}.{suffix}"))
}

fn cmd_build(input: &str, scale: f64, out: &Path) -> CliResult {
    let net = load_network(input)?;
    let c = Compiled::build(&net, scale)?;
    let metrics = c.model.metrics();
    let report = render_metrics(&metrics, is_bundled(&net));
    write(out, &c.model.to_json())?;
    write(&sibling(out, "metrics.txt"), &report)?;
    write(&sibling(out, "histogram.csv"), &metrics.histogram_csv())?;
    print!("{report}");
    println!("model written to {}", out.display());
    Ok(())
}

fn cmd_inspect(input: &str, out: Option<&Path>) -> CliResult {
    let net = load_network(input)?;
    let c = Compiled::build(&net, DEFAULT_SCALE)?;
    println!(
        "network: {} nodes, {} branches, root {}",
        net.nodes().len(),
        net.branches().len(),
        net.root()
    );
    println!(
        "components: {} non-trivial, {} bridges; cutvertices {:?}",
        c.parts.len(),
        c.components.trivial().count(),
        c.components.cut_vertices
    );
    for p in &c.parts {
        let m = &p.minor;
        println!(
            "component rooted at {}: {} vertices, {} edges; minor {} vertices, {} edges",
            m.root,
            m.component.vertices.len(),
            m.component.edges.len(),
            m.minor_vertices.len(),
            m.minor_edges.len()
        );
        for (k, path) in &m.path_map {
            println!("  path {k}: {path:?}");
        }
        for cyc in &p.basis.cycles {
            println!("  cycle {:?} {:?}", cyc.kind, cyc.vertices);
        }
        let d: Vec<String> = p.basis.shared_edges.keys().map(|k| k.to_string()).collect();
        println!("  direction variables on: {}", d.join(" "));
    }
    for cls in VarClass::ALL {
        println!("{:<4} {}", cls.label(), c.model.registry.count(cls));
    }
    for (src, n) in c.constraints.count_by_source() {
        println!("{} constraints: {n}", src.label());
    }
    if let Some(out) = out {
        let text = serde_json::to_string_pretty(&c.constraints.to_json()).expect("constraints serialize") + "\n";
        write(out, &text)?;
    }
    Ok(())
}

fn print_solution(v: &serde_json::Value, out: Option<&Path>) -> CliResult {
    let text = serde_json::to_string_pretty(v).expect("solution serializes") + "\n";
    if let Some(out) = out {
        write(out, &text)?;
    }
    print!("{text}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    input: &str,
    network: Option<&str>,
    method: Method,
    scale: f64,
    params: AnnealParams,
    max_brute_vars: usize,
    out: Option<&Path>,
) -> CliResult {
    let run = |model: &QuboModel| -> Result<SolveResult, CliError> {
        match method {
            Method::Sa => Ok(simulated_annealing(model, &params)),
            Method::Brute => brute_force_qubo(model, max_brute_vars).map_err(|e| CliError::new(EXIT_INPUT, e)),
            Method::Exhaustive => Err(CliError::new(
                EXIT_INPUT,
                anyhow::anyhow!("exhaustive search needs a network input"),
            )),
        }
    };
    match load_input(input)? {
        Input::Network(net) => {
            let c = Compiled::build(&net, scale)?;
            if method == Method::Exhaustive {
                let o = exhaustive_optimum(&net, &c.components)
                    .ok_or_else(|| CliError::new(EXIT_INFEASIBLE, anyhow::anyhow!("network has no spanning tree")))?;
                let x = c.encode(&o.best);
                let v = json!({
                    "energy": c.model.energy(&x),
                    "feasible": true,
                    "open_links": links_json(&open_links(&net, &o.best)),
                    "loss_kw": o.losses.switchable_kw,
                    "total_loss_kw": o.losses.total_kw(),
                    "solver": {
                        "method": "exhaustive",
                        "trees": o.tree_count,
                        "ties": o.ties.iter().map(links_json).collect::<Vec<_>>(),
                    },
                });
                return print_solution(&v, out);
            }
            let result = run(&c.model)?;
            eprintln!("solver time {:.3} s", result.stats.wall_seconds);
            let v = c.solution_json(&result);
            print_solution(&v, out)?;
            if v["feasible"] == json!(false) {
                return Err(CliError::new(EXIT_INFEASIBLE, anyhow::anyhow!("best assignment is infeasible")));
            }
            Ok(())
        }
        Input::Model(model) => {
            let result = run(&model)?;
            eprintln!("solver time {:.3} s", result.stats.wall_seconds);
            let v = match network {
                Some(n) => {
                    let c = Compiled::build(&load_network(n)?, model.scale)?;
                    if c.model.registry != model.registry {
                        return Err(CliError::new(
                            EXIT_INPUT,
                            anyhow::anyhow!("model variables do not match the network"),
                        ));
                    }
                    c.solution_json(&result)
                }
                None => json!({
                    "energy": result.energy,
                    "feasible": null,
                    "open_links": null,
                    "loss_kw": null,
                    "solver": stats_json(&result),
                }),
            };
            print_solution(&v, out)?;
            if v["feasible"] == json!(false) {
                return Err(CliError::new(EXIT_INFEASIBLE, anyhow::anyhow!("best assignment is infeasible")));
            }
            Ok(())
        }
    }
}

fn cmd_validate(input: &str, model: Option<&Path>, scale: f64, seed: u64, max_brute_vars: usize) -> CliResult {
    let net = load_network(input)?;
    let override_model = match model {
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("reading {}", p.display()))
                .map_err(|e| CliError::new(EXIT_INPUT, e))?;
            Some(QuboModel::from_json(&text).map_err(|e| CliError::new(EXIT_INPUT, e))?)
        }
        None => None,
    };
    let scale = override_model.as_ref().map_or(scale, |m| m.scale);
    let c = Compiled::build(&net, scale)?;
    if let Some(m) = &override_model {
        if m.registry != c.model.registry {
            return Err(CliError::new(EXIT_INPUT, anyhow::anyhow!("model variables do not match the network")));
        }
    }
    let opts = ValidateOptions { seed, max_brute_vars, ..Default::default() };
    let report = equivalence_suite(&c, override_model.as_ref(), &opts);
    print!("{}", report.render());
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::new(
            EXIT_VALIDATION,
            anyhow::anyhow!("validation failed: {}", report.first_failure.unwrap_or_default()),
        ))
    }
}

fn cmd_export(input: &str, format: Format, scale: f64, out: &Path) -> CliResult {
    let model = match load_input(input)? {
        Input::Model(m) => m,
        Input::Network(net) => Compiled::build(&net, scale)?.model,
    };
    let text = match format {
        Format::Json => model.to_json(),
        Format::Qubo => model.to_qubo_text(),
        Format::Lp => model.to_lp(),
    };
    write(out, &text)
}

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Build { input, scale, out } => cmd_build(&input, scale, &out),
        Command::Inspect { input, out } => cmd_inspect(&input, out.as_deref()),
        Command::Solve {
            input,
            network,
            method,
            scale,
            sweeps,
            restarts,
            seed,
            t_start,
            t_end,
            max_brute_vars,
            out,
        } => {
            let params = AnnealParams { sweeps, restarts, seed, t_start, t_end };
            cmd_solve(&input, network.as_deref(), method, scale, params, max_brute_vars, out.as_deref())
        }
        Command::Validate { input, model, scale, seed, max_brute_vars } => {
            cmd_validate(&input, model.as_deref(), scale, seed, max_brute_vars)
        }
        Command::Export { input, format, scale, out } => cmd_export(&input, format, scale, &out),
    }
}

pub fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}
