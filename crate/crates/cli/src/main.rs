//! Batch front-end for the switched-system analysis library.
//!
//! Reads TOML (or JSON) descriptions of graphs, signals, and systems, runs
//! the requested analysis, and writes deterministic artifacts (JSON, CSV,
//! DOT, SVG) to an output directory. Exit code 0 means success, 1 means an
//! analysis ran and its claim failed, 2 means the invocation or its inputs
//! were invalid.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use morseflow::scenarios::{circle, flicker, morse as morse_scenario};
use morseflow::{
    alpha_limit_estimate, build_chain_graph, chain_sets, communicating_classes, distance, load,
    omega_limit_estimate, to_pretty_json, transitive_witness, trajectory, validate_n_graph,
    AnalysisError, Artifact, ChainParams, ConfigError, DeltaFamily, DirectedGraph, Extension,
    GraphConfig, GraphError, HybridError, HybridSystem, MorseCandidate, ProductPoint, Region,
    SamplingPlan, ScenarioReport, SignalConfig, SignalError, SweepSpec, SymbolicSignal,
    SystemConfig, DEFAULT_BURN_DWELLS, DEFAULT_CLUSTER_RADIUS, DEFAULT_HORIZON_DWELLS,
};

#[derive(Parser)]
#[command(
    name = "morseflow",
    version,
    about = "Analysis of switched dynamical systems over directed graphs"
)]
struct Cli {
    /// Worker threads for parallel stages (0 keeps the library default).
    /// Results are independent of this setting.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Output directory for artifacts. Defaults to the MORSEFLOW_OUT
    /// environment variable, then to the current directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Graph-level analysis.
    #[command(subcommand)]
    Graph(GraphAction),
    /// Inspect a switching signal: admissibility, symbols, distances.
    Signal(SignalCmd),
    /// Integrate one trajectory and plot it.
    Simulate(SimulateCmd),
    /// Estimate a forward or backward limit set.
    Limitset(LimitsetCmd),
    /// Verify a proposed Morse decomposition.
    Morse(MorseCmd),
    /// Build the pseudo-orbit hop graph and its recurrent components.
    Chains(ChainsCmd),
    /// Track recurrent components across a perturbation ladder.
    Sweep(SweepCmd),
    /// Run one bundled end-to-end scenario.
    Scenario(ScenarioCmd),
}

#[derive(Subcommand)]
enum GraphAction {
    /// Degree check, communicating classes, DOT rendering.
    Analyze {
        /// Graph file (`n_vertices`, `edges`) or full system file.
        config: PathBuf,
    },
}

#[derive(Args)]
struct SignalSource {
    /// Signal file (word, h, tau, anchor, extension).
    #[arg(long)]
    signal: Option<PathBuf>,
    /// Inline word as comma-separated vertices, e.g. `0,1,1`.
    #[arg(long, conflicts_with = "signal")]
    word: Option<String>,
    /// Dwell offset for an inline word.
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    /// Anchor index for an inline word.
    #[arg(long, default_value_t = 0)]
    anchor: i64,
    /// Extension rule for an inline word.
    #[arg(long, value_enum, default_value_t = ExtensionArg::Periodic)]
    extension: ExtensionArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExtensionArg {
    Periodic,
    ConstantEnds,
}

impl From<ExtensionArg> for Extension {
    fn from(v: ExtensionArg) -> Self {
        match v {
            ExtensionArg::Periodic => Extension::PeriodicWord,
            ExtensionArg::ConstantEnds => Extension::ConstantEnds,
        }
    }
}

#[derive(Args)]
struct SignalCmd {
    /// Graph file or system file the signal should be admissible for.
    config: PathBuf,
    #[command(flatten)]
    source: SignalSource,
    /// Dwell length for an inline word when the config carries none.
    #[arg(long)]
    h: Option<f64>,
    /// Metric window (weights 4^-k for |k| <= window).
    #[arg(long, default_value_t = morseflow::DEFAULT_METRIC_WINDOW)]
    window: usize,
    /// Second signal file; reports the metric distance to it.
    #[arg(long)]
    distance_to: Option<PathBuf>,
    /// Also build one orbit-dense signal per communicating class, covering
    /// admissible words up to this length.
    #[arg(long)]
    witness_len: Option<usize>,
}

#[derive(Args)]
struct SimulateCmd {
    /// System file (graph, fields, space, h).
    config: PathBuf,
    #[command(flatten)]
    source: SignalSource,
    /// Initial state.
    #[arg(long)]
    x0: f64,
    /// Start time.
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    /// End time; defaults to 40 dwell lengths after `t0`.
    #[arg(long)]
    t1: Option<f64>,
    /// Sample spacing; defaults to a quarter dwell.
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Args)]
struct LimitsetCmd {
    /// System file (graph, fields, space, h).
    config: PathBuf,
    #[command(flatten)]
    source: SignalSource,
    /// Initial state.
    #[arg(long)]
    x0: f64,
    /// Discarded leading stretch, in dwell lengths.
    #[arg(long, default_value_t = DEFAULT_BURN_DWELLS)]
    burn_dwells: f64,
    /// Total sampled stretch, in dwell lengths.
    #[arg(long, default_value_t = DEFAULT_HORIZON_DWELLS)]
    horizon_dwells: f64,
    /// Cluster radius for the returned representatives.
    #[arg(long, default_value_t = DEFAULT_CLUSTER_RADIUS)]
    cluster_radius: f64,
    /// Estimate the backward limit set instead of the forward one.
    #[arg(long)]
    backward: bool,
}

#[derive(Args)]
struct MorseCmd {
    /// System file (graph, fields, space, h).
    config: PathBuf,
    /// Candidate file: `[[candidates]]` entries with `name`, `points`
    /// and/or `intervals`, and a `delta` table.
    #[arg(long)]
    candidates: PathBuf,
    /// State tolerance for containment checks.
    #[arg(long)]
    match_tol: Option<f64>,
    /// Maximum word length of sampled signal catalogs.
    #[arg(long)]
    word_len: Option<usize>,
    /// Burn-in for limit estimates, in dwell lengths.
    #[arg(long)]
    burn_dwells: Option<f64>,
    /// Horizon for limit estimates, in dwell lengths.
    #[arg(long)]
    horizon_dwells: Option<f64>,
}

#[derive(Args)]
struct ChainsCmd {
    /// System file (graph, fields, space, h).
    config: PathBuf,
    /// Jump radius of a hop.
    #[arg(long)]
    eps: f64,
    /// Maximum hop flow time.
    #[arg(long = "T")]
    t_max: f64,
    /// Minimum hop flow time; defaults to one dwell length.
    #[arg(long)]
    t_min: Option<f64>,
    /// Number of grid nodes.
    #[arg(long, default_value_t = 201)]
    grid: usize,
    /// Maximum word length of the driving signal catalog.
    #[arg(long, default_value_t = 2)]
    word_len: usize,
}

#[derive(Args)]
struct SweepCmd {
    /// Sweep file: base field, pull targets, rho ladder, space, h, params.
    config: PathBuf,
}

#[derive(Args)]
struct ScenarioCmd {
    /// Which bundled scenario to run.
    name: ScenarioName,
    /// Seed for scenarios that draw random samples.
    #[arg(long, default_value_t = 20260823)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScenarioName {
    /// Two interval fields switched on a two-cycle trap orbits in a gap.
    Flicker,
    /// Two circle fields whose limit sets touch four rest points.
    Circle,
    /// Four-set decomposition with connecting orbits on an interval.
    Morse,
}

#[derive(Debug)]
enum CliError {
    /// Invalid invocation, unreadable or inconsistent inputs: exit 2.
    Config(String),
    /// Analysis ran and the asserted property failed: exit 1.
    Claim(String),
}

impl CliError {
    fn code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Claim(_) => ExitCode::from(1),
        }
    }
}

macro_rules! config_error_from {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Config(e.to_string())
            }
        }
    )*};
}
config_error_from!(
    ConfigError,
    AnalysisError,
    GraphError,
    HybridError,
    SignalError,
    std::io::Error
);

fn main() -> ExitCode {
    env_logger::Builder::from_default_env()
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Config(msg) => eprintln!("error: {msg}"),
                CliError::Claim(msg) => eprintln!("claim failed: {msg}"),
            }
            e.code()
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let out = cli
        .out
        .or_else(|| std::env::var_os("MORSEFLOW_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out)?;

    match cli.command {
        Command::Graph(GraphAction::Analyze { config }) => graph_analyze(&out, &config),
        Command::Signal(cmd) => signal_inspect(&out, cmd),
        Command::Simulate(cmd) => simulate(&out, cmd),
        Command::Limitset(cmd) => limitset(&out, cmd),
        Command::Morse(cmd) => morse_verify(&out, cmd),
        Command::Chains(cmd) => chains(&out, cmd),
        Command::Sweep(cmd) => sweep(&out, cmd),
        Command::Scenario(cmd) => scenario(&out, cmd),
    }
}

fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, content)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Loads either a bare graph file or a full system file, returning the graph
/// and the dwell length when one is present.
fn load_graph_any(path: &Path) -> Result<(DirectedGraph, Option<f64>), CliError> {
    match load::<GraphConfig>(path) {
        Ok(gc) => Ok((gc.build()?, None)),
        Err(graph_err) => match load::<SystemConfig>(path) {
            Ok(sc) => Ok((sc.graph.build()?, Some(sc.h))),
            Err(_) => Err(graph_err.into()),
        },
    }
}

fn parse_word(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|e| CliError::Config(format!("bad word entry {part:?}: {e}")))
        })
        .collect()
}

/// Builds the signal described by `source`, from a file or inline flags.
/// `h` is the dwell length to use for inline words.
fn build_signal(source: &SignalSource, h: Option<f64>) -> Result<SymbolicSignal, CliError> {
    if let Some(path) = &source.signal {
        let cfg: SignalConfig = load(path)?;
        return Ok(cfg.build()?);
    }
    let Some(word_text) = &source.word else {
        return Err(CliError::Config(
            "provide a signal via --signal FILE or --word LIST".into(),
        ));
    };
    let Some(h) = h else {
        return Err(CliError::Config(
            "an inline --word needs a dwell length (--h or a system file)".into(),
        ));
    };
    Ok(SymbolicSignal::new(
        parse_word(word_text)?,
        h,
        source.tau,
        source.anchor,
        source.extension.into(),
    )?)
}

fn graph_analyze(out: &Path, config: &Path) -> Result<(), CliError> {
    let (graph, _) = load_graph_any(config)?;
    let degrees = validate_n_graph(&graph);
    if !degrees.is_n_graph() {
        let report = json!({
            "seed": null,
            "n_vertices": graph.n_vertices(),
            "n_edges": graph.n_edges(),
            "is_n_graph": false,
            "offenders": degrees.offenders(),
        });
        write_artifact(out, "graph_report.json", &to_pretty_json(&report))?;
        return Err(CliError::Config(format!(
            "not an N-graph: vertices {:?} have a missing in- or out-edge",
            degrees.offenders()
        )));
    }
    let classes = communicating_classes(&graph)?;
    let report = json!({
        "seed": null,
        "n_vertices": graph.n_vertices(),
        "n_edges": graph.n_edges(),
        "is_n_graph": true,
        "classes": classes.iter().map(|c| json!({
            "members": c.members,
            "invariant": c.is_invariant(),
        })).collect::<Vec<_>>(),
    });
    write_artifact(out, "graph_report.json", &to_pretty_json(&report))?;
    write_artifact(out, "graph.dot", &morseflow::graph_dot(&graph, &classes))?;
    for (i, c) in classes.iter().enumerate() {
        println!(
            "class {i}: {:?} ({})",
            c.members,
            if c.is_invariant() { "invariant" } else { "variant" }
        );
    }
    Ok(())
}

fn signal_inspect(out: &Path, cmd: SignalCmd) -> Result<(), CliError> {
    let (graph, sys_h) = load_graph_any(&cmd.config)?;
    let sig = build_signal(&cmd.source, cmd.h.or(sys_h))?;
    let admissibility = sig.check_admissible(&graph);
    let admissible = admissibility.is_ok();

    let h = sig.h();
    let window = cmd.window as i64;
    let symbols: Vec<serde_json::Value> = (-window..=window)
        .map(|k| {
            let mid = sig.tau() + (k as f64 + 0.5) * h;
            json!({ "interval": k, "start": sig.tau() + k as f64 * h, "vertex": sig.evaluate(mid) })
        })
        .collect();

    let mut report = json!({
        "seed": null,
        "word": sig.word(),
        "h": h,
        "tau": sig.tau(),
        "anchor": sig.anchor(),
        "admissible": admissible,
        "admissibility_error": admissibility.as_ref().err().map(|e| e.to_string()),
        "symbols": symbols,
    });

    if let Some(other_path) = &cmd.distance_to {
        let other: SignalConfig = load(other_path)?;
        let other = other.build()?;
        let metric = distance(&sig, &other, cmd.window)?;
        report["distance"] = json!({
            "window": cmd.window,
            "value": metric.value,
            "truncation_error_bound": metric.truncation_error_bound,
        });
    }

    if let Some(max_len) = cmd.witness_len {
        let classes = communicating_classes(&graph)?;
        let witnesses: Result<Vec<serde_json::Value>, SignalError> = classes
            .iter()
            .map(|class| {
                let w = transitive_witness(&graph, class, max_len, h)?;
                Ok(json!({ "class": class.members, "word": w.word() }))
            })
            .collect();
        report["witnesses"] = serde_json::Value::Array(witnesses?);
    }

    write_artifact(out, "signal_report.json", &to_pretty_json(&report))?;
    if admissible {
        println!("admissible");
        Ok(())
    } else {
        Err(CliError::Claim(format!(
            "signal is not admissible: {}",
            admissibility.err().expect("checked above")
        )))
    }
}

fn load_system(path: &Path) -> Result<HybridSystem, CliError> {
    let cfg: SystemConfig = load(path)?;
    Ok(cfg.build()?)
}

fn simulate(out: &Path, cmd: SimulateCmd) -> Result<(), CliError> {
    let sys = load_system(&cmd.config)?;
    let sig = build_signal(&cmd.source, Some(sys.h()))?;
    let t1 = cmd.t1.unwrap_or(cmd.t0 + 40.0 * sys.h());
    let dt = cmd.dt.unwrap_or(sys.h() / 4.0);
    let samples = trajectory(&sys, &sig, cmd.x0, cmd.t0, t1, dt)?;
    let last = samples.last().expect("trajectory always has a sample");

    let report = json!({
        "seed": null,
        "x0": cmd.x0,
        "t0": cmd.t0,
        "t1": t1,
        "dt": dt,
        "n_samples": samples.len(),
        "final_t": last.t,
        "final_x": last.x,
    });
    write_artifact(out, "simulate_report.json", &to_pretty_json(&report))?;
    write_artifact(out, "trajectory.csv", &morseflow::trajectory_csv(&samples))?;
    let svg = morseflow::svg_trajectories(
        "trajectory",
        &[(format!("x0={}", cmd.x0), samples)],
        &[],
    );
    write_artifact(out, "trajectory.svg", &svg)?;
    Ok(())
}

fn limitset(out: &Path, cmd: LimitsetCmd) -> Result<(), CliError> {
    let sys = load_system(&cmd.config)?;
    let sig = build_signal(&cmd.source, Some(sys.h()))?;
    let p = ProductPoint {
        x: cmd.x0,
        signal: sig,
    };
    let burn = cmd.burn_dwells * sys.h();
    let horizon = cmd.horizon_dwells * sys.h();
    let estimate = if cmd.backward {
        alpha_limit_estimate(&sys, &p, burn, horizon, cmd.cluster_radius)?
    } else {
        omega_limit_estimate(&sys, &p, burn, horizon, cmd.cluster_radius)?
    };
    let report = json!({
        "seed": null,
        "x0": cmd.x0,
        "direction": if cmd.backward { "backward" } else { "forward" },
        "estimate": estimate,
    });
    write_artifact(out, "limitset_report.json", &to_pretty_json(&report))?;
    println!(
        "{} limit estimate: {:?}",
        if cmd.backward { "backward" } else { "forward" },
        estimate.points
    );
    Ok(())
}

#[derive(Deserialize)]
struct CandidateFile {
    candidates: Vec<CandidateConfig>,
}

#[derive(Deserialize)]
struct CandidateConfig {
    name: String,
    #[serde(default)]
    points: Vec<f64>,
    #[serde(default)]
    intervals: Vec<[f64; 2]>,
    delta: DeltaFamily,
}

impl CandidateConfig {
    fn build(&self) -> Result<MorseCandidate, CliError> {
        let mut intervals: Vec<(f64, f64)> = self.points.iter().map(|&p| (p, p)).collect();
        intervals.extend(self.intervals.iter().map(|&[a, b]| (a, b)));
        let region = Region::from_intervals(intervals)?;
        Ok(MorseCandidate::new(
            self.name.clone(),
            region,
            self.delta.clone(),
        ))
    }
}

fn morse_verify(out: &Path, cmd: MorseCmd) -> Result<(), CliError> {
    let sys = load_system(&cmd.config)?;
    let file: CandidateFile = load(&cmd.candidates)?;
    if file.candidates.is_empty() {
        return Err(CliError::Config("candidate file lists no candidates".into()));
    }
    let candidates: Vec<MorseCandidate> = file
        .candidates
        .iter()
        .map(CandidateConfig::build)
        .collect::<Result<_, _>>()?;

    let mut plan = SamplingPlan::default_for(sys.h());
    if let Some(v) = cmd.match_tol {
        plan.match_tol = v;
    }
    if let Some(v) = cmd.word_len {
        plan.word_len = v;
    }
    if let Some(v) = cmd.burn_dwells {
        plan.burn = v * sys.h();
    }
    if let Some(v) = cmd.horizon_dwells {
        plan.horizon = v * sys.h();
    }

    let report = morseflow::verify_morse_decomposition(&sys, &candidates, &plan)?;
    let wrapped = json!({
        "seed": null,
        "candidates": candidates.iter().map(|c| &c.name).collect::<Vec<_>>(),
        "report": report,
    });
    write_artifact(out, "morse_report.json", &to_pretty_json(&wrapped))?;
    for c in &report.conditions {
        println!(
            "  [{}] {}: {}",
            if c.passed { "pass" } else { "FAIL" },
            c.condition,
            c.details
        );
    }
    if report.passed {
        println!("PASS");
        Ok(())
    } else {
        Err(CliError::Claim(
            "not verified as a Morse decomposition".into(),
        ))
    }
}

fn chains(out: &Path, cmd: ChainsCmd) -> Result<(), CliError> {
    let sys = load_system(&cmd.config)?;
    let params = ChainParams {
        grid_n: cmd.grid,
        eps: cmd.eps,
        t_min: cmd.t_min.unwrap_or(sys.h()),
        t_max: cmd.t_max,
        word_len: cmd.word_len,
    };
    let cg = build_chain_graph(&sys, &params)?;
    let sets = chain_sets(&sys, &cg)?;

    let report = json!({
        "seed": null,
        "params": params,
        "n_nodes": cg.n_nodes(),
        "n_edges": cg.edges().len(),
        "n_signals": cg.signals().len(),
        "components": sets.components.iter().map(|c| json!({
            "nodes": c.nodes,
            "states": cg.states_of(&c.nodes),
            "witness": c.witness,
        })).collect::<Vec<_>>(),
    });
    write_artifact(out, "chains_report.json", &to_pretty_json(&report))?;
    write_artifact(out, "chain_graph.dot", &morseflow::chain_dot(&cg, &sets))?;
    write_artifact(out, "components.csv", &morseflow::components_csv(&cg, &sets))?;
    println!(
        "{} recurrent components over {} nodes",
        sets.components.len(),
        cg.n_nodes()
    );
    Ok(())
}

fn sweep(out: &Path, cmd: SweepCmd) -> Result<(), CliError> {
    let spec: SweepSpec = load(&cmd.config)?;
    let report = morseflow::perturbation_sweep(&spec)?;
    let wrapped = json!({
        "seed": null,
        "spacing": report.spacing,
        "bound_constant": report.bound_constant,
        "levels": report.levels.iter().map(|level| json!({
            "rho": level.rho,
            "n_components": level.result.components.len(),
            "matched": level.matched,
            "hausdorff": level.hausdorff,
        })).collect::<Vec<_>>(),
    });
    write_artifact(out, "sweep_report.json", &to_pretty_json(&wrapped))?;
    write_artifact(out, "sweep.csv", &morseflow::sweep_csv(&report))?;
    for level in &report.levels {
        println!(
            "rho {}: {} components, {} matched",
            level.rho,
            level.result.components.len(),
            level.matched_count()
        );
    }
    Ok(())
}

fn scenario(out: &Path, cmd: ScenarioCmd) -> Result<(), CliError> {
    let (report, artifacts): (ScenarioReport, Vec<Artifact>) = match cmd.name {
        ScenarioName::Flicker => flicker::example_flicker()?,
        ScenarioName::Circle => circle::example_circle(cmd.seed)?,
        ScenarioName::Morse => morse_scenario::example_morse()?,
    };
    let name = format!("{}_report.json", report.scenario);
    write_artifact(out, &name, &to_pretty_json(&report))?;
    for artifact in &artifacts {
        write_artifact(out, &artifact.name, &artifact.content)?;
    }

    let mut summary = String::new();
    for claim in &report.claims {
        let _ = writeln!(
            summary,
            "  [{}] {}: {}",
            if claim.passed { "pass" } else { "FAIL" },
            claim.name,
            claim.details
        );
    }
    print!("{summary}");
    if report.passed {
        println!("PASS");
        Ok(())
    } else {
        Err(CliError::Claim(format!(
            "scenario {} failed",
            report.scenario
        )))
    }
}
