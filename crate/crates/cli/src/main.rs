//! Command-line front end wiring graphs, parameters, designs, estimators,
//! theory, the enumeration oracle, and the Monte Carlo harness into
//! reproducible runs.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 budget or
//! degeneracy error.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use dyadtte::clustering::{louvain, modularity, overlap_stats_weighted, Clustering};
use dyadtte::design::{substream, ClusterSamplingMode, Design};
use dyadtte::error::Error;
use dyadtte::graph::{read_edge_list_file, DirectedGraph, ParseOptions, ParseReport};
use dyadtte::harness::{
    manifest_path, monte_carlo, replicate, reports_to_csv, sweep, DesignFamily, RunManifest,
    SweepGrid, SweepSpec,
};
use dyadtte::model::{
    generate_params, outcomes, outcomes_to_csv, read_params_csv, true_tte, write_params_csv,
    DyadicParams, ParamConfig,
};
use dyadtte::oracle::{crosscheck, exact_expectations, EnumerationBudget, EstimatorId};
use dyadtte::theory::expected_for_design;

#[derive(Parser)]
#[command(
    name = "dyadtte",
    version,
    about = "Total-treatment-effect estimation on networks with dyadic outcomes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a graph and print degree statistics.
    Stats(StatsCmd),
    /// Louvain community detection; writes a clustering file.
    Cluster(ClusterCmd),
    /// Generate dyadic coefficients and write them as CSV.
    GenParams(GenParamsCmd),
    /// Seeded Monte Carlo run for one design.
    Simulate(SimulateCmd),
    /// Grid sweep: one Monte Carlo run per grid value, CSV output.
    Sweep(SweepCmd),
    /// Closed-form expectations and biases for one design.
    Theory(TheoryCmd),
    /// Exact expectation of one estimator by exhaustive enumeration.
    Oracle(OracleCmd),
    /// Oracle vs. every closed form, side by side.
    Crosscheck(CrosscheckCmd),
}

#[derive(Args)]
struct GraphArgs {
    /// Edge-list file ('%'/'#' comments, whitespace-separated pairs).
    #[arg(long)]
    graph: PathBuf,
    /// Emit both directions for every input edge.
    #[arg(long)]
    symmetrize: bool,
    /// Declare the file one-based (labels are densely remapped either way).
    #[arg(long)]
    one_based: bool,
    /// Skip the first non-comment line (Matrix Market size header).
    #[arg(long)]
    skip_header: bool,
    /// Accept self-loop edges instead of rejecting the file.
    #[arg(long)]
    allow_self_loops: bool,
}

impl GraphArgs {
    fn options(&self) -> ParseOptions {
        ParseOptions {
            one_based: self.one_based,
            symmetrize: self.symmetrize,
            skip_header: self.skip_header,
            allow_self_loops: self.allow_self_loops,
        }
    }

    fn load(&self) -> Result<ParseReport, Error> {
        read_edge_list_file(&self.graph, &self.options())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DesignKind {
    Full,
    Subpop,
    Twostage,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClusterModeArg {
    /// Each cluster enters independently with probability p.
    BernoulliClusters,
    /// Exactly round(p*k) clusters, uniformly without replacement.
    FixedFraction,
}

impl From<ClusterModeArg> for ClusterSamplingMode {
    fn from(m: ClusterModeArg) -> Self {
        match m {
            ClusterModeArg::BernoulliClusters => ClusterSamplingMode::BernoulliClusters,
            ClusterModeArg::FixedFraction => ClusterSamplingMode::FixedFraction,
        }
    }
}

#[derive(Args)]
struct DesignArgs {
    #[arg(long, value_enum)]
    design: DesignKind,
    /// Treatment probability.
    #[arg(long)]
    pi: f64,
    /// In-experiment probability (subpop and twostage).
    #[arg(long)]
    p: Option<f64>,
    /// Clustering file ("node cluster" rows; required for twostage).
    #[arg(long)]
    clustering: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "bernoulli-clusters")]
    cluster_mode: ClusterModeArg,
}

impl DesignArgs {
    fn load_clustering(&self, n: usize) -> Result<Option<Clustering>, Error> {
        self.clustering
            .as_ref()
            .map(|path| Clustering::read_file(path, n))
            .transpose()
    }

    fn build(&self, n: usize) -> Result<Design, Error> {
        match self.design {
            DesignKind::Full => Design::full(self.pi),
            DesignKind::Subpop => {
                let p = self.p.ok_or_else(|| {
                    Error::InvalidArgument("--design subpop needs --p".into())
                })?;
                Design::subpop(p, self.pi)
            }
            DesignKind::Twostage => {
                let p = self.p.ok_or_else(|| {
                    Error::InvalidArgument("--design twostage needs --p".into())
                })?;
                let clustering = self.load_clustering(n)?.ok_or_else(|| {
                    Error::InvalidArgument("--design twostage needs --clustering".into())
                })?;
                Design::two_stage(p, self.pi, clustering, self.cluster_mode.into())
            }
        }
    }
}

#[derive(Args)]
struct StatsCmd {
    #[command(flatten)]
    graph: GraphArgs,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterCmd {
    #[command(flatten)]
    graph: GraphArgs,
    /// Modularity resolution parameter.
    #[arg(long)]
    resolution: f64,
    #[arg(long)]
    seed: u64,
    /// Clustering file to write.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct GenParamsCmd {
    #[command(flatten)]
    graph: GraphArgs,
    /// Coefficient regime.
    #[arg(long, value_enum)]
    regime: RegimeArg,
    #[arg(long)]
    seed: u64,
    /// Constant coefficients (with --regime constants).
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    /// Parameter CSV to write.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RegimeArg {
    Uniform,
    Bernoulli,
    Constants,
}

#[derive(Args)]
struct SimulateCmd {
    #[command(flatten)]
    graph: GraphArgs,
    /// Parameter CSV (see gen-params).
    #[arg(long)]
    params: PathBuf,
    #[command(flatten)]
    design: DesignArgs,
    #[arg(long)]
    reps: u64,
    #[arg(long)]
    seed: u64,
    /// Worker threads (default: DYADTTE_WORKERS or all cores). Never
    /// changes results.
    #[arg(long)]
    workers: Option<usize>,
    /// Write the JSON summary here (a manifest is written beside it).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dump every rep's estimates as CSV.
    #[arg(long)]
    dump_reps: Option<PathBuf>,
    /// Dump the first rep's assignment as CSV ("node,V,W").
    #[arg(long)]
    dump_assignment: Option<PathBuf>,
    /// Dump the first rep's outcomes as CSV ("node,Y,D").
    #[arg(long)]
    dump_outcomes: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SweepCmd {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    params: PathBuf,
    #[arg(long, value_enum)]
    design: DesignKind,
    /// Fixed treatment probability (for --p-grid sweeps).
    #[arg(long)]
    pi: Option<f64>,
    /// Fixed in-experiment probability (for --pi-grid sweeps).
    #[arg(long)]
    p: Option<f64>,
    /// Comma-separated treatment probabilities to sweep.
    #[arg(long, value_delimiter = ',')]
    pi_grid: Option<Vec<f64>>,
    /// Comma-separated in-experiment probabilities to sweep.
    #[arg(long, value_delimiter = ',')]
    p_grid: Option<Vec<f64>>,
    #[arg(long)]
    clustering: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "bernoulli-clusters")]
    cluster_mode: ClusterModeArg,
    #[arg(long)]
    reps: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    /// CSV output path (a manifest is written beside it).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TheoryCmd {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    params: PathBuf,
    #[command(flatten)]
    design: DesignArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EstimatorArg {
    Tau1,
    Tau2,
    Tau,
}

#[derive(Args)]
struct OracleCmd {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    params: PathBuf,
    #[command(flatten)]
    design: DesignArgs,
    #[arg(long, value_enum, default_value = "tau")]
    estimator: EstimatorArg,
    /// Abort if the enumeration would visit more atoms than this.
    #[arg(long)]
    max_atoms: Option<u128>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CrosscheckCmd {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    params: PathBuf,
    #[command(flatten)]
    design: DesignArgs,
    #[arg(long)]
    max_atoms: Option<u128>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let raw: Vec<std::ffi::OsString> = std::env::args_os().collect();
    let argv = match config::expand_args(raw) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are successes; everything else is usage.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) => 1,
        Error::Parse { .. }
        | Error::Io(_)
        | Error::SelfLoopsRejected { .. }
        | Error::MissingEdges { .. }
        | Error::Unbound(_)
        | Error::UnboundEdge { .. }
        | Error::UndefinedModularity
        | Error::UndefinedOverlap => 2,
        Error::BudgetExceeded { .. }
        | Error::DegenerateGroup(_)
        | Error::UnsupportedExactness => 3,
    }
}

fn init_workers(workers: Option<usize>) -> Result<(), Error> {
    let from_env = std::env::var("DYADTTE_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    if let Some(threads) = workers.or(from_env) {
        if threads == 0 {
            return Err(Error::InvalidArgument("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    }
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(())
        }
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, value: &serde_json::Value) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidArgument(format!("serialization: {e}")))?;
    text.push('\n');
    emit(out, &text)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Stats(cmd) => cmd_stats(cmd),
        Command::Cluster(cmd) => cmd_cluster(cmd),
        Command::GenParams(cmd) => cmd_gen_params(cmd),
        Command::Simulate(cmd) => cmd_simulate(cmd),
        Command::Sweep(cmd) => cmd_sweep(cmd),
        Command::Theory(cmd) => cmd_theory(cmd),
        Command::Oracle(cmd) => cmd_oracle(cmd),
        Command::Crosscheck(cmd) => cmd_crosscheck(cmd),
    }
}

fn load_params(g: &DirectedGraph, path: &Path) -> Result<DyadicParams<f64>, Error> {
    read_params_csv(g, path)
}

fn cmd_stats(cmd: StatsCmd) -> Result<(), Error> {
    let report = cmd.graph.load()?;
    let stats = report.graph.stats();
    let value = json!({
        "stats": stats,
        "duplicate_edges_removed": report.duplicate_edges,
        "graph_fingerprint": format!("{:016x}", report.graph.fingerprint()),
        "options": cmd.graph.options(),
        "file": cmd.graph.graph,
    });
    emit_json(cmd.out.as_deref(), &value)
}

fn cmd_cluster(cmd: ClusterCmd) -> Result<(), Error> {
    let report = cmd.graph.load()?;
    let clustering = louvain(&report.graph, cmd.resolution, cmd.seed)?;
    clustering.write_file(&cmd.out)?;
    let q = modularity(&report.graph, &clustering, cmd.resolution)?;
    let value = json!({
        "clusters": clustering.k(),
        "modularity": q,
        "resolution": cmd.resolution,
        "seed": cmd.seed,
        "out": cmd.out,
        "clustering_fingerprint": format!("{:016x}", clustering.fingerprint()),
    });
    emit_json(None, &value)
}

fn cmd_gen_params(cmd: GenParamsCmd) -> Result<(), Error> {
    let report = cmd.graph.load()?;
    let config = match cmd.regime {
        RegimeArg::Uniform => ParamConfig::UniformPaper,
        RegimeArg::Bernoulli => ParamConfig::BernoulliPaper,
        RegimeArg::Constants => {
            let need = |name: &str, v: Option<f64>| {
                v.ok_or_else(|| {
                    Error::InvalidArgument(format!("--regime constants needs --{name}"))
                })
            };
            ParamConfig::Constants {
                alpha: need("alpha", cmd.alpha)?,
                beta: need("beta", cmd.beta)?,
                gamma: need("gamma", cmd.gamma)?,
                zeta: need("zeta", cmd.zeta)?,
            }
        }
    };
    let params = generate_params::<f64>(&report.graph, &config, cmd.seed)?;
    write_params_csv(&report.graph, &params, &cmd.out)?;
    let value = json!({
        "edges": report.graph.edge_count(),
        "regime": params.meta.regime,
        "seed": cmd.seed,
        "tau_true": true_tte(&report.graph, &params)?,
        "params_fingerprint": format!("{:016x}", params.fingerprint()),
        "out": cmd.out,
    });
    emit_json(None, &value)
}

fn cmd_simulate(cmd: SimulateCmd) -> Result<(), Error> {
    init_workers(cmd.workers)?;
    let report = cmd.graph.load()?;
    let g = &report.graph;
    let params = load_params(g, &cmd.params)?;
    let design = cmd.design.build(g.n())?;

    if cmd.dump_assignment.is_some() || cmd.dump_outcomes.is_some() {
        let mut rng = substream(cmd.seed, 0);
        let assignment = design.draw(g.n(), &mut rng)?;
        if let Some(path) = &cmd.dump_assignment {
            assignment.write_csv(path)?;
        }
        if let Some(path) = &cmd.dump_outcomes {
            let out = outcomes(g, &params, &assignment.w)?;
            std::fs::write(path, outcomes_to_csv(&out))?;
        }
    }
    if let Some(path) = &cmd.dump_reps {
        let reports = replicate(g, &params, &design, cmd.reps, cmd.seed)?;
        std::fs::write(path, reports_to_csv(&reports))?;
    }

    let summary = monte_carlo(g, &params, &design, cmd.reps, cmd.seed)?;
    eprintln!("simulate: {} reps in {} ms", summary.reps, summary.wall_time_ms);
    let value = serde_json::to_value(&summary)
        .map_err(|e| Error::InvalidArgument(format!("serialization: {e}")))?;
    emit_json(cmd.out.as_deref(), &value)?;
    if let Some(out) = &cmd.out {
        let manifest = RunManifest::new(
            g,
            &params,
            design.clustering(),
            json!({
                "subcommand": "simulate",
                "design": design.kind_name(),
                "p": design.p(),
                "pi": design.pi(),
                "reps": cmd.reps,
                "graph": cmd.graph.graph,
                "params": cmd.params,
                "options": cmd.graph.options(),
            }),
            cmd.seed,
        );
        manifest.write(&manifest_path(out))?;
    }
    Ok(())
}

fn cmd_sweep(cmd: SweepCmd) -> Result<(), Error> {
    init_workers(cmd.workers)?;
    let report = cmd.graph.load()?;
    let g = &report.graph;
    let params = load_params(g, &cmd.params)?;

    let family = match cmd.design {
        DesignKind::Full => DesignFamily::Full,
        DesignKind::Subpop => DesignFamily::SubPop,
        DesignKind::Twostage => DesignFamily::TwoStage,
    };
    let grid = match (&cmd.pi_grid, &cmd.p_grid) {
        (Some(pis), None) => SweepGrid::Pi(pis.clone()),
        (None, Some(ps)) => SweepGrid::P(ps.clone()),
        _ => {
            return Err(Error::InvalidArgument(
                "pass exactly one of --pi-grid or --p-grid".into(),
            ))
        }
    };
    let needs_fixed_pi = matches!(grid, SweepGrid::P(_));
    let fixed_pi = match (needs_fixed_pi, cmd.pi) {
        (true, Some(pi)) => pi,
        (true, None) => {
            return Err(Error::InvalidArgument("--p-grid sweeps need --pi".into()))
        }
        (false, _) => cmd.pi.unwrap_or(0.5),
    };
    let fixed_p = match (family, &grid) {
        (DesignFamily::Full, _) => 1.0,
        (_, SweepGrid::Pi(_)) => cmd.p.ok_or_else(|| {
            Error::InvalidArgument("--pi-grid sweeps on this design need --p".into())
        })?,
        (_, SweepGrid::P(_)) => cmd.p.unwrap_or(1.0),
    };
    let clustering = cmd
        .clustering
        .as_ref()
        .map(|path| Clustering::read_file(path, g.n()))
        .transpose()?;
    if family == DesignFamily::TwoStage && clustering.is_none() {
        return Err(Error::InvalidArgument(
            "--design twostage needs --clustering".into(),
        ));
    }

    let spec = SweepSpec {
        family,
        grid,
        fixed_pi,
        fixed_p,
        clustering: clustering.clone(),
        mode: cmd.cluster_mode.into(),
        reps: cmd.reps,
        seed: cmd.seed,
    };
    let table = sweep(g, &params, &spec)?;
    emit(cmd.out.as_deref(), &table.to_csv())?;
    if let Some(out) = &cmd.out {
        let manifest = RunManifest::new(
            g,
            &params,
            clustering.as_ref(),
            json!({
                "subcommand": "sweep",
                "design": format!("{:?}", spec.family),
                "grid": spec.grid,
                "fixed_pi": spec.fixed_pi,
                "fixed_p": spec.fixed_p,
                "reps": spec.reps,
                "graph": cmd.graph.graph,
                "params": cmd.params,
                "clustering": cmd.clustering,
                "options": cmd.graph.options(),
            }),
            cmd.seed,
        );
        manifest.write(&manifest_path(out))?;
    }
    Ok(())
}

fn cmd_theory(cmd: TheoryCmd) -> Result<(), Error> {
    let report = cmd.graph.load()?;
    let g = &report.graph;
    let params = load_params(g, &cmd.params)?;
    let design = cmd.design.build(g.n())?;
    let theory = expected_for_design(g, &params, &design)?;
    let value = serde_json::to_value(&theory)
        .map_err(|e| Error::InvalidArgument(format!("serialization: {e}")))?;
    emit_json(cmd.out.as_deref(), &value)
}

fn cmd_oracle(cmd: OracleCmd) -> Result<(), Error> {
    let report = cmd.graph.load()?;
    let g = &report.graph;
    let params = load_params(g, &cmd.params)?;
    let design = cmd.design.build(g.n())?;
    let budget = cmd
        .max_atoms
        .map(|max_atoms| EnumerationBudget { max_atoms })
        .unwrap_or_default();
    let expectations = exact_expectations(g, &params, &design, &budget)?;
    let (name, value) = match cmd.estimator {
        EstimatorArg::Tau1 => ("tau1", expectations.get(EstimatorId::Tau1)),
        EstimatorArg::Tau2 => ("tau2", expectations.get(EstimatorId::Tau2)),
        EstimatorArg::Tau => ("tau", expectations.get(EstimatorId::Tau)),
    };
    let value = json!({
        "estimator": name,
        "expectation": value,
        "atoms": expectations.atoms.to_string(),
        "prob_mass_error": expectations.prob_mass_error,
        "design": design.kind_name(),
        "p": design.p(),
        "pi": design.pi(),
    });
    emit_json(cmd.out.as_deref(), &value)
}

fn cmd_crosscheck(cmd: CrosscheckCmd) -> Result<(), Error> {
    let report = cmd.graph.load()?;
    let g = &report.graph;
    let params = load_params(g, &cmd.params)?;
    let design = cmd.design.build(g.n())?;
    let budget = cmd
        .max_atoms
        .map(|max_atoms| EnumerationBudget { max_atoms })
        .unwrap_or_default();
    let check = crosscheck(g, &params, &design, &budget)?;
    // Overlap context is useful next to the aggregate diffs.
    let overlap = design
        .clustering()
        .map(|c| overlap_stats_weighted(g, c, &params))
        .transpose()
        .ok()
        .flatten();
    let mut value = serde_json::to_value(&check)
        .map_err(|e| Error::InvalidArgument(format!("serialization: {e}")))?;
    if let (Some(o), Some(map)) = (overlap, value.as_object_mut()) {
        map.insert(
            "overlap".into(),
            serde_json::to_value(o)
                .map_err(|e| Error::InvalidArgument(format!("serialization: {e}")))?,
        );
    }
    emit_json(cmd.out.as_deref(), &value)
}
