//! Seeded Monte Carlo engine, sweep runner, and synthetic graphs.
//!
//! Replications are embarrassingly parallel: rep `r` draws from substream
//! `r` of the master seed, per-rep results are collected in rep order, and
//! the reduction runs sequentially over that order, so summaries are
//! bit-identical for any worker count. Sweeps derive one master seed per
//! grid cell from the sweep seed.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::time::{Instant, SystemTime};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::Clustering;
use crate::design::{mix_seed, substream, ClusterSamplingMode, Design};
use crate::error::{Error, Result};
use crate::estimator::{report, EstimateReport};
use crate::graph::DirectedGraph;
use crate::model::{outcomes, true_tte, DyadicParams};
use crate::scalar::Scalar;
use crate::theory::{expected_for_design, TheoryReport};

/// Monte Carlo summary of one estimator.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct McEstimatorSummary {
    pub mean: f64,
    /// Standard error of the mean: sample std over sqrt(reps).
    pub se: f64,
    /// `mean - tau_true`.
    pub bias: f64,
    /// `bias / tau_true`; absent when the true effect is zero.
    pub rel_bias: Option<f64>,
    pub theory_bias_exact: Option<f64>,
    pub theory_bias_paper: Option<f64>,
    /// `(bias - theory_bias_exact) / se`.
    pub z: Option<f64>,
}

/// Summary of one Monte Carlo run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct McSummary {
    pub design: String,
    pub n: usize,
    pub p: f64,
    pub pi: f64,
    pub reps: u64,
    /// Draws without both a treated and a control unit in the experiment;
    /// excluded from the difference-in-means aggregate only.
    pub degenerate_reps: u64,
    pub seed: u64,
    pub tau_true: f64,
    pub tau1: McEstimatorSummary,
    pub tau2: McEstimatorSummary,
    pub tau: McEstimatorSummary,
    pub dim: McEstimatorSummary,
    /// Not serialized: keeps rerun outputs byte-identical.
    #[serde(skip)]
    pub wall_time_ms: u128,
}

/// Runs `reps` independent draws and returns the per-rep estimate reports in
/// rep order.
pub fn replicate<T: Scalar>(
    g: &DirectedGraph,
    params: &DyadicParams<T>,
    design: &Design,
    reps: u64,
    seed: u64,
) -> Result<Vec<EstimateReport<T>>> {
    if reps == 0 {
        return Err(Error::InvalidArgument("reps must be at least 1".into()));
    }
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = substream(seed, rep);
            let assignment = design.draw(g.n(), &mut rng)?;
            let out = outcomes(g, params, &assignment.w)?;
            report(&out.y, &out.d, &assignment, design)
        })
        .collect()
}

#[derive(Clone, Copy, Default)]
struct Welford {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    fn se(&self) -> f64 {
        if self.count < 2.0 {
            return 0.0;
        }
        (self.m2 / (self.count - 1.0) / self.count).sqrt()
    }
}

fn summarize_estimator(
    stats: &Welford,
    tau: f64,
    theory_bias_exact: Option<f64>,
    theory_bias_paper: Option<f64>,
) -> McEstimatorSummary {
    let bias = stats.mean - tau;
    let se = stats.se();
    McEstimatorSummary {
        mean: stats.mean,
        se,
        bias,
        rel_bias: (tau != 0.0).then(|| bias / tau),
        theory_bias_exact,
        theory_bias_paper,
        z: match (theory_bias_exact, se > 0.0) {
            (Some(tb), true) => Some((bias - tb) / se),
            _ => None,
        },
    }
}

/// Exact and figure-style bias columns per estimator, from a theory report.
fn theory_bias_columns<T: Scalar>(
    theory: &TheoryReport<T>,
) -> [(Option<f64>, Option<f64>); 3] {
    let exact = &theory.edge_exact;
    match &theory.aggregate {
        Some(agg) => [
            (
                Some(exact.tau1.bias.as_real()),
                Some(agg.node.form.tau1.bias.as_real()),
            ),
            (
                Some(exact.tau2.bias.as_real()),
                Some(agg.node.form.tau2.bias.as_real()),
            ),
            (
                Some(exact.tau.bias.as_real()),
                Some(agg.node.tau_bias_display.as_real()),
            ),
        ],
        None => [
            (
                Some(exact.tau1.bias.as_real()),
                Some(exact.tau1.bias.as_real()),
            ),
            (
                Some(exact.tau2.bias.as_real()),
                Some(exact.tau2.bias.as_real()),
            ),
            (
                Some(exact.tau.bias.as_real()),
                Some(exact.tau.bias.as_real()),
            ),
        ],
    }
}

/// Runs a full Monte Carlo study and reduces it to an [`McSummary`].
///
/// Closed-form bias columns join automatically when the design has them;
/// the fixed-fraction cluster mode runs without theory columns.
pub fn monte_carlo<T: Scalar>(
    g: &DirectedGraph,
    params: &DyadicParams<T>,
    design: &Design,
    reps: u64,
    seed: u64,
) -> Result<McSummary> {
    let start = Instant::now();
    let tau = true_tte(g, params)?.as_real();
    let theory = match expected_for_design(g, params, design) {
        Ok(t) => Some(t),
        Err(Error::UnsupportedExactness) => None,
        Err(e) => return Err(e),
    };

    let reports = replicate(g, params, design, reps, seed)?;

    let mut w1 = Welford::default();
    let mut w2 = Welford::default();
    let mut wt = Welford::default();
    let mut wdim = Welford::default();
    let mut degenerate = 0u64;
    for r in &reports {
        w1.push(r.tau1.as_real());
        w2.push(r.tau2.as_real());
        wt.push(r.tau.as_real());
        match r.dim {
            Some(v) => wdim.push(v.as_real()),
            None => degenerate += 1,
        }
    }

    let [b1, b2, bt] = match &theory {
        Some(t) => theory_bias_columns(t),
        None => [(None, None); 3],
    };

    Ok(McSummary {
        design: design.kind_name().into(),
        n: g.n(),
        p: design.p(),
        pi: design.pi(),
        reps,
        degenerate_reps: degenerate,
        seed,
        tau_true: tau,
        tau1: summarize_estimator(&w1, tau, b1.0, b1.1),
        tau2: summarize_estimator(&w2, tau, b2.0, b2.1),
        tau: summarize_estimator(&wt, tau, bt.0, bt.1),
        dim: summarize_estimator(&wdim, tau, None, None),
        wall_time_ms: start.elapsed().as_millis(),
    })
}

/// Per-rep estimate reports as CSV.
pub fn reports_to_csv<T: Scalar>(reports: &[EstimateReport<T>]) -> String {
    let mut s = String::from(
        "rep,tau1,tau2,tau,dim,n_in_experiment,n_treated,n_control,var_tau,ci_low,ci_high,degenerate\n",
    );
    let opt = |v: Option<T>| v.map(|x| x.to_string()).unwrap_or_default();
    for (i, r) in reports.iter().enumerate() {
        writeln!(
            s,
            "{i},{},{},{},{},{},{},{},{},{},{},{}",
            r.tau1,
            r.tau2,
            r.tau,
            opt(r.dim),
            r.n_in_experiment,
            r.n_treated,
            r.n_control,
            opt(r.var_tau),
            opt(r.ci_low),
            opt(r.ci_high),
            r.degenerate() as u8,
        )
        .unwrap();
    }
    s
}

/// Which design family a sweep runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DesignFamily {
    Full,
    SubPop,
    TwoStage,
}

/// The swept axis and its grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum SweepGrid {
    Pi(Vec<f64>),
    P(Vec<f64>),
}

/// A reproducible sweep: one Monte Carlo run per grid value.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub family: DesignFamily,
    pub grid: SweepGrid,
    /// Treatment probability for `P` grids.
    pub fixed_pi: f64,
    /// In-experiment probability for `Pi` grids on sub-population and
    /// two-stage designs.
    pub fixed_p: f64,
    pub clustering: Option<Clustering>,
    pub mode: ClusterSamplingMode,
    pub reps: u64,
    pub seed: u64,
}

/// One sweep output row (one grid cell, one estimator).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub design: String,
    pub grid_value: f64,
    pub estimator: String,
    pub tau_true: f64,
    pub emp_mean: f64,
    pub emp_se: f64,
    pub bias: f64,
    pub rel_bias: Option<f64>,
    pub theory_bias_exact: Option<f64>,
    pub theory_bias_paper: Option<f64>,
    pub z: Option<f64>,
    pub reps: u64,
    pub degenerate: u64,
    pub seed: u64,
}

/// All rows of a sweep, plus the per-cell summaries they came from.
#[derive(Clone, Debug)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub cells: Vec<McSummary>,
}

pub const SWEEP_CSV_HEADER: &str = "design,grid_value,estimator,tau_true,emp_mean,emp_se,bias,rel_bias,theory_bias_exact,theory_bias_paper,z,reps,degenerate,seed";

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(SWEEP_CSV_HEADER);
        s.push('\n');
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.design,
                r.grid_value,
                r.estimator,
                r.tau_true,
                r.emp_mean,
                r.emp_se,
                r.bias,
                opt(r.rel_bias),
                opt(r.theory_bias_exact),
                opt(r.theory_bias_paper),
                opt(r.z),
                r.reps,
                r.degenerate,
                r.seed,
            )
            .unwrap();
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}

impl SweepSpec {
    fn design_for(&self, value: f64) -> Result<Design> {
        let (p, pi) = match self.grid {
            SweepGrid::Pi(_) => (self.fixed_p, value),
            SweepGrid::P(_) => (value, self.fixed_pi),
        };
        match self.family {
            DesignFamily::Full => {
                if matches!(self.grid, SweepGrid::P(_)) {
                    return Err(Error::InvalidArgument(
                        "the full-population design has no in-experiment probability to sweep"
                            .into(),
                    ));
                }
                Design::full(pi)
            }
            DesignFamily::SubPop => Design::subpop(p, pi),
            DesignFamily::TwoStage => {
                let clustering = self.clustering.clone().ok_or_else(|| {
                    Error::InvalidArgument("two-stage sweep needs a clustering".into())
                })?;
                Design::two_stage(p, pi, clustering, self.mode)
            }
        }
    }
}

/// Runs a sweep: one seeded Monte Carlo per grid value, four estimator rows
/// per cell.
pub fn sweep<T: Scalar>(
    g: &DirectedGraph,
    params: &DyadicParams<T>,
    spec: &SweepSpec,
) -> Result<SweepTable> {
    let values = match &spec.grid {
        SweepGrid::Pi(v) | SweepGrid::P(v) => v.clone(),
    };
    if values.is_empty() {
        return Err(Error::InvalidArgument("sweep grid is empty".into()));
    }
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for (cell_idx, &value) in values.iter().enumerate() {
        let design = spec.design_for(value)?;
        let cell_seed = mix_seed(spec.seed, cell_idx as u64);
        let summary = monte_carlo(g, params, &design, spec.reps, cell_seed)?;
        for (name, est) in [
            ("tau1", &summary.tau1),
            ("tau2", &summary.tau2),
            ("tau", &summary.tau),
            ("dim", &summary.dim),
        ] {
            rows.push(SweepRow {
                design: summary.design.clone(),
                grid_value: value,
                estimator: name.into(),
                tau_true: summary.tau_true,
                emp_mean: est.mean,
                emp_se: est.se,
                bias: est.bias,
                rel_bias: est.rel_bias,
                theory_bias_exact: est.theory_bias_exact,
                theory_bias_paper: est.theory_bias_paper,
                z: est.z,
                reps: summary.reps,
                degenerate: summary.degenerate_reps,
                seed: summary.seed,
            });
        }
        cells.push(summary);
    }
    Ok(SweepTable { rows, cells })
}

/// Synthetic graph family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SyntheticKind {
    ErdosRenyi,
    ConfigPowerlaw,
}

/// Generates a simple symmetrized directed graph with roughly the requested
/// average total degree. Deterministic per seed.
pub fn generate_synthetic(
    kind: SyntheticKind,
    n: usize,
    avg_degree: f64,
    seed: u64,
) -> Result<DirectedGraph> {
    use rand::seq::SliceRandom;
    use rand::Rng;

    if n < 2 {
        return Err(Error::InvalidArgument(format!("n = {n} must be at least 2")));
    }
    if !(0.0..n as f64).contains(&avg_degree) {
        return Err(Error::InvalidArgument(format!(
            "avg_degree = {avg_degree} infeasible for n = {n}"
        )));
    }
    let mut rng = substream(seed, 0);
    let mut undirected: Vec<(u32, u32)> = Vec::new();
    match kind {
        SyntheticKind::ErdosRenyi => {
            let q = (avg_degree / (n as f64 - 1.0)).min(1.0);
            for i in 0..n as u32 {
                for j in (i + 1)..n as u32 {
                    if rng.random_bool(q) {
                        undirected.push((i, j));
                    }
                }
            }
        }
        SyntheticKind::ConfigPowerlaw => {
            // Pareto(2.5) target degrees scaled to the requested mean, paired
            // by the configuration model; self and duplicate pairs dropped.
            let x_min = avg_degree / 3.0;
            let mut stubs: Vec<u32> = Vec::new();
            for i in 0..n as u32 {
                let u: f64 = rng.random::<f64>().max(1e-12);
                let raw = x_min * u.powf(-1.0 / 1.5);
                let degree = (raw.round() as usize).clamp(1, n - 1);
                stubs.extend(std::iter::repeat_n(i, degree));
            }
            if stubs.len() % 2 == 1 {
                stubs.pop();
            }
            stubs.shuffle(&mut rng);
            let mut seen = std::collections::HashSet::new();
            for pair in stubs.chunks_exact(2) {
                let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
                if a != b && seen.insert((a, b)) {
                    undirected.push((a, b));
                }
            }
        }
    }
    let edges: Vec<(u32, u32)> = undirected
        .into_iter()
        .flat_map(|(a, b)| [(a, b), (b, a)])
        .collect();
    DirectedGraph::from_edges(n, edges)
}

/// Reproducibility stamp written beside sweep and simulation outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub graph_fingerprint: String,
    pub params_fingerprint: String,
    pub clustering_fingerprint: Option<String>,
    /// Echo of the run configuration.
    pub command: serde_json::Value,
    pub seed: u64,
    pub version: String,
    /// Wall-clock stamp; the only field expected to differ between reruns.
    pub created_unix: u64,
}

impl RunManifest {
    pub fn new<T: Scalar>(
        g: &DirectedGraph,
        params: &DyadicParams<T>,
        clustering: Option<&Clustering>,
        command: serde_json::Value,
        seed: u64,
    ) -> Self {
        Self {
            graph_fingerprint: format!("{:016x}", g.fingerprint()),
            params_fingerprint: format!("{:016x}", params.fingerprint()),
            clustering_fingerprint: clustering.map(|c| format!("{:016x}", c.fingerprint())),
            command,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            created_unix: SystemTime::now()
                .duration_since(SystemTime::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = File::create(path)?;
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidArgument(format!("manifest serialization: {e}")))?;
        f.write_all(text.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

/// `<output>.manifest.json` next to an output file.
pub fn manifest_path(out: &Path) -> std::path::PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_params, Coeffs, ParamConfig};

    fn two_node() -> (DirectedGraph, DyadicParams<f64>) {
        let g = DirectedGraph::from_edges(2, [(0, 1)]).unwrap();
        let p =
            DyadicParams::from_coeffs(&g, vec![Coeffs::new(1.0, 0.5, 1.0, 0.5)]).unwrap();
        (g, p)
    }

    #[test]
    fn monte_carlo_two_node_full() {
        let (g, p) = two_node();
        let design = Design::full(0.5).unwrap();
        let s = monte_carlo(&g, &p, &design, 100_000, 12).unwrap();
        assert!(s.tau.se > 0.0);
        assert!(
            s.tau.bias.abs() <= 3.0 * s.tau.se,
            "bias {} vs 3se {}",
            s.tau.bias,
            3.0 * s.tau.se
        );
        assert_eq!(s.tau.theory_bias_exact, Some(0.0));
        // Half the draws are degenerate for n = 2 (WW or CC).
        assert!(s.degenerate_reps > 0);
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let (g, p) = two_node();
        let design = Design::subpop(0.6, 0.4).unwrap();
        let a = monte_carlo(&g, &p, &design, 2_000, 7).unwrap();
        let b = monte_carlo(&g, &p, &design, 2_000, 7).unwrap();
        assert_eq!(a.tau.mean.to_bits(), b.tau.mean.to_bits());
        assert_eq!(a.tau1.se.to_bits(), b.tau1.se.to_bits());
        let c = monte_carlo(&g, &p, &design, 2_000, 8).unwrap();
        assert_ne!(a.tau.mean.to_bits(), c.tau.mean.to_bits());
    }

    #[test]
    fn monte_carlo_zero_interaction_unbiased_under_any_design() {
        let g = generate_synthetic(SyntheticKind::ErdosRenyi, 60, 6.0, 3).unwrap();
        let params = generate_params::<f64>(
            &g,
            &ParamConfig::Constants {
                alpha: 1.0,
                beta: 0.4,
                gamma: 0.6,
                zeta: 0.0,
            },
            0,
        )
        .unwrap();
        let design = Design::subpop(0.5, 0.3).unwrap();
        let s = monte_carlo(&g, &params, &design, 4_000, 21).unwrap();
        assert!(s.tau.bias.abs() <= 4.0 * s.tau.se);
        assert!(s.tau.theory_bias_exact.unwrap().abs() < 1e-12);
    }

    #[test]
    fn sweep_layout_and_determinism() {
        let (g, p) = two_node();
        let spec = SweepSpec {
            family: DesignFamily::Full,
            grid: SweepGrid::Pi(vec![0.3, 0.5, 0.7]),
            fixed_pi: 0.5,
            fixed_p: 1.0,
            clustering: None,
            mode: ClusterSamplingMode::BernoulliClusters,
            reps: 500,
            seed: 5,
        };
        let t1 = sweep(&g, &p, &spec).unwrap();
        let t2 = sweep(&g, &p, &spec).unwrap();
        assert_eq!(t1.rows.len(), 12);
        assert_eq!(t1.to_csv(), t2.to_csv());
        assert!(t1.to_csv().starts_with(SWEEP_CSV_HEADER));
        // Distinct cells use distinct derived seeds.
        assert_ne!(t1.cells[0].seed, t1.cells[1].seed);
        // Theory columns add: bias(tau) = bias(tau1) + bias(tau2) + tau.
        for cell in &t1.cells {
            let lhs = cell.tau.theory_bias_exact.unwrap();
            let rhs = cell.tau1.theory_bias_exact.unwrap()
                + cell.tau2.theory_bias_exact.unwrap()
                + cell.tau_true;
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_fraction_runs_without_theory_columns() {
        let (g, p) = two_node();
        let design = Design::two_stage(
            0.5,
            0.5,
            crate::clustering::Clustering::singletons(2),
            ClusterSamplingMode::FixedFraction,
        )
        .unwrap();
        let s = monte_carlo(&g, &p, &design, 500, 3).unwrap();
        assert!(s.tau.theory_bias_exact.is_none());
        assert!(s.tau.z.is_none());
        assert!(s.tau.mean.is_finite());
    }

    #[test]
    fn sweep_rejects_p_grid_on_full_design() {
        let (g, p) = two_node();
        let spec = SweepSpec {
            family: DesignFamily::Full,
            grid: SweepGrid::P(vec![0.5]),
            fixed_pi: 0.5,
            fixed_p: 1.0,
            clustering: None,
            mode: ClusterSamplingMode::BernoulliClusters,
            reps: 10,
            seed: 0,
        };
        assert!(sweep(&g, &p, &spec).is_err());
    }

    #[test]
    fn erdos_renyi_edge_count_near_expectation() {
        let g = generate_synthetic(SyntheticKind::ErdosRenyi, 100, 10.0, 42).unwrap();
        let expected = 1_000.0; // n * avg_degree directed edges
        let got = g.edge_count() as f64;
        assert!(
            (got - expected).abs() < 0.2 * expected,
            "directed edges {got} not within 20% of {expected}"
        );
    }

    #[test]
    fn synthetic_zero_degree_is_edgeless() {
        let g = generate_synthetic(SyntheticKind::ErdosRenyi, 10, 0.0, 1).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn synthetic_graphs_are_seed_deterministic() {
        for kind in [SyntheticKind::ErdosRenyi, SyntheticKind::ConfigPowerlaw] {
            let a = generate_synthetic(kind, 200, 8.0, 9).unwrap();
            let b = generate_synthetic(kind, 200, 8.0, 9).unwrap();
            assert_eq!(a.edges(), b.edges());
            let c = generate_synthetic(kind, 200, 8.0, 10).unwrap();
            assert_ne!(a.edges(), c.edges());
        }
    }

    #[test]
    fn synthetic_infeasible_degree_rejected() {
        assert!(generate_synthetic(SyntheticKind::ErdosRenyi, 10, 10.0, 1).is_err());
        assert!(generate_synthetic(SyntheticKind::ErdosRenyi, 1, 0.0, 1).is_err());
    }

    #[test]
    fn powerlaw_graph_is_simple_and_symmetric() {
        let g = generate_synthetic(SyntheticKind::ConfigPowerlaw, 300, 10.0, 4).unwrap();
        for &(i, j) in g.edges() {
            assert_ne!(i, j);
            assert!(g.edge_index(j, i).is_some());
        }
        let mut sorted = g.edges().to_vec();
        sorted.dedup();
        assert_eq!(sorted.len(), g.edge_count());
    }

    #[test]
    fn reports_csv_has_fixed_schema() {
        let (g, p) = two_node();
        let design = Design::full(0.5).unwrap();
        let reports = replicate(&g, &p, &design, 3, 1).unwrap();
        let csv = reports_to_csv(&reports);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "rep,tau1,tau2,tau,dim,n_in_experiment,n_treated,n_control,var_tau,ci_low,ci_high,degenerate"
        );
        assert_eq!(lines.count(), 3);
    }

    #[test]
    fn manifest_path_appends_suffix() {
        assert_eq!(
            manifest_path(Path::new("/tmp/out.csv")),
            Path::new("/tmp/out.csv.manifest.json")
        );
    }
}
