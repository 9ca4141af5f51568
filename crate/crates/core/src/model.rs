//! The bilinear dyadic outcome model.
//!
//! Every directed edge `(i, j)` carries a coefficient tuple `(alpha, beta,
//! gamma, zeta)`; its realized outcome under treatments `(w_i, w_j)` is
//!
//! ```text
//! z(i,j) = alpha + beta*w_i + gamma*w_j + zeta*w_i*w_j
//! ```
//!
//! A node's outcome `Y_j` sums `z` over incoming edges, its diffusion metric
//! `D_j` sums `z` over outgoing edges, and the ground-truth total treatment
//! effect is the per-capita sum of `beta + gamma + zeta` over edges. Non-edge
//! pairs carry an implicit zero and are never evaluated. Per-node self tuples
//! (`z(i,i)`) are an opt-in extension, off by default.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::design::substream;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Fnv1a, NodeId};
use crate::scalar::Scalar;

/// Coefficients of one dyadic outcome.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Coeffs<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub zeta: T,
}

impl<T: Scalar> Coeffs<T> {
    pub fn new(alpha: T, beta: T, gamma: T, zeta: T) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            zeta,
        }
    }

    /// Evaluates the outcome for source treatment `w_src` and destination
    /// treatment `w_dst`.
    #[inline]
    pub fn eval(&self, w_src: bool, w_dst: bool) -> T {
        let mut z = self.alpha;
        if w_src {
            z += self.beta;
        }
        if w_dst {
            z += self.gamma;
        }
        if w_src && w_dst {
            z += self.zeta;
        }
        z
    }

    /// Contribution of this edge to the total treatment effect.
    #[inline]
    pub fn effect(&self) -> T {
        self.beta + self.gamma + self.zeta
    }
}

/// How coefficients are produced.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ParamConfig<T> {
    /// `alpha = 1`, `beta ~ U(0, 0.5)`, `gamma ~ U(0, 1)`, `zeta ~ U(0, 0.5)`.
    UniformPaper,
    /// `alpha = 0`, `beta ~ Bern(0.25)`, `gamma ~ Bern(0.5)`, `zeta ~ Bern(0.25)`.
    BernoulliPaper,
    /// The same tuple on every edge.
    Constants {
        alpha: T,
        beta: T,
        gamma: T,
        zeta: T,
    },
    /// Load from a parameter CSV (see [`read_params_csv`]).
    FromFile { path: PathBuf },
}

impl<T: Scalar> ParamConfig<T> {
    fn regime_name(&self) -> String {
        match self {
            ParamConfig::UniformPaper => "uniform".into(),
            ParamConfig::BernoulliPaper => "bernoulli".into(),
            ParamConfig::Constants {
                alpha,
                beta,
                gamma,
                zeta,
            } => format!("constants({alpha},{beta},{gamma},{zeta})"),
            ParamConfig::FromFile { path } => format!("file({})", path.display()),
        }
    }
}

/// Generation provenance carried by a parameter set.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ParamsMeta {
    pub regime: String,
    pub seed: Option<u64>,
}

/// One coefficient tuple per edge of a specific graph, in canonical edge
/// order, plus optional per-node self tuples. Fixed for the lifetime of a
/// study; operations validate that the graph they are handed matches the one
/// the parameters were built for.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DyadicParams<T> {
    coeffs: Vec<Coeffs<T>>,
    self_coeffs: Option<Vec<Coeffs<T>>>,
    n: usize,
    graph_key: u64,
    pub meta: ParamsMeta,
}

/// Per-node outcome vectors for one assignment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutcomeVectors<T> {
    /// Sum of incoming dyadic outcomes per node.
    pub y: Vec<T>,
    /// Sum of outgoing dyadic outcomes per node (diffusion metric).
    pub d: Vec<T>,
}

/// Sums of each coefficient over edges.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CoeffSums<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub zeta: T,
}

impl<T: Scalar> DyadicParams<T> {
    /// Binds explicit per-edge coefficients (canonical edge order) to `g`.
    pub fn from_coeffs(g: &DirectedGraph, coeffs: Vec<Coeffs<T>>) -> Result<Self> {
        if coeffs.len() != g.edge_count() {
            return Err(Error::Unbound(format!(
                "{} coefficient tuples for {} edges",
                coeffs.len(),
                g.edge_count()
            )));
        }
        Ok(Self {
            coeffs,
            self_coeffs: None,
            n: g.n(),
            graph_key: g.fingerprint(),
            meta: ParamsMeta::default(),
        })
    }

    /// Attaches per-node self tuples (`z(i,i)`), enabling the self-loop
    /// extension.
    pub fn with_self_coeffs(mut self, self_coeffs: Vec<Coeffs<T>>) -> Result<Self> {
        if self_coeffs.len() != self.n {
            return Err(Error::Unbound(format!(
                "{} self tuples for {} nodes",
                self_coeffs.len(),
                self.n
            )));
        }
        self.self_coeffs = Some(self_coeffs);
        Ok(self)
    }

    pub fn has_self_coeffs(&self) -> bool {
        self.self_coeffs.is_some()
    }

    /// Node count of the graph these parameters are bound to.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn self_coeffs(&self) -> Option<&[Coeffs<T>]> {
        self.self_coeffs.as_deref()
    }

    /// Edge coefficients in canonical edge order.
    pub fn coeffs(&self) -> &[Coeffs<T>] {
        &self.coeffs
    }

    pub(crate) fn bind_check(&self, g: &DirectedGraph) -> Result<()> {
        if g.n() != self.n || g.edge_count() != self.coeffs.len() || g.fingerprint() != self.graph_key
        {
            return Err(Error::Unbound(
                "graph fingerprint differs from the one the parameters were generated for".into(),
            ));
        }
        Ok(())
    }

    pub fn edge_sums(&self) -> CoeffSums<T> {
        let mut s = CoeffSums {
            alpha: T::zero(),
            beta: T::zero(),
            gamma: T::zero(),
            zeta: T::zero(),
        };
        for c in &self.coeffs {
            s.alpha += c.alpha;
            s.beta += c.beta;
            s.gamma += c.gamma;
            s.zeta += c.zeta;
        }
        s
    }

    /// `sum_i (beta_ii + gamma_ii + zeta_ii)` when self tuples are enabled.
    pub fn self_effect_sum(&self) -> Option<T> {
        self.self_coeffs
            .as_ref()
            .map(|cs| cs.iter().map(|c| c.effect()).sum())
    }

    /// True when every `beta` and `zeta` (edge-level) is nonnegative.
    pub fn nonnegative_interactions(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.beta >= T::zero() && c.zeta >= T::zero())
    }

    /// Structural fingerprint of the parameter values, for run manifests.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write_u64(self.n as u64);
        h.write_u64(self.graph_key);
        let mut put = |c: &Coeffs<T>| {
            for v in [c.alpha, c.beta, c.gamma, c.zeta] {
                h.write_u64(v.as_real().to_bits());
            }
        };
        self.coeffs.iter().for_each(&mut put);
        if let Some(selfs) = &self.self_coeffs {
            selfs.iter().for_each(&mut put);
        }
        h.finish()
    }
}

/// Draws one coefficient tuple per edge, i.i.d. per the config, in canonical
/// edge order so results do not depend on scheduling. Deterministic for a
/// fixed `(graph, config, seed)`.
pub fn generate_params<T: Scalar>(
    g: &DirectedGraph,
    config: &ParamConfig<T>,
    seed: u64,
) -> Result<DyadicParams<T>> {
    let coeffs: Vec<Coeffs<T>> = match config {
        ParamConfig::FromFile { path } => return read_params_csv(g, path),
        ParamConfig::Constants {
            alpha,
            beta,
            gamma,
            zeta,
        } => vec![Coeffs::new(*alpha, *beta, *gamma, *zeta); g.edge_count()],
        ParamConfig::UniformPaper => {
            let mut rng = substream(seed, 0);
            (0..g.edge_count())
                .map(|_| {
                    Coeffs::new(
                        T::one(),
                        T::from_real(rng.random::<f64>() * 0.5),
                        T::from_real(rng.random::<f64>()),
                        T::from_real(rng.random::<f64>() * 0.5),
                    )
                })
                .collect()
        }
        ParamConfig::BernoulliPaper => {
            let mut rng = substream(seed, 0);
            let coin = |rng: &mut rand_chacha::ChaCha8Rng, p: f64| {
                if rng.random_bool(p) {
                    T::one()
                } else {
                    T::zero()
                }
            };
            (0..g.edge_count())
                .map(|_| {
                    let beta = coin(&mut rng, 0.25);
                    let gamma = coin(&mut rng, 0.5);
                    let zeta = coin(&mut rng, 0.25);
                    Coeffs::new(T::zero(), beta, gamma, zeta)
                })
                .collect()
        }
    };
    let mut params = DyadicParams::from_coeffs(g, coeffs)?;
    params.meta = ParamsMeta {
        regime: config.regime_name(),
        seed: match config {
            ParamConfig::Constants { .. } | ParamConfig::FromFile { .. } => None,
            _ => Some(seed),
        },
    };
    Ok(params)
}

/// Evaluates `z(i,j)` for a bound edge (or bound self pair).
pub fn z_value<T: Scalar>(
    g: &DirectedGraph,
    params: &DyadicParams<T>,
    src: NodeId,
    dst: NodeId,
    w_src: bool,
    w_dst: bool,
) -> Result<T> {
    params.bind_check(g)?;
    if src == dst {
        if let Some(selfs) = &params.self_coeffs {
            if src.index() < params.n {
                return Ok(selfs[src.index()].eval(w_src, w_dst));
            }
        }
        return Err(Error::UnboundEdge {
            src: src.0,
            dst: dst.0,
        });
    }
    match g.edge_index(src, dst) {
        Some(idx) => Ok(params.coeffs[idx].eval(w_src, w_dst)),
        None => Err(Error::UnboundEdge {
            src: src.0,
            dst: dst.0,
        }),
    }
}

/// Aggregates dyadic outcomes into per-node `Y` and `D` for one treatment
/// vector. Accumulation runs in canonical edge order.
pub fn outcomes<T: Scalar>(
    g: &DirectedGraph,
    params: &DyadicParams<T>,
    w: &[bool],
) -> Result<OutcomeVectors<T>> {
    params.bind_check(g)?;
    if w.len() != g.n() {
        return Err(Error::InvalidArgument(format!(
            "treatment vector length {} does not match n = {}",
            w.len(),
            g.n()
        )));
    }
    let mut y = vec![T::zero(); g.n()];
    let mut d = vec![T::zero(); g.n()];
    for (&(i, j), c) in g.edges().iter().zip(&params.coeffs) {
        let z = c.eval(w[i.index()], w[j.index()]);
        y[j.index()] += z;
        d[i.index()] += z;
    }
    if let Some(selfs) = &params.self_coeffs {
        for (i, c) in selfs.iter().enumerate() {
            let z = c.eval(w[i], w[i]);
            y[i] += z;
            d[i] += z;
        }
    }
    Ok(OutcomeVectors { y, d })
}

/// Ground-truth total treatment effect: the per-capita sum of
/// `beta + gamma + zeta` over edges (and self tuples when enabled).
pub fn true_tte<T: Scalar>(g: &DirectedGraph, params: &DyadicParams<T>) -> Result<T> {
    params.bind_check(g)?;
    let mut total: T = params.coeffs.iter().map(|c| c.effect()).sum();
    if let Some(selfs) = &params.self_coeffs {
        total += selfs.iter().map(|c| c.effect()).sum();
    }
    Ok(total / T::from_real(g.n() as f64))
}

/// Serializes parameters as CSV: `src,dst,alpha,beta,gamma,zeta`, edge rows
/// in canonical order, then self rows (`src == dst`) by node id.
pub fn params_to_csv<T: Scalar>(g: &DirectedGraph, params: &DyadicParams<T>) -> Result<String> {
    params.bind_check(g)?;
    let mut out = String::from("src,dst,alpha,beta,gamma,zeta\n");
    for (&(i, j), c) in g.edges().iter().zip(&params.coeffs) {
        writeln!(out, "{},{},{},{},{},{}", i, j, c.alpha, c.beta, c.gamma, c.zeta).unwrap();
    }
    if let Some(selfs) = &params.self_coeffs {
        for (i, c) in selfs.iter().enumerate() {
            writeln!(out, "{i},{i},{},{},{},{}", c.alpha, c.beta, c.gamma, c.zeta).unwrap();
        }
    }
    Ok(out)
}

pub fn write_params_csv<T: Scalar>(
    g: &DirectedGraph,
    params: &DyadicParams<T>,
    path: &Path,
) -> Result<()> {
    let mut f = File::create(path)?;
    f.write_all(params_to_csv(g, params)?.as_bytes())?;
    Ok(())
}

/// Reads a parameter CSV and binds it to `g`. Every edge of `g` must appear
/// exactly once; rows with `src == dst` become self tuples; rows naming a
/// pair that is not an edge are an error.
pub fn read_params_csv<T: Scalar>(g: &DirectedGraph, path: &Path) -> Result<DyadicParams<T>> {
    let reader = BufReader::new(File::open(path)?);
    parse_params_csv(g, reader, &format!("file({})", path.display()))
}

pub fn parse_params_csv<T: Scalar, R: BufRead>(
    g: &DirectedGraph,
    reader: R,
    regime: &str,
) -> Result<DyadicParams<T>> {
    let mut coeffs: Vec<Option<Coeffs<T>>> = vec![None; g.edge_count()];
    let mut self_coeffs: Option<Vec<Coeffs<T>>> = None;
    let mut seen_data = false;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if !seen_data && fields.first() == Some(&"src") {
            continue;
        }
        seen_data = true;
        if fields.len() != 6 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected 6 comma-separated fields, got {}", fields.len()),
            });
        }
        let id = |s: &str| -> Result<u32> {
            s.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("not a node id: {s:?}"),
            })
        };
        let val = |s: &str| -> Result<T> {
            s.parse::<f64>().map(T::from_real).map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("not a number: {s:?}"),
            })
        };
        let (src, dst) = (id(fields[0])?, id(fields[1])?);
        if src as usize >= g.n() || dst as usize >= g.n() {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("node id out of range: {src} or {dst}"),
            });
        }
        let tuple = Coeffs::new(val(fields[2])?, val(fields[3])?, val(fields[4])?, val(fields[5])?);
        if src == dst {
            self_coeffs
                .get_or_insert_with(|| vec![Coeffs::default(); g.n()])[src as usize] = tuple;
        } else {
            match g.edge_index(NodeId(src), NodeId(dst)) {
                Some(idx) => coeffs[idx] = Some(tuple),
                None => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("({src}, {dst}) is not an edge of the graph"),
                    })
                }
            }
        }
    }

    let missing: Vec<usize> = coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.is_none().then_some(i))
        .collect();
    if !missing.is_empty() {
        let (i, j) = g.edges()[missing[0]];
        return Err(Error::MissingEdges {
            missing: missing.len(),
            first: format!("({i}, {j})"),
        });
    }

    let mut params = DyadicParams::from_coeffs(g, coeffs.into_iter().flatten().collect())?;
    if let Some(selfs) = self_coeffs {
        params = params.with_self_coeffs(selfs)?;
    }
    params.meta = ParamsMeta {
        regime: regime.to_string(),
        seed: None,
    };
    Ok(params)
}

/// Writes per-node outcomes as CSV `node,Y,D`.
pub fn outcomes_to_csv<T: Scalar>(out: &OutcomeVectors<T>) -> String {
    let mut s = String::from("node,Y,D\n");
    for (i, (y, d)) in out.y.iter().zip(&out.d).enumerate() {
        writeln!(s, "{i},{y},{d}").unwrap();
    }
    s
}
