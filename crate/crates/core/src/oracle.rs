//! Exact estimator expectations by exhaustive enumeration of the
//! randomization space.
//!
//! On small instances every realizable `(V, W)` configuration ("atom") is
//! visited with its exact probability and the estimators are evaluated
//! through the production code path, making this the ground-truth
//! adjudicator for the closed forms in [`crate::theory`]. Atom spaces:
//!
//! - full population: `2^n` treatment vectors
//! - sub-population: `3^n` unit states `(V,W) in {(0,0),(1,0),(1,1)}` with
//!   probabilities `1-p`, `p(1-pi)`, `p*pi` (the fourth state has
//!   probability zero)
//! - two-stage (Bernoulli cluster sampling): `2^k` cluster patterns times
//!   `2^(included units)` treatment vectors
//!
//! Degenerate atoms (nobody in the experiment) contribute the estimators'
//! literal values there, i.e. zero sums, so the oracle targets the same
//! functional a Monte Carlo run estimates. The difference in means has
//! undefined atoms and is excluded. Probabilities are products (log-free)
//! and the reduction is Neumaier-compensated.

use serde::{Deserialize, Serialize};

use crate::design::{ClusterSamplingMode, Design};
use crate::error::{Error, Result};
use crate::estimator::{ht_diffusion, ht_upstream};
use crate::graph::DirectedGraph;
use crate::model::DyadicParams;
use crate::scalar::{CompensatedSum, Scalar};
use crate::theory::{expected_for_design, TheoryForm, TheoryReport};

/// Cap on the number of atoms an enumeration may visit. Values above
/// `2^62` are treated as `2^62`; the bit-mask enumeration does not extend
/// past that.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EnumerationBudget {
    pub max_atoms: u128,
}

impl EnumerationBudget {
    fn effective(&self) -> u128 {
        self.max_atoms.min(1 << 62)
    }
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self {
            max_atoms: 1 << 24,
        }
    }
}

/// Which estimator an expectation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimatorId {
    Tau1,
    Tau2,
    Tau,
}

/// Exact expectations of the three estimators under one design.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OracleExpectations<T> {
    pub tau1: T,
    pub tau2: T,
    /// `tau1 + tau2`; the combined estimator is their per-atom sum, so its
    /// expectation is exactly additive.
    pub tau: T,
    pub atoms: u128,
    /// `|sum of atom probabilities - 1|`.
    pub prob_mass_error: f64,
}

impl<T: Copy> OracleExpectations<T> {
    pub fn get(&self, id: EstimatorId) -> T {
        match id {
            EstimatorId::Tau1 => self.tau1,
            EstimatorId::Tau2 => self.tau2,
            EstimatorId::Tau => self.tau,
        }
    }
}

/// Number of atoms an enumeration of `design` on `n` units would visit.
pub fn atom_count(design: &Design, n: usize) -> Result<u128> {
    let two_pow = |e: usize| -> Option<u128> {
        if e < 128 {
            Some(1u128 << e)
        } else {
            None
        }
    };
    let count = match design {
        Design::FullBernoulli { .. } => two_pow(n),
        Design::SubPopBernoulli { .. } => 3u128.checked_pow(u32::try_from(n).unwrap_or(u32::MAX)),
        Design::TwoStageCluster {
            clustering, mode, ..
        } => {
            if *mode != ClusterSamplingMode::BernoulliClusters {
                return Err(Error::UnsupportedExactness);
            }
            let mut total: Option<u128> = Some(1);
            for size in clustering.cluster_sizes() {
                total = total
                    .zip(two_pow(size))
                    .and_then(|(t, s)| t.checked_mul(1 + s));
            }
            total
        }
    };
    Ok(count.unwrap_or(u128::MAX))
}

struct AtomAccumulator<T> {
    tau1: CompensatedSum<T>,
    tau2: CompensatedSum<T>,
    prob: CompensatedSum<f64>,
    atoms: u128,
}

impl<T: Scalar> AtomAccumulator<T> {
    fn new() -> Self {
        Self {
            tau1: CompensatedSum::new(),
            tau2: CompensatedSum::new(),
            prob: CompensatedSum::new(),
            atoms: 0,
        }
    }

    fn finish(self) -> OracleExpectations<T> {
        let tau1 = self.tau1.value();
        let tau2 = self.tau2.value();
        OracleExpectations {
            tau1,
            tau2,
            tau: tau1 + tau2,
            atoms: self.atoms,
            prob_mass_error: (self.prob.value() - 1.0).abs(),
        }
    }
}

/// Evaluates the estimators on one atom, reusing outcome buffers.
struct AtomEval<'a, T> {
    g: &'a DirectedGraph,
    params: &'a DyadicParams<T>,
    p: f64,
    pi: f64,
    y: Vec<T>,
    d: Vec<T>,
}

impl<'a, T: Scalar> AtomEval<'a, T> {
    fn new(g: &'a DirectedGraph, params: &'a DyadicParams<T>, p: f64, pi: f64) -> Self {
        Self {
            g,
            params,
            p,
            pi,
            y: vec![T::zero(); g.n()],
            d: vec![T::zero(); g.n()],
        }
    }

    fn eval(&mut self, assignment: &crate::design::Assignment) -> Result<(T, T)> {
        self.y.fill(T::zero());
        self.d.fill(T::zero());
        let w = &assignment.w;
        for (&(i, j), c) in self.g.edges().iter().zip(self.params.coeffs()) {
            let z = c.eval(w[i.index()], w[j.index()]);
            self.y[j.index()] += z;
            self.d[i.index()] += z;
        }
        if let Some(selfs) = self.params.self_coeffs() {
            for (i, c) in selfs.iter().enumerate() {
                let z = c.eval(w[i], w[i]);
                self.y[i] += z;
                self.d[i] += z;
            }
        }
        let t1 = ht_upstream(&self.y, assignment, self.p, self.pi)?;
        let t2 = ht_diffusion(&self.d, assignment, self.p, self.pi)?;
        Ok((t1, t2))
    }
}

/// Exact expectations of all three estimators by exhaustive enumeration.
pub fn exact_expectations<T: Scalar>(
    g: &DirectedGraph,
    params: &DyadicParams<T>,
    design: &Design,
    budget: &EnumerationBudget,
) -> Result<OracleExpectations<T>> {
    let atoms = atom_count(design, g.n())?;
    if atoms > budget.effective() {
        return Err(Error::BudgetExceeded {
            atoms,
            budget: budget.effective(),
        });
    }
    let pi = design.pi();
    if !(pi > 0.0 && pi < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "pi = {pi} must lie strictly inside (0, 1) for estimation"
        )));
    }
    let n = g.n();
    let mut acc = AtomAccumulator::new();
    let mut eval = AtomEval::new(g, params, design.p(), pi);

    match design {
        Design::FullBernoulli { pi } => {
            let mut a = crate::design::Assignment {
                v: vec![true; n],
                w: vec![false; n],
            };
            for mask in 0u64..(1u64 << n) {
                let mut treated = 0i32;
                for (i, w) in a.w.iter_mut().enumerate() {
                    *w = (mask >> i) & 1 == 1;
                    treated += *w as i32;
                }
                let prob = pi.powi(treated) * (1.0 - pi).powi(n as i32 - treated);
                add_atom(&mut acc, &mut eval, &a, prob)?;
            }
        }
        Design::SubPopBernoulli { p, pi } => {
            // Base-3 odometer over unit states 0:(0,0) 1:(1,0) 2:(1,1).
            let mut digits = vec![0u8; n];
            let mut a = crate::design::Assignment {
                v: vec![false; n],
                w: vec![false; n],
            };
            let mut counts = [n as i32, 0i32, 0i32];
            let state_prob = [1.0 - p, p * (1.0 - pi), p * pi];
            loop {
                let prob = state_prob[0].powi(counts[0])
                    * state_prob[1].powi(counts[1])
                    * state_prob[2].powi(counts[2]);
                add_atom(&mut acc, &mut eval, &a, prob)?;
                // Advance the odometer.
                let mut pos = 0;
                loop {
                    if pos == n {
                        break;
                    }
                    counts[digits[pos] as usize] -= 1;
                    digits[pos] = (digits[pos] + 1) % 3;
                    counts[digits[pos] as usize] += 1;
                    a.v[pos] = digits[pos] >= 1;
                    a.w[pos] = digits[pos] == 2;
                    if digits[pos] != 0 {
                        break;
                    }
                    pos += 1;
                }
                if pos == n {
                    break;
                }
            }
        }
        Design::TwoStageCluster {
            p,
            pi,
            clustering,
            mode,
        } => {
            if *mode != ClusterSamplingMode::BernoulliClusters {
                return Err(Error::UnsupportedExactness);
            }
            if clustering.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "clustering covers {} nodes, graph has {n}",
                    clustering.len()
                )));
            }
            let k = clustering.k();
            let mut a = crate::design::Assignment {
                v: vec![false; n],
                w: vec![false; n],
            };
            for pattern in 0u64..(1u64 << k) {
                let sampled = pattern.count_ones() as i32;
                let pattern_prob = p.powi(sampled) * (1.0 - p).powi(k as i32 - sampled);
                let mut included: Vec<usize> = Vec::new();
                for i in 0..n {
                    let v = (pattern >> clustering.cluster_of(i)) & 1 == 1;
                    a.v[i] = v;
                    a.w[i] = false;
                    if v {
                        included.push(i);
                    }
                }
                let m = included.len();
                for sub in 0u64..(1u64 << m) {
                    let mut treated = 0i32;
                    for (bit, &unit) in included.iter().enumerate() {
                        let w = (sub >> bit) & 1 == 1;
                        a.w[unit] = w;
                        treated += w as i32;
                    }
                    let prob =
                        pattern_prob * pi.powi(treated) * (1.0 - pi).powi(m as i32 - treated);
                    add_atom(&mut acc, &mut eval, &a, prob)?;
                }
            }
        }
    }

    Ok(acc.finish())
}

fn add_atom<T: Scalar>(
    acc: &mut AtomAccumulator<T>,
    eval: &mut AtomEval<'_, T>,
    a: &crate::design::Assignment,
    prob: f64,
) -> Result<()> {
    let (t1, t2) = eval.eval(a)?;
    let weight = T::from_real(prob);
    acc.tau1.add(weight * t1);
    acc.tau2.add(weight * t2);
    acc.prob.add(prob);
    acc.atoms += 1;
    Ok(())
}

/// Exact expectation of a single estimator.
pub fn exact_expectation<T: Scalar>(
    g: &DirectedGraph,
    params: &DyadicParams<T>,
    design: &Design,
    estimator: EstimatorId,
    budget: &EnumerationBudget,
) -> Result<T> {
    Ok(exact_expectations(g, params, design, budget)?.get(estimator))
}

/// Absolute oracle-vs-theory differences for the three estimators of one
/// form.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FormDiffs {
    pub tau1: f64,
    pub tau2: f64,
    pub tau: f64,
}

impl FormDiffs {
    fn between<T: Scalar>(oracle: &OracleExpectations<T>, form: &TheoryForm<T>) -> Self {
        Self {
            tau1: (oracle.tau1.as_real() - form.tau1.expected.as_real()).abs(),
            tau2: (oracle.tau2.as_real() - form.tau2.expected.as_real()).abs(),
            tau: (oracle.tau.as_real() - form.tau.expected.as_real()).abs(),
        }
    }

    pub fn max(&self) -> f64 {
        self.tau1.max(self.tau2).max(self.tau)
    }
}

/// Oracle-vs-aggregate-form differences (two-stage only).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AggregateDiffs {
    pub node: FormDiffs,
    pub zeta_edge: FormDiffs,
    /// `|oracle bias - closed bias display|` per overlap reading.
    pub bias_display_node: f64,
    pub bias_display_zeta_edge: f64,
}

/// Side-by-side comparison of the oracle against every closed form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrosscheckReport<T> {
    pub oracle: OracleExpectations<T>,
    pub theory: TheoryReport<T>,
    pub edge_exact: FormDiffs,
    pub aggregate: Option<AggregateDiffs>,
}

/// Runs the oracle and compares it against every theory form for `design`.
pub fn crosscheck<T: Scalar>(
    g: &DirectedGraph,
    params: &DyadicParams<T>,
    design: &Design,
    budget: &EnumerationBudget,
) -> Result<CrosscheckReport<T>> {
    let oracle = exact_expectations(g, params, design, budget)?;
    let theory = expected_for_design(g, params, design)?;
    let edge_exact = FormDiffs::between(&oracle, &theory.edge_exact);
    let aggregate = theory.aggregate.as_ref().map(|agg| {
        let oracle_bias = oracle.tau.as_real() - theory.tau_true.as_real();
        AggregateDiffs {
            node: FormDiffs::between(&oracle, &agg.node.form),
            zeta_edge: FormDiffs::between(&oracle, &agg.zeta_edge.form),
            bias_display_node: (oracle_bias - agg.node.tau_bias_display.as_real()).abs(),
            bias_display_zeta_edge: (oracle_bias - agg.zeta_edge.tau_bias_display.as_real())
                .abs(),
        }
    });
    Ok(CrosscheckReport {
        oracle,
        theory,
        edge_exact,
        aggregate,
    })
}
