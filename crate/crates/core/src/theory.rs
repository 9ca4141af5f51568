//! Closed-form expectations and biases for every estimator under every
//! design.
//!
//! Two forms are kept side by side for the two-stage design:
//!
//! - the edge-exact form weights each edge's interaction coefficient by the
//!   same-cluster indicator of that edge; it is the testing ground truth and
//!   matches the enumeration oracle to floating-point accuracy;
//! - the aggregate form substitutes one scalar cluster-overlap value for the
//!   per-edge indicators. With the interaction-weighted edge-level overlap
//!   the two expectations coincide; with the node-averaged overlap they
//!   coincide only when every edge has the same indicator. The aggregate
//!   form's closed bias display additionally matches the exact bias only at
//!   `pi = 0.5` (or overlap in {0, 1}), so both numbers are reported and the
//!   exact one is what sweeps and acceptance checks consume.
//!
//! For the two designs without clusters the forms coincide and the report
//! carries no aggregate block. Self tuples, when enabled, shift each
//! single-aggregate expectation by the mean self effect under every design.

use serde::{Deserialize, Serialize};

use crate::clustering::{overlap_stats_weighted, Clustering, OverlapStats};
use crate::design::{ClusterSamplingMode, Design};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::model::{true_tte, DyadicParams};
use crate::scalar::Scalar;

/// Expected value and bias of one estimator.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EstimatorExpectation<T> {
    pub expected: T,
    /// `expected - tau`.
    pub bias: T,
}

/// Expectations for the three estimators under one form.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TheoryForm<T> {
    pub tau1: EstimatorExpectation<T>,
    pub tau2: EstimatorExpectation<T>,
    pub tau: EstimatorExpectation<T>,
}

/// Which overlap scalar an aggregate form plugs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SigmaKind {
    /// Node-averaged fraction of same-cluster neighbors.
    NodeAverage,
    /// Interaction-weighted fraction of same-cluster edges.
    ZetaWeightedEdge,
}

/// Aggregate-form expectations at one overlap value.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AggregateForm<T> {
    pub sigma_kind: SigmaKind,
    pub sigma: f64,
    pub form: TheoryForm<T>,
    /// The closed bias display `-(1 - 2 p pi)(1 - sigma) / n * sum(zeta)`
    /// (plus the self-effect shift when enabled). Matches `form.tau.bias`
    /// only at `pi = 0.5` or `sigma` in `{0, 1}`.
    pub tau_bias_display: T,
}

/// Aggregate forms for the two overlap readings.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TwoStageAggregates<T> {
    pub node: AggregateForm<T>,
    pub zeta_edge: AggregateForm<T>,
}

/// Exact expectations and biases for one design on one parameter set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TheoryReport<T> {
    pub design: String,
    pub n: usize,
    pub p: f64,
    pub pi: f64,
    pub tau_true: T,
    pub sum_beta: T,
    pub sum_gamma: T,
    pub sum_zeta: T,
    /// `sum_i (beta_ii + gamma_ii + zeta_ii)` when self tuples are enabled.
    pub self_effect_sum: Option<T>,
    pub overlap: Option<OverlapStats>,
    pub edge_exact: TheoryForm<T>,
    /// Present for the two-stage design only; the other designs have a
    /// single form.
    pub aggregate: Option<TwoStageAggregates<T>>,
}

impl<T: Scalar> TheoryReport<T> {
    /// The bias number the accompanying figures would quote: the aggregate
    /// display with the node-averaged overlap for two-stage runs, the exact
    /// bias elsewhere (the forms coincide there).
    pub fn paper_tau_bias(&self) -> f64 {
        match &self.aggregate {
            Some(agg) => agg.node.tau_bias_display.as_real(),
            None => self.edge_exact.tau.bias.as_real(),
        }
    }
}

struct Sums<T> {
    beta: T,
    gamma: T,
    zeta: T,
    self_effect: Option<T>,
    tau: T,
    inv_n: T,
}

fn sums<T: Scalar>(g: &DirectedGraph, params: &DyadicParams<T>) -> Result<Sums<T>> {
    let tau = true_tte(g, params)?;
    let s = params.edge_sums();
    Ok(Sums {
        beta: s.beta,
        gamma: s.gamma,
        zeta: s.zeta,
        self_effect: params.self_effect_sum(),
        tau,
        inv_n: T::one() / T::from_real(g.n() as f64),
    })
}

impl<T: Scalar> Sums<T> {
    /// Builds the three-estimator form given the total interaction term
    /// `zeta_term` that enters each single-aggregate expectation.
    fn form(&self, zeta_term: T) -> TheoryForm<T> {
        let self_shift = self.self_effect.unwrap_or_else(T::zero);
        let e1 = (self.gamma + zeta_term + self_shift) * self.inv_n;
        let e2 = (self.beta + zeta_term + self_shift) * self.inv_n;
        let e = e1 + e2;
        let exp = |expected: T| EstimatorExpectation {
            expected,
            bias: expected - self.tau,
        };
        TheoryForm {
            tau1: exp(e1),
            tau2: exp(e2),
            tau: exp(e),
        }
    }

    fn self_shift_bias(&self) -> T {
        self.self_effect.unwrap_or_else(T::zero) * self.inv_n
    }
}

fn check_pi(pi: f64) -> Result<()> {
    if !(pi > 0.0 && pi < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "pi = {pi} must lie strictly inside (0, 1)"
        )));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "p = {p} must lie in (0, 1]"
        )));
    }
    Ok(())
}

/// Expectations under the full-population Bernoulli design.
pub fn expected_full<T: Scalar>(
    g: &DirectedGraph,
    params: &DyadicParams<T>,
    pi: f64,
) -> Result<TheoryReport<T>> {
    check_pi(pi)?;
    let s = sums(g, params)?;
    let form = s.form(T::from_real(pi) * s.zeta);
    Ok(TheoryReport {
        design: "full".into(),
        n: g.n(),
        p: 1.0,
        pi,
        tau_true: s.tau,
        sum_beta: s.beta,
        sum_gamma: s.gamma,
        sum_zeta: s.zeta,
        self_effect_sum: s.self_effect,
        overlap: None,
        edge_exact: form,
        aggregate: None,
    })
}

/// Expectations under the sub-population Bernoulli design.
pub fn expected_subpop<T: Scalar>(
    g: &DirectedGraph,
    params: &DyadicParams<T>,
    p: f64,
    pi: f64,
) -> Result<TheoryReport<T>> {
    check_p(p)?;
    check_pi(pi)?;
    let s = sums(g, params)?;
    let form = s.form(T::from_real(p * pi) * s.zeta);
    Ok(TheoryReport {
        design: "subpop".into(),
        n: g.n(),
        p,
        pi,
        tau_true: s.tau,
        sum_beta: s.beta,
        sum_gamma: s.gamma,
        sum_zeta: s.zeta,
        self_effect_sum: s.self_effect,
        overlap: None,
        edge_exact: form,
        aggregate: None,
    })
}

/// Expectations under the two-stage cluster design with Bernoulli cluster
/// sampling.
pub fn expected_twostage<T: Scalar>(
    g: &DirectedGraph,
    params: &DyadicParams<T>,
    clustering: &Clustering,
    p: f64,
    pi: f64,
) -> Result<TheoryReport<T>> {
    check_p(p)?;
    check_pi(pi)?;
    if clustering.len() != g.n() {
        return Err(Error::InvalidArgument(format!(
            "clustering covers {} nodes, graph has {}",
            clustering.len(),
            g.n()
        )));
    }
    let s = sums(g, params)?;

    // Interaction mass on same-cluster edges.
    let mut zeta_same = T::zero();
    for (&(i, j), c) in g.edges().iter().zip(params.coeffs()) {
        if clustering.cluster_of(i.index()) == clustering.cluster_of(j.index()) {
            zeta_same += c.zeta;
        }
    }
    let zeta_cross = s.zeta - zeta_same;

    // Same-cluster edges keep the full-population weight pi, cross-cluster
    // edges the sub-population weight p*pi.
    let exact_term = T::from_real(pi) * zeta_same + T::from_real(p * pi) * zeta_cross;
    let edge_exact = s.form(exact_term);

    let overlap = overlap_stats_weighted(g, clustering, params).ok();
    let sigma_node = overlap.map(|o| o.sigma_bar_node).unwrap_or(0.0);
    let sigma_zeta = overlap
        .and_then(|o| o.sigma_edge_zeta.or(Some(o.sigma_edge)))
        .unwrap_or(0.0);

    let aggregate_at = |kind: SigmaKind, sigma: f64| -> AggregateForm<T> {
        let coef = sigma * pi + (1.0 - sigma) * p * pi;
        let form = s.form(T::from_real(coef) * s.zeta);
        let display = T::from_real(-(1.0 - 2.0 * p * pi) * (1.0 - sigma)) * s.zeta * s.inv_n
            + s.self_shift_bias();
        AggregateForm {
            sigma_kind: kind,
            sigma,
            form,
            tau_bias_display: display,
        }
    };

    Ok(TheoryReport {
        design: "twostage".into(),
        n: g.n(),
        p,
        pi,
        tau_true: s.tau,
        sum_beta: s.beta,
        sum_gamma: s.gamma,
        sum_zeta: s.zeta,
        self_effect_sum: s.self_effect,
        overlap,
        edge_exact,
        aggregate: Some(TwoStageAggregates {
            node: aggregate_at(SigmaKind::NodeAverage, sigma_node),
            zeta_edge: aggregate_at(SigmaKind::ZetaWeightedEdge, sigma_zeta),
        }),
    })
}

/// Dispatches on the design. Fixed-fraction cluster sampling has no closed
/// form and is rejected.
pub fn expected_for_design<T: Scalar>(
    g: &DirectedGraph,
    params: &DyadicParams<T>,
    design: &Design,
) -> Result<TheoryReport<T>> {
    match design {
        Design::FullBernoulli { pi } => expected_full(g, params, *pi),
        Design::SubPopBernoulli { p, pi } => expected_subpop(g, params, *p, *pi),
        Design::TwoStageCluster {
            p,
            pi,
            clustering,
            mode,
        } => match mode {
            ClusterSamplingMode::BernoulliClusters => {
                expected_twostage(g, params, clustering, *p, *pi)
            }
            ClusterSamplingMode::FixedFraction => Err(Error::UnsupportedExactness),
        },
    }
}

/// Bias of the combined estimator at `pi = 0.5` under the full-population
/// design when self tuples are enabled: the mean self effect
/// `(1/n) sum_i (beta_ii + gamma_ii + zeta_ii)`.
pub fn self_loop_bias<T: Scalar>(params: &DyadicParams<T>, pi: f64) -> Result<T> {
    if pi != 0.5 {
        return Err(Error::InvalidArgument(format!(
            "the self-loop bias statement holds at pi = 0.5, got {pi}"
        )));
    }
    let Some(sum) = params.self_effect_sum() else {
        return Err(Error::InvalidArgument(
            "self-loop coefficients are not enabled on these parameters".into(),
        ));
    };
    Ok(sum / T::from_real(params.n() as f64))
}

/// Bias comparison between the combined estimator and the upstream-only one
/// under the sub-population design.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BiasDominance<T> {
    pub bias_tau: T,
    pub bias_tau1: T,
    /// True when the inputs sit inside the proven scope (`beta, zeta >= 0`,
    /// `p * pi <= 2/3`, no self tuples); there `holds` is guaranteed.
    pub guaranteed: bool,
    /// `|bias_tau| <= |bias_tau1|` for these inputs.
    pub holds: bool,
}

pub fn bias_dominance<T: Scalar>(
    g: &DirectedGraph,
    params: &DyadicParams<T>,
    p: f64,
    pi: f64,
) -> Result<BiasDominance<T>> {
    let report = expected_subpop(g, params, p, pi)?;
    let bias_tau = report.edge_exact.tau.bias;
    let bias_tau1 = report.edge_exact.tau1.bias;
    let guaranteed =
        params.nonnegative_interactions() && p * pi <= 2.0 / 3.0 + 1e-12 && !params.has_self_coeffs();
    let holds = bias_tau.abs() <= bias_tau1.abs() + T::from_real(1e-12);
    Ok(BiasDominance {
        bias_tau,
        bias_tau1,
        guaranteed,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Coeffs, DyadicParams};
    use approx::assert_relative_eq;

    fn two_node() -> (DirectedGraph, DyadicParams<f64>) {
        let g = DirectedGraph::from_edges(2, [(0, 1)]).unwrap();
        let p = DyadicParams::from_coeffs(&g, vec![Coeffs::new(1.0, 0.5, 1.0, 0.5)]).unwrap();
        (g, p)
    }

    #[test]
    fn full_expectations_match_hand_enumeration() {
        let (g, p) = two_node();
        let r = expected_full(&g, &p, 0.5).unwrap();
        assert_relative_eq!(r.edge_exact.tau1.expected, 0.625);
        assert_relative_eq!(r.edge_exact.tau2.expected, 0.375);
        assert_relative_eq!(r.edge_exact.tau.expected, 1.0);
        assert_relative_eq!(r.edge_exact.tau.bias, 0.0);
        assert_eq!(r.tau_true, 1.0);
    }

    #[test]
    fn full_is_unbiased_at_half_for_any_params() {
        let g = DirectedGraph::from_edges(3, [(0, 1), (1, 2), (2, 0), (0, 2)]).unwrap();
        let p = DyadicParams::from_coeffs(
            &g,
            vec![
                Coeffs::new(0.2, -1.0, 0.7, 2.0),
                Coeffs::new(-0.4, 0.3, -0.9, -1.1),
                Coeffs::new(1.0, 0.0, 0.0, 0.5),
                Coeffs::new(0.0, 2.0, 1.0, -0.25),
            ],
        )
        .unwrap();
        let r = expected_full(&g, &p, 0.5).unwrap();
        assert_relative_eq!(r.edge_exact.tau.bias, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn full_bias_is_odd_linear_in_centered_pi() {
        let (g, p) = two_node();
        let sum_zeta = 0.5;
        for pi in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let r = expected_full(&g, &p, pi).unwrap();
            assert_relative_eq!(
                r.edge_exact.tau.bias,
                (2.0 * pi - 1.0) * sum_zeta / 2.0,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn zero_interaction_makes_full_unbiased_everywhere() {
        let g = DirectedGraph::from_edges(2, [(0, 1)]).unwrap();
        let p = DyadicParams::from_coeffs(&g, vec![Coeffs::new(1.0, 0.7, 0.3, 0.0)]).unwrap();
        for pi in [0.1, 0.5, 0.9] {
            let r = expected_full(&g, &p, pi).unwrap();
            assert_relative_eq!(r.edge_exact.tau.bias, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn subpop_expectations_match_hand_enumeration() {
        let (g, p) = two_node();
        let r = expected_subpop(&g, &p, 0.5, 0.5).unwrap();
        assert_relative_eq!(r.edge_exact.tau.expected, 0.875);
        assert_relative_eq!(r.edge_exact.tau.bias, -0.125);
    }

    #[test]
    fn subpop_reduces_to_full_at_p_one() {
        let (g, p) = two_node();
        for pi in [0.2, 0.5, 0.8] {
            let a = expected_subpop(&g, &p, 1.0, pi).unwrap();
            let b = expected_full(&g, &p, pi).unwrap();
            assert_eq!(a.edge_exact.tau.expected, b.edge_exact.tau.expected);
            assert_eq!(a.edge_exact.tau1.expected, b.edge_exact.tau1.expected);
        }
    }

    #[test]
    fn subpop_bias_vanishes_when_p_pi_is_half() {
        let (g, p) = two_node();
        let r = expected_subpop(&g, &p, 0.625, 0.8).unwrap();
        assert_relative_eq!(r.edge_exact.tau.bias, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn twostage_single_cluster_is_unbiased_at_half() {
        let (g, p) = two_node();
        for pp in [0.1, 0.5, 0.9] {
            let r = expected_twostage(&g, &p, &Clustering::whole(2), pp, 0.5).unwrap();
            assert_relative_eq!(r.edge_exact.tau.bias, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn twostage_singleton_clusters_reduce_to_subpop() {
        let (g, p) = two_node();
        let r = expected_twostage(&g, &p, &Clustering::singletons(2), 0.5, 0.5).unwrap();
        let s = expected_subpop(&g, &p, 0.5, 0.5).unwrap();
        assert_relative_eq!(r.edge_exact.tau.bias, s.edge_exact.tau.bias);
        assert_relative_eq!(r.edge_exact.tau.bias, -0.125);
        assert_relative_eq!(
            r.edge_exact.tau1.expected,
            s.edge_exact.tau1.expected,
            epsilon = 1e-14
        );
    }

    #[test]
    fn twostage_exact_bias_identity_at_half() {
        // Mixed clustering: exact bias at pi = 0.5 must equal
        // -((1-p)/n) * sum over cross-cluster edges of zeta.
        let g =
            DirectedGraph::from_edges(4, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let coeffs = vec![
            Coeffs::new(0.0, 0.1, 0.2, 0.9),
            Coeffs::new(0.0, 0.3, 0.1, 0.4),
            Coeffs::new(0.5, 0.0, 0.0, 1.5),
            Coeffs::new(0.2, 0.7, 0.3, 0.8),
            Coeffs::new(0.1, 0.2, 0.3, 0.6),
            Coeffs::new(0.0, 0.0, 1.0, 0.25),
        ];
        let p = DyadicParams::from_coeffs(&g, coeffs.clone()).unwrap();
        let c = Clustering::from_labels(&[0, 0, 1, 1]).unwrap();
        let pp = 0.4;
        let r = expected_twostage(&g, &p, &c, pp, 0.5).unwrap();
        let cross_zeta: f64 = g
            .edges()
            .iter()
            .zip(&coeffs)
            .filter(|(&(i, j), _)| c.cluster_of(i.index()) != c.cluster_of(j.index()))
            .map(|(_, co)| co.zeta)
            .sum();
        assert_relative_eq!(
            r.edge_exact.tau.bias,
            -(1.0 - pp) * cross_zeta / 4.0,
            epsilon = 1e-14
        );
        // The zeta-weighted aggregate display agrees with the exact bias at
        // pi = 0.5.
        let agg = r.aggregate.unwrap();
        assert_relative_eq!(
            agg.zeta_edge.tau_bias_display,
            r.edge_exact.tau.bias,
            epsilon = 1e-14
        );
        // And the zeta-weighted aggregate expectations agree at every pi.
        for pi in [0.25, 0.5, 0.75] {
            let r = expected_twostage(&g, &p, &c, pp, pi).unwrap();
            let agg = r.aggregate.unwrap();
            assert_relative_eq!(
                agg.zeta_edge.form.tau.expected,
                r.edge_exact.tau.expected,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn aggregate_forms_exact_when_overlap_is_degenerate() {
        // All edges inside one cluster (overlap 1) or all across singleton
        // clusters (overlap 0): every aggregate reading coincides with the
        // edge-exact form.
        let g = DirectedGraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let p = DyadicParams::from_coeffs(
            &g,
            vec![
                Coeffs::new(0.3, 0.4, 0.5, 0.9),
                Coeffs::new(0.1, 0.2, 0.3, 0.4),
                Coeffs::new(0.0, 0.6, 0.7, 1.1),
            ],
        )
        .unwrap();
        for clustering in [Clustering::whole(4), Clustering::singletons(4)] {
            for pi in [0.3, 0.5, 0.7] {
                let r = expected_twostage(&g, &p, &clustering, 0.4, pi).unwrap();
                let agg = r.aggregate.unwrap();
                for form in [&agg.node.form, &agg.zeta_edge.form] {
                    assert_relative_eq!(
                        form.tau1.expected,
                        r.edge_exact.tau1.expected,
                        epsilon = 1e-13
                    );
                    assert_relative_eq!(
                        form.tau.expected,
                        r.edge_exact.tau.expected,
                        epsilon = 1e-13
                    );
                }
            }
        }
    }

    #[test]
    fn additivity_holds_in_every_form() {
        let (g, p) = two_node();
        let c = Clustering::singletons(2);
        let reports = [
            expected_full(&g, &p, 0.3).unwrap(),
            expected_subpop(&g, &p, 0.4, 0.7).unwrap(),
            expected_twostage(&g, &p, &c, 0.4, 0.7).unwrap(),
        ];
        for r in &reports {
            let forms: Vec<&TheoryForm<f64>> = match &r.aggregate {
                Some(a) => vec![&r.edge_exact, &a.node.form, &a.zeta_edge.form],
                None => vec![&r.edge_exact],
            };
            for f in forms {
                assert_relative_eq!(
                    f.tau.expected,
                    f.tau1.expected + f.tau2.expected,
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn self_loop_bias_statement() {
        let g = DirectedGraph::from_edges(2, [(0, 1)]).unwrap();
        let base = DyadicParams::from_coeffs(&g, vec![Coeffs::new(1.0, 0.5, 1.0, 0.5)]).unwrap();
        assert!(self_loop_bias(&base, 0.5).is_err());

        let zeroed = base
            .clone()
            .with_self_coeffs(vec![Coeffs::default(), Coeffs::default()])
            .unwrap();
        assert_eq!(self_loop_bias(&zeroed, 0.5).unwrap(), 0.0);

        let loaded = base
            .with_self_coeffs(vec![Coeffs::new(0.0, 1.0, 1.0, 1.0), Coeffs::default()])
            .unwrap();
        assert_relative_eq!(self_loop_bias(&loaded, 0.5).unwrap(), 1.5);
        assert!(self_loop_bias(&loaded, 0.4).is_err());
        // The closed forms carry the same shift.
        let r = expected_full(&g, &loaded, 0.5).unwrap();
        assert_relative_eq!(r.edge_exact.tau.bias, 1.5, epsilon = 1e-14);
    }

    #[test]
    fn dominance_two_node_example() {
        let (g, p) = two_node();
        let d = bias_dominance(&g, &p, 0.5, 0.5).unwrap();
        assert!(d.guaranteed);
        assert!(d.holds);
        assert_relative_eq!(d.bias_tau, -0.125);
        // E[tau1] = (gamma + p*pi*zeta)/n = 0.5625, so the bias is -0.4375.
        assert_relative_eq!(d.bias_tau1, 0.5625 - 1.0);
    }

    #[test]
    fn dominance_trivial_when_zeta_zero() {
        let g = DirectedGraph::from_edges(2, [(0, 1)]).unwrap();
        let p = DyadicParams::from_coeffs(&g, vec![Coeffs::new(0.0, 0.6, 0.2, 0.0)]).unwrap();
        let d = bias_dominance(&g, &p, 0.3, 0.5).unwrap();
        assert!(d.guaranteed && d.holds);
        assert_relative_eq!(d.bias_tau, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn dominance_not_guaranteed_outside_scope() {
        let g = DirectedGraph::from_edges(2, [(0, 1)]).unwrap();
        let p = DyadicParams::from_coeffs(&g, vec![Coeffs::new(0.0, -0.6, 0.2, 0.4)]).unwrap();
        let d = bias_dominance(&g, &p, 0.3, 0.5).unwrap();
        assert!(!d.guaranteed);
    }

    #[test]
    fn fixed_fraction_has_no_closed_form() {
        let (g, p) = two_node();
        let design = Design::two_stage(
            0.5,
            0.5,
            Clustering::whole(2),
            ClusterSamplingMode::FixedFraction,
        )
        .unwrap();
        assert!(matches!(
            expected_for_design(&g, &p, &design),
            Err(Error::UnsupportedExactness)
        ));
    }

    #[test]
    fn theory_in_f32_matches_f64_loosely() {
        let g = DirectedGraph::from_edges(2, [(0, 1)]).unwrap();
        let p32 = DyadicParams::from_coeffs(&g, vec![Coeffs::new(1.0f32, 0.5, 1.0, 0.5)]).unwrap();
        let r = expected_subpop(&g, &p32, 0.5, 0.5).unwrap();
        assert!((r.edge_exact.tau.expected - 0.875f32).abs() < 1e-6);
    }
}
