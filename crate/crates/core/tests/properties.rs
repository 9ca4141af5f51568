//! Property tests for the structural invariants of the model, estimators,
//! and theory.

use dyadtte::clustering::{overlap_stats, Clustering};
use dyadtte::design::{Assignment, ClusterSamplingMode, Design};
use dyadtte::estimator::{ht_diffusion, ht_total, ht_upstream};
use dyadtte::graph::{parse_edge_list, DirectedGraph, NodeId, ParseOptions};
use dyadtte::model::{outcomes, true_tte, Coeffs, DyadicParams};
use dyadtte::oracle::{exact_expectations, EnumerationBudget};
use dyadtte::theory::{expected_full, expected_subpop, expected_twostage};
use proptest::prelude::*;

fn arb_graph() -> impl Strategy<Value = DirectedGraph> {
    (2usize..9).prop_flat_map(|n| {
        proptest::collection::vec((0..n as u32, 0..n as u32), 0..=14).prop_map(move |pairs| {
            let edges: Vec<(u32, u32)> = pairs.into_iter().filter(|(a, b)| a != b).collect();
            DirectedGraph::from_edges(n, edges).unwrap()
        })
    })
}

fn arb_instance() -> impl Strategy<Value = (DirectedGraph, DyadicParams<f64>)> {
    arb_graph().prop_flat_map(|g| {
        let m = g.edge_count();
        let coeff = (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64);
        proptest::collection::vec(coeff, m..=m).prop_map(move |tuples| {
            let coeffs = tuples
                .into_iter()
                .map(|(a, b, c, z)| Coeffs::new(a, b, c, z))
                .collect();
            let params = DyadicParams::from_coeffs(&g, coeffs).unwrap();
            (g.clone(), params)
        })
    })
}

fn arb_assignment(n: usize) -> impl Strategy<Value = Assignment> {
    proptest::collection::vec((any::<bool>(), any::<bool>()), n..=n).prop_map(|states| {
        let v: Vec<bool> = states.iter().map(|&(v, _)| v).collect();
        let w: Vec<bool> = states.iter().map(|&(v, w)| v && w).collect();
        Assignment { v, w }
    })
}

proptest! {
    /// The two aggregates always carry the same total mass.
    #[test]
    fn dyadic_identity((g, params) in arb_instance(), seed in any::<u64>()) {
        let w: Vec<bool> = (0..g.n()).map(|i| (seed >> (i % 64)) & 1 == 1).collect();
        let out = outcomes(&g, &params, &w).unwrap();
        let sum_y: f64 = out.y.iter().sum();
        let sum_d: f64 = out.d.iter().sum();
        let scale = sum_y.abs().max(1.0);
        prop_assert!((sum_y - sum_d).abs() <= 1e-9 * scale);
    }

    /// z(1,1) - z(1,0) - z(0,1) + z(0,0) recovers the interaction weight.
    #[test]
    fn interaction_extraction(a in -10.0..10.0f64, b in -10.0..10.0f64,
                              c in -10.0..10.0f64, z in -10.0..10.0f64) {
        let coeffs = Coeffs::new(a, b, c, z);
        let got = coeffs.eval(true, true) - coeffs.eval(true, false)
            - coeffs.eval(false, true) + coeffs.eval(false, false);
        prop_assert!((got - z).abs() <= 1e-12 * z.abs().max(1.0));
    }

    /// The closed-form effect equals the defining difference through either
    /// aggregate.
    #[test]
    fn true_tte_three_routes((g, params) in arb_instance()) {
        let tau = true_tte(&g, &params).unwrap();
        let all1 = outcomes(&g, &params, &vec![true; g.n()]).unwrap();
        let all0 = outcomes(&g, &params, &vec![false; g.n()]).unwrap();
        let n = g.n() as f64;
        let via_y = (all1.y.iter().sum::<f64>() - all0.y.iter().sum::<f64>()) / n;
        let via_d = (all1.d.iter().sum::<f64>() - all0.d.iter().sum::<f64>()) / n;
        prop_assert!((tau - via_y).abs() <= 1e-9 * tau.abs().max(1.0));
        prop_assert!((tau - via_d).abs() <= 1e-9 * tau.abs().max(1.0));
    }

    /// tau1 + tau2 equals the single HT estimator applied to S = Y + D.
    #[test]
    fn combined_estimator_is_ht_on_s(
        (g, params) in arb_instance(),
        p in 0.05..1.0f64,
        pi in 0.05..0.95f64,
        seed in any::<u64>(),
    ) {
        let mut rng = dyadtte::design::substream(seed, 0);
        let design = Design::subpop(p, pi).unwrap();
        let a = design.draw(g.n(), &mut rng).unwrap();
        let out = outcomes(&g, &params, &a.w).unwrap();
        let total = ht_total(&out.y, &out.d, &a, p, pi).unwrap();
        let s: Vec<f64> = out.y.iter().zip(&out.d).map(|(y, d)| y + d).collect();
        let on_s = ht_upstream(&s, &a, p, pi).unwrap();
        prop_assert!((total - on_s).abs() <= 1e-12 * on_s.abs().max(1.0));
    }

    /// Scaling all outcomes scales every point estimate.
    #[test]
    fn estimators_scale_equivariant(
        (g, params) in arb_instance(),
        a in arb_assignment(8).prop_filter("need 8 nodes", |_| true),
        factor in 0.1..10.0f64,
    ) {
        prop_assume!(g.n() <= 8);
        let a = Assignment { v: a.v[..g.n()].to_vec(), w: a.w[..g.n()].to_vec() };
        let out = outcomes(&g, &params, &a.w).unwrap();
        let t1 = ht_upstream(&out.y, &a, 1.0, 0.4).unwrap();
        let scaled: Vec<f64> = out.y.iter().map(|y| y * factor).collect();
        let t1s = ht_upstream(&scaled, &a, 1.0, 0.4).unwrap();
        prop_assert!((t1s - factor * t1).abs() <= 1e-9 * t1s.abs().max(1.0));
        let t2 = ht_diffusion(&out.d, &a, 1.0, 0.4).unwrap();
        let scaled_d: Vec<f64> = out.d.iter().map(|d| d * factor).collect();
        let t2s = ht_diffusion(&scaled_d, &a, 1.0, 0.4).unwrap();
        prop_assert!((t2s - factor * t2).abs() <= 1e-9 * t2s.abs().max(1.0));
    }

    /// Edge-list serialization round-trips the labeled edge set.
    #[test]
    fn edge_list_round_trip(g in arb_graph()) {
        let text = g.to_edge_list();
        let reparsed = parse_edge_list(text.as_bytes(), &ParseOptions::default()).unwrap();
        prop_assert_eq!(g.edges_by_label(), reparsed.graph.edges_by_label());
    }

    /// Both directed degree sums count every edge once.
    #[test]
    fn degree_sums_count_edges(g in arb_graph()) {
        let up: usize = (0..g.n())
            .map(|j| g.upstream(NodeId(j as u32)).unwrap().len())
            .sum();
        let down: usize = (0..g.n())
            .map(|j| g.downstream(NodeId(j as u32)).unwrap().len())
            .sum();
        prop_assert_eq!(up, g.edge_count());
        prop_assert_eq!(down, g.edge_count());
    }

    /// The reduction chain: singleton-cluster two-stage equals sub-population
    /// equals (at p = 1) the full-population forms.
    #[test]
    fn theory_reduction_chain(
        (g, params) in arb_instance(),
        p in 0.05..1.0f64,
        pi in 0.05..0.95f64,
    ) {
        let single = expected_twostage(&g, &params, &Clustering::singletons(g.n()), p, pi).unwrap();
        let sub = expected_subpop(&g, &params, p, pi).unwrap();
        let full = expected_full(&g, &params, pi).unwrap();
        let sub_p1 = expected_subpop(&g, &params, 1.0, pi).unwrap();
        let tol = 1e-12 * sub.tau_true.abs().max(1.0);
        prop_assert!((single.edge_exact.tau.expected - sub.edge_exact.tau.expected).abs() <= tol);
        prop_assert!((single.edge_exact.tau1.expected - sub.edge_exact.tau1.expected).abs() <= tol);
        prop_assert!((sub_p1.edge_exact.tau.expected - full.edge_exact.tau.expected).abs() <= tol);
        prop_assert!((sub_p1.edge_exact.tau2.expected - full.edge_exact.tau2.expected).abs() <= tol);
        // Additivity in every report.
        for r in [&single, &sub, &full] {
            let f = &r.edge_exact;
            prop_assert!((f.tau.expected - (f.tau1.expected + f.tau2.expected)).abs() <= tol);
        }
    }

    /// The edge overlap is one minus the cut fraction, recomputed
    /// independently.
    #[test]
    fn sigma_edge_is_one_minus_cut(g in arb_graph(), labels in proptest::collection::vec(0u32..4, 8..=8)) {
        prop_assume!(g.edge_count() > 0);
        let c = Clustering::from_labels(&labels[..g.n()]).unwrap();
        let s = overlap_stats(&g, &c).unwrap();
        let cut = g
            .edges()
            .iter()
            .filter(|&&(i, j)| c.cluster_of(i.index()) != c.cluster_of(j.index()))
            .count() as f64;
        let expected = 1.0 - cut / g.edge_count() as f64;
        prop_assert!((s.sigma_edge - expected).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Atom probabilities of every design sum to one.
    #[test]
    fn oracle_probability_mass(
        (g, params) in arb_instance(),
        p in 0.05..1.0f64,
        pi in 0.05..0.95f64,
        labels in proptest::collection::vec(0u32..3, 8..=8),
    ) {
        prop_assume!(g.n() <= 6);
        let budget = EnumerationBudget::default();
        let designs = [
            Design::full(pi).unwrap(),
            Design::subpop(p, pi).unwrap(),
            Design::two_stage(
                p,
                pi,
                Clustering::from_labels(&labels[..g.n()]).unwrap(),
                ClusterSamplingMode::BernoulliClusters,
            )
            .unwrap(),
        ];
        for design in &designs {
            let o = exact_expectations(&g, &params, design, &budget).unwrap();
            prop_assert!(o.prob_mass_error < 1e-12, "mass error {}", o.prob_mass_error);
        }
    }

    /// Every design keeps out-of-experiment units in control, and two-stage
    /// inclusion is constant within clusters.
    #[test]
    fn draw_invariants(
        p in 0.05..1.0f64,
        pi in 0.0..=1.0f64,
        seed in any::<u64>(),
        labels in proptest::collection::vec(0u32..5, 12..=12),
    ) {
        let n = labels.len();
        let clustering = Clustering::from_labels(&labels).unwrap();
        let designs = [
            Design::full(pi).unwrap(),
            Design::subpop(p, pi).unwrap(),
            Design::two_stage(p, pi, clustering.clone(), ClusterSamplingMode::BernoulliClusters).unwrap(),
            Design::two_stage(p, pi, clustering.clone(), ClusterSamplingMode::FixedFraction).unwrap(),
        ];
        for design in &designs {
            let mut rng = dyadtte::design::substream(seed, 1);
            let a = design.draw(n, &mut rng).unwrap();
            for i in 0..n {
                prop_assert!(a.v[i] || !a.w[i]);
            }
            if matches!(design, Design::TwoStageCluster { .. }) {
                for i in 0..n {
                    for j in 0..n {
                        if clustering.cluster_of(i) == clustering.cluster_of(j) {
                            prop_assert_eq!(a.v[i], a.v[j]);
                        }
                    }
                }
            }
            if matches!(design, Design::FullBernoulli { .. }) {
                prop_assert!(a.v.iter().all(|&x| x));
            }
        }
    }
}
