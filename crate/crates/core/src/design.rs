//! Randomization schemes and realized assignments.
//!
//! Three designs are supported:
//!
//! - full-population Bernoulli: every unit is in the experiment, treated
//!   independently with probability `pi`
//! - sub-population Bernoulli: each unit enters the experiment independently
//!   with probability `p`; in-experiment units are treated with probability
//!   `pi`, everyone else receives control
//! - two-stage cluster: whole clusters enter the experiment first, then
//!   units inside sampled clusters are treated independently with
//!   probability `pi`
//!
//! Cluster sampling defaults to independent Bernoulli(`p`) inclusion per
//! cluster, which is what the closed forms and the enumeration oracle cover;
//! a fixed-fraction mode (exactly `round(p*k)` clusters) exists for
//! sensitivity checks and is Monte Carlo only.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use rand::distr::{Bernoulli, Distribution};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clustering::Clustering;
use crate::error::{Error, Result};

/// Deterministic substream `index` of a master seed.
///
/// Parallel draws use disjoint substreams keyed by draw index, so results do
/// not depend on scheduling or worker count.
pub fn substream(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// SplitMix64 step, used to derive per-cell master seeds in sweeps.
pub fn mix_seed(master_seed: u64, index: u64) -> u64 {
    let mut x = master_seed ^ (index.wrapping_add(1)).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// How the first stage of a two-stage design samples clusters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClusterSamplingMode {
    /// Each cluster enters independently with probability `p`.
    BernoulliClusters,
    /// Exactly `round(p * k)` clusters, uniformly without replacement.
    FixedFraction,
}

/// A randomization scheme.
#[derive(Clone, Debug)]
pub enum Design {
    FullBernoulli {
        pi: f64,
    },
    SubPopBernoulli {
        p: f64,
        pi: f64,
    },
    TwoStageCluster {
        p: f64,
        pi: f64,
        clustering: Clustering,
        mode: ClusterSamplingMode,
    },
}

/// One realized draw: `v[i]` says whether unit `i` is in the experiment,
/// `w[i]` whether it is treated. `v[i] == false` forces `w[i] == false`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub v: Vec<bool>,
    pub w: Vec<bool>,
}

/// Closed-form inclusion and treatment probabilities of a design, in the
/// form the expectation derivations consume.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Marginals {
    /// `P(V_i = 1)`
    pub p_in_experiment: f64,
    /// `P(W_i = 1)`
    pub p_treated: f64,
    /// `E[V_i W_i W_j]` for distinct units in the same cluster.
    pub pair_same_cluster: f64,
    /// `E[V_i W_i W_j]` for units in different clusters (equals the
    /// same-cluster value for designs without clusters).
    pub pair_cross_cluster: f64,
}

fn check_probability(name: &str, x: f64, lo_open: bool) -> Result<()> {
    let ok = if lo_open {
        x > 0.0 && x <= 1.0
    } else {
        (0.0..=1.0).contains(&x)
    };
    if !ok {
        return Err(Error::InvalidArgument(format!(
            "{name} = {x} outside the valid range"
        )));
    }
    Ok(())
}

impl Design {
    pub fn full(pi: f64) -> Result<Self> {
        check_probability("pi", pi, false)?;
        Ok(Design::FullBernoulli { pi })
    }

    pub fn subpop(p: f64, pi: f64) -> Result<Self> {
        check_probability("p", p, true)?;
        check_probability("pi", pi, false)?;
        Ok(Design::SubPopBernoulli { p, pi })
    }

    pub fn two_stage(
        p: f64,
        pi: f64,
        clustering: Clustering,
        mode: ClusterSamplingMode,
    ) -> Result<Self> {
        check_probability("p", p, true)?;
        check_probability("pi", pi, false)?;
        Ok(Design::TwoStageCluster {
            p,
            pi,
            clustering,
            mode,
        })
    }

    pub fn pi(&self) -> f64 {
        match self {
            Design::FullBernoulli { pi }
            | Design::SubPopBernoulli { pi, .. }
            | Design::TwoStageCluster { pi, .. } => *pi,
        }
    }

    /// In-experiment probability; 1 for the full-population design.
    pub fn p(&self) -> f64 {
        match self {
            Design::FullBernoulli { .. } => 1.0,
            Design::SubPopBernoulli { p, .. } | Design::TwoStageCluster { p, .. } => *p,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Design::FullBernoulli { .. } => "full",
            Design::SubPopBernoulli { .. } => "subpop",
            Design::TwoStageCluster { .. } => "twostage",
        }
    }

    pub fn clustering(&self) -> Option<&Clustering> {
        match self {
            Design::TwoStageCluster { clustering, .. } => Some(clustering),
            _ => None,
        }
    }

    /// Draws one assignment of `n` units from the supplied RNG substream.
    pub fn draw<R: Rng>(&self, n: usize, rng: &mut R) -> Result<Assignment> {
        match self {
            Design::FullBernoulli { pi } => {
                let treat = bernoulli(*pi)?;
                let w: Vec<bool> = (0..n).map(|_| treat.sample(rng)).collect();
                Ok(Assignment {
                    v: vec![true; n],
                    w,
                })
            }
            Design::SubPopBernoulli { p, pi } => {
                let include = bernoulli(*p)?;
                let treat = bernoulli(*pi)?;
                let mut v = vec![false; n];
                let mut w = vec![false; n];
                for i in 0..n {
                    v[i] = include.sample(rng);
                    w[i] = v[i] && treat.sample(rng);
                }
                Ok(Assignment { v, w })
            }
            Design::TwoStageCluster {
                p,
                pi,
                clustering,
                mode,
            } => {
                if clustering.len() != n {
                    return Err(Error::InvalidArgument(format!(
                        "clustering covers {} nodes, expected {n}",
                        clustering.len()
                    )));
                }
                let k = clustering.k();
                let included = match mode {
                    ClusterSamplingMode::BernoulliClusters => {
                        let include = bernoulli(*p)?;
                        (0..k).map(|_| include.sample(rng)).collect::<Vec<bool>>()
                    }
                    ClusterSamplingMode::FixedFraction => {
                        let m = (p * k as f64).round() as usize;
                        let mut inc = vec![false; k];
                        for idx in sample(rng, k, m.min(k)) {
                            inc[idx] = true;
                        }
                        inc
                    }
                };
                let treat = bernoulli(*pi)?;
                let mut v = vec![false; n];
                let mut w = vec![false; n];
                for i in 0..n {
                    v[i] = included[clustering.cluster_of(i) as usize];
                    w[i] = v[i] && treat.sample(rng);
                }
                Ok(Assignment { v, w })
            }
        }
    }

    /// Closed-form first- and second-order assignment probabilities.
    pub fn marginals(&self) -> Marginals {
        match self {
            Design::FullBernoulli { pi } => Marginals {
                p_in_experiment: 1.0,
                p_treated: *pi,
                pair_same_cluster: pi * pi,
                pair_cross_cluster: pi * pi,
            },
            Design::SubPopBernoulli { p, pi } => Marginals {
                p_in_experiment: *p,
                p_treated: p * pi,
                pair_same_cluster: p * p * pi * pi,
                pair_cross_cluster: p * p * pi * pi,
            },
            Design::TwoStageCluster {
                p, pi, clustering, mode, ..
            } => match mode {
                ClusterSamplingMode::BernoulliClusters => Marginals {
                    p_in_experiment: *p,
                    p_treated: p * pi,
                    // Same cluster: one inclusion event, two treatment coins.
                    pair_same_cluster: p * pi * pi,
                    pair_cross_cluster: p * p * pi * pi,
                },
                ClusterSamplingMode::FixedFraction => {
                    let k = clustering.k() as f64;
                    let m = (p * k).round();
                    let p1 = m / k;
                    let p2 = if k > 1.0 {
                        m * (m - 1.0).max(0.0) / (k * (k - 1.0))
                    } else {
                        p1
                    };
                    Marginals {
                        p_in_experiment: p1,
                        p_treated: p1 * pi,
                        pair_same_cluster: p1 * pi * pi,
                        pair_cross_cluster: p2 * pi * pi,
                    }
                }
            },
        }
    }
}

fn bernoulli(p: f64) -> Result<Bernoulli> {
    Bernoulli::new(p).map_err(|_| Error::InvalidArgument(format!("probability {p} outside [0, 1]")))
}

impl Assignment {
    pub fn n(&self) -> usize {
        self.v.len()
    }

    pub fn n_in_experiment(&self) -> usize {
        self.v.iter().filter(|&&x| x).count()
    }

    pub fn n_treated(&self) -> usize {
        self.w.iter().filter(|&&x| x).count()
    }

    /// In-experiment control units.
    pub fn n_control(&self) -> usize {
        self.v
            .iter()
            .zip(&self.w)
            .filter(|&(&v, &w)| v && !w)
            .count()
    }

    /// CSV dump `node,V,W` for audit.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("node,V,W\n");
        for i in 0..self.n() {
            writeln!(s, "{i},{},{}", self.v[i] as u8, self.w[i] as u8).unwrap();
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_with_pi_one_treats_everyone() {
        let d = Design::full(1.0).unwrap();
        let mut rng = substream(1, 0);
        let a = d.draw(5, &mut rng).unwrap();
        assert_eq!(a.v, vec![true; 5]);
        assert_eq!(a.w, vec![true; 5]);
    }

    #[test]
    fn out_of_experiment_implies_control() {
        let designs = [
            Design::full(0.4).unwrap(),
            Design::subpop(0.3, 0.6).unwrap(),
            Design::two_stage(
                0.5,
                0.5,
                Clustering::from_labels(&[0, 0, 1, 1, 2, 2]).unwrap(),
                ClusterSamplingMode::BernoulliClusters,
            )
            .unwrap(),
        ];
        for d in &designs {
            for rep in 0..200 {
                let mut rng = substream(9, rep);
                let a = d.draw(6, &mut rng).unwrap();
                for i in 0..6 {
                    assert!(a.v[i] || !a.w[i], "V=0 must force W=0");
                }
            }
        }
    }

    #[test]
    fn two_stage_constant_within_cluster() {
        let clustering = Clustering::from_labels(&[0, 1, 0, 1, 2, 2, 0]).unwrap();
        let d = Design::two_stage(
            0.5,
            0.5,
            clustering.clone(),
            ClusterSamplingMode::BernoulliClusters,
        )
        .unwrap();
        for rep in 0..200 {
            let mut rng = substream(4, rep);
            let a = d.draw(7, &mut rng).unwrap();
            for i in 0..7 {
                for j in 0..7 {
                    if clustering.cluster_of(i) == clustering.cluster_of(j) {
                        assert_eq!(a.v[i], a.v[j]);
                    }
                }
            }
        }
    }

    #[test]
    fn single_cluster_degeneracy() {
        let d = Design::two_stage(
            0.5,
            0.5,
            Clustering::from_labels(&[0, 0, 0, 0]).unwrap(),
            ClusterSamplingMode::BernoulliClusters,
        )
        .unwrap();
        for rep in 0..100 {
            let mut rng = substream(2, rep);
            let a = d.draw(4, &mut rng).unwrap();
            let all_out = a.v.iter().all(|&x| !x);
            let all_in = a.v.iter().all(|&x| x);
            assert!(all_out || all_in);
            if all_out {
                assert!(a.w.iter().all(|&x| !x));
            }
        }
    }

    #[test]
    fn fixed_fraction_samples_exact_count() {
        let clustering = Clustering::from_labels(&[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        let d = Design::two_stage(0.5, 0.5, clustering, ClusterSamplingMode::FixedFraction)
            .unwrap();
        for rep in 0..50 {
            let mut rng = substream(3, rep);
            let a = d.draw(8, &mut rng).unwrap();
            assert_eq!(a.n_in_experiment(), 4);
        }
    }

    #[test]
    fn marginal_values() {
        let m = Design::full(0.5).unwrap().marginals();
        assert_eq!(m.p_treated, 0.5);
        assert_eq!(m.pair_same_cluster, 0.25);

        let m = Design::subpop(0.5, 0.5).unwrap().marginals();
        assert_eq!(m.p_treated, 0.25);
        assert_eq!(m.pair_same_cluster, 0.0625);

        let m = Design::two_stage(
            0.5,
            0.5,
            Clustering::from_labels(&[0, 0]).unwrap(),
            ClusterSamplingMode::BernoulliClusters,
        )
        .unwrap()
        .marginals();
        assert_eq!(m.pair_same_cluster, 0.125);
        assert_eq!(m.pair_cross_cluster, 0.0625);
    }

    #[test]
    fn invalid_probabilities_rejected() {
        assert!(Design::full(1.5).is_err());
        assert!(Design::subpop(0.0, 0.5).is_err());
        assert!(Design::subpop(0.5, -0.1).is_err());
    }

    #[test]
    fn draws_are_substream_deterministic() {
        let d = Design::subpop(0.4, 0.5).unwrap();
        let a = d.draw(64, &mut substream(11, 3)).unwrap();
        let b = d.draw(64, &mut substream(11, 3)).unwrap();
        let c = d.draw(64, &mut substream(11, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn assignment_csv_layout() {
        let a = Assignment {
            v: vec![true, false],
            w: vec![true, false],
        };
        assert_eq!(a.to_csv(), "node,V,W\n0,1,1\n1,0,0\n");
    }
}
