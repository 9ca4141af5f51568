//! Horvitz-Thompson estimators, the difference-in-means baseline, and a
//! heuristic variance.
//!
//! `ht_upstream` inverse-weights the per-node outcome `Y`, `ht_diffusion`
//! the diffusion metric `D`; their sum `ht_total` is the estimator of
//! interest. All three divide by the design probabilities `p * pi` and
//! `p * (1 - pi)`, so they stay well defined (zero sums) on degenerate
//! draws. The confidence interval is a plug-in heuristic and is flagged as
//! such; it never participates in theory validation.

use serde::{Deserialize, Serialize};

use crate::design::{Assignment, Design};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn check_common<T>(x: &[T], a: &Assignment, p: f64, pi: f64) -> Result<()> {
    if x.len() != a.n() {
        return Err(Error::InvalidArgument(format!(
            "outcome vector length {} does not match assignment length {}",
            x.len(),
            a.n()
        )));
    }
    if !(pi > 0.0 && pi < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "pi = {pi} must lie strictly inside (0, 1) for estimation"
        )));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "p = {p} must lie in (0, 1] for estimation"
        )));
    }
    Ok(())
}

fn ht<T: Scalar>(x: &[T], a: &Assignment, p: f64, pi: f64) -> Result<T> {
    check_common(x, a, p, pi)?;
    let mut treated = T::zero();
    let mut control = T::zero();
    for ((&xi, &v), &w) in x.iter().zip(&a.v).zip(&a.w) {
        if v {
            if w {
                treated += xi;
            } else {
                control += xi;
            }
        }
    }
    let n = T::from_real(x.len() as f64);
    Ok((treated / T::from_real(p * pi) - control / T::from_real(p * (1.0 - pi))) / n)
}

/// Horvitz-Thompson estimator on the upstream aggregate `Y`.
pub fn ht_upstream<T: Scalar>(y: &[T], a: &Assignment, p: f64, pi: f64) -> Result<T> {
    ht(y, a, p, pi)
}

/// Horvitz-Thompson estimator on the diffusion metric `D`.
pub fn ht_diffusion<T: Scalar>(d: &[T], a: &Assignment, p: f64, pi: f64) -> Result<T> {
    ht(d, a, p, pi)
}

/// The combined estimator; algebraically the single HT estimator applied to
/// `S_i = Y_i + D_i`.
pub fn ht_total<T: Scalar>(y: &[T], d: &[T], a: &Assignment, p: f64, pi: f64) -> Result<T> {
    Ok(ht_upstream(y, a, p, pi)? + ht_diffusion(d, a, p, pi)?)
}

/// Difference in means over in-experiment units.
pub fn diff_in_means<T: Scalar>(x: &[T], a: &Assignment) -> Result<T> {
    if x.len() != a.n() {
        return Err(Error::InvalidArgument(format!(
            "outcome vector length {} does not match assignment length {}",
            x.len(),
            a.n()
        )));
    }
    let mut sum_t = T::zero();
    let mut sum_c = T::zero();
    let (mut n_t, mut n_c) = (0usize, 0usize);
    for ((&xi, &v), &w) in x.iter().zip(&a.v).zip(&a.w) {
        if v {
            if w {
                sum_t += xi;
                n_t += 1;
            } else {
                sum_c += xi;
                n_c += 1;
            }
        }
    }
    if n_t == 0 {
        return Err(Error::DegenerateGroup("treated"));
    }
    if n_c == 0 {
        return Err(Error::DegenerateGroup("control"));
    }
    Ok(sum_t / T::from_real(n_t as f64) - sum_c / T::from_real(n_c as f64))
}

/// All point estimates for one draw, plus the heuristic variance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimateReport<T> {
    pub tau1: T,
    pub tau2: T,
    /// `tau1 + tau2`, exactly.
    pub tau: T,
    /// Difference in means; absent when a group is empty.
    pub dim: Option<T>,
    pub n_in_experiment: usize,
    pub n_treated: usize,
    pub n_control: usize,
    /// Plug-in variance of `tau` from the within-group sample variances of
    /// `S = Y + D`; absent when either group has fewer than two units.
    pub var_tau: Option<T>,
    pub ci_low: Option<T>,
    pub ci_high: Option<T>,
    pub treated_empty: bool,
    pub control_empty: bool,
}

impl<T> EstimateReport<T> {
    /// True when the draw cannot support the difference in means or the CI.
    pub fn degenerate(&self) -> bool {
        self.treated_empty || self.control_empty
    }
}

/// Computes every estimate for one draw under `design`.
pub fn report<T: Scalar>(
    y: &[T],
    d: &[T],
    a: &Assignment,
    design: &Design,
) -> Result<EstimateReport<T>> {
    let (p, pi) = (design.p(), design.pi());
    let tau1 = ht_upstream(y, a, p, pi)?;
    let tau2 = ht_diffusion(d, a, p, pi)?;
    let tau = tau1 + tau2;

    let dim = diff_in_means(y, a).ok();
    let s: Vec<T> = y.iter().zip(d).map(|(&yi, &di)| yi + di).collect();

    let n = a.n();
    let n_t = a.n_treated();
    let n_c = a.n_control();
    let n_in = a.n_in_experiment();

    let group_var = |want_treated: bool| -> Option<T> {
        let mut mean = T::zero();
        let mut m2 = T::zero();
        let mut count = 0.0f64;
        for ((&si, &v), &w) in s.iter().zip(&a.v).zip(&a.w) {
            if v && w == want_treated {
                count += 1.0;
                let delta = si - mean;
                mean += delta / T::from_real(count);
                m2 += delta * (si - mean);
            }
        }
        (count >= 2.0).then(|| m2 / T::from_real(count - 1.0))
    };

    let var_tau = match (group_var(true), group_var(false)) {
        (Some(vt), Some(vc)) => {
            let wt = 1.0 / (n as f64 * p * pi);
            let wc = 1.0 / (n as f64 * p * (1.0 - pi));
            Some(
                T::from_real(wt * wt * n_t as f64) * vt
                    + T::from_real(wc * wc * n_c as f64) * vc,
            )
        }
        _ => None,
    };
    let half_width = var_tau.map(|v| T::from_real(1.96) * v.sqrt());

    Ok(EstimateReport {
        tau1,
        tau2,
        tau,
        dim,
        n_in_experiment: n_in,
        n_treated: n_t,
        n_control: n_c,
        var_tau,
        ci_low: half_width.map(|h| tau - h),
        ci_high: half_width.map(|h| tau + h),
        treated_empty: n_t == 0,
        control_empty: n_c == 0,
    })
}
