//! Estimation of total treatment effects on networks whose outcomes aggregate
//! from per-edge (dyadic) interactions.
//!
//! A unit's observed outcome is the sum of outcomes attached to its incoming
//! edges; the mirror aggregate over outgoing edges (the diffusion metric)
//! carries the information a classical Horvitz-Thompson estimator discards
//! under interference. This crate provides:
//!
//! - [`graph`]: directed graphs, edge-list ingestion, degree statistics
//! - [`clustering`]: Louvain community detection with a resolution parameter,
//!   plus cluster-overlap statistics
//! - [`model`]: the bilinear dyadic outcome model and its ground-truth effect
//! - [`design`]: full-population, sub-population, and two-stage cluster
//!   randomization schemes
//! - [`estimator`]: Horvitz-Thompson estimators on both aggregates, the
//!   difference-in-means baseline, and a heuristic confidence interval
//! - [`theory`]: closed-form expectations and biases for every estimator
//!   under every design
//! - [`oracle`]: exact expectations by exhaustive enumeration of the
//!   randomization space on small instances
//! - [`harness`]: seeded, reproducible Monte Carlo sweeps
//!
//! Numeric kernels are generic over the scalar type via [`Scalar`]
//! (`f32`/`f64`); concrete aliases live at the crate root.

pub mod clustering;
pub mod design;
pub mod error;
pub mod estimator;
pub mod graph;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod theory;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Edge coefficients in double precision.
pub type Coeffs64 = model::Coeffs<f64>;
/// Edge coefficients in single precision.
pub type Coeffs32 = model::Coeffs<f32>;
/// Bound model parameters in double precision.
pub type DyadicParams64 = model::DyadicParams<f64>;
/// Bound model parameters in single precision.
pub type DyadicParams32 = model::DyadicParams<f32>;
/// Per-node outcome vectors in double precision.
pub type OutcomeVectors64 = model::OutcomeVectors<f64>;
/// Estimate report in double precision.
pub type EstimateReport64 = estimator::EstimateReport<f64>;
/// Theory report in double precision.
pub type TheoryReport64 = theory::TheoryReport<f64>;
