//! Averaging of Gaussian kernel density estimators.
//!
//! Several kernel estimators built with different data-driven bandwidths
//! are combined linearly. The weights minimise the modelled integrated
//! squared error `λᵀ Σ̂ λ`, where `Σ̂ = A + γ̂ B` only depends on the
//! bandwidths, the sample size and a plug-in estimate `γ̂` of `∫ f''²`.
//!
//! ```
//! use kdeavg::{average_estimator, BandwidthSet, Mode, Sample, Selector};
//!
//! let xs: Vec<f64> = (0..200).map(|i| ((i * 37) % 101) as f64 / 25.0).collect();
//! let sample = Sample::new(xs).unwrap();
//! let bandwidths = BandwidthSet::select(&sample, &Selector::ALL).unwrap();
//! let fit = average_estimator(&sample, &bandwidths, Mode::Linear).unwrap();
//! assert!((fit.estimator.weights().sum() - 1.0).abs() < 1e-12);
//! let density_at_two = fit.estimator.eval(2.0);
//! # assert!(density_at_two > 0.0);
//! ```

// `!(x > 0.0)` deliberately rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod averaging;
pub mod bandwidth;
pub mod bench;
pub mod curvature;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod numeric;
pub mod qp;
pub mod sample;

pub use averaging::{
    average_estimator, build_a, build_b, solve_weights_convex, solve_weights_linear, AverageFit,
    AveragedEstimator, Constraint, Diagnostics, Mode, SigmaModel, WeightVector,
};
pub use bandwidth::{bw_sheather_jones, bw_silverman, BandwidthSet, Selector};
pub use curvature::{estimate_gamma, gamma_true, CurvatureEstimate};
pub use error::{Error, Result};
pub use kernel::{gram_inner, kde_eval, kernel_deriv, kernel_eval, GaussianKernel, Kde};
pub use sample::{Sample, ScaleEstimate};
