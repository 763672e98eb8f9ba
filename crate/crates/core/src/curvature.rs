//! Plug-in estimation of the curvature functional `γ = ∫ f''(x)² dx`.
//!
//! `γ` equals `ψ₄ = ∫ f⁗ f`, estimated by the off-diagonal double sum
//! `(n(n-1))⁻¹ g⁻⁵ Σ_{i≠j} φ⁽⁴⁾((X_i - X_j)/g)`. The pilot `g` comes from a
//! one-step normal reference for `ψ₆`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bench::density::DensitySpec;
use crate::error::{Error, Result};
use crate::kernel::{kernel_deriv, phi4_sq, GaussianKernel};
use crate::numeric::{romberg, PairSquares};
use crate::sample::{Sample, ScaleEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureEstimate {
    pub gamma_hat: f64,
    pub pilot_bandwidth: f64,
}

/// `γ` of a normal density with standard deviation `sigma`: `3 / (8 √π σ⁵)`.
pub fn normal_reference_gamma(sigma: f64) -> f64 {
    3.0 / (8.0 * PI.sqrt() * sigma.powi(5))
}

/// Normal-reference pilot bandwidth for the `ψ₄` estimator.
pub fn normal_reference_pilot(sample: &Sample) -> f64 {
    let sigma = ScaleEstimate::of(sample).nonzero_scale(sample[0]);
    let psi6 = -15.0 / (16.0 * PI.sqrt() * sigma.powi(7));
    let phi4_0 = kernel_deriv(4, 0.0).expect("order 4 is supported");
    let n = sample.len() as f64;
    (-2.0 * phi4_0 / (GaussianKernel::SECOND_MOMENT * psi6 * n)).powf(1.0 / 7.0)
}

/// `γ̂` with the normal-reference pilot.
pub fn estimate_gamma(sample: &Sample) -> Result<CurvatureEstimate> {
    sample.require(4)?;
    if sample.is_constant() {
        return Err(Error::ConstantSample);
    }
    estimate_gamma_with_pilot(sample, normal_reference_pilot(sample))
}

/// `γ̂` at a caller-supplied pilot bandwidth. Needs at least two observations.
pub fn estimate_gamma_with_pilot(sample: &Sample, pilot: f64) -> Result<CurvatureEstimate> {
    sample.require(2)?;
    if !(pilot > 0.0 && pilot.is_finite()) {
        return Err(Error::InvalidBandwidth(pilot));
    }
    let n = sample.len() as f64;
    let pairs = PairSquares::new(sample.values());
    let inv_g2 = 1.0 / (pilot * pilot);
    let off_diagonal = 2.0 * pairs.sum(|d2| phi4_sq(d2 * inv_g2));
    let gamma_hat = off_diagonal / (n * (n - 1.0) * pilot.powi(5));
    if !(gamma_hat > 0.0) {
        return Err(Error::DegenerateCurvature { gamma_hat, pilot });
    }
    Ok(CurvatureEstimate {
        gamma_hat,
        pilot_bandwidth: pilot,
    })
}

/// Accurate `∫ f''²` of a benchmark density, by Romberg integration over the
/// density's curvature window.
pub fn gamma_true(density: &DensitySpec) -> Result<f64> {
    let f2 = density
        .second_deriv
        .ok_or_else(|| Error::MissingSecondDerivative(density.name.to_string()))?;
    let (lo, hi) = density.curvature_window;
    let (value, _) = romberg(|x| f2(x).powi(2), lo, hi, 1e-13);
    Ok(value)
}
