//! Averaging of kernel estimators with weights minimising the modelled
//! integrated squared error `λᵀ Σ̂ λ`, where `Σ̂ = A + γ̂ B`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::bandwidth::{BandwidthSet, MAX_EXPERTS};
use crate::curvature::{estimate_gamma, normal_reference_gamma, CurvatureEstimate};
use crate::error::{Error, Result};
use crate::kernel::{GaussianKernel, Kde, INV_SQRT_2PI};
use crate::linalg::{require_symmetric, SymmetricFactor};
use crate::qp;
use crate::sample::{Sample, ScaleEstimate};

/// Variance part of the error model:
/// `A_ij = (n h_i h_j)⁻¹ ∫ K(u/h_i) K(u/h_j) du = [n √(2π(h_i² + h_j²))]⁻¹`.
pub fn build_a(n: usize, bandwidths: &BandwidthSet) -> DMatrix<f64> {
    let h = bandwidths.values();
    let k = h.len();
    let n = n as f64;
    DMatrix::from_fn(k, k, |i, j| {
        INV_SQRT_2PI / (n * (h[i] * h[i] + h[j] * h[j]).sqrt())
    })
}

/// Squared-bias part of the error model: `B = v vᵀ`, `v_i = c_K h_i² / 2`.
pub fn build_b(bandwidths: &BandwidthSet) -> DMatrix<f64> {
    let v = DVector::from_iterator(
        bandwidths.len(),
        bandwidths
            .values()
            .into_iter()
            .map(|h| GaussianKernel::SECOND_MOMENT * h * h / 2.0),
    );
    &v * v.transpose()
}

/// `Σ̂ = A + γ̂ B` with its spectral condition number.
#[derive(Debug, Clone, Serialize)]
pub struct SigmaModel {
    #[serde(serialize_with = "ser_matrix")]
    pub a: DMatrix<f64>,
    #[serde(serialize_with = "ser_matrix")]
    pub b: DMatrix<f64>,
    pub gamma_hat: f64,
    #[serde(serialize_with = "ser_matrix")]
    pub sigma: DMatrix<f64>,
    pub condition_estimate: f64,
}

impl SigmaModel {
    pub fn new(n: usize, bandwidths: &BandwidthSet, gamma_hat: f64) -> Self {
        let a = build_a(n, bandwidths);
        let b = build_b(bandwidths);
        let sigma = &a + &b * gamma_hat;
        let condition_estimate = SymmetricFactor::new(&sigma).condition();
        Self {
            a,
            b,
            gamma_hat,
            sigma,
            condition_estimate,
        }
    }
}

fn ser_matrix<S: serde::Serializer>(
    m: &DMatrix<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for i in 0..m.nrows() {
        let row: Vec<f64> = m.row(i).iter().copied().collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Weights sum to one, any sign.
    Linear,
    /// Weights on the probability simplex.
    Convex,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Linear => "linear",
            Mode::Convex => "convex",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Mode::Linear),
            "convex" => Ok(Mode::Convex),
            _ => Err(Error::UnknownName {
                kind: "averaging mode",
                name: s.into(),
                expected: "linear, convex".into(),
            }),
        }
    }
}

/// Which constraint the weights satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Constraint {
    /// `Σλ = 1`.
    Linear,
    /// `Σλ = 1`, `λ ≥ 0`.
    Convex,
    /// No constraint (unnormalised least-squares aggregation).
    Free,
}

impl From<Mode> for Constraint {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Linear => Constraint::Linear,
            Mode::Convex => Constraint::Convex,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub constraint: Constraint,
}

impl WeightVector {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `λᵀ M λ`.
    pub fn quadratic_form(&self, m: &DMatrix<f64>) -> f64 {
        let w = DVector::from_column_slice(&self.weights);
        w.dot(&(m * &w))
    }
}

/// Weights minimising `λᵀΣλ` subject to `Σλ = 1`: `Σ⁻¹1 / 1ᵀΣ⁻¹1`.
pub fn solve_weights_linear(sigma: &DMatrix<f64>) -> Result<WeightVector> {
    require_symmetric(sigma)?;
    let sol = qp::minimize_affine(sigma, &DVector::zeros(sigma.nrows()))?;
    Ok(WeightVector {
        weights: sol.weights,
        constraint: Constraint::Linear,
    })
}

/// Weights minimising `λᵀΣλ` over the probability simplex.
pub fn solve_weights_convex(sigma: &DMatrix<f64>) -> Result<WeightVector> {
    require_symmetric(sigma)?;
    let sol = qp::minimize_simplex(sigma, &DVector::zeros(sigma.nrows()))?;
    Ok(WeightVector {
        weights: sol.weights,
        constraint: Constraint::Convex,
    })
}

pub fn solve_weights(sigma: &DMatrix<f64>, mode: Mode) -> Result<WeightVector> {
    match mode {
        Mode::Linear => solve_weights_linear(sigma),
        Mode::Convex => solve_weights_convex(sigma),
    }
}

/// A weighted combination of kernel estimators.
#[derive(Debug, Clone)]
pub struct AveragedEstimator {
    experts: Vec<Kde>,
    weights: WeightVector,
}

impl AveragedEstimator {
    pub fn new(experts: Vec<Kde>, weights: WeightVector) -> Result<Self> {
        if experts.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} experts but {} weights",
                experts.len(),
                weights.len()
            )));
        }
        Ok(Self { experts, weights })
    }

    /// Equal-weight average of several combinations (used by the split
    /// schemes). The result lists every expert with its weight divided by
    /// the number of parts.
    pub fn mean_of(parts: &[AveragedEstimator]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("nothing to average".into()));
        }
        let scale = 1.0 / parts.len() as f64;
        let constraint = parts[0].weights.constraint;
        let mut experts = Vec::new();
        let mut weights = Vec::new();
        for p in parts {
            experts.extend(p.experts.iter().cloned());
            weights.extend(p.weights.weights.iter().map(|w| w * scale));
        }
        Self::new(
            experts,
            WeightVector {
                weights,
                constraint,
            },
        )
    }

    pub fn experts(&self) -> &[Kde] {
        &self.experts
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.experts
            .iter()
            .zip(&self.weights.weights)
            .map(|(e, w)| w * e.eval(x))
            .sum()
    }

    pub fn eval_many(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }

    pub fn max_bandwidth(&self) -> f64 {
        self.experts.iter().map(Kde::bandwidth).fold(0.0, f64::max)
    }
}

/// `γ̂` for the error model, replacing a non-positive estimate by the normal
/// reference value at the sample's robust scale. The flag reports whether
/// the replacement happened.
pub fn gamma_for_model(sample: &Sample) -> Result<(CurvatureEstimate, bool)> {
    match estimate_gamma(sample) {
        Ok(est) => Ok((est, false)),
        Err(Error::DegenerateCurvature { pilot, .. }) => {
            let sigma = ScaleEstimate::of(sample).nonzero_scale(sample[0]);
            Ok((
                CurvatureEstimate {
                    gamma_hat: normal_reference_gamma(sigma),
                    pilot_bandwidth: pilot,
                },
                true,
            ))
        }
        Err(e) => Err(e),
    }
}

/// Everything produced while fitting an averaged estimator.
#[derive(Debug, Clone)]
pub struct AverageFit {
    pub estimator: AveragedEstimator,
    pub bandwidths: BandwidthSet,
    pub curvature: CurvatureEstimate,
    pub model: SigmaModel,
    /// `γ̂` was non-positive and replaced by the normal-reference value.
    pub degenerate_gamma: bool,
    pub mode: Mode,
}

impl AverageFit {
    pub fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            mode: self.mode,
            bandwidths: self
                .bandwidths
                .iter()
                .map(|(l, h)| (l.to_string(), h))
                .collect(),
            gamma_hat: self.curvature.gamma_hat,
            pilot_bandwidth: self.curvature.pilot_bandwidth,
            weights: self.estimator.weights().weights.clone(),
            weight_sum: self.estimator.weights().sum(),
            condition_estimate: self.model.condition_estimate,
            degenerate_gamma: self.degenerate_gamma,
        }
    }
}

/// Serializable summary of an [`AverageFit`].
#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub mode: Mode,
    pub bandwidths: Vec<(String, f64)>,
    pub gamma_hat: f64,
    pub pilot_bandwidth: f64,
    pub weights: Vec<f64>,
    pub weight_sum: f64,
    pub condition_estimate: f64,
    pub degenerate_gamma: bool,
}

/// Fits `Σ̂` on `sample` for the given bandwidths; both averaging modes can
/// then be solved from it.
pub fn fit_model(
    sample: &Sample,
    bandwidths: &BandwidthSet,
) -> Result<(SigmaModel, CurvatureEstimate, bool)> {
    sample.require(4)?;
    if bandwidths.len() < 2 || bandwidths.len() > MAX_EXPERTS {
        return Err(Error::InvalidArgument(format!(
            "averaging needs between 2 and {MAX_EXPERTS} bandwidths, got {}",
            bandwidths.len()
        )));
    }
    let (curvature, degenerate) = gamma_for_model(sample)?;
    let model = SigmaModel::new(sample.len(), bandwidths, curvature.gamma_hat);
    SymmetricFactor::new(&model.sigma).check()?;
    Ok((model, curvature, degenerate))
}

/// The averaged estimator `f̂_AV` for `sample` and `bandwidths`.
pub fn average_estimator(
    sample: &Sample,
    bandwidths: &BandwidthSet,
    mode: Mode,
) -> Result<AverageFit> {
    let (model, curvature, degenerate_gamma) = fit_model(sample, bandwidths)?;
    let weights = solve_weights(&model.sigma, mode)?;
    let experts = bandwidths
        .values()
        .into_iter()
        .map(|h| Kde::new(sample.clone(), h))
        .collect::<Result<Vec<_>>>()?;
    Ok(AverageFit {
        estimator: AveragedEstimator::new(experts, weights)?,
        bandwidths: bandwidths.clone(),
        curvature,
        model,
        degenerate_gamma,
        mode,
    })
}
