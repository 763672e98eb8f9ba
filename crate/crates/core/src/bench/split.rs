//! Sample-splitting aggregates: the averaging rule with `γ̂` taken from a
//! held-out half (AVsplit), and least-squares aggregation on a validation
//! half (RT, RTconv). Both average their aggregates over several random
//! splits.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use serde::Serialize;

use super::rng::rng_from_seed;
use crate::averaging::{
    gamma_for_model, AveragedEstimator, Constraint, Mode, SigmaModel, WeightVector,
};
use crate::bandwidth::{BandwidthSet, Selector};
use crate::error::{Error, Result};
use crate::kernel::{gram_matrix, Kde};
use crate::linalg::SymmetricFactor;
use crate::qp;
use crate::sample::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitScheme {
    pub num_splits: usize,
    pub fraction_train: f64,
}

impl Default for SplitScheme {
    fn default() -> Self {
        Self {
            num_splits: 10,
            fraction_train: 0.5,
        }
    }
}

impl SplitScheme {
    pub fn new(num_splits: usize, fraction_train: f64) -> Result<Self> {
        if num_splits == 0 {
            return Err(Error::InvalidArgument(
                "at least one split is required".into(),
            ));
        }
        if !(fraction_train > 0.0 && fraction_train < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "training fraction must lie in (0, 1), got {fraction_train}"
            )));
        }
        Ok(Self {
            num_splits,
            fraction_train,
        })
    }

    /// `⌈fraction · n⌉`.
    pub fn train_size(&self, n: usize) -> usize {
        (self.fraction_train * n as f64).ceil() as usize
    }
}

/// One random split with experts fitted on its training part.
#[derive(Debug, Clone)]
pub struct SplitPart {
    pub train: Sample,
    pub validation: Sample,
    pub bandwidths: BandwidthSet,
    pub experts: Vec<Kde>,
}

/// Draws the splits and fits the experts, re-selecting each bandwidth on
/// every training part.
pub fn prepare_splits(
    sample: &Sample,
    selectors: &[Selector],
    scheme: &SplitScheme,
    seed: u64,
) -> Result<Vec<SplitPart>> {
    sample.require(8)?;
    let n = sample.len();
    let n_train = scheme.train_size(n);
    if n_train == 0 || n_train >= n {
        return Err(Error::InvalidArgument(format!(
            "split of {n} observations leaves an empty part"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut order: Vec<usize> = (0..n).collect();
    (0..scheme.num_splits)
        .map(|_| {
            order.shuffle(&mut rng);
            let mut train_idx = order[..n_train].to_vec();
            let mut valid_idx = order[n_train..].to_vec();
            train_idx.sort_unstable();
            valid_idx.sort_unstable();
            let train = sample.select(&train_idx)?;
            let validation = sample.select(&valid_idx)?;
            let bandwidths = BandwidthSet::select(&train, selectors)?;
            let experts = bandwidths
                .values()
                .into_iter()
                .map(|h| Kde::new(train.clone(), h))
                .collect::<Result<Vec<_>>>()?;
            Ok(SplitPart {
                train,
                validation,
                bandwidths,
                experts,
            })
        })
        .collect()
}

/// Per-split aggregates and their equal-weight average.
#[derive(Debug, Clone)]
pub struct SplitFit {
    pub combined: AveragedEstimator,
    pub splits: Vec<AveragedEstimator>,
    /// Number of splits whose `γ̂` fell back to the normal reference.
    pub degenerate_gamma: usize,
}

fn finish(splits: Vec<AveragedEstimator>, degenerate_gamma: usize) -> Result<SplitFit> {
    Ok(SplitFit {
        combined: AveragedEstimator::mean_of(&splits)?,
        splits,
        degenerate_gamma,
    })
}

/// Linear averaging weights for one split: experts from the training part,
/// `γ̂` from the validation part, `Σ̂ = A(n_train, h) + γ̂ B`.
pub fn av_split_weights(part: &SplitPart) -> Result<(WeightVector, bool)> {
    let (curvature, degenerate) = gamma_for_model(&part.validation)?;
    let model = SigmaModel::new(part.train.len(), &part.bandwidths, curvature.gamma_hat);
    SymmetricFactor::new(&model.sigma).check()?;
    let w = crate::averaging::solve_weights_linear(&model.sigma)?;
    Ok((w, degenerate))
}

pub fn av_split_from(parts: &[SplitPart]) -> Result<SplitFit> {
    let mut splits = Vec::with_capacity(parts.len());
    let mut degenerate = 0;
    for part in parts {
        let (w, flag) = av_split_weights(part)?;
        degenerate += usize::from(flag);
        splits.push(AveragedEstimator::new(part.experts.clone(), w)?);
    }
    finish(splits, degenerate)
}

pub fn av_split(
    sample: &Sample,
    selectors: &[Selector],
    scheme: &SplitScheme,
    seed: u64,
) -> Result<SplitFit> {
    av_split_from(&prepare_splits(sample, selectors, scheme, seed)?)
}

/// Least-squares aggregation criterion `λᵀGλ - λᵀb` on one split:
/// `G_ij = ∫ f̂_i f̂_j` and `b_i = (2/m) Σ_validation f̂_i(X_l)`.
pub fn rt_criterion(part: &SplitPart) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let g = gram_matrix(&part.experts)?;
    let k = part.experts.len();
    let gram = DMatrix::from_fn(k, k, |i, j| g[i][j]);
    let m = part.validation.len() as f64;
    let b = DVector::from_iterator(
        k,
        part.experts.iter().map(|e| {
            let s: f64 = part.validation.iter().map(|&x| e.eval(x)).sum();
            2.0 * s / m
        }),
    );
    Ok((gram, b))
}

/// Minimiser of `λᵀGλ - λᵀb`: unconstrained (`2Gλ = b`) in linear mode,
/// over the simplex in convex mode.
pub fn rt_weights(gram: &DMatrix<f64>, b: &DVector<f64>, mode: Mode) -> Result<WeightVector> {
    match mode {
        Mode::Linear => {
            let factor = SymmetricFactor::new(&(gram * 2.0));
            factor.check()?;
            Ok(WeightVector {
                weights: factor.solve(b).iter().copied().collect(),
                constraint: Constraint::Free,
            })
        }
        Mode::Convex => Ok(WeightVector {
            weights: qp::minimize_simplex(gram, b)?.weights,
            constraint: Constraint::Convex,
        }),
    }
}

pub fn rt_from(parts: &[SplitPart], mode: Mode) -> Result<SplitFit> {
    let mut splits = Vec::with_capacity(parts.len());
    for part in parts {
        let (gram, b) = rt_criterion(part)?;
        let w = rt_weights(&gram, &b, mode)?;
        splits.push(AveragedEstimator::new(part.experts.clone(), w)?);
    }
    finish(splits, 0)
}

pub fn rt_aggregate(
    sample: &Sample,
    selectors: &[Selector],
    mode: Mode,
    scheme: &SplitScheme,
    seed: u64,
) -> Result<SplitFit> {
    rt_from(&prepare_splits(sample, selectors, scheme, seed)?, mode)
}
