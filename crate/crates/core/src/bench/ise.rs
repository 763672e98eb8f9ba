//! Integrated squared error by trapezoid quadrature, and the empirical
//! error matrix `Σ_ij = ∫ (f̂_i - f)(f̂_j - f)`.

use nalgebra::DMatrix;

use super::density::DensitySpec;
use crate::averaging::AveragedEstimator;
use crate::error::{Error, Result};
use crate::kernel::{gram_matrix, GaussianKernel, Kde, INV_SQRT_2PI};
use crate::numeric::{linspace, trapezoid_uniform};

pub const ISE_GRID_POINTS: usize = (1 << 13) + 1;

/// The integration window is padded by this many (largest) bandwidths.
pub const WINDOW_PADDING: f64 = 12.0;

/// Kernel terms with `|u| > 10` are below `e^-50 ≈ 2e-22` of the peak and
/// are skipped when filling the quadrature grid.
const KERNEL_CUTOFF: f64 = 10.0;

/// Quadrature nodes over a density's padded window, with the true density
/// tabulated on them.
#[derive(Debug, Clone)]
pub struct IseGrid {
    xs: Vec<f64>,
    dx: f64,
    truth: Vec<f64>,
}

impl IseGrid {
    pub fn new(truth: &DensitySpec, max_bandwidth: f64) -> Self {
        Self::with_points(truth, max_bandwidth, ISE_GRID_POINTS)
    }

    pub fn with_points(truth: &DensitySpec, max_bandwidth: f64, points: usize) -> Self {
        let (lo, hi) = truth.integration_window;
        let pad = WINDOW_PADDING * max_bandwidth;
        let (lo, hi) = (lo - pad, hi + pad);
        let xs = linspace(lo, hi, points);
        let truth = xs.iter().map(|&x| (truth.pdf)(x)).collect();
        Self {
            dx: (hi - lo) / (points - 1) as f64,
            xs,
            truth,
        }
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn truth(&self) -> &[f64] {
        &self.truth
    }

    /// Kernel estimate on the grid nodes. Observations further than ten
    /// bandwidths from a node are skipped.
    pub fn kde_values(&self, kde: &Kde) -> Vec<f64> {
        let h = kde.bandwidth();
        let inv_h = 1.0 / h;
        let reach = KERNEL_CUTOFF * h;
        let sorted = kde.sample().sorted();
        let norm = INV_SQRT_2PI / (sorted.len() as f64 * h);
        let mut lo = 0;
        let mut hi = 0;
        self.xs
            .iter()
            .map(|&x| {
                while lo < sorted.len() && sorted[lo] < x - reach {
                    lo += 1;
                }
                hi = hi.max(lo);
                while hi < sorted.len() && sorted[hi] <= x + reach {
                    hi += 1;
                }
                let mut sum = 0.0;
                for &xi in &sorted[lo..hi] {
                    let u = (xi - x) * inv_h;
                    sum += (-0.5 * u * u).exp();
                }
                sum * norm
            })
            .collect()
    }

    /// `∫ (values - f)²`.
    pub fn ise_of_values(&self, values: &[f64]) -> f64 {
        let sq: Vec<f64> = values
            .iter()
            .zip(&self.truth)
            .map(|(v, f)| (v - f) * (v - f))
            .collect();
        trapezoid_uniform(&sq, self.dx)
    }

    /// `∫ values · f`.
    pub fn inner_with_truth(&self, values: &[f64]) -> f64 {
        let prod: Vec<f64> = values.iter().zip(&self.truth).map(|(v, f)| v * f).collect();
        trapezoid_uniform(&prod, self.dx)
    }

    /// `∫ f²` over the window.
    pub fn truth_norm_sq(&self) -> f64 {
        let sq: Vec<f64> = self.truth.iter().map(|f| f * f).collect();
        trapezoid_uniform(&sq, self.dx)
    }
}

/// Anything whose values can be tabulated on an [`IseGrid`].
pub trait GridEstimate {
    fn max_bandwidth(&self) -> f64;
    fn grid_values(&self, grid: &IseGrid) -> Vec<f64>;
}

impl GridEstimate for Kde {
    fn max_bandwidth(&self) -> f64 {
        self.bandwidth()
    }

    fn grid_values(&self, grid: &IseGrid) -> Vec<f64> {
        grid.kde_values(self)
    }
}

impl GridEstimate for AveragedEstimator {
    fn max_bandwidth(&self) -> f64 {
        AveragedEstimator::max_bandwidth(self)
    }

    fn grid_values(&self, grid: &IseGrid) -> Vec<f64> {
        let mut out = vec![0.0; grid.xs().len()];
        for (expert, &w) in self.experts().iter().zip(&self.weights().weights) {
            for (o, v) in out.iter_mut().zip(grid.kde_values(expert)) {
                *o += w * v;
            }
        }
        out
    }
}

/// Integrated squared error of an estimate against the true density.
pub fn ise<E: GridEstimate + ?Sized>(estimate: &E, truth: &DensitySpec) -> f64 {
    let grid = IseGrid::new(truth, estimate.max_bandwidth());
    grid.ise_of_values(&estimate.grid_values(&grid))
}

/// ISE of an arbitrary function, on the window padded by `pad_bandwidth`.
pub fn ise_of_fn<F: Fn(f64) -> f64>(f: F, truth: &DensitySpec, pad_bandwidth: f64) -> f64 {
    let grid = IseGrid::new(truth, pad_bandwidth);
    let values: Vec<f64> = grid.xs().iter().map(|&x| f(x)).collect();
    grid.ise_of_values(&values)
}

/// Leading terms of the ISE expansion, `‖K‖²/(nh) + γ c_K² h⁴ / 4`.
pub fn asymptotic_ise(n: usize, h: f64, gamma: f64) -> f64 {
    let ck = GaussianKernel::SECOND_MOMENT;
    GaussianKernel::NORM_SQ / (n as f64 * h) + gamma * ck * ck * h.powi(4) / 4.0
}

/// Empirical error matrix of experts sharing one sample. Products of
/// experts are integrated exactly; terms involving the true density use
/// the quadrature grid.
pub fn empirical_sigma(experts: &[Kde], truth: &DensitySpec) -> Result<DMatrix<f64>> {
    if experts.is_empty() {
        return Err(Error::InvalidArgument("no experts".into()));
    }
    let gram = gram_matrix(experts)?;
    let max_h = experts.iter().map(Kde::bandwidth).fold(0.0, f64::max);
    let grid = IseGrid::new(truth, max_h);
    let cross: Vec<f64> = experts
        .iter()
        .map(|e| grid.inner_with_truth(&grid.kde_values(e)))
        .collect();
    let ff = grid.truth_norm_sq();
    let k = experts.len();
    Ok(DMatrix::from_fn(k, k, |i, j| {
        gram[i][j] - cross[i] - cross[j] + ff
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::density::{sample_density, Density};
    use crate::sample::Sample;

    #[test]
    fn truth_against_itself_is_zero() {
        for d in Density::ALL {
            let spec = d.spec();
            assert!(ise_of_fn(spec.pdf, &spec, 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_values_match_direct_evaluation() {
        for d in [Density::Norm, Density::Cauchy, Density::Gamma] {
            let s = sample_density(d, 300, 4).unwrap();
            let k = Kde::new(s, 0.21).unwrap();
            let grid = IseGrid::new(&d.spec(), k.bandwidth());
            let fast = grid.kde_values(&k);
            for (x, v) in grid.xs().iter().zip(&fast).step_by(37) {
                let direct = k.eval(*x);
                assert!((v - direct).abs() <= 1e-14 * direct.max(1e-3), "{d} {x}");
            }
        }
    }

    #[test]
    fn asymptotic_formula_value() {
        let v = asymptotic_ise(1000, 0.2, 0.2115711);
        assert!((v - 0.0014951).abs() < 1e-7);
    }

    #[test]
    fn grid_doubling_changes_little() {
        for d in Density::ALL {
            let s = sample_density(d, 500, 12).unwrap();
            let k = Kde::new(
                s,
                crate::bandwidth::Selector::Nrd0
                    .select(&sample_density(d, 500, 12).unwrap())
                    .unwrap(),
            )
            .unwrap();
            let spec = d.spec();
            let base = IseGrid::new(&spec, k.bandwidth());
            let fine = IseGrid::with_points(&spec, k.bandwidth(), 2 * ISE_GRID_POINTS - 1);
            let a = base.ise_of_values(&base.kde_values(&k));
            let b = fine.ise_of_values(&fine.kde_values(&k));
            assert!(((a - b) / b).abs() < 1e-3, "{d}: {a} vs {b}");
        }
    }

    #[test]
    fn empirical_sigma_diagonal_is_ise() {
        let s = sample_density(Density::Norm, 400, 21).unwrap();
        let experts: Vec<Kde> = [0.2, 0.3, 0.45]
            .iter()
            .map(|&h| Kde::new(s.clone(), h).unwrap())
            .collect();
        let spec = Density::Norm.spec();
        let sigma = empirical_sigma(&experts, &spec).unwrap();
        for (i, e) in experts.iter().enumerate() {
            let direct = ise(e, &spec);
            assert!(((sigma[(i, i)] - direct) / direct).abs() < 1e-3);
        }
        assert!(crate::linalg::is_symmetric(&sigma));
        let min_eig = sigma.clone().symmetric_eigenvalues().min();
        assert!(min_eig > -1e-12 * sigma.amax());
    }

    #[test]
    fn averaged_ise_is_the_quadratic_form() {
        use crate::averaging::{AveragedEstimator, Constraint, WeightVector};
        let s = sample_density(Density::Mix05, 300, 2).unwrap();
        let experts: Vec<Kde> = [0.25, 0.4]
            .iter()
            .map(|&h| Kde::new(s.clone(), h).unwrap())
            .collect();
        let spec = Density::Mix05.spec();
        let sigma = empirical_sigma(&experts, &spec).unwrap();
        let w = WeightVector {
            weights: vec![1.7, -0.7],
            constraint: Constraint::Linear,
        };
        let est = AveragedEstimator::new(experts, w.clone()).unwrap();
        let direct = ise(&est, &spec);
        assert!(((w.quadratic_form(&sigma) - direct) / direct).abs() < 1e-3);
    }

    #[test]
    fn empirical_sigma_rejects_mixed_samples() {
        let a = Kde::new(Sample::new(vec![0.0, 1.0]).unwrap(), 0.3).unwrap();
        let b = Kde::new(Sample::new(vec![0.0, 2.0]).unwrap(), 0.3).unwrap();
        assert_eq!(
            empirical_sigma(&[a, b], &Density::Norm.spec()).unwrap_err(),
            Error::SampleMismatch
        );
    }
}
