//! Gaussian kernel, its even derivatives, and kernel density estimators.

use crate::error::{Error, Result};
use crate::numeric::PairSquares;
use crate::sample::Sample;

/// `1 / sqrt(2 pi)`.
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Constants of the standard Gaussian kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKernel {
    /// `∫ K(u)^2 du = 1 / (2 sqrt(pi))`.
    pub norm_sq: f64,
    /// `∫ u^2 K(u) du`.
    pub second_moment: f64,
}

impl GaussianKernel {
    pub const NORM_SQ: f64 = 0.282_094_791_773_878_14;
    pub const SECOND_MOMENT: f64 = 1.0;

    pub const fn new() -> Self {
        Self {
            norm_sq: Self::NORM_SQ,
            second_moment: Self::SECOND_MOMENT,
        }
    }
}

impl Default for GaussianKernel {
    fn default() -> Self {
        Self::new()
    }
}

/// Standard normal density.
#[inline]
pub fn kernel_eval(u: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * u * u).exp()
}

/// Fourth derivative of the standard normal density as a function of `w = u^2`.
#[inline]
pub(crate) fn phi4_sq(w: f64) -> f64 {
    (w * w - 6.0 * w + 3.0) * INV_SQRT_2PI * (-0.5 * w).exp()
}

/// Sixth derivative of the standard normal density as a function of `w = u^2`.
#[inline]
pub(crate) fn phi6_sq(w: f64) -> f64 {
    (((w - 15.0) * w + 45.0) * w - 15.0) * INV_SQRT_2PI * (-0.5 * w).exp()
}

/// Even derivatives of the Gaussian kernel via Hermite polynomials.
///
/// Only orders 4 and 6 are needed by the plug-in estimators.
pub fn kernel_deriv(order: u32, u: f64) -> Result<f64> {
    let w = u * u;
    match order {
        4 => Ok(phi4_sq(w)),
        6 => Ok(phi6_sq(w)),
        other => Err(Error::UnsupportedDerivative(other)),
    }
}

/// Centered normal density with standard deviation `s`, evaluated at `d`
/// given `d2 = d^2`.
#[inline]
fn normal_pdf_sq(d2: f64, s: f64) -> f64 {
    INV_SQRT_2PI / s * (-0.5 * d2 / (s * s)).exp()
}

/// A Gaussian kernel density estimator: a sample and a bandwidth.
#[derive(Debug, Clone)]
pub struct Kde {
    sample: Sample,
    bandwidth: f64,
}

impl Kde {
    pub fn new(sample: Sample, bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::InvalidBandwidth(bandwidth));
        }
        Ok(Self { sample, bandwidth })
    }

    pub fn sample(&self) -> &Sample {
        &self.sample
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// `(n h)^-1 sum_i K((X_i - x) / h)`.
    pub fn eval(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let inv_h = 1.0 / h;
        let mut sum = 0.0;
        for &xi in self.sample.iter() {
            sum += kernel_eval((xi - x) * inv_h);
        }
        sum / (self.sample.len() as f64 * h)
    }

    /// Evaluates at each point of `xs`; identical to calling [`Kde::eval`]
    /// point by point.
    pub fn eval_many(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }
}

/// Free-function form of [`Kde::eval`].
pub fn kde_eval(kde: &Kde, x: f64) -> f64 {
    kde.eval(x)
}

/// Exact `∫ f_i f_j` for two estimators on the same sample.
///
/// The convolution of two Gaussian kernels with bandwidths `h_i`, `h_j` is a
/// Gaussian with standard deviation `sqrt(h_i^2 + h_j^2)`, so the integral is
/// a double sum over pairs of observations.
pub fn gram_inner(a: &Kde, b: &Kde) -> Result<f64> {
    if !a.sample.same_as(&b.sample) {
        return Err(Error::SampleMismatch);
    }
    let pairs = PairSquares::new(a.sample.values());
    Ok(gram_entry(&pairs, a.bandwidth, b.bandwidth))
}

fn gram_entry(pairs: &PairSquares<'_>, hi: f64, hj: f64) -> f64 {
    let s = (hi * hi + hj * hj).sqrt();
    let n = pairs.n() as f64;
    pairs.full_sum(|d2| normal_pdf_sq(d2, s)) / (n * n)
}

/// All inner products `∫ f_i f_j` for estimators sharing one sample.
pub fn gram_matrix(experts: &[Kde]) -> Result<Vec<Vec<f64>>> {
    let Some(first) = experts.first() else {
        return Ok(Vec::new());
    };
    if experts.iter().any(|e| !e.sample.same_as(&first.sample)) {
        return Err(Error::SampleMismatch);
    }
    let pairs = PairSquares::new(first.sample.values());
    let k = experts.len();
    let mut g = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let v = gram_entry(&pairs, experts[i].bandwidth, experts[j].bandwidth);
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::trapezoid;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn kde(values: &[f64], h: f64) -> Kde {
        Kde::new(Sample::new(values.to_vec()).unwrap(), h).unwrap()
    }

    #[test]
    fn kernel_values() {
        assert_relative_eq!(kernel_eval(0.0), 0.3989423, epsilon = 1e-7);
        assert_relative_eq!(kernel_eval(1.0), 0.2419707, epsilon = 1e-7);
        assert_eq!(kernel_eval(-1.0), kernel_eval(1.0));
    }

    #[test]
    fn kernel_constants_match_quadrature() {
        let mass = trapezoid(kernel_eval, -10.0, 10.0, 20_001);
        assert!((mass - 1.0).abs() < 1e-8);
        let sq = trapezoid(|u| kernel_eval(u).powi(2), -10.0, 10.0, 20_001);
        assert!((sq - GaussianKernel::NORM_SQ).abs() < 1e-8);
        let closed = 1.0 / (2.0 * std::f64::consts::PI.sqrt());
        assert!((closed - GaussianKernel::NORM_SQ).abs() < 1e-16);
        let m2 = trapezoid(|u| u * u * kernel_eval(u), -12.0, 12.0, 24_001);
        assert!((m2 - GaussianKernel::SECOND_MOMENT).abs() < 1e-8);
    }

    #[test]
    fn derivatives_at_zero() {
        assert_relative_eq!(kernel_deriv(4, 0.0).unwrap(), 1.1968268, epsilon = 1e-7);
        assert_relative_eq!(kernel_deriv(6, 0.0).unwrap(), -5.9841342, epsilon = 1e-7);
        assert_eq!(kernel_deriv(5, 0.0), Err(Error::UnsupportedDerivative(5)));
        assert_eq!(kernel_deriv(2, 1.0), Err(Error::UnsupportedDerivative(2)));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        // fourth and sixth central differences of the kernel itself
        let step = 1e-2;
        for &u in &[-2.1, -0.4, 0.0, 0.9, 1.7, 3.2] {
            let f = |k: f64| kernel_eval(u + k * step);
            let d4 =
                (f(-2.0) - 4.0 * f(-1.0) + 6.0 * f(0.0) - 4.0 * f(1.0) + f(2.0)) / step.powi(4);
            assert!((d4 - kernel_deriv(4, u).unwrap()).abs() < 1e-3, "u={u}");
            let d6 = (f(-3.0) - 6.0 * f(-2.0) + 15.0 * f(-1.0) - 20.0 * f(0.0) + 15.0 * f(1.0)
                - 6.0 * f(2.0)
                + f(3.0))
                / step.powi(6);
            assert!((d6 - kernel_deriv(6, u).unwrap()).abs() < 5e-3, "u={u}");
        }
    }

    #[test]
    fn kde_point_values() {
        assert_relative_eq!(kde(&[0.0], 1.0).eval(0.0), 0.3989423, epsilon = 1e-7);
        assert_relative_eq!(kde(&[0.0, 1.0], 0.5).eval(0.5), 0.4839414, epsilon = 1e-7);
        let sym = kde(&[-1.0, 1.0], 0.7);
        for x in [0.3, 1.2] {
            assert_eq!(sym.eval(x), sym.eval(-x));
        }
    }

    #[test]
    fn rejects_bad_bandwidth() {
        let s = Sample::new(vec![0.0]).unwrap();
        assert!(matches!(
            Kde::new(s.clone(), 0.0),
            Err(Error::InvalidBandwidth(_))
        ));
        assert!(matches!(
            Kde::new(s.clone(), -1.0),
            Err(Error::InvalidBandwidth(_))
        ));
        assert!(matches!(
            Kde::new(s, f64::NAN),
            Err(Error::InvalidBandwidth(_))
        ));
    }

    #[test]
    fn batch_is_bitwise_pointwise() {
        let k = kde(&[0.1, -2.0, 3.3, 0.7, 0.71], 0.37);
        let xs: Vec<f64> = (0..200).map(|i| -5.0 + 0.05 * i as f64).collect();
        let batch = k.eval_many(&xs);
        for (x, b) in xs.iter().zip(&batch) {
            assert_eq!(b.to_bits(), k.eval(*x).to_bits());
        }
    }

    #[test]
    fn gram_closed_forms() {
        assert_relative_eq!(
            gram_inner(&kde(&[0.0], 1.0), &kde(&[0.0], 1.0)).unwrap(),
            0.2820948,
            epsilon = 1e-7
        );
        assert_relative_eq!(
            gram_inner(&kde(&[0.0], 0.6), &kde(&[0.0], 0.8)).unwrap(),
            0.3989423,
            epsilon = 1e-7
        );
    }

    #[test]
    fn gram_matches_trapezoid_oracle() {
        let f = kde(&[0.0, 2.0], 1.0);
        let quad = trapezoid(|x| f.eval(x).powi(2), -12.0, 14.0, (1 << 20) + 1);
        let exact = gram_inner(&f, &f).unwrap();
        assert!((exact - quad).abs() < 1e-8, "{exact} vs {quad}");
    }

    #[test]
    fn gram_mixed_bandwidths_match_quadrature() {
        let s = Sample::new(vec![-0.4, 0.3, 1.9, 2.2]).unwrap();
        let a = Kde::new(s.clone(), 0.3).unwrap();
        let b = Kde::new(s, 0.75).unwrap();
        let quad = trapezoid(|x| a.eval(x) * b.eval(x), -10.0, 12.0, 200_001);
        assert!((gram_inner(&a, &b).unwrap() - quad).abs() < 1e-10);
    }

    #[test]
    fn gram_requires_shared_sample() {
        assert_eq!(
            gram_inner(&kde(&[0.0], 1.0), &kde(&[1.0], 1.0)),
            Err(Error::SampleMismatch)
        );
    }

    #[test]
    fn gram_matrix_is_symmetric_psd() {
        let s = Sample::new(vec![-1.0, -0.2, 0.4, 0.5, 2.0, 3.1]).unwrap();
        let experts: Vec<Kde> = [0.2, 0.45, 0.9]
            .iter()
            .map(|&h| Kde::new(s.clone(), h).unwrap())
            .collect();
        let g = gram_matrix(&experts).unwrap();
        let m = nalgebra::DMatrix::from_fn(3, 3, |i, j| g[i][j]);
        assert_eq!(m, m.transpose());
        let eig = m.symmetric_eigenvalues();
        assert!(eig.iter().all(|&e| e > -1e-15), "{eig}");
    }

    proptest! {
        #[test]
        fn kde_integrates_to_one(
            xs in prop::collection::vec(-5.0f64..5.0, 1..12),
            h in 0.05f64..2.0,
        ) {
            let k = kde(&xs, h);
            let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min) - 12.0 * h;
            let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 12.0 * h;
            let points = (((hi - lo) / h) * 20.0) as usize + 1;
            let mass = trapezoid(|x| k.eval(x), lo, hi, points.max(2001));
            prop_assert!((mass - 1.0).abs() < 1e-6);
        }

        #[test]
        fn kde_is_nonnegative(
            xs in prop::collection::vec(-5.0f64..5.0, 1..12),
            h in 0.01f64..2.0,
            x in -40.0f64..40.0,
        ) {
            prop_assert!(kde(&xs, h).eval(x) >= 0.0);
        }

        #[test]
        fn kde_scale_equivariance(
            xs in prop::collection::vec(-5.0f64..5.0, 1..12),
            h in 0.05f64..2.0,
            c in 0.1f64..10.0,
            x in -6.0f64..6.0,
        ) {
            let base = kde(&xs, h).eval(x);
            let scaled: Vec<f64> = xs.iter().map(|v| c * v).collect();
            let other = kde(&scaled, c * h).eval(c * x);
            prop_assume!(base > 1e-100);
            prop_assert!(((other * c - base) / base).abs() < 1e-12);
        }

        #[test]
        fn gram_is_symmetric(
            xs in prop::collection::vec(-5.0f64..5.0, 1..10),
            h1 in 0.05f64..2.0,
            h2 in 0.05f64..2.0,
        ) {
            let s = Sample::new(xs).unwrap();
            let a = Kde::new(s.clone(), h1).unwrap();
            let b = Kde::new(s, h2).unwrap();
            prop_assert_eq!(gram_inner(&a, &b).unwrap(), gram_inner(&b, &a).unwrap());
        }
    }
}
