//! Observation containers and the scale statistics shared by the
//! bandwidth selectors and the curvature pilot.

use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;

/// A finite, non-empty collection of real observations.
///
/// Values are kept in the order they were supplied. Cloning is cheap: the
/// storage is shared, which lets several kernel estimators refer to the same
/// data.
#[derive(Debug, Clone)]
pub struct Sample {
    values: Arc<[f64]>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::SampleTooSmall { needed: 1, got: 0 });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            values: values.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// True when both handles refer to the same observations.
    pub fn same_as(&self, other: &Sample) -> bool {
        Arc::ptr_eq(&self.values, &other.values) || self.values[..] == other.values[..]
    }

    pub fn require(&self, needed: usize) -> Result<()> {
        if self.len() < needed {
            return Err(Error::SampleTooSmall {
                needed,
                got: self.len(),
            });
        }
        Ok(())
    }

    pub fn is_constant(&self) -> bool {
        let first = self.values[0];
        self.values.iter().all(|&v| v == first)
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.to_vec();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn mean(&self) -> f64 {
        let mut acc = NeumaierSum::default();
        for &v in self.values.iter() {
            acc.add(v);
        }
        acc.value() / self.len() as f64
    }

    /// Standard deviation with the `n - 1` divisor. Zero for `n < 2`.
    pub fn sd(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let mut acc = NeumaierSum::default();
        for &v in self.values.iter() {
            let d = v - mean;
            acc.add(d * d);
        }
        (acc.value() / (n - 1) as f64).sqrt()
    }

    /// Subset of the observations at the given indices.
    pub fn select(&self, indices: &[usize]) -> Result<Sample> {
        Sample::new(indices.iter().map(|&i| self.values[i]).collect())
    }
}

impl Deref for Sample {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Sample::new(values)
    }
}

/// Quantile of already sorted data, linearly interpolated with quantile `p`
/// located at 1-based position `1 + (n - 1) p`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&p));
    let pos = (sorted.len() - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo + 1 >= sorted.len() || frac == 0.0 {
        return sorted[lo];
    }
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Spread summary used by the normal-reference rules.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ScaleEstimate {
    pub sd: f64,
    pub iqr: f64,
    /// `min(sd, iqr / 1.34)`.
    pub robust_scale: f64,
}

impl ScaleEstimate {
    pub fn of(sample: &Sample) -> Self {
        let sorted = sample.sorted();
        let sd = sample.sd();
        let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
        Self {
            sd,
            iqr,
            robust_scale: sd.min(iqr / 1.34),
        }
    }

    /// Robust scale with the zero-scale fallback chain: the robust scale,
    /// else the standard deviation, else `|x_1|`, else 1.
    pub fn nonzero_scale(&self, first: f64) -> f64 {
        [self.robust_scale, self.sd, first.abs()]
            .into_iter()
            .find(|&s| s > 0.0)
            .unwrap_or(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(matches!(
            Sample::new(vec![]),
            Err(Error::SampleTooSmall { .. })
        ));
        assert_eq!(
            Sample::new(vec![1.0, f64::NAN]).unwrap_err(),
            Error::NonFinite { index: 1 }
        );
    }

    #[test]
    fn quartiles_of_one_to_ten() {
        let sorted: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(quantile_sorted(&sorted, 0.25), 3.25);
        assert_eq!(quantile_sorted(&sorted, 0.75), 7.75);
        assert_eq!(quantile_sorted(&sorted, 0.0), 1.0);
        assert_eq!(quantile_sorted(&sorted, 1.0), 10.0);
    }

    #[test]
    fn scale_of_one_to_ten() {
        let s = Sample::new((1..=10).map(f64::from).collect()).unwrap();
        let scale = ScaleEstimate::of(&s);
        assert!((scale.sd - 3.0276503540974917).abs() < 1e-14);
        assert_eq!(scale.iqr, 4.5);
        assert_eq!(scale.robust_scale, scale.sd);
    }

    #[test]
    fn fallback_chain() {
        let zero_iqr = ScaleEstimate {
            sd: 2.0,
            iqr: 0.0,
            robust_scale: 0.0,
        };
        assert_eq!(zero_iqr.nonzero_scale(5.0), 2.0);
        let flat = ScaleEstimate {
            sd: 0.0,
            iqr: 0.0,
            robust_scale: 0.0,
        };
        assert_eq!(flat.nonzero_scale(-3.0), 3.0);
        assert_eq!(flat.nonzero_scale(0.0), 1.0);
    }
}
