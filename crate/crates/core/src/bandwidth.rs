//! Data-driven bandwidth selectors: the normal-reference rules with
//! constants 0.9 (`nrd0`) and 1.06 (`nrd`), and the Sheather–Jones
//! solve-the-equation plug-in (`sj`).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{phi4_sq, phi6_sq, GaussianKernel};
use crate::numeric::{brent_root, PairSquares};
use crate::sample::{Sample, ScaleEstimate};

/// Largest number of experts accepted in a [`BandwidthSet`].
pub const MAX_EXPERTS: usize = 8;

pub const NRD0_CONSTANT: f64 = 0.9;
pub const NRD_CONSTANT: f64 = 1.06;

/// Relative width at which the solve-the-equation root search stops.
pub const SJ_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Selector {
    Nrd0,
    Nrd,
    Sj,
}

impl Selector {
    pub const ALL: [Selector; 3] = [Selector::Nrd0, Selector::Nrd, Selector::Sj];

    pub fn name(self) -> &'static str {
        match self {
            Selector::Nrd0 => "nrd0",
            Selector::Nrd => "nrd",
            Selector::Sj => "sj",
        }
    }

    pub fn select(self, sample: &Sample) -> Result<f64> {
        match self {
            Selector::Nrd0 => bw_silverman(sample, NRD0_CONSTANT),
            Selector::Nrd => bw_silverman(sample, NRD_CONSTANT),
            Selector::Sj => bw_sheather_jones(sample),
        }
    }
}

impl Serialize for Selector {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nrd0" => Ok(Selector::Nrd0),
            "nrd" => Ok(Selector::Nrd),
            "sj" => Ok(Selector::Sj),
            _ => Err(Error::UnknownName {
                kind: "bandwidth selector",
                name: s.to_string(),
                expected: "nrd0, nrd, sj".to_string(),
            }),
        }
    }
}

/// Labelled positive bandwidths, one per expert.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandwidthSet {
    entries: Vec<(String, f64)>,
}

impl BandwidthSet {
    pub fn new(entries: Vec<(String, f64)>) -> Result<Self> {
        if entries.len() > MAX_EXPERTS {
            return Err(Error::TooManyExperts {
                got: entries.len(),
                max: MAX_EXPERTS,
            });
        }
        for (i, (label, h)) in entries.iter().enumerate() {
            if !(*h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidBandwidth(*h));
            }
            if entries[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { entries })
    }

    /// Unlabelled bandwidths, named `h1`, `h2`, ...
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .enumerate()
                .map(|(i, &h)| (format!("h{}", i + 1), h))
                .collect(),
        )
    }

    /// Runs each selector on `sample`.
    pub fn select(sample: &Sample, selectors: &[Selector]) -> Result<Self> {
        let entries = selectors
            .iter()
            .map(|s| Ok((s.name().to_string(), s.select(sample)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|(_, h)| *h).collect()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(l, h)| (l.as_str(), *h))
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().map(|(_, h)| *h).fold(0.0, f64::max)
    }
}

/// Normal-reference rule `constant * min(sd, iqr / 1.34) * n^(-1/5)`.
pub fn bw_silverman(sample: &Sample, constant: f64) -> Result<f64> {
    sample.require(2)?;
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "rule-of-thumb constant must be positive, got {constant}"
        )));
    }
    let scale = ScaleEstimate::of(sample).nonzero_scale(sample[0]);
    Ok(constant * scale * (sample.len() as f64).powf(-0.2))
}

/// The solve-the-equation bandwidth equation for one sample.
///
/// Pilot functionals use normal-reference pilot bandwidths
/// `a = 0.920 λ n^(-1/7)` and `b = 0.912 λ n^(-1/9)`; every double sum
/// includes the diagonal.
#[derive(Debug)]
pub struct SheatherJones<'a> {
    pairs: PairSquares<'a>,
    n: f64,
    /// `1.357 (SD(a) / TD(b))^(1/7)`; multiplies `h^(5/7)`.
    alpha_factor: f64,
    /// Silverman 0.9 value anchoring the root bracket.
    reference: f64,
}

impl<'a> SheatherJones<'a> {
    pub fn new(sample: &'a Sample) -> Result<Self> {
        sample.require(4)?;
        if sample.is_constant() {
            return Err(Error::ConstantSample);
        }
        let n = sample.len() as f64;
        // pilot constants are calibrated for an interquartile-range scale
        let lambda = 1.34 * ScaleEstimate::of(sample).nonzero_scale(sample[0]);
        let pairs = PairSquares::new(sample.values());
        let a = 0.920 * lambda * n.powf(-1.0 / 7.0);
        let b = 0.912 * lambda * n.powf(-1.0 / 9.0);
        let sd_a = psi4(&pairs, a);
        let td_b = -psi6(&pairs, b);
        if !(sd_a > 0.0) {
            return Err(Error::NonPositiveFunctional {
                value: sd_a,
                pilot: a,
            });
        }
        if !(td_b > 0.0) {
            return Err(Error::NonPositiveFunctional {
                value: td_b,
                pilot: b,
            });
        }
        let alpha_factor = 1.357 * (sd_a / td_b).powf(1.0 / 7.0);
        let reference = bw_silverman(sample, NRD0_CONSTANT)?;
        Ok(Self {
            pairs,
            n,
            alpha_factor,
            reference,
        })
    }

    /// Right-hand side `[‖K‖² / (n c_K² SD(α₂(h)))]^(1/5)`.
    pub fn rhs(&self, h: f64) -> Result<f64> {
        let alpha = self.alpha_factor * h.powf(5.0 / 7.0);
        let sd = psi4(&self.pairs, alpha);
        if !(sd > 0.0) {
            return Err(Error::NonPositiveFunctional {
                value: sd,
                pilot: alpha,
            });
        }
        let ck = GaussianKernel::SECOND_MOMENT;
        Ok((GaussianKernel::NORM_SQ / (self.n * ck * ck * sd)).powf(0.2))
    }

    /// Search interval `[0.1, 10] ×` the 0.9-rule bandwidth.
    pub fn bracket(&self) -> (f64, f64) {
        (0.1 * self.reference, 10.0 * self.reference)
    }

    pub fn solve(&self) -> Result<f64> {
        let (lo, hi) = self.bracket();
        let g = |h: f64| self.rhs(h).map(|r| r - h);
        let g_lo = g(lo)?;
        let g_hi = g(hi)?;
        if g_lo.signum() == g_hi.signum() && g_lo != 0.0 && g_hi != 0.0 {
            return Err(Error::NoBracket { lo, hi });
        }
        brent_root(g, lo, hi, g_lo, g_hi, SJ_REL_TOL)
    }
}

/// `n^-2 a^-5 sum_i sum_j φ⁽⁴⁾((X_i - X_j) / a)`.
fn psi4(pairs: &PairSquares<'_>, a: f64) -> f64 {
    let n = pairs.n() as f64;
    let inv_a2 = 1.0 / (a * a);
    pairs.full_sum(|d2| phi4_sq(d2 * inv_a2)) / (n * n * a.powi(5))
}

/// `n^-2 b^-7 sum_i sum_j φ⁽⁶⁾((X_i - X_j) / b)` (negative for smooth data).
fn psi6(pairs: &PairSquares<'_>, b: f64) -> f64 {
    let n = pairs.n() as f64;
    let inv_b2 = 1.0 / (b * b);
    pairs.full_sum(|d2| phi6_sq(d2 * inv_b2)) / (n * n * b.powi(7))
}

/// Sheather–Jones solve-the-equation bandwidth.
pub fn bw_sheather_jones(sample: &Sample) -> Result<f64> {
    SheatherJones::new(sample)?.solve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn normal_sample(n: usize, seed: u64) -> Sample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Sample::new((0..n).map(|_| StandardNormal.sample(&mut rng)).collect()).unwrap()
    }

    fn one_to_ten() -> Sample {
        Sample::new((1..=10).map(f64::from).collect()).unwrap()
    }

    // sd = 3.0276503540974917, IQR = 4.5 → scale = sd; values from
    // c * sd * 10^(-1/5) evaluated independently.
    #[test]
    fn silverman_one_to_ten() {
        let h0 = bw_silverman(&one_to_ten(), 0.9).unwrap();
        let h1 = bw_silverman(&one_to_ten(), 1.06).unwrap();
        assert!((h0 - 1.719286404692283).abs() < 1e-12, "{h0}");
        assert!((h1 - 2.0249373210820227).abs() < 1e-12, "{h1}");
    }

    #[test]
    fn silverman_errors() {
        let single = Sample::new(vec![1.0]).unwrap();
        assert!(matches!(
            bw_silverman(&single, 0.9),
            Err(Error::SampleTooSmall { needed: 2, got: 1 })
        ));
        assert!(matches!(
            bw_silverman(&one_to_ten(), 0.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn silverman_zero_scale_fallbacks() {
        // iqr = 0 but sd > 0
        let s = Sample::new(vec![1.0, 1.0, 1.0, 1.0, 1.0, 9.0]).unwrap();
        let expected = 0.9 * s.sd() * 6f64.powf(-0.2);
        assert!((bw_silverman(&s, 0.9).unwrap() - expected).abs() < 1e-15);
        // constant sample: |x1|
        let s = Sample::new(vec![-4.0, -4.0]).unwrap();
        assert_eq!(bw_silverman(&s, 1.0).unwrap(), 4.0 * 2f64.powf(-0.2));
        let s = Sample::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(bw_silverman(&s, 1.0).unwrap(), 2f64.powf(-0.2));
    }

    #[test]
    fn selector_names_round_trip() {
        for s in Selector::ALL {
            assert_eq!(s.name().parse::<Selector>().unwrap(), s);
        }
        assert_eq!("SJ".parse::<Selector>().unwrap(), Selector::Sj);
        assert!(matches!(
            "ucv".parse::<Selector>(),
            Err(Error::UnknownName { .. })
        ));
    }

    #[test]
    fn bandwidth_set_guards() {
        assert!(matches!(
            BandwidthSet::from_values(&[0.1, -0.2]),
            Err(Error::InvalidBandwidth(_))
        ));
        assert!(matches!(
            BandwidthSet::new(vec![("a".into(), 0.1), ("a".into(), 0.2)]),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(matches!(
            BandwidthSet::from_values(&[0.1; 9]),
            Err(Error::TooManyExperts { got: 9, max: 8 })
        ));
        let set = BandwidthSet::from_values(&[0.3, 0.6]).unwrap();
        assert_eq!(set.labels().collect::<Vec<_>>(), vec!["h1", "h2"]);
        assert_eq!(set.max(), 0.6);
    }

    #[test]
    fn sj_satisfies_its_fixed_point() {
        let s = normal_sample(300, 11);
        let eq = SheatherJones::new(&s).unwrap();
        let h = eq.solve().unwrap();
        let r = eq.rhs(h).unwrap();
        assert!(((h - r) / h).abs() <= 1e-8);
    }

    #[test]
    fn sj_rejects_degenerate_input() {
        let s = Sample::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            bw_sheather_jones(&s),
            Err(Error::SampleTooSmall { needed: 4, .. })
        ));
        let s = Sample::new(vec![2.0; 6]).unwrap();
        assert_eq!(bw_sheather_jones(&s), Err(Error::ConstantSample));
    }

    #[test]
    fn sj_close_to_normal_reference_on_normal_data() {
        // for normal data the plug-in and the rule-of-thumb target the same
        // optimum; on a large sample they agree to within ~15%
        let s = normal_sample(2000, 5);
        let sj = bw_sheather_jones(&s).unwrap();
        let nrd = bw_silverman(&s, 1.06).unwrap();
        assert!((sj / nrd - 1.0).abs() < 0.15, "sj={sj} nrd={nrd}");
    }

    #[test]
    fn translation_invariance_is_exact_on_dyadic_data() {
        // values on a 1/64 grid, shifted by a power of two: every difference
        // and deviation is exactly representable
        let base: Vec<f64> = [3, -17, 40, 8, 0, 25, -9, 12, 33, -2, 5, 19]
            .iter()
            .map(|&k| f64::from(k) / 64.0)
            .collect();
        let shifted: Vec<f64> = base.iter().map(|v| v + 16.0).collect();
        let a = Sample::new(base).unwrap();
        let b = Sample::new(shifted).unwrap();
        for sel in Selector::ALL {
            assert_eq!(sel.select(&a).unwrap(), sel.select(&b).unwrap(), "{sel}");
        }
    }

    #[test]
    fn nrd0_below_nrd() {
        for seed in 0..20 {
            let s = normal_sample(50, seed);
            assert!(Selector::Nrd0.select(&s).unwrap() < Selector::Nrd.select(&s).unwrap());
        }
    }
}
