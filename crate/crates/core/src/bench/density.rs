//! The five benchmark densities and their samplers.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::Serialize;

use super::rng::{rng_from_seed, BenchRng};
use crate::error::{Error, Result};
use crate::kernel::kernel_eval;
use crate::sample::Sample;

/// A density with what the benchmark needs from it.
pub type RealFn = fn(f64) -> f64;

#[derive(Debug, Clone, Copy)]
pub struct DensitySpec {
    pub name: &'static str,
    pub pdf: RealFn,
    pub second_deriv: Option<RealFn>,
    /// Region where ISE is integrated (before bandwidth padding).
    pub integration_window: (f64, f64),
    /// Region where `∫ f''²` is integrated.
    pub curvature_window: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Density {
    Norm,
    Gamma,
    Cauchy,
    Mix05,
    Mix03,
}

fn normal_pdf_at(x: f64, mean: f64) -> f64 {
    kernel_eval(x - mean)
}

fn normal_d2_at(x: f64, mean: f64) -> f64 {
    let u = x - mean;
    (u * u - 1.0) * kernel_eval(u)
}

fn norm_pdf(x: f64) -> f64 {
    kernel_eval(x)
}

fn norm_d2(x: f64) -> f64 {
    (x * x - 1.0) * kernel_eval(x)
}

fn gamma_pdf(x: f64) -> f64 {
    if x >= 0.0 {
        x * (-x).exp()
    } else {
        0.0
    }
}

fn gamma_d2(x: f64) -> f64 {
    if x >= 0.0 {
        (x - 2.0) * (-x).exp()
    } else {
        0.0
    }
}

fn cauchy_pdf(x: f64) -> f64 {
    1.0 / (PI * (1.0 + x * x))
}

fn cauchy_d2(x: f64) -> f64 {
    let q = 1.0 + x * x;
    (6.0 * x * x - 2.0) / (PI * q * q * q)
}

fn mix05_pdf(x: f64) -> f64 {
    0.5 * normal_pdf_at(x, -1.5) + 0.5 * normal_pdf_at(x, 1.5)
}

fn mix05_d2(x: f64) -> f64 {
    0.5 * normal_d2_at(x, -1.5) + 0.5 * normal_d2_at(x, 1.5)
}

fn mix03_pdf(x: f64) -> f64 {
    0.7 * normal_pdf_at(x, -1.5) + 0.3 * normal_pdf_at(x, 1.5)
}

fn mix03_d2(x: f64) -> f64 {
    0.7 * normal_d2_at(x, -1.5) + 0.3 * normal_d2_at(x, 1.5)
}

impl Density {
    pub const ALL: [Density; 5] = [
        Density::Norm,
        Density::Gamma,
        Density::Cauchy,
        Density::Mix05,
        Density::Mix03,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Density::Norm => "Norm",
            Density::Gamma => "Gamma",
            Density::Cauchy => "Cauchy",
            Density::Mix05 => "Mix05",
            Density::Mix03 => "Mix03",
        }
    }

    pub fn spec(self) -> DensitySpec {
        let (pdf, d2, window, curvature_window): (RealFn, RealFn, _, _) = match self {
            Density::Norm => (norm_pdf, norm_d2, (-8.0, 8.0), (-12.0, 12.0)),
            Density::Gamma => (gamma_pdf, gamma_d2, (-2.0, 25.0), (0.0, 60.0)),
            Density::Cauchy => (cauchy_pdf, cauchy_d2, (-250.0, 250.0), (-250.0, 250.0)),
            Density::Mix05 => (mix05_pdf, mix05_d2, (-10.0, 10.0), (-14.0, 14.0)),
            Density::Mix03 => (mix03_pdf, mix03_d2, (-10.0, 10.0), (-14.0, 14.0)),
        };
        DensitySpec {
            name: self.name(),
            pdf,
            second_deriv: Some(d2),
            integration_window: window,
            curvature_window,
        }
    }

    /// One draw.
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Density::Norm => StandardNormal.sample(rng),
            Density::Gamma => {
                let e1: f64 = Exp1.sample(rng);
                let e2: f64 = Exp1.sample(rng);
                e1 + e2
            }
            Density::Cauchy => {
                let u: f64 = rng.random();
                (PI * (u - 0.5)).tan()
            }
            Density::Mix05 | Density::Mix03 => {
                let p_left = if self == Density::Mix05 { 0.5 } else { 0.7 };
                let left = rng.random::<f64>() < p_left;
                let z: f64 = StandardNormal.sample(rng);
                if left {
                    z - 1.5
                } else {
                    z + 1.5
                }
            }
        }
    }

    pub fn sample_with<R: Rng + ?Sized>(self, n: usize, rng: &mut R) -> Result<Sample> {
        if n == 0 {
            return Err(Error::SampleTooSmall { needed: 1, got: 0 });
        }
        Sample::new((0..n).map(|_| self.draw(rng)).collect())
    }
}

/// `n` iid draws from `density`, deterministic in `seed`.
pub fn sample_density(density: Density, n: usize, seed: u64) -> Result<Sample> {
    let mut rng: BenchRng = rng_from_seed(seed);
    density.sample_with(n, &mut rng)
}

impl Serialize for Density {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Density {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Density::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName {
                kind: "density",
                name: s.to_string(),
                expected: Density::ALL.map(Density::name).join(", "),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{romberg, trapezoid};

    #[test]
    fn windows_hold_the_mass() {
        for d in Density::ALL {
            let spec = d.spec();
            let (lo, hi) = spec.integration_window;
            let mass = trapezoid(spec.pdf, lo, hi, 400_001);
            // Cauchy tails beyond ±250 carry 2/(250π) of the mass
            let floor = if d == Density::Cauchy {
                1.0 - 2.0 / (250.0 * PI) - 1e-6
            } else {
                1.0 - 1e-4
            };
            assert!(mass >= floor, "{d}: {mass}");
            assert!(mass <= 1.0 + 1e-6, "{d}: {mass}");
        }
    }

    #[test]
    fn second_derivatives_match_finite_differences() {
        let step = 1e-4;
        for d in Density::ALL {
            let spec = d.spec();
            let f2 = spec.second_deriv.unwrap();
            for &x in &[-2.3, -0.7, 0.4, 1.1, 2.9] {
                if d == Density::Gamma && x < 0.1 {
                    continue;
                }
                let fd = ((spec.pdf)(x + step) - 2.0 * (spec.pdf)(x) + (spec.pdf)(x - step))
                    / (step * step);
                assert!((fd - f2(x)).abs() < 1e-6, "{d} at {x}: {fd} vs {}", f2(x));
            }
        }
    }

    #[test]
    fn normal_moments() {
        let s = sample_density(Density::Norm, 100_000, 2024).unwrap();
        assert!(s.mean().abs() < 0.02);
        assert!((s.sd() - 1.0).abs() < 0.02);
    }

    #[test]
    fn gamma_moments() {
        let s = sample_density(Density::Gamma, 100_000, 7).unwrap();
        assert!(s.iter().all(|&x| x > 0.0));
        assert!((s.mean() - 2.0).abs() < 0.03);
        assert!((s.sd() - 2f64.sqrt()).abs() < 0.03);
    }

    #[test]
    fn cauchy_quartiles() {
        let s = sample_density(Density::Cauchy, 100_000, 8).unwrap();
        let sorted = s.sorted();
        let q1 = crate::sample::quantile_sorted(&sorted, 0.25);
        let q3 = crate::sample::quantile_sorted(&sorted, 0.75);
        assert!((q1 + 1.0).abs() < 0.03 && (q3 - 1.0).abs() < 0.03);
    }

    #[test]
    fn mixture_left_mass() {
        // P(X < 0) for 0.7 N(-1.5,1) + 0.3 N(1.5,1), by quadrature of the pdf
        let spec = Density::Mix03.spec();
        let (p_below, _) = romberg(spec.pdf, -14.0, 0.0, 1e-13);
        assert!((p_below - 0.6732771194924567).abs() < 1e-10);
        let s = sample_density(Density::Mix03, 100_000, 3).unwrap();
        let frac = s.iter().filter(|&&x| x < 0.0).count() as f64 / 1e5;
        assert!((frac - p_below).abs() < 0.01, "{frac}");
        let s = sample_density(Density::Mix05, 100_000, 3).unwrap();
        let frac = s.iter().filter(|&&x| x < 0.0).count() as f64 / 1e5;
        assert!((frac - 0.5).abs() < 0.01, "{frac}");
    }

    #[test]
    fn sampling_is_deterministic() {
        for d in Density::ALL {
            let a = sample_density(d, 257, 99).unwrap();
            let b = sample_density(d, 257, 99).unwrap();
            let bits = |s: &Sample| s.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(&a), bits(&b));
            let c = sample_density(d, 257, 100).unwrap();
            assert_ne!(bits(&a), bits(&c));
        }
    }

    #[test]
    fn names_parse() {
        for d in Density::ALL {
            assert_eq!(d.name().parse::<Density>().unwrap(), d);
        }
        assert_eq!("mix03".parse::<Density>().unwrap(), Density::Mix03);
        let err = "Beta".parse::<Density>().unwrap_err();
        assert!(err
            .to_string()
            .contains("Norm, Gamma, Cauchy, Mix05, Mix03"));
        assert!(sample_density(Density::Norm, 0, 1).is_err());
    }
}
