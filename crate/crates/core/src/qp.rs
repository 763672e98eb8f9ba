//! Quadratic minimisation over the affine hyperplane `Σλ = 1` and over the
//! probability simplex, for the handful of experts an average combines.
//!
//! The simplex problem `min λᵀQλ - cᵀλ` is solved exactly by enumerating
//! supports: on each nonempty support the equality-constrained minimiser has
//! a closed form, and the optimum is the best feasible candidate that also
//! satisfies the KKT conditions off its support.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::SymmetricFactor;

/// Support enumeration visits `2^k - 1` subsets; keep `k` small.
pub const MAX_ENUMERATED: usize = 8;

/// Objective values closer than this are considered tied.
const TIE_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub weights: Vec<f64>,
    pub objective: f64,
    /// Indices with free (nonzero) weights.
    pub support: Vec<usize>,
}

pub fn objective(q: &DMatrix<f64>, c: &DVector<f64>, w: &[f64]) -> f64 {
    let w = DVector::from_column_slice(w);
    w.dot(&(q * &w)) - c.dot(&w)
}

/// Closed-form minimiser of `λᵀQλ - cᵀλ` subject to `Σλ = 1`.
///
/// With `u = Q⁻¹1`, `v = Q⁻¹c` the Lagrange conditions give
/// `λ = (v + νu) / 2` with `ν = (2 - 1ᵀv) / 1ᵀu`.
fn affine_minimizer(q: &DMatrix<f64>, c: &DVector<f64>) -> Option<(DVector<f64>, f64)> {
    let k = q.nrows();
    let factor = SymmetricFactor::new(q);
    factor.check().ok()?;
    let u = factor.solve(&DVector::from_element(k, 1.0));
    let v = factor.solve(c);
    let denom = u.sum();
    if !denom.is_finite() || denom == 0.0 {
        return None;
    }
    let nu = (2.0 - v.sum()) / denom;
    let mut w = (v + u * nu) * 0.5;
    // exact renormalisation onto the constraint
    let s = w.sum();
    w /= s;
    Some((w, nu))
}

/// Minimiser over `Σλ = 1` with all indices free.
pub fn minimize_affine(q: &DMatrix<f64>, c: &DVector<f64>) -> Result<QpSolution> {
    let k = q.nrows();
    let factor = SymmetricFactor::new(q);
    factor.check()?;
    let (w, _) = affine_minimizer(q, c).ok_or(Error::IllConditioned {
        condition: factor.condition(),
    })?;
    let weights: Vec<f64> = w.iter().copied().collect();
    Ok(QpSolution {
        objective: objective(q, c, &weights),
        weights,
        support: (0..k).collect(),
    })
}

struct Candidate {
    weights: Vec<f64>,
    objective: f64,
    support: Vec<usize>,
    kkt: bool,
}

/// Whether `a` should replace the incumbent `b`: lower objective, or a tie
/// broken towards the larger support and then the lexicographically
/// smaller one.
fn preferred(a: &Candidate, b: &Candidate) -> bool {
    if a.objective < b.objective - TIE_TOLERANCE {
        return true;
    }
    if (a.objective - b.objective).abs() <= TIE_TOLERANCE {
        if a.support.len() != b.support.len() {
            return a.support.len() > b.support.len();
        }
        return a.support < b.support;
    }
    false
}

/// Exact minimiser of `λᵀQλ - cᵀλ` over the probability simplex.
pub fn minimize_simplex(q: &DMatrix<f64>, c: &DVector<f64>) -> Result<QpSolution> {
    let k = q.nrows();
    if k > MAX_ENUMERATED {
        return Err(Error::TooManyExperts {
            got: k,
            max: MAX_ENUMERATED,
        });
    }
    if k == 0 {
        return Err(Error::InvalidArgument("no experts to combine".into()));
    }
    let mut candidates = Vec::new();
    for mask in 1u32..(1 << k) {
        let support: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).collect();
        let (local, nu) = if support.len() == 1 {
            let i = support[0];
            (DVector::from_element(1, 1.0), 2.0 * q[(i, i)] - c[i])
        } else {
            let sub = q.select_rows(&support).select_columns(&support);
            let sub_c = DVector::from_iterator(support.len(), support.iter().map(|&i| c[i]));
            match affine_minimizer(&sub, &sub_c) {
                Some(found) => found,
                None => continue,
            }
        };
        if local.iter().any(|&w| w < -1e-12) {
            continue;
        }
        let mut weights = vec![0.0; k];
        for (&i, &w) in support.iter().zip(local.iter()) {
            weights[i] = w.max(0.0);
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);

        // gradient 2Qλ - c must be at least ν off the support
        let wv = DVector::from_column_slice(&weights);
        let grad = q * &wv * 2.0 - c;
        let scale = grad.amax().max(nu.abs()).max(f64::MIN_POSITIVE);
        let kkt = (0..k)
            .filter(|i| !support.contains(i))
            .all(|i| grad[i] >= nu - 1e-9 * scale);
        candidates.push(Candidate {
            objective: objective(q, c, &weights),
            weights,
            support,
            kkt,
        });
    }
    let pick = |pool: &mut dyn Iterator<Item = &Candidate>| -> Option<QpSolution> {
        let mut best: Option<&Candidate> = None;
        for cand in pool {
            if best.is_none_or(|b| preferred(cand, b)) {
                best = Some(cand);
            }
        }
        best.map(|b| QpSolution {
            weights: b.weights.clone(),
            objective: b.objective,
            support: b.support.clone(),
        })
    };
    pick(&mut candidates.iter().filter(|c| c.kkt))
        .or_else(|| pick(&mut candidates.iter()))
        .ok_or_else(|| Error::InvalidArgument("no feasible support found".into()))
}
