//! Small dense symmetric solves via eigendecomposition, with a spectral
//! condition estimate.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Matrices whose spectral condition number exceeds this are rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

pub fn is_symmetric(m: &DMatrix<f64>) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    (0..m.nrows()).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= 1e-12 * scale))
}

pub(crate) fn require_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    if !is_symmetric(m) {
        return Err(Error::InvalidArgument(format!(
            "expected a symmetric matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// `m = Q Λ Qᵀ`, kept for repeated solves.
#[derive(Debug, Clone)]
pub struct SymmetricFactor {
    eigen: SymmetricEigen<f64, nalgebra::Dyn>,
    condition: f64,
}

impl SymmetricFactor {
    pub fn new(m: &DMatrix<f64>) -> Self {
        let eigen = m.clone().symmetric_eigen();
        let (min, max) = eigen
            .eigenvalues
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| {
                (lo.min(e.abs()), hi.max(e.abs()))
            });
        let condition = if min > 0.0 { max / min } else { f64::INFINITY };
        Self { eigen, condition }
    }

    /// `max |λ| / min |λ|`; infinite for singular input.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn check(&self) -> Result<()> {
        if self.condition.is_finite() && self.condition <= CONDITION_LIMIT {
            Ok(())
        } else {
            Err(Error::IllConditioned {
                condition: self.condition,
            })
        }
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let q = &self.eigen.eigenvectors;
        let mut y = q.tr_mul(rhs);
        for (yi, &e) in y.iter_mut().zip(self.eigen.eigenvalues.iter()) {
            *yi /= e;
        }
        q * y
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen.eigenvalues.min()
    }
}

/// Spectral condition number of a symmetric matrix.
pub fn condition_estimate(m: &DMatrix<f64>) -> f64 {
    SymmetricFactor::new(m).condition()
}
