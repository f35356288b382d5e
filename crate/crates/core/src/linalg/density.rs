use alloc::vec::Vec;

use super::eig::hermitian_eigenvalues;
use super::matrix::{tensor_product, ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::tol;

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

/// Measured deviations from the density-operator invariants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityReport {
    pub hermitian_deviation: f64,
    pub min_eigenvalue: f64,
    pub trace_deviation: f64,
}

impl DensityReport {
    pub fn is_valid(&self) -> bool {
        self.hermitian_deviation <= tol::HERMITIAN
            && self.min_eigenvalue >= tol::PSD_FLOOR
            && self.trace_deviation <= tol::TRACE
    }
}

impl DensityOperator {
    /// Validates and wraps `matrix`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let r = report(&matrix)?;
        if r.hermitian_deviation > tol::HERMITIAN {
            return Err(Error::NotHermitian(r.hermitian_deviation));
        }
        if r.trace_deviation > tol::TRACE {
            return Err(Error::BadTrace(r.trace_deviation));
        }
        if r.min_eigenvalue < tol::PSD_FLOOR {
            return Err(Error::NotPositive(r.min_eigenvalue));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    /// Skips validation; for operators that are valid by construction.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::diagonal(probs))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new_unchecked(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    /// `|ψ⟩⟨ψ|` for a normalized copy of `psi`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let n = super::matrix::norm(psi);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / n).collect();
        Ok(Self::new_unchecked(ComplexMatrix::outer(&v, &v)))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self::new_unchecked(tensor_product(&self.matrix, &other.matrix)?))
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if is_diagonal(&self.matrix) {
            let mut d: Vec<f64> = self.matrix.diag().iter().map(|z| z.re).collect();
            d.sort_by(|a, b| b.total_cmp(a));
            return Ok(d);
        }
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn is_diagonal(&self) -> bool {
        is_diagonal(&self.matrix)
    }

    /// `tr(ρ a)`.
    pub fn expectation(&self, a: &ComplexMatrix) -> Result<C64> {
        self.matrix.trace_product(a)
    }

    pub fn report(&self) -> Result<DensityReport> {
        report(&self.matrix)
    }
}

/// Invariant deviations of an arbitrary square matrix.
pub fn report(m: &ComplexMatrix) -> Result<DensityReport> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let hermitian_deviation = m.hermitian_deviation();
    let trace_deviation = (m.trace() - C64::new(1.0, 0.0)).norm();
    let min_eigenvalue = if is_diagonal(m) {
        m.diag().iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
    } else {
        hermitian_eigenvalues(&m.hermitian_part())?
            .last()
            .copied()
            .unwrap_or(0.0)
    };
    Ok(DensityReport {
        hermitian_deviation,
        min_eigenvalue,
        trace_deviation,
    })
}

fn is_diagonal(m: &ComplexMatrix) -> bool {
    let n = m.rows();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == C64::new(0.0, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_operators() {
        assert!(matches!(
            DensityOperator::diagonal(&[0.5, 0.4]),
            Err(Error::BadTrace(_))
        ));
        assert!(matches!(
            DensityOperator::diagonal(&[1.5, -0.5]),
            Err(Error::NotPositive(_))
        ));
        let skew = ComplexMatrix::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]]).unwrap();
        assert!(matches!(DensityOperator::new(skew), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn tolerates_floor_drift() {
        DensityOperator::diagonal(&[1.0 + 5e-11, -5e-11]).unwrap();
    }

    #[test]
    fn pure_state_normalizes() {
        let rho = DensityOperator::pure(&[C64::new(3.0, 0.0), C64::new(0.0, 4.0)]).unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
        assert!(rho.report().unwrap().is_valid());
    }
}
