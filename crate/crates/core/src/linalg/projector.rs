use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::eig::hermitian_eig;
use super::matrix::{inner, norm, ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::fmath;
use crate::tol;

/// Orthogonal projector, held as an orthonormal basis of its range.
///
/// The dense matrix is materialized only on request; joins, containment
/// and traces work on the basis directly.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    dim: usize,
    basis: Vec<Vec<C64>>,
}

impl Projector {
    pub fn zero(dim: usize) -> Self {
        Self { dim, basis: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        let basis = (0..dim).map(|i| unit(dim, i)).collect();
        Self { dim, basis }
    }

    /// Projector onto `span{e_i : i ∈ indices}`; indices are taken in order.
    pub fn diagonal(dim: usize, indices: &[usize]) -> Result<Self> {
        let mut seen = vec![false; dim];
        let mut basis = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= dim {
                return Err(Error::IndexOutOfRange { index: i, len: dim });
            }
            if !core::mem::replace(&mut seen[i], true) {
                basis.push(unit(dim, i));
            }
        }
        Ok(Self { dim, basis })
    }

    /// Projector onto the span of arbitrary vectors.
    pub fn span(dim: usize, vectors: &[Vec<C64>]) -> Result<Self> {
        let mut b = SpanBuilder::new(dim);
        for v in vectors {
            b.push(v)?;
        }
        Ok(b.finish())
    }

    /// Wraps vectors already known to be orthonormal.
    pub(crate) fn from_orthonormal(dim: usize, basis: Vec<Vec<C64>>) -> Self {
        debug_assert!(basis.iter().all(|v| v.len() == dim));
        Self { dim, basis }
    }

    /// Validates a dense matrix as a projector and extracts its range.
    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        let herm = m.hermitian_deviation();
        if herm > tol::HERMITIAN {
            return Err(Error::NotHermitian(herm));
        }
        let idem = m.matmul(m)?.max_abs_diff(m);
        if idem > tol::IDEMPOTENT {
            return Err(Error::NotProjector(alloc::format!(
                "‖P² − P‖ = {idem:e}"
            )));
        }
        let tr = m.trace().re;
        if tr < -tol::PROJECTOR_RANK || (tr - fmath::round(tr)).abs() > tol::PROJECTOR_RANK {
            return Err(Error::NotProjector(alloc::format!("trace {tr} is not an integer")));
        }
        let e = hermitian_eig(&m.hermitian_part())?;
        let basis = e
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.5)
            .map(|(k, _)| e.vector(k))
            .collect();
        Ok(Self { dim: m.rows(), basis })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Orthonormal range basis in construction order.
    pub fn basis(&self) -> &[Vec<C64>] {
        &self.basis
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut m = ComplexMatrix::zeros(n, n);
        for v in &self.basis {
            for i in 0..n {
                if v[i] == ZERO {
                    continue;
                }
                for j in 0..n {
                    m[(i, j)] += v[i] * v[j].conj();
                }
            }
        }
        m
    }

    pub fn trace(&self) -> f64 {
        self.basis.len() as f64
    }

    /// `P v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.dim];
        for b in &self.basis {
            let c = inner(b, v);
            for (o, bi) in out.iter_mut().zip(b) {
                *o += bi * c;
            }
        }
        out
    }

    /// `‖(I − P) v‖`.
    pub fn residual(&self, v: &[C64]) -> f64 {
        let pv = self.apply(v);
        fmath::sqrt(v.iter().zip(&pv).map(|(a, b)| (a - b).norm_sqr()).sum())
    }

    /// `tr(P a)` for a square matrix `a`.
    pub fn trace_with(&self, a: &ComplexMatrix) -> Result<C64> {
        if a.rows() != self.dim || !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: a.rows(),
            });
        }
        let mut acc = ZERO;
        for b in &self.basis {
            acc += inner(b, &a.apply(b)?);
        }
        Ok(acc)
    }

    /// `P ⊗ I_extra`, keeping range order (basis vectors of `P` major).
    pub fn tensor_identity(&self, extra: usize) -> Result<Self> {
        let dim = self
            .dim
            .checked_mul(extra)
            .filter(|&d| d <= tol::DENSE_CAP)
            .ok_or(Error::DimensionCap {
                requested: self.dim.saturating_mul(extra),
                cap: tol::DENSE_CAP,
            })?;
        let mut basis = Vec::with_capacity(self.rank() * extra);
        for b in &self.basis {
            for j in 0..extra {
                let mut v = vec![ZERO; dim];
                for (i, &z) in b.iter().enumerate() {
                    v[i * extra + j] = z;
                }
                basis.push(v);
            }
        }
        Ok(Self { dim, basis })
    }

    /// Diagonal of the matrix, `P_ii = Σ_k |b_k[i]|²`.
    pub fn diagonal_entries(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for b in &self.basis {
            for (di, z) in d.iter_mut().zip(b) {
                *di += z.norm_sqr();
            }
        }
        d
    }

    /// Validator for the projector invariants on the materialized matrix.
    pub fn check(&self) -> Result<()> {
        Self::from_matrix(&self.matrix()).map(|_| ())
    }
}

fn unit(dim: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[i] = ONE;
    v
}

/// Incremental orthonormal span closure.
///
/// Vectors are processed in insertion order with two passes of modified
/// Gram–Schmidt; a vector is kept when its residual exceeds
/// [`tol::SPAN_RANK`] times the largest input norm seen so far.
#[derive(Clone, Debug)]
pub struct SpanBuilder {
    dim: usize,
    basis: Vec<Vec<C64>>,
    scale: f64,
}

impl SpanBuilder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            basis: Vec::new(),
            scale: 0.0,
        }
    }

    pub fn from_projector(p: &Projector) -> Self {
        Self {
            dim: p.dim,
            basis: p.basis.clone(),
            scale: 1.0,
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.dim
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn push(&mut self, v: &[C64]) -> Result<bool> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        let n0 = norm(v);
        if !n0.is_finite() {
            return Err(Error::InvalidArgument("non-finite vector".to_string()));
        }
        self.scale = self.scale.max(n0);
        if self.is_full() || n0 == 0.0 {
            return Ok(false);
        }
        let mut u = v.to_vec();
        for _ in 0..2 {
            for b in &self.basis {
                let c = inner(b, &u);
                for (ui, bi) in u.iter_mut().zip(b) {
                    *ui -= bi * c;
                }
            }
        }
        let nu = norm(&u);
        if nu <= tol::SPAN_RANK * self.scale {
            return Ok(false);
        }
        for z in &mut u {
            *z /= nu;
        }
        self.basis.push(u);
        Ok(true)
    }

    pub fn finish(self) -> Projector {
        Projector {
            dim: self.dim,
            basis: self.basis,
        }
    }

    pub fn basis(&self) -> &[Vec<C64>] {
        &self.basis
    }
}

/// Smallest projector dominating every input.
///
/// `dim` is required so that the empty join is well defined (the zero
/// projector).
pub fn projector_join(dim: usize, ps: &[Projector]) -> Result<Projector> {
    let mut b = SpanBuilder::new(dim);
    for p in ps {
        if p.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim,
            });
        }
        for v in &p.basis {
            b.push(v)?;
        }
    }
    Ok(b.finish())
}

/// Operator norm of `(I − q) p`.
pub fn leq_deviation(p: &Projector, q: &Projector) -> Result<f64> {
    if p.dim != q.dim {
        return Err(Error::DimensionMismatch {
            expected: p.dim,
            found: q.dim,
        });
    }
    if p.rank() == 0 {
        return Ok(0.0);
    }
    let residuals: Vec<Vec<C64>> = p
        .basis
        .iter()
        .map(|v| {
            let qv = q.apply(v);
            v.iter().zip(&qv).map(|(a, b)| a - b).collect()
        })
        .collect();
    let k = residuals.len();
    let gram = ComplexMatrix::from_fn(k, k, |i, j| inner(&residuals[i], &residuals[j]));
    let top = super::eig::hermitian_eigenvalues(&gram.hermitian_part())?
        .first()
        .copied()
        .unwrap_or(0.0);
    Ok(fmath::sqrt(top.max(0.0)))
}

/// `p ≤ q`, i.e. `‖(I − q) p‖ ≤ 1e-8`.
pub fn projector_leq(p: &Projector, q: &Projector) -> bool {
    matches!(leq_deviation(p, q), Ok(d) if d <= tol::PROJECTOR_LEQ)
}
