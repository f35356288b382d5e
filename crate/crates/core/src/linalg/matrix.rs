use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::fmath;
use crate::tol;

pub type C64 = Complex<f64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix stored in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("matrix has non-finite entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Real matrix from nested rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(invalid("ragged rows"));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::from_vec(r, c, data)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = C64::new(v, 0.0);
        }
        m
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(invalid("columns of unequal length"));
        }
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            for (i, &z) in c.iter().enumerate() {
                m.data[i * cols + j] = z;
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn diag(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols))
            .map(|i| self.data[i * self.cols + i])
            .collect()
    }

    pub fn trace(&self) -> C64 {
        self.diag().into_iter().sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.data[j * self.cols + i].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub(crate) fn add_assign_scaled(&mut self, other: &Self, s: C64) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * m];
        for i in 0..n {
            let out_row = &mut out[i * m..(i + 1) * m];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[p * m..(p + 1) * m];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            rows: n,
            cols: m,
            data: out,
        })
    }

    /// `self† · other` without forming the adjoint.
    pub fn adjoint_matmul(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let (k, n, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * m];
        for p in 0..k {
            let a_row = &self.data[p * n..(p + 1) * n];
            let b_row = &other.data[p * m..(p + 1) * m];
            for (i, a) in a_row.iter().enumerate() {
                let a = a.conj();
                if a == ZERO {
                    continue;
                }
                let out_row = &mut out[i * m..(i + 1) * m];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            rows: n,
            cols: m,
            data: out,
        })
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum::<C64>()
            })
            .collect())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        fmath::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// `max |a_ij − conj(a_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                dev = dev.max(d);
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(a + a†)/2`, removing rounding asymmetry.
    pub fn hermitian_part(&self) -> Self {
        let n = self.rows;
        Self::from_fn(n, n, |i, j| {
            (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `tr(self · other)` for square matrices of equal size.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        if !self.is_square() || self.rows != other.cols || self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let n = self.rows;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        Ok(acc)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product `a ⊗ b` with the default dimension cap.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    tensor_product_capped(a, b, tol::DIM_CAP)
}

/// Kronecker product; both output dimensions must stay within `cap`.
pub fn tensor_product_capped(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    cap: usize,
) -> Result<ComplexMatrix> {
    let rows = checked_dim(a.rows, b.rows, cap)?;
    let cols = checked_dim(a.cols, b.cols, cap)?;
    let mut data = Vec::with_capacity(rows * cols);
    for ia in 0..a.rows {
        for ib in 0..b.rows {
            for ja in 0..a.cols {
                let x = a.data[ia * a.cols + ja];
                for jb in 0..b.cols {
                    data.push(x * b.data[ib * b.cols + jb]);
                }
            }
        }
    }
    Ok(ComplexMatrix { rows, cols, data })
}

/// `a^{⊗n}`; `n = 0` yields the 1×1 identity.
pub fn tensor_power(a: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::identity(1);
    for _ in 0..n {
        out = tensor_product(&out, a)?;
    }
    Ok(out)
}

fn checked_dim(x: usize, y: usize, cap: usize) -> Result<usize> {
    match x.checked_mul(y) {
        Some(v) if v <= cap => Ok(v),
        Some(v) => Err(Error::DimensionCap {
            requested: v,
            cap,
        }),
        None => Err(Error::DimensionCap {
            requested: usize::MAX,
            cap,
        }),
    }
}

/// `dᵏ`, failing beyond `cap`.
pub fn pow_dim(d: usize, k: usize, cap: usize) -> Result<usize> {
    let mut v: usize = 1;
    for _ in 0..k {
        v = checked_dim(v, d, cap)?;
    }
    Ok(v)
}

/// Traces out `traced` sites of an operator on `⊗ site_dims`.
pub fn partial_trace(
    a: &ComplexMatrix,
    site_dims: &[usize],
    traced: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = site_dims.iter().product();
    if !a.is_square() || a.rows != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: a.rows,
        });
    }
    for &t in traced {
        if t >= site_dims.len() {
            return Err(Error::IndexOutOfRange {
                index: t,
                len: site_dims.len(),
            });
        }
    }
    let keep: Vec<usize> = (0..site_dims.len()).filter(|s| !traced.contains(s)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&s| site_dims[s]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);

    // Row-major strides of the full index.
    let mut strides = vec![1usize; site_dims.len()];
    for s in (0..site_dims.len().saturating_sub(1)).rev() {
        strides[s] = strides[s + 1] * site_dims[s + 1];
    }
    let traced_dims: Vec<usize> = traced.iter().map(|&s| site_dims[s]).collect();
    let traced_count: usize = traced_dims.iter().product();

    let decompose = |mut idx: usize, dims: &[usize], sites: &[usize]| -> usize {
        // Maps a sub-index over `sites` into a full-space offset.
        let mut off = 0;
        for k in (0..dims.len()).rev() {
            off += (idx % dims[k]) * strides[sites[k]];
            idx /= dims[k];
        }
        off
    };

    for i in 0..out_dim {
        let oi = decompose(i, &kept_dims, &keep);
        for j in 0..out_dim {
            let oj = decompose(j, &kept_dims, &keep);
            let mut acc = ZERO;
            for t in 0..traced_count {
                let ot = decompose(t, &traced_dims, traced);
                acc += a.data[(oi + ot) * total + oj + ot];
            }
            out.data[i * out_dim + j] = acc;
        }
    }
    Ok(out)
}

/// Applies `X ↦ Σ_k B_k X B_k†` on one site of an `n`-site operator,
/// where each `B_k` acts on a `d`-dimensional site.
pub(crate) fn apply_local_map(
    x: &ComplexMatrix,
    d: usize,
    site: usize,
    ops: &[ComplexMatrix],
) -> ComplexMatrix {
    let dim = x.rows;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for op in ops {
        let left = left_apply_local(x, d, site, op);
        let both = right_apply_local_adjoint(&left, d, site, op);
        out.add_assign_scaled(&both, ONE);
    }
    out
}

/// `(I ⊗ B ⊗ I) · X` with `B` on `site`.
pub(crate) fn left_apply_local(
    x: &ComplexMatrix,
    d: usize,
    site: usize,
    op: &ComplexMatrix,
) -> ComplexMatrix {
    let dim = x.rows;
    let cols = x.cols;
    let inner = site_stride(dim, d, site);
    let block = inner * d;
    let mut out = ComplexMatrix::zeros(dim, cols);
    let mut buf = vec![ZERO; d];
    for outer in (0..dim).step_by(block) {
        for r in 0..inner {
            for c in 0..cols {
                for (a, slot) in buf.iter_mut().enumerate() {
                    *slot = x.data[(outer + a * inner + r) * cols + c];
                }
                for a in 0..d {
                    let row = &op.data[a * d..(a + 1) * d];
                    let acc: C64 = row.iter().zip(&buf).map(|(o, b)| o * b).sum();
                    out.data[(outer + a * inner + r) * cols + c] = acc;
                }
            }
        }
    }
    out
}

/// `X · (I ⊗ B† ⊗ I)` with `B` on `site`.
pub(crate) fn right_apply_local_adjoint(
    x: &ComplexMatrix,
    d: usize,
    site: usize,
    op: &ComplexMatrix,
) -> ComplexMatrix {
    let dim = x.cols;
    let rows = x.rows;
    let inner = site_stride(dim, d, site);
    let block = inner * d;
    let mut out = ComplexMatrix::zeros(rows, dim);
    let mut buf = vec![ZERO; d];
    for row in 0..rows {
        let xr = &x.data[row * dim..(row + 1) * dim];
        let or = &mut out.data[row * dim..(row + 1) * dim];
        for outer in (0..dim).step_by(block) {
            for r in 0..inner {
                for (b, slot) in buf.iter_mut().enumerate() {
                    *slot = xr[outer + b * inner + r];
                }
                for a in 0..d {
                    // (X B†)_{.,a} = Σ_b X_{.,b} conj(B_{a,b})
                    let row = &op.data[a * d..(a + 1) * d];
                    let acc: C64 = buf.iter().zip(row).map(|(b, o)| b * o.conj()).sum();
                    or[outer + a * inner + r] = acc;
                }
            }
        }
    }
    out
}

/// Applies a single-site operator to `site` of a state vector.
pub(crate) fn apply_local_vector(v: &mut [C64], d: usize, site: usize, op: &ComplexMatrix) {
    let dim = v.len();
    let inner = site_stride(dim, d, site);
    let block = inner * d;
    let mut buf = vec![ZERO; d];
    for outer in (0..dim).step_by(block) {
        for r in 0..inner {
            for (a, slot) in buf.iter_mut().enumerate() {
                *slot = v[outer + a * inner + r];
            }
            for a in 0..d {
                let row = &op.data[a * d..(a + 1) * d];
                let acc: C64 = row.iter().zip(&buf).map(|(o, b)| o * b).sum();
                v[outer + a * inner + r] = acc;
            }
        }
    }
}

// Stride of `site` in a row-major index over `dim = d^n`; site 0 is the
// most significant digit.
fn site_stride(dim: usize, d: usize, site: usize) -> usize {
    let mut stride = dim;
    for _ in 0..=site {
        stride /= d;
    }
    stride
}

pub(crate) fn num_sites(dim: usize, d: usize) -> Result<usize> {
    if d < 2 {
        return Err(invalid("site dimension must be at least 2"));
    }
    let mut n = 0;
    let mut v = 1usize;
    while v < dim {
        v *= d;
        n += 1;
    }
    if v != dim {
        return Err(invalid("dimension is not a power of the site dimension"));
    }
    Ok(n)
}

/// Vector helpers.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    fmath::sqrt(v.iter().map(|z| z.norm_sqr()).sum())
}
