// Hermitian eigensolver: Householder reduction to a complex tridiagonal,
// a diagonal phase change to make it real symmetric, then implicit QL.

use alloc::vec;
use alloc::vec::Vec;

use super::matrix::{inner, norm, ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::fmath;
use crate::tol;

/// Spectrum of a Hermitian matrix, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let fl: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = ZERO;
                for k in 0..n {
                    if fl[k] != 0.0 {
                        acc += v[(i, k)] * v[(j, k)].conj() * fl[k];
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
        }
        out
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let dev = a.hermitian_deviation();
    if dev > tol::HERMITIAN * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// Full eigendecomposition with deterministic vector choice.
///
/// Eigenvalues are sorted descending. Inside a cluster of eigenvalues closer
/// than [`tol::DEGENERATE_GAP`] the basis is rebuilt by Gram–Schmidt of the
/// cluster projector applied to `e_0, e_1, …`, and every vector is phased so
/// that its largest-magnitude entry is real and positive.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(a)?;
    let (values, vectors) = decompose(a, true)?;
    let mut vectors = vectors.expect("vectors requested");
    canonicalize(&values, &mut vectors);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    Ok(decompose(a, false)?.0)
}

fn decompose(a: &ComplexMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    let n = a.rows();
    let mut b = a.hermitian_part();
    let mut q = want_vectors.then(|| ComplexMatrix::identity(n));
    let mut offdiag = vec![ZERO; n];

    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x: Vec<C64> = (0..len).map(|i| b[(k + 1 + i, k)]).collect();
        let xnorm = norm(&x);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 <= f64::MIN_POSITIVE {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // p = τ B v over the trailing block.
        let off = k + 1;
        let mut p = vec![ZERO; len];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &b.row(off + i)[off..];
            *pi = row.iter().zip(&v).map(|(bij, vj)| bij * vj).sum::<C64>() * tau;
        }
        let kk = 0.5 * tau * inner(&v, &p).re;
        let w: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - vi * kk).collect();
        for i in 0..len {
            for j in 0..len {
                let upd = v[i] * w[j].conj() + w[i] * v[j].conj();
                b[(off + i, off + j)] -= upd;
            }
        }
        b[(off, k)] = alpha;
        b[(k, off)] = alpha.conj();
        for i in 1..len {
            b[(off + i, k)] = ZERO;
            b[(k, off + i)] = ZERO;
        }

        if let Some(q) = q.as_mut() {
            // Q ← Q (I − τ v v†) on columns off..n.
            for r in 0..n {
                let qv: C64 = (0..len).map(|j| q[(r, off + j)] * v[j]).sum::<C64>() * tau;
                for j in 0..len {
                    q[(r, off + j)] -= qv * v[j].conj();
                }
            }
        }
    }

    let mut d: Vec<f64> = (0..n).map(|i| b[(i, i)].re).collect();
    for i in 0..n.saturating_sub(1) {
        offdiag[i] = b[(i + 1, i)];
    }

    // Phase change D with real nonnegative subdiagonal in D† T D.
    let mut e = vec![0.0; n];
    let mut phases = vec![ONE; n];
    for i in 0..n.saturating_sub(1) {
        let z = offdiag[i];
        let m = z.norm();
        e[i] = m;
        phases[i + 1] = if m > 0.0 { phases[i] * (z / m) } else { phases[i] };
    }
    if let Some(q) = q.as_mut() {
        for r in 0..n {
            for (c, ph) in phases.iter().enumerate() {
                q[(r, c)] *= ph;
            }
        }
    }

    tql2(&mut d, &mut e, q.as_mut())?;

    // Sort descending, carrying vectors along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors = q.map(|q| ComplexMatrix::from_fn(n, n, |r, c| q[(r, order[c])]));
    Ok((values, vectors))
}

// Implicit QL on a real symmetric tridiagonal (`d` diagonal, `e[i]` coupling
// i and i+1, `e[n-1] = 0`), applying the rotations to the columns of `v`.
fn tql2(d: &mut [f64], e: &mut [f64], mut v: Option<&mut ComplexMatrix>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NonConvergence { samples: iter, rank: l });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = fmath::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = fmath::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        for k in 0..v.rows() {
                            let hk = v[(k, i + 1)];
                            let vk = v[(k, i)];
                            v[(k, i + 1)] = vk * s + hk * c;
                            v[(k, i)] = vk * c - hk * s;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn canonicalize(values: &[f64], vectors: &mut ComplexMatrix) {
    let n = values.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end - 1] - values[end] < tol::DEGENERATE_GAP {
            end += 1;
        }
        if end - start > 1 {
            rebuild_cluster(vectors, start, end);
        }
        start = end;
    }
    for c in 0..n {
        fix_phase(vectors, c);
    }
}

// Gram–Schmidt of P e_i (P the cluster projector) in index order.
fn rebuild_cluster(vectors: &mut ComplexMatrix, start: usize, end: usize) {
    let n = vectors.rows();
    let size = end - start;
    let cluster: Vec<Vec<C64>> = (start..end).map(|c| vectors.column(c)).collect();
    let mut chosen: Vec<Vec<C64>> = Vec::with_capacity(size);
    let mut used = vec![false; n];

    for &threshold in &[1e-3, 1e-12] {
        for i in 0..n {
            if chosen.len() == size {
                break;
            }
            if used[i] {
                continue;
            }
            // P e_i = Σ_j u_j conj(u_j[i])
            let mut u = vec![ZERO; n];
            for cv in &cluster {
                let coef = cv[i].conj();
                for (ur, cr) in u.iter_mut().zip(cv) {
                    *ur += cr * coef;
                }
            }
            for _ in 0..2 {
                for prev in &chosen {
                    let proj = inner(prev, &u);
                    for (ur, pr) in u.iter_mut().zip(prev) {
                        *ur -= pr * proj;
                    }
                }
            }
            let nu = norm(&u);
            if nu > threshold {
                used[i] = true;
                chosen.push(u.into_iter().map(|z| z / nu).collect());
            }
        }
    }
    // Fall back to the solver's vectors if the projector was too noisy.
    if chosen.len() < size {
        return;
    }
    for (k, vec) in chosen.into_iter().enumerate() {
        for (r, z) in vec.into_iter().enumerate() {
            vectors[(r, start + k)] = z;
        }
    }
}

fn fix_phase(vectors: &mut ComplexMatrix, c: usize) {
    let n = vectors.rows();
    let mut best = 0;
    let mut best_mag = -1.0;
    for r in 0..n {
        let m = vectors[(r, c)].norm();
        if m > best_mag + 1e-12 {
            best = r;
            best_mag = m;
        }
    }
    if best_mag <= 0.0 {
        return;
    }
    let z = vectors[(best, c)];
    let rot = z.conj() / z.norm();
    for r in 0..n {
        vectors[(r, c)] *= rot;
    }
    vectors[(best, c)] = C64::new(vectors[(best, c)].re, 0.0);
}

/// Hermitian square root, clamping small negative eigenvalues.
pub fn sqrtm_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(a)?.map(|x| fmath::sqrt(x.max(0.0))))
}
