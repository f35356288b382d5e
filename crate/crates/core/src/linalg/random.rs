//! Random test objects: Hermitian observables, Haar unitaries, states and
//! channels. All generators take the caller's RNG so runs are reproducible.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::matrix::{inner, norm, ComplexMatrix, C64};
use super::DensityOperator;

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` pushed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = ginibre(rng, d, d);
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = g.column(j);
        for _ in 0..2 {
            for u in &q {
                let c = inner(u, &v);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= ui * c;
                }
            }
        }
        // Gram–Schmidt yields R with a positive real diagonal, which is the
        // phase-corrected factorization.
        let nv = norm(&v);
        q.push(v.into_iter().map(|z| z / nv).collect());
    }
    ComplexMatrix::from_columns(&q).expect("square columns")
}

/// Hermitian matrix `(G + G†)/2` with Gaussian `G`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = ginibre(rng, d, d);
    g.add(&g.adjoint()).expect("same shape").scale_real(0.5)
}

/// Random full-rank density operator `G G† / tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityOperator {
    let g = ginibre(rng, d, d);
    let m = g.matmul(&g.adjoint()).expect("square");
    let tr = m.trace().re;
    DensityOperator::new_unchecked(m.scale_real(1.0 / tr).hermitian_part())
}

pub fn random_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| gaussian_complex(rng)).collect();
    let n = norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Kraus operators of a random channel: blocks of an isometry `d → k·d`.
pub fn random_kraus<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize) -> Vec<ComplexMatrix> {
    let u = haar_unitary(rng, d * k);
    (0..k)
        .map(|b| ComplexMatrix::from_fn(d, d, |i, j| u[(b * d + i, j)]))
        .collect()
}
