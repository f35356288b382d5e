//! Stationary quantum sources given by consistent marginal families `ρ_n`,
//! their operator-form diagnostics, pinching, and the abelian bridge to
//! classical processes.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::channel::KrausChannel;
use crate::error::{invalid, Error, Result};
use crate::fmath;
use crate::linalg::{
    apply_local_map, hermitian_eig, hermitian_eigenvalues, inner, partial_trace, pow_dim,
    random::random_hermitian, tensor_power, ComplexMatrix, DensityOperator, HermitianEigen,
    Projector, C64, ONE, ZERO,
};
use crate::process::{index_to_sequence, ClassicalProcess, Distribution};
use crate::tol;

/// Linearly independent unit vectors placed on sites by a classical process.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumAlphabet {
    d: usize,
    vectors: Vec<Vec<C64>>,
}

impl QuantumAlphabet {
    /// Rejects vectors that are not unit-norm to 1e-12 or whose Gram matrix
    /// has condition number above 1e8.
    pub fn new(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let d = vectors.first().map_or(0, Vec::len);
        if d == 0 {
            return Err(invalid("alphabet needs at least one nonempty vector"));
        }
        if vectors.iter().any(|v| v.len() != d) {
            return Err(invalid("alphabet vectors have different lengths"));
        }
        if vectors.len() > d {
            return Err(invalid(alloc::format!(
                "{} vectors in C^{d} cannot be linearly independent",
                vectors.len()
            )));
        }
        for v in &vectors {
            let n = crate::linalg::norm(v);
            if (n - 1.0).abs() > 1e-12 {
                return Err(invalid(alloc::format!("alphabet vector has norm {n}")));
            }
        }
        let a = Self { d, vectors };
        let cond = a.gram_condition()?;
        if !(cond <= tol::ALPHABET_CONDITION) {
            return Err(invalid(alloc::format!(
                "alphabet Gram matrix condition number {cond:e} exceeds {:e}",
                tol::ALPHABET_CONDITION
            )));
        }
        Ok(a)
    }

    /// `{|0⟩, …, |d−1⟩}`.
    pub fn computational(d: usize) -> Self {
        let vectors = (0..d)
            .map(|i| {
                let mut v = vec![ZERO; d];
                v[i] = ONE;
                v
            })
            .collect();
        Self { d, vectors }
    }

    pub fn site_dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn gram(&self) -> ComplexMatrix {
        let k = self.vectors.len();
        ComplexMatrix::from_fn(k, k, |i, j| inner(&self.vectors[i], &self.vectors[j]))
    }

    pub fn gram_condition(&self) -> Result<f64> {
        let ev = hermitian_eigenvalues(&self.gram().hermitian_part())?;
        let max = ev.first().copied().unwrap_or(0.0);
        let min = ev.last().copied().unwrap_or(0.0);
        Ok(if min > 0.0 { max / min } else { f64::INFINITY })
    }

    pub fn is_orthonormal(&self) -> bool {
        self.gram()
            .max_abs_diff(&ComplexMatrix::identity(self.vectors.len()))
            <= 1e-12
    }

    /// `σ(a)` when letter `a` is `e^{iθ}|σ(a)⟩`.
    pub fn computational_labels(&self) -> Option<Vec<usize>> {
        let mut labels = Vec::with_capacity(self.vectors.len());
        for v in &self.vectors {
            let support: Vec<usize> = (0..self.d).filter(|&i| v[i] != ZERO).collect();
            if support.len() != 1 {
                return None;
            }
            labels.push(support[0]);
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        sorted.dedup();
        (sorted.len() == labels.len()).then_some(labels)
    }

    // d × d matrix whose first L columns are the letters.
    fn synthesis(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.d, self.d, |r, c| {
            self.vectors.get(c).map_or(ZERO, |v| v[r])
        })
    }

    /// `ψ_{x₁} ⊗ … ⊗ ψ_{x_n}`.
    pub fn product_vector(&self, seq: &[usize]) -> Vec<C64> {
        product_vector(seq.iter().map(|&a| self.vectors[a].as_slice()))
    }
}

pub(crate) fn product_vector<'a>(factors: impl Iterator<Item = &'a [C64]>) -> Vec<C64> {
    let mut out = vec![ONE];
    for f in factors {
        let mut next = Vec::with_capacity(out.len() * f.len());
        for &a in &out {
            for &b in f {
                next.push(a * b);
            }
        }
        out = next;
    }
    out
}

/// A translation-invariant source on `d`-level sites.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumSource {
    d: usize,
    kind: SourceKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SourceKind {
    Iid(DensityOperator),
    ClassicallyCorrelated {
        process: ClassicalProcess,
        alphabet: QuantumAlphabet,
    },
    ChannelTransformed {
        inner: Box<QuantumSource>,
        channel: KrausChannel,
    },
}

/// Anything that produces the `n`-site marginals of a source.
pub trait MarginalFamily {
    fn site_dim(&self) -> usize;
    fn marginal(&self, n: usize) -> Result<DensityOperator>;
}

impl QuantumSource {
    pub fn iid(rho: DensityOperator) -> Self {
        Self {
            d: rho.dim(),
            kind: SourceKind::Iid(rho),
        }
    }

    pub fn classically_correlated(
        process: ClassicalProcess,
        alphabet: QuantumAlphabet,
    ) -> Result<Self> {
        if process.alphabet_size() != alphabet.len() {
            return Err(Error::DimensionMismatch {
                expected: alphabet.len(),
                found: process.alphabet_size(),
            });
        }
        Ok(Self {
            d: alphabet.site_dim(),
            kind: SourceKind::ClassicallyCorrelated { process, alphabet },
        })
    }

    pub fn channel_transformed(inner: QuantumSource, channel: KrausChannel) -> Result<Self> {
        if inner.d != channel.site_dim() {
            return Err(Error::DimensionMismatch {
                expected: inner.d,
                found: channel.site_dim(),
            });
        }
        Ok(Self {
            d: inner.d,
            kind: SourceKind::ChannelTransformed {
                inner: Box::new(inner),
                channel,
            },
        })
    }

    #[inline]
    pub fn site_dim(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> &SourceKind {
        &self.kind
    }

    /// `ρ_n`.
    pub fn marginal(&self, n: usize) -> Result<DensityOperator> {
        if n == 0 {
            return Err(invalid("marginal needs at least one site"));
        }
        pow_dim(self.d, n, tol::DIM_CAP)?;
        match &self.kind {
            SourceKind::Iid(rho) => Ok(DensityOperator::new_unchecked(tensor_power(
                rho.matrix(),
                n,
            )?)),
            SourceKind::ClassicallyCorrelated { process, alphabet } => {
                if let Some(diag) = self.diagonal_marginal(n)? {
                    return Ok(DensityOperator::new_unchecked(ComplexMatrix::diagonal(&diag)));
                }
                let mu = process.marginal(n)?;
                let x = embedded_diagonal(&mu, self.d);
                let s = alphabet.synthesis();
                let mut out = x;
                for site in 0..n {
                    out = apply_local_map(&out, self.d, site, core::slice::from_ref(&s));
                }
                Ok(DensityOperator::new_unchecked(out.hermitian_part()))
            }
            SourceKind::ChannelTransformed { inner, channel } => {
                channel.apply_tensor_power(&inner.marginal(n)?, n)
            }
        }
    }

    /// Diagonal of `ρ_n` when `ρ_n` is diagonal in the computational basis
    /// for every `n`; `None` otherwise. Reaches `d^n ≤ 2^20`.
    pub fn diagonal_marginal(&self, n: usize) -> Result<Option<Vec<f64>>> {
        let dim = pow_dim(self.d, n, tol::DENSE_CAP)?;
        match &self.kind {
            SourceKind::Iid(rho) if rho.is_diagonal() => {
                let p: Vec<f64> = rho.matrix().diag().iter().map(|z| z.re).collect();
                let mut out = vec![1.0];
                for _ in 0..n {
                    out = out.iter().flat_map(|&a| p.iter().map(move |&b| a * b)).collect();
                }
                Ok(Some(out))
            }
            SourceKind::ClassicallyCorrelated { process, alphabet } => {
                let Some(labels) = alphabet.computational_labels() else {
                    return Ok(None);
                };
                let mu = process.marginal(n)?;
                let l = alphabet.len();
                let mut out = vec![0.0; dim];
                for (idx, &p) in mu.probs().iter().enumerate() {
                    let seq = index_to_sequence(idx, l, n);
                    let target = seq.iter().fold(0, |acc, &a| acc * self.d + labels[a]);
                    out[target] += p;
                }
                Ok(Some(out))
            }
            _ => Ok(None),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        match &self.kind {
            SourceKind::Iid(rho) => rho.is_diagonal(),
            SourceKind::ClassicallyCorrelated { alphabet, .. } => {
                alphabet.computational_labels().is_some()
            }
            SourceKind::ChannelTransformed { .. } => false,
        }
    }

    /// Exact mean entropy when the source admits a closed form: `S(ρ₁)` for
    /// i.i.d. sources and the classical entropy rate for orthonormal
    /// classically correlated sources.
    pub fn analytic_entropy_rate(&self) -> Option<f64> {
        match &self.kind {
            SourceKind::Iid(rho) => crate::info::von_neumann_entropy(rho).ok(),
            SourceKind::ClassicallyCorrelated { process, alphabet } if alphabet.is_orthonormal() => {
                process.entropy_rate().ok().map(|r| r.bits)
            }
            _ => None,
        }
    }

    /// Whether the construction is stationary (channel images inherit it).
    pub fn is_stationary(&self) -> bool {
        match &self.kind {
            SourceKind::Iid(_) => true,
            SourceKind::ClassicallyCorrelated { process, .. } => process.is_stationary(),
            SourceKind::ChannelTransformed { inner, .. } => inner.is_stationary(),
        }
    }
}

impl MarginalFamily for QuantumSource {
    fn site_dim(&self) -> usize {
        self.d
    }

    fn marginal(&self, n: usize) -> Result<DensityOperator> {
        QuantumSource::marginal(self, n)
    }
}

fn embedded_diagonal(mu: &Distribution, d: usize) -> ComplexMatrix {
    let l = mu.alphabet_size();
    let n = mu.len();
    let dim = d.pow(n as u32);
    let mut x = ComplexMatrix::zeros(dim, dim);
    for (idx, &p) in mu.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let seq = index_to_sequence(idx, l, n);
        let t = seq.iter().fold(0, |acc, &a| acc * d + a);
        x[(t, t)] = C64::new(p, 0.0);
    }
    x
}

/// Operator norm of a Hermitian matrix.
fn hermitian_norm(a: &ComplexMatrix) -> Result<f64> {
    let ev = hermitian_eigenvalues(a)?;
    Ok(ev.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

fn max_observable_deviation<R: Rng + ?Sized>(
    diff: &ComplexMatrix,
    d: usize,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let a = random_hermitian(rng, diff.rows());
        let scale = hermitian_norm(&a)?;
        if scale == 0.0 {
            continue;
        }
        let dev = diff.trace_product(&a)?.norm() / scale;
        worst = worst.max(dev);
    }
    let _ = d;
    Ok(worst)
}

/// `max_a |tr(ρ_m a) − tr(ρ_{m+i} (a ⊗ I^{⊗i}))| / ‖a‖` over random
/// Hermitian `a`.
pub fn check_consistency<F: MarginalFamily + ?Sized, R: Rng + ?Sized>(
    s: &F,
    m: usize,
    i: usize,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    let d = s.site_dim();
    let small = s.marginal(m)?;
    let big = s.marginal(m + i)?;
    let dims = vec![d; m + i];
    let traced: Vec<usize> = (m..m + i).collect();
    let reduced = partial_trace(big.matrix(), &dims, &traced)?;
    let diff = small.matrix().sub(&reduced)?;
    max_observable_deviation(&diff, d, trials, rng)
}

/// As [`check_consistency`] with the observable placed after `i` idle sites:
/// `tr(ρ_{m+i} (I^{⊗i} ⊗ a))`.
pub fn check_stationarity<F: MarginalFamily + ?Sized, R: Rng + ?Sized>(
    s: &F,
    m: usize,
    i: usize,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    let d = s.site_dim();
    let small = s.marginal(m)?;
    let big = s.marginal(m + i)?;
    let dims = vec![d; m + i];
    let traced: Vec<usize> = (0..i).collect();
    let reduced = partial_trace(big.matrix(), &dims, &traced)?;
    let diff = small.matrix().sub(&reduced)?;
    max_observable_deviation(&diff, d, trials, rng)
}

/// Finite-`N` ergodicity diagnostics for observables `a`, `b` on `m` sites.
#[derive(Clone, Debug, PartialEq)]
pub struct ErgodicityReport {
    pub m: usize,
    pub n: usize,
    /// `(1/(N−m+1)) Σ_{i=m}^{N} tr(ρ_{m+i}(a ⊗ I^{⊗(i−m)} ⊗ b))`.
    pub cesaro: f64,
    /// `tr(ρ_m a) · tr(ρ_m b)`.
    pub product: f64,
    /// Mean of `|term_i − product|` (weak mixing).
    pub weak_mixing: f64,
    /// `term_N − product` (strong mixing).
    pub tail: f64,
    /// Least-squares slope of `log|term_i − product|` against `log i`, over
    /// terms that are not yet at rounding level.
    pub decay_slope: Option<f64>,
}

impl ErgodicityReport {
    pub fn gap(&self) -> f64 {
        self.cesaro - self.product
    }
}

/// Cesàro, weak- and strong-mixing sums for `a`, `b` (Hermitian, `d^m`).
///
/// Nothing of size `d^{m+i}` is formed: i.i.d. sources factorize,
/// classically correlated sources reduce to a transfer-matrix power, and
/// channel images are pulled back through Heisenberg duals.
pub fn ergodicity_gap(
    s: &QuantumSource,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    m: usize,
    big_n: usize,
) -> Result<ErgodicityReport> {
    if m == 0 || big_n < m {
        return Err(invalid("need 1 ≤ m ≤ N"));
    }
    let dim = pow_dim(s.d, m, tol::DIM_CAP)?;
    for x in [a, b] {
        if x.rows() != dim || !x.is_square() {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: x.rows(),
            });
        }
        let dev = x.hermitian_deviation();
        if dev > tol::HERMITIAN * x.max_abs().max(1.0) {
            return Err(Error::NotHermitian(dev));
        }
    }
    let (terms, product) = correlation_terms(s, a, b, m, big_n)?;
    let count = terms.len() as f64;
    let cesaro = terms.iter().sum::<f64>() / count;
    let weak_mixing = terms.iter().map(|t| (t - product).abs()).sum::<f64>() / count;
    let tail = terms.last().copied().unwrap_or(product) - product;
    let floor = 1e-13 * product.abs().max(1.0);
    let points: Vec<(f64, f64)> = terms
        .iter()
        .enumerate()
        .filter(|(_, t)| (*t - product).abs() > floor)
        .map(|(k, t)| (fmath::ln((m + k) as f64), fmath::ln((t - product).abs())))
        .collect();
    Ok(ErgodicityReport {
        m,
        n: big_n,
        cesaro,
        product,
        weak_mixing,
        tail,
        decay_slope: fit_slope(&points),
    })
}

fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

// Terms for i = m..=N and the product of single expectations.
fn correlation_terms(
    s: &QuantumSource,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    m: usize,
    big_n: usize,
) -> Result<(Vec<f64>, f64)> {
    let count = big_n - m + 1;
    match &s.kind {
        SourceKind::Iid(rho) => {
            let rm = tensor_power(rho.matrix(), m)?;
            let ta = rm.trace_product(a)?.re;
            let tb = rm.trace_product(b)?.re;
            Ok((vec![ta * tb; count], ta * tb))
        }
        SourceKind::ChannelTransformed { inner, channel } => {
            let da = channel.heisenberg_dual(a, m)?;
            let db = channel.heisenberg_dual(b, m)?;
            correlation_terms(inner, &da, &db, m, big_n)
        }
        SourceKind::ClassicallyCorrelated { process, alphabet } => {
            let aut = process.automaton();
            let l = alphabet.len();
            let st = aut.states;
            let words = pow_dim(l, m, tol::DENSE_CAP)?;
            let expect = |op: &ComplexMatrix, idx: usize| -> Result<f64> {
                let psi = alphabet.product_vector(&index_to_sequence(idx, l, m));
                Ok(inner(&psi, &op.apply(&psi)?).re)
            };
            // v = Σ_x f(x) first[x₁] M_{x₂}⋯M_{x_m};  c = Σ_y g(y) M_{y₁}⋯M_{y_m} 1.
            let mut v = vec![0.0; st];
            let mut c = vec![0.0; st];
            let mut ta = 0.0;
            let mut tb = 0.0;
            for idx in 0..words {
                let seq = index_to_sequence(idx, l, m);
                let mut fwd = aut.first[seq[0]].clone();
                for &x in &seq[1..] {
                    fwd = aut.step(&fwd, x);
                }
                let px: f64 = fwd.iter().sum();
                let fa = expect(a, idx)?;
                let gb = expect(b, idx)?;
                for (vi, fi) in v.iter_mut().zip(&fwd) {
                    *vi += fa * fi;
                }
                ta += fa * px;
                tb += gb * px;
                let mut bwd = vec![1.0; st];
                for &y in seq.iter().rev() {
                    bwd = mat_vec(&aut.mats[y], &bwd, st);
                }
                for (ci, bi) in c.iter_mut().zip(&bwd) {
                    *ci += gb * bi;
                }
            }
            let t = aut.total();
            let mut terms = Vec::with_capacity(count);
            let mut w = v;
            for _ in 0..count {
                terms.push(w.iter().zip(&c).map(|(x, y)| x * y).sum());
                w = vec_mat(&w, &t, st);
            }
            Ok((terms, ta * tb))
        }
    }
}

fn mat_vec(m: &[f64], v: &[f64], s: usize) -> Vec<f64> {
    (0..s)
        .map(|i| m[i * s..(i + 1) * s].iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn vec_mat(v: &[f64], m: &[f64], s: usize) -> Vec<f64> {
    let mut out = vec![0.0; s];
    for (i, &vi) in v.iter().enumerate() {
        for (o, mij) in out.iter_mut().zip(&m[i * s..(i + 1) * s]) {
            *o += vi * mij;
        }
    }
    out
}

/// Pinching `Σ_k |e_k⟩⟨e_k| a |e_k⟩⟨e_k|` onto an orthonormal basis given as
/// the columns of `basis`.
pub fn conditional_expectation(a: &ComplexMatrix, basis: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = basis.rows();
    if !basis.is_square() || !a.is_square() || a.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.rows(),
        });
    }
    let gram = basis.adjoint_matmul(basis)?;
    let dev = gram.max_abs_diff(&ComplexMatrix::identity(n));
    if dev > 1e-10 {
        return Err(invalid(alloc::format!("basis is not orthonormal (deviation {dev:e})")));
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let e = basis.column(k);
        let c = inner(&e, &a.apply(&e)?);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += e[i] * e[j].conj() * c;
            }
        }
    }
    Ok(out)
}

/// Classical view of a source read in blocks of `l` sites, in the product
/// eigenbasis of `ρ_l`.
#[derive(Clone, Debug)]
pub struct AbelianRestriction {
    source: QuantumSource,
    l: usize,
    eigen: HermitianEigen,
    process: Option<ClassicalProcess>,
}

/// Diagonalizes `ρ_l` and sets up the pinched classical view.
pub fn abelian_restriction(s: &QuantumSource, l: usize) -> Result<AbelianRestriction> {
    if l == 0 {
        return Err(invalid("block length must be at least 1"));
    }
    let rho_l = s.marginal(l)?;
    let eigen = hermitian_eig(rho_l.matrix())?;
    let process = closed_form_process(s, l, &eigen)?;
    Ok(AbelianRestriction {
        source: s.clone(),
        l,
        eigen,
        process,
    })
}

fn closed_form_process(
    s: &QuantumSource,
    l: usize,
    eigen: &HermitianEigen,
) -> Result<Option<ClassicalProcess>> {
    match &s.kind {
        SourceKind::Iid(_) => {
            let mut p: Vec<f64> = eigen.values.iter().map(|&v| v.max(0.0)).collect();
            let total: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= total);
            Ok(Some(ClassicalProcess::iid(p)?))
        }
        SourceKind::ClassicallyCorrelated { process, alphabet }
            if alphabet.is_orthonormal() && alphabet.len() == s.d =>
        {
            // Letter k of the view is the block x with Ψ_x = v_k up to phase.
            let letters = pow_dim(s.d, l, tol::DIM_CAP)?;
            let blocks: Vec<Vec<C64>> = (0..letters)
                .map(|x| alphabet.product_vector(&index_to_sequence(x, s.d, l)))
                .collect();
            let mut perm = vec![usize::MAX; letters];
            for k in 0..letters {
                let v = eigen.vector(k);
                let Some(x) = blocks.iter().position(|b| inner(b, &v).norm() > 1.0 - 1e-9) else {
                    return Ok(None);
                };
                if perm[x] != usize::MAX {
                    return Ok(None);
                }
                perm[x] = k;
            }
            Ok(Some(process.block_process(l)?.relabel(&perm)?))
        }
        _ => Ok(None),
    }
}

impl AbelianRestriction {
    pub fn l(&self) -> usize {
        self.l
    }

    /// Letters of the view, `d^l`.
    pub fn letters(&self) -> usize {
        self.eigen.values.len()
    }

    /// Eigenvalues of `ρ_l`, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    /// Eigenbasis of `ρ_l` as columns; column `k` is letter `k`.
    pub fn basis(&self) -> &ComplexMatrix {
        &self.eigen.vectors
    }

    /// Closed-form process for the view, where one is known.
    pub fn process(&self) -> Option<&ClassicalProcess> {
        self.process.as_ref()
    }

    /// `ρ_{ln}` rotated into the product eigenbasis (before pinching).
    fn rotated(&self, n: usize) -> Result<ComplexMatrix> {
        let rho = self.source.marginal(self.l * n)?;
        let vdag = self.eigen.vectors.adjoint();
        let mut out = rho.into_matrix();
        for site in 0..n {
            out = apply_local_map(&out, self.letters(), site, core::slice::from_ref(&vdag));
        }
        Ok(out)
    }

    /// Measure of the view on `n` letters: `μ(ω) = ⟨ω|ρ_{ln}|ω⟩`.
    pub fn measure(&self, n: usize) -> Result<Distribution> {
        let rot = self.rotated(n)?;
        let probs = rot
            .diag()
            .iter()
            .map(|z| if z.re < 0.0 && z.re > -1e-12 { 0.0 } else { z.re })
            .collect();
        Distribution::new(self.letters(), n, probs)
    }

    /// Pinched `ρ_{ln}` as a density operator on the original space.
    pub fn pinched(&self, n: usize) -> Result<DensityOperator> {
        let mu = self.measure(n)?;
        let p = self.projector_weights(n, mu.probs())?;
        Ok(DensityOperator::new_unchecked(p.hermitian_part()))
    }

    fn projector_weights(&self, n: usize, w: &[f64]) -> Result<ComplexMatrix> {
        let dim = w.len();
        let mut out = ComplexMatrix::zeros(dim, dim);
        for (idx, &p) in w.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let v = self.basis_vector(idx, n);
            for i in 0..dim {
                if v[i] == ZERO {
                    continue;
                }
                for j in 0..dim {
                    out[(i, j)] += v[i] * v[j].conj() * p;
                }
            }
        }
        Ok(out)
    }

    /// Product eigenbasis vector `|ω⟩` for the letter sequence with index
    /// `omega`.
    pub fn basis_vector(&self, omega: usize, n: usize) -> Vec<C64> {
        let seq = index_to_sequence(omega, self.letters(), n);
        let cols: Vec<Vec<C64>> = seq.iter().map(|&k| self.eigen.vector(k)).collect();
        product_vector(cols.iter().map(Vec::as_slice))
    }

    /// `f⁻¹`: projector onto `span{|ω⟩ : ω ∈ set}`, in the order given.
    pub fn projector(&self, set: &[u64], n: usize) -> Result<Projector> {
        let dim = pow_dim(self.letters(), n, tol::DENSE_CAP)?;
        let basis = set
            .iter()
            .map(|&w| {
                if w as usize >= dim {
                    return Err(Error::IndexOutOfRange {
                        index: w as usize,
                        len: dim,
                    });
                }
                Ok(self.basis_vector(w as usize, n))
            })
            .collect::<Result<Vec<_>>>()?;
        Projector::span(dim, &basis)
    }

    /// `f`: the sequence set of a projector diagonal in the product
    /// eigenbasis. Errors if the projector is not of that form.
    pub fn sequences(&self, p: &Projector, n: usize) -> Result<Vec<u64>> {
        let dim = pow_dim(self.letters(), n, tol::DENSE_CAP)?;
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        let mut set = Vec::new();
        for w in 0..dim {
            let v = self.basis_vector(w, n);
            let pv = p.apply(&v);
            let weight = inner(&v, &pv).re;
            if weight > 1.0 - 1e-8 {
                set.push(w as u64);
            } else if weight > 1e-8 {
                return Err(Error::NotProjector(alloc::format!(
                    "projector is not diagonal in the eigenbasis (weight {weight} on sequence {w})"
                )));
            }
        }
        if set.len() != p.rank() {
            return Err(Error::NotProjector("rank does not match the sequence set".into()));
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::von_neumann_entropy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plus_alphabet() -> QuantumAlphabet {
        let s = fmath::sqrt(0.5);
        QuantumAlphabet::new(vec![
            vec![ONE, ZERO],
            vec![C64::new(s, 0.0), C64::new(s, 0.0)],
        ])
        .unwrap()
    }

    fn markov_source() -> QuantumSource {
        let p = ClassicalProcess::markov(vec![0.9, 0.1, 0.2, 0.8]).unwrap();
        QuantumSource::classically_correlated(p, QuantumAlphabet::computational(2)).unwrap()
    }

    #[test]
    fn iid_marginal() {
        let s = QuantumSource::iid(DensityOperator::diagonal(&[0.9, 0.1]).unwrap());
        let r = s.marginal(2).unwrap();
        let expected = ComplexMatrix::diagonal(&[0.81, 0.09, 0.09, 0.01]);
        assert!(r.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn orthonormal_cc_is_diagonal_classical_marginal() {
        let s = markov_source();
        let mu = ClassicalProcess::markov(vec![0.9, 0.1, 0.2, 0.8]).unwrap().marginal(3).unwrap();
        let r = s.marginal(3).unwrap();
        assert!(r.matrix().max_abs_diff(&ComplexMatrix::diagonal(mu.probs())) < 1e-15);
    }

    #[test]
    fn non_orthogonal_alphabet_marginal() {
        let s = QuantumSource::classically_correlated(
            ClassicalProcess::bernoulli(0.5).unwrap(),
            plus_alphabet(),
        )
        .unwrap();
        let r = s.marginal(1).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[0.75, 0.25], &[0.25, 0.25]]).unwrap();
        assert!(r.matrix().max_abs_diff(&expected) < 1e-15);
        assert!(r.report().unwrap().is_valid());
        let r3 = s.marginal(3).unwrap();
        assert!(r3.report().unwrap().is_valid());
    }

    #[test]
    fn alphabet_validation() {
        let s = 1e-9;
        let nearly = vec![vec![ONE, ZERO], vec![C64::new(fmath::sqrt(1.0 - s * s), 0.0), C64::new(s, 0.0)]];
        assert!(QuantumAlphabet::new(nearly).is_err());
        let long = vec![vec![C64::new(2.0, 0.0), ZERO]];
        assert!(QuantumAlphabet::new(long).is_err());
    }

    #[test]
    fn consistency_and_stationarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let iid = QuantumSource::iid(DensityOperator::diagonal(&[0.7, 0.3]).unwrap());
        assert!(check_consistency(&iid, 2, 1, 5, &mut rng).unwrap() <= 1e-12);
        assert!(check_stationarity(&iid, 2, 1, 5, &mut rng).unwrap() <= 1e-12);
        let mk = markov_source();
        assert!(check_consistency(&mk, 2, 2, 5, &mut rng).unwrap() <= 1e-10);
        assert!(check_stationarity(&mk, 2, 2, 5, &mut rng).unwrap() <= 1e-10);
        let ns = QuantumSource::classically_correlated(
            ClassicalProcess::markov_with_initial(vec![0.9, 0.1, 0.2, 0.8], vec![1.0, 0.0]).unwrap(),
            QuantumAlphabet::computational(2),
        )
        .unwrap();
        assert!(check_stationarity(&ns, 1, 1, 20, &mut rng).unwrap() > 1e-3);
    }

    #[test]
    fn iid_ergodicity_exact() {
        let s = QuantumSource::iid(DensityOperator::diagonal(&[0.6, 0.4]).unwrap());
        let a = ComplexMatrix::diagonal(&[1.0, 0.0]);
        let r = ergodicity_gap(&s, &a, &a, 1, 50).unwrap();
        assert!((r.cesaro - r.product).abs() < 1e-15);
        assert!(r.weak_mixing < 1e-15);
        assert!(r.decay_slope.is_none());
    }

    #[test]
    fn mixture_gap_is_covariance() {
        let p = ClassicalProcess::mixture(
            vec![0.5, 0.5],
            vec![
                ClassicalProcess::bernoulli(0.9).unwrap(),
                ClassicalProcess::bernoulli(0.5).unwrap(),
            ],
        )
        .unwrap();
        let s = QuantumSource::classically_correlated(p, QuantumAlphabet::computational(2)).unwrap();
        let a = ComplexMatrix::diagonal(&[1.0, 0.0]);
        let r = ergodicity_gap(&s, &a, &a, 1, 500).unwrap();
        assert!((r.gap() - 0.25 * 0.4 * 0.4).abs() < 1e-12);
    }

    #[test]
    fn fast_path_matches_dense_terms() {
        let p = ClassicalProcess::markov(vec![0.6, 0.4, 0.3, 0.7]).unwrap();
        let s = QuantumSource::classically_correlated(p, plus_alphabet()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_hermitian(&mut rng, 2);
        let b = random_hermitian(&mut rng, 2);
        let r = ergodicity_gap(&s, &a, &b, 1, 3).unwrap();
        // Dense: term_i = tr(ρ_{1+i}(a ⊗ I^{i−1} ⊗ b)).
        let mut sum = 0.0;
        for i in 1..=3 {
            let rho = s.marginal(1 + i).unwrap();
            let mut op = a.clone();
            for _ in 0..i - 1 {
                op = crate::linalg::tensor_product(&op, &ComplexMatrix::identity(2)).unwrap();
            }
            op = crate::linalg::tensor_product(&op, &b).unwrap();
            sum += rho.expectation(&op).unwrap().re;
        }
        assert!((r.cesaro - sum / 3.0).abs() < 1e-12);
    }

    #[test]
    fn pinching_examples() {
        let id = ComplexMatrix::identity(2);
        let d = ComplexMatrix::diagonal(&[0.3, 0.7]);
        assert_eq!(conditional_expectation(&d, &id).unwrap(), d);
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(conditional_expectation(&x, &id).unwrap().max_abs(), 0.0);
        let bad = ComplexMatrix::diagonal(&[1.0, 2.0]);
        assert!(conditional_expectation(&x, &bad).is_err());
    }

    #[test]
    fn abelian_restriction_examples() {
        let s = QuantumSource::iid(DensityOperator::diagonal(&[0.9, 0.1]).unwrap());
        let ar = abelian_restriction(&s, 1).unwrap();
        let bern = ClassicalProcess::bernoulli(0.9).unwrap().marginal(3).unwrap();
        assert!(ar.process().unwrap().marginal(3).unwrap().max_abs_diff(&bern) < 1e-15);

        let mk = markov_source();
        let ar = abelian_restriction(&mk, 1).unwrap();
        let p = ClassicalProcess::markov(vec![0.9, 0.1, 0.2, 0.8]).unwrap();
        let view = ar.process().unwrap();
        assert!(view.marginal(4).unwrap().max_abs_diff(&p.marginal(4).unwrap()) < 1e-12);
        assert!(ar.measure(4).unwrap().max_abs_diff(&p.marginal(4).unwrap()) < 1e-12);

        let rho = ComplexMatrix::from_real_rows(&[&[0.75, 0.25], &[0.25, 0.25]]).unwrap();
        let s = QuantumSource::iid(DensityOperator::new(rho).unwrap());
        let ar = abelian_restriction(&s, 1).unwrap();
        // Eigenvalues of [[a, b], [b, c]]: (tr ± √((a−c)² + 4b²))/2.
        let lambda = 0.5 * (1.0 + fmath::sqrt(0.25 + 4.0 * 0.0625));
        let mu = ar.measure(3).unwrap();
        let bern = ClassicalProcess::bernoulli(lambda).unwrap().marginal(3).unwrap();
        assert!(mu.max_abs_diff(&bern) < 1e-12);
    }

    #[test]
    fn abelian_entropy_bridge() {
        let s = QuantumSource::classically_correlated(
            ClassicalProcess::markov(vec![0.6, 0.4, 0.3, 0.7]).unwrap(),
            plus_alphabet(),
        )
        .unwrap();
        for l in 1..=3 {
            let ar = abelian_restriction(&s, l).unwrap();
            let h = ar.measure(1).unwrap().entropy();
            let sv = von_neumann_entropy(&s.marginal(l).unwrap()).unwrap();
            assert!((h - sv).abs() < 1e-10, "l={l}: {h} vs {sv}");
        }
    }

    #[test]
    fn projector_set_bijection() {
        let s = QuantumSource::classically_correlated(
            ClassicalProcess::markov(vec![0.6, 0.4, 0.3, 0.7]).unwrap(),
            plus_alphabet(),
        )
        .unwrap();
        let ar = abelian_restriction(&s, 1).unwrap();
        let set = vec![0, 3, 5];
        let p = ar.projector(&set, 3).unwrap();
        assert_eq!(ar.sequences(&p, 3).unwrap(), set);
        let mu = ar.measure(3).unwrap();
        let rho = s.marginal(3).unwrap();
        let pinched = ar.pinched(3).unwrap();
        let phi = p.trace_with(pinched.matrix()).unwrap().re;
        let direct = p.trace_with(rho.matrix()).unwrap().re;
        let sum: f64 = set.iter().map(|&w| mu.probs()[w as usize]).sum();
        assert!((phi - sum).abs() < 1e-12 && (direct - sum).abs() < 1e-12);
    }
}
