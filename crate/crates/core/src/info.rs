//! Entropies, fidelities and compression rates. Logarithms are base 2.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::fmath;
use crate::linalg::{
    hermitian_eig, hermitian_eigenvalues, inner, sqrtm_psd, ComplexMatrix, DensityOperator, C64,
    ZERO,
};
use crate::process::entropy_bits;
use crate::source::QuantumSource;

/// `S(ρ) = −Σ λ log₂ λ`; eigenvalues in the PSD drift band are clamped to 0.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    let ev = rho.eigenvalues()?;
    Ok(spectrum_entropy(&ev))
}

fn spectrum_entropy(ev: &[f64]) -> f64 {
    ev.iter().map(|&l| -fmath::xlog2x(l.max(0.0))).sum::<f64>().max(0.0)
}

/// Mean-entropy samples `S(ρ_n)/n`.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyRateEstimate {
    /// `(n, S(ρ_n)/n)` in the order requested.
    pub values: Vec<(usize, f64)>,
    /// `S(ρ_n) − S(ρ_{n−1})` at the largest `n` when both are sampled,
    /// otherwise the last `S(ρ_n)/n`.
    pub extrapolated: f64,
    pub analytic: Option<f64>,
}

/// `S(ρ_n)` for the source, through the diagonal fast path when available.
pub fn marginal_entropy(s: &QuantumSource, n: usize) -> Result<f64> {
    if s.is_diagonal() {
        if let Ok(Some(diag)) = s.diagonal_marginal(n) {
            return Ok(entropy_bits(&diag).max(0.0));
        }
    }
    von_neumann_entropy(&s.marginal(n)?)
}

pub fn mean_entropy(s: &QuantumSource, n_list: &[usize]) -> Result<EntropyRateEstimate> {
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(invalid("need a nonempty list of positive lengths"));
    }
    let mut totals = Vec::with_capacity(n_list.len());
    for &n in n_list {
        totals.push((n, marginal_entropy(s, n)?));
    }
    let &(nmax, smax) = totals.iter().max_by_key(|(n, _)| *n).unwrap_or(&totals[0]);
    let extrapolated = match totals.iter().find(|(n, _)| *n + 1 == nmax) {
        Some(&(_, prev)) => smax - prev,
        None if nmax == 1 => smax,
        None => smax / nmax as f64,
    };
    Ok(EntropyRateEstimate {
        values: totals.iter().map(|&(n, v)| (n, v / n as f64)).collect(),
        extrapolated,
        analytic: s.analytic_entropy_rate(),
    })
}

/// `F(φ, σ) = tr √(√φ σ √φ)`, clamped to `[0, 1]`.
pub fn fidelity(phi: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if phi.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            found: sigma.dim(),
        });
    }
    let r = sqrtm_psd(phi.matrix())?;
    let inner_op = r.matmul(sigma.matrix())?.matmul(&r)?.hermitian_part();
    let ev = hermitian_eigenvalues(&inner_op)?;
    let f: f64 = ev.iter().map(|&l| fmath::sqrt(l.max(0.0))).sum();
    Ok(f.clamp(0.0, 1.0))
}

fn check_kraus(dim: usize, kraus: &[ComplexMatrix]) -> Result<()> {
    if kraus.is_empty() {
        return Err(invalid("channel needs at least one Kraus operator"));
    }
    for k in kraus {
        if k.rows() != dim || k.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: k.rows(),
            });
        }
    }
    Ok(())
}

/// `F_e(ρ, E) = Σ_i |tr(A_i ρ)|²` for Kraus operators `A_i` acting on the
/// whole space of `ρ`.
pub fn entanglement_fidelity(rho: &DensityOperator, kraus: &[ComplexMatrix]) -> Result<f64> {
    check_kraus(rho.dim(), kraus)?;
    let mut f = 0.0;
    for a in kraus {
        f += a.trace_product(rho.matrix())?.norm_sqr();
    }
    Ok(f.clamp(0.0, 1.0))
}

/// `F_e` through a purification `|Θ⟩` of `ρ`: `F(|Θ⟩⟨Θ|, σ)²` with
/// `σ = (E ⊗ I)(|Θ⟩⟨Θ|)`.
/// Squares the dimension; intended for cross-checks on small systems.
pub fn entanglement_fidelity_purified(
    rho: &DensityOperator,
    kraus: &[ComplexMatrix],
) -> Result<f64> {
    let d = rho.dim();
    check_kraus(d, kraus)?;
    let eig = hermitian_eig(rho.matrix())?;
    // |Θ⟩ = Σ_k √λ_k |e_k⟩ ⊗ |k⟩
    let mut theta = vec![ZERO; d * d];
    for k in 0..d {
        let w = fmath::sqrt(eig.values[k].max(0.0));
        let e = eig.vector(k);
        for i in 0..d {
            theta[i * d + k] = e[i] * w;
        }
    }
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for a in kraus {
        // (A ⊗ I)|Θ⟩
        let mut v = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                let aij = a[(i, j)];
                if aij == ZERO {
                    continue;
                }
                for k in 0..d {
                    v[i * d + k] += aij * theta[j * d + k];
                }
            }
        }
        out.add_assign_scaled(&ComplexMatrix::outer(&v, &v), C64::new(1.0, 0.0));
    }
    // The reference is pure, so F² = ⟨Θ|σ|Θ⟩.
    Ok(inner(&theta, &out.apply(&theta)?).re.clamp(0.0, 1.0))
}

/// `(1/n) log₂ dim`.
pub fn compression_rate(n: usize, compressed_dim: u128) -> Result<f64> {
    if n == 0 || compressed_dim == 0 {
        return Err(invalid("compression rate needs n ≥ 1 and dimension ≥ 1"));
    }
    Ok(fmath::log2(compressed_dim as f64) / n as f64)
}

/// Whether `S(ρ_n)/n` is non-increasing within `slack` along the samples.
pub fn is_non_increasing(values: &[(usize, f64)], slack: f64) -> bool {
    let mut v = values.to_vec();
    v.sort_by_key(|p| p.0);
    v.windows(2).all(|w| w[1].1 <= w[0].1 + slack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::KrausChannel;
    use crate::linalg::random::{random_density, random_kraus};
    use crate::linalg::ONE;
    use crate::process::ClassicalProcess;
    use crate::source::QuantumAlphabet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn h2(p: f64) -> f64 {
        -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
    }

    #[test]
    fn entropy_examples() {
        assert!((von_neumann_entropy(&DensityOperator::maximally_mixed(2)).unwrap() - 1.0).abs() < 1e-14);
        let pure = DensityOperator::pure(&[ONE, ONE]).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);
        let r = DensityOperator::diagonal(&[0.9, 0.1]).unwrap();
        assert!((von_neumann_entropy(&r).unwrap() - h2(0.9)).abs() < 1e-14);
        assert!((h2(0.9) - 0.46900).abs() < 5e-6);
    }

    #[test]
    fn mean_entropy_iid_and_markov() {
        let s = QuantumSource::iid(DensityOperator::diagonal(&[0.9, 0.1]).unwrap());
        let est = mean_entropy(&s, &[1, 2, 3, 4, 5]).unwrap();
        for &(_, v) in &est.values {
            assert!((v - h2(0.9)).abs() < 1e-12);
        }
        assert!((est.analytic.unwrap() - h2(0.9)).abs() < 1e-14);

        let p = ClassicalProcess::markov(vec![0.9, 0.1, 0.2, 0.8]).unwrap();
        let s = QuantumSource::classically_correlated(p.clone(), QuantumAlphabet::computational(2))
            .unwrap();
        let ns: Vec<usize> = (1..=8).collect();
        let est = mean_entropy(&s, &ns).unwrap();
        for &(n, v) in &est.values {
            assert!((v - p.marginal(n).unwrap().entropy() / n as f64).abs() < 1e-12);
        }
        assert!(is_non_increasing(&est.values, 1e-9));
        assert!((est.extrapolated - 0.5533064).abs() < 1e-6);

        let pure = QuantumSource::iid(DensityOperator::pure(&[ONE, ZERO]).unwrap());
        assert!(mean_entropy(&pure, &[1, 3]).unwrap().values.iter().all(|v| v.1 == 0.0));
    }

    #[test]
    fn fidelity_examples() {
        let r = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
        assert!((fidelity(&r, &r).unwrap() - 1.0).abs() < 1e-12);
        let z = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
        let o = DensityOperator::diagonal(&[0.0, 1.0]).unwrap();
        assert!(fidelity(&z, &o).unwrap().abs() < 1e-12);
        let m = DensityOperator::maximally_mixed(2);
        assert!((fidelity(&m, &z).unwrap() - fmath::sqrt(0.5)).abs() < 1e-9);
        assert!((fidelity(&z, &m).unwrap() - fmath::sqrt(0.5)).abs() < 1e-9);
    }

    #[test]
    fn entanglement_fidelity_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for t in 0..100 {
            let d = if t % 2 == 0 { 2 } else { 4 };
            let rho = random_density(&mut rng, d);
            let kraus = random_kraus(&mut rng, d, 1 + t % 3);
            let a = entanglement_fidelity(&rho, &kraus).unwrap();
            let b = entanglement_fidelity_purified(&rho, &kraus).unwrap();
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            let ch = KrausChannel::new(d, kraus).unwrap();
            let out = ch.apply_to_operator(rho.matrix(), 1).unwrap();
            let f = fidelity(&rho, &DensityOperator::new_unchecked(out.hermitian_part())).unwrap();
            assert!(a <= f + 1e-9);
        }
    }

    #[test]
    fn entanglement_fidelity_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_density(&mut rng, 4);
        let id = [ComplexMatrix::identity(4)];
        assert!((entanglement_fidelity(&rho, &id).unwrap() - 1.0).abs() < 1e-12);
        let psi = crate::linalg::random::random_state(&mut rng, 2);
        let pure = DensityOperator::pure(&psi).unwrap();
        let ch = KrausChannel::amplitude_damping(0.3).unwrap();
        let out = ch.apply_to_operator(pure.matrix(), 1).unwrap();
        let direct = inner(&psi, &out.apply(&psi).unwrap()).re;
        assert!((entanglement_fidelity(&pure, ch.kraus()).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn rates() {
        assert_eq!(compression_rate(4, 16).unwrap(), 1.0);
        assert_eq!(compression_rate(4, 1).unwrap(), 0.0);
        assert!((compression_rate(10, 128).unwrap() - 0.7).abs() < 1e-15);
        assert!(compression_rate(0, 1).is_err());
    }
}
