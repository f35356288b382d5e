//! The two compression schemes built on a projector `p`.
//!
//! `C1` keeps `pρp` and sends the rejected weight to a flag vector `|f⟩` in
//! the range of `p`; it is a channel with Kraus operators `p` and
//! `|f⟩⟨e_i|` for an orthonormal basis `e_i` of the complement. `C2`
//! postselects: `pρp / tr(pρp)`, which is not linear in `ρ`. Decompression is
//! the identity on the range of `p` in both cases.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::linalg::{ComplexMatrix, DensityOperator, Projector, SpanBuilder, C64, ZERO};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeVariant {
    C1,
    C2,
}

/// Measure-and-flag scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct C1Scheme {
    p: Projector,
    flag: Vec<C64>,
}

impl C1Scheme {
    /// Flags with the first vector of the range basis of `p`.
    pub fn new(p: Projector) -> Result<Self> {
        let flag = default_flag(&p)?.to_vec();
        Ok(Self { p, flag })
    }

    /// Uses the normalized `flag`, which must lie in the range of `p`.
    pub fn with_flag(p: Projector, flag: &[C64]) -> Result<Self> {
        if flag.len() != p.dim() {
            return Err(Error::DimensionMismatch {
                expected: p.dim(),
                found: flag.len(),
            });
        }
        let n = crate::linalg::norm(flag);
        if n == 0.0 {
            return Err(invalid("flag vector is zero"));
        }
        let flag: Vec<C64> = flag.iter().map(|z| z / n).collect();
        let res = p.residual(&flag);
        if res > tol::PROJECTOR_LEQ {
            return Err(invalid(alloc::format!(
                "flag vector lies outside the range of the projector (residual {res:e})"
            )));
        }
        Ok(Self { p, flag })
    }

    pub fn projector(&self) -> &Projector {
        &self.p
    }

    pub fn flag(&self) -> &[C64] {
        &self.flag
    }

    /// `{p} ∪ {|f⟩⟨e_i|}` as dense matrices.
    pub fn kraus(&self) -> Result<Vec<ComplexMatrix>> {
        let dim = self.p.dim();
        let mut b = SpanBuilder::from_projector(&self.p);
        let keep = b.rank();
        for i in 0..dim {
            if b.is_full() {
                break;
            }
            let mut e = alloc::vec![ZERO; dim];
            e[i] = C64::new(1.0, 0.0);
            b.push(&e)?;
        }
        let mut out = Vec::with_capacity(1 + dim - keep);
        out.push(self.p.matrix());
        for e in &b.basis()[keep..] {
            out.push(ComplexMatrix::outer(&self.flag, e));
        }
        Ok(out)
    }

    /// `pρp + tr((I − p)ρ) |f⟩⟨f|`.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_dim(rho.dim())?;
        let pm = self.p.matrix();
        let kept = pm.matmul(rho.matrix())?.matmul(&pm)?;
        let rejected = 1.0 - kept.trace().re;
        let mut out = kept;
        out.add_assign_scaled(&ComplexMatrix::outer(&self.flag, &self.flag), C64::new(rejected, 0.0));
        Ok(DensityOperator::new_unchecked(out.hermitian_part()))
    }

    /// `F_e = tr(pρ)² + Σ_i |⟨e_i|ρ|f⟩|² = tr(pρ)² + ‖(I − p)ρ|f⟩‖²`.
    pub fn entanglement_fidelity(&self, rho: &DensityOperator) -> Result<f64> {
        c1_fidelity(&self.p, &self.flag, rho)
    }

    /// As [`Self::entanglement_fidelity`] for `ρ = diag(probs)`.
    pub fn entanglement_fidelity_diagonal(&self, probs: &[f64]) -> Result<f64> {
        c1_fidelity_diagonal(&self.p, &self.flag, probs)
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        check_dim(&self.p, dim)
    }
}

fn check_dim(p: &Projector, dim: usize) -> Result<()> {
    if dim != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: dim,
        });
    }
    Ok(())
}

fn default_flag(p: &Projector) -> Result<&[C64]> {
    p.basis()
        .first()
        .map(Vec::as_slice)
        .ok_or_else(|| invalid("C1 needs a projector of rank at least 1"))
}

fn c1_fidelity(p: &Projector, flag: &[C64], rho: &DensityOperator) -> Result<f64> {
    check_dim(p, rho.dim())?;
    let accept = p.trace_with(rho.matrix())?.re;
    let leak = p.residual(&rho.matrix().apply(flag)?);
    Ok((accept * accept + leak * leak).clamp(0.0, 1.0))
}

fn c1_fidelity_diagonal(p: &Projector, flag: &[C64], probs: &[f64]) -> Result<f64> {
    check_dim(p, probs.len())?;
    let accept = diagonal_acceptance(p, probs);
    let rf: Vec<C64> = flag.iter().zip(probs).map(|(z, &q)| z * q).collect();
    let leak = p.residual(&rf);
    Ok((accept * accept + leak * leak).clamp(0.0, 1.0))
}

/// `C1` entanglement fidelity with the default flag, without taking
/// ownership of `p`.
pub fn c1_entanglement_fidelity(p: &Projector, rho: &DensityOperator) -> Result<f64> {
    c1_fidelity(p, default_flag(p)?, rho)
}

pub fn c1_entanglement_fidelity_diagonal(p: &Projector, probs: &[f64]) -> Result<f64> {
    c1_fidelity_diagonal(p, default_flag(p)?, probs)
}

/// `tr(p · diag(probs))`.
pub fn diagonal_acceptance(p: &Projector, probs: &[f64]) -> f64 {
    p.basis()
        .iter()
        .map(|b| b.iter().zip(probs).map(|(z, q)| z.norm_sqr() * q).sum::<f64>())
        .sum()
}

/// Output state and entanglement fidelity of `C1` with the default flag.
pub fn compress_c1(p: &Projector, rho: &DensityOperator) -> Result<(DensityOperator, f64)> {
    let s = C1Scheme::new(p.clone())?;
    Ok((s.apply(rho)?, s.entanglement_fidelity(rho)?))
}

fn check_overlap(accept: f64) -> Result<()> {
    if accept <= 1e-12 {
        return Err(Error::ZeroOverlap(accept));
    }
    Ok(())
}

/// `pρp / tr(pρp)`.
pub fn compress_c2(p: &Projector, rho: &DensityOperator) -> Result<DensityOperator> {
    check_dim(p, rho.dim())?;
    let pm = p.matrix();
    let kept = pm.matmul(rho.matrix())?.matmul(&pm)?;
    let t = kept.trace().re;
    check_overlap(t)?;
    Ok(DensityOperator::new_unchecked(kept.scale_real(1.0 / t).hermitian_part()))
}

/// Entanglement fidelity of the postselected map at `ρ`: the single Kraus
/// operator `p / √tr(pρ)` gives `tr(pρ)² / tr(pρ) = tr(pρ)`.
pub fn c2_entanglement_fidelity(p: &Projector, rho: &DensityOperator) -> Result<f64> {
    let t = p.trace_with(rho.matrix())?.re;
    check_overlap(t)?;
    Ok(t.clamp(0.0, 1.0))
}

pub fn c2_entanglement_fidelity_diagonal(p: &Projector, probs: &[f64]) -> Result<f64> {
    check_dim(p, probs.len())?;
    let t = diagonal_acceptance(p, probs);
    check_overlap(t)?;
    Ok(t.clamp(0.0, 1.0))
}

/// Largest entry of `Σ_i A_i† A_i − I`.
pub fn completeness_deviation(kraus: &[ComplexMatrix]) -> Result<f64> {
    let dim = kraus.first().map_or(0, ComplexMatrix::rows);
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for a in kraus {
        sum.add_assign_scaled(&a.adjoint_matmul(a)?, C64::new(1.0, 0.0));
    }
    Ok(sum.max_abs_diff(&ComplexMatrix::identity(dim)))
}
