//! Kraus channels acting site by site on `d`-level chains.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::fmath;
use crate::linalg::{
    apply_local_map, hermitian_eigenvalues, num_sites, tensor_product, ComplexMatrix,
    DensityOperator, C64, ONE, ZERO,
};
use crate::source::{ErgodicityReport, QuantumSource};
use crate::tol;

/// Completely positive map `ρ ↦ Σ A_i ρ A_i†` on one site.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    d: usize,
    kraus: Vec<ComplexMatrix>,
}

/// Deviations of a Kraus family from a trace-preserving CP map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelReport {
    /// `max |(Σ A†A − I)_ij|`.
    pub completeness_deviation: f64,
    pub min_choi_eigenvalue: f64,
}

impl ChannelReport {
    pub fn is_valid(&self) -> bool {
        self.completeness_deviation <= tol::HERMITIAN && self.min_choi_eigenvalue >= tol::PSD_FLOOR
    }
}

fn pauli(which: u8) -> ComplexMatrix {
    let (o, z, i) = (ONE, ZERO, C64::new(0.0, 1.0));
    let data = match which {
        b'x' => vec![z, o, o, z],
        b'y' => vec![z, -i, i, z],
        _ => vec![o, z, z, -o],
    };
    ComplexMatrix::from_vec(2, 2, data).expect("2x2")
}

fn check_parameter(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(alloc::format!("{name} parameter {p} outside [0, 1]")));
    }
    Ok(())
}

impl KrausChannel {
    /// Wraps a Kraus family after shape checks only; use [`Self::validate`]
    /// or [`Self::checked`] to test complete positivity and trace
    /// preservation.
    pub fn new(d: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if d == 0 || kraus.is_empty() {
            return Err(invalid("channel needs a positive dimension and at least one operator"));
        }
        if let Some(bad) = kraus.iter().find(|k| k.rows() != d || k.cols() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.rows().max(bad.cols()),
            });
        }
        Ok(Self { d, kraus })
    }

    /// Like [`Self::new`] but rejects families that are not valid channels.
    pub fn checked(d: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let c = Self::new(d, kraus)?;
        let r = c.validate()?;
        if !r.is_valid() {
            return Err(invalid(alloc::format!(
                "not a channel: completeness deviation {:e}, minimum Choi eigenvalue {:e}",
                r.completeness_deviation,
                r.min_choi_eigenvalue
            )));
        }
        Ok(c)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            d,
            kraus: vec![ComplexMatrix::identity(d)],
        }
    }

    /// `{√(1−3p/4) I, √(p/4) X, √(p/4) Y, √(p/4) Z}`; `p = 1` maps every
    /// state to `I/2`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        check_parameter("depolarizing", p)?;
        let a = fmath::sqrt(1.0 - 0.75 * p);
        let b = fmath::sqrt(0.25 * p);
        Ok(Self {
            d: 2,
            kraus: vec![
                ComplexMatrix::identity(2).scale_real(a),
                pauli(b'x').scale_real(b),
                pauli(b'y').scale_real(b),
                pauli(b'z').scale_real(b),
            ],
        })
    }

    /// `{√(1−p/2) I, √(p/2) Z}`; `p = 1` removes all coherences.
    pub fn dephasing(p: f64) -> Result<Self> {
        check_parameter("dephasing", p)?;
        Ok(Self {
            d: 2,
            kraus: vec![
                ComplexMatrix::identity(2).scale_real(fmath::sqrt(1.0 - 0.5 * p)),
                pauli(b'z').scale_real(fmath::sqrt(0.5 * p)),
            ],
        })
    }

    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        check_parameter("amplitude damping", gamma)?;
        let k0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, fmath::sqrt(1.0 - gamma)]])?;
        let k1 = ComplexMatrix::from_real_rows(&[&[0.0, fmath::sqrt(gamma)], &[0.0, 0.0]])?;
        Ok(Self {
            d: 2,
            kraus: vec![k0, k1],
        })
    }

    #[inline]
    pub fn site_dim(&self) -> usize {
        self.d
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Choi matrix `Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.
    pub fn choi_matrix(&self) -> ComplexMatrix {
        let d = self.d;
        let mut choi = ComplexMatrix::zeros(d * d, d * d);
        for a in &self.kraus {
            // Column vector Σ_i |i⟩ ⊗ A|i⟩, summed as an outer product.
            let v: Vec<C64> = (0..d)
                .flat_map(|i| (0..d).map(move |r| (i, r)))
                .map(|(i, r)| a[(r, i)])
                .collect();
            let outer = ComplexMatrix::outer(&v, &v);
            choi = choi.add(&outer).expect("same shape");
        }
        choi
    }

    pub fn validate(&self) -> Result<ChannelReport> {
        let mut sum = ComplexMatrix::zeros(self.d, self.d);
        for a in &self.kraus {
            sum = sum.add(&a.adjoint_matmul(a)?)?;
        }
        let completeness_deviation = sum.max_abs_diff(&ComplexMatrix::identity(self.d));
        let min_choi_eigenvalue = hermitian_eigenvalues(&self.choi_matrix().hermitian_part())?
            .last()
            .copied()
            .unwrap_or(0.0);
        Ok(ChannelReport {
            completeness_deviation,
            min_choi_eigenvalue,
        })
    }

    /// `E^{⊗m}` on an operator over `m` sites, one site at a time.
    pub fn apply_to_operator(&self, x: &ComplexMatrix, m: usize) -> Result<ComplexMatrix> {
        let order: Vec<usize> = (0..m).collect();
        self.apply_in_order(x, m, &order)
    }

    /// `E^{⊗m}` with the single-site maps applied in the given site order.
    pub fn apply_in_order(&self, x: &ComplexMatrix, m: usize, order: &[usize]) -> Result<ComplexMatrix> {
        self.check_sites(x, m)?;
        let mut seen = vec![false; m];
        for &s in order {
            if s >= m {
                return Err(Error::IndexOutOfRange { index: s, len: m });
            }
            if core::mem::replace(&mut seen[s], true) {
                return Err(invalid("site order repeats a site"));
            }
        }
        if seen.iter().any(|&v| !v) {
            return Err(invalid("site order must cover every site"));
        }
        let mut out = x.clone();
        for &s in order {
            out = apply_local_map(&out, self.d, s, &self.kraus);
        }
        Ok(out)
    }

    pub fn apply_tensor_power(&self, rho: &DensityOperator, m: usize) -> Result<DensityOperator> {
        let out = self.apply_to_operator(rho.matrix(), m)?;
        Ok(DensityOperator::new_unchecked(out.hermitian_part()))
    }

    /// Literal multi-index sum `Σ (A_{i1}⊗…⊗A_{im}) x (…)†`, exponential in
    /// `m`; kept as an independent reference for the site-wise path.
    pub fn apply_tensor_power_literal(&self, x: &ComplexMatrix, m: usize) -> Result<ComplexMatrix> {
        self.check_sites(x, m)?;
        let k = self.kraus.len();
        let terms = crate::linalg::pow_dim(k, m, tol::DENSE_CAP)?;
        let dim = x.rows();
        let mut out = ComplexMatrix::zeros(dim, dim);
        for t in 0..terms {
            let mut op = ComplexMatrix::identity(1);
            let mut rest = t;
            let mut idx = vec![0; m];
            for slot in idx.iter_mut().rev() {
                *slot = rest % k;
                rest /= k;
            }
            for &i in &idx {
                op = tensor_product(&op, &self.kraus[i])?;
            }
            let term = op.matmul(x)?.matmul(&op.adjoint())?;
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// `ã = Σ (A†)^{⊗m} a A^{⊗m}`, so that `tr(E^{⊗m}(ρ) a) = tr(ρ ã)`.
    pub fn heisenberg_dual(&self, a: &ComplexMatrix, m: usize) -> Result<ComplexMatrix> {
        self.check_sites(a, m)?;
        let adj: Vec<ComplexMatrix> = self.kraus.iter().map(ComplexMatrix::adjoint).collect();
        let mut out = a.clone();
        for s in 0..m {
            out = apply_local_map(&out, self.d, s, &adj);
        }
        Ok(out)
    }

    fn check_sites(&self, x: &ComplexMatrix, m: usize) -> Result<()> {
        let dim = crate::linalg::pow_dim(self.d, m, tol::DIM_CAP)?;
        if !x.is_square() || x.rows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: x.rows(),
            });
        }
        debug_assert_eq!(num_sites(dim, self.d).ok(), (self.d > 1).then_some(m));
        Ok(())
    }
}

/// Consistency, stationarity and ergodicity diagnostics of the image of a
/// source under a channel tensor power.
#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    /// Largest consistency deviation over `m + i ≤ m_max`.
    pub consistency: f64,
    /// Largest stationarity deviation over `m + i ≤ m_max`.
    pub stationarity: f64,
    /// Ergodicity diagnostics for the observables `a`, `b` on one site each.
    pub ergodicity: ErgodicityReport,
}

/// Runs the source checks on `ChannelTransformed(s, c)`.
///
/// The ergodicity sum uses `a = b = |0⟩⟨0|` on one site and is evaluated on
/// the original source through Heisenberg duals, which keeps `N` in the
/// thousands affordable.
pub fn verify_invariance<R: Rng + ?Sized>(
    s: &QuantumSource,
    c: &KrausChannel,
    m_max: usize,
    big_n: usize,
    trials: usize,
    rng: &mut R,
) -> Result<InvarianceReport> {
    let t = QuantumSource::channel_transformed(s.clone(), c.clone())?;
    let mut consistency: f64 = 0.0;
    let mut stationarity: f64 = 0.0;
    for total in 2..=m_max {
        for m in 1..total {
            let i = total - m;
            consistency = consistency.max(crate::source::check_consistency(&t, m, i, trials, rng)?);
            stationarity =
                stationarity.max(crate::source::check_stationarity(&t, m, i, trials, rng)?);
        }
    }
    let mut a = ComplexMatrix::zeros(t.site_dim(), t.site_dim());
    a[(0, 0)] = ONE;
    let ergodicity = crate::source::ergodicity_gap(&t, &a, &a, 1, big_n)?;
    Ok(InvarianceReport {
        consistency,
        stationarity,
        ergodicity,
    })
}
