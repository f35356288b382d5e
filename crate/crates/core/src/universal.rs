//! Source-independent projectors `q_r^(m)`: the block schedule, code
//! projectors, unitary-orbit joins and their assembly.
//!
//! With `D = d^l` the orbit join of a projector `p` on `(C^D)^{⊗n}` is the
//! smallest projector `w ≥ U^{⊗n} p U^{†⊗n}` for every `U ∈ U(D)`. Its range
//! is the `U(D)`-module generated by `range(p)`, which is also the module
//! generated under the Lie algebra action `X ↦ Σ_k X_k`. The default method
//! closes `range(p)` under the elementary generators `E_ab`, one weight
//! space at a time, which is exact up to the span rank threshold. Randomized
//! Haar saturation is available as an alternative. Both are checked
//! afterwards on fresh Haar samples.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::code::{build_code, BlockCode};
use crate::error::{invalid, Error, Result};
use crate::fmath;
use crate::linalg::random::{gaussian_complex, haar_unitary};
use crate::linalg::{
    apply_local_vector, norm, pow_dim, ComplexMatrix, Projector, SpanBuilder, C64, ZERO,
};
use crate::process::index_to_sequence;
use crate::source::{product_vector, QuantumSource};
use crate::tol;

/// Block length `l_m = 2^{i_m}`, block count `n_m` and block rate `R_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub m: usize,
    pub d: usize,
    pub r: f64,
    pub i: u32,
    pub l: usize,
    pub n: usize,
    pub big_r: f64,
    /// Set when `(l, n, R)` were given explicitly rather than derived.
    pub overridden: bool,
}

impl Schedule {
    /// Sites not covered by blocks, `m − l·n`.
    pub fn pad(&self) -> usize {
        self.m - self.l * self.n
    }
}

/// `2^i · d^{3·2^i}`, or `None` past `u128`.
pub fn level_floor(i: u32, d: u128) -> Option<u128> {
    let l = 1u128.checked_shl(i)?;
    let e = u32::try_from(3u128.checked_mul(l)?).ok()?;
    l.checked_mul(d.checked_pow(e)?)
}

/// The unique `i` with `2^i d^{3·2^i} ≤ m < 2^{i+1} d^{3·2^{i+1}}`, or `None`
/// when `m < d³`.
pub fn schedule_level(m: u128, d: u128) -> Option<u32> {
    if d < 2 || m < level_floor(0, d)? {
        return None;
    }
    let mut i = 0;
    loop {
        match level_floor(i + 1, d) {
            Some(next) if next <= m => i += 1,
            _ => return Some(i),
        }
    }
}

pub fn schedule(m: usize, d: usize, r: f64) -> Result<Schedule> {
    check_rate(d, r)?;
    let i = schedule_level(m as u128, d as u128).ok_or_else(|| {
        invalid(alloc::format!(
            "m = {m} is below the smallest admissible length d³ = {}",
            (d as u128).saturating_pow(3)
        ))
    })?;
    let l = 1usize << i;
    Ok(Schedule {
        m,
        d,
        r,
        i,
        l,
        n: m / l,
        big_r: l as f64 * r,
        overridden: false,
    })
}

/// Explicit `(l, n, R)` for sizes the paper schedule cannot reach.
pub fn override_schedule(m: usize, d: usize, r: f64, l: usize, n: usize, big_r: f64) -> Result<Schedule> {
    check_rate(d, r)?;
    if l == 0 || n == 0 || l.checked_mul(n).is_none_or(|ln| ln > m) {
        return Err(invalid(alloc::format!("override needs l, n ≥ 1 and l·n ≤ m (l={l}, n={n}, m={m})")));
    }
    if !(big_r > 0.0) || big_r > l as f64 * fmath::log2(d as f64) + 1e-12 {
        return Err(invalid(alloc::format!("block rate {big_r} outside (0, l·log₂ d]")));
    }
    Ok(Schedule {
        m,
        d,
        r,
        i: l.trailing_zeros(),
        l,
        n,
        big_r,
        overridden: true,
    })
}

fn check_rate(d: usize, r: f64) -> Result<()> {
    if d < 2 {
        return Err(invalid("site dimension must be at least 2"));
    }
    if !(r > 0.0) || r > fmath::log2(d as f64) + 1e-12 {
        return Err(invalid(alloc::format!("rate {r} outside (0, log₂ d]")));
    }
    Ok(())
}

/// Projector onto `span{|ω⟩ : ω ∈ code}` where `|ω⟩` is the product of the
/// columns of `block_basis` (computational basis when `None`).
pub fn code_projector(code: &BlockCode, block_basis: Option<&ComplexMatrix>) -> Result<Projector> {
    let big_d = code.alphabet_size();
    let n = code.len();
    let dim = pow_dim(big_d, n, tol::DIM_CAP)?;
    let members = code
        .members()
        .ok_or_else(|| invalid("code projectors need an explicitly enumerated code"))?;
    match block_basis {
        None => {
            let idx: Vec<usize> = members.iter().map(|&w| w as usize).collect();
            Projector::diagonal(dim, &idx)
        }
        Some(v) => {
            if v.rows() != big_d || !v.is_square() {
                return Err(Error::DimensionMismatch {
                    expected: big_d,
                    found: v.rows(),
                });
            }
            let cols = v.columns();
            let vectors: Vec<Vec<C64>> = members
                .iter()
                .map(|&w| {
                    let seq = index_to_sequence(w as usize, big_d, n);
                    product_vector(seq.iter().map(|&k| cols[k].as_slice()))
                })
                .collect();
            Projector::span(dim, &vectors)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum JoinMethod {
    /// Exact closure under the Lie algebra generators.
    LieClosure,
    /// Adjoin `U^{⊗n} range(p)` for Haar samples until the rank is stable
    /// for `budget` consecutive samples.
    HaarSaturation { budget: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JoinOptions {
    pub method: JoinMethod,
    /// Bound on the sampled `‖(I − w) U^{⊗n} v‖` over unit `v ∈ range(p)`.
    pub tolerance: f64,
    /// Fresh Haar unitaries used for the invariance check.
    pub verify_samples: usize,
}

impl Default for JoinOptions {
    fn default() -> Self {
        Self {
            method: JoinMethod::LieClosure,
            tolerance: 1e-6,
            verify_samples: 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JoinReport {
    pub rank: usize,
    /// Haar samples drawn during saturation (0 for the Lie closure).
    pub samples: usize,
    pub invariance_deviation: f64,
}

/// Orbit join of `p` on `(C^{d^l})^{⊗n}`.
pub fn orbit_join<R: Rng + ?Sized>(
    p: &Projector,
    d: usize,
    l: usize,
    n: usize,
    opts: &JoinOptions,
    rng: &mut R,
) -> Result<(Projector, JoinReport)> {
    let big_d = pow_dim(d, l, tol::DIM_CAP)?;
    let dim = pow_dim(big_d, n, tol::DIM_CAP)?;
    if p.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: p.dim(),
        });
    }
    let (w, samples) = if p.rank() == 0 || p.rank() == dim {
        (p.clone(), 0)
    } else {
        match opts.method {
            JoinMethod::LieClosure => (lie_closure(p, big_d, n)?, 0),
            JoinMethod::HaarSaturation { budget } => haar_saturation(p, big_d, n, budget, rng)?,
        }
    };
    let dev = invariance_deviation(p, &w, big_d, n, opts.verify_samples, rng)?;
    if dev > opts.tolerance {
        return Err(Error::InvarianceViolated(dev));
    }
    let report = JoinReport {
        rank: w.rank(),
        samples,
        invariance_deviation: dev,
    };
    Ok((w, report))
}

// Computational basis indices grouped by letter counts.
struct Weights {
    big_d: usize,
    n: usize,
    block_of: Vec<usize>,
    pos: Vec<usize>,
    coords: Vec<Vec<usize>>,
    counts: Vec<Vec<u16>>,
    by_counts: BTreeMap<Vec<u16>, usize>,
}

impl Weights {
    fn new(big_d: usize, n: usize, dim: usize) -> Self {
        let mut w = Weights {
            big_d,
            n,
            block_of: vec![0; dim],
            pos: vec![0; dim],
            coords: Vec::new(),
            counts: Vec::new(),
            by_counts: BTreeMap::new(),
        };
        for x in 0..dim {
            let mut c = vec![0u16; big_d];
            let mut y = x;
            for _ in 0..n {
                c[y % big_d] += 1;
                y /= big_d;
            }
            let next = w.coords.len();
            let b = *w.by_counts.entry(c.clone()).or_insert(next);
            if b == next {
                w.coords.push(Vec::new());
                w.counts.push(c);
            }
            w.block_of[x] = b;
            w.pos[x] = w.coords[b].len();
            w.coords[b].push(x);
        }
        w
    }

    // E_ab = Σ_k |a⟩⟨b|_k applied to a compact vector of block `blk`.
    fn raise(&self, blk: usize, v: &[C64], a: usize, b: usize) -> (usize, Vec<C64>) {
        let mut c = self.counts[blk].clone();
        c[b] -= 1;
        c[a] += 1;
        let target = self.by_counts[&c];
        let mut out = vec![ZERO; self.coords[target].len()];
        for (j, &x) in self.coords[blk].iter().enumerate() {
            let z = v[j];
            if z == ZERO {
                continue;
            }
            let mut stride = 1;
            let mut y = x;
            for _ in 0..self.n {
                if y % self.big_d == b {
                    let xp = x + a * stride - b * stride;
                    out[self.pos[xp]] += z;
                }
                y /= self.big_d;
                stride *= self.big_d;
            }
        }
        (target, out)
    }
}

fn lie_closure(p: &Projector, big_d: usize, n: usize) -> Result<Projector> {
    let dim = p.dim();
    let wts = Weights::new(big_d, n, dim);
    let mut builders: Vec<SpanBuilder> = wts.coords.iter().map(|c| SpanBuilder::new(c.len())).collect();
    let mut queue = VecDeque::new();
    for v in p.basis() {
        for (blk, coords) in wts.coords.iter().enumerate() {
            let part: Vec<C64> = coords.iter().map(|&x| v[x]).collect();
            if norm(&part) > tol::SPAN_RANK && builders[blk].push(&part)? {
                queue.push_back((blk, builders[blk].rank() - 1));
            }
        }
    }
    while let Some((blk, k)) = queue.pop_front() {
        let v = builders[blk].basis()[k].clone();
        for b in 0..big_d {
            if wts.counts[blk][b] == 0 {
                continue;
            }
            for a in (0..big_d).filter(|&a| a != b) {
                let (target, out) = wts.raise(blk, &v, a, b);
                if builders[target].push(&out)? {
                    queue.push_back((target, builders[target].rank() - 1));
                }
            }
        }
    }
    let mut basis = Vec::new();
    for (blk, bld) in builders.iter().enumerate() {
        for v in bld.basis() {
            let mut full = vec![ZERO; dim];
            for (j, &x) in wts.coords[blk].iter().enumerate() {
                full[x] = v[j];
            }
            basis.push(full);
        }
    }
    Ok(Projector::from_orthonormal(dim, basis))
}

fn tensor_apply(u: &ComplexMatrix, big_d: usize, n: usize, v: &[C64]) -> Vec<C64> {
    let mut out = v.to_vec();
    for site in 0..n {
        apply_local_vector(&mut out, big_d, site, u);
    }
    out
}

fn haar_saturation<R: Rng + ?Sized>(
    p: &Projector,
    big_d: usize,
    n: usize,
    budget: usize,
    rng: &mut R,
) -> Result<(Projector, usize)> {
    let budget = budget.max(1);
    let mut b = SpanBuilder::from_projector(p);
    let mut stable = 0;
    let mut samples = 0;
    while !b.is_full() && stable < budget {
        if samples >= 100 * budget {
            return Err(Error::NonConvergence {
                samples,
                rank: b.rank(),
            });
        }
        let u = haar_unitary(rng, big_d);
        samples += 1;
        let mut grew = false;
        for v in p.basis() {
            grew |= b.push(&tensor_apply(&u, big_d, n, v))?;
        }
        stable = if grew { 0 } else { stable + 1 };
    }
    Ok((b.finish(), samples))
}

// Largest ‖(I − w) U^{⊗n} v‖ over fresh Haar U and random unit v ∈ range(p),
// plus the first basis vector of p.
fn invariance_deviation<R: Rng + ?Sized>(
    p: &Projector,
    w: &Projector,
    big_d: usize,
    n: usize,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if p.rank() == 0 || w.rank() == w.dim() {
        return Ok(0.0);
    }
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let u = haar_unitary(rng, big_d);
        let mut probes = vec![p.basis()[0].clone()];
        for _ in 0..3 {
            let mut v = vec![ZERO; p.dim()];
            for b in p.basis() {
                let c = gaussian_complex(rng);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += c * bi;
                }
            }
            let nv = norm(&v);
            probes.push(v.into_iter().map(|z| z / nv).collect());
        }
        for v in probes {
            worst = worst.max(w.residual(&tensor_apply(&u, big_d, n, &v)));
        }
    }
    Ok(worst)
}

/// `log₂` of the trace bound `(n+1)^{d^{2l}} · tr(p) · d^l` on an orbit join.
pub fn log2_orbit_trace_bound(d: usize, l: usize, n: usize, trace_p: f64) -> f64 {
    let big_d = fmath::powi(d as f64, l as i32);
    big_d * big_d * fmath::log2(n as f64 + 1.0) + fmath::log2(trace_p) + fmath::log2(big_d)
}

/// Asymptotic rate bound for the paper schedule (`n ≥ d^{3l}`):
/// `d^{2l} log₂(d^{3l}+1)/(l d^{3l}) + r + log₂(d)/d^{3l}`.
pub fn paper_rate_bound(d: usize, l: usize, r: f64) -> f64 {
    let big_d = fmath::powi(d as f64, l as i32);
    let cube = big_d * big_d * big_d;
    big_d * big_d * fmath::log2(cube + 1.0) / (l as f64 * cube) + r + fmath::log2(d as f64) / cube
}

/// Finite-size version of the same bound with the actual `n` and padding:
/// `(1/m)[d^{2l} log₂(n+1) + ⌊nR⌋ + l log₂ d + (m − ln) log₂ d]`.
pub fn rate_upper_bound(s: &Schedule) -> f64 {
    let log_p = crate::code::log_code_size(s.n, s.big_r) as f64;
    let bound = log2_orbit_trace_bound(s.d, s.l, s.n, fmath::powi(2.0, log_p as i32));
    (bound + s.pad() as f64 * fmath::log2(s.d as f64)) / s.m as f64
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BuildOptions {
    /// Context order of the empirical-entropy code ordering.
    pub context_order: usize,
    pub join: JoinOptions,
}

/// `q = w` when `m = l·n`, else `w ⊗ I^{⊗(m−ln)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniversalProjector {
    pub schedule: Schedule,
    pub code_size: u128,
    pub context_order: usize,
    pub join: JoinReport,
    w: Projector,
}

/// Builds `q_r^(m)` from the paper schedule.
pub fn assemble_q<R: Rng + ?Sized>(
    m: usize,
    d: usize,
    r: f64,
    opts: &BuildOptions,
    rng: &mut R,
) -> Result<UniversalProjector> {
    assemble_with(schedule(m, d, r)?, opts, rng)
}

/// Builds `q` for a given (possibly overridden) schedule.
pub fn assemble_with<R: Rng + ?Sized>(
    sched: Schedule,
    opts: &BuildOptions,
    rng: &mut R,
) -> Result<UniversalProjector> {
    let big_d = pow_dim(sched.d, sched.l, tol::DIM_CAP)?;
    pow_dim(big_d, sched.n, tol::DIM_CAP)?;
    let code = build_code(big_d, sched.big_r, sched.n, opts.context_order)?;
    let p = code_projector(&code, None)?;
    let (w, join) = orbit_join(&p, sched.d, sched.l, sched.n, &opts.join, rng)?;
    Ok(UniversalProjector {
        code_size: code.size(),
        context_order: opts.context_order,
        schedule: sched,
        join,
        w,
    })
}

impl UniversalProjector {
    pub fn m(&self) -> usize {
        self.schedule.m
    }

    pub fn r(&self) -> f64 {
        self.schedule.r
    }

    /// The joined projector on the `l·n` block sites.
    pub fn w(&self) -> &Projector {
        &self.w
    }

    /// `log₂ tr(q) = log₂ tr(w) + (m − ln) log₂ d`.
    pub fn log2_trace(&self) -> f64 {
        fmath::log2(self.w.rank() as f64) + self.schedule.pad() as f64 * fmath::log2(self.schedule.d as f64)
    }

    /// `(1/m) log₂ tr(q)`.
    pub fn trace_log_rate(&self) -> f64 {
        self.log2_trace() / self.schedule.m as f64
    }

    /// Materializes `q` on all `m` sites.
    pub fn q(&self) -> Result<Projector> {
        self.w.tensor_identity(pow_dim(self.schedule.d, self.schedule.pad(), tol::DIM_CAP)?)
    }

    /// `tr(q ρ_m)`; equal to `tr(w ρ_{ln})` by consistency of the marginals.
    pub fn acceptance_probability(&self, s: &QuantumSource) -> Result<f64> {
        if s.site_dim() != self.schedule.d {
            return Err(Error::DimensionMismatch {
                expected: self.schedule.d,
                found: s.site_dim(),
            });
        }
        let k = self.schedule.l * self.schedule.n;
        let value = if let Some(diag) = s.diagonal_marginal(k)? {
            self.w
                .basis()
                .iter()
                .map(|b| b.iter().zip(&diag).map(|(z, p)| z.norm_sqr() * p).sum::<f64>())
                .sum()
        } else {
            self.w.trace_with(s.marginal(k)?.matrix())?.re
        };
        Ok(value.clamp(0.0, 1.0))
    }
}
