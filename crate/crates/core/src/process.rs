//! Finite-alphabet stationary processes with exact marginals.
//!
//! Sequences over `{0..L−1}` are indexed in base `L` with the first symbol
//! most significant, so lexicographic order and index order coincide and
//! regrouping a length-`l·j` sequence into `j` supersymbols of `L^l` leaves
//! the index unchanged.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::fmath;
use crate::linalg::solve_real;
use crate::tol;

/// A stationary (or, for negative tests, deliberately non-stationary)
/// finite-alphabet process.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalProcess {
    alphabet: usize,
    kind: ProcessKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProcessKind {
    Iid(Vec<f64>),
    /// Row-major `L × L` transition matrix and the law of the first symbol.
    Markov {
        transition: Vec<f64>,
        initial: Vec<f64>,
    },
    /// Deterministic cycle started uniformly at one of `phases`.
    Periodic {
        cycle: Vec<usize>,
        phases: Vec<usize>,
    },
    Mixture {
        weights: Vec<f64>,
        components: Vec<ClassicalProcess>,
    },
}

fn check_probability_vector(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(invalid(alloc::format!("{what}: empty probability vector")));
    }
    if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(invalid(alloc::format!("{what}: entries must be nonnegative")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > tol::PROBABILITY {
        return Err(invalid(alloc::format!("{what}: sums to {s}, not 1")));
    }
    Ok(())
}

impl ClassicalProcess {
    pub fn iid(probs: Vec<f64>) -> Result<Self> {
        check_probability_vector(&probs, "iid")?;
        Ok(Self {
            alphabet: probs.len(),
            kind: ProcessKind::Iid(probs),
        })
    }

    /// Binary i.i.d. process with `P(0) = q`.
    pub fn bernoulli(q: f64) -> Result<Self> {
        Self::iid(vec![q, 1.0 - q])
    }

    /// Markov chain started at its stationary distribution.
    pub fn markov(transition: Vec<f64>) -> Result<Self> {
        let l = check_transition(&transition)?;
        let initial = stationary_distribution(&transition, l)?;
        Ok(Self {
            alphabet: l,
            kind: ProcessKind::Markov { transition, initial },
        })
    }

    /// Markov chain with an explicit first-symbol law, which need not be
    /// stationary.
    pub fn markov_with_initial(transition: Vec<f64>, initial: Vec<f64>) -> Result<Self> {
        let l = check_transition(&transition)?;
        check_probability_vector(&initial, "initial distribution")?;
        if initial.len() != l {
            return Err(Error::DimensionMismatch {
                expected: l,
                found: initial.len(),
            });
        }
        Ok(Self {
            alphabet: l,
            kind: ProcessKind::Markov { transition, initial },
        })
    }

    /// Cycle over an `alphabet`-letter alphabet with a uniformly random phase.
    pub fn periodic(alphabet: usize, cycle: Vec<usize>) -> Result<Self> {
        let phases = (0..cycle.len()).collect();
        Self::periodic_with_phases(alphabet, cycle, phases)
    }

    /// Cycle started uniformly at one of the listed phases.
    pub fn periodic_with_phases(
        alphabet: usize,
        cycle: Vec<usize>,
        phases: Vec<usize>,
    ) -> Result<Self> {
        if alphabet == 0 {
            return Err(invalid("alphabet must be nonempty"));
        }
        if cycle.is_empty() || phases.is_empty() {
            return Err(invalid("periodic: empty cycle or phase set"));
        }
        if let Some(&bad) = cycle.iter().find(|&&a| a >= alphabet) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: alphabet,
            });
        }
        let mut phases = phases;
        phases.sort_unstable();
        phases.dedup();
        if let Some(&bad) = phases.iter().find(|&&p| p >= cycle.len()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: cycle.len(),
            });
        }
        Ok(Self {
            alphabet,
            kind: ProcessKind::Periodic { cycle, phases },
        })
    }

    pub fn mixture(weights: Vec<f64>, components: Vec<ClassicalProcess>) -> Result<Self> {
        check_probability_vector(&weights, "mixture weights")?;
        if weights.len() != components.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                found: components.len(),
            });
        }
        let alphabet = components[0].alphabet;
        if components.iter().any(|c| c.alphabet != alphabet) {
            return Err(invalid("mixture components have different alphabets"));
        }
        Ok(Self {
            alphabet,
            kind: ProcessKind::Mixture {
                weights,
                components,
            },
        })
    }

    #[inline]
    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    #[inline]
    pub fn kind(&self) -> &ProcessKind {
        &self.kind
    }

    /// Shift-invariance of the construction (not of its finite marginals
    /// to tolerance; those are checked by the marginal tests).
    pub fn is_stationary(&self) -> bool {
        match &self.kind {
            ProcessKind::Iid(_) => true,
            ProcessKind::Markov {
                transition,
                initial,
            } => stationarity_defect(transition, initial) <= tol::PROBABILITY * 10.0,
            ProcessKind::Periodic { cycle, phases } => phases.len() == cycle.len(),
            ProcessKind::Mixture { components, .. } => components.iter().all(Self::is_stationary),
        }
    }

    /// Whether the process is ergodic by construction. Mixtures are always
    /// labeled non-ergodic.
    pub fn is_ergodic(&self) -> bool {
        match &self.kind {
            ProcessKind::Iid(_) => true,
            ProcessKind::Markov { transition, .. } => {
                self.is_stationary() && is_irreducible(transition, self.alphabet)
            }
            ProcessKind::Periodic { cycle, phases } => phases.len() == cycle.len(),
            ProcessKind::Mixture { .. } => false,
        }
    }

    /// Exact probability of a finite sequence occupying positions `0..n`.
    pub fn probability(&self, seq: &[usize]) -> f64 {
        if seq.iter().any(|&a| a >= self.alphabet) {
            return 0.0;
        }
        self.automaton().probability(seq)
    }

    /// Dense length-`n` marginal.
    pub fn marginal(&self, n: usize) -> Result<Distribution> {
        if n == 0 {
            return Err(invalid("marginal length must be at least 1"));
        }
        let size = dense_size(self.alphabet, n)?;
        let probs = self.automaton().dense(n, size);
        Ok(Distribution {
            alphabet: self.alphabet,
            n,
            probs,
        })
    }

    /// Entropy rate in bits per symbol.
    pub fn entropy_rate(&self) -> Result<EntropyRate> {
        let bits = match &self.kind {
            ProcessKind::Iid(p) => entropy_bits(p),
            ProcessKind::Markov {
                transition,
                initial,
            } => {
                let defect = stationarity_defect(transition, initial);
                if defect > tol::PROBABILITY * 10.0 {
                    return Err(Error::NonStationary(defect));
                }
                let l = self.alphabet;
                (0..l)
                    .map(|i| initial[i] * entropy_bits(&transition[i * l..(i + 1) * l]))
                    .sum()
            }
            ProcessKind::Periodic { .. } => 0.0,
            ProcessKind::Mixture {
                weights,
                components,
            } => {
                let mut acc = 0.0;
                for (w, c) in weights.iter().zip(components) {
                    acc += w * c.entropy_rate()?.bits;
                }
                acc
            }
        };
        Ok(EntropyRate {
            bits,
            non_ergodic: !self.is_ergodic(),
        })
    }

    /// The process read in non-overlapping blocks of `l` symbols.
    pub fn block_process(&self, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(invalid("block length must be at least 1"));
        }
        if l == 1 {
            return Ok(self.clone());
        }
        let big = dense_size(self.alphabet, l)?;
        match &self.kind {
            ProcessKind::Iid(p) => {
                let probs = Self::iid(p.clone())?.marginal(l)?.probs;
                Ok(Self {
                    alphabet: big,
                    kind: ProcessKind::Iid(probs),
                })
            }
            ProcessKind::Markov {
                transition,
                initial,
            } => {
                if big.checked_mul(big).is_none_or(|s| s > tol::DENSE_CAP) {
                    return Err(Error::DimensionCap {
                        requested: big.saturating_mul(big),
                        cap: tol::DENSE_CAP,
                    });
                }
                let small = self.alphabet;
                // Transition from block u to block v depends on u's last symbol.
                let mut t = vec![0.0; big * big];
                for u in 0..big {
                    let last = u % small;
                    for v in 0..big {
                        let digits = index_to_sequence(v, small, l);
                        let mut p = transition[last * small + digits[0]];
                        for w in digits.windows(2) {
                            p *= transition[w[0] * small + w[1]];
                        }
                        t[u * big + v] = p;
                    }
                }
                let init = Self::markov_with_initial(transition.clone(), initial.clone())?
                    .marginal(l)?
                    .probs;
                Ok(Self {
                    alphabet: big,
                    kind: ProcessKind::Markov {
                        transition: t,
                        initial: init,
                    },
                })
            }
            ProcessKind::Periodic { cycle, phases } => {
                let period = cycle.len();
                let g = gcd(period, l);
                let super_period = period / g;
                let mut weights = Vec::new();
                let mut components = Vec::new();
                for r in 0..g {
                    let start = |j: usize| (r + j * l) % period;
                    let supercycle: Vec<usize> = (0..super_period)
                        .map(|j| {
                            (0..l).fold(0, |acc, k| {
                                acc * self.alphabet + cycle[(start(j) + k) % period]
                            })
                        })
                        .collect();
                    let superphases: Vec<usize> = (0..super_period)
                        .filter(|&j| phases.contains(&start(j)))
                        .collect();
                    if superphases.is_empty() {
                        continue;
                    }
                    weights.push(superphases.len() as f64 / phases.len() as f64);
                    components.push(Self::periodic_with_phases(big, supercycle, superphases)?);
                }
                if components.len() == 1 {
                    Ok(components.pop().expect("one component"))
                } else {
                    Self::mixture(weights, components)
                }
            }
            ProcessKind::Mixture {
                weights,
                components,
            } => {
                let blocked = components
                    .iter()
                    .map(|c| c.block_process(l))
                    .collect::<Result<Vec<_>>>()?;
                Self::mixture(weights.clone(), blocked)
            }
        }
    }

    /// Splits the process into its `k` components that are stationary and
    /// ergodic under the `l`-shift. Component `x` is component `0` shifted
    /// by `x` symbols.
    pub fn ergodic_decomposition_l(&self, l: usize) -> Result<Decomposition> {
        if l == 0 {
            return Err(invalid("block length must be at least 1"));
        }
        if !self.is_stationary() {
            return Err(Error::NonStationary(match &self.kind {
                ProcessKind::Markov {
                    transition,
                    initial,
                } => stationarity_defect(transition, initial),
                _ => 1.0,
            }));
        }
        match &self.kind {
            ProcessKind::Iid(_) => Ok(Decomposition {
                l,
                components: vec![self.clone()],
            }),
            ProcessKind::Periodic { cycle, .. } => {
                let g = gcd(cycle.len(), l);
                let components = (0..g)
                    .map(|x| {
                        let phases = (0..cycle.len()).filter(|p| p % g == x).collect();
                        Self::periodic_with_phases(self.alphabet, cycle.clone(), phases)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Decomposition { l, components })
            }
            ProcessKind::Markov {
                transition,
                initial,
            } => {
                let n = self.alphabet;
                if !is_irreducible(transition, n) {
                    return Err(Error::NotImplemented(
                        "ergodic decomposition of reducible Markov chains",
                    ));
                }
                let (period, class) = cyclic_classes(transition, n);
                let g = gcd(period, l);
                let components = (0..g)
                    .map(|x| {
                        let mut init: Vec<f64> = (0..n)
                            .map(|s| if class[s] % g == x { initial[s] } else { 0.0 })
                            .collect();
                        let mass: f64 = init.iter().sum();
                        init.iter_mut().for_each(|p| *p /= mass);
                        Self::markov_with_initial(transition.clone(), init)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Decomposition { l, components })
            }
            ProcessKind::Mixture { .. } => Err(Error::NotImplemented(
                "ergodic decomposition of mixtures",
            )),
        }
    }

    /// Renames symbol `a` to `perm[a]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let l = self.alphabet;
        let mut seen = vec![false; l];
        if perm.len() != l || perm.iter().any(|&p| p >= l || core::mem::replace(&mut seen[p], true)) {
            return Err(invalid("relabeling must be a permutation of the alphabet"));
        }
        let kind = match &self.kind {
            ProcessKind::Iid(p) => {
                let mut q = vec![0.0; l];
                for a in 0..l {
                    q[perm[a]] = p[a];
                }
                ProcessKind::Iid(q)
            }
            ProcessKind::Markov {
                transition,
                initial,
            } => {
                let mut t = vec![0.0; l * l];
                let mut init = vec![0.0; l];
                for i in 0..l {
                    init[perm[i]] = initial[i];
                    for j in 0..l {
                        t[perm[i] * l + perm[j]] = transition[i * l + j];
                    }
                }
                ProcessKind::Markov {
                    transition: t,
                    initial: init,
                }
            }
            ProcessKind::Periodic { cycle, phases } => ProcessKind::Periodic {
                cycle: cycle.iter().map(|&a| perm[a]).collect(),
                phases: phases.clone(),
            },
            ProcessKind::Mixture {
                weights,
                components,
            } => ProcessKind::Mixture {
                weights: weights.clone(),
                components: components
                    .iter()
                    .map(|c| c.relabel(perm))
                    .collect::<Result<Vec<_>>>()?,
            },
        };
        Ok(Self {
            alphabet: l,
            kind,
        })
    }

    pub(crate) fn automaton(&self) -> Automaton {
        let l = self.alphabet;
        match &self.kind {
            ProcessKind::Iid(p) => Automaton {
                alphabet: l,
                states: 1,
                first: p.iter().map(|&x| vec![x]).collect(),
                mats: p.iter().map(|&x| vec![x]).collect(),
            },
            ProcessKind::Markov {
                transition,
                initial,
            } => {
                let first = (0..l)
                    .map(|a| {
                        let mut v = vec![0.0; l];
                        v[a] = initial[a];
                        v
                    })
                    .collect();
                let mats = (0..l)
                    .map(|a| {
                        let mut m = vec![0.0; l * l];
                        for i in 0..l {
                            m[i * l + a] = transition[i * l + a];
                        }
                        m
                    })
                    .collect();
                Automaton {
                    alphabet: l,
                    states: l,
                    first,
                    mats,
                }
            }
            ProcessKind::Periodic { cycle, phases } => {
                let t = cycle.len();
                let w = 1.0 / phases.len() as f64;
                let mut first = vec![vec![0.0; t]; l];
                for &p in phases {
                    first[cycle[p]][p] += w;
                }
                let mut mats = vec![vec![0.0; t * t]; l];
                for i in 0..t {
                    let j = (i + 1) % t;
                    mats[cycle[j]][i * t + j] = 1.0;
                }
                Automaton {
                    alphabet: l,
                    states: t,
                    first,
                    mats,
                }
            }
            ProcessKind::Mixture {
                weights,
                components,
            } => {
                let parts: Vec<Automaton> = components.iter().map(Self::automaton).collect();
                let states: usize = parts.iter().map(|a| a.states).sum();
                let mut first = vec![vec![0.0; states]; l];
                let mut mats = vec![vec![0.0; states * states]; l];
                let mut off = 0;
                for (w, a) in weights.iter().zip(&parts) {
                    for s in 0..l {
                        for i in 0..a.states {
                            first[s][off + i] = w * a.first[s][i];
                            for j in 0..a.states {
                                mats[s][(off + i) * states + off + j] = a.mats[s][i * a.states + j];
                            }
                        }
                    }
                    off += a.states;
                }
                Automaton {
                    alphabet: l,
                    states,
                    first,
                    mats,
                }
            }
        }
    }
}

/// Entropy rate together with the ergodicity label of the process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyRate {
    pub bits: f64,
    /// Set for mixtures (and reducible chains): the value is then the
    /// weighted average of component rates, not the rate of an ergodic source.
    pub non_ergodic: bool,
}

/// Uniform convex decomposition into `l`-ergodic components.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub l: usize,
    pub components: Vec<ClassicalProcess>,
}

impl Decomposition {
    pub fn k(&self) -> usize {
        self.components.len()
    }

    /// Indices `x` with `H(component_x on block_len symbols)/block_len ≥ s + η`.
    pub fn high_entropy_components(&self, s: f64, eta: f64, block_len: usize) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (x, c) in self.components.iter().enumerate() {
            let h = c.marginal(block_len)?.entropy() / block_len as f64;
            if h >= s + eta {
                out.push(x);
            }
        }
        Ok(out)
    }
}

/// Free function form of [`Decomposition::high_entropy_components`].
pub fn high_entropy_components(
    decomposition: &Decomposition,
    s: f64,
    eta: f64,
    block_len: usize,
) -> Result<Vec<usize>> {
    decomposition.high_entropy_components(s, eta, block_len)
}

/// Weighted finite automaton for sequence probabilities:
/// `P(x₁…x_n) = first[x₁] · M[x₂] ⋯ M[x_n] · 1`.
#[derive(Clone, Debug)]
pub(crate) struct Automaton {
    pub alphabet: usize,
    pub states: usize,
    pub first: Vec<Vec<f64>>,
    pub mats: Vec<Vec<f64>>,
}

impl Automaton {
    pub fn step(&self, v: &[f64], a: usize) -> Vec<f64> {
        let s = self.states;
        let m = &self.mats[a];
        let mut out = vec![0.0; s];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, mij) in out.iter_mut().zip(&m[i * s..(i + 1) * s]) {
                *o += vi * mij;
            }
        }
        out
    }

    pub fn probability(&self, seq: &[usize]) -> f64 {
        let Some((&x0, rest)) = seq.split_first() else {
            return 1.0;
        };
        let mut v = self.first[x0].clone();
        for &a in rest {
            v = self.step(&v, a);
        }
        v.iter().sum()
    }

    fn dense(&self, n: usize, size: usize) -> Vec<f64> {
        let s = self.states;
        let mut cur: Vec<f64> = self.first.concat();
        let mut count = self.alphabet;
        for _ in 1..n {
            let mut next = vec![0.0; count * self.alphabet * s];
            for idx in 0..count {
                let v = &cur[idx * s..(idx + 1) * s];
                if v.iter().all(|&x| x == 0.0) {
                    continue;
                }
                for a in 0..self.alphabet {
                    let w = self.step(v, a);
                    let base = (idx * self.alphabet + a) * s;
                    next[base..base + s].copy_from_slice(&w);
                }
            }
            cur = next;
            count *= self.alphabet;
        }
        debug_assert_eq!(count, size);
        cur.chunks(s).map(|c| c.iter().sum()).collect()
    }

    /// `Σ_a M_a`.
    pub fn total(&self) -> Vec<f64> {
        let mut t = vec![0.0; self.states * self.states];
        for m in &self.mats {
            for (ti, mi) in t.iter_mut().zip(m) {
                *ti += mi;
            }
        }
        t
    }
}

/// Probabilities of all length-`n` sequences in index order.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    alphabet: usize,
    n: usize,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(alphabet: usize, n: usize, probs: Vec<f64>) -> Result<Self> {
        let size = dense_size(alphabet, n)?;
        if probs.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: probs.len(),
            });
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(invalid("negative probability"));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(invalid(alloc::format!("distribution sums to {s}")));
        }
        Ok(Self { alphabet, n, probs })
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, seq: &[usize]) -> f64 {
        self.probs[sequence_index(seq, self.alphabet)]
    }

    pub fn entropy(&self) -> f64 {
        shannon_entropy(self)
    }

    /// Sums out the last `i` symbols.
    pub fn sum_out_last(&self, i: usize) -> Result<Self> {
        if i >= self.n {
            return Err(invalid("cannot sum out every symbol"));
        }
        let tail = self.alphabet.pow(i as u32);
        let probs = self.probs.chunks(tail).map(|c| c.iter().sum()).collect();
        Ok(Self {
            alphabet: self.alphabet,
            n: self.n - i,
            probs,
        })
    }

    /// Sums out the first `i` symbols.
    pub fn sum_out_first(&self, i: usize) -> Result<Self> {
        if i >= self.n {
            return Err(invalid("cannot sum out every symbol"));
        }
        let keep = self.alphabet.pow((self.n - i) as u32);
        let mut probs = vec![0.0; keep];
        for (idx, p) in self.probs.iter().enumerate() {
            probs[idx % keep] += p;
        }
        Ok(Self {
            alphabet: self.alphabet,
            n: self.n - i,
            probs,
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.probs.len() != other.probs.len() {
            return f64::INFINITY;
        }
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `−Σ p log₂ p`.
pub fn shannon_entropy(d: &Distribution) -> f64 {
    entropy_bits(&d.probs)
}

pub(crate) fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter().map(|&x| fmath::xlog2x(x)).sum::<f64>()
}

/// Base-`L` index, first symbol most significant.
pub fn sequence_index(seq: &[usize], alphabet: usize) -> usize {
    seq.iter().fold(0, |acc, &a| acc * alphabet + a)
}

pub fn index_to_sequence(mut index: usize, alphabet: usize, n: usize) -> Vec<usize> {
    let mut seq = vec![0; n];
    for slot in seq.iter_mut().rev() {
        *slot = index % alphabet;
        index /= alphabet;
    }
    seq
}

fn dense_size(alphabet: usize, n: usize) -> Result<usize> {
    crate::linalg::pow_dim(alphabet, n, tol::DENSE_CAP)
}

fn check_transition(t: &[f64]) -> Result<usize> {
    let l = (fmath::sqrt(t.len() as f64) + 0.5) as usize;
    if l == 0 || l * l != t.len() {
        return Err(invalid("transition matrix must be square"));
    }
    for row in t.chunks(l) {
        check_probability_vector(row, "transition row")?;
    }
    Ok(l)
}

fn stationarity_defect(t: &[f64], init: &[f64]) -> f64 {
    let l = init.len();
    (0..l)
        .map(|j| ((0..l).map(|i| init[i] * t[i * l + j]).sum::<f64>() - init[j]).abs())
        .fold(0.0, f64::max)
}

/// Solves `π T = π`, `Σ π = 1`.
pub fn stationary_distribution(t: &[f64], l: usize) -> Result<Vec<f64>> {
    // Rows of (Tᵀ − I) with the last equation replaced by normalization.
    let mut a = vec![0.0; l * l];
    for i in 0..l {
        for j in 0..l {
            a[i * l + j] = t[j * l + i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..l {
        a[(l - 1) * l + j] = 1.0;
    }
    let mut b = vec![0.0; l];
    b[l - 1] = 1.0;
    let mut pi = solve_real(&a, &b).map_err(|_| {
        invalid("transition matrix has no unique stationary distribution; pass an initial law")
    })?;
    for p in &mut pi {
        if *p < 0.0 && *p > -1e-14 {
            *p = 0.0;
        }
    }
    Ok(pi)
}

fn reachable(t: &[f64], l: usize, from: usize, forward: bool) -> Vec<bool> {
    let mut seen = vec![false; l];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(i) = stack.pop() {
        for j in 0..l {
            let p = if forward { t[i * l + j] } else { t[j * l + i] };
            if p > 0.0 && !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen
}

fn is_irreducible(t: &[f64], l: usize) -> bool {
    reachable(t, l, 0, true).iter().all(|&x| x) && reachable(t, l, 0, false).iter().all(|&x| x)
}

// Period of an irreducible chain and the cyclic class of each state
// (state 0 in class 0).
fn cyclic_classes(t: &[f64], l: usize) -> (usize, Vec<usize>) {
    let mut level = vec![usize::MAX; l];
    level[0] = 0;
    let mut queue = alloc::collections::VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for j in 0..l {
            if t[i * l + j] > 0.0 && level[j] == usize::MAX {
                level[j] = level[i] + 1;
                queue.push_back(j);
            }
        }
    }
    let mut period = 0;
    for i in 0..l {
        for j in 0..l {
            if t[i * l + j] > 0.0 {
                let diff = (level[i] as i64 + 1 - level[j] as i64).unsigned_abs() as usize;
                period = gcd(period, diff);
            }
        }
    }
    let period = period.max(1);
    (period, level.iter().map(|&v| v % period).collect())
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
