//! Fixed-rate block codes ordered by empirical entropy.
//!
//! A code of rate `R` and length `n` over `L` letters keeps the first
//! `2^⌊nR⌋` sequences under the order (k-th order empirical conditional
//! entropy, then lexicographic). Contexts are read cyclically, so a sequence
//! and its rotations share their statistics and periodic patterns have
//! empirical entropy exactly zero.
//!
//! Small spaces (`L^n ≤ 2^20`) are enumerated. Larger ones are handled for
//! `k = 0` through type classes: membership is a rank computation and code
//! measures are exact dynamic programs over type counts.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::fmath;
use crate::process::{index_to_sequence, ClassicalProcess};
use crate::tol;

/// Largest `n` for type-class codes.
pub const MAX_TYPE_LENGTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodeMode {
    /// Dense when `L^n ≤ 2^20`, otherwise type classes.
    Auto,
    Dense,
    Types,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockCode {
    alphabet: usize,
    n: usize,
    rate: f64,
    context_order: usize,
    log_size: u32,
    degenerate: bool,
    repr: Repr,
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Dense {
        /// Member indices in code order.
        members: Vec<u64>,
        sorted: Vec<u64>,
    },
    Types(TypeCode),
}

#[derive(Clone, Debug, PartialEq)]
struct TypeCode {
    /// Sequences whose type key is below this are all members.
    full_below: u64,
    /// Types sharing the boundary key and how many of their union (in
    /// lexicographic order) are admitted.
    boundary: Vec<Vec<usize>>,
    boundary_take: u128,
    /// Every type with key < `full_below`.
    full: Vec<Vec<usize>>,
}

/// `⌊nR⌋`, robust to `nR` landing a hair below an integer.
pub fn log_code_size(n: usize, rate: f64) -> u32 {
    fmath::floor(n as f64 * rate + 1e-9).max(0.0) as u32
}

/// Code of length `n`, rate `rate` bits/symbol and context order `k`.
pub fn build_code(alphabet: usize, rate: f64, n: usize, k: usize) -> Result<BlockCode> {
    build_code_with(alphabet, rate, n, k, CodeMode::Auto)
}

pub fn build_code_with(
    alphabet: usize,
    rate: f64,
    n: usize,
    k: usize,
    mode: CodeMode,
) -> Result<BlockCode> {
    if alphabet < 2 {
        return Err(invalid("alphabet must have at least two letters"));
    }
    if n == 0 {
        return Err(invalid("code length must be at least 1"));
    }
    let max_rate = fmath::log2(alphabet as f64);
    if !(rate > 0.0) || rate > max_rate + 1e-12 {
        return Err(invalid(alloc::format!(
            "rate {rate} outside (0, log2 L = {max_rate}]"
        )));
    }
    let log_size = log_code_size(n, rate);
    let dense_ok = crate::linalg::pow_dim(alphabet, n, tol::DENSE_CAP).is_ok();
    let mode = match mode {
        CodeMode::Auto if dense_ok => CodeMode::Dense,
        CodeMode::Auto => CodeMode::Types,
        m => m,
    };
    match mode {
        CodeMode::Dense => {
            let total = crate::linalg::pow_dim(alphabet, n, tol::DENSE_CAP)?;
            build_dense(alphabet, rate, n, k, log_size, total)
        }
        _ => {
            if k != 0 {
                return Err(Error::NotImplemented(
                    "type-class codes with context order above zero",
                ));
            }
            build_types(alphabet, rate, n, log_size)
        }
    }
}

fn build_dense(
    alphabet: usize,
    rate: f64,
    n: usize,
    k: usize,
    log_size: u32,
    total: usize,
) -> Result<BlockCode> {
    let want = if log_size >= 63 { u64::MAX } else { 1u64 << log_size };
    let degenerate = want > total as u64;
    let take = if degenerate { total } else { want as usize };
    let mut keyed: Vec<(u64, u64)> = (0..total)
        .map(|idx| {
            let seq = index_to_sequence(idx, alphabet, n);
            (entropy_key(&seq, alphabet, k), idx as u64)
        })
        .collect();
    keyed.sort_unstable();
    let members: Vec<u64> = keyed[..take].iter().map(|&(_, i)| i).collect();
    let mut sorted = members.clone();
    sorted.sort_unstable();
    Ok(BlockCode {
        alphabet,
        n,
        rate,
        context_order: k,
        log_size,
        degenerate,
        repr: Repr::Dense { members, sorted },
    })
}

fn build_types(alphabet: usize, rate: f64, n: usize, log_size: u32) -> Result<BlockCode> {
    if n > MAX_TYPE_LENGTH {
        return Err(invalid(alloc::format!(
            "type-class codes support n ≤ {MAX_TYPE_LENGTH}"
        )));
    }
    if (n as f64) * fmath::log2(alphabet as f64) > 126.0 || log_size > 126 {
        return Err(Error::DimensionCap {
            requested: usize::MAX,
            cap: 1 << 20,
        });
    }
    let mut types: Vec<(u64, Vec<usize>)> = compositions(n, alphabet)
        .into_iter()
        .map(|t| (type_key(&t, n), t))
        .collect();
    types.sort();

    let want: u128 = 1u128 << log_size;
    let total: u128 = (alphabet as u128).pow(n as u32);
    let degenerate = want > total;
    let want = want.min(total);

    let mut full = Vec::new();
    let mut cum: u128 = 0;
    let mut i = 0;
    let mut full_below = u64::MAX;
    let mut boundary = Vec::new();
    let mut boundary_take = 0;
    while i < types.len() {
        let key = types[i].0;
        let mut j = i;
        let mut level_count: u128 = 0;
        while j < types.len() && types[j].0 == key {
            level_count += multinomial(&types[j].1)?;
            j += 1;
        }
        if cum + level_count <= want {
            cum += level_count;
            full.extend(types[i..j].iter().map(|(_, t)| t.clone()));
            i = j;
            if cum == want {
                full_below = types.get(j).map_or(u64::MAX, |t| t.0);
                break;
            }
        } else {
            full_below = key;
            boundary = types[i..j].iter().map(|(_, t)| t.clone()).collect();
            boundary_take = want - cum;
            break;
        }
    }
    Ok(BlockCode {
        alphabet,
        n,
        rate,
        context_order: 0,
        log_size,
        degenerate,
        repr: Repr::Types(TypeCode {
            full_below,
            boundary,
            boundary_take,
            full,
        }),
    })
}

impl BlockCode {
    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn context_order(&self) -> usize {
        self.context_order
    }

    /// `⌊nR⌋`.
    pub fn log_size(&self) -> u32 {
        self.log_size
    }

    /// Set when `2^⌊nR⌋ > L^n` and the code holds every sequence.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.repr, Repr::Dense { .. })
    }

    /// Number of members.
    pub fn size(&self) -> u128 {
        match &self.repr {
            Repr::Dense { members, .. } => members.len() as u128,
            Repr::Types(_) => {
                let total = (self.alphabet as u128).pow(self.n as u32);
                (1u128 << self.log_size).min(total)
            }
        }
    }

    /// Member indices in code order (dense codes only).
    pub fn members(&self) -> Option<&[u64]> {
        match &self.repr {
            Repr::Dense { members, .. } => Some(members),
            Repr::Types(_) => None,
        }
    }

    /// Member indices ascending (dense codes only).
    pub fn sorted_members(&self) -> Option<&[u64]> {
        match &self.repr {
            Repr::Dense { sorted, .. } => Some(sorted),
            Repr::Types(_) => None,
        }
    }

    pub fn contains(&self, seq: &[usize]) -> bool {
        if seq.len() != self.n || seq.iter().any(|&a| a >= self.alphabet) {
            return false;
        }
        match &self.repr {
            Repr::Dense { sorted, .. } => {
                let idx = seq.iter().fold(0u64, |acc, &a| acc * self.alphabet as u64 + a as u64);
                sorted.binary_search(&idx).is_ok()
            }
            Repr::Types(tc) => {
                let t = type_of(seq, self.alphabet);
                let key = type_key(&t, self.n);
                if key < tc.full_below {
                    return true;
                }
                if key > tc.full_below || !tc.boundary.contains(&t) {
                    return false;
                }
                lex_rank(seq, self.alphabet, &tc.boundary) < tc.boundary_take
            }
        }
    }

    /// Sorted newline-delimited listing of the members. Symbols are written
    /// as digits when `L ≤ 10` and space-separated otherwise.
    pub fn listing(&self) -> Result<String> {
        let sorted = self
            .sorted_members()
            .ok_or(Error::NotImplemented("listing of type-class codes"))?;
        let mut out = String::new();
        for &idx in sorted {
            let seq = index_to_sequence(idx as usize, self.alphabet, self.n);
            for (i, a) in seq.iter().enumerate() {
                if self.alphabet > 10 && i > 0 {
                    out.push(' ');
                }
                out.push_str(&alloc::format!("{a}"));
            }
            out.push('\n');
        }
        Ok(out)
    }
}

/// Exact `μ(G)` for a process on the code's alphabet.
pub fn code_measure(p: &ClassicalProcess, c: &BlockCode) -> Result<f64> {
    if p.alphabet_size() != c.alphabet {
        return Err(Error::DimensionMismatch {
            expected: c.alphabet,
            found: p.alphabet_size(),
        });
    }
    match &c.repr {
        Repr::Dense { sorted, .. } => {
            let d = p.marginal(c.n)?;
            let probs = d.probs();
            Ok(fmath::compensated_sum(sorted.iter().map(|&i| probs[i as usize])))
        }
        Repr::Types(tc) => type_code_measure(p, c, tc),
    }
}

/// Regroups each member into `j = n/i` supersymbols over `L^i`.
pub fn superblock_code(c: &BlockCode, i: usize) -> Result<BlockCode> {
    if i == 0 || !c.n.is_multiple_of(i) {
        return Err(invalid(alloc::format!(
            "superblock length {i} does not divide code length {}",
            c.n
        )));
    }
    if i == 1 {
        return Ok(c.clone());
    }
    let Repr::Dense { members, sorted } = &c.repr else {
        return Err(Error::NotImplemented("superblocks of type-class codes"));
    };
    let alphabet = crate::linalg::pow_dim(c.alphabet, i, tol::DENSE_CAP)?;
    // Base-L^i digits of an index are i-blocks of its base-L digits.
    Ok(BlockCode {
        alphabet,
        n: c.n / i,
        rate: c.rate * i as f64,
        context_order: c.context_order,
        log_size: c.log_size,
        degenerate: c.degenerate,
        repr: Repr::Dense {
            members: members.clone(),
            sorted: sorted.clone(),
        },
    })
}

/// Members of `inner` that are missing from `outer` (both dense, same
/// alphabet and length). Empty means `inner ⊆ outer`.
pub fn missing_members(inner: &BlockCode, outer: &BlockCode) -> Result<Vec<u64>> {
    if inner.alphabet != outer.alphabet || inner.n != outer.n {
        return Err(invalid("codes over different spaces"));
    }
    let (Some(a), Some(b)) = (inner.sorted_members(), outer.sorted_members()) else {
        return Err(Error::NotImplemented("inclusion of type-class codes"));
    };
    Ok(a.iter().copied().filter(|x| b.binary_search(x).is_err()).collect())
}

/// Ordering key: k-th order cyclic empirical conditional entropy in units
/// of 1e-9 bits.
pub fn entropy_key(seq: &[usize], alphabet: usize, k: usize) -> u64 {
    to_key(empirical_entropy(seq, alphabet, k))
}

/// `H_k(x) = (1/n)[Σ_c N(c) log N(c) − Σ_{c,a} N(c,a) log N(c,a)]` with
/// contexts `x_{i−k..i−1}` taken cyclically.
pub fn empirical_entropy(seq: &[usize], alphabet: usize, k: usize) -> f64 {
    let n = seq.len();
    if n == 0 {
        return 0.0;
    }
    if k == 0 {
        return type_entropy(&type_of(seq, alphabet), n);
    }
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .map(|i| {
            let ctx = (1..=k).rev().fold(0usize, |acc, back| {
                acc.wrapping_mul(alphabet)
                    .wrapping_add(seq[(i + n * k - back) % n])
            });
            (ctx, seq[i])
        })
        .collect();
    pairs.sort_unstable();
    let mut ctx_counts = Vec::new();
    let mut pair_counts = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && pairs[j].0 == pairs[i].0 {
            j += 1;
        }
        ctx_counts.push(j - i);
        let mut a = i;
        while a < j {
            let mut b = a;
            while b < j && pairs[b] == pairs[a] {
                b += 1;
            }
            pair_counts.push(b - a);
            a = b;
        }
        i = j;
    }
    ctx_counts.sort_unstable();
    pair_counts.sort_unstable();
    let s = |counts: &[usize]| counts.iter().map(|&c| fmath::xlog2x(c as f64)).sum::<f64>();
    ((s(&ctx_counts) - s(&pair_counts)) / n as f64).max(0.0)
}

fn to_key(h: f64) -> u64 {
    fmath::round(h.max(0.0) * 1e9) as u64
}

fn type_of(seq: &[usize], alphabet: usize) -> Vec<usize> {
    let mut t = vec![0; alphabet];
    for &a in seq {
        t[a] += 1;
    }
    t
}

fn type_entropy(t: &[usize], n: usize) -> f64 {
    let mut counts: Vec<usize> = t.iter().copied().filter(|&c| c > 0).collect();
    counts.sort_unstable();
    let s: f64 = counts.iter().map(|&c| fmath::xlog2x(c as f64)).sum();
    (fmath::xlog2x(n as f64) - s).max(0.0) / n as f64
}

fn type_key(t: &[usize], n: usize) -> u64 {
    to_key(type_entropy(t, n))
}

/// All count vectors of `parts` nonnegative entries summing to `n`, in
/// lexicographic order.
fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; parts];
    fn rec(pos: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            rec(pos + 1, left - v, cur, out);
        }
    }
    rec(0, n, &mut cur, &mut out);
    out
}

fn binomial(m: usize, k: usize) -> Result<u128> {
    let k = k.min(m - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c
            .checked_mul((m - i) as u128)
            .ok_or(Error::DimensionCap {
                requested: usize::MAX,
                cap: usize::MAX,
            })?
            / (i as u128 + 1);
    }
    Ok(c)
}

/// Number of sequences with counts `t`.
fn multinomial(t: &[usize]) -> Result<u128> {
    let mut left: usize = t.iter().sum();
    let mut acc: u128 = 1;
    for &c in t {
        acc = acc
            .checked_mul(binomial(left, c)?)
            .ok_or(Error::DimensionCap {
                requested: usize::MAX,
                cap: usize::MAX,
            })?;
        left -= c;
    }
    Ok(acc)
}

// Completions of a prefix with counts `c` to a full sequence whose type is
// in `set`.
fn completions(c: &[usize], set: &[Vec<usize>]) -> u128 {
    set.iter()
        .filter(|t| t.iter().zip(c).all(|(a, b)| a >= b))
        .map(|t| {
            let rest: Vec<usize> = t.iter().zip(c).map(|(a, b)| a - b).collect();
            multinomial(&rest).unwrap_or(0)
        })
        .sum()
}

// Number of sequences lexicographically below `seq` whose type is in `set`.
fn lex_rank(seq: &[usize], alphabet: usize, set: &[Vec<usize>]) -> u128 {
    let mut counts = vec![0; alphabet];
    let mut rank = 0;
    for &x in seq {
        for a in 0..x {
            counts[a] += 1;
            rank += completions(&counts, set);
            counts[a] -= 1;
        }
        counts[x] += 1;
    }
    rank
}

// Dense table over count vectors with entries ≤ n, mixed radix n+1.
struct CountTable {
    radix: usize,
    states: usize,
    data: Vec<f64>,
}

impl CountTable {
    fn index(&self, c: &[usize]) -> usize {
        c.iter().fold(0, |acc, &x| acc * self.radix + x)
    }

    fn get(&self, c: &[usize]) -> &[f64] {
        let i = self.index(c) * self.states;
        &self.data[i..i + self.states]
    }
}

// B[r](s) = total weight of continuations with counts r from state s:
// B[0] = 1, B[r] = Σ_a M_a B[r − e_a].
fn backward_table(
    aut: &crate::process::Automaton,
    alphabet: usize,
    n: usize,
) -> Result<CountTable> {
    let radix = n + 1;
    let slots = crate::linalg::pow_dim(radix, alphabet, 1 << 22)?;
    let s = aut.states;
    let mut table = CountTable {
        radix,
        states: s,
        data: vec![0.0; slots * s],
    };
    for total in 0..=n {
        for r in compositions(total, alphabet) {
            let base = table.index(&r) * s;
            if total == 0 {
                table.data[base..base + s].fill(1.0);
                continue;
            }
            let mut acc = vec![0.0; s];
            let mut prev = r.clone();
            for a in 0..alphabet {
                if r[a] == 0 {
                    continue;
                }
                prev[a] -= 1;
                let b = table.get(&prev).to_vec();
                prev[a] += 1;
                let m = &aut.mats[a];
                for (i, acc_i) in acc.iter_mut().enumerate() {
                    *acc_i += m[i * s..(i + 1) * s]
                        .iter()
                        .zip(&b)
                        .map(|(x, y)| x * y)
                        .sum::<f64>();
                }
            }
            table.data[base..base + s].copy_from_slice(&acc);
        }
    }
    Ok(table)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// Weight of all completions in `set`, given forward vector `v` after a prefix
// with counts `c`.
fn set_mass(v: &[f64], c: &[usize], set: &[Vec<usize>], table: &CountTable) -> f64 {
    set.iter()
        .filter(|t| t.iter().zip(c).all(|(a, b)| a >= b))
        .map(|t| {
            let rest: Vec<usize> = t.iter().zip(c).map(|(a, b)| a - b).collect();
            dot(v, table.get(&rest))
        })
        .sum()
}

fn type_code_measure(p: &ClassicalProcess, c: &BlockCode, tc: &TypeCode) -> Result<f64> {
    let aut = p.automaton();
    let l = c.alphabet;
    let table = backward_table(&aut, l, c.n)?;
    let mut unit = vec![0; l];
    let mut total = 0.0;
    for a in 0..l {
        unit[a] = 1;
        total += set_mass(&aut.first[a], &unit, &tc.full, &table);
        unit[a] = 0;
    }

    // Lexicographically first `boundary_take` sequences of the boundary union.
    let mut rem = tc.boundary_take;
    let mut counts = vec![0; l];
    let mut forward: Option<Vec<f64>> = None;
    let mut pos = 0;
    while rem > 0 && pos < c.n {
        let mut descended = false;
        for a in 0..l {
            counts[a] += 1;
            let v = match &forward {
                None => aut.first[a].clone(),
                Some(f) => aut.step(f, a),
            };
            let cnt = completions(&counts, &tc.boundary);
            if cnt == 0 {
                counts[a] -= 1;
                continue;
            }
            if rem >= cnt {
                total += set_mass(&v, &counts, &tc.boundary, &table);
                rem -= cnt;
                counts[a] -= 1;
                if rem == 0 {
                    break;
                }
            } else {
                forward = Some(v);
                descended = true;
                break;
            }
        }
        if !descended {
            break;
        }
        pos += 1;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seqs(code: &BlockCode) -> Vec<Vec<usize>> {
        code.sorted_members()
            .unwrap()
            .iter()
            .map(|&i| index_to_sequence(i as usize, code.alphabet_size(), code.len()))
            .collect()
    }

    #[test]
    fn full_rate_keeps_everything() {
        let c = build_code(2, 1.0, 3, 0).unwrap();
        assert_eq!(c.size(), 8);
        assert!(!c.is_degenerate());
    }

    #[test]
    fn two_thirds_rate_example() {
        let c = build_code(2, 2.0 / 3.0, 3, 0).unwrap();
        assert_eq!(c.size(), 4);
        assert_eq!(
            seqs(&c),
            vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0], vec![1, 1, 1]]
        );
        assert_eq!(c.listing().unwrap(), "000\n001\n010\n111\n");
    }

    #[test]
    fn first_order_code_admits_alternations() {
        let c = build_code(2, 0.5, 4, 1).unwrap();
        assert_eq!(
            seqs(&c),
            vec![vec![0, 0, 0, 0], vec![0, 1, 0, 1], vec![1, 0, 1, 0], vec![1, 1, 1, 1]]
        );
        let per = ClassicalProcess::periodic(2, vec![0, 1]).unwrap();
        assert_eq!(code_measure(&per, &c).unwrap(), 1.0);
    }

    #[test]
    fn size_law() {
        for (l, r, n, k) in [(2, 0.7, 10, 0), (3, 1.2, 6, 1), (2, 0.3, 12, 2), (4, 1.5, 5, 0)] {
            let c = build_code(l, r, n, k).unwrap();
            assert_eq!(c.size(), 1u128 << log_code_size(n, r));
        }
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(build_code(2, 0.0, 4, 0).is_err());
        assert!(build_code(2, 1.1, 4, 0).is_err());
    }

    #[test]
    fn nr_rounding_is_robust() {
        // 0.7·10 evaluates to 6.999… in binary floating point.
        assert_eq!(log_code_size(10, 0.7), 7);
        assert_eq!(log_code_size(3, 2.0 / 3.0), 2);
    }

    #[test]
    fn empirical_entropy_cyclic() {
        assert_eq!(empirical_entropy(&[0, 1, 0, 1], 2, 1), 0.0);
        assert!((empirical_entropy(&[0, 0, 1, 1], 2, 1) - 1.0).abs() < 1e-15);
        assert!((empirical_entropy(&[0, 0, 1, 1], 2, 0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn type_codes_agree_with_dense() {
        for n in 1..=12 {
            for r in [0.3, 0.5, 0.7, 0.8] {
                let dense = build_code_with(2, r, n, 0, CodeMode::Dense).unwrap();
                let types = build_code_with(2, r, n, 0, CodeMode::Types).unwrap();
                assert_eq!(dense.size(), types.size());
                for idx in 0..(1usize << n) {
                    let s = index_to_sequence(idx, 2, n);
                    assert_eq!(dense.contains(&s), types.contains(&s), "n={n} r={r} idx={idx}");
                }
                let p = ClassicalProcess::markov(vec![0.7, 0.3, 0.4, 0.6]).unwrap();
                let a = code_measure(&p, &dense).unwrap();
                let b = code_measure(&p, &types).unwrap();
                assert!((a - b).abs() < 1e-13, "n={n} r={r}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn ternary_type_codes_agree_with_dense() {
        let p = ClassicalProcess::iid(vec![0.6, 0.3, 0.1]).unwrap();
        for n in 2..=7 {
            let dense = build_code_with(3, 1.0, n, 0, CodeMode::Dense).unwrap();
            let types = build_code_with(3, 1.0, n, 0, CodeMode::Types).unwrap();
            let a = code_measure(&p, &dense).unwrap();
            let b = code_measure(&p, &types).unwrap();
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn superblock_regrouping() {
        let base = build_code(2, 0.5, 4, 1).unwrap();
        let same = superblock_code(&base, 1).unwrap();
        assert_eq!(same, base);
        let sup = superblock_code(&base, 2).unwrap();
        assert_eq!(sup.alphabet_size(), 4);
        assert_eq!(sup.len(), 2);
        assert_eq!(sup.size(), base.size());
        let reference = build_code(4, 1.0, 2, 0).unwrap();
        assert!(missing_members(&reference, &sup).unwrap().is_empty());
        assert!(superblock_code(&base, 3).is_err());
    }

    #[test]
    fn higher_order_type_codes_not_implemented() {
        assert!(matches!(
            build_code_with(2, 0.5, 30, 1, CodeMode::Types),
            Err(Error::NotImplemented(_))
        ));
    }
}
