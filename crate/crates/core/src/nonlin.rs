//! Nonlinearity engines and the level-set tables built on them.
//!
//! For a base function `f` on `m` variables and an order `r`, the *shift table* maps each
//! coefficient word `g` of `H_m^(r) ∪ {0}` to `nl_{r-1}(f + g)`. Writing
//! `g = p + x_m q` with `p ∈ H_{m-1}^(r)` and `q ∈ H_{m-1}^(r-1)`, the recursion
//!
//! `nl_{r-1}(f + g) = min_h nl_{r-2}(f1 + p + h) + nl_{r-2}(f2 + p + q + h)`
//!
//! turns the table for a fixed `p` into a (min, +) convolution over XOR of two tables of
//! order `r - 1` on `m - 1` variables. The word of `g` is `word(p) | word(q) << |H_{m-1}^(r)|`
//! because monomials containing `x_m` come last in ascending mask order.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::bitset::Bitset;
use crate::boolfn::{full_mask, mobius_word, BooleanFunction, MonomialSet};
use crate::error::{Error, Result};

/// Largest coefficient-word width a table may use.
pub const MAX_TABLE_BITS: usize = 24;

/// Largest code dimension the brute-force engine enumerates; 26 admits RM(3,5).
pub const MAX_BRUTEFORCE_DIM: usize = 26;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Distance to the nearest constant.
pub fn nl0(f: &BooleanFunction) -> u32 {
    let w = f.weight();
    w.min((1u32 << f.n()) - w)
}

/// First-order nonlinearity from the Walsh-Hadamard spectrum.
pub fn nl1(f: &BooleanFunction) -> u32 {
    let n = f.n();
    let len = 1usize << n;
    let mut w = [0i32; 128];
    for (x, v) in w.iter_mut().enumerate().take(len) {
        *v = if f.eval(x) { -1 } else { 1 };
    }
    let mut h = 1;
    while h < len {
        for i in (0..len).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (w[j], w[j + h]);
                w[j] = a + b;
                w[j + h] = a - b;
            }
        }
        h *= 2;
    }
    let max = w[..len].iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    (1u32 << (n - 1)) - max / 2
}

fn var_tt(n: usize, j: usize) -> u128 {
    mobius_word(1u128 << (1 << j), n)
}

/// Exact `nl_r` by Gray-code enumeration of every codeword of RM(r, n).
pub fn nl_r_bruteforce(f: &BooleanFunction, r: usize) -> Result<u32> {
    let n = f.n();
    let basis: Vec<u128> = (0..1u128 << n)
        .filter(|m| m.count_ones() as usize <= r)
        .map(|m| mobius_word(1u128 << m, n))
        .collect();
    if basis.len() > MAX_BRUTEFORCE_DIM {
        return Err(Error::TooLarge(format!(
            "RM({r},{n}) has dimension {} > {MAX_BRUTEFORCE_DIM}",
            basis.len()
        )));
    }
    if n <= 5 {
        let basis: Vec<u32> = basis.iter().map(|&b| b as u32).collect();
        return Ok(min_weight_over_span(f.tt() as u32, &basis, |x| x.count_ones()));
    }
    if n == 6 {
        let basis: Vec<u64> = basis.iter().map(|&b| b as u64).collect();
        return Ok(min_weight_over_span(f.tt() as u64, &basis, |x| x.count_ones()));
    }
    Ok(min_weight_over_span(f.tt(), &basis, |x| x.count_ones()))
}

/// `min wt(t + c)` over the span of `basis`, by a Gray-code walk over all but the first
/// few basis vectors and a precomputed block of combinations of those.
fn min_weight_over_span<T>(t: T, basis: &[T], weight: impl Fn(T) -> u32) -> u32
where
    T: Copy + std::ops::BitXor<Output = T>,
{
    let inner = basis.len().min(8);
    let mut block = vec![t; 1 << inner];
    for i in 1..block.len() {
        block[i] = block[i & (i - 1)] ^ basis[i.trailing_zeros() as usize];
    }
    let outer = &basis[inner..];
    let mut cw = None::<T>;
    let mut best = u32::MAX;
    for i in 0u64..(1u64 << outer.len()) {
        if i > 0 {
            let b = outer[i.trailing_zeros() as usize];
            cw = Some(cw.map_or(b, |c| c ^ b));
        }
        let m = match cw {
            None => block.iter().map(|&x| weight(x)).min(),
            Some(c) => block.iter().map(|&x| weight(x ^ c)).min(),
        };
        best = best.min(m.expect("nonempty block"));
        if best == 0 {
            break;
        }
    }
    best
}

/// `nl_r` via the half-function recursion. Requires `2 <= r <= n - 1`.
pub fn nl_r_recursive(f: &BooleanFunction, r: usize) -> Result<u32> {
    let n = f.n();
    if r < 2 || r + 1 > n {
        return Err(Error::OrderOutOfRange { n, r });
    }
    let (f1, f2) = f.split()?;
    let t1 = shift_values(&f1, r, false);
    let t2 = shift_values(&f2, r, false);
    Ok(t1
        .iter()
        .zip(&t2)
        .map(|(&a, &b)| u32::from(a) + u32::from(b))
        .min()
        .expect("tables are nonempty"))
}

/// `nl_r` for any order, dispatching to the cheapest exact engine.
pub fn nl_r(f: &BooleanFunction, r: usize) -> Result<u32> {
    match r {
        0 => Ok(nl0(f)),
        1 => Ok(nl1(f)),
        _ if r >= f.n() => Ok(0),
        _ => nl_r_recursive(f, r),
    }
}

/// `ml_r(f) = max_{g ∈ H_n^(r+1) ∪ {0}} nl_r(f + g)`. Requires `1 <= r <= n - 1`.
pub fn ml_r(f: &BooleanFunction, r: usize) -> Result<u32> {
    let n = f.n();
    if r == 0 || r + 1 > n {
        return Err(Error::OrderOutOfRange { n, r });
    }
    Ok(NlTable::build(f, r + 1)?.max_value())
}

/// `out[q] = min_g u[g] + v[g ^ q]`.
fn xor_min_plus(u: &[u8], v: &[u8], out: &mut [u8]) {
    const LANES: usize = 32;
    let n = u.len();
    if n < LANES {
        for (q, o) in out.iter_mut().enumerate() {
            *o = (0..n).map(|g| u[g] + v[g ^ q]).min().expect("nonempty");
        }
        return;
    }
    // Pre-permute u by the low XOR bits so the inner loop is a plain lane-wise min.
    let blocks = n / LANES;
    let mut perm = vec![0u8; LANES * n];
    for (ql, row) in perm.chunks_exact_mut(n).enumerate() {
        for (g, p) in row.iter_mut().enumerate() {
            *p = u[g ^ ql];
        }
    }
    for qh in 0..blocks {
        for ql in 0..LANES {
            let up = &perm[ql * n..(ql + 1) * n];
            let mut acc = [u8::MAX; LANES];
            for gh in 0..blocks {
                let a = &up[gh * LANES..(gh + 1) * LANES];
                let o = (gh ^ qh) * LANES;
                let b = &v[o..o + LANES];
                for l in 0..LANES {
                    acc[l] = acc[l].min(a[l].wrapping_add(b[l]));
                }
            }
            out[qh * LANES + ql] = acc.iter().copied().min().expect("nonempty");
        }
    }
}

/// `values[w] = nl_{r-1}(base + g_w)` over all coefficient words of `H_m^(r) ∪ {0}`.
fn shift_values(base: &BooleanFunction, r: usize, parallel: bool) -> Vec<u8> {
    let m = base.n();
    if r > m {
        return vec![0];
    }
    if r == 1 {
        let vars: Vec<u128> = (0..m).map(|j| var_tt(m, j)).collect();
        let full = 1u32 << m;
        let mask = full_mask(m);
        let mut out = vec![0u8; 1 << m];
        let mut cur = base.tt();
        for i in 0usize..1 << m {
            if i > 0 {
                cur ^= vars[i.trailing_zeros() as usize];
            }
            let w = (cur & mask).count_ones();
            out[i ^ (i >> 1)] = w.min(full - w) as u8;
        }
        return out;
    }
    let low = MonomialSet::new(m - 1, r).expect("m - 1 <= 6");
    let a = low.len();
    let c = binomial(m - 1, r - 1);
    let (b1, b2) = base.split().expect("m >= r >= 2");
    let width = 1usize << c;
    let mut rows = vec![0u8; width << a];
    let fill = |(w, row): (usize, &mut [u8])| {
        let p = low.function(w as u64);
        let u = shift_values(&(b1 ^ p), r - 1, false);
        let v = shift_values(&(b2 ^ p), r - 1, false);
        xor_min_plus(&u, &v, row);
    };
    if parallel {
        rows.par_chunks_mut(width).enumerate().for_each(fill);
    } else {
        rows.chunks_mut(width).enumerate().for_each(fill);
    }
    if a == 0 {
        return rows;
    }
    let mut out = vec![0u8; rows.len()];
    for (w, row) in rows.chunks(width).enumerate() {
        for (q, &val) in row.iter().enumerate() {
            out[w | (q << a)] = val;
        }
    }
    out
}

/// Runs `job` on a pool of `workers` threads, or on the global pool when `workers == 0`.
pub fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    Ok(pool.install(job))
}

/// The map `g -> nl_{r-1}(base + g)` over every coefficient word of `H_n^(r) ∪ {0}`.
#[derive(Clone, PartialEq, Eq)]
pub struct NlTable {
    base: BooleanFunction,
    r: usize,
    values: Vec<u8>,
}

impl NlTable {
    fn check_order(n: usize, r: usize) -> Result<usize> {
        if r == 0 || r > n {
            return Err(Error::OrderOutOfRange { n, r });
        }
        let bits = binomial(n, r);
        if bits > MAX_TABLE_BITS {
            return Err(Error::TooLarge(format!(
                "table over H_{n}^({r}) needs 2^{bits} entries"
            )));
        }
        Ok(bits)
    }

    /// Builds on the current rayon pool.
    pub fn build(base: &BooleanFunction, r: usize) -> Result<Self> {
        Self::check_order(base.n(), r)?;
        Ok(Self {
            base: *base,
            r,
            values: shift_values(base, r, true),
        })
    }

    /// Builds on a dedicated pool of `workers` threads (0 = global pool). The result does
    /// not depend on the worker count.
    pub fn build_with_workers(base: &BooleanFunction, r: usize, workers: usize) -> Result<Self> {
        with_workers(workers, || Self::build(base, r))?
    }

    /// Reassembles a table from stored values, checking only the length.
    pub fn from_parts(base: BooleanFunction, r: usize, values: Vec<u8>) -> Result<Self> {
        let bits = Self::check_order(base.n(), r)?;
        if values.len() != 1 << bits {
            return Err(Error::LengthMismatch {
                expected: 1 << bits,
                got: values.len(),
            });
        }
        Ok(Self { base, r, values })
    }

    pub fn base(&self) -> &BooleanFunction {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn monomials(&self) -> MonomialSet {
        MonomialSet::new(self.n(), self.r).expect("validated at construction")
    }

    #[inline]
    pub fn value(&self, word: usize) -> u32 {
        u32::from(self.values[word])
    }

    /// `nl_{r-1}(base)`.
    pub fn nl_of_base(&self) -> u32 {
        self.value(0)
    }

    /// `ml_{r-1}(base)`, the largest attained value.
    pub fn max_value(&self) -> u32 {
        u32::from(*self.values.iter().max().expect("nonempty"))
    }

    /// `|F(k)|` for every attained `k`, ascending.
    pub fn counts(&self) -> BTreeMap<u32, usize> {
        let mut hist = [0usize; 256];
        for &v in &self.values {
            hist[v as usize] += 1;
        }
        hist.iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| (k as u32, c))
            .collect()
    }

    pub fn count(&self, k: u32) -> usize {
        self.values.iter().filter(|&&v| u32::from(v) == k).count()
    }

    /// Coefficient words of `F(k)`, ascending.
    pub fn members(&self, k: u32) -> Vec<u32> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| u32::from(v) == k)
            .map(|(g, _)| g as u32)
            .collect()
    }

    pub fn level_set(&self, k: u32) -> LevelSet {
        LevelSet {
            k,
            members: self.members_where(|v| v == k),
        }
    }

    /// `∪_{k' >= k} F(k')`.
    pub fn at_least(&self, k: u32) -> Bitset {
        self.members_where(|v| v >= k)
    }

    /// `∪_{k ∈ ks} F(k)`.
    pub fn union_of(&self, ks: &[u32]) -> Bitset {
        self.members_where(|v| ks.contains(&v))
    }

    fn members_where(&self, pred: impl Fn(u32) -> bool) -> Bitset {
        Bitset::from_indices(
            self.values.len(),
            self.values
                .iter()
                .enumerate()
                .filter(|(_, &v)| pred(u32::from(v)))
                .map(|(g, _)| g),
        )
    }

    /// The common parity of all attained values, if they share one.
    pub fn common_parity(&self) -> Option<u32> {
        let p = self.value(0) & 1;
        self.values
            .iter()
            .all(|&v| u32::from(v) & 1 == p)
            .then_some(p)
    }
}

impl std::fmt::Debug for NlTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "NlTable(base={}, r={}, counts={:?})",
            self.base,
            self.r,
            self.counts()
        )
    }
}

/// One level set `F(k)` as a bitset over coefficient words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSet {
    pub k: u32,
    pub members: Bitset,
}

impl LevelSet {
    pub fn len(&self) -> usize {
        self.members.count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, word: usize) -> bool {
        self.members.contains(word)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    Holds,
    Counterexample { h: u32, g: u32 },
}

impl Coverage {
    pub fn holds(&self) -> bool {
        matches!(self, Coverage::Holds)
    }
}

/// Decides `nl_r(f1 ‖ f2) >= t` from the two halves' tables: for every attained `h`,
/// `F_{f1}(h)` must lie inside `∪_{k >= t-h} F_{f2}(k)`.
pub fn check_covering_condition(t1: &NlTable, t2: &NlTable, t: u32) -> Result<Coverage> {
    if t1.n() != t2.n() {
        return Err(Error::DimensionMismatch(t1.n(), t2.n()));
    }
    if t1.r() != t2.r() {
        return Err(Error::OrderOutOfRange {
            n: t2.n(),
            r: t2.r(),
        });
    }
    for &h in t1.counts().keys() {
        if h >= t {
            continue;
        }
        let allowed = t2.at_least(t - h);
        let bad = t1
            .values()
            .iter()
            .enumerate()
            .find(|&(g, &v)| u32::from(v) == h && !allowed.contains(g));
        if let Some((g, _)) = bad {
            return Ok(Coverage::Counterexample { h, g: g as u32 });
        }
    }
    Ok(Coverage::Holds)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParityVerdict {
    pub nl: u32,
    pub nl_low: u32,
    pub nl_high: u32,
    pub holds: bool,
}

/// If `nl_r(f)` is odd then exactly one of `nl_r(f1)`, `nl_r(f2)` is odd.
pub fn parity_check(f: &BooleanFunction, r: usize) -> Result<ParityVerdict> {
    let n = f.n();
    if r == 0 || r + 2 > n {
        return Err(Error::OrderOutOfRange { n, r });
    }
    let (f1, f2) = f.split()?;
    let nl = nl_r(f, r)?;
    let nl_low = nl_r(&f1, r)?;
    let nl_high = nl_r(&f2, r)?;
    Ok(ParityVerdict {
        nl,
        nl_low,
        nl_high,
        holds: nl % 2 == 0 || (nl_low + nl_high) % 2 == 1,
    })
}
