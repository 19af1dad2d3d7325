//! Boolean functions on at most seven variables.
//!
//! Conventions used by every type and file format in the crate:
//!
//! * the point `x = (x1, ..., xn)` has index `i = sum x_j 2^(j-1)`, so `x1` is the
//!   least significant bit of the index;
//! * the monomial `prod_{j in S} x_j` has ANF index with bit `j-1` set for each `j in S`;
//! * a homogeneous degree-`r` function is identified with a coefficient word whose
//!   bit `k` is the coefficient of the `k`-th monomial of degree `r` in ascending
//!   mask order (see [`MonomialSet`]).

use std::fmt;
use std::ops::BitXor;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::BitAffine;

pub const MAX_VARS: usize = 7;

const MOBIUS_MASKS: [u128; 7] = [
    0x5555_5555_5555_5555_5555_5555_5555_5555,
    0x3333_3333_3333_3333_3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f_0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff_00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff_0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff_0000_0000_ffff_ffff,
    0x0000_0000_0000_0000_ffff_ffff_ffff_ffff,
];

/// Mask with the low `2^n` bits set.
#[inline]
pub fn full_mask(n: usize) -> u128 {
    if n >= 7 {
        u128::MAX
    } else {
        (1u128 << (1 << n)) - 1
    }
}

/// Binary Möbius transform of a packed `2^n`-bit vector. It is an involution and maps
/// ANF coefficients to truth tables and back.
#[inline]
pub fn mobius_word(mut v: u128, n: usize) -> u128 {
    for (i, &m) in MOBIUS_MASKS.iter().enumerate().take(n) {
        v ^= (v & m) << (1u32 << i);
    }
    v
}

/// Möbius transform of an explicit bit vector of length `2^n`.
pub fn mobius(coeffs: &[bool], n: usize) -> Result<Vec<bool>> {
    if n > MAX_VARS {
        return Err(Error::VariableCount(n));
    }
    let len = 1usize << n;
    if coeffs.len() != len {
        return Err(Error::LengthMismatch {
            expected: len,
            got: coeffs.len(),
        });
    }
    let packed = coeffs
        .iter()
        .enumerate()
        .fold(0u128, |acc, (i, &b)| acc | (u128::from(b) << i));
    let out = mobius_word(packed, n);
    Ok((0..len).map(|i| (out >> i) & 1 == 1).collect())
}

/// Bits of all ANF indices of popcount exactly `r` among `2^n` indices.
pub fn degree_mask(n: usize, r: usize) -> u128 {
    (0..1usize << n)
        .filter(|m| m.count_ones() as usize == r)
        .fold(0u128, |acc, m| acc | (1u128 << m))
}

/// An `n`-variable Boolean function with its truth table and ANF kept in sync.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n: u8,
    tt: u128,
    anf: u128,
}

impl BooleanFunction {
    fn check_n(n: usize) -> Result<()> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::VariableCount(n));
        }
        Ok(())
    }

    pub fn from_tt(n: usize, tt: u128) -> Result<Self> {
        Self::check_n(n)?;
        if tt & !full_mask(n) != 0 {
            return Err(Error::TruthTableOverflow(n));
        }
        Ok(Self::from_tt_unchecked(n, tt))
    }

    pub fn from_anf(n: usize, anf: u128) -> Result<Self> {
        Self::check_n(n)?;
        if anf & !full_mask(n) != 0 {
            return Err(Error::TruthTableOverflow(n));
        }
        Ok(Self::from_anf_unchecked(n, anf))
    }

    #[inline]
    pub(crate) fn from_tt_unchecked(n: usize, tt: u128) -> Self {
        Self {
            n: n as u8,
            tt,
            anf: mobius_word(tt, n),
        }
    }

    #[inline]
    pub(crate) fn from_anf_unchecked(n: usize, anf: u128) -> Self {
        Self {
            n: n as u8,
            tt: mobius_word(anf, n),
            anf,
        }
    }

    /// Sum of the given monomials (as variable masks); repeated monomials cancel.
    pub fn from_monomials(n: usize, monomials: &[u32]) -> Result<Self> {
        Self::check_n(n)?;
        let mut anf = 0u128;
        for &m in monomials {
            if (m as usize) >= (1 << n) {
                return Err(Error::Parse(format!(
                    "monomial mask {m:#b} uses a variable beyond x{n}"
                )));
            }
            anf ^= 1u128 << m;
        }
        Ok(Self::from_anf_unchecked(n, anf))
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::from_tt(n, 0)
    }

    pub fn one(n: usize) -> Result<Self> {
        Self::from_tt(n, full_mask(n))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn tt(&self) -> u128 {
        self.tt
    }

    #[inline]
    pub fn anf(&self) -> u128 {
        self.anf
    }

    #[inline]
    pub fn eval(&self, x: usize) -> bool {
        (self.tt >> x) & 1 == 1
    }

    #[inline]
    pub fn weight(&self) -> u32 {
        self.tt.count_ones()
    }

    pub fn distance(&self, other: &Self) -> Result<u32> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n(), other.n()));
        }
        Ok((self.tt ^ other.tt).count_ones())
    }

    /// Algebraic degree; the zero function has degree 0.
    pub fn degree(&self) -> usize {
        let mut anf = self.anf;
        let mut deg = 0;
        while anf != 0 {
            let m = anf.trailing_zeros();
            deg = deg.max(m.count_ones() as usize);
            anf &= anf - 1;
        }
        deg
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n(), other.n()));
        }
        Ok(Self {
            n: self.n,
            tt: self.tt ^ other.tt,
            anf: self.anf ^ other.anf,
        })
    }

    /// `(x_{n+1} + 1) f1 + x_{n+1} f2`: `f1` on the lower half of the cube, `f2` on the upper.
    pub fn concat(f1: &Self, f2: &Self) -> Result<Self> {
        if f1.n != f2.n {
            return Err(Error::DimensionMismatch(f1.n(), f2.n()));
        }
        let n = f1.n();
        if n >= MAX_VARS {
            return Err(Error::VariableCount(n + 1));
        }
        let half = 1u32 << n;
        Ok(Self {
            n: (n + 1) as u8,
            tt: f1.tt | (f2.tt << half),
            anf: f1.anf | ((f1.anf ^ f2.anf) << half),
        })
    }

    /// Inverse of [`concat`](Self::concat): restrictions to `x_n = 0` and `x_n = 1`.
    pub fn split(&self) -> Result<(Self, Self)> {
        let n = self.n();
        if n < 2 {
            return Err(Error::VariableCount(n - 1));
        }
        let half = 1u32 << (n - 1);
        let low = full_mask(n - 1);
        Ok((
            Self::from_tt_unchecked(n - 1, self.tt & low),
            Self::from_tt_unchecked(n - 1, (self.tt >> half) & low),
        ))
    }

    /// `f ∘ L`, i.e. the function `x -> f(Ax + b)`.
    pub fn apply_affine(&self, map: &BitAffine) -> Result<Self> {
        if map.n() != self.n() {
            return Err(Error::DimensionMismatch(self.n(), map.n()));
        }
        Ok(self.apply_affine_unchecked(map))
    }

    #[inline]
    pub(crate) fn apply_affine_unchecked(&self, map: &BitAffine) -> Self {
        let n = self.n();
        let mut tt = 0u128;
        let mut image = map.translation() as usize;
        // Walk the cube in Gray-code order so each image differs by one column.
        let cols = map.columns();
        let mut x = 0usize;
        for step in 0..(1usize << n) {
            if step > 0 {
                let bit = step.trailing_zeros() as usize;
                x ^= 1 << bit;
                image ^= cols[bit] as usize;
            }
            tt |= ((self.tt >> image) & 1) << x;
        }
        Self::from_tt_unchecked(n, tt)
    }

    /// The operator `T_r`: keep only the monomials of degree exactly `r`.
    pub fn homogeneous_part(&self, r: usize) -> Self {
        Self::from_anf_unchecked(self.n(), self.anf & degree_mask(self.n(), r))
    }

    /// Sum of the homogeneous parts of degree `>= r`.
    pub fn part_at_least(&self, r: usize) -> Self {
        let mask = (r..=self.n()).fold(0u128, |m, d| m | degree_mask(self.n(), d));
        Self::from_anf_unchecked(self.n(), self.anf & mask)
    }

    pub fn hex_digits(n: usize) -> usize {
        ((1usize << n) / 4).max(1)
    }

    /// Hex truth table: the most significant nibble holds the highest point indices.
    pub fn to_hex(&self) -> String {
        let digits = Self::hex_digits(self.n());
        (0..digits)
            .rev()
            .map(|d| {
                let nib = ((self.tt >> (4 * d)) & 0xf) as u32;
                char::from_digit(nib, 16).unwrap().to_ascii_uppercase()
            })
            .collect()
    }

    pub fn from_hex(n: usize, s: &str) -> Result<Self> {
        Self::check_n(n)?;
        let s = s.trim();
        let s = s
            .strip_prefix("0x")
            .or_else(|| s.strip_prefix("0X"))
            .unwrap_or(s);
        let digits = Self::hex_digits(n);
        if s.len() != digits {
            return Err(Error::Parse(format!(
                "expected {digits} hex digits for {n} variables, got {}",
                s.len()
            )));
        }
        let mut tt = 0u128;
        for c in s.chars() {
            let v = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?}")))?;
            tt = (tt << 4) | u128::from(v);
        }
        Self::from_tt(n, tt)
    }

    /// ANF as a `+`-separated monomial list sorted by ascending mask, e.g. `x1x2x4x5+x1x2x3x6`.
    pub fn to_anf_string(&self) -> String {
        if self.anf == 0 {
            return "0".to_string();
        }
        let mut terms = Vec::new();
        let mut anf = self.anf;
        while anf != 0 {
            let m = anf.trailing_zeros();
            anf &= anf - 1;
            if m == 0 {
                terms.push("1".to_string());
            } else {
                let t: String = (0..self.n())
                    .filter(|j| (m >> j) & 1 == 1)
                    .map(|j| format!("x{}", j + 1))
                    .collect();
                terms.push(t);
            }
        }
        terms.join("+")
    }

    /// Parses an ANF string over `n` variables. Accepts `0`, `1`, and products such as
    /// `x1x2` or `x1*x2`; whitespace is ignored.
    pub fn parse_anf(n: usize, s: &str) -> Result<Self> {
        let monomials = parse_monomials(s)?;
        Self::from_monomials(n, &monomials)
    }

    /// Highest variable index mentioned in an ANF string (0 if none).
    pub fn anf_max_variable(s: &str) -> Result<usize> {
        Ok(parse_monomials(s)?
            .iter()
            .map(|&m| 32 - m.leading_zeros() as usize)
            .max()
            .unwrap_or(0))
    }
}

fn parse_monomials(s: &str) -> Result<Vec<u32>> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(Error::Parse("empty ANF".into()));
    }
    let mut out = Vec::new();
    for term in cleaned.split('+') {
        match term {
            "0" => continue,
            "1" => {
                out.push(0);
                continue;
            }
            "" => return Err(Error::Parse(format!("empty term in {s:?}"))),
            _ => {}
        }
        let mut mask = 0u32;
        for factor in term.split('*') {
            let mut rest = factor;
            if rest.is_empty() {
                return Err(Error::Parse(format!("bad term {term:?}")));
            }
            while !rest.is_empty() {
                let tail = rest
                    .strip_prefix('x')
                    .ok_or_else(|| Error::Parse(format!("bad term {term:?}")))?;
                let len = tail.chars().take_while(|c| c.is_ascii_digit()).count();
                if len == 0 {
                    return Err(Error::Parse(format!("missing variable index in {term:?}")));
                }
                let idx: usize = tail[..len]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad index in {term:?}")))?;
                if idx == 0 || idx > MAX_VARS {
                    return Err(Error::Parse(format!("variable x{idx} out of range")));
                }
                mask |= 1 << (idx - 1);
                rest = &tail[len..];
            }
        }
        out.push(mask);
    }
    Ok(out)
}

impl BitXor for BooleanFunction {
    type Output = BooleanFunction;

    /// Pointwise sum. Panics if the variable counts differ.
    fn bitxor(self, rhs: Self) -> Self {
        self.try_add(&rhs)
            .expect("adding Boolean functions with different variable counts")
    }
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BooleanFunction(n={}, {})", self.n, self.to_anf_string())
    }
}

impl fmt::Display for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_anf_string())
    }
}

/// The degree-`r` monomials on `n` variables in ascending mask order. The position of a
/// monomial in this list is its bit in a coefficient word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialSet {
    n: usize,
    r: usize,
    members: Vec<u8>,
    index: [u8; 128],
}

const NO_INDEX: u8 = u8::MAX;

impl MonomialSet {
    pub fn new(n: usize, r: usize) -> Result<Self> {
        if n > MAX_VARS {
            return Err(Error::VariableCount(n));
        }
        // r > n yields the empty set: H_n^(r) = {} and only the zero word exists
        let members: Vec<u8> = (0..1u32 << n)
            .filter(|m| m.count_ones() as usize == r)
            .map(|m| m as u8)
            .collect();
        let mut index = [NO_INDEX; 128];
        for (i, &m) in members.iter().enumerate() {
            index[m as usize] = i as u8;
        }
        Ok(Self {
            n,
            r,
            members,
            index,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn members(&self) -> &[u8] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Position of the monomial `mask`, if it has degree `r`.
    pub fn position(&self, mask: u8) -> Option<usize> {
        match self.index.get(mask as usize) {
            Some(&i) if i != NO_INDEX => Some(i as usize),
            _ => None,
        }
    }

    /// ANF bits of the homogeneous function with the given coefficient word.
    #[inline]
    pub fn word_to_anf(&self, mut word: u64) -> u128 {
        let mut anf = 0u128;
        while word != 0 {
            let k = word.trailing_zeros() as usize;
            word &= word - 1;
            anf |= 1u128 << self.members[k];
        }
        anf
    }

    pub fn function(&self, word: u64) -> BooleanFunction {
        BooleanFunction::from_anf_unchecked(self.n, self.word_to_anf(word))
    }

    /// Coefficient word of `T_r(f)`.
    #[inline]
    pub fn word_of_anf(&self, anf: u128) -> u64 {
        self.members
            .iter()
            .enumerate()
            .fold(0u64, |w, (k, &m)| w | ((((anf >> m) & 1) as u64) << k))
    }

    pub fn word_of(&self, f: &BooleanFunction) -> u64 {
        self.word_of_anf(f.anf())
    }
}

impl FromStr for MonomialOrdering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == MonomialOrdering::TAG {
            Ok(MonomialOrdering)
        } else {
            Err(Error::Format(format!("unknown monomial ordering tag {s:?}")))
        }
    }
}

/// Marker for the canonical bit/monomial convention, written into file headers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonomialOrdering;

impl MonomialOrdering {
    pub const TAG: &'static str = "x1-lsb/asc-mask";
}
