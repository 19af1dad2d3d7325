//! The eleven coset classes of RM(6,6)/RM(3,6), class identification and typing of
//! seven-variable functions.

use std::fmt;
use std::sync::OnceLock;

use crate::boolfn::BooleanFunction;
use crate::error::{Error, Result};
use crate::nonlin::{nl_r, NlTable};

pub const CLASS_COUNT: usize = 11;

const REPS: [&str; CLASS_COUNT] = [
    "0",
    "x1x2x3x4",
    "x1x2x4x5+x1x2x3x6",
    "x2x3x4x5+x1x3x4x6+x1x2x5x6",
    "x1x2x3x4x5",
    "x1x2x3x4x5+x1x2x3x6",
    "x1x2x3x4x5+x1x3x4x6+x1x2x5x6",
    "x1x2x3x4x5x6",
    "x1x2x3x4x5x6+x1x2x3x4",
    "x1x2x3x4x5x6+x1x2x4x5+x1x2x3x6",
    "x1x2x3x4x5x6+x2x3x4x5+x1x3x4x6+x1x2x5x6",
];

/// Representative `fn_index` of its class, as a six-variable function.
pub fn fn_rep(index: usize) -> Result<BooleanFunction> {
    let anf = REPS.get(index).ok_or(Error::BadClass(index))?;
    BooleanFunction::parse_anf(6, anf)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassLabel(u8);

impl ClassLabel {
    pub fn new(index: usize) -> Result<Self> {
        if index >= CLASS_COUNT {
            return Err(Error::BadClass(index));
        }
        Ok(Self(index as u8))
    }

    pub fn index(&self) -> usize {
        self.0 as usize
    }

    pub fn representative(&self) -> BooleanFunction {
        fn_rep(self.index()).expect("label is in range")
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fn{}", self.0)
    }
}

/// Unordered pair of classes, stored with `i <= j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeLabel {
    i: u8,
    j: u8,
}

impl TypeLabel {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        let (a, b) = (ClassLabel::new(a)?, ClassLabel::new(b)?);
        Ok(Self {
            i: a.0.min(b.0),
            j: a.0.max(b.0),
        })
    }

    pub fn i(&self) -> usize {
        self.i as usize
    }

    pub fn j(&self) -> usize {
        self.j as usize
    }

    pub fn is_diagonal(&self) -> bool {
        self.i == self.j
    }

    /// All 66 types in lexicographic order.
    pub fn all() -> impl Iterator<Item = TypeLabel> {
        (0..CLASS_COUNT as u8).flat_map(|i| (i..CLASS_COUNT as u8).map(move |j| TypeLabel { i, j }))
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// One row of the recomputed class table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassProperties {
    pub index: usize,
    pub degree: usize,
    pub nl2: u32,
    pub nl3: u32,
    pub ml2: u32,
}

pub fn class_properties(index: usize) -> Result<ClassProperties> {
    let f = fn_rep(index)?;
    Ok(ClassProperties {
        index,
        degree: f.degree(),
        nl2: nl_r(&f, 2)?,
        nl3: nl_r(&f, 3)?,
        ml2: NlTable::build(&f, 3)?.max_value(),
    })
}

/// Properties of all representatives, computed once per process.
pub fn table1() -> &'static [ClassProperties] {
    static CACHE: OnceLock<Vec<ClassProperties>> = OnceLock::new();
    CACHE.get_or_init(|| {
        (0..CLASS_COUNT)
            .map(|i| class_properties(i).expect("representatives are valid"))
            .collect()
    })
}

/// `(coset degree, nl_3)` of each representative; the pairs must be pairwise distinct.
fn invariant_pairs() -> &'static [(usize, u32); CLASS_COUNT] {
    static PAIRS: OnceLock<[(usize, u32); CLASS_COUNT]> = OnceLock::new();
    PAIRS.get_or_init(|| {
        let mut pairs = [(0, 0); CLASS_COUNT];
        for (i, p) in pairs.iter_mut().enumerate() {
            let f = fn_rep(i).expect("valid index");
            *p = (f.degree(), nl_r(&f, 3).expect("n = 6"));
        }
        for a in 0..CLASS_COUNT {
            for b in a + 1..CLASS_COUNT {
                assert_ne!(pairs[a], pairs[b], "classes {a} and {b} share an invariant pair");
            }
        }
        pairs
    })
}

/// The degree of the degree->=4 part of `f` and `nl_3(f)`; both are constant on the
/// AGL(6)-orbit of `f + RM(3,6)`.
pub fn coset_invariants(f: &BooleanFunction) -> Result<(usize, u32)> {
    if f.n() != 6 {
        return Err(Error::VariableCount(f.n()));
    }
    Ok((f.part_at_least(4).degree(), nl_r(f, 3)?))
}

pub fn classify_coset(f: &BooleanFunction) -> Result<ClassLabel> {
    let (d, v) = coset_invariants(f)?;
    invariant_pairs()
        .iter()
        .position(|&p| p == (d, v))
        .map(|i| ClassLabel(i as u8))
        .ok_or(Error::UnknownClass(d as u32, v))
}

/// Classes of the two halves of a seven-variable function.
pub fn type_of(f: &BooleanFunction) -> Result<TypeLabel> {
    if f.n() != 7 {
        return Err(Error::VariableCount(f.n()));
    }
    let (f1, f2) = f.split()?;
    TypeLabel::new(classify_coset(&f1)?.index(), classify_coset(&f2)?.index())
}

/// How a type is handled when ruling out `nl_3 = 21`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExclusionRule {
    /// Both halves have equal `nl_3`, so an odd total is impossible.
    Parity,
    /// The mixed bound is at most 20.
    Bound,
    /// The bound leaves 21 open; needs a dedicated check.
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExclusionEntry {
    pub label: TypeLabel,
    pub bound: u32,
    pub rule: ExclusionRule,
}

impl ExclusionEntry {
    pub fn excluded(&self) -> bool {
        self.rule != ExclusionRule::Open
    }
}

/// The target the exclusion is measured against.
pub const TARGET: u32 = 21;

pub fn exclusion_table_from(props: &[ClassProperties]) -> Vec<ExclusionEntry> {
    TypeLabel::all()
        .map(|label| {
            let (a, b) = (&props[label.i()], &props[label.j()]);
            let bound = (a.nl3 + b.ml2).min(b.nl3 + a.ml2);
            let rule = if label.is_diagonal() {
                ExclusionRule::Parity
            } else if bound < TARGET {
                ExclusionRule::Bound
            } else {
                ExclusionRule::Open
            };
            ExclusionEntry { label, bound, rule }
        })
        .collect()
}

pub fn exclusion_table() -> Vec<ExclusionEntry> {
    exclusion_table_from(table1())
}

/// Types whose bound leaves `nl_3 = 21` open.
pub fn open_types(table: &[ExclusionEntry]) -> Vec<TypeLabel> {
    table
        .iter()
        .filter(|e| !e.excluded())
        .map(|e| e.label)
        .collect()
}

/// `max_k nl_3(fn_k) + ml_2(fn_k)` over the given classes, with the maximizing classes.
pub fn rho_upper_bound_over(props: &[ClassProperties], classes: &[usize]) -> (u32, Vec<usize>) {
    let value = |k: usize| props[k].nl3 + props[k].ml2;
    let best = classes.iter().map(|&k| value(k)).max().unwrap_or(0);
    let at = classes.iter().copied().filter(|&k| value(k) == best).collect();
    (best, at)
}

pub fn rho_upper_bound() -> u32 {
    let all: Vec<usize> = (0..CLASS_COUNT).collect();
    rho_upper_bound_over(table1(), &all).0
}

/// A covering-radius value that is taken from the literature rather than computed here.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CitedBound {
    pub r: u32,
    pub n: u32,
    pub value: u32,
    pub exact: bool,
}

pub const LITERATURE_INPUTS: [CitedBound; 4] = [
    CitedBound { r: 2, n: 7, value: 40, exact: true },
    CitedBound { r: 2, n: 8, value: 96, exact: false },
    CitedBound { r: 2, n: 9, value: 216, exact: false },
    CitedBound { r: 4, n: 7, value: 8, exact: true },
];

/// `rho(3,7)` as established by the verification pipeline.
pub const RHO_3_7: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainBound {
    pub r: u32,
    pub n: u32,
    pub value: u32,
}

fn chain_value(r: u32, n: u32, rho37: u32) -> Option<u32> {
    if (r, n) == (3, 7) {
        return Some(rho37);
    }
    if let Some(c) = LITERATURE_INPUTS.iter().find(|c| c.r == r && c.n == n) {
        return Some(c.value);
    }
    if n <= 7 {
        return None;
    }
    Some(chain_value(r - 1, n - 1, rho37)? + chain_value(r, n - 1, rho37)?)
}

/// Upper bounds `rho(r,n) <= rho(r-1,n-1) + rho(r,n-1)` for r in {3,4}, n in {8,9,10}.
pub fn chain_bounds_from(rho37: u32) -> Vec<ChainBound> {
    [(3, 8), (3, 9), (3, 10), (4, 8), (4, 9), (4, 10)]
        .into_iter()
        .map(|(r, n)| ChainBound {
            r,
            n,
            value: chain_value(r, n, rho37).expect("all inputs are known"),
        })
        .collect()
}

pub fn chain_bounds() -> Vec<ChainBound> {
    chain_bounds_from(RHO_3_7)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representatives() {
        assert_eq!(fn_rep(0).unwrap(), BooleanFunction::zero(6).unwrap());
        assert_eq!(fn_rep(2).unwrap().to_anf_string(), "x1x2x4x5+x1x2x3x6");
        let f9 = fn_rep(9).unwrap();
        assert_eq!(f9.homogeneous_part(6), fn_rep(7).unwrap());
        assert_eq!(f9.homogeneous_part(4), fn_rep(2).unwrap());
        assert_eq!(fn_rep(11), Err(Error::BadClass(11)));
    }

    #[test]
    fn type_labels_normalize() {
        assert_eq!(TypeLabel::new(9, 2).unwrap(), TypeLabel::new(2, 9).unwrap());
        assert_eq!(TypeLabel::all().count(), 66);
        assert!(TypeLabel::new(3, 11).is_err());
    }

    #[test]
    fn classify_shifted_coset() {
        let f = fn_rep(5).unwrap() ^ BooleanFunction::parse_anf(6, "x1x2x3+x4").unwrap();
        assert_eq!(classify_coset(&f).unwrap().index(), 5);
        assert_eq!(classify_coset(&BooleanFunction::zero(6).unwrap()).unwrap().index(), 0);
    }

    #[test]
    fn chain_arithmetic() {
        let v: Vec<u32> = chain_bounds().iter().map(|c| c.value).collect();
        assert_eq!(v, vec![60, 156, 372, 28, 88, 244]);
    }

    #[test]
    fn rho_restricted_to_zero_class() {
        let props = [ClassProperties {
            index: 0,
            degree: 0,
            nl2: 0,
            nl3: 0,
            ml2: 0,
        }];
        assert_eq!(rho_upper_bound_over(&props, &[0]), (0, vec![0]));
    }
}
