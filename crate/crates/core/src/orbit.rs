//! Coset keys for RM(6,6)/RM(3,6), the AGL(6) action on them and breadth-first orbit
//! enumeration that also collects the matrix parts of the reaching transformations.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::bitset::Bitset;
use crate::boolfn::{BooleanFunction, MonomialSet};
use crate::classify::{fn_rep, CLASS_COUNT};
use crate::error::{Error, Result};
use crate::field::{agl_generators, AffineMap, BitAffine, FieldSpec};

pub const KEY_BITS: usize = 22;
pub const KEY_SPACE: usize = 1 << KEY_BITS;

/// Bit offsets of the degree-4, degree-5 and degree-6 blocks.
const OFFSETS: [usize; 3] = [0, 15, 21];

struct KeyLayout {
    sets: [MonomialSet; 3],
}

fn layout() -> &'static KeyLayout {
    static L: OnceLock<KeyLayout> = OnceLock::new();
    L.get_or_init(|| KeyLayout {
        sets: [4, 5, 6].map(|d| MonomialSet::new(6, d).expect("n = 6")),
    })
}

/// The coset `f + RM(3,6)` as its 22 coefficients of degree at least four.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CosetKey(u32);

impl CosetKey {
    pub fn from_bits(bits: u32) -> Result<Self> {
        if bits as usize >= KEY_SPACE {
            return Err(Error::TooLarge(format!("coset key {bits:#x} exceeds 22 bits")));
        }
        Ok(Self(bits))
    }

    pub fn bits(&self) -> u32 {
        self.0
    }

    /// The representative with no monomials of degree below four.
    pub fn to_function(&self) -> BooleanFunction {
        let l = layout();
        let anf = l
            .sets
            .iter()
            .zip(OFFSETS)
            .fold(0u128, |acc, (set, off)| {
                let width = set.len();
                let word = (u64::from(self.0) >> off) & ((1u64 << width) - 1);
                acc | set.word_to_anf(word)
            });
        BooleanFunction::from_anf(6, anf).expect("six variables")
    }
}

impl fmt::Debug for CosetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CosetKey({:#08x})", self.0)
    }
}

pub fn coset_key(f: &BooleanFunction) -> Result<CosetKey> {
    if f.n() != 6 {
        return Err(Error::VariableCount(f.n()));
    }
    let l = layout();
    let bits = l
        .sets
        .iter()
        .zip(OFFSETS)
        .fold(0u64, |acc, (set, off)| acc | (set.word_of(f) << off));
    Ok(CosetKey(bits as u32))
}

/// The coset of `f ∘ L` for any `f` in the coset `key`.
pub fn coset_act(key: CosetKey, map: &BitAffine) -> Result<CosetKey> {
    if map.n() != 6 {
        return Err(Error::DimensionMismatch(6, map.n()));
    }
    coset_key(&key.to_function().apply_affine_unchecked(map))
}

pub fn coset_act_affine(key: CosetKey, map: &AffineMap) -> Result<CosetKey> {
    coset_act(key, &BitAffine::try_from(map)?)
}

/// `key -> key(f ∘ L)` as a GF(2)-linear map on keys, evaluated by byte lookups.
#[derive(Clone)]
pub struct KeyAction {
    tables: [[u32; 256]; 3],
}

impl KeyAction {
    pub fn new(map: &BitAffine) -> Result<Self> {
        let mut images = [0u32; KEY_BITS];
        for (b, img) in images.iter_mut().enumerate() {
            *img = coset_act(CosetKey(1 << b), map)?.0;
        }
        let mut tables = [[0u32; 256]; 3];
        for (t, table) in tables.iter_mut().enumerate() {
            for (byte, entry) in table.iter_mut().enumerate() {
                *entry = (0..8)
                    .filter(|&i| (byte >> i) & 1 == 1 && 8 * t + i < KEY_BITS)
                    .fold(0, |acc, i| acc ^ images[8 * t + i]);
            }
        }
        Ok(Self { tables })
    }

    #[inline]
    pub fn apply(&self, key: CosetKey) -> CosetKey {
        let k = key.0 as usize;
        CosetKey(
            self.tables[0][k & 0xff] ^ self.tables[1][(k >> 8) & 0xff] ^ self.tables[2][k >> 16],
        )
    }
}

/// Distinct 6x6 invertible matrices over GF(2), kept sorted by packed key
/// ([`BitAffine::matrix_key`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixSet {
    keys: Vec<u64>,
}

impl MatrixSet {
    pub const DIM: usize = 6;

    /// Sorts, deduplicates and checks every key is an invertible matrix.
    pub fn from_keys(mut keys: Vec<u64>) -> Result<Self> {
        keys.sort_unstable();
        keys.dedup();
        for &k in &keys {
            if k >> 36 != 0 {
                return Err(Error::Format(format!("matrix key {k:#x} exceeds 36 bits")));
            }
            BitAffine::from_matrix_key(Self::DIM, k, 0)?;
        }
        Ok(Self { keys })
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn contains(&self, key: u64) -> bool {
        self.keys.binary_search(&key).is_ok()
    }

    pub fn matrix(&self, i: usize) -> BitAffine {
        BitAffine::from_matrix_key(Self::DIM, self.keys[i], 0).expect("validated on construction")
    }

    pub fn iter(&self) -> impl Iterator<Item = BitAffine> + '_ {
        (0..self.len()).map(|i| self.matrix(i))
    }
}

/// One transcript row: `key` was first reached from `parent` by generator `generator`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub key: CosetKey,
    pub parent: CosetKey,
    pub generator: u8,
}

#[derive(Clone, Copy, Debug)]
pub struct BfsOptions {
    pub collect_matrices: bool,
    pub transcript: bool,
    /// Upper bound on the number of visited cosets.
    pub cap: usize,
}

impl Default for BfsOptions {
    fn default() -> Self {
        Self {
            collect_matrices: true,
            transcript: false,
            cap: KEY_SPACE,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BfsResult {
    pub orbit_size: usize,
    pub matrices: MatrixSet,
    pub visited: Bitset,
    pub transcript: Option<Vec<TranscriptEntry>>,
}

/// Breadth-first enumeration of the orbit of `start` under the group generated by `gens`.
///
/// The queue holds `(f, L)` with `f = start ∘ L`. Each unseen `f ∘ G` is marked, queued
/// with `L ∘ G`, and the matrix part of `L ∘ G` is recorded. The start itself is not
/// pre-marked, so it is counted once it is reached again.
pub fn bfs_orbit(start: CosetKey, gens: &[BitAffine], opts: BfsOptions) -> Result<BfsResult> {
    if gens.is_empty() {
        return Err(Error::Precondition("at least one generator required".into()));
    }
    if let Some(g) = gens.iter().find(|g| g.n() != 6) {
        return Err(Error::DimensionMismatch(6, g.n()));
    }
    let actions: Vec<KeyAction> = gens.iter().map(KeyAction::new).collect::<Result<_>>()?;
    let mut visited = Bitset::new(KEY_SPACE);
    let mut size = 0usize;
    let mut matrices: HashSet<u64> = HashSet::new();
    let mut transcript = opts.transcript.then(Vec::new);
    let mut queue = VecDeque::new();
    queue.push_back((start, BitAffine::identity(6)));
    while let Some((f, l)) = queue.pop_front() {
        for (gi, (g, act)) in gens.iter().zip(&actions).enumerate() {
            let fg = act.apply(f);
            if visited.contains(fg.0 as usize) {
                continue;
            }
            visited.insert(fg.0 as usize);
            size += 1;
            if size > opts.cap {
                return Err(Error::ClosureCap(opts.cap));
            }
            let lg = l.compose_unchecked(g);
            if opts.collect_matrices {
                matrices.insert(lg.matrix_key());
            }
            if let Some(t) = transcript.as_mut() {
                t.push(TranscriptEntry {
                    key: fg,
                    parent: f,
                    generator: gi as u8,
                });
            }
            queue.push_back((fg, lg));
        }
    }
    Ok(BfsResult {
        orbit_size: size,
        matrices: MatrixSet::from_keys(matrices.into_iter().collect())?,
        visited,
        transcript,
    })
}

/// The two-element generating set of AGL(6, F2) as bit maps.
pub fn agl6_generators() -> Result<[BitAffine; 2]> {
    let f2 = Arc::new(FieldSpec::new(2)?);
    let (a, b) = agl_generators(6, &f2)?;
    Ok([BitAffine::try_from(&a)?, BitAffine::try_from(&b)?])
}

pub fn orbit_length(index: usize) -> Result<usize> {
    let start = coset_key(&fn_rep(index)?)?;
    let opts = BfsOptions {
        collect_matrices: false,
        ..BfsOptions::default()
    };
    Ok(bfs_orbit(start, &agl6_generators()?, opts)?.orbit_size)
}

/// Orbit lengths of the eleven representatives, in class order.
pub fn all_orbit_lengths() -> Result<[usize; CLASS_COUNT]> {
    let mut out = [0usize; CLASS_COUNT];
    for (i, o) in out.iter_mut().enumerate() {
        *o = orbit_length(i)?;
    }
    Ok(out)
}

/// The matrix set collected while enumerating the orbit of `fn_10 + RM(3,6)`.
pub fn fn10_matrix_set() -> Result<BfsResult> {
    let start = coset_key(&fn_rep(10)?)?;
    bfs_orbit(start, &agl6_generators()?, BfsOptions::default())
}
