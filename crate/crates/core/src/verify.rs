//! The upper-bound pipeline for third-order nonlinearity of seven-variable functions:
//! the two covering checks on fixed pairs, the reduction of the remaining open types to
//! type (6,10), the (6,10) sweep over the collected matrix set and the lower-bound witness.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::Bitset;
use crate::boolfn::{BooleanFunction, MonomialSet};
use crate::classify::{
    exclusion_table_from, fn_rep, open_types, table1, type_of, ExclusionRule, TypeLabel, TARGET,
};
use crate::error::{Error, Result};
use crate::field::BitAffine;
use crate::io::{encode_matrix_set, encode_nl_table, sha256_hex};
use crate::nonlin::{nl_r_recursive, with_workers, NlTable};
use crate::orbit::{fn10_matrix_set, MatrixSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
}

/// A failing instance: the matrix (if the stage has one), the shift `g`, the target `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub matrix: Option<u64>,
    pub g: u32,
    pub t: Option<u32>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub stage: String,
    pub outcome: Outcome,
    pub counterexample: Option<Counterexample>,
    pub counters: BTreeMap<String, u64>,
    pub inputs: BTreeMap<String, String>,
}

impl Verdict {
    fn new(stage: &str) -> Self {
        Self {
            stage: stage.to_string(),
            outcome: Outcome::Pass,
            counterexample: None,
            counters: BTreeMap::new(),
            inputs: BTreeMap::new(),
        }
    }

    fn count(&mut self, name: &str, value: u64) {
        self.counters.insert(name.to_string(), value);
    }

    fn fail(&mut self, cx: Counterexample) {
        self.outcome = Outcome::Fail;
        self.counterexample = Some(cx);
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn counter(&self, name: &str) -> Option<u64> {
        self.counters.get(name).copied()
    }
}

/// SHA-256 of a table's artifact encoding.
pub fn table_hash(t: &NlTable) -> String {
    sha256_hex(&encode_nl_table(t))
}

pub fn matrix_set_hash(s: &MatrixSet) -> String {
    sha256_hex(&encode_matrix_set(s))
}

fn expect_table(t: &NlTable, class: usize) -> Result<()> {
    if t.n() != 6 || t.r() != 3 {
        return Err(Error::Precondition(format!(
            "expected a (6,3) table, got ({},{})",
            t.n(),
            t.r()
        )));
    }
    if *t.base() != fn_rep(class)? {
        return Err(Error::Precondition(format!(
            "table base is {} rather than fn{class}",
            t.base()
        )));
    }
    Ok(())
}

/// True iff `need ⊆ allowed + g`, i.e. every `s ^ g` is allowed.
fn shifted_subset(need: &[u32], allowed: &Bitset, g: u32) -> bool {
    need.iter().all(|&s| allowed.contains((s ^ g) as usize))
}

/// `fn_2 ‖ (fn_9 + g)` with `g ∈ H_6^(3) ∪ {0}` never reaches 21.
///
/// Since `0 ∈ F_{fn_2}(6)`, only `g ∈ F_{fn_9}(≥15)` survive the `h = 6` condition; each is
/// then refuted by the `h = 8` condition.
pub fn check_29(t2: &NlTable, t9: &NlTable) -> Result<Verdict> {
    expect_table(t2, 2)?;
    expect_table(t9, 9)?;
    let mut v = Verdict::new("check_29");
    v.inputs.insert("fn2".into(), table_hash(t2));
    v.inputs.insert("fn9".into(), table_hash(t9));
    let h0 = t2.nl_of_base();
    let candidates: Vec<u32> = t9.at_least(TARGET - h0).iter().map(|g| g as u32).collect();
    let need = t2.members(8);
    let allowed = t9.at_least(TARGET - 8);
    let satisfying: Vec<u32> = candidates
        .iter()
        .copied()
        .filter(|&g| shifted_subset(&need, &allowed, g))
        .collect();
    v.count("candidates", candidates.len() as u64);
    v.count("tested_per_candidate", need.len() as u64);
    v.count("satisfying", satisfying.len() as u64);
    if let Some(&g) = satisfying.first() {
        v.fail(Counterexample {
            matrix: None,
            g,
            t: None,
            detail: "F_fn2(8) lies inside F_fn9(>=13) + g".into(),
        });
    }
    Ok(v)
}

/// `fn_3 ‖ (fn_10 + g)` never reaches 21, tested from the `fn_10` side.
///
/// `0 ∈ F_{fn_10}(9)` restricts `g` to `F_{fn_3}(≥12)`. Round 1 keeps the `g` with
/// `F_{fn_10}(7) ⊆ F_{fn_3}(≥14) + g`; round 2 refutes each survivor with
/// `F_{fn_10}(9) ⊆ F_{fn_3}(≥12) + g`.
pub fn check_310(t3: &NlTable, t10: &NlTable) -> Result<Verdict> {
    expect_table(t3, 3)?;
    expect_table(t10, 10)?;
    let mut v = Verdict::new("check_310");
    v.inputs.insert("fn3".into(), table_hash(t3));
    v.inputs.insert("fn10".into(), table_hash(t10));
    let h0 = t10.nl_of_base();
    let allowed12 = t3.at_least(TARGET - h0);
    let candidates: Vec<u32> = allowed12.iter().map(|g| g as u32).collect();
    let need7 = t10.members(7);
    let allowed14 = t3.at_least(TARGET - 7);
    let survivors: Vec<u32> = candidates
        .par_iter()
        .copied()
        .filter(|&g| shifted_subset(&need7, &allowed14, g))
        .collect();
    let need9 = t10.members(9);
    let satisfying: Vec<u32> = survivors
        .iter()
        .copied()
        .filter(|&g| shifted_subset(&need9, &allowed12, g))
        .collect();
    v.count("round1_candidates", candidates.len() as u64);
    v.count("round1_survivors", survivors.len() as u64);
    v.count("round2_satisfying", satisfying.len() as u64);
    if let Some(&g) = satisfying.first() {
        v.fail(Counterexample {
            matrix: None,
            g,
            t: None,
            detail: "F_fn10(9) lies inside F_fn3(>=12) + g".into(),
        });
    }
    Ok(v)
}

/// Result of moving a Case-2 function of an open type to its new type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub reduced: BooleanFunction,
    pub label: TypeLabel,
    /// 1-based variable `x_k` used in `x_7 -> x_7 + x_k`.
    pub k: usize,
    /// Degree-4 monomial (variable mask) of `h_4` that fixed the choice of `k`.
    pub monomial: u8,
}

/// Applies `x_7 -> x_7 + x_k` to `f = f1 ‖ f2` whose halves sum to
/// `x1...x6 + h_4 + (terms of degree <= 3)` with `h_4 != 0`.
pub fn reduce_to_610(f: &BooleanFunction) -> Result<Reduction> {
    let label = type_of(f)?;
    let open = [(2, 9), (2, 10), (3, 10)];
    if !open.contains(&(label.i(), label.j())) {
        return Err(Error::Precondition(format!("type {label} is not reduced to (6,10)")));
    }
    let (f1, f2) = f.split()?;
    let s = f1 ^ f2;
    if s.homogeneous_part(6).anf() == 0 || s.homogeneous_part(5).anf() != 0 {
        return Err(Error::Precondition(
            "halves must differ by x1..x6 plus terms of degree at most 4".into(),
        ));
    }
    let h4 = s.homogeneous_part(4).anf();
    if h4 == 0 {
        return Err(Error::Precondition(
            "degree-4 part of f1 + f2 vanishes; use the fixed-pair checks".into(),
        ));
    }
    let monomial = h4.trailing_zeros() as u8;
    let k = (0..6).find(|j| (monomial >> j) & 1 == 0).expect("degree 4 < 6") + 1;
    let xk = BooleanFunction::from_monomials(6, &[1 << (k - 1)])?;
    let shift = BooleanFunction::from_tt(6, s.tt() & xk.tt())?;
    let reduced = BooleanFunction::concat(&(f1 ^ shift), &(f2 ^ shift))?;
    Ok(Reduction {
        reduced,
        label: type_of(&reduced)?,
        k,
        monomial,
    })
}

/// The bit map of `x_7 -> x_7 + x_k` on seven variables.
pub fn x7_shift_map(k: usize) -> Result<BitAffine> {
    let mut cols: Vec<u8> = (0..7).map(|j| 1u8 << j).collect();
    cols[k - 1] |= 1 << 6;
    BitAffine::from_columns(7, &cols, 0)
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub shards: usize,
    /// Only shards with `index % stride == 0` are processed; 1 = full sweep.
    pub stride: usize,
    pub checkpoint_dir: Option<PathBuf>,
    pub workers: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            shards: 1000,
            stride: 1,
            checkpoint_dir: None,
            workers: 0,
        }
    }
}

impl SweepOptions {
    /// The deterministic 1% proxy: every hundredth shard.
    pub fn one_percent() -> Self {
        Self {
            stride: 100,
            ..Self::default()
        }
    }
}

/// The fixed data of the (6,10) sweep.
pub struct SweepContext {
    cubic: MonomialSet,
    seeds: Vec<u32>,
    targets: Vec<u32>,
    top: Bitset,
}

/// Work done on one matrix; `hit` is `(t, g)` when `S + g ⊆ F_{fn_10}(15)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MatrixOutcome {
    pub lookups: u64,
    pub hit: Option<(u32, u32)>,
}

impl SweepContext {
    pub fn new(t6: &NlTable, t10: &NlTable) -> Result<Self> {
        expect_table(t6, 6)?;
        expect_table(t10, 10)?;
        let seeds = t6.members(6);
        if seeds.len() != 32 {
            return Err(Error::Precondition(format!(
                "|F_fn6(6)| = {}, expected 32",
                seeds.len()
            )));
        }
        let top_k = t10.max_value();
        Ok(Self {
            cubic: MonomialSet::new(6, 3)?,
            seeds,
            targets: t10.members(top_k),
            top: t10.at_least(top_k),
        })
    }

    pub fn targets(&self) -> &[u32] {
        &self.targets
    }

    /// `{T_3(s(A^-1 x)) : s ∈ F_{fn_6}(6)}` as coefficient words, in seed order.
    pub fn projected_set(&self, a: &BitAffine) -> Vec<u32> {
        let inv = a.inverse();
        self.seeds
            .iter()
            .map(|&s| {
                let moved = self.cubic.function(u64::from(s)).apply_affine_unchecked(&inv);
                self.cubic.word_of(&moved) as u32
            })
            .collect()
    }

    /// Looks for a target `t` with `S + (s_0 + t) ⊆ F_{fn_10}(15)`.
    pub fn sweep_matrix(&self, a: &BitAffine) -> MatrixOutcome {
        let s = self.projected_set(a);
        let diffs: Vec<u32> = s[1..].iter().map(|&x| x ^ s[0]).collect();
        let mut out = MatrixOutcome::default();
        for &t in &self.targets {
            let mut all = true;
            for &d in &diffs {
                out.lookups += 1;
                if !self.top.contains((t ^ d) as usize) {
                    all = false;
                    break;
                }
            }
            if all {
                out.hit = Some((t, s[0] ^ t));
                return out;
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct ShardRecord {
    matrices: u64,
    lookups: u64,
}

fn shard_range(index: usize, shards: usize, len: usize) -> std::ops::Range<usize> {
    index * len / shards..(index + 1) * len / shards
}

const CHECKPOINT_FILE: &str = "sweep610.ckpt";

fn checkpoint_header(shards: usize, aset: &str, t6: &str, t10: &str) -> String {
    format!("SWEEP610 shards={shards} aset={aset} fn6={t6} fn10={t10}")
}

fn load_checkpoint(path: &PathBuf, header: &str) -> Result<BTreeMap<usize, ShardRecord>> {
    let mut done = BTreeMap::new();
    let Ok(text) = fs::read_to_string(path) else {
        return Ok(done);
    };
    let mut lines = text.lines();
    match lines.next() {
        None => return Ok(done),
        Some(h) if h == header => {}
        Some(_) => {
            return Err(Error::Precondition(format!(
                "checkpoint {} belongs to different inputs",
                path.display()
            )))
        }
    }
    for line in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed = match fields.as_slice() {
            ["shard", idx, m, l] => (|| {
                Some((
                    idx.parse().ok()?,
                    ShardRecord {
                        matrices: m.strip_prefix("matrices=")?.parse().ok()?,
                        lookups: l.strip_prefix("lookups=")?.parse().ok()?,
                    },
                ))
            })(),
            _ => None,
        };
        // A torn final line from an interrupted write is ignored and that shard redone.
        if let Some((idx, rec)) = parsed {
            done.insert(idx, rec);
        }
    }
    Ok(done)
}

/// Shards processed per round; fixed so results do not depend on the worker count.
const SHARD_BATCH: usize = 16;

/// Algorithm-2 style sweep over every matrix in `aset` and every top-level target of the
/// `fn_10` table. Passes iff no shifted projected set fits inside `F_{fn_10}(15)`.
pub fn sweep_610(
    aset: &MatrixSet,
    t6: &NlTable,
    t10: &NlTable,
    opts: &SweepOptions,
) -> Result<Verdict> {
    if opts.shards == 0 || opts.stride == 0 {
        return Err(Error::Precondition("shards and stride must be positive".into()));
    }
    let ctx = SweepContext::new(t6, t10)?;
    let (ha, h6, h10) = (matrix_set_hash(aset), table_hash(t6), table_hash(t10));
    let mut v = Verdict::new("sweep_610");
    v.inputs.insert("aset".into(), ha.clone());
    v.inputs.insert("fn6".into(), h6.clone());
    v.inputs.insert("fn10".into(), h10.clone());

    let header = checkpoint_header(opts.shards, &ha, &h6, &h10);
    let ckpt_path = opts.checkpoint_dir.as_ref().map(|d| d.join(CHECKPOINT_FILE));
    let mut done = match &ckpt_path {
        Some(p) => load_checkpoint(p, &header)?,
        None => BTreeMap::new(),
    };
    let mut writer = match &ckpt_path {
        Some(p) => {
            fs::create_dir_all(p.parent().expect("joined path"))?;
            let fresh = !p.exists() || fs::metadata(p)?.len() == 0;
            let mut w = OpenOptions::new().create(true).append(true).open(p)?;
            if fresh {
                writeln!(w, "{header}")?;
            }
            Some(w)
        }
        None => None,
    };

    let selected: Vec<usize> = (0..opts.shards).filter(|i| i % opts.stride == 0).collect();
    let resumed = selected.iter().filter(|i| done.contains_key(i)).count();
    let pending: Vec<usize> = selected.iter().copied().filter(|i| !done.contains_key(i)).collect();

    let mut hit: Option<(usize, u32, u32)> = None;
    for batch in pending.chunks(SHARD_BATCH) {
        let results: Vec<(usize, ShardRecord, Option<(usize, u32, u32)>)> =
            with_workers(opts.workers, || {
                batch
                    .par_iter()
                    .map(|&shard| {
                        let mut rec = ShardRecord::default();
                        for i in shard_range(shard, opts.shards, aset.len()) {
                            let out = ctx.sweep_matrix(&aset.matrix(i));
                            rec.matrices += 1;
                            rec.lookups += out.lookups;
                            if let Some((t, g)) = out.hit {
                                return (shard, rec, Some((i, t, g)));
                            }
                        }
                        (shard, rec, None)
                    })
                    .collect()
            })?;
        for (shard, rec, h) in results {
            if h.is_some() {
                hit = hit.or(h);
                continue;
            }
            if let Some(w) = writer.as_mut() {
                writeln!(w, "shard {shard} matrices={} lookups={}", rec.matrices, rec.lookups)?;
                w.flush()?;
            }
            done.insert(shard, rec);
        }
        if hit.is_some() {
            break;
        }
    }

    let finished: Vec<&ShardRecord> = selected.iter().filter_map(|i| done.get(i)).collect();
    let matrices: u64 = finished.iter().map(|r| r.matrices).sum();
    v.count("aset_size", aset.len() as u64);
    v.count("shards_total", opts.shards as u64);
    v.count("shards_selected", selected.len() as u64);
    v.count("shards_completed", finished.len() as u64);
    v.count("shards_resumed", resumed as u64);
    v.count("matrices_checked", matrices);
    v.count("targets_per_matrix", ctx.targets.len() as u64);
    v.count("subset_size", ctx.seeds.len() as u64);
    v.count("subset_tests", matrices * ctx.targets.len() as u64);
    v.count("membership_lookups", finished.iter().map(|r| r.lookups).sum());
    v.count("hits", u64::from(hit.is_some()));
    if let Some((i, t, g)) = hit {
        v.fail(Counterexample {
            matrix: Some(aset.keys()[i]),
            g,
            t: Some(t),
            detail: format!("S + g lies inside F_fn10(15) for matrix index {i}"),
        });
    }
    Ok(v)
}

pub fn witness() -> BooleanFunction {
    BooleanFunction::parse_anf(7, "x1x2x3x4+x1x4x6x7+x2x3x6x7+x3x4x5x7").expect("valid ANF")
}

/// Confirms `nl_3(witness) = 20`.
pub fn witness_check() -> Result<Verdict> {
    let mut v = Verdict::new("witness");
    let w = witness();
    let nl3 = nl_r_recursive(&w, 3)?;
    v.inputs.insert("function".into(), w.to_anf_string());
    v.count("nl3", u64::from(nl3));
    if nl3 != TARGET - 1 {
        v.fail(Counterexample {
            matrix: None,
            g: 0,
            t: None,
            detail: format!("nl_3 = {nl3}"),
        });
    }
    Ok(v)
}

/// Tables and matrix set consumed by the pipeline.
pub struct ProofInputs {
    pub tables: BTreeMap<usize, NlTable>,
    pub aset: MatrixSet,
}

/// Classes whose (6,3) tables the pipeline reads.
pub const PIPELINE_CLASSES: [usize; 5] = [2, 3, 6, 9, 10];

impl ProofInputs {
    pub fn build(workers: usize) -> Result<Self> {
        let mut tables = BTreeMap::new();
        for i in PIPELINE_CLASSES {
            tables.insert(i, NlTable::build_with_workers(&fn_rep(i)?, 3, workers)?);
        }
        Ok(Self {
            tables,
            aset: fn10_matrix_set()?.matrices,
        })
    }

    pub fn table(&self, class: usize) -> Result<&NlTable> {
        self.tables
            .get(&class)
            .ok_or_else(|| Error::Precondition(format!("missing table for fn{class}")))
    }
}

/// Type-level accounting: 11 diagonal types by parity, the rest by the mixed bound except
/// the open ones.
pub fn exclusion_stage() -> Verdict {
    let table = exclusion_table_from(table1());
    let mut v = Verdict::new("exclusion");
    let parity = table.iter().filter(|e| e.rule == ExclusionRule::Parity).count();
    let bound = table.iter().filter(|e| e.rule == ExclusionRule::Bound).count();
    let open = open_types(&table);
    v.count("types", table.len() as u64);
    v.count("excluded_parity", parity as u64);
    v.count("excluded_bound", bound as u64);
    v.count("open", open.len() as u64);
    v.inputs.insert(
        "open_types".into(),
        open.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" "),
    );
    let expected: Vec<TypeLabel> = [(2, 9), (2, 10), (3, 10), (6, 10)]
        .iter()
        .map(|&(i, j)| TypeLabel::new(i, j).expect("valid"))
        .collect();
    if open != expected {
        v.fail(Counterexample {
            matrix: None,
            g: 0,
            t: None,
            detail: format!("open types {open:?}"),
        });
    }
    v
}

/// Deterministic Case-2 instances of each open type, checked to land in
/// `{4,5,6} x {7,8,9,10}`; the ones landing in (6,10) are covered by the sweep.
pub fn reduction_stage(samples: usize, seed: u64) -> Result<Verdict> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut v = Verdict::new("reduction");
    let mut landed = BTreeMap::<(usize, usize), u64>::new();
    let cubic_mask: u128 = (0..64u32)
        .filter(|m| m.count_ones() <= 3)
        .fold(0, |acc, m| acc | (1u128 << m));
    for (low, high) in [(2usize, 10usize), (2, 9), (3, 10)] {
        let mut made = 0;
        while made < samples {
            let map = random_bit_affine(6, &mut rng);
            let moved = fn_rep(low)?.apply_affine(&map)?;
            let g = BooleanFunction::from_anf(6, rng.gen::<u128>() & cubic_mask)?;
            let f = BooleanFunction::concat(&(moved ^ g), &fn_rep(high)?)?;
            let red = match reduce_to_610(&f) {
                Ok(r) => r,
                // Case 1 (h_4 = 0) belongs to the fixed-pair checks.
                Err(Error::Precondition(_)) => continue,
                Err(e) => return Err(e),
            };
            made += 1;
            let (i, j) = (red.label.i(), red.label.j());
            *landed.entry((i, j)).or_default() += 1;
            if !(4..=6).contains(&i) || !(7..=10).contains(&j) {
                v.fail(Counterexample {
                    matrix: Some(map.matrix_key()),
                    g: 0,
                    t: None,
                    detail: format!("type ({low},{high}) reduced to {}", red.label),
                });
                return Ok(v);
            }
        }
    }
    v.count("instances", 3 * samples as u64);
    for ((i, j), c) in landed {
        v.count(&format!("landed_{i}_{j}"), c);
    }
    Ok(v)
}

/// A uniformly random invertible affine map on `n <= 7` variables.
pub fn random_bit_affine(n: usize, rng: &mut impl rand::Rng) -> BitAffine {
    loop {
        let cols: Vec<u8> = (0..n).map(|_| rng.gen::<u8>() & ((1u16 << n) - 1) as u8).collect();
        let b = rng.gen::<u8>() & ((1u16 << n) - 1) as u8;
        if let Ok(m) = BitAffine::from_columns(n, &cols, b) {
            return m;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub stages: Vec<Verdict>,
    pub full_sweep: bool,
    pub upper_bound_established: bool,
    pub lower_bound_established: bool,
    pub conclusion: String,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.stages.iter().all(Verdict::passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.stages {
            let status = if s.passed() { "PASS" } else { "FAIL" };
            out.push_str(&format!("[{status}] {}\n", s.stage));
            for (k, h) in &s.inputs {
                out.push_str(&format!("    input {k} = {h}\n"));
            }
            for (k, c) in &s.counters {
                out.push_str(&format!("    {k} = {c}\n"));
            }
            if let Some(cx) = &s.counterexample {
                out.push_str(&format!("    counterexample: {cx:?}\n"));
            }
        }
        out.push_str(&self.conclusion);
        out.push('\n');
        out
    }
}

/// Runs every stage in order and states what the results establish.
pub fn prove_rho37(inputs: &ProofInputs, sweep: &SweepOptions) -> Result<Report> {
    let mut stages = vec![exclusion_stage()];
    stages.push(check_29(inputs.table(2)?, inputs.table(9)?)?);
    stages.push(check_310(inputs.table(3)?, inputs.table(10)?)?);
    stages.push(reduction_stage(20, 0x5eed)?);
    stages.push(sweep_610(
        &inputs.aset,
        inputs.table(6)?,
        inputs.table(10)?,
        sweep,
    )?);
    stages.push(witness_check()?);
    let full_sweep = sweep.stride == 1;
    let upper_ok = stages[..5].iter().all(Verdict::passed);
    let upper = upper_ok && full_sweep;
    let lower = stages[5].passed();
    let conclusion = match (upper, lower) {
        (true, true) => "rho(3,7) = 20".to_string(),
        (false, true) if upper_ok => {
            "rho(3,7) >= 20; upper bound pending the unswept shards".to_string()
        }
        (false, true) => "rho(3,7) >= 20; upper-bound stage failed".to_string(),
        (true, false) => "rho(3,7) <= 20; witness check failed".to_string(),
        (false, false) => "no conclusion".to_string(),
    };
    Ok(Report {
        stages,
        full_sweep,
        upper_bound_established: upper,
        lower_bound_established: lower,
        conclusion,
    })
}
