use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rmcover::classify::{
    chain_bounds, exclusion_table, fn_rep, rho_upper_bound, table1, ExclusionRule,
    LITERATURE_INPUTS, RHO_3_7,
};
use rmcover::field::{
    agl_generators, agl_order, generate_group, gl_order, max_element_order, FieldSpec,
    DEFAULT_CLOSURE_CAP,
};
use rmcover::io::{read_matrix_set, read_nl_table, sha256_hex, write_matrix_set, write_nl_table};
use rmcover::nonlin::{nl_r, nl_r_bruteforce, nl_r_recursive, with_workers, NlTable};
use rmcover::orbit::{all_orbit_lengths, fn10_matrix_set, orbit_length};
use rmcover::verify::{
    check_29, check_310, prove_rho37, sweep_610, witness_check, ProofInputs, SweepOptions,
    Verdict, PIPELINE_CLASSES,
};
use rmcover::{BooleanFunction, Error};

// Published values, compared against recomputation.
const PUBLISHED_TABLE1: [(usize, u32, u32, u32); 11] = [
    (0, 0, 0, 0),
    (4, 4, 4, 16),
    (4, 6, 6, 16),
    (4, 10, 8, 14),
    (5, 2, 2, 16),
    (5, 4, 4, 14),
    (5, 8, 6, 14),
    (6, 1, 1, 17),
    (6, 3, 3, 15),
    (6, 7, 5, 15),
    (6, 9, 7, 15),
];
const PUBLISHED_TABLE2: [(usize, [usize; 6]); 3] = [
    (2, [64, 1920, 64320, 579072, 397440, 5760]),
    (3, [0, 2304, 71680, 628992, 345600, 0]),
    (6, [32, 2112, 65312, 638208, 342912, 0]),
];
const PUBLISHED_TABLE3: [(usize, [usize; 6]); 2] = [
    (9, [6, 298, 12540, 245556, 784416, 5760]),
    (10, [0, 288, 13216, 254016, 746496, 34560]),
];
const PUBLISHED_TABLE5: [usize; 11] = [
    1, 651, 18228, 13888, 2016, 312480, 1749888, 64, 41664, 1166592, 888832,
];

#[derive(Parser)]
#[command(name = "rmcover", version, about = "Covering radius of RM(3,7): tables and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// r-th order nonlinearity of one function.
    Nl(NlArgs),
    /// Recompute a published table and diff it.
    Tables(TablesArgs),
    /// Run verification stages.
    Verify(VerifyArgs),
    /// Two-generator checks for AGL(n, q).
    Agl(AglArgs),
    /// Build and save an NLT1 table.
    BuildTable(BuildTableArgs),
    /// Orbit lengths; optionally save the fn10 matrix set.
    Orbit(OrbitArgs),
    /// Write all pipeline inputs (five tables and the matrix set) to a directory.
    Precompute(PrecomputeArgs),
    /// Bound arithmetic.
    Bounds,
}

#[derive(Args)]
struct FunctionArgs {
    #[arg(long, conflicts_with = "hex")]
    anf: Option<String>,
    #[arg(long)]
    hex: Option<String>,
    /// Variable count; inferred from the ANF when omitted.
    #[arg(long)]
    n: Option<usize>,
}

impl FunctionArgs {
    fn function(&self) -> Result<BooleanFunction, Failure> {
        self.parse().map_err(Failure::Usage)
    }

    fn parse(&self) -> anyhow::Result<BooleanFunction> {
        match (&self.anf, &self.hex) {
            (Some(s), None) => {
                let n = match self.n {
                    Some(n) => n,
                    None => BooleanFunction::anf_max_variable(s)?.max(1),
                };
                Ok(BooleanFunction::parse_anf(n, s)?)
            }
            (None, Some(h)) => {
                let n = self.n.context("--hex requires --n")?;
                Ok(BooleanFunction::from_hex(n, h)?)
            }
            _ => bail!("give exactly one of --anf or --hex"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Auto,
    Recursive,
    Bruteforce,
}

#[derive(Args)]
struct NlArgs {
    #[command(flatten)]
    f: FunctionArgs,
    #[arg(long)]
    r: usize,
    #[arg(long, value_enum, default_value = "auto")]
    engine: Engine,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    #[value(name = "5")]
    Five,
    Exclusion,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(value_enum)]
    which: Which,
    /// Emit CSV rows instead of aligned text.
    #[arg(long)]
    csv: bool,
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stage {
    #[value(name = "29")]
    S29,
    #[value(name = "310")]
    S310,
    #[value(name = "610")]
    S610,
    Witness,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    stage: Stage,
    /// Directory with fnK.nlt tables and aset.ams (from `precompute`); built in memory otherwise.
    #[arg(long)]
    inputs: Option<PathBuf>,
    #[arg(long)]
    checkpoint_dir: Option<PathBuf>,
    /// Required for the full 610 sweep.
    #[arg(long)]
    opt_in_long: bool,
    /// Sweep only every hundredth shard.
    #[arg(long)]
    subset: bool,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AglAction {
    Gens,
    Order,
    Cyclic,
}

#[derive(Args)]
struct AglArgs {
    #[arg(value_enum)]
    action: AglAction,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    q: u32,
}

#[derive(Args)]
struct BuildTableArgs {
    #[command(flatten)]
    f: FunctionArgs,
    #[arg(long, default_value_t = 3)]
    r: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct OrbitArgs {
    /// Single class index; all eleven when omitted.
    #[arg(long)]
    class: Option<usize>,
    /// Save the fn10 matrix set as AMS1.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PrecomputeArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

/// Failure kinds mapped onto exit codes.
enum Failure {
    Mismatch(String),
    Usage(anyhow::Error),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let usage = matches!(
            e.downcast_ref::<Error>(),
            Some(
                Error::Parse(_)
                    | Error::TooLarge(_)
                    | Error::VariableCount(_)
                    | Error::OrderOutOfRange { .. }
                    | Error::UnsupportedField(_)
                    | Error::BadClass(_)
                    | Error::ClosureCap(_)
            )
        );
        if usage {
            Failure::Usage(e)
        } else {
            Failure::Other(e)
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command_line = std::env::args().collect::<Vec<_>>().join(" ");
    let res = match cli.command {
        Command::Nl(a) => cmd_nl(a),
        Command::Tables(a) => cmd_tables(a),
        Command::Verify(a) => cmd_verify(a, &command_line),
        Command::Agl(a) => cmd_agl(a),
        Command::BuildTable(a) => cmd_build_table(a, &command_line),
        Command::Orbit(a) => cmd_orbit(a, &command_line),
        Command::Precompute(a) => cmd_precompute(a, &command_line),
        Command::Bounds => cmd_bounds(),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(msg)) => {
            eprintln!("mismatch: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn cmd_nl(a: NlArgs) -> CmdResult {
    let f = a.f.function()?;
    let v = match a.engine {
        Engine::Auto => nl_r(&f, a.r)?,
        Engine::Recursive => nl_r_recursive(&f, a.r)?,
        Engine::Bruteforce => nl_r_bruteforce(&f, a.r)?,
    };
    println!("{v}");
    Ok(())
}

/// Sidecar describing how an artifact was produced.
fn write_meta(path: &Path, command: &str, inputs: &BTreeMap<String, String>) -> anyhow::Result<()> {
    let bytes = fs::read(path)?;
    let meta = serde_json::json!({
        "command": command,
        "sha256": sha256_hex(&bytes),
        "inputs": inputs,
    });
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    fs::write(PathBuf::from(name), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}

fn diff_lines(rows: &[(String, String, String)], csv: bool, header: &str) -> Result<(), Failure> {
    let mut out = String::new();
    if csv {
        writeln!(out, "{header}").unwrap();
    }
    let mut bad = Vec::new();
    for (name, got, published) in rows {
        let flag = if got == published { "ok" } else { "DIFF" };
        if got != published {
            bad.push(name.clone());
        }
        if csv {
            writeln!(out, "{name},{got},{published},{flag}").unwrap();
        } else {
            writeln!(out, "{name:<8} {got:<48} published {published:<48} {flag}").unwrap();
        }
    }
    print!("{out}");
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("rows differ from the published values: {}", bad.join(", "))))
    }
}

fn distribution_rows(
    expected: &[(usize, [usize; 6])],
    ks: [u32; 6],
    workers: usize,
) -> anyhow::Result<Vec<(String, String, String)>> {
    let join = |v: &[usize]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
    let mut rows = Vec::new();
    for (class, published) in expected {
        let t = NlTable::build_with_workers(&fn_rep(*class)?, 3, workers)?;
        let got: Vec<usize> = ks.iter().map(|&k| t.count(k)).collect();
        if t.counts().values().sum::<usize>() != 1 << 20 {
            bail!("fn{class} table does not cover all 2^20 words");
        }
        rows.push((format!("fn{class}"), join(&got), join(published)));
    }
    Ok(rows)
}

fn cmd_tables(a: TablesArgs) -> CmdResult {
    match a.which {
        Which::One => {
            let rows: Vec<_> = table1()
                .iter()
                .zip(PUBLISHED_TABLE1)
                .map(|(p, (d, n2, n3, m2))| {
                    (
                        format!("fn{}", p.index),
                        format!("{} {} {} {}", p.degree, p.nl2, p.nl3, p.ml2),
                        format!("{d} {n2} {n3} {m2}"),
                    )
                })
                .collect();
            diff_lines(&rows, a.csv, "class,deg nl2 nl3 ml2,published,status")
        }
        Which::Two => {
            let rows = distribution_rows(&PUBLISHED_TABLE2, [6, 8, 10, 12, 14, 16], a.workers)?;
            diff_lines(&rows, a.csv, "class,k=6 8 10 12 14 16,published,status")
        }
        Which::Three => {
            let rows = distribution_rows(&PUBLISHED_TABLE3, [5, 7, 9, 11, 13, 15], a.workers)?;
            diff_lines(&rows, a.csv, "class,k=5 7 9 11 13 15,published,status")
        }
        Which::Five => {
            let lengths = all_orbit_lengths()?;
            let mut rows: Vec<_> = lengths
                .iter()
                .zip(PUBLISHED_TABLE5)
                .enumerate()
                .map(|(i, (g, p))| (format!("fn{i}"), g.to_string(), p.to_string()))
                .collect();
            rows.push((
                "sum".into(),
                lengths.iter().sum::<usize>().to_string(),
                (1usize << 22).to_string(),
            ));
            diff_lines(&rows, a.csv, "class,orbit length,published,status")
        }
        Which::Exclusion => {
            let table = exclusion_table();
            if a.csv {
                println!("i,j,bound,excluded,rule");
            }
            for e in &table {
                let rule = match e.rule {
                    ExclusionRule::Parity => "parity",
                    ExclusionRule::Bound => "bound",
                    ExclusionRule::Open => "open",
                };
                if a.csv {
                    println!("{},{},{},{},{rule}", e.label.i(), e.label.j(), e.bound, e.excluded());
                } else {
                    println!("{:<8} bound {:>2}  {rule}", e.label.to_string(), e.bound);
                }
            }
            let open: Vec<String> = table
                .iter()
                .filter(|e| !e.excluded())
                .map(|e| e.label.to_string())
                .collect();
            let expected = "(2,9) (2,10) (3,10) (6,10)";
            if !a.csv {
                println!("open types: {}", open.join(" "));
            }
            if open.join(" ") != expected {
                return Err(Failure::Mismatch(format!("open types differ from {expected}")));
            }
            Ok(())
        }
    }
}

fn load_inputs(dir: Option<&Path>, workers: usize) -> anyhow::Result<(ProofInputs, BTreeMap<String, String>)> {
    let Some(dir) = dir else {
        return Ok((ProofInputs::build(workers)?, BTreeMap::new()));
    };
    let mut tables = BTreeMap::new();
    let mut hashes = BTreeMap::new();
    for i in PIPELINE_CLASSES {
        let path = dir.join(format!("fn{i}.nlt"));
        let (t, h) = read_nl_table(&path).with_context(|| path.display().to_string())?;
        hashes.insert(format!("fn{i}.nlt"), h);
        tables.insert(i, t);
    }
    let path = dir.join("aset.ams");
    let (aset, h) = read_matrix_set(&path).with_context(|| path.display().to_string())?;
    hashes.insert("aset.ams".into(), h);
    Ok((ProofInputs { tables, aset }, hashes))
}

fn render(verdicts: &[Verdict], json: bool) -> String {
    if json {
        return serde_json::to_string_pretty(verdicts).expect("verdicts serialize") + "\n";
    }
    let mut out = String::new();
    for v in verdicts {
        let status = if v.passed() { "PASS" } else { "FAIL" };
        writeln!(out, "[{status}] {}", v.stage).unwrap();
        for (k, h) in &v.inputs {
            writeln!(out, "    input {k} = {h}").unwrap();
        }
        for (k, c) in &v.counters {
            writeln!(out, "    {k} = {c}").unwrap();
        }
        if let Some(cx) = &v.counterexample {
            writeln!(out, "    counterexample: {cx:?}").unwrap();
        }
    }
    out
}

fn cmd_verify(a: VerifyArgs, command: &str) -> CmdResult {
    let sweeps = matches!(a.stage, Stage::S610 | Stage::All);
    if sweeps && !a.subset && !a.opt_in_long {
        return Err(Failure::Usage(anyhow::anyhow!(
            "the full 610 sweep is long-running; pass --opt-in-long or --subset"
        )));
    }
    let (inputs, file_hashes) = load_inputs(a.inputs.as_deref(), a.workers)?;
    let sweep = SweepOptions {
        stride: if a.subset { 100 } else { 1 },
        checkpoint_dir: a.checkpoint_dir.clone(),
        workers: a.workers,
        ..SweepOptions::default()
    };
    let table = |i| inputs.table(i);
    let (text, passed) = if a.stage == Stage::All {
        let report = prove_rho37(&inputs, &sweep)?;
        let text = if a.json { report.to_json() + "\n" } else { report.to_text() };
        (text, report.passed())
    } else {
        let v = match a.stage {
            Stage::S29 => check_29(table(2)?, table(9)?)?,
            Stage::S310 => check_310(table(3)?, table(10)?)?,
            Stage::S610 => sweep_610(&inputs.aset, table(6)?, table(10)?, &sweep)?,
            Stage::Witness => witness_check()?,
            Stage::All => unreachable!(),
        };
        let passed = v.passed();
        (render(&[v], a.json), passed)
    };
    print!("{text}");
    if let Some(out) = &a.out {
        let mut body = format!("# command: {command}\n");
        for (k, h) in &file_hashes {
            body.push_str(&format!("# input {k} sha256 {h}\n"));
        }
        body.push_str(&text);
        fs::write(out, body).map_err(anyhow::Error::from)?;
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Mismatch("verification stage failed".into()))
    }
}

fn cmd_agl(a: AglArgs) -> CmdResult {
    let field = Arc::new(FieldSpec::new(a.q)?);
    let (g1, g2) = agl_generators(a.n, &field)?;
    match a.action {
        AglAction::Gens => {
            match field.modulus() {
                Some(m) => println!("GF({}) modulus coefficients {m:?}", a.q),
                None => println!("GF({})", a.q),
            }
            for (name, g) in [("A", &g1), ("B", &g2)] {
                println!("{name} = ({}) + ({})", g.format_matrix(), g.format_vector());
            }
            Ok(())
        }
        AglAction::Order => {
            let got = generate_group(&[g1, g2], DEFAULT_CLOSURE_CAP)? as u128;
            let formula = agl_order(a.n as u32, u64::from(a.q));
            println!("generated {got}, |AGL({},{})| = {formula}, |GL| = {}", a.n, a.q, gl_order(a.n as u32, u64::from(a.q)));
            if got == formula {
                Ok(())
            } else {
                Err(Failure::Mismatch("closure differs from the order formula".into()))
            }
        }
        AglAction::Cyclic => {
            let size = generate_group(&[g1.clone(), g2.clone()], DEFAULT_CLOSURE_CAP)?;
            let max = max_element_order(&[g1, g2], DEFAULT_CLOSURE_CAP)?;
            if max < size {
                println!("not cyclic (max order {max} < {size})");
            } else {
                println!("cyclic (element of order {max})");
            }
            Ok(())
        }
    }
}

fn cmd_build_table(a: BuildTableArgs, command: &str) -> CmdResult {
    let f = a.f.function()?;
    let t = NlTable::build_with_workers(&f, a.r, a.workers)?;
    let h = write_nl_table(&a.out, &t)?;
    write_meta(&a.out, command, &BTreeMap::new())?;
    println!("{} {h}", a.out.display());
    for (k, c) in t.counts() {
        println!("k={k} count={c}");
    }
    Ok(())
}

fn cmd_orbit(a: OrbitArgs, command: &str) -> CmdResult {
    match a.class {
        Some(i) => println!("fn{i} {}", orbit_length(i)?),
        None => {
            for (i, l) in all_orbit_lengths()?.iter().enumerate() {
                println!("fn{i} {l}");
            }
        }
    }
    if let Some(out) = &a.out {
        let res = fn10_matrix_set()?;
        let h = write_matrix_set(out, &res.matrices)?;
        write_meta(out, command, &BTreeMap::new())?;
        println!("matrices {} -> {} {h}", res.matrices.len(), out.display());
    }
    Ok(())
}

fn cmd_precompute(a: PrecomputeArgs, command: &str) -> CmdResult {
    fs::create_dir_all(&a.out).map_err(anyhow::Error::from)?;
    for i in PIPELINE_CLASSES {
        let t = with_workers(a.workers, || NlTable::build(&fn_rep(i)?, 3))??;
        let path = a.out.join(format!("fn{i}.nlt"));
        let h = write_nl_table(&path, &t)?;
        write_meta(&path, command, &BTreeMap::new())?;
        println!("{} {h}", path.display());
    }
    let path = a.out.join("aset.ams");
    let res = fn10_matrix_set()?;
    let h = write_matrix_set(&path, &res.matrices)?;
    write_meta(&path, command, &BTreeMap::new())?;
    println!("{} {h} ({} matrices)", path.display(), res.matrices.len());
    Ok(())
}

fn cmd_bounds() -> CmdResult {
    println!("max_k nl_3(fn_k) + ml_2(fn_k) = {}", rho_upper_bound());
    println!("rho(3,7) = {RHO_3_7} (verified by `verify all`)");
    for c in LITERATURE_INPUTS {
        let rel = if c.exact { "=" } else { "<=" };
        println!("literature input: rho({},{}) {rel} {}", c.r, c.n, c.value);
    }
    for b in chain_bounds() {
        println!("rho({},{}) <= {}", b.r, b.n, b.value);
    }
    Ok(())
}
