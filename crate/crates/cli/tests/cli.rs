use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmcover"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn nl_examples() {
    for (anf, r, want) in [
        ("x1x2x3x4x5x6", "3", "1"),
        ("x1x2x4x5+x1x2x3x6", "2", "6"),
        ("x1x2+x3x4", "1", "6"),
    ] {
        let o = run(&["nl", "--anf", anf, "--r", r]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(stdout(&o).trim(), want);
    }
    let o = run(&["nl", "--anf", "0", "--n", "6", "--r", "2"]);
    assert_eq!(stdout(&o).trim(), "0");
    let o = run(&["nl", "--hex", "ff00", "--n", "4", "--r", "1", "--engine", "bruteforce"]);
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn usage_and_scale_errors_exit_2() {
    assert_eq!(run(&["nl", "--r", "2"]).status.code(), Some(2));
    assert_eq!(run(&["nl", "--anf", "x1x2x3", "--r"]).status.code(), Some(2));
    assert_eq!(run(&["nl", "--anf", "x1", "--n", "7", "--r", "3", "--engine", "bruteforce"]).status.code(), Some(2));
    assert_eq!(run(&["nl", "--anf", "x1+", "--r", "1"]).status.code(), Some(2));
    let o = run(&["verify", "610"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--opt-in-long"));
}

#[test]
fn distribution_tables_match() {
    for which in ["2", "3", "5"] {
        let o = run(&["tables", which]);
        assert_eq!(o.status.code(), Some(0), "table {which}: {}", stdout(&o));
        assert!(!stdout(&o).contains("DIFF"));
    }
    let o = run(&["tables", "2"]);
    assert!(stdout(&o).contains("fn6      32 2112 65312 638208 342912 0"));
}

#[test]
fn table1_reports_the_single_differing_cell() {
    let o = run(&["tables", "1", "--csv"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let diffs: Vec<&str> = out.lines().filter(|l| l.ends_with("DIFF")).collect();
    assert_eq!(diffs, ["fn0,0 0 0 18,0 0 0 0,DIFF"]);
    assert_eq!(out.lines().filter(|l| l.ends_with(",ok")).count(), 10);
}

#[test]
fn exclusion_csv() {
    let o = run(&["tables", "exclusion", "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 67);
    assert!(out.contains("2,9,21,false,open"));
    // ml_2(fn0) recomputes to 18, so the (0,0) bound is 18 rather than the published 0.
    assert!(out.contains("0,0,18,true,parity"));
}

#[test]
fn agl_commands() {
    let o = run(&["agl", "order", "--n", "3", "--q", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("generated 1344"));
    let o = run(&["agl", "order", "--n", "2", "--q", "3"]);
    assert!(stdout(&o).starts_with("generated 432"));
    let o = run(&["agl", "cyclic", "--n", "2", "--q", "2"]);
    assert!(stdout(&o).starts_with("not cyclic (max order"));
    assert_eq!(run(&["agl", "order", "--n", "2", "--q", "6"]).status.code(), Some(2));
}

#[test]
fn fixed_pair_stages() {
    let o = run(&["verify", "29"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("candidates = 5760"));
    assert!(stdout(&o).contains("satisfying = 0"));
    let o = run(&["verify", "310", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["counters"]["round1_survivors"], 6912);
    assert_eq!(v[0]["outcome"], "pass");
}

#[test]
fn precomputed_inputs_and_integrity() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&["precompute", "--out", d]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("aset.ams.meta.json")).unwrap()).unwrap();
    assert!(meta["command"].as_str().unwrap().contains("precompute"));

    let report = dir.path().join("r610.txt");
    let args = ["verify", "610", "--subset", "--inputs", d, "--out", report.to_str().unwrap()];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let first = fs::read_to_string(&report).unwrap();
    assert!(first.starts_with("# command: "));
    assert!(first.contains("# input aset.ams sha256 "));
    assert!(first.contains("shards_selected = 10"));
    let mut again: Vec<&str> = args.to_vec();
    again.extend(["--workers", "1"]);
    let o = run(&again);
    assert_eq!(o.status.code(), Some(0));
    let body = |s: &str| s.lines().filter(|l| !l.starts_with("# command")).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&fs::read_to_string(&report).unwrap()), body(&first));

    let aset = dir.path().join("aset.ams");
    let bytes = fs::read(&aset).unwrap();
    fs::write(&aset, &bytes[..bytes.len() - 100]).unwrap();
    let o = run(&["verify", "610", "--subset", "--inputs", d]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("input hash mismatch"), "{}", stderr(&o));
}

#[test]
fn build_table_and_orbit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.nlt");
    let o = run(&["build-table", "--anf", "x1x2x3x4x5x6+x1x2x3x4", "--n", "6", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("k=3 "));
    assert!(out.exists());
    let o = run(&["orbit", "--class", "7"]);
    assert_eq!(stdout(&o).trim(), "fn7 64");
}

#[test]
fn bounds_output() {
    let out = stdout(&run(&["bounds"]));
    assert!(out.contains("= 22"));
    assert!(out.contains("literature input: rho(2,7) = 40"));
    assert!(out.contains("rho(4,10) <= 244"));
}
