use std::fs;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rmcover::boolfn::{BooleanFunction, MonomialSet};
use rmcover::classify::{fn_rep, type_of};
use rmcover::io::{read_matrix_set, read_nl_table, write_matrix_set, write_nl_table};
use rmcover::nonlin::{nl_r, nl_r_recursive, NlTable};
use rmcover::orbit::MatrixSet;
use rmcover::verify::{
    check_29, check_310, prove_rho37, random_bit_affine, reduce_to_610, sweep_610,
    x7_shift_map, Outcome, ProofInputs, SweepContext, SweepOptions,
};
use rmcover::{BitAffine, Error};

fn inputs() -> &'static ProofInputs {
    static I: OnceLock<ProofInputs> = OnceLock::new();
    I.get_or_init(|| ProofInputs::build(0).unwrap())
}

#[test]
fn identity_slice_from_tables_alone() {
    let (t6, t10) = (inputs().table(6).unwrap(), inputs().table(10).unwrap());
    let seeds = t6.members(6);
    let top = t10.at_least(15);
    let full_hit = t10.members(15).into_iter().find(|&t| {
        let g = seeds[0] ^ t;
        seeds.iter().all(|&s| top.contains((s ^ g) as usize))
    });
    assert_eq!(full_hit, None);
    let ctx = SweepContext::new(t6, t10).unwrap();
    assert_eq!(ctx.projected_set(&BitAffine::identity(6)), seeds);
    assert_eq!(ctx.sweep_matrix(&BitAffine::identity(6)).hit, None);
}

#[test]
fn projection_keeps_second_order_nonlinearity() {
    let t6 = inputs().table(6).unwrap();
    let cubic = MonomialSet::new(6, 3).unwrap();
    let fn6 = fn_rep(6).unwrap();
    let ctx = SweepContext::new(t6, inputs().table(10).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..8 {
        let a = random_bit_affine(6, &mut rng);
        let moved = fn6.apply_affine(&a.inverse()).unwrap();
        for w in ctx.projected_set(&a) {
            assert_eq!(nl_r(&(moved ^ cubic.function(u64::from(w))), 2).unwrap(), 6);
        }
    }
}

#[test]
fn fixed_pair_checks_reject_wrong_tables() {
    let t2 = inputs().table(2).unwrap();
    let t3 = inputs().table(3).unwrap();
    assert!(matches!(check_29(t3, inputs().table(9).unwrap()), Err(Error::Precondition(_))));
    assert!(matches!(check_310(t2, inputs().table(10).unwrap()), Err(Error::Precondition(_))));
    let small = NlTable::build(&BooleanFunction::parse_anf(5, "x1x2x3x4").unwrap(), 3).unwrap();
    assert!(check_29(&small, inputs().table(9).unwrap()).is_err());
}

#[test]
fn stages_rerun_identically_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let (p2, p9, pa) = (dir.path().join("fn2.nlt"), dir.path().join("fn9.nlt"), dir.path().join("a.ams"));
    let h2 = write_nl_table(&p2, inputs().table(2).unwrap()).unwrap();
    write_nl_table(&p9, inputs().table(9).unwrap()).unwrap();
    write_matrix_set(&pa, &inputs().aset).unwrap();
    let (t2, h2_read) = read_nl_table(&p2).unwrap();
    let (t9, _) = read_nl_table(&p9).unwrap();
    assert_eq!(h2, h2_read);
    let direct = check_29(inputs().table(2).unwrap(), inputs().table(9).unwrap()).unwrap();
    assert_eq!(check_29(&t2, &t9).unwrap(), direct);
    assert_eq!(read_matrix_set(&pa).unwrap().0, inputs().aset);

    let bytes = fs::read(&pa).unwrap();
    fs::write(&pa, &bytes[..bytes.len() / 2]).unwrap();
    let err = read_matrix_set(&pa).unwrap_err();
    assert!(err.to_string().contains("input hash mismatch"), "{err}");
}

fn counters_without_resume(v: &rmcover::verify::Verdict) -> Vec<(String, u64)> {
    v.counters
        .iter()
        .filter(|(k, _)| k.as_str() != "shards_resumed")
        .map(|(k, c)| (k.clone(), *c))
        .collect()
}

#[test]
fn sweep_resumes_from_a_partial_checkpoint() {
    let (t6, t10) = (inputs().table(6).unwrap(), inputs().table(10).unwrap());
    let aset = &inputs().aset;
    let dir = tempfile::tempdir().unwrap();
    let opts = SweepOptions {
        stride: 50,
        checkpoint_dir: Some(dir.path().to_path_buf()),
        ..SweepOptions::default()
    };
    let first = sweep_610(aset, t6, t10, &opts).unwrap();
    assert_eq!(first.counter("shards_selected"), Some(20));
    assert_eq!(first.counter("shards_resumed"), Some(0));

    // Keep the header and five shards, then leave a torn line.
    let path = dir.path().join("sweep610.ckpt");
    let text = fs::read_to_string(&path).unwrap();
    let mut kept: Vec<&str> = text.lines().take(6).collect();
    kept.push("shard 9");
    fs::write(&path, kept.join("\n")).unwrap();
    let resumed = sweep_610(aset, t6, t10, &opts).unwrap();
    assert_eq!(resumed.counter("shards_resumed"), Some(5));
    assert_eq!(counters_without_resume(&resumed), counters_without_resume(&first));

    let plain = sweep_610(aset, t6, t10, &SweepOptions { stride: 50, ..SweepOptions::default() }).unwrap();
    assert_eq!(counters_without_resume(&plain), counters_without_resume(&first));
    let one_worker = SweepOptions { stride: 50, workers: 1, ..SweepOptions::default() };
    assert_eq!(sweep_610(aset, t6, t10, &one_worker).unwrap().counters, plain.counters);
}

#[test]
fn checkpoint_from_other_inputs_is_rejected() {
    let (t6, t10) = (inputs().table(6).unwrap(), inputs().table(10).unwrap());
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("sweep610.ckpt"), "SWEEP610 shards=1000 aset=00 fn6=00 fn10=00\n").unwrap();
    let opts = SweepOptions {
        stride: 100,
        checkpoint_dir: Some(dir.path().to_path_buf()),
        ..SweepOptions::default()
    };
    assert!(matches!(sweep_610(&inputs().aset, t6, t10, &opts), Err(Error::Precondition(_))));
}

#[test]
fn sweep_reports_a_planted_hit_and_does_not_checkpoint_it() {
    let t6 = inputs().table(6).unwrap();
    let flat = NlTable::from_parts(fn_rep(10).unwrap(), 3, vec![15; 1 << 20]).unwrap();
    let aset = MatrixSet::from_keys(vec![BitAffine::identity(6).matrix_key()]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let opts = SweepOptions {
        shards: 1,
        checkpoint_dir: Some(dir.path().to_path_buf()),
        ..SweepOptions::default()
    };
    let v = sweep_610(&aset, t6, &flat, &opts).unwrap();
    assert_eq!(v.outcome, Outcome::Fail);
    let cx = v.counterexample.unwrap();
    assert_eq!(cx.matrix, Some(aset.keys()[0]));
    assert_eq!(cx.t, Some(0));
    let ckpt = fs::read_to_string(dir.path().join("sweep610.ckpt")).unwrap();
    assert_eq!(ckpt.lines().count(), 1);
}

#[test]
fn reduction_keeps_nl3_and_lands_in_the_swept_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cubic = MonomialSet::new(6, 3).unwrap();
    let mut checked = 0;
    while checked < 5 {
        let (low, high) = [(2, 10), (2, 9), (3, 10)][checked % 3];
        let l = random_bit_affine(6, &mut rng);
        let g = cubic.function(rng.gen::<u64>() & 0xfffff);
        let f = BooleanFunction::concat(
            &(fn_rep(low).unwrap().apply_affine(&l).unwrap() ^ g),
            &fn_rep(high).unwrap(),
        )
        .unwrap();
        assert_eq!((type_of(&f).unwrap().i(), type_of(&f).unwrap().j()), (low, high));
        let Ok(red) = reduce_to_610(&f) else { continue };
        assert!((4..=6).contains(&red.label.i()) && (7..=10).contains(&red.label.j()));
        assert_eq!(f.apply_affine(&x7_shift_map(red.k).unwrap()).unwrap(), red.reduced);
        assert_eq!(nl_r_recursive(&red.reduced, 3).unwrap(), nl_r_recursive(&f, 3).unwrap());
        checked += 1;
    }
}

#[test]
fn reduction_rejects_other_shapes() {
    // fn2 + fn9 = x1...x6: no degree-4 part, so this is a fixed-pair case.
    let f = BooleanFunction::concat(&fn_rep(2).unwrap(), &fn_rep(9).unwrap()).unwrap();
    assert!(matches!(reduce_to_610(&f), Err(Error::Precondition(_))));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let moved = loop {
        let m = fn_rep(9).unwrap().apply_affine(&random_bit_affine(6, &mut rng)).unwrap();
        if (fn_rep(2).unwrap() ^ m).homogeneous_part(5).anf() != 0 {
            break m;
        }
    };
    let f = BooleanFunction::concat(&fn_rep(2).unwrap(), &moved).unwrap();
    assert!(matches!(reduce_to_610(&f), Err(Error::Precondition(_))));
    let f = BooleanFunction::concat(&fn_rep(4).unwrap(), &fn_rep(10).unwrap()).unwrap();
    assert!(matches!(reduce_to_610(&f), Err(Error::Precondition(_))));
}

#[test]
fn full_report() {
    let report = prove_rho37(inputs(), &SweepOptions::default()).unwrap();
    assert!(report.passed(), "{}", report.to_text());
    assert_eq!(report.conclusion, "rho(3,7) = 20");
    let names: Vec<&str> = report.stages.iter().map(|s| s.stage.as_str()).collect();
    assert_eq!(names, ["exclusion", "check_29", "check_310", "reduction", "sweep_610", "witness"]);
    assert_eq!(report.stages[0].counter("open"), Some(4));
    assert_eq!(report.stages[0].counter("excluded_parity"), Some(11));
    assert_eq!(report.stages[0].counter("excluded_bound"), Some(51));
    let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(json["stages"].as_array().unwrap().len(), 6);

    let proxy = prove_rho37(inputs(), &SweepOptions::one_percent()).unwrap();
    assert!(proxy.passed());
    assert!(!proxy.upper_bound_established);
    assert!(proxy.conclusion.contains("pending"));
}
