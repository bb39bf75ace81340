use std::process::Command;

use oscint::cache;
use oscint_core::fichtenholz::{telescope_fill, VTable};
use oscint_core::PrecisionContext;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("oscint").chain(args.iter().copied());
    let code = oscint::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn negative_terms_is_a_usage_error() {
    let (code, out, err) = run(&["mrb", "--method", "cvz", "--terms", "-5"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("Usage"), "{err}");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_oscint");
    let ok = Command::new(bin).args(["mrb", "--terms", "20", "--digits", "30"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("0.18785964246206711967"));
    let usage = Command::new(bin).args(["table", "--id", "tab7"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    let compute = Command::new(bin).args(["figure", "--from", "-1", "--to", "1"]).output().unwrap();
    assert_eq!(compute.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&compute.stderr);
    assert!(stderr.starts_with("error: figure:"), "{stderr}");
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn low_precision_and_bad_parameters_are_usage_errors() {
    assert_eq!(run(&["mrb", "--digits", "20"]).0, 2);
    assert_eq!(run(&["mi", "--alg", "pi", "--n", "6", "--points", "7"]).0, 2);
    assert_eq!(run(&["mi", "--alg", "simpson"]).0, 2);
    assert_eq!(run(&["mi", "--alg", "longman", "--m", "4"]).0, 2);
    assert_eq!(run(&["v", "--k", "2", "--s", "2", "--route", "closed"]).0, 2);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["mi", "--alg", "esc", "--n", "5", "--points", "4000", "--digits", "40", "--format", "json"];
    let first = run(&args);
    assert_eq!(first.0, 0);
    assert_eq!(first, run(&args));
}

#[test]
fn more_digits_only_extend_the_output() {
    let at = |p: &str| {
        let (code, out, _) = run(&["table", "--id", "tab3", "--digits", p, "--format", "csv"]);
        assert_eq!(code, 0);
        out
    };
    let short = at("40");
    let long = at("60");
    for (a, b) in short.lines().zip(long.lines()).skip(1) {
        let a_cells: Vec<&str> = a.split(',').collect();
        let b_cells: Vec<&str> = b.split(',').collect();
        // drop the last two decimals of the shorter rendering, which may be rounded
        let stem = &a_cells[1][..a_cells[1].len() - 2];
        assert!(b_cells[1].starts_with(stem), "{a} vs {b}");
    }
}

#[test]
fn config_file_is_merged_and_checked() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"digits": 35, "format": "csv"}"#).unwrap();
    let (code, out, _) = run(&["mrb", "--terms", "10", "--config", good.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("method,terms,value\ncvz,10,"), "{out}");
    let value = out.lines().nth(1).unwrap().rsplit(',').next().unwrap();
    assert_eq!(value.len(), "0.".len() + 35);

    let (code, out, _) = run(&["mrb", "--terms", "10", "--format", "text", "--config", good.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("# MRB constant"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"digits": 35, "precision": 40}"#).unwrap();
    let (code, _, err) = run(&["mrb", "--config", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("precision"), "{err}");
}

#[test]
fn cache_round_trip_and_reuse() {
    let ctx = PrecisionContext::new(40).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    let table = telescope_fill(&ctx, 2, 3, None).unwrap();
    cache::write(&ctx, &path, &table).unwrap();
    let back = cache::read(&ctx, &path).unwrap();
    assert_eq!(back.len(), table.len());
    for (key, entry) in table.entries() {
        let got = back.get(key.k, key.s).unwrap();
        assert_eq!(got.provenance, entry.provenance);
        assert_eq!(got.digits, entry.digits);
        let gap = oscint_core::precision::abs_diff(&got.value, &entry.value);
        assert!(gap < 1e-49, "{key}");
    }

    // a covering cache is served without rewriting the file
    let before = std::fs::read(&path).unwrap();
    let served = cache::load_or_build(&ctx, Some(&path), 2, 3).unwrap();
    assert_eq!(served.len(), table.len());
    assert_eq!(std::fs::read(&path).unwrap(), before);

    // a wider request extends the file
    let wider = cache::load_or_build(&ctx, Some(&path), 3, 4).unwrap();
    assert!(wider.get(3, 4).is_some());
    assert!(cache::read(&ctx, &path).unwrap().get(3, 4).is_some());
}

#[test]
fn cache_files_are_validated() {
    let ctx = PrecisionContext::new(40).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    let header = "k,s,re,im,provenance,digits\n";
    std::fs::write(&path, header).unwrap();
    assert!(cache::read(&ctx, &path).unwrap().is_empty());

    std::fs::write(&path, format!("{header}1,1,0.05x,-0.04,closed,40\n")).unwrap();
    let err = cache::read(&ctx, &path).unwrap_err();
    assert!(matches!(err, oscint_core::Error::Parse { line: 2, .. }), "{err}");
    let (code, _, msg) = run(&["v", "--k", "1", "--s", "1", "--cache", path.to_str().unwrap(), "--digits", "40"]);
    assert_eq!(code, 1);
    assert!(msg.contains("line 2"), "{msg}");
}

#[test]
fn vtable_writes_a_readable_cache() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let (code, out, _) = run(&["vtable", "--kmax", "2", "--smax", "3", "--out", path.to_str().unwrap(), "--digits", "40", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1 + 3 * 3);
    let ctx = PrecisionContext::new(40).unwrap();
    let table: VTable = cache::read(&ctx, &path).unwrap();
    assert_eq!(table.len(), 9);
}

#[test]
fn tables_report_skipped_rows_and_agreement() {
    let (code, out, _) = run(&["table", "--id", "tabv1", "--compare", "--digits", "40", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("s,re,re_agree,im,im_agree"));
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[2], "30", "{line}");
        assert_eq!(cells[4], "30", "{line}");
    }
    assert_eq!(run(&["table", "--id", "tab9"]).0, 2);
}

#[test]
fn figure_samples_the_grid() {
    let (code, out, _) = run(&["figure", "--which", "raw", "--from", "1", "--to", "2", "--step", "0.25", "--digits", "30", "--format", "csv"]);
    assert_eq!(code, 0);
    let xs: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(xs, ["1.00", "1.25", "1.50", "1.75", "2.00"]);
    // at x = 2 the integrand is 2^{1/2}
    assert!(out.lines().last().unwrap().contains(",1.414213562373095048801688724210,"));
}
