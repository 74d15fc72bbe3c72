use std::process::{Command, Output};

fn bwcurve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bwcurve")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn num(v: &serde_json::Value) -> f64 {
    v["value"].as_str().unwrap().parse().unwrap()
}

#[test]
fn golden_bounds_sandwich() {
    let o = bwcurve(&["bounds", "--x", "golden", "--d", "1", "--n", "2..10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let records = v.as_array().unwrap();
    assert_eq!(records.len(), 9);
    for (i, r) in records.iter().enumerate() {
        assert_eq!(r["n"], i as u64 + 2);
        let upper = num(&r["upper_cert"]);
        for key in ["lower_universal", "lower_vanishing", "lower_optimizer"] {
            let lower = num(&r[key]);
            assert!(lower >= 0.0 && lower <= upper, "{key} at n={}", r["n"]);
            assert_eq!(r[key]["bits"], 256);
        }
        if !r["lower_resonance"].is_null() {
            assert!(num(&r["lower_resonance"]["bound"]) <= upper);
        }
    }
}

#[test]
fn rational_input_names_the_relation() {
    let o = bwcurve(&["bounds", "--x", "1/2", "--d", "1", "--n", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("q = [2]"), "{}", stderr(&o));
}

#[test]
fn two_dimensional_bounds_csv() {
    let o = bwcurve(&["bounds", "--x", "sqrt2m1,sqrt3m1", "--d", "2", "--n", "2..6", "--format", "csv", "--restarts", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "upper_cert").unwrap();
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let upper: f64 = row.split(',').nth(col).unwrap().parse().unwrap();
        assert!(upper.is_finite() && upper > 0.0);
    }
}

#[test]
fn reports_are_byte_stable() {
    let args = ["bounds", "--x", "golden", "--n", "3..4", "--format", "csv"];
    assert_eq!(stdout(&bwcurve(&args)), stdout(&bwcurve(&args)));
}

#[test]
fn golden_scan_has_one_row_per_norm() {
    let o = bwcurve(&["scan", "--x", "golden", "--Q", "1000", "--cone", "all", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1001);
    assert!(text.starts_with("norm,q1,p,dist_lo,dist_hi,w_stat"));
}

#[test]
fn liouville_scan_row() {
    let o = bwcurve(&["scan", "--x", "liouville(2,2)", "--Q", "8", "--cone", "nonneg", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let row = text.lines().find(|l| l.starts_with("4,4,")).expect("row for q = 4");
    let w: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!(w > 1.0);
}

#[test]
fn rational_scan_exits_with_violation() {
    let o = bwcurve(&["scan", "--x", "0.5", "--Q", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn beta_table_csv() {
    let o = bwcurve(&["beta", "--x", "0.5", "--n", "1", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let signs: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(signs, ["+", "+", "-"]);
}

#[test]
fn resonance_json() {
    let o = bwcurve(&["resonance", "--x", "liouville(2,2)", "--q", "4", "--out", "/dev/stdout"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 4);
    let bound = num(&v["bound"]);
    assert!((bound - (62.0 * 2f64.ln() - 4.0)).abs() < 1e-9);
}

#[test]
fn output_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("beta.json");
    let o = bwcurve(&["beta", "--x", "golden", "--n", "2", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 6);
}

#[test]
fn invalid_configurations() {
    assert_eq!(bwcurve(&["beta", "--x", "golden", "--d", "2", "--n", "1"]).status.code(), Some(1));
    assert_eq!(bwcurve(&["beta", "--x", "golden", "--n", "1", "--precision", "32"]).status.code(), Some(1));
    assert_eq!(bwcurve(&["beta", "--x", "golden,sqrt2m1,sqrt3m1", "--n", "30"]).status.code(), Some(1));
    assert_eq!(bwcurve(&["selftest", "--only", "99"]).status.code(), Some(1));
}

#[test]
fn selftest_subset_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("checks.csv");
    let o = bwcurve(&["selftest", "--quick", "--only", "1,7,9,L-chain", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(stderr(&o).contains("PASS 1"));
}

#[test]
fn selftest_reports_failures_with_exit_one() {
    let o = bwcurve(&["selftest", "--quick", "--only", "8"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FAIL 8"));
}

#[test]
fn low_precision_selftest_does_not_crash() {
    let o = bwcurve(&["selftest", "--quick", "--precision", "64", "--only", "2,6"]);
    assert!(matches!(o.status.code(), Some(0) | Some(1)), "{}", stderr(&o));
}
