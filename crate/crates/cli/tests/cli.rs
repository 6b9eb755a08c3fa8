use std::path::PathBuf;
use std::process::{Command, Output};

fn gencol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gencol"))
        .args(args)
        .output()
        .expect("gencol runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn bigo_exit_codes() {
    let o = gencol(&["bigo", "u^2", "u"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("x = O(y): holds"));
    assert!(stdout(&o).contains("witness"));

    let o = gencol(&["bigo", "u*L", "u"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("x = O(y): fails"));
}

#[test]
fn bigo_counterexample_csv_reverifies() {
    let path = tmp("bigo_one_u.csv");
    let o = gencol(&[
        "bigo",
        "1",
        "u",
        "--index",
        "special",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let mut r = csv::Reader::from_path(&path).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["H", "k", "gauge", "|x|", "H|y|"]);
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert!(rows.len() >= 7);
    let num = |s: &str| s.parse::<f64>().unwrap();
    for row in &rows {
        assert!(num(&row[3]) > num(&row[4]), "{row:?}");
        // the gauge is 2^-k
        assert_eq!(num(&row[2]), (-num(&row[1])).exp2());
    }
    let hs: Vec<f64> = rows.iter().map(|r| num(&r[0])).collect();
    assert_eq!(hs.first(), Some(&1.0));
    assert_eq!(hs.last(), Some(&1e6));
}

#[test]
fn parse_errors_are_usage_errors() {
    let o = gencol(&["bigo", "u^(", "u"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(stderr(&o).contains("at 3"), "{}", stderr(&o));
    let o = gencol(&["genfun", "moderate", "delta(("]);
    assert_eq!(o.status.code(), Some(64));
    let o = gencol(&["bigo", "u"]);
    assert_eq!(o.status.code(), Some(64));
    let o = gencol(&["bigo", "u", "u", "--index", "hyperreal"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn help_exits_cleanly() {
    let o = gencol(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("genfun"));
}

#[test]
fn laws_trial_count_must_be_positive() {
    let o = gencol(&["laws", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn laws_pass_on_a_small_budget() {
    for kind in ["special", "full"] {
        let o = gencol(&["laws", "--trials", "60", "--seed", "7", "--index", kind]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(!stdout(&o).contains("FAILED"));
    }
}

#[test]
fn validate_passes_for_every_instance() {
    for kind in ["special", "full", "nsa-base", "trivial"] {
        let o = gencol(&["validate", "--budget", "100", "--index", kind]);
        assert_eq!(o.status.code(), Some(0), "{kind}: {}", stdout(&o));
    }
}

#[test]
fn genfun_examples() {
    let o = gencol(&["genfun", "moderate", "delta()"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("N = 1 at alpha = 0"));

    let o = gencol(&["genfun", "equal", "dH()", "delta()"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("equal: true"));

    let o = gencol(&["genfun", "equal", "x*delta()", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("equal: false"));

    let o = gencol(&["genfun", "zero-test", "x*delta()"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("nonzero witness"));

    let o = gencol(&["genfun", "negligible", "u^10*x"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn point_eval_reports_leading_behaviour() {
    let o = gencol(&["genfun", "point-eval", "x*delta()", "u^2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let e = v["leading"]["exponent"].as_f64().unwrap();
    assert!((e - 1.0).abs() < 1e-3);
    assert_eq!(v["perturbation"], "holds");
    assert_eq!(v["failing_m"], 2);

    // a point running off to infinity has no compact support
    let o = gencol(&["genfun", "point-eval", "delta()", "u^-1"]);
    assert_eq!(o.status.code(), Some(65));
}

#[test]
fn unsupported_kinds_are_data_errors() {
    let o = gencol(&["genfun", "moderate", "delta()", "--index", "trivial"]);
    assert_eq!(o.status.code(), Some(65));
    assert!(stderr(&o).contains("unsupported"));
    let o = gencol(&["bigo", "u", "u", "--q", "2"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn probe_csv_has_one_row_per_probe_point() {
    let path = tmp("moderate_delta.csv");
    let o = gencol(&[
        "genfun",
        "moderate",
        "delta()",
        "--kmin",
        "6",
        "--kmax",
        "12",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_path(&path).unwrap();
    assert_eq!(
        r.headers().unwrap(),
        vec!["K_lo", "K_hi", "alpha", "k", "gauge", "sup", "slope"]
    );
    // two compact sets, four derivative orders, seven probe points
    assert_eq!(r.records().count(), 2 * 4 * 7);
}

#[test]
fn reports_are_deterministic() {
    for args in [
        &["genfun", "zero-test", "x*delta()", "--json"][..],
        &["laws", "--trials", "40", "--index", "full", "--seed", "3"][..],
        &["bigo", "u*L^2 + u^3", "u^(1/2)"][..],
    ] {
        let (a, b) = (gencol(args), gencol(args));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let path = tmp("session.toml");
    std::fs::write(
        &path,
        "q = 2\nkmin = 6\nkmax = 12\n\n[index]\nkind = \"full\"\nprofile = \"aq3\"\n",
    )
    .unwrap();
    let cfg = path.to_str().unwrap();
    let o = gencol(&["bigo", "u^2", "u", "--config", cfg, "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["index"], "full");
    assert_eq!(v["class"], "A_2");

    let o = gencol(&["bigo", "u^2", "u", "--config", cfg, "--q", "1", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["class"], "A_1");

    std::fs::write(&path, "colour = \"blue\"\n").unwrap();
    let o = gencol(&["bigo", "u^2", "u", "--config", cfg]);
    assert_eq!(o.status.code(), Some(64));
}
