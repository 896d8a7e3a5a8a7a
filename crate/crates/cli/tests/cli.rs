use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures")).join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ida-combo")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn row<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix(','))
}

/// Asserts the exit code and a single-line `error[category]` diagnostic.
fn assert_error(out: &Output, code: i32, category: &str) {
    assert_eq!(out.status.code(), Some(code));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "stderr: {err}");
    assert!(err.starts_with(&format!("error[{category}]: ")), "stderr: {err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn predict_orr_prints_rows() {
    let out = run(&["predict-orr", "--r1", "0.372", "--r2", "0.148", "--phi", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("key,value\n"));
    assert_eq!(row(&text, "orr"), Some("0.4649"));
}

#[test]
fn negative_correlation_is_a_value_not_a_flag() {
    let out = run(&["predict-orr", "--r1", "0.9", "--r2", "0.1", "--phi", "-0.5"]);
    assert!(out.status.success());
    assert_eq!(row(&stdout(&out), "phi_min"), Some("-1.0000"));
}

#[test]
fn error_categories_map_to_exit_codes() {
    assert_error(&run(&["predict-orr", "--r1", "0.5"]), 2, "usage");
    assert_error(&run(&["deep-response", "--wf", "/nonexistent/wf.csv"]), 3, "parse");
    assert_error(&run(&["predict-orr", "--r1", "1.5", "--r2", "0.1", "--phi", "0"]), 4, "invariant");
    assert_error(&run(&["predict-orr", "--r1", "0.9", "--r2", "0.1", "--phi", "0.5"]), 5, "infeasible-model");
}

#[test]
fn malformed_csv_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "index,pct_change\nx,y\n").unwrap();
    assert_error(&run(&["deep-response", "--wf", path.to_str().unwrap()]), 3, "parse");
}

#[test]
fn failed_prediction_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("wf.csv");
    let out = run(&[
        "predict-waterfall",
        "--wf1",
        fixture("checkmate067_nivo_wf.csv").to_str().unwrap(),
        "--wf2",
        fixture("checkmate067_ipi_wf.csv").to_str().unwrap(),
        "--rho",
        "2",
        "--nboot",
        "0",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_error(&out, 4, "invariant");
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn dor_output_carries_variance() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("dor.csv");
    let out = run(&[
        "predict-dor",
        "--s1",
        fixture("keynote062_chemo_dor.csv").to_str().unwrap(),
        "--s2",
        fixture("keynote062_pembro_dor.csv").to_str().unwrap(),
        "--r1",
        "0.372",
        "--r2",
        "0.148",
        "--n1",
        "250",
        "--n2",
        "256",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(row(&text, "median_ordering"), Some("combo_shorter"));
    let median: f64 = row(&text, "median_months").unwrap().parse().unwrap();
    assert!((7.0..=9.0).contains(&median));

    let csv = fs::read_to_string(&out_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("time_months,survival_prob,variance"));
    assert_eq!(lines.next(), Some("0,1,0"));
    assert!(lines.all(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap() >= 0.0));
}

#[test]
fn study_file_supplies_rates_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let study = dir.path().join("study.toml");
    fs::write(
        &study,
        format!(
            "seed = 7\n[correlation]\nphi_prime = 0.0\n\
             [[drug]]\nlabel = \"chemo\"\norr = 0.372\nn = 250\ndor_csv = \"{}\"\n\
             [[drug]]\nlabel = \"pembro\"\norr = 0.148\nn = 256\ndor_csv = \"{}\"\n",
            fixture("keynote062_chemo_dor.csv").display(),
            fixture("keynote062_pembro_dor.csv").display(),
        ),
    )
    .unwrap();
    let out = run(&["predict-orr", "--study", study.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(row(&stdout(&out), "orr"), Some("0.4649"));
}

#[test]
fn deep_response_counts_changes_beyond_threshold() {
    let out = run(&["deep-response", "--wf", fixture("hypothetical_drug1_wf.csv").to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(row(&text, "deep_response_rate"), Some("0.4000"));
    assert_eq!(row(&text, "response_rate"), Some("0.7000"));
}

#[test]
fn sample_size_reports_method() {
    let out = run(&["sample-size", "--p0", "0.7", "--p1", "0.8"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(row(&text, "n_total"), Some("462"));
    assert!(row(&text, "note").is_some());
}
