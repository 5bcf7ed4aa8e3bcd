//! End-to-end runs of the installed binary: report content, exit codes,
//! and output-file determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mml(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mml"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).expect("utf-8 output")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

/// Pulls the number following `marker` on the line containing it.
fn number_after(report: &str, marker: &str) -> f64 {
    let line = report.lines().find(|l| l.contains(marker)).expect("marker line");
    let tail = &line[line.find(marker).unwrap() + marker.len()..];
    let token: String = tail
        .trim_start()
        .chars()
        .take_while(|c| c.is_ascii_digit() || *c == '.' || *c == '-')
        .collect();
    token.parse().expect("numeric token")
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn smml_table_prints_known_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout_of(&mml(dir.path(), &["smml-table", "--n-max", "10"]));
    assert!(out.contains("{0..1}"));
    let n10 = out.lines().find(|l| l.contains("{0..0, 1..4, 5..9, 10..10}")).expect("n=10 row");
    assert!(n10.contains("0.000, 0.250, 0.700, 1.000"));
    assert!(n10.contains("3.647"));
}

#[test]
fn smml_table_writes_csv_with_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = mml(dir.path(), &["smml-table", "--n-max", "5", "--output", "table.csv"]);
    assert_eq!(exit_code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("table.csv")).unwrap();
    assert!(csv.starts_with("n,partition,estimates,codelength,units\n"));
    assert!(csv.contains("\"{0..0, 1..3}\""));
    let manifest = fs::read_to_string(dir.path().join("table.csv.manifest.json")).unwrap();
    assert!(manifest.contains("\"command\": \"smml-table\""));
}

#[test]
fn codelengths_reports_reference_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout_of(&mml(dir.path(), &["codelengths", "10", "3"]));
    assert!(out.contains("estimate 0.250, expected codelength 3.647 bits"));
    assert!(out.contains("estimate 0.318 (= 7/22)"));
    assert!(out.contains("codelength 3.609 bits"));
    assert!(out.contains("uncertainty volume 0.510"));
    assert!(out.contains("codelength 4.126 bits"));
    assert!(out.contains("complexity 2.220 bits"));
}

#[test]
fn units_flag_switches_the_display() {
    let dir = tempfile::tempdir().unwrap();
    let bits = stdout_of(&mml(dir.path(), &["codelengths", "10", "3"]));
    let nats = stdout_of(&mml(dir.path(), &["codelengths", "10", "3", "--units", "nats"]));
    assert!(bits.contains("3.609 bits"));
    assert!(nats.contains("2.502 nats"));
}

#[test]
fn ttest_separated_groups_reject_decisively() {
    let dir = tempfile::tempdir().unwrap();
    // Two n=20 grids five pooled standard deviations apart.
    let mut rows = String::new();
    for i in 0..20 {
        let y = (f64::from(i) - 9.5) / 10.0;
        rows.push_str(&format!("{},{}\n", y, y + 5.0 * 0.5916079783099616));
    }
    let input = write(dir.path(), "groups.csv", &rows);
    let out = stdout_of(&mml(dir.path(), &["ttest", &input]));
    assert!(out.contains("decision:    alternative"));
    assert!(number_after(&out, "I0 - I1 =") > 2.3);
}

#[test]
fn ttest_identical_groups_keep_the_null() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows = String::new();
    for i in 0..10 {
        rows.push_str(&format!("{0},{0}\n", f64::from(i) * 0.3));
    }
    let input = write(dir.path(), "same.csv", &rows);
    let out = stdout_of(&mml(dir.path(), &["ttest", &input, "--with-bayes-factor"]));
    assert!(out.contains("decision:    null"));
    assert!(number_after(&out, "delta =").abs() < 0.05);
    assert!(number_after(&out, "BF10 =") < 1.0);
}

#[test]
fn corrtest_detects_and_keeps_hypotheses() {
    let dir = tempfile::tempdir().unwrap();
    let near_line = write(
        dir.path(),
        "line.csv",
        "1.0,1.05\n2.0,2.1\n3.0,2.95\n4.0,4.02\n5.0,5.1\n6.0,5.9\n",
    );
    let out = stdout_of(&mml(dir.path(), &["corrtest", &near_line]));
    assert!(out.contains("decision:    alternative"));

    let sample = write(
        dir.path(),
        "pairs.csv",
        "2.5,1.2\n0.9,0.5\n3.1,2.8\n1.8,1.6\n2.2,1.4\n4.0,3.6\n1.1,0.3\n2.9,2.2\n3.5,2.5\n0.4,0.8\n2.0,1.9\n3.3,2.4\n",
    );
    let matched = stdout_of(&mml(dir.path(), &["corrtest", &sample, "--rho0", "0.91"]));
    assert!(matched.contains("r = 0.910"));
    assert!(matched.contains("decision:    null"));
    assert!(matched.contains("olkin-pratt = 0.917"));
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["smml-table", "--n-max", "0"],
        &["codelengths", "10", "11"],
        &["ttest", "missing.csv"],
        &["corrtest", "missing.csv"],
        &["simulate", "delta-nmse", "--reps", "0"],
        &["simulate", "no-such-experiment"],
    ];
    for args in cases {
        assert_eq!(exit_code(&mml(dir.path(), args)), 2, "args {args:?}");
    }

    let wide = write(dir.path(), "wide.csv", "1.0,2.0,3.0\n4.0,5.0,6.0\n");
    assert_eq!(exit_code(&mml(dir.path(), &["ttest", &wide])), 2);

    let constant = write(dir.path(), "constant.csv", "a,1.0\na,1.0\nb,1.0\nb,1.0\n");
    let out = mml(dir.path(), &["ttest", &constant]);
    assert_eq!(exit_code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));

    let collinear = write(dir.path(), "flat.csv", "1.0,2.0\n1.0,3.0\n1.0,4.0\n1.0,5.0\n");
    assert_eq!(exit_code(&mml(dir.path(), &["corrtest", &collinear])), 3);

    let sample = write(dir.path(), "ok.csv", "1.0,2.0\n2.0,2.5\n3.0,2.2\n4.0,3.0\n");
    assert_eq!(exit_code(&mml(dir.path(), &["corrtest", &sample, "--rho0", "1.5"])), 2);
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    fn args<'a>(name: &'a str) -> Vec<&'a str> {
        vec![
            "simulate",
            "rho-mse",
            "--seed",
            "7",
            "--reps",
            "50",
            "--grid",
            "0.0,0.4",
            "--n",
            "20",
            "--output",
            name,
        ]
    }
    stdout_of(&mml(dir.path(), &args("a.csv")));
    stdout_of(&mml(dir.path(), &args("b.csv")));
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    let b = fs::read(dir.path().join("b.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);

    let other_seed = mml(
        dir.path(),
        &[
            "simulate", "rho-mse", "--seed", "8", "--reps", "50", "--grid", "0.0,0.4", "--n",
            "20", "--output", "c.csv",
        ],
    );
    assert_eq!(exit_code(&other_seed), 0);
    assert_ne!(a, fs::read(dir.path().join("c.csv")).unwrap());
}

#[test]
fn corr_table_covers_every_cell() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout_of(&mml(dir.path(), &["simulate", "corr-table", "--reps", "5"]));
    assert!(out.contains("120 rows"));
    let csv = fs::read_to_string(dir.path().join("corr-table.csv")).unwrap();
    let cells: std::collections::BTreeSet<(String, String, String)> = csv
        .lines()
        .skip(1)
        .filter(|line| line.contains("/reject,"))
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            let rho0 = fields[0].split('/').next().unwrap().to_owned();
            (rho0, fields[1].to_owned(), fields[2].to_owned())
        })
        .collect();
    assert_eq!(cells.len(), 24, "distinct (rho0, n, rho) cells");
}

#[test]
fn manifests_distinguish_inputs_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.csv", "1.0,2.0\n2.0,2.5\n3.0,2.2\n4.0,3.0\n5.0,3.6\n");
    let run = |out_name: &str, extra: &[&str]| {
        let mut args = vec!["corrtest", &input, "--output", out_name];
        args.extend_from_slice(extra);
        stdout_of(&mml(dir.path(), &args));
        fs::read_to_string(dir.path().join(format!("{out_name}.manifest.json"))).unwrap()
    };
    let base = run("r1.txt", &[]);
    let same = run("r2.txt", &[]);
    assert_eq!(base, same);
    let new_flag = run("r3.txt", &["--threshold", "2.3"]);
    assert_ne!(base, new_flag);

    let altered = write(dir.path(), "in2.csv", "1.0,2.0\n2.0,2.5\n3.0,2.2\n4.0,3.1\n5.0,3.6\n");
    let out = stdout_of(&mml(dir.path(), &["corrtest", &altered, "--output", "r4.txt"]));
    assert!(out.contains("wrote"));
    let changed = fs::read_to_string(dir.path().join("r4.txt.manifest.json")).unwrap();
    assert_ne!(base, changed);
}
