//! Contract tests for the `zpeff` binary: exit codes, golden output and
//! the CSV/JSON dialects.

use std::path::Path;
use std::process::{Command, Output};

use zpeff_cli::CurveTable;

fn zpeff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zpeff"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["bogus"][..],
        &["roots", "--no-such-flag"],
        &["curves", "--figure", "6"],
        &["curves", "--figure", "1", "--grid", "9"],
        &["measure", "--a", "0.5"],
        &["measure", "--dist", "0.5,0.5"],
        &["stability", "--a", "0.3"],
        &["fit", "--counts", "x.csv", "--samples", "y.txt"],
        &["fit", "--corpus", "x.txt", "--xmin", "1"],
        &["fit", "--corpus", "x.txt", "--window", "9:3"],
        &["--format", "xml", "roots"],
    ] {
        let o = zpeff(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn help_and_version_exit_0_on_stdout() {
    for args in [&["--help"][..], &["--version"], &["maximize", "--help"]] {
        let o = zpeff(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn failures_exit_1() {
    for args in [
        &["measure", "--dist", "0.5,0.6", "--a", "0.3"][..],
        &["measure", "--dist", "0.5,0.5", "--a", "-0.2"],
        &["measure", "--input", "/nonexistent/p.txt", "--a", "0.3"],
        &["maximize", "--values", "1,2,3", "--a", "0.25", "--mean", "9"],
        &["maximize", "--values", "1,2,3", "--a", "0.7", "--mean", "2"],
        &["fit", "--samples", "/nonexistent/s.txt"],
        &["stability", "--a", "1.5", "--epsilon", "0.01"],
    ] {
        let o = zpeff(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.starts_with("error: "), "{args:?}: {err}");
    }
}

#[test]
fn roots_golden() {
    let o = zpeff(&["--quiet", "roots"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let (head, last) = out.trim_end().rsplit_once('\n').unwrap();
    assert_eq!(format!("{head}\n"), golden("roots.csv"));
    let eta: f64 = last.strip_prefix("eta_at_beta_star,").unwrap().parse().unwrap();
    assert!(eta.abs() < 1e-12);
}

#[test]
fn figure2_golden_with_divergence_markers() {
    let out = stdout(&zpeff(&["--quiet", "curves", "--figure", "2", "--grid", "11"]));
    assert_eq!(out, golden("figure2_grid11.csv"));
}

#[test]
fn measure_golden() {
    let out = stdout(&zpeff(&[
        "--quiet", "measure", "--dist", "0.5,0.25,0.25", "--a", "0.5",
    ]));
    assert_eq!(out, golden("measure_three_state.csv"));
}

#[test]
fn curve_csv_round_trips_byte_for_byte() {
    for fig in ["1", "2", "3", "4", "5"] {
        let out = stdout(&zpeff(&["--quiet", "curves", "--figure", fig, "--grid", "37"]));
        let t = CurveTable::from_csv(&out).unwrap();
        assert_eq!(t.to_csv(), out, "figure {fig}");
    }
}

#[test]
fn json_writes_null_and_lists_divergence() {
    let o = zpeff(&["--quiet", "--format", "json", "curves", "--figure", "2", "--grid", "10"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let eta = &v["columns"][2];
    assert_eq!(eta["name"], "eta");
    assert!(eta["values"][0].is_null());
    assert!(eta["values"][9].is_null());
    assert_eq!(eta["diverges"][0]["index"], 0);
    assert_eq!(eta["diverges"][0]["to"], "-inf");
    assert_eq!(eta["diverges"][1]["to"], "+inf");

    let o = zpeff(&["--quiet", "--format", "json", "measure", "--dist", "0.5,0.5", "--a", "0.25"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["states"], 2);
    assert!(v.get("diverges").is_none());
}

#[test]
fn quiet_silences_the_summary() {
    let loud = zpeff(&["roots"]);
    let quiet = zpeff(&["--quiet", "roots"]);
    assert!(String::from_utf8_lossy(&loud.stderr).contains("a* = 0.194513115"));
    assert!(quiet.stderr.is_empty());
    assert_eq!(loud.stdout, quiet.stdout);
}

#[test]
fn no_negative_zero_in_output() {
    let out = stdout(&zpeff(&["--quiet", "measure", "--dist", "1,0", "--a", "0"]));
    assert!(out.contains("efficiency,0\n") && out.contains("shannon,0\n"), "{out}");
}

#[test]
fn fit_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let counts = dir.path().join("counts.csv");
    let table: String = (1..=16).map(|r| format!("w{r},{}\n", 720_720 / r)).collect();
    std::fs::write(&counts, table).unwrap();
    let o = zpeff(&["--quiet", "fit", "--counts", counts.to_str().unwrap(), "--window", "1:16"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("# alpha=1\n"), "{out}");
    assert!(out.contains("rank,token,frequency\n1,w1,720720\n"));

    let corpus = dir.path().join("corpus.txt");
    std::fs::write(&corpus, "The the THE cat. Cat dog").unwrap();
    let folded = stdout(&zpeff(&["--quiet", "fit", "--corpus", corpus.to_str().unwrap(), "--window", "1:3"]));
    assert!(folded.contains("1,the,3\n2,cat,2\n3,dog,1\n"), "{folded}");
    let kept = stdout(&zpeff(&[
        "--quiet", "fit", "--corpus", corpus.to_str().unwrap(), "--keep-case", "--window", "1:3",
    ]));
    assert!(kept.contains("# distinct=6\n"), "{kept}");
}

#[test]
fn stability_reports_per_size() {
    let o = zpeff(&[
        "--quiet", "--seed", "9", "stability", "--a", "0.3", "--epsilon", "0.01", "--sizes", "2,50",
        "--trials", "100",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("# seed=9\n") && out.contains("# pass=true\n"), "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("2,") || l.starts_with("50,")).count(), 2);
}

#[test]
fn maximize_reports_power_law() {
    let o = zpeff(&["--quiet", "maximize", "--values", "1:1000", "--a", "0.25", "--mean", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let exponent: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("# density_exponent="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((exponent + 4.0).abs() < 0.08);
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 1001);
}
