use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_polya-cert"));
    c.env_remove("POLYA_CERT_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_domain(dir: &Path, name: &str, vertices: &[(f64, f64)]) -> PathBuf {
    let path = dir.join(name);
    let vs: Vec<[f64; 2]> = vertices.iter().map(|&(x, y)| [x, y]).collect();
    std::fs::write(&path, serde_json::json!({ "vertices": vs }).to_string()).unwrap();
    path
}

fn square(dir: &Path) -> PathBuf {
    write_domain(dir, "square.json", &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_square_at_100() {
    let dir = TempDir::new().unwrap();
    let sq = square(dir.path());
    let o = run(&["verify", "--domain", sq.to_str().unwrap(), "--lambda", "100"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(col("n_N"), "13");
    assert_eq!(&col("bound_convex")[..4], "4.99");
    assert_eq!(col("pass"), "true");
    assert!(lines.next().is_none());
}

#[test]
fn missing_domain_is_a_usage_error() {
    let o = run(&["verify", "--domain", "/nonexistent/missing.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.json"));
    assert!(o.stdout.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let sq = square(dir.path());
    let sq = sq.to_str().unwrap();
    for args in [
        vec!["verify"],
        vec!["verify", "--domain", sq, "--lambda", "-3"],
        vec!["verify", "--domain", sq, "--lambda", "10:1:4"],
        vec!["verify", "--domain", sq, "--lambda", "10", "--h", "0"],
        vec!["verify", "--domain", sq, "--format", "pdf"],
        vec!["dim-table", "--d-range", "2:30"],
        vec!["dim-table", "--d-range", "x"],
        vec!["shift-search", "--domain", sq],
        vec!["nonsense"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
    let bad = write_domain(dir.path(), "bad.json", &[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]);
    assert_eq!(run(&["verify", "--domain", bad.to_str().unwrap()]).status.code(), Some(2));
    let o = bin().args(["bounds"]).env("POLYA_CERT_THREADS", "zero").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn analytic_spectrum_needs_a_rectangle() {
    let dir = TempDir::new().unwrap();
    let tri = write_domain(dir.path(), "tri.json", &[(0.0, 0.0), (1.0, 0.0), (0.5, 0.8)]);
    let o = run(&["verify", "--domain", tri.to_str().unwrap(), "--lambda", "50", "--spectrum", "analytic"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bounds_table() {
    let o = run(&["bounds"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rounded: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(rounded, ["0.0398", "0.0499", "0.0796", "2.4048"]);
}

#[test]
fn fem_sweep_writes_every_format_deterministically() {
    let dir = TempDir::new().unwrap();
    let tri = write_domain(dir.path(), "tri.json", &[(0.0, 0.0), (1.5, 0.0), (0.75, 1.299_038_105_676_658)]);
    let outs: Vec<PathBuf> = (0..2).map(|i| dir.path().join(format!("out{i}"))).collect();
    for (i, out) in outs.iter().enumerate() {
        let threads = if i == 0 { "1" } else { "3" };
        let o = bin()
            .args(["verify", "--domain", tri.to_str().unwrap(), "--lambda", "5:80:4", "--h", "0.05"])
            .args(["--out", out.to_str().unwrap(), "--format", "json", "--format", "csv", "--format", "svg"])
            .env("POLYA_CERT_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        // The first non-SVG format goes to stdout.
        assert!(stdout(&o).starts_with('['));
    }
    for ext in ["csv", "json", "svg"] {
        let a = std::fs::read(outs[0].join(format!("verify.{ext}"))).unwrap();
        let b = std::fs::read(outs[1].join(format!("verify.{ext}"))).unwrap();
        assert_eq!(a, b, "verify.{ext} differs between runs");
    }
    let csv = std::fs::read_to_string(outs[0].join("verify.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(outs[0].join("verify.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 4);

    let svg = std::fs::read_to_string(outs[0].join("verify.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).expect("SVG is well-formed XML");
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    let count = |tag: &str| doc.descendants().filter(|n| n.tag_name().name() == tag).count();
    assert_eq!(count("line"), 3);
    assert_eq!(count("circle"), 4);
}

#[test]
fn unwritable_plot_does_not_change_the_exit_code() {
    let dir = TempDir::new().unwrap();
    let sq = square(dir.path());
    let out = dir.path().join("out");
    // A directory where the SVG file should go makes the write fail.
    std::fs::create_dir_all(out.join("verify.svg")).unwrap();
    let o = run(&["verify", "--domain", sq.to_str().unwrap(), "--lambda", "100", "--out", out.to_str().unwrap(), "--format", "csv", "--format", "svg"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert!(out.join("verify.csv").is_file());
}

#[test]
fn spectrum_subcommand() {
    let dir = TempDir::new().unwrap();
    let sq = square(dir.path());
    let o = run(&["spectrum", "--domain", sq.to_str().unwrap(), "--h", "0.05", "--count", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mu: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(mu.len(), 6);
    assert!(mu[0].abs() < 1e-8);
    let pi2 = std::f64::consts::PI.powi(2);
    for (got, want) in mu[1..].iter().zip([pi2, pi2, 2.0 * pi2, 4.0 * pi2, 4.0 * pi2]) {
        assert!((got - want).abs() < 0.02 * want, "{got} vs {want}");
    }
}

#[test]
fn lemma_and_dimension_tables() {
    let o = run(&["lemma-check", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 80);
    assert!(rows.iter().all(|r| r["ok"] == true));

    let o = run(&["dim-table", "--d-range", "3:24"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 23);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn shift_search_packs_the_square() {
    let dir = TempDir::new().unwrap();
    let sq = square(dir.path());
    let o = run(&["shift-search", "--domain", sq.to_str().unwrap(), "--r", "0.1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["count"].as_u64().unwrap() >= 29);
    assert_eq!(v["points"].as_array().unwrap().len() as u64, v["count"].as_u64().unwrap());

    let o = run(&["shift-search", "--domain", sq.to_str().unwrap(), "--lambda", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().count() > 5);
}
