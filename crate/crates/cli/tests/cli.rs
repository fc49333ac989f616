//! End-to-end runs of the `calib-lab` binary.

use std::path::Path;
use std::process::{Command, Output};

fn lab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_calib-lab"))
        .args(args)
        .current_dir(dir)
        .env("CALIB_LAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn passing_suite_exits_zero_with_default_file_name() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(dir.path(), &["verify", "cmc-hyperbolic", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("cmc-hyperbolic-5.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["summary"]["failed"], 0);
    assert!(v.get("runtime_ms").is_none());
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, out: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_calib-lab"))
            .args(["verify", "special-sec55", "--seed", "9", "--samples", "200", "--out", out])
            .current_dir(dir.path())
            .env("CALIB_LAB_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(dir.path().join(out)).unwrap()
    };
    let a = run("1", "a.json");
    let b = run("1", "b.json");
    let c = run("4", "c.json");
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn zero_tolerance_on_a_finite_difference_check_fails() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("strict.toml"), "suite = \"identities-flat\"\nseed = 1\nsamples = 10\n[tolerances]\n\"laplacian\" = 0.0\n").unwrap();
    let o = lab(dir.path(), &["verify", "identities-flat", "--config", "strict.toml", "--format", "csv", "--out", "r.csv"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert!(csv.starts_with("suite,check_id,anchor,lhs,rhs,residual,tol,pass\n"));
    let failing: Vec<&str> = csv.lines().filter(|l| l.contains(",laplacian.") && l.ends_with(",false")).collect();
    assert!(!failing.is_empty());
    // The residual is reported, not hidden.
    for line in failing {
        let fields: Vec<&str> = line.split(',').collect();
        let residual: f64 = fields[fields.len() - 3].parse().unwrap();
        assert!(residual > 0.0);
    }
}

#[test]
fn config_errors_exit_two_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "suite = \"cmc-hyperbolic\"\nseed = 1\n\n[mesh]\nnr = \"many\"\n").unwrap();
    let o = lab(dir.path(), &["verify", "cmc-hyperbolic", "--config", "bad.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 5"), "{}", stderr(&o));
    std::fs::write(dir.path().join("bad.json"), "{\n  \"suite\": \"cmc-hyperbolic\",\n  \"seed\": 1,\n  \"colour\": 3\n}\n").unwrap();
    let o = lab(dir.path(), &["verify", "cmc-hyperbolic", "--config", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
    let o = lab(dir.path(), &["verify", "no-such-suite"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn merged_reports_keep_every_record() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lab(dir.path(), &["verify", "cmc-hyperbolic", "--seed", "2"]).status.code(), Some(0));
    assert_eq!(lab(dir.path(), &["verify", "comass-catalog", "--seed", "2", "--samples", "20"]).status.code(), Some(0));
    let o = lab(dir.path(), &["report-merge", "cmc-hyperbolic-2.json", "comass-catalog-2.json", "--name", "all", "--out", "all.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("all.json")).unwrap()).unwrap();
    assert_eq!(v["summary"]["total"], 24);
}

#[test]
fn tool_subcommands_print_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(dir.path(), &["angle", "--calibration", "kahler", "--params", "1,1", "--frame", "1,0;0,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let o = lab(dir.path(), &["comass", "--calibration", "associative", "--restarts", "10"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["comass"].as_f64().unwrap() - 1.0).abs() < 1e-3);

    std::fs::write(dir.path().join("p4.txt"), "0 1 1\n1 2 1\n2 3 1\n").unwrap();
    let o = lab(dir.path(), &["cheeger", "--graph", "p4.txt"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["cheeger"].as_f64().unwrap() > 0.0);

    let o = lab(dir.path(), &["cmc", "--m", "2", "--c", "1", "--radii", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let exact = 2.0 * (0.5f64.cosh() - 1.0);
    assert!((v["profile"][0]["height"].as_f64().unwrap() - exact).abs() < 1e-8);
}
