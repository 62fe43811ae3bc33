use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_zeno");

const TWO_QUBIT: &str = r#"{
  "model": {"n_free": 1, "j": [1.0, 2.3, -0.61], "theta": 0.0, "phi": 0.0, "mu": 1.0, "gamma": 200.0},
  "run": {"gammas": [50, 100, 200, 400], "ep_grid": {"start": 2, "stop": 12, "step": 0.05}}
}"#;

fn zeno(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().expect("binary runs")
}

fn with_config(text: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.json"), text).unwrap();
    dir
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn exact_spectrum_csv_layout() {
    let dir = with_config(TWO_QUBIT);
    let out = zeno(dir.path(), &["spectrum-exact", "--config", "run.json", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&dir.path().join("o"), "spectrum_exact.csv");
    assert!(!csv.contains('\r'));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "re,im,stripe_label");
    assert_eq!(lines.len(), 17);
    for l in &lines[1..] {
        let fields: Vec<&str> = l.split(',').collect();
        assert_eq!(fields.len(), 3);
        for f in &fields[..2] {
            let mantissa = f.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{f}");
            f.parse::<f64>().unwrap();
        }
    }
    let meta: serde_json::Value = serde_json::from_str(&read(&dir.path().join("o"), "spectrum_exact_meta.json")).unwrap();
    assert_eq!(meta["eigenvalue_count"], 16);
}

#[test]
fn json_output_round_trips() {
    let dir = with_config(TWO_QUBIT);
    let out = zeno(dir.path(), &["spectrum-zeno", "--config", "run.json", "--out", "o", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let total: usize = ["0", "1-2", "3"]
        .iter()
        .map(|s| {
            let v: serde_json::Value = serde_json::from_str(&read(&dir.path().join("o"), &format!("zeno_stripe_{s}.json"))).unwrap();
            v.as_array().unwrap().len()
        })
        .sum();
    assert_eq!(total, 16);
}

#[test]
fn every_command_writes_its_files() {
    let dir = with_config(TWO_QUBIT);
    let cases: [(&str, &[&str]); 5] = [
        ("spectrum-exact", &["spectrum_exact.csv", "spectrum_exact_meta.json"]),
        ("spectrum-zeno", &["zeno_stripe_0.csv", "zeno_stripe_1-2.csv", "zeno_stripe_3.csv"]),
        ("compare", &["compare_report.json", "compare_residuals.csv"]),
        ("sweep-gamma", &["sweep_errors.csv", "sweep_fit.csv"]),
        ("scan-ep", &["scan_tracks.csv", "scan_branch_points.csv", "scan_coarse_cells.csv"]),
    ];
    for (cmd, files) in cases {
        let out = zeno(dir.path(), &[cmd, "--config", "run.json", "--out", cmd, "--jobs", "2"]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        for f in files {
            assert!(dir.path().join(cmd).join(f).is_file(), "{cmd}: {f}");
        }
    }
    let fit = read(&dir.path().join("sweep-gamma"), "sweep_fit.csv");
    assert_eq!(fit.lines().count(), 4);
    let tracks = read(&dir.path().join("scan-ep"), "scan_tracks.csv");
    assert_eq!(tracks.lines().count(), 1 + 201 * 16);
    let branches = read(&dir.path().join("scan-ep"), "scan_branch_points.csv");
    assert!(branches.lines().skip(1).any(|l| (l.split(',').next().unwrap().parse::<f64>().unwrap() - 8.0).abs() <= 0.1));
}

#[test]
fn eigenvectors_flag_adds_a_file() {
    let dir = with_config(TWO_QUBIT);
    let out = zeno(dir.path(), &["spectrum-exact", "--config", "run.json", "--out", "o", "--eigenvectors"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("o/eigenvectors_right.csv").is_file());
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = with_config(TWO_QUBIT);
    for (jobs, sub) in [("1", "a"), ("4", "b")] {
        let out = zeno(dir.path(), &["sweep-gamma", "--config", "run.json", "--out", sub, "--jobs", jobs]);
        assert_eq!(out.status.code(), Some(0));
    }
    for f in ["sweep_errors.csv", "sweep_fit.csv"] {
        assert_eq!(read(&dir.path().join("a"), f), read(&dir.path().join("b"), f));
    }
}

#[test]
fn config_problems_exit_with_one() {
    let cases = [
        "{not json",
        r#"{"model": {"n_free": 1, "j": [1, 1, 1], "theta": 0, "phi": 0, "mu": 1, "gamma": 1, "extra": 2}}"#,
        r#"{"model": {"n_free": 1, "j": [1, 1, 1], "theta": 0, "phi": 0, "mu": 1.5, "gamma": 1}}"#,
        r#"{"model": {"n_free": 0, "j": [1, 1, 1], "theta": 0, "phi": 0, "mu": 1, "gamma": 1}}"#,
    ];
    for text in cases {
        let dir = with_config(text);
        let out = zeno(dir.path(), &["spectrum-exact", "--config", "run.json"]);
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(!out.stderr.is_empty());
    }
    let dir = with_config(TWO_QUBIT);
    assert_eq!(zeno(dir.path(), &["spectrum-exact"]).status.code(), Some(1));
    assert_eq!(zeno(dir.path(), &["spectrum-exact", "--config", "missing.json"]).status.code(), Some(1));
    assert_eq!(zeno(dir.path(), &["spectrum-exact", "--config", "run.json", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(zeno(dir.path(), &["no-such-command"]).status.code(), Some(1));
}

#[test]
fn unfittable_sweep_writes_files_then_fails() {
    let dir = with_config(
        r#"{"model": {"n_free": 1, "j": [1.0, 2.3, -0.61], "theta": 0, "phi": 0, "mu": 1, "gamma": 1},
            "run": {"gammas": [100]}}"#,
    );
    let out = zeno(dir.path(), &["sweep-gamma", "--config", "run.json", "--out", "o"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 3"));
    let fit = read(&dir.path().join("o"), "sweep_fit.csv");
    assert_eq!(fit.lines().count(), 4);
    assert!(fit.lines().skip(1).all(|l| l.contains("NaN") && l.contains("at least 3")));
    assert_eq!(read(&dir.path().join("o"), "sweep_errors.csv").lines().count(), 4);
}

#[test]
fn check_reports_six_passing_lines() {
    let dir = tempfile::tempdir().unwrap();
    let out = zeno(dir.path(), &["check", "--seed", "7"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS ")).count(), 6);
}

#[test]
fn help_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(zeno(dir.path(), &["--help"]).status.code(), Some(0));
}
