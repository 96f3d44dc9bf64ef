use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn symest(args: &[&str], out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_symest"));
    cmd.args(args);
    if let Some(out) = out {
        cmd.arg("--out").arg(out);
    }
    cmd.output().expect("binary runs")
}

fn lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

#[test]
fn run_writes_curve_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = symest(
        &[
            "run",
            "--strategy",
            "random",
            "--n-max",
            "4",
            "--trials",
            "200",
        ],
        Some(&out),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let curve = lines(&out.join("fidelity_curve.csv"));
    assert_eq!(curve[0], "N,mean_fidelity,std_error,optimal_bound");
    assert_eq!(curve.len(), 5);
    assert!(curve[4].starts_with("4,") && curve[4].ends_with(",0.833333333333"));
    let cfg: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(cfg["strategy"], "random");
    assert_eq!(cfg["n_max"], 4);
    assert_eq!(cfg["seed"], 42);
}

#[test]
fn config_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    assert!(symest(
        &["run", "--n-max", "3", "--trials", "50", "--seed", "7"],
        Some(&first)
    )
    .status
    .success());
    let cfg = first.join("config.json");
    assert!(
        symest(&["run", "--config", cfg.to_str().unwrap()], Some(&second))
            .status
            .success()
    );
    for f in ["fidelity_curve.csv", "config.json"] {
        assert_eq!(
            fs::read(first.join(f)).unwrap(),
            fs::read(second.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn explicit_flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"strategy":"random","n_max":3,"trials":20}"#).unwrap();
    let out = dir.path().join("o");
    let o = symest(
        &["run", "--config", cfg.to_str().unwrap(), "--n-max", "2"],
        Some(&out),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(lines(&out.join("fidelity_curve.csv")).len(), 3);
}

#[test]
fn compare_writes_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    assert!(
        symest(&["compare", "--n-max", "5", "--trials", "40"], Some(&out))
            .status
            .success()
    );
    let rows = lines(&out.join("comparison.csv"));
    assert_eq!(
        rows[0],
        "N,adaptive_mean,adaptive_se,random_mean,random_se,optimal_bound"
    );
    assert_eq!(rows.len(), 6);
}

#[test]
fn snapshot_writes_four_files_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("snap");
    let o = symest(&["snapshot", "--trials", "60"], Some(&out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csvs = fs::read_dir(&out)
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .path()
                .extension()
                .is_some_and(|x| x == "csv")
        })
        .count();
    assert_eq!(csvs, 12);
    let est = lines(&out.join("estimates_N20.csv"));
    assert_eq!(est[0], "cos_theta_rot,phi_rot");
    assert_eq!(est.len(), 61);
    let hist = lines(&out.join("hist_references_N5.csv"));
    assert_eq!(hist[0], "bin_left,bin_right,count");
    assert_eq!(hist.len(), 41);
    let total: u64 = hist[1..]
        .iter()
        .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 60);
    assert!(String::from_utf8_lossy(&o.stdout).contains("0.9"));
}

#[test]
fn invalid_values_exit_with_two_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["run", "--n-max", "0"][..],
        &["run", "--trials", "0"],
        &["run", "--mle-grid", "1"],
        &["snapshot", "--n-max", "4", "--snapshot-steps", "5"],
        &["run", "--strategy", "greedy"],
        &["run", "--bogus"],
    ] {
        let out = dir.path().join("never");
        let o = symest(args, Some(&out));
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!out.exists(), "{args:?}");
    }
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"n_max":3,"temperature":1}"#).unwrap();
    let o = symest(
        &["run", "--config", cfg.to_str().unwrap()],
        Some(&dir.path().join("o")),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_and_detects_injected_sign_error() {
    let ok = symest(&["verify"], None);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );
    let bad = symest(&["verify", "--inject-sign-error"], None);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL"));
}
