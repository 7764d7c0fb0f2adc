use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qsd(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsd"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn sidecar(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn scan_writes_csv_and_sidecar() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qsd(
        tmp.path(),
        &[
            "scan",
            "--kind",
            "dephasing",
            "--mu",
            "0.6",
            "--quantity",
            "curvature",
            "--grid",
            "12",
            "--out",
            "field.csv",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(tmp.path().join("field.csv")).unwrap();
    assert!(csv.starts_with("theta,phi,value\n"));
    assert_eq!(csv.lines().count(), 1 + 144);
    let side = sidecar(&tmp.path().join("run.json"));
    let mut keys: Vec<&str> = side
        .as_object()
        .unwrap()
        .keys()
        .map(|k| k.as_str())
        .collect();
    keys.sort();
    assert_eq!(
        keys,
        ["command", "config", "elapsed_seconds", "seed", "version"]
    );
    assert_eq!(side["command"], "scan");
    assert_eq!(side["config"]["mu"], 0.6);
}

#[test]
fn replay_reproduces_artifacts_bit_for_bit() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qsd(
        tmp.path(),
        &[
            "trajectory",
            "--kind",
            "thermal",
            "--mu1",
            "1.2",
            "--mu2",
            "0.4",
            "--hx",
            "0.3",
            "--steps",
            "500",
            "--out",
            "a",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = qsd(tmp.path(), &["replay", "a/run.json", "--out", "b"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let a = fs::read(tmp.path().join("a/trajectory.csv")).unwrap();
    let b = fs::read(tmp.path().join("b/trajectory.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        sidecar(&tmp.path().join("b/run.json"))["command"],
        "trajectory"
    );
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("cfg.json"),
        r#"{"kind": "measurement", "mu": 2.0, "n_theta": 5, "n_phi": 6}"#,
    )
    .unwrap();
    let out = qsd(
        tmp.path(),
        &[
            "scan",
            "--config",
            "cfg.json",
            "--mu",
            "0.5",
            "--quantity",
            "norm",
            "--out",
            "o",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let side = sidecar(&tmp.path().join("o/run.json"));
    assert_eq!(side["config"]["kind"], "measurement");
    assert_eq!(side["config"]["mu"], 0.5);
    assert_eq!(side["config"]["n_phi"], 6);
    assert_eq!(
        fs::read_to_string(tmp.path().join("o/scan.csv"))
            .unwrap()
            .lines()
            .count(),
        31
    );
}

#[test]
fn validation_errors_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("bad.json"), r#"{"mu": 0.6, "gamma": 1.0}"#).unwrap();
    for args in [
        &["scan", "--config", "bad.json"][..],
        &["scan", "--mu", "-1"],
        &["scan", "--kind", "thermal", "--mu", "1"],
        &["scan", "--mu", "0.6", "--grid", "2"],
        &["trajectory", "--mu", "0.6", "--dt", "0"],
        &["critical", "--mu", "0.6", "--lo", "0.5", "--hi", "0.3"],
        &["scan", "--no-such-flag"],
    ] {
        let out = qsd(tmp.path(), args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn critical_coupling_lies_inside_the_bracket() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qsd(
        tmp.path(),
        &[
            "critical",
            "--kind",
            "dephasing",
            "--lo",
            "0.3",
            "--hi",
            "0.5",
            "--tol",
            "1e-3",
            "--grid",
            "24",
            "--out",
            "c",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mu: f64 = String::from_utf8(out.stdout)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(mu > 0.3 && mu < 0.5, "{mu}");
}

#[test]
fn verify_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qsd(tmp.path(), &["verify", "--out", "v"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(!String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let tmp = tempfile::tempdir().unwrap();
    for (threads, out) in [("1", "one.csv"), ("3", "three.csv")] {
        let o = qsd(
            tmp.path(),
            &[
                "scan",
                "--mu",
                "0.7",
                "--grid",
                "16",
                "--threads",
                threads,
                "--out",
                out,
            ],
        );
        assert!(o.status.success());
    }
    assert_eq!(
        fs::read(tmp.path().join("one.csv")).unwrap(),
        fs::read(tmp.path().join("three.csv")).unwrap()
    );
}
