use std::process::{Command, Output};

fn chronobell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chronobell"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn list_names_every_experiment() {
    let o = chronobell(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for name in [
        "qm-chsh-singlet",
        "hv-chsh",
        "tandem",
        "wigner",
        "mermin",
        "hardy",
        "bohm",
        "poll",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn json_report_has_schema_fields() {
    let o = chronobell(&["run", "qm-chsh-singlet"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in [
        "experiment",
        "params",
        "seed",
        "estimates",
        "bounds",
        "checks",
        "targets",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let s = v["estimates"]["S"]["value"].as_f64().unwrap();
    assert!((s - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-9);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[params]\nn = 50\nseed = 3\nangles = [0.0, 45.0, 22.5, 67.5]\n").unwrap();
    let o = chronobell(&[
        "run",
        "hv-chsh",
        "--config",
        cfg.to_str().unwrap(),
        "--n",
        "80",
        "--angles=0,-30,10,40",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["params"]["n"], 80);
    assert_eq!(v["seed"], 3);
    assert_eq!(v["params"]["angles"][1].as_f64(), Some(-30.0));
}

#[test]
fn csv_and_text_formats() {
    let csv = stdout(&chronobell(&["run", "gwzz", "--format", "csv"]));
    assert!(csv.starts_with("name,value,stderr,n,target,pass\n"));
    assert!(csv.lines().any(|l| l.starts_with("both_attained,1,")));
    let text = stdout(&chronobell(&["run", "wigner", "--format", "text"]));
    assert!(text.contains("PASS") && text.contains("S_W"));
}

#[test]
fn failed_check_exits_one() {
    // with no drag the hysteretic model has no order effect
    let o = chronobell(&["run", "tandem", "--drag", "0", "--n", "2000"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(chronobell(&["run", "no-such-experiment"]).status.code(), Some(2));
    assert_eq!(
        chronobell(&["run", "hv-chsh", "--alpha", "1.5", "--n", "10"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(chronobell(&["run", "tandem", "--angles=1,2,3"]).status.code(), Some(2));
    assert_eq!(chronobell(&["bogus"]).status.code(), Some(2));
}

#[test]
fn io_errors_exit_three() {
    assert_eq!(
        chronobell(&["run", "gwzz", "--config", "/nonexistent/x.toml"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        chronobell(&["run", "gwzz", "--out", "/nonexistent/dir/out.json"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn sweeps_report_bounds() {
    let o = chronobell(&["sweep", "poll", "--n", "2000"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["checks"].as_object().unwrap().len(), 20);
    let o = chronobell(&["sweep", "hysteretic", "--n", "2000"]);
    assert_eq!(o.status.code(), Some(0));
}
