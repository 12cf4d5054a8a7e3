use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irs-mimo"))
        .args(args)
        .output()
        .expect("binary runs")
}

const HEADER: &str =
    "sweep_kind,sweep_value,method,trials,mean_se_bps_hz,std_se_bps_hz,mean_qcqp_objective,mean_sweeps_used";

#[test]
fn power_sweep_csv_is_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (out, threads) in [(&a, "1"), (&b, "3")] {
        let o = run(&[
            "sweep-power",
            "--trials",
            "2",
            "--methods",
            "iterative,random,no-irs",
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len(), 1 + 5 * 3);
    assert!(lines[1].starts_with("power,10,iterative,2,"));
}

#[test]
fn seed_changes_output() {
    let args = ["sweep-distance", "--trials", "1", "--methods", "random"];
    let a = run(&args);
    let b = run(&[&args[..], &["--seed", "7"]].concat());
    assert!(a.status.success() && b.status.success());
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn json_output_and_pathloss_flag() {
    let o = run(&["sweep-bits", "--trials", "1", "--methods", "no-irs", "--format", "json", "--pathloss", "sum"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["scenario"]["pathloss"], "sum");
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["rows"][3]["sweep_value"], "inf");
}

#[test]
fn empty_method_list_gives_header_only() {
    let o = run(&["sweep-elements", "--trials", "1", "--methods", ""]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), format!("{HEADER}\n"));
}

#[test]
fn convergence_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    let text = irs_mimo::config::DEFAULT_CONFIG_TOML
        .replace("elements = [48, 64, 80]", "elements = [16]")
        .replace("max_sweeps = 8", "max_sweeps = 3");
    std::fs::write(&cfg, text).unwrap();
    let o = run(&["convergence", "--config", cfg.to_str().unwrap(), "--trials", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("convergence,0,iterative/M=16,2,"));
}

#[test]
fn validate_subcommand_passes() {
    let o = run(&["validate", "--instances", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8(o.stdout).unwrap().lines().all(|l| l.starts_with("ok")));
}

#[test]
fn errors_exit_nonzero() {
    let bad_method = run(&["sweep-power", "--methods", "admm"]);
    assert!(!bad_method.status.success());
    assert!(String::from_utf8_lossy(&bad_method.stderr).contains("admm"));

    let missing = run(&["sweep-power", "--config", "/nonexistent/exp.toml"]);
    assert!(!missing.status.success());

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "trials = 0\n").unwrap();
    assert!(!run(&["sweep-power", "--config", cfg.to_str().unwrap()]).status.success());

    let unwritable = Path::new("/nonexistent-dir/out.csv");
    let o = run(&["sweep-power", "--trials", "1", "--methods", "no-irs", "--out", unwritable.to_str().unwrap()]);
    assert!(!o.status.success());
}
