use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn visco(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_visco"))
        .args(args)
        .env("VISCO_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SMALL_TG: &str = "\
grid.n=16
time.dt=0.01
time.t_end=0.04
init.variant=taylor_green
output.snapshot_every=2
";

#[test]
fn run_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "run.cfg", SMALL_TG);
    let out = tmp.path().join("out");
    let o = visco(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["steps"], 4);
    assert!(out.join("diagnostics.csv").is_file());
    assert!(out.join("snapshots").join("snap_0000004.vel2").is_file());
}

#[test]
fn family_then_analyze() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "fam.cfg",
        &format!("{SMALL_TG}sweep.eta_list=0.1,0.05\n"),
    );
    let dir = tmp.path().join("fam");
    let o = visco(&["family", "--config", &cfg, "--out", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.join("manifest.json").is_file());

    let acfg = write(
        tmp.path(),
        "an.cfg",
        "analysis.k_list=1,2\nanalysis.cutoffs=4\n",
    );
    let o = visco(&["analyze", "--dir", dir.to_str().unwrap(), "--config", &acfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["reference_note"], "reference proxy");
    for f in ["report.json", "report_defect.csv", "report_pairing.csv"] {
        assert!(dir.join("report").join(f).is_file(), "{f}");
    }
}

#[test]
fn unknown_key_exits_with_config_code() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.cfg", "grid.n=16\nparams.nu=0.1\n");
    let o = visco(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("params.nu"));
    let o = visco(&[
        "run",
        "--config",
        tmp.path().join("absent.cfg").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cfl_violation_exits_with_numerical_code() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cfl.cfg",
        "grid.n=16\ntime.dt=1\ntime.t_end=2\ninit.variant=taylor_green\n",
    );
    let o = visco(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn analyze_without_artifacts_exits_with_missing_code() {
    let tmp = tempfile::tempdir().unwrap();
    let o = visco(&["analyze", "--dir", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn oracle_reports_small_discrepancy() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "oracle.cfg",
        "grid.n=32\ntime.dt=0.002\ntime.t_end=0.02\ninit.variant=taylor_green\noracle.upsample=4\n",
    );
    let o = visco(&["oracle", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r["l2_error"].as_f64().unwrap() < 1e-2);
}
