use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use axireg::io::{list_snapshots, read_series};

fn axireg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_axireg"))
        .args(args)
        .output()
        .expect("binary runs")
}

const SMALL: &str = "nu = 0.05\nR = 1\nLz = 1\nnr = 16\nnz = 16\ncfl = 0.5\nt_end = 0.2\n\
                     scenario = gaussian_ring\namplitude = 2\nr_center = 0.4\noutput_every = 2\n";

fn write_cfg(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn run_then_criteria_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), SMALL);
    let out = dir.path().join("out");
    let o = axireg(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["energy.svg", "dissipation.svg", "criteria.svg", "criteria_int.svg", "swirl_sup.svg"] {
        assert!(out.join("plots").join(f).is_file(), "{f}");
    }
    let online = read_series(&out.join("series.csv")).unwrap();
    let snaps = list_snapshots(&out.join("snapshots")).unwrap();
    assert_eq!(snaps.len(), online.len());

    let offline_csv = dir.path().join("offline.csv");
    let o = axireg(&[
        "criteria",
        "--snapshots",
        out.join("snapshots").to_str().unwrap(),
        "--out",
        offline_csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let offline = read_series(&offline_csv).unwrap();
    let (a, b) = (online.last().unwrap(), offline.last().unwrap());
    assert!((a.crit_a_int - b.crit_a_int).abs() <= 1e-6 * a.crit_a_int.abs().max(1e-300));
    assert!((a.crit_b_int - b.crit_b_int).abs() <= 1e-6 * a.crit_b_int.abs().max(1e-300));
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), SMALL);
    let mut csv = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        assert!(axireg(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]).status.success());
        csv.push(fs::read(out.join("series.csv")).unwrap());
    }
    assert_eq!(csv[0], csv[1]);
}

#[test]
fn bad_key_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), &SMALL.replace("cfl = 0.5", "cfl = fast"));
    let o = axireg(&["run", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cfl"));

    let cfg = write_cfg(dir.path(), &format!("{SMALL}viscosity = 1\n"));
    let o = axireg(&["run", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("viscosity"));
}

#[test]
fn unknown_scenario_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), &SMALL.replace("gaussian_ring", "hill_vortex"));
    let o = axireg(&["run", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hill_vortex"));
}

#[test]
fn verify_ops_succeeds() {
    let o = axireg(&["verify", "--suite", "ops"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("0 failed"), "{text}");
    assert_eq!(axireg(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn convergence_reports_orders() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "nu = 0.1\nR = 1\nLz = 1\nnr = 8\nnz = 8\ncfl = 0.5\nt_end = 0.05\nscenario = manufactured\n\
         amplitude = 0.5\nforcing = analytic\n",
    );
    let o = axireg(&["convergence", "--config", &cfg, "--levels", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("observed order 0"), "{text}");
}
