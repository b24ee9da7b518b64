use std::fs;
use std::path::Path;
use std::process::Command;

use cavelast_cli::config::{Emit, Mode, ScenarioConfig};
use cavelast_cli::golden::{golden_dir, read_sweep, sweep_lambdas, sweep_mismatches, elliptic_phi, RHO, R_OUT, SWEEP_BAND, SWEEP_M};
use cavelast_cli::{bundled, compare_runs, run_scenario, RunOptions, Summary};
use cavelast_core::material::{BulkDensity, SurfaceDensity};
use cavelast_core::radial::sweep;
use cavelast_core::Mat2;

const SMALL: &str = "
[run]
name = small
[domain]
shape = disk
radius = 2.0
h = 0.3
punctures = 0.0 0.0 0.05
[boundary]
kind = radial
lambda = 1.5
[initial]
kind = cavity_seed
seed_radius = 1.0
[solver]
max_iters = 20000
[detection]
check_inv = true
[output]
emit = svg,csv
";

fn small() -> ScenarioConfig {
    ScenarioConfig::parse(SMALL).unwrap()
}

fn opts(dir: &Path) -> RunOptions {
    RunOptions { out: Some(dir.to_path_buf()), ..Default::default() }
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cavelast"));
    c.env("RUST_LOG", "error");
    c
}

#[test]
fn converged_run_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small();
    cfg.output.emit = Emit::all();
    cfg.output.raster_delta = 0.05;
    let out = run_scenario(&cfg, &opts(tmp.path())).unwrap();
    assert_eq!(out.code, 0);
    for f in [
        "summary.txt", "config.cfg", "mesh.cavmesh", "deformed.csv", "iterations.csv", "cavities.csv",
        "reference.svg", "deformed.svg", "degree.pgm", "inverse.csv", "jump_set.csv",
    ] {
        assert!(tmp.path().join(f).is_file(), "{f} missing");
    }
    let s = Summary::read(&tmp.path().join("summary.txt")).unwrap();
    assert_eq!(s.get("status"), Some("converged"));
    assert_eq!(s.get("inv"), Some("pass"));
    assert!(s.get_f64("cavity.0.radius").unwrap() > 1.0);
    let stored = ScenarioConfig::parse(&fs::read_to_string(tmp.path().join("config.cfg")).unwrap()).unwrap();
    assert_eq!(stored.solver, cfg.solver);
    let lines = fs::read_to_string(tmp.path().join("iterations.csv")).unwrap().lines().count();
    assert_eq!(lines, out.log.len() + 1);
    let svg = fs::read_to_string(tmp.path().join("deformed.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polygon"));
}

#[test]
fn evaluating_the_identity_gives_area_times_w_of_identity() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig::parse(bundled("identity_eval").unwrap()).unwrap();
    let out = run_scenario(&cfg, &opts(tmp.path())).unwrap();
    assert_eq!(out.code, 0);
    let w_id = BulkDensity::default().energy(&Mat2::identity()).unwrap();
    let area = out.field.mesh().total_area();
    assert!((out.energy.bulk - area * w_id).abs() <= 1e-12 * area * w_id);
    assert_eq!(out.energy.surface, out.energy.rho_artifact);
    assert_eq!(out.summary.get_f64("surface_net"), Some(0.0));
    assert!(out.log.is_empty());
}

#[test]
fn iteration_limit_exits_3_and_still_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small();
    cfg.solver.max_iters = 1;
    let out = run_scenario(&cfg, &opts(tmp.path())).unwrap();
    assert_eq!(out.code, 3);
    let s = Summary::read(&tmp.path().join("summary.txt")).unwrap();
    assert_eq!(s.get("status"), Some("max_iters"));
    assert!(tmp.path().join("deformed.csv").is_file());
}

#[test]
fn oversized_puncture_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("bad.cfg");
    fs::write(&cfg_path, SMALL.replace("0.0 0.0 0.05", "0.0 0.0 0.6")).unwrap();
    let st = bin().arg("run").arg(&cfg_path).arg("--out").arg(tmp.path().join("o")).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&st.stderr).contains("inradius"));
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn parse_error_exits_2_and_names_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("bad.cfg");
    fs::write(&cfg_path, "[run]\nname = x\n[solver]\nmemory = lots\n").unwrap();
    let st = bin().arg("run").arg(&cfg_path).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    let err = String::from_utf8_lossy(&st.stderr);
    assert!(err.contains("line 4") && err.contains("solver.memory"), "{err}");
}

#[test]
fn infeasible_initial_guess_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let positions = tmp.path().join("init.csv");
    let mut cfg = small();
    cfg.initial = cavelast_cli::config::InitialGuess::File { path: positions.clone() };
    let mesh = cavelast_cli::run::load_mesh(&cfg, tmp.path()).unwrap();
    let mut text = String::from("vertex,x,y,y_x,y_y\n");
    for (v, x) in mesh.vertices().iter().enumerate() {
        text.push_str(&format!("{v},{},{},{},{}\n", x.x, x.y, -x.x, x.y));
    }
    fs::write(&positions, text).unwrap();
    let err = run_scenario(&cfg, &opts(&tmp.path().join("o"))).unwrap_err();
    assert_eq!(err.exit_code(), 2, "{err}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("small.cfg");
    fs::write(&cfg_path, SMALL).unwrap();
    let mut outs = Vec::new();
    for threads in ["1", "4"] {
        let dir = tmp.path().join(format!("t{threads}"));
        let st = bin().args(["--threads", threads, "run"]).arg(&cfg_path).arg("--out").arg(&dir).output().unwrap();
        assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stderr));
        outs.push(dir);
    }
    for f in ["summary.txt", "deformed.csv", "iterations.csv", "cavities.csv", "deformed.svg"] {
        assert_eq!(
            fs::read(outs[0].join(f)).unwrap(),
            fs::read(outs[1].join(f)).unwrap(),
            "{f} differs between thread counts"
        );
    }
}

#[test]
fn comparing_a_run_with_itself_gives_zero_deltas() {
    let tmp = tempfile::tempdir().unwrap();
    run_scenario(&small(), &opts(tmp.path())).unwrap();
    let rep = compare_runs(tmp.path(), tmp.path()).unwrap();
    assert!(rep.rows.iter().all(|r| r.delta() == 0.0), "{}", rep.to_text());
    assert!(!rep.alarm && !rep.alarm_reverse);
    assert_eq!(rep.b_of_a, rep.b_of_b);
}

#[test]
fn truncated_run_raises_the_alarm() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("full"), tmp.path().join("cut"));
    run_scenario(&small(), &opts(&a)).unwrap();
    let mut cut = small();
    cut.solver.max_iters = 1;
    assert_eq!(run_scenario(&cut, &opts(&b)).unwrap().code, 3);
    let rep = compare_runs(&a, &b).unwrap();
    assert!(rep.alarm, "{}", rep.to_text());
    assert!(!rep.alarm_reverse);
    assert!(rep.to_text().contains("ALARM"));
    let st = bin().arg("compare").arg(&a).arg(&b).output().unwrap();
    assert_eq!(st.status.code(), Some(4));
}

#[test]
fn compare_needs_summaries() {
    let tmp = tempfile::tempdir().unwrap();
    let e = compare_runs(tmp.path(), tmp.path()).unwrap_err();
    assert!(e.to_string().contains("summary.txt"));
}

#[test]
fn evaluate_mode_override_skips_minimization() {
    let tmp = tempfile::tempdir().unwrap();
    let o = RunOptions { mode: Some(Mode::Evaluate), ..opts(tmp.path()) };
    let out = run_scenario(&small(), &o).unwrap();
    assert_eq!(out.summary.get("status"), Some("evaluated"));
    assert!(!tmp.path().join("iterations.csv").exists() || out.log.is_empty());
}

#[test]
fn bundled_isotropic_scenario_matches_its_golden_file() {
    let tmp = tempfile::tempdir().unwrap();
    let st = bin().args(["run", "radial_iso_lambda1.5", "--out"]).arg(tmp.path()).output().unwrap();
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stderr));
    let s = Summary::read(&tmp.path().join("summary.txt")).unwrap();
    assert!(s.get_f64("golden.energy_gap").unwrap() <= 0.02);
    assert!(s.get_f64("golden.radius_gap").unwrap() <= 0.03);
    assert_eq!(s.get("golden.pass"), Some("true"));
}

#[test]
fn radial_sweeps_stay_within_the_golden_band() {
    let w = BulkDensity::default();
    for (tag, phi) in [("iso", SurfaceDensity::Isotropic), ("elliptic", elliptic_phi())] {
        let got = sweep(&sweep_lambdas(), &w, &phi, RHO, R_OUT, SWEEP_M).unwrap();
        let want = read_sweep(&golden_dir().join(format!("sweep_{tag}.csv"))).unwrap();
        let bad = sweep_mismatches(&got, &want, SWEEP_BAND);
        assert!(bad.is_empty(), "{tag}: {bad:?}");
    }
}

#[test]
fn golden_directory_can_be_overridden() {
    let tmp = tempfile::tempdir().unwrap();
    let st = bin().args(["golden", "--out"]).arg(tmp.path()).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    for f in ["radial_iso_lambda1.5.txt", "radial_elliptic_lambda1.5.txt", "sweep_iso.csv", "sweep_elliptic.csv"] {
        assert_eq!(fs::read(tmp.path().join(f)).unwrap(), fs::read(golden_dir().join(f)).unwrap(), "{f}");
    }
    let cfg_path = tmp.path().join("s.cfg");
    fs::write(&cfg_path, format!("{SMALL}\n").replace("[run]\nname = small", "[run]\nname = small\ngolden = radial_iso_lambda1.5")).unwrap();
    fs::remove_file(tmp.path().join("radial_iso_lambda1.5.txt")).unwrap();
    let st = bin()
        .env("CAVELAST_GOLDEN_DIR", tmp.path())
        .args(["eval"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(tmp.path().join("o"))
        .output()
        .unwrap();
    assert_ne!(st.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&st.stderr).contains("radial_iso_lambda1.5.txt"));
}
