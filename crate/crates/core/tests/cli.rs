use std::path::{Path, PathBuf};
use std::process::Command;

use frac_hardy::cli::{compare_runs, run_experiment, ExperimentConfig, RunManifest, RunOptions};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_frac-hardy"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

#[test]
fn shipped_configs_validate() {
    for name in [
        "kernel_suite.toml",
        "atlas.toml",
        "solver_run.toml",
        "decay_study.toml",
        "profile_linear.toml",
        "profile_nonlinear.toml",
        "blowup_supercritical.toml",
        "blowup_control.toml",
    ] {
        let out = bin().arg("validate").arg(config(name)).output().unwrap();
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let cfg = ExperimentConfig::load(&config(name)).unwrap();
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap(), cfg);
    }
}

#[test]
fn malformed_config_names_the_invariant() {
    let out = bin().arg("validate").arg(config("malformed.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(report["error"], "non_integrable_potential");
    assert_eq!(report["invariant"], "gamma < d");

    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", config("malformed.toml").to_str().unwrap(), "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("manifest.json").exists());
}

#[test]
fn atlas_run_lists_every_file_and_hashes_every_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", config("atlas.toml").to_str().unwrap(), "--workers", "3", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let manifest = RunManifest::load(dir.path()).unwrap();
    let mut listed: Vec<String> = manifest.files.iter().map(|f| f.path.clone()).collect();
    listed.push("manifest.json".into());
    listed.sort();
    let mut present: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    present.sort();
    assert_eq!(listed, present);

    let text = std::fs::read_to_string(dir.path().join("atlas.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "config_hash");
    assert!(header.contains(&"q_c") && header.contains(&"nonexistence"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 7 * 8);
    assert!(rows.iter().all(|r| r.starts_with(&manifest.config_hash)));
}

#[test]
fn seed_override_changes_only_the_seeded_columns() {
    let cfg = ExperimentConfig::load(&config("atlas.toml")).unwrap();
    let root = tempfile::tempdir().unwrap();
    let run = |seed: u64, sub: &str| {
        run_experiment(
            &cfg,
            &RunOptions {
                out: Some(root.path().join(sub)),
                seed: Some(seed),
                ..Default::default()
            },
        )
        .unwrap()
    };
    let a = run(1, "a");
    let b = run(2, "b");
    assert_eq!(a.seed, 1);
    assert_ne!(a.config_hash, b.config_hash);
    let cmp = compare_runs(&root.path().join("a"), &root.path().join("b"), 0.0).unwrap();
    assert!(cmp.identical);
}

fn solver_config(steps: usize, refine: bool) -> String {
    let text = std::fs::read_to_string(config("solver_run.toml")).unwrap();
    let text = text.replace("refinements = 2", "refinements = 0");
    if refine {
        text.replace("steps = 40", &format!("steps = {}", 2 * steps))
    } else {
        text.replace("steps = 40", &format!("steps = {steps}"))
    }
}

#[test]
fn step_halving_pair_is_converged() {
    let root = tempfile::tempdir().unwrap();
    for (sub, refine) in [("coarse", false), ("fine", true)] {
        let cfg = ExperimentConfig::from_toml(&solver_config(40, refine)).unwrap();
        let m = run_experiment(
            &cfg,
            &RunOptions {
                out: Some(root.path().join(sub)),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(m.passed);
    }
    let cmp = compare_runs(&root.path().join("coarse"), &root.path().join("fine"), 0.01).unwrap();
    assert!(cmp.converged, "{cmp:?}");
    assert!(!cmp.identical);
    assert!(!cmp.divergence_consistent);
}

fn blowup_level(n: usize, h: f64, steps: usize) -> String {
    format!(
        r#"
name = "blowup-refinement"

[params]
d = 1
alpha = 0.9
beta = 1.0
gamma = 0.25
p = 4.0
q = 1.0

[experiment]
kind = "SolverRun"
horizon = 1e-3
grid = {{ n = {n}, h = {h} }}
initial = {{ kind = "TruncatedPower", eta = 0.6, radius = 2.0 }}
solver = {{ mesh = {{ kind = "Graded", steps = {steps}, grading = 2.2222222222222223 }}, probe_radius = 0.5, store_states = false }}
"#
    )
}

#[test]
fn blowup_refinement_pair_is_divergence_consistent() {
    let root = tempfile::tempdir().unwrap();
    for (sub, n, h, steps) in [("coarse", 128, 0.25, 16), ("fine", 256, 0.125, 32)] {
        let cfg = ExperimentConfig::from_toml(&blowup_level(n, h, steps)).unwrap();
        let m = run_experiment(
            &cfg,
            &RunOptions {
                out: Some(root.path().join(sub)),
                ..Default::default()
            },
        )
        .unwrap();
        // The supercritical run overflows, which the run check reports.
        assert!(!m.passed);
        assert_eq!(m.failing()[0].name, "run completed (level 0)");
    }
    let cmp = compare_runs(&root.path().join("coarse"), &root.path().join("fine"), 0.01).unwrap();
    assert!(cmp.divergence_consistent, "{cmp:?}");
}

#[test]
fn blowup_studies_exit_by_verdict() {
    for name in ["blowup_supercritical.toml", "blowup_control.toml"] {
        let dir = tempfile::tempdir().unwrap();
        let out = bin()
            .args(["run", config(name).to_str().unwrap(), "--out"])
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stdout));
    }
    // The control violates the non-existence hypotheses; --strict turns that
    // warning into a failure.
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "run",
            config("blowup_control.toml").to_str().unwrap(),
            "--strict",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compare_rejects_different_kinds() {
    let root = tempfile::tempdir().unwrap();
    let atlas = ExperimentConfig::load(&config("atlas.toml")).unwrap();
    let solver = ExperimentConfig::from_toml(&solver_config(10, false)).unwrap();
    for (sub, cfg) in [("a", &atlas), ("b", &solver)] {
        run_experiment(
            cfg,
            &RunOptions {
                out: Some(root.path().join(sub)),
                ..Default::default()
            },
        )
        .unwrap();
    }
    let err = compare_runs(&root.path().join("a"), &root.path().join("b"), 0.01).unwrap_err();
    assert_eq!(err.code(), "schema");
}
