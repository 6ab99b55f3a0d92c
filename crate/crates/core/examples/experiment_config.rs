//! Building an experiment config in code, running it, and diffing two runs.

use frac_hardy::cli::{compare_runs, run_experiment, AtlasSpec, Experiment, ExperimentConfig, RunOptions, Sweep};
use frac_hardy::params::FracParams;

fn main() -> frac_hardy::Result<()> {
    let config = ExperimentConfig {
        name: "atlas-demo".into(),
        seed: 1,
        output: None,
        params: FracParams::new(1, 0.5, 1.0, 0.25, 3.0, 1.0)?,
        measure: None,
        experiment: Experiment::Atlas(AtlasSpec {
            alpha: Some(Sweep {
                from: 0.3,
                to: 0.9,
                count: 7,
            }),
            p: Some(Sweep {
                from: 1.5,
                to: 5.0,
                count: 8,
            }),
            ..Default::default()
        }),
    };
    println!("{}", config.to_toml()?);
    let root = std::env::temp_dir().join("frac_hardy_atlas_demo");
    let mut dirs = Vec::new();
    for run in ["a", "b"] {
        let opts = RunOptions {
            out: Some(root.join(run)),
            workers: 2,
            ..Default::default()
        };
        let manifest = run_experiment(&config, &opts)?;
        println!(
            "run {run}: hash {}, passed {}, files {:?}",
            manifest.config_hash,
            manifest.passed,
            manifest.files.iter().map(|f| &f.path).collect::<Vec<_>>()
        );
        dirs.push(root.join(run));
    }
    let cmp = compare_runs(&dirs[0], &dirs[1], 0.01)?;
    println!("identical: {}", cmp.identical);
    Ok(())
}
