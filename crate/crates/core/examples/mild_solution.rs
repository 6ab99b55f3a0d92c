//! A small-data mild solution: step-halving self-convergence and the linear
//! run against S(t)u₀.

use frac_hardy::grid::Grid;
use frac_hardy::mild_solver::{InitialData, MildSolver, SolverConfig, TimeMesh};
use frac_hardy::params::FracParams;
use frac_hardy::symbol::SpectralMeasure;

fn main() -> frac_hardy::Result<()> {
    let params = FracParams::new(1, 0.5, 1.0, 0.25, 3.0, 3.5)?;
    let measure = SpectralMeasure::isotropic_unit(1, params.beta)?;
    let grid = Grid::new(1, 2048, 0.05)?;
    let solver = MildSolver::new(params, &measure, grid)?;
    let u0 = InitialData::GaussianBump {
        amplitude: 0.5,
        width: 1.0,
        offset: 0.0,
    }
    .sample(&grid, &params)?;
    let horizon = 4.0;

    let mut previous = None;
    for steps in [40, 80, 160] {
        let tr = solver.run(&u0, &SolverConfig::new(TimeMesh::graded(steps, params.alpha)), horizon)?;
        let last = *tr.lq_norms.last().expect("nonempty trajectory");
        let change = previous.map_or("-".to_string(), |p: f64| format!("{:.2e}", ((last - p) / p).abs()));
        println!(
            "{steps:>4} steps: |u(T)|_q = {last:.8}, change {change}, status {:?}",
            tr.status
        );
        previous = Some(last);
    }

    let mut linear = SolverConfig::new(TimeMesh::graded(20, params.alpha));
    linear.nonlinear = false;
    let tr = solver.run(&u0, &linear, horizon)?;
    let direct = solver.apply_s(&u0, horizon)?;
    let end = tr.final_state().expect("states are stored");
    let err = end.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let scale = direct.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    println!("linear run against S(T)u0: max relative difference {:.2e}", err / scale);
    Ok(())
}
