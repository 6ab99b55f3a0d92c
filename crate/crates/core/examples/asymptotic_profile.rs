//! Convergence of u(t) to A Z(t) + B Y(t): the linear error rate and the
//! nonlinear error against |u(t)|_q.

use frac_hardy::grid::Grid;
use frac_hardy::mild_solver::{InitialData, MildSolver, SolverConfig, TimeMesh};
use frac_hardy::params::FracParams;
use frac_hardy::regimes::asymptotic_profile_check;
use frac_hardy::symbol::SpectralMeasure;

fn main() -> frac_hardy::Result<()> {
    let params = FracParams::new(1, 0.9, 1.9, 0.25, 3.5, 5.5)?;
    let measure = SpectralMeasure::isotropic_unit(1, params.beta)?;
    let grid = Grid::new(1, 4096, 0.1)?;
    let solver = MildSolver::new(params, &measure, grid)?;
    let horizon = 100.0;

    let shifted = InitialData::GaussianBump {
        amplitude: 1.0,
        width: 0.5,
        offset: 0.5,
    };
    let mut linear = SolverConfig::new(TimeMesh::graded(100, params.alpha));
    linear.nonlinear = false;
    let tr = solver.run(&shifted.sample(&grid, &params)?, &linear, horizon)?;
    let rep = asymptotic_profile_check(&solver, &tr, (10.0, horizon), 1.0)?;
    println!(
        "linear: A = {:.6}, error slope {:.5}, predicted {:.5}",
        rep.a, rep.fitted_slope, rep.linear_slope
    );

    let bump = InitialData::GaussianBump {
        amplitude: 0.5,
        width: 1.0,
        offset: 0.0,
    };
    let tr = solver.run(
        &bump.sample(&grid, &params)?,
        &SolverConfig::new(TimeMesh::graded(100, params.alpha)),
        horizon,
    )?;
    let rep = asymptotic_profile_check(&solver, &tr, (10.0, horizon), 1.0)?;
    let (t, err, norm) = rep.at(50.0);
    println!(
        "nonlinear: A = {:.6}, B = {:.6} (tail {:.2e}), forcing slope {:.4}",
        rep.a, rep.b, rep.b_tail, rep.forcing_slope
    );
    println!(
        "at t = {t:.3}: error {err:.4e}, |u|_q {norm:.4e}, ratio {:.4}",
        err / norm
    );
    Ok(())
}
