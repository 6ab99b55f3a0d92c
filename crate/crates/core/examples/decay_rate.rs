//! Long-time decay of a small-data solution with critical-power data, and
//! the weighted norm t^{(αd/β)(1/q_c-1/q)}|u(t)|_q after the transient.
//! Takes about 20 s in release mode.

use frac_hardy::grid::Grid;
use frac_hardy::mild_solver::{InitialData, MildSolver, SolverConfig, TimeMesh};
use frac_hardy::params::FracParams;
use frac_hardy::regimes::{decay_fit, small_data_search, weighted_norm_bound};
use frac_hardy::symbol::SpectralMeasure;

fn main() -> frac_hardy::Result<()> {
    let params = FracParams::new(1, 0.5, 1.0, 0.25, 3.0, 3.5)?;
    let measure = SpectralMeasure::isotropic_unit(1, params.beta)?;
    let solver = MildSolver::new(params, &measure, Grid::new(1, 1 << 16, 2.0)?)?;
    let mut config = SolverConfig::new(TimeMesh::graded(80, params.alpha));
    config.store_states = false;
    let search = small_data_search(
        &solver,
        |amplitude| InitialData::ScaledCriticalPower {
            amplitude,
            radius: 65000.0,
        },
        &config,
        100.0,
        1.0,
        6,
    )?;
    for a in &search.attempts {
        println!(
            "amplitude {:.4}: completed {}, bounded {}",
            a.amplitude, a.completed, a.bounded
        );
    }
    let fit = decay_fit(&search.trajectory, (10.0, 100.0))?;
    println!(
        "amplitude {:.4}: slope {:.5} over [10, 100], predicted {:.5} ({:.2}% off)",
        search.amplitude,
        fit.slope,
        fit.predicted,
        100.0 * fit.relative_error()
    );
    let bound = weighted_norm_bound(&search.trajectory, 1.0)?;
    println!(
        "weighted norm after t = 1: sup {:.5}, at t = 1 {:.5}, bounded {}",
        bound.sup, bound.reference, bound.bounded
    );
    Ok(())
}
