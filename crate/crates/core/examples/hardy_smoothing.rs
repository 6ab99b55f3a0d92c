//! The Hardy convolution constant t^{1-α}|x|^γ (Y(t) ⋆ |·|^{-γ})(x) and the
//! t-power of the weighted smoothing estimate for R(t).

use frac_hardy::grid::Grid;
use frac_hardy::kernels::{compute_auto, hardy_convolution_check, smoothing_estimate_check, KernelKind, Probe};
use frac_hardy::params::FracParams;
use frac_hardy::symbol::SpectralMeasure;

fn main() -> frac_hardy::Result<()> {
    let (alpha, beta) = (0.5, 1.0);
    let measure = SpectralMeasure::isotropic_unit(1, beta)?;
    let y = compute_auto(&measure, alpha, beta, 1.0, KernelKind::Y, 16.0)?;
    let radii: Vec<f64> = (0..9).map(|i| 0.125 * 2f64.powi(i)).collect();
    for gamma in [0.25, 0.5] {
        let prof = hardy_convolution_check(&y, gamma, &radii)?;
        let row: Vec<String> = prof.constants.iter().map(|c| format!("{c:.4}")).collect();
        println!("gamma = {gamma}: C(x) = [{}], sup {:.4}", row.join(", "), prof.sup());
    }

    let params = FracParams::new(1, alpha, beta, 0.25, 3.0, 3.5)?;
    let times: Vec<f64> = (0..9).map(|i| 0.1 * 10f64.powf(0.25 * i as f64)).collect();
    for (q1, q2) in [(2.0, 2.0), (2.0, 4.0), (1.5, 3.0)] {
        let rep = smoothing_estimate_check(
            &params,
            &measure,
            q1,
            q2,
            &times,
            Grid::new(1, 1 << 14, 0.02)?,
            Probe::Gaussian { width: 1.0 },
        )?;
        println!(
            "(q1, q2) = ({q1}, {q2}): slope {:.5}, predicted {:.5}, spread {:.3}",
            rep.fitted_slope, rep.predicted, rep.spread
        );
    }
    Ok(())
}
