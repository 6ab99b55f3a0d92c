//! Time decay of ‖Z(t)‖_r and ‖Y(t)‖_r, and rejection of r outside the
//! integrability range.

use frac_hardy::grid::Grid;
use frac_hardy::kernels::{lr_norm_scaling, KernelKind};
use frac_hardy::params::{kappa1, kappa2};
use frac_hardy::symbol::{build_symbol, SpectralMeasure};

fn main() -> frac_hardy::Result<()> {
    let (alpha, beta) = (0.5, 1.0);
    let symbol = build_symbol(
        &SpectralMeasure::isotropic_unit(1, beta)?,
        beta,
        Grid::new(1, 8192, 0.01)?,
    )?;
    let times = [0.25, 0.5, 1.0, 2.0, 4.0];
    println!("kappa1 = {}, kappa2 = {}", kappa1(1, beta), kappa2(1, beta));
    for which in [KernelKind::Z, KernelKind::Y] {
        for r in [1.0, 1.5, 2.0, 4.0] {
            match lr_norm_scaling(&symbol, alpha, which, r, &times) {
                Ok(rep) => println!(
                    "{which} r = {r}: slope {:.5}, predicted {:.5} ({:.2}% off)",
                    rep.slope,
                    rep.predicted,
                    100.0 * rep.relative_error()
                ),
                Err(e) => println!("{which} r = {r}: {e}"),
            }
        }
    }
    Ok(())
}
