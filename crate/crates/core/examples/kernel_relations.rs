//! Two structural identities: Z = g_{1-α} ⋆ Y in time, and Z as a mixture
//! of stable kernels over the one-sided α-stable law.

use frac_hardy::grid::Grid;
use frac_hardy::kernels::{subordination_check, z_y_relation_check};
use frac_hardy::symbol::{build_symbol, SpectralMeasure};

fn main() -> frac_hardy::Result<()> {
    let beta = 1.0;
    let symbol = build_symbol(
        &SpectralMeasure::isotropic_unit(1, beta)?,
        beta,
        Grid::new(1, 4096, 0.02)?,
    )?;
    for alpha in [0.5, 0.9] {
        let err = z_y_relation_check(&symbol, alpha, 1.0, 512)?;
        println!("alpha = {alpha}: relative L1 error of g_(1-alpha) * Y against Z: {err:.3e}");
        let rep = subordination_check(&symbol, alpha, 1.0, None)?;
        println!(
            "alpha = {alpha}: subordination discrepancy {:.3e} (tail mass {:.2e}, converged {})",
            rep.discrepancy, rep.tail_mass, rep.converged
        );
    }
    Ok(())
}
