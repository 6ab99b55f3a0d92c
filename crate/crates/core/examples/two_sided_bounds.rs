//! Fitted constants c ≤ K/g ≤ C of the two-sided pointwise bounds, on the
//! near and far fields, for the dimension cases reachable in d = 1, 2.
//! The d = 2 fields take about a minute in release mode.

use frac_hardy::kernels::{compute_auto, estimate_case, two_sided_fit, KernelKind};
use frac_hardy::symbol::SpectralMeasure;

fn main() -> frac_hardy::Result<()> {
    let alpha = 0.5;
    let cases = [
        (KernelKind::Z, 1, 1.5),
        (KernelKind::Z, 1, 1.0),
        (KernelKind::Z, 1, 0.5),
        (KernelKind::Y, 1, 1.5),
        (KernelKind::Y, 2, 1.0),
        (KernelKind::Y, 2, 0.9),
    ];
    for (which, d, beta) in cases {
        let res = if d == 1 { 16.0 } else { 8.0 };
        let field = compute_auto(&SpectralMeasure::isotropic_unit(d, beta)?, alpha, beta, 1.0, which, res)?;
        let case = estimate_case(which, d, beta);
        for rep in two_sided_fit(&field) {
            println!(
                "{which} d = {d} beta = {beta} ({case:?}) {:?}: c = {:.4e} C = {:.4e} C/c = {:.2} on {} nodes",
                rep.regime,
                rep.lower,
                rep.upper,
                rep.spread(),
                rep.samples
            );
        }
    }
    Ok(())
}
