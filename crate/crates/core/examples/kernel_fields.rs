//! Z(t) and Y(t) on automatically sized grids: mass, peak, decay and the
//! self-similar rescaling between t and 4t. Radial profiles go to CSV.

use frac_hardy::kernels::{compute_auto, KernelKind};
use frac_hardy::specfun::g_kernel;
use frac_hardy::symbol::SpectralMeasure;

fn main() -> frac_hardy::Result<()> {
    let (alpha, beta) = (0.5, 1.0);
    let measure = SpectralMeasure::isotropic_unit(1, beta)?;
    let out = std::env::temp_dir().join("frac_hardy_kernels");
    std::fs::create_dir_all(&out)?;
    for which in [KernelKind::Z, KernelKind::Y] {
        for t in [0.25, 1.0, 4.0] {
            let k = compute_auto(&measure, alpha, beta, t, which, 16.0)?;
            let expected = match which {
                KernelKind::Z => 1.0,
                KernelKind::Y => g_kernel(alpha, t)?,
            };
            println!(
                "{which}({t}): n = {}, h = {:.4e}, mass {:.8} (expected {:.8}), peak {:.5e}, decay ratio {:.2e}",
                k.grid.n,
                k.grid.h,
                k.mass(),
                expected,
                k.peak(),
                k.truncation_ratio()
            );
            k.write_radial_csv(&out.join(format!("{which}_{t}.csv")))?;
        }
        // K(4t, x) = 4^{-αd/β} K(t, 4^{-α/β} x) for Z, with an extra 4^{α-1} for Y.
        let a = compute_auto(&measure, alpha, beta, 1.0, which, 16.0)?;
        let b = compute_auto(&measure, alpha, beta, 4.0, which, 16.0)?;
        let power = match which {
            KernelKind::Z => -alpha / beta,
            KernelKind::Y => -alpha / beta + alpha - 1.0,
        };
        println!(
            "{which} peak ratio K(4)/K(1) = {:.8}, predicted {:.8}",
            b.peak() / a.peak(),
            4f64.powf(power)
        );
    }
    println!("profiles in {}", out.display());
    Ok(())
}
