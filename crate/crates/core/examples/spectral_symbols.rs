//! Symbols ψ(ξ) = |ξ|^β ω(ξ/|ξ|) for isotropic, smooth anisotropic and
//! atomic spectral measures.

use frac_hardy::grid::Grid;
use frac_hardy::symbol::{build_symbol, omega_bounds, omega_nu, Atom, SpectralMeasure, SphereDensity};

fn main() -> frac_hardy::Result<()> {
    let beta = 1.5;
    let measures = [
        ("isotropic", SpectralMeasure::isotropic_unit(2, beta)?),
        (
            "fourier density",
            SpectralMeasure::density(
                2,
                SphereDensity::Fourier {
                    c0: 1.0,
                    cos: vec![0.0, 0.4],
                    sin: vec![],
                },
            )?,
        ),
        (
            "two atoms",
            SpectralMeasure::discrete_symmetrized(
                2,
                vec![
                    Atom {
                        direction: vec![1.0, 0.0],
                        weight: 1.0,
                    },
                    Atom {
                        direction: vec![0.0, 1.0],
                        weight: 0.5,
                    },
                ],
            )?,
        ),
    ];
    let grid = Grid::new(2, 64, 0.25)?;
    for (name, m) in &measures {
        let symbol = build_symbol(m, beta, grid)?;
        let (lo, hi) = symbol.omega_range();
        let bounds = omega_bounds(m, beta)?;
        println!("{name:>16}: omega on grid directions in [{lo:.5}, {hi:.5}], closed-form bounds {bounds:?}");
        for theta in [0.0, 0.5, 1.0] {
            let eta = [f64::cos(theta), f64::sin(theta)];
            println!("{:>16}  omega(theta = {theta}) = {:.6}", "", omega_nu(m, beta, &eta)?);
        }
    }
    Ok(())
}
