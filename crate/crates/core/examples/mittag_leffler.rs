//! Mittag-Leffler values against closed forms, and the stable densities
//! used by the subordination route.

use frac_hardy::specfun::{mittag_leffler, mittag_leffler_checked, stable_density, MlParams};

fn main() -> frac_hardy::Result<()> {
    let exp = MlParams::new(1.0, 1.0)?;
    for z in [-1.0, -10.0, -50.0] {
        println!(
            "E_1,1({z:>5}) = {:.15e}   exp = {:.15e}",
            mittag_leffler(exp, z)?,
            f64::exp(z)
        );
    }
    let half = MlParams::new(0.5, 1.0)?;
    let v = mittag_leffler_checked(half, -1.0)?;
    println!("E_0.5,1(-1) = {:.15}  {v:?}", v.value);

    for alpha in [0.3, 0.5, 0.9] {
        let p = MlParams::new(alpha, alpha)?;
        let row: Vec<String> = [0.1, 1.0, 10.0, 100.0]
            .iter()
            .map(|&x| format!("{:.6e}", mittag_leffler(p, -x).unwrap_or(f64::NAN)))
            .collect();
        println!("E_{alpha},{alpha}(-x) at x = 0.1, 1, 10, 100: {}", row.join("  "));
    }

    for s in [0.25, 0.5, 1.0, 2.0] {
        println!("one-sided 1/2-stable density at {s}: {:.10}", stable_density(0.5, s)?);
    }
    Ok(())
}
