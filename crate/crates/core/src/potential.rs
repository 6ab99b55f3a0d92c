//! Grid samples of the Hardy weight |x|^{-γ}.

use crate::error::{domain, Error, Result};
use crate::grid::Grid;
use crate::quad::integrate;

/// |x|^{-γ} on the nodes of `grid`. Cells touching the singularity carry
/// exact cell averages: every cell in d = 1, the origin cell in d ≥ 2.
pub fn hardy_weight(grid: &Grid, gamma: f64) -> Result<Vec<f64>> {
    if !(gamma >= 0.0) {
        return domain(format!("gamma must be nonnegative, got {gamma}"));
    }
    if gamma >= grid.d as f64 {
        return Err(Error::NonIntegrablePotential { gamma, d: grid.d });
    }
    if gamma == 0.0 {
        return Ok(vec![1.0; grid.len()]);
    }
    let h = grid.h;
    if grid.d == 1 {
        let antider = |x: f64| x.powf(1.0 - gamma) / (1.0 - gamma);
        return Ok((0..grid.n)
            .map(|j| {
                let x = grid.coord(j).abs();
                if x == 0.0 {
                    2.0 * antider(0.5 * h) / h
                } else {
                    (antider(x + 0.5 * h) - antider(x - 0.5 * h)) / h
                }
            })
            .collect());
    }
    let origin = origin_cell_average(grid.d, h, gamma)?;
    Ok((0..grid.len())
        .map(|idx| {
            let r = grid.radius(idx);
            if r == 0.0 {
                origin
            } else {
                r.powf(-gamma)
            }
        })
        .collect())
}

/// (1/h^d) ∫_{[-h/2,h/2]^d} |x|^{-γ} dx by nested adaptive quadrature over
/// the positive orthant.
fn origin_cell_average(d: usize, h: f64, gamma: f64) -> Result<f64> {
    let a = 0.5 * h;
    fn nested(level: usize, d: usize, a: f64, gamma: f64, r2: f64, ok: &mut bool) -> f64 {
        if level == d {
            return r2.powf(-0.5 * gamma);
        }
        let res = integrate(
            |x| nested(level + 1, d, a, gamma, r2 + x * x, ok),
            0.0,
            a,
            &[],
            0.0,
            1e-11,
            400,
        );
        *ok &= res.converged;
        res.value
    }
    let mut ok = true;
    let v = nested(0, d, a, gamma, 0.0, &mut ok);
    if !ok {
        return Err(Error::Quadrature(format!(
            "origin cell average of |x|^-{gamma} in d = {d}"
        )));
    }
    Ok(v / a.powi(d as i32))
}
