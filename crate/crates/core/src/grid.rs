//! Uniform periodic spatial grids and their conjugate frequency grids, with
//! n-dimensional FFT helpers.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Cubic grid with `n` nodes of spacing `h` per axis. Node `j` sits at
/// `(j - n/2) h`, so the origin is the node with every index equal to `n/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub d: usize,
    pub n: usize,
    pub h: f64,
}

impl Grid {
    pub fn new(d: usize, n: usize, h: f64) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return domain(format!("dimension must be 1, 2 or 3, got {d}"));
        }
        if n < 8 || n % 2 != 0 {
            return domain(format!("node count per axis must be even and >= 8, got {n}"));
        }
        if !(h > 0.0 && h.is_finite()) {
            return domain(format!("grid spacing must be positive, got {h}"));
        }
        Ok(Self { d, n, h })
    }

    /// Grid with the given half-width `extent/2` on each side of the origin.
    pub fn with_extent(d: usize, n: usize, extent: f64) -> Result<Self> {
        Self::new(d, n, extent / n as f64)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Side length of the periodic box.
    pub fn extent(&self) -> f64 {
        self.n as f64 * self.h
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.d as i32)
    }

    /// Coordinate of node index `j` along one axis.
    pub fn coord(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.h
    }

    /// Angular frequency of DFT index `m` along one axis (zero at m = 0,
    /// negative frequencies in the upper half).
    pub fn freq(&self, m: usize) -> f64 {
        let n = self.n as i64;
        let s = if (m as i64) < n / 2 { m as i64 } else { m as i64 - n };
        2.0 * PI * s as f64 / (self.n as f64 * self.h)
    }

    pub fn freq_spacing(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.h)
    }

    /// Per-axis indices of flat (row-major) index `idx`.
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let mut out = [0; 3];
        let mut rem = idx;
        for axis in (0..self.d).rev() {
            out[axis] = rem % self.n;
            rem /= self.n;
        }
        out
    }

    pub fn ravel(&self, ix: &[usize]) -> usize {
        ix.iter().take(self.d).fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn origin_index(&self) -> usize {
        self.ravel(&[self.n / 2; 3])
    }

    /// Position of node `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let ix = self.unravel(idx);
        let mut x = [0.0; 3];
        for a in 0..self.d {
            x[a] = self.coord(ix[a]);
        }
        x
    }

    pub fn radius(&self, idx: usize) -> f64 {
        let x = self.point(idx);
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Frequency vector of DFT node `idx`.
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let ix = self.unravel(idx);
        let mut k = [0.0; 3];
        for a in 0..self.d {
            k[a] = self.freq(ix[a]);
        }
        k
    }

    /// Smallest distance from the origin to the box boundary.
    pub fn half_width(&self) -> f64 {
        (self.n / 2) as f64 * self.h
    }

    /// Grid with the same node count and spacing scaled by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            d: self.d,
            n: self.n,
            h: self.h * c,
        }
    }

    /// Riemann sum of `values` times the cell volume.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() * self.cell_volume()
    }

    /// Discrete L_r norm, r ∈ [1, ∞].
    pub fn lr_norm(&self, values: &[f64], r: f64) -> f64 {
        if r.is_infinite() {
            return values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        }
        if r == 1.0 {
            return values.iter().map(|v| v.abs()).sum::<f64>() * self.cell_volume();
        }
        if r == 2.0 {
            return (values.iter().map(|v| v * v).sum::<f64>() * self.cell_volume()).sqrt();
        }
        // Scale by the maximum to avoid overflow for large r.
        let m = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if m == 0.0 {
            return 0.0;
        }
        let s: f64 = values.iter().map(|v| (v.abs() / m).powf(r)).sum();
        m * (s * self.cell_volume()).powf(1.0 / r)
    }
}

/// Cached FFT plans for a grid.
#[derive(Clone)]
pub struct FftPlan {
    grid: Grid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPlan").field("grid", &self.grid).finish()
    }
}

impl FftPlan {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            fwd: planner.plan_fft_forward(grid.n),
            inv: planner.plan_fft_inverse(grid.n),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.grid.n;
        let d = self.grid.d;
        let plan = if inverse { &self.inv } else { &self.fwd };
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..d {
            let stride = n.pow((d - 1 - axis) as u32);
            if stride == 1 {
                for chunk in data.chunks_exact_mut(n) {
                    plan.process_with_scratch(chunk, &mut scratch);
                }
                continue;
            }
            let block = stride * n;
            for outer in (0..data.len()).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (j, c) in line.iter_mut().enumerate() {
                        *c = data[base + j * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (j, c) in line.iter().enumerate() {
                        data[base + j * stride] = *c;
                    }
                }
            }
        }
        if inverse {
            let norm = 1.0 / data.len() as f64;
            for c in data.iter_mut() {
                *c *= norm;
            }
        }
    }

    /// Unnormalized forward DFT over all axes.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// Inverse DFT including the 1/N^d factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
    }

    pub fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut buf);
        buf
    }

    /// Periodic convolution with the kernel whose DFT-node multiplier is `mult`.
    pub fn apply_multiplier(&self, values: &[f64], mult: &[f64]) -> Vec<f64> {
        let mut buf = self.forward_real(values);
        for (c, m) in buf.iter_mut().zip(mult) {
            *c *= *m;
        }
        self.inverse(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Field whose cell averages have DFT multiplier `mult`, centred at the
    /// origin node: the inverse transform of `mult` shifted to index n/2,
    /// divided by the cell volume.
    pub fn kernel_from_multiplier(&self, mult: &[f64]) -> Vec<f64> {
        let g = self.grid;
        let mut buf: Vec<Complex64> = (0..g.len())
            .map(|idx| {
                let ix = g.unravel(idx);
                let parity: usize = ix.iter().take(g.d).sum();
                let s = if parity % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(s * mult[idx], 0.0)
            })
            .collect();
        self.inverse(&mut buf);
        let vol = g.cell_volume();
        buf.into_iter().map(|c| c.re / vol).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_roundtrip() {
        let g = Grid::new(3, 8, 0.5).unwrap();
        for idx in [0, 7, 100, 511] {
            assert_eq!(g.ravel(&g.unravel(idx)), idx);
        }
        assert_eq!(g.point(g.origin_index()), [0.0, 0.0, 0.0]);
        assert!(Grid::new(1, 7, 1.0).is_err());
        assert!(Grid::new(4, 8, 1.0).is_err());
    }

    #[test]
    fn frequencies_dft_order() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let dk = 2.0 * PI / 8.0;
        assert_eq!(g.freq(0), 0.0);
        assert!((g.freq(3) - 3.0 * dk).abs() < 1e-15);
        assert!((g.freq(4) + 4.0 * dk).abs() < 1e-15);
        assert!((g.freq(7) + dk).abs() < 1e-15);
    }

    #[test]
    fn identity_multiplier_recovers_delta() {
        for d in 1..=2 {
            let g = Grid::new(d, 16, 0.25).unwrap();
            let plan = FftPlan::new(g);
            let k = plan.kernel_from_multiplier(&vec![1.0; g.len()]);
            for (idx, v) in k.iter().enumerate() {
                let want = if idx == g.origin_index() {
                    1.0 / g.cell_volume()
                } else {
                    0.0
                };
                assert!((v - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn roundtrip_2d() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let plan = FftPlan::new(g);
        let x: Vec<f64> = (0..g.len()).map(|i| (i as f64 * 0.37).sin()).collect();
        let y = plan.apply_multiplier(&x, &vec![1.0; g.len()]);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
