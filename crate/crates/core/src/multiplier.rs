//! Discrete multipliers for convolution kernels given by a Fourier symbol.
//!
//! A kernel K with transform m(ξ) is represented on a grid by its cell
//! averages. Their DFT is the image sum
//!
//!   M(k) = Σ_{l ∈ Z^d} Π_i (-1)^{l_i} sin θ_i / (θ_i + π l_i) · m((2/h)(θ + π l)),
//!
//! with θ_i = k_i h / 2. Pairing l and -l turns each axis into an alternating
//! series with smooth terms, which is summed by repeated averaging of partial
//! sums. The representation keeps mass exactly (M(0) = m(0)) and stays finite
//! for kernels with integrable singularities at the origin.

use std::f64::consts::PI;

use crate::grid::Grid;
use crate::symbol::SymbolField;

/// Number of image pairs summed per axis before acceleration, by dimension.
pub fn default_image_terms(d: usize) -> usize {
    match d {
        1 => 24,
        2 => 12,
        _ => 8,
    }
}

/// Sum of an alternating series with smooth terms, from its first terms,
/// by repeated averaging of the tail partial sums (Euler transform).
pub fn euler_sum(terms: &[f64]) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    let mut acc = 0.0;
    let partial: Vec<f64> = terms
        .iter()
        .map(|t| {
            acc += t;
            acc
        })
        .collect();
    let start = partial.len() / 3;
    let mut v = partial[start..].to_vec();
    while v.len() > 1 {
        for i in 0..v.len() - 1 {
            v[i] = 0.5 * (v[i] + v[i + 1]);
        }
        v.pop();
    }
    v[0]
}

/// Evaluates image sums of a symbol on the DFT nodes of a grid.
pub struct ImageSum<'a, F: Fn(f64) -> f64> {
    grid: Grid,
    beta: f64,
    symbol: &'a SymbolField,
    /// m as a function of ln ψ(ξ).
    profile: F,
    at_zero: f64,
    terms: usize,
}

impl<'a, F: Fn(f64) -> f64> ImageSum<'a, F> {
    pub fn new(symbol: &'a SymbolField, at_zero: f64, profile: F) -> Self {
        Self {
            grid: symbol.grid,
            beta: symbol.beta,
            symbol,
            profile,
            at_zero,
            terms: default_image_terms(symbol.grid.d),
        }
    }

    pub fn with_terms(mut self, terms: usize) -> Self {
        self.terms = terms.max(4);
        self
    }

    fn eval_m(&self, u: &[f64; 3]) -> f64 {
        let scale = 2.0 / self.grid.h;
        let xi = [u[0] * scale, u[1] * scale, u[2] * scale];
        let r2: f64 = xi.iter().take(self.grid.d).map(|v| v * v).sum();
        if r2 == 0.0 {
            return self.at_zero;
        }
        let ln_psi = 0.5 * self.beta * r2.ln() + self.symbol.ln_omega(&xi);
        (self.profile)(ln_psi)
    }

    fn sum_axis(&self, axis: usize, theta: &[f64; 3], u: &mut [f64; 3]) -> f64 {
        if axis == self.grid.d {
            return self.eval_m(u);
        }
        let th = theta[axis];
        if th == 0.0 {
            u[axis] = 0.0;
            return self.sum_axis(axis + 1, theta, u);
        }
        let s = th.sin();
        u[axis] = th;
        let centre = s / th * self.sum_axis(axis + 1, theta, u);
        let mut tail = Vec::with_capacity(self.terms);
        for l in 1..=self.terms {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            let up = th + PI * l as f64;
            let dn = th - PI * l as f64;
            u[axis] = up;
            let a = self.sum_axis(axis + 1, theta, u) / up;
            u[axis] = dn;
            let b = self.sum_axis(axis + 1, theta, u) / dn;
            tail.push(sign * s * (a + b));
        }
        centre + euler_sum(&tail)
    }

    /// Multiplier at DFT node `idx`.
    pub fn at(&self, idx: usize) -> f64 {
        if idx == 0 {
            return self.at_zero;
        }
        let k = self.grid.wavevector(idx);
        let h2 = 0.5 * self.grid.h;
        let theta = [k[0] * h2, k[1] * h2, k[2] * h2];
        let mut u = [0.0; 3];
        self.sum_axis(0, &theta, &mut u)
    }

    /// Multiplier on every DFT node. ψ is even and the image sum is
    /// 2π/h-periodic, so M(-k) = M(k) and each ±k pair is evaluated once.
    pub fn all(&self) -> Vec<f64> {
        let g = self.grid;
        let n = g.len();
        let mut out = vec![f64::NAN; n];
        for idx in 0..n {
            if !out[idx].is_nan() {
                continue;
            }
            let v = self.at(idx);
            out[idx] = v;
            let ix = g.unravel(idx);
            let mut jx = [0usize; 3];
            for a in 0..g.d {
                jx[a] = (g.n - ix[a]) % g.n;
            }
            out[g.ravel(&jx)] = v;
        }
        out
    }
}
