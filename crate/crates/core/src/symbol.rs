//! Spectral measures on the unit sphere, the angular factor ω_ν and the
//! symbol ψ(ξ) = |ξ|^β ω_ν(ξ/|ξ|).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::grid::Grid;
use crate::quad::integrate;
use crate::specfun::{gamma_fn, rgamma};

/// Angular nodes used to certify density positivity in d = 2.
const CIRCLE_NODES: usize = 2048;

/// A point mass on the sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub direction: Vec<f64>,
    pub weight: f64,
}

/// Smooth, strictly positive densities on the sphere in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum SphereDensity {
    /// d = 1: weights at +1 and -1.
    TwoPoint { plus: f64, minus: f64 },
    /// d = 2: w(φ) = c0 + Σ_k cos[k-1] cos kφ + sin[k-1] sin kφ.
    Fourier {
        c0: f64,
        #[serde(default)]
        cos: Vec<f64>,
        #[serde(default)]
        sin: Vec<f64>,
    },
    /// d = 3: w(η) = Σ_l legendre[l] P_l(η·axis).
    Zonal { axis: [f64; 3], legendre: Vec<f64> },
}

impl SphereDensity {
    fn dimension(&self) -> usize {
        match self {
            SphereDensity::TwoPoint { .. } => 1,
            SphereDensity::Fourier { .. } => 2,
            SphereDensity::Zonal { .. } => 3,
        }
    }

    /// Density value at the unit vector `eta`.
    pub fn eval(&self, eta: &[f64]) -> f64 {
        match self {
            SphereDensity::TwoPoint { plus, minus } => {
                if eta[0] > 0.0 {
                    *plus
                } else {
                    *minus
                }
            }
            SphereDensity::Fourier { c0, cos, sin } => {
                let phi = eta[1].atan2(eta[0]);
                fourier_sum(*c0, cos, sin, phi)
            }
            SphereDensity::Zonal { axis, legendre } => {
                let t = axis[0] * eta[0] + axis[1] * eta[1] + axis[2] * eta[2];
                legendre_series(legendre, t)
            }
        }
    }

    /// Minimum over the positivity-check nodes.
    fn min_on_nodes(&self) -> f64 {
        match self {
            SphereDensity::TwoPoint { plus, minus } => plus.min(*minus),
            SphereDensity::Fourier { c0, cos, sin } => (0..CIRCLE_NODES)
                .map(|j| fourier_sum(*c0, cos, sin, 2.0 * PI * j as f64 / CIRCLE_NODES as f64))
                .fold(f64::INFINITY, f64::min),
            SphereDensity::Zonal { legendre, .. } => (0..=4096)
                .map(|j| legendre_series(legendre, -1.0 + 2.0 * j as f64 / 4096.0))
                .fold(f64::INFINITY, f64::min),
        }
    }

    fn max_on_nodes(&self) -> f64 {
        match self {
            SphereDensity::TwoPoint { plus, minus } => plus.max(*minus),
            SphereDensity::Fourier { c0, cos, sin } => (0..CIRCLE_NODES)
                .map(|j| fourier_sum(*c0, cos, sin, 2.0 * PI * j as f64 / CIRCLE_NODES as f64))
                .fold(f64::NEG_INFINITY, f64::max),
            SphereDensity::Zonal { legendre, .. } => (0..=4096)
                .map(|j| legendre_series(legendre, -1.0 + 2.0 * j as f64 / 4096.0))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

fn fourier_sum(c0: f64, cos: &[f64], sin: &[f64], phi: f64) -> f64 {
    let mut w = c0;
    for (k, a) in cos.iter().enumerate() {
        w += a * ((k + 1) as f64 * phi).cos();
    }
    for (k, b) in sin.iter().enumerate() {
        w += b * ((k + 1) as f64 * phi).sin();
    }
    w
}

fn legendre_series(c: &[f64], t: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, t);
    let mut s = 0.0;
    for (l, cl) in c.iter().enumerate() {
        let pl = match l {
            0 => 1.0,
            1 => t,
            _ => {
                let lf = l as f64;
                let p2 = ((2.0 * lf - 1.0) * t * p1 - (lf - 1.0) * p0) / lf;
                p0 = p1;
                p1 = p2;
                p2
            }
        };
        s += cl * pl;
    }
    s
}

/// The spectral measure ν on the unit sphere of ℝ^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralMeasure {
    /// Rotation-invariant measure with the given total mass.
    Uniform { d: usize, mass: f64 },
    /// Absolutely continuous measure with a strictly positive density.
    Density { d: usize, density: SphereDensity },
    /// Finite sum of atoms, symmetrized under η ↦ -η. Intended as a test
    /// oracle: it has no density.
    DiscreteSymmetrized { d: usize, atoms: Vec<Atom> },
}

impl SpectralMeasure {
    pub fn uniform(d: usize, mass: f64) -> Result<Self> {
        let m = SpectralMeasure::Uniform { d, mass };
        m.validate()?;
        Ok(m)
    }

    /// Uniform measure scaled so that ω ≡ 1 for the given β.
    pub fn isotropic_unit(d: usize, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let per_mass = uniform_omega_per_mass(d, beta)?;
        Self::uniform(d, 1.0 / per_mass)
    }

    pub fn density(d: usize, density: SphereDensity) -> Result<Self> {
        let m = SpectralMeasure::Density { d, density };
        m.validate()?;
        Ok(m)
    }

    /// Atoms are normalized to unit directions and mirrored with half weight.
    pub fn discrete_symmetrized(d: usize, atoms: Vec<Atom>) -> Result<Self> {
        let mut sym = Vec::with_capacity(2 * atoms.len());
        for a in atoms {
            let norm = a.direction.iter().map(|v| v * v).sum::<f64>().sqrt();
            if a.direction.len() != d || norm == 0.0 {
                return domain("atom direction must be a nonzero vector of the measure's dimension");
            }
            let dir: Vec<f64> = a.direction.iter().map(|v| v / norm).collect();
            let neg: Vec<f64> = dir.iter().map(|v| -v).collect();
            sym.push(Atom {
                direction: dir,
                weight: 0.5 * a.weight,
            });
            sym.push(Atom {
                direction: neg,
                weight: 0.5 * a.weight,
            });
        }
        let m = SpectralMeasure::DiscreteSymmetrized { d, atoms: sym };
        m.validate()?;
        Ok(m)
    }

    pub fn dimension(&self) -> usize {
        match self {
            SpectralMeasure::Uniform { d, .. }
            | SpectralMeasure::Density { d, .. }
            | SpectralMeasure::DiscreteSymmetrized { d, .. } => *d,
        }
    }

    /// Checks dimension, mass and density positivity.
    pub fn validate(&self) -> Result<()> {
        let d = self.dimension();
        if !(1..=3).contains(&d) {
            return domain(format!("sphere dimension must be 1, 2 or 3, got {d}"));
        }
        match self {
            SpectralMeasure::Uniform { mass, .. } => {
                if !(*mass > 0.0 && mass.is_finite()) {
                    return domain(format!("total mass must be positive, got {mass}"));
                }
            }
            SpectralMeasure::Density { density, .. } => {
                if density.dimension() != d {
                    return domain(format!(
                        "density form is for dimension {}, measure has dimension {d}",
                        density.dimension()
                    ));
                }
                if let SphereDensity::Zonal { axis, .. } = density {
                    let n = (axis[0].powi(2) + axis[1].powi(2) + axis[2].powi(2)).sqrt();
                    if (n - 1.0).abs() > 1e-12 {
                        return domain("zonal density axis must be a unit vector");
                    }
                }
                let w_min = density.min_on_nodes();
                if !(w_min > 0.0) {
                    return Err(Error::H2Violation(format!(
                        "density minimum {w_min:.3e} is not strictly positive"
                    )));
                }
            }
            SpectralMeasure::DiscreteSymmetrized { atoms, .. } => {
                if atoms.is_empty() || atoms.iter().any(|a| !(a.weight > 0.0)) {
                    return domain("atomic measure needs at least one atom with positive weight");
                }
                if atoms.iter().any(|a| a.direction.len() != d) {
                    return domain("atom direction dimension mismatch");
                }
            }
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            SpectralMeasure::Uniform { mass, .. } => *mass,
            SpectralMeasure::Density { density, .. } => match density {
                SphereDensity::TwoPoint { plus, minus } => plus + minus,
                SphereDensity::Fourier { c0, .. } => 2.0 * PI * c0,
                SphereDensity::Zonal { legendre, .. } => 4.0 * PI * legendre.first().copied().unwrap_or(0.0),
            },
            SpectralMeasure::DiscreteSymmetrized { atoms, .. } => atoms.iter().map(|a| a.weight).sum(),
        }
    }

    pub fn is_density(&self) -> bool {
        !matches!(self, SpectralMeasure::DiscreteSymmetrized { .. })
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 2.0) {
        return domain(format!("beta must lie in (0,2), got {beta}"));
    }
    Ok(())
}

/// ∫_0^{2π} |cos φ|^β cos(kφ) dφ, zero for odd k.
pub fn circle_moment(beta: f64, k: usize) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let m = (k / 2) as f64;
    2.0 * PI * gamma_fn(beta + 1.0) / 2f64.powf(beta) * rgamma(1.0 + beta / 2.0 + m) * rgamma(1.0 + beta / 2.0 - m)
}

/// Funk–Hecke eigenvalue 2π ∫_{-1}^1 |t|^β P_l(t) dt on the 2-sphere.
pub fn sphere_moment(beta: f64, l: usize) -> f64 {
    if l % 2 == 1 {
        return 0.0;
    }
    let mut c = vec![0.0; l + 1];
    c[l] = 1.0;
    let r = integrate(
        |t| t.powf(beta) * legendre_series(&c, t),
        0.0,
        1.0,
        &[1e-6, 1e-3, 0.1, 0.5],
        1e-15,
        1e-14,
        2000,
    );
    4.0 * PI * r.value
}

/// ω for the uniform measure of unit total mass.
fn uniform_omega_per_mass(d: usize, beta: f64) -> Result<f64> {
    match d {
        1 => Ok(1.0),
        2 => Ok(circle_moment(beta, 0) / (2.0 * PI)),
        3 => Ok(1.0 / (beta + 1.0)),
        _ => domain(format!("unsupported dimension {d}")),
    }
}

/// Precomputed evaluator of θ ↦ ω_ν(θ) for fixed (ν, β).
#[derive(Debug, Clone, PartialEq)]
pub enum Omega {
    Constant(f64),
    /// c0 + Σ_k cos_k cos kφ + sin_k sin kφ with moments folded in.
    Circle {
        c0: f64,
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
    /// Σ_l coef_l P_l(θ·axis) with moments folded in.
    Zonal {
        axis: [f64; 3],
        coef: Vec<f64>,
    },
    Atoms {
        beta: f64,
        atoms: Vec<Atom>,
    },
}

impl Omega {
    pub fn new(measure: &SpectralMeasure, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        measure.validate()?;
        let d = measure.dimension();
        Ok(match measure {
            SpectralMeasure::Uniform { mass, .. } => Omega::Constant(mass * uniform_omega_per_mass(d, beta)?),
            SpectralMeasure::Density { density, .. } => match density {
                SphereDensity::TwoPoint { plus, minus } => Omega::Constant(plus + minus),
                SphereDensity::Fourier { c0, cos, sin } => Omega::Circle {
                    c0: c0 * circle_moment(beta, 0),
                    cos: cos
                        .iter()
                        .enumerate()
                        .map(|(k, a)| a * circle_moment(beta, k + 1))
                        .collect(),
                    sin: sin
                        .iter()
                        .enumerate()
                        .map(|(k, b)| b * circle_moment(beta, k + 1))
                        .collect(),
                },
                SphereDensity::Zonal { axis, legendre } => Omega::Zonal {
                    axis: *axis,
                    coef: legendre
                        .iter()
                        .enumerate()
                        .map(|(l, c)| c * sphere_moment(beta, l))
                        .collect(),
                },
            },
            SpectralMeasure::DiscreteSymmetrized { atoms, .. } => {
                if d == 1 {
                    Omega::Constant(atoms.iter().map(|a| a.weight).sum())
                } else {
                    Omega::Atoms {
                        beta,
                        atoms: atoms.clone(),
                    }
                }
            }
        })
    }

    /// ω at the direction of the nonzero vector `xi` (only the first d
    /// components are read).
    pub fn at_direction(&self, xi: &[f64]) -> f64 {
        match self {
            Omega::Constant(c) => *c,
            Omega::Circle { c0, cos, sin } => fourier_sum(*c0, cos, sin, xi[1].atan2(xi[0])),
            Omega::Zonal { axis, coef } => {
                let n = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
                let t = (axis[0] * xi[0] + axis[1] * xi[1] + axis[2] * xi[2]) / n;
                legendre_series(coef, t.clamp(-1.0, 1.0))
            }
            Omega::Atoms { beta, atoms } => {
                let n = xi
                    .iter()
                    .take(atoms[0].direction.len())
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt();
                atoms
                    .iter()
                    .map(|a| {
                        let dot: f64 = a.direction.iter().zip(xi).map(|(e, x)| e * x).sum();
                        a.weight * (dot / n).abs().powf(*beta)
                    })
                    .sum()
            }
        }
    }
}

/// ω_ν(θ) = ∫ |θ·η|^β ν(dη) at the unit vector θ.
pub fn omega_nu(measure: &SpectralMeasure, beta: f64, theta: &[f64]) -> Result<f64> {
    let d = measure.dimension();
    if theta.len() != d {
        return domain(format!("direction has {} components, expected {d}", theta.len()));
    }
    let norm = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return domain(format!("direction must be a unit vector, |theta| = {norm}"));
    }
    let omega = Omega::new(measure, beta)?;
    let mut xi = [0.0; 3];
    xi[..d].copy_from_slice(theta);
    let w = omega.at_direction(&xi);
    if measure.is_density() && !(w > 0.0) {
        return Err(Error::H2Violation(format!("omega = {w:.3e} at direction {theta:?}")));
    }
    Ok(w)
}

/// Lower and upper bounds for ω implied by the density's extreme values;
/// `None` for atomic measures.
pub fn omega_bounds(measure: &SpectralMeasure, beta: f64) -> Result<Option<(f64, f64)>> {
    check_beta(beta)?;
    let d = measure.dimension();
    let unit = uniform_omega_per_mass(d, beta)? * sphere_area(d);
    Ok(match measure {
        SpectralMeasure::Uniform { mass, .. } => {
            let w = mass * uniform_omega_per_mass(d, beta)?;
            Some((w, w))
        }
        SpectralMeasure::Density { density, .. } => {
            Some((density.min_on_nodes() * unit, density.max_on_nodes() * unit))
        }
        SpectralMeasure::DiscreteSymmetrized { .. } => None,
    })
}

fn sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    }
}

/// ψ sampled on the DFT frequency nodes of a grid, plus the evaluator for
/// off-grid frequencies.
#[derive(Debug, Clone)]
pub struct SymbolField {
    pub grid: Grid,
    pub beta: f64,
    pub values: Vec<f64>,
    pub measure: SpectralMeasure,
    omega: Omega,
}

impl SymbolField {
    /// ψ(ξ); only the first d components of `xi` are read.
    pub fn psi(&self, xi: &[f64; 3]) -> f64 {
        let r2: f64 = xi.iter().take(self.grid.d).map(|v| v * v).sum();
        if r2 == 0.0 {
            return 0.0;
        }
        r2.powf(0.5 * self.beta) * self.omega.at_direction(xi)
    }

    /// ln ω(ξ/|ξ|) for nonzero ξ.
    pub fn ln_omega(&self, xi: &[f64; 3]) -> f64 {
        self.omega.at_direction(xi).ln()
    }

    pub fn omega(&self) -> &Omega {
        &self.omega
    }

    /// Smallest and largest ω over the nonzero grid frequencies.
    pub fn omega_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for idx in 1..self.grid.len() {
            let w = self.omega.at_direction(&self.grid.wavevector(idx));
            lo = lo.min(w);
            hi = hi.max(w);
        }
        (lo, hi)
    }
}

/// Samples ψ(ξ) = |ξ|^β ω_ν(ξ/|ξ|) on the DFT frequencies of `grid`.
pub fn build_symbol(measure: &SpectralMeasure, beta: f64, grid: Grid) -> Result<SymbolField> {
    if measure.dimension() != grid.d {
        return domain(format!(
            "measure dimension {} does not match grid dimension {}",
            measure.dimension(),
            grid.d
        ));
    }
    let omega = Omega::new(measure, beta)?;
    let mut values = Vec::with_capacity(grid.len());
    for idx in 0..grid.len() {
        let xi = grid.wavevector(idx);
        if idx == 0 {
            values.push(0.0);
            continue;
        }
        let w = omega.at_direction(&xi);
        if !(w > 0.0) {
            return Err(Error::H2Violation(format!(
                "omega = {w:.3e} at frequency {:?}",
                &xi[..grid.d]
            )));
        }
        let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        values.push(r.powf(beta) * w);
    }
    Ok(SymbolField {
        grid,
        beta,
        values,
        measure: measure.clone(),
        omega,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_circle(w: impl Fn(f64) -> f64, beta: f64, theta: f64) -> f64 {
        // Oracle: adaptive quadrature split at the kinks of |cos|.
        let mut breaks = vec![];
        for k in -2..=4 {
            let b = theta + PI / 2.0 + k as f64 * PI;
            if b > 0.0 && b < 2.0 * PI {
                breaks.push(b);
            }
        }
        integrate(
            |phi| w(phi) * (phi - theta).cos().abs().powf(beta),
            0.0,
            2.0 * PI,
            &breaks,
            1e-14,
            1e-13,
            2000,
        )
        .value
    }

    #[test]
    fn atoms_in_one_dimension() {
        let m = SpectralMeasure::discrete_symmetrized(
            1,
            vec![
                Atom {
                    direction: vec![-1.0],
                    weight: 0.5,
                },
                Atom {
                    direction: vec![1.0],
                    weight: 0.5,
                },
            ],
        )
        .unwrap();
        assert!((omega_nu(&m, 1.5, &[1.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_circle() {
        let m = SpectralMeasure::uniform(2, 1.0).unwrap();
        let a = omega_nu(&m, 1.0, &[1.0, 0.0]).unwrap();
        let b = omega_nu(&m, 1.0, &[0.0, 1.0]).unwrap();
        assert!((a - 2.0 / PI).abs() < 1e-14);
        assert!((a - b).abs() < 1e-10);
        for &beta in &[0.3, 0.9, 1.7] {
            let oracle = brute_circle(|_| 1.0 / (2.0 * PI), beta, 0.4);
            assert!((omega_nu(&m, beta, &[0.4f64.cos(), 0.4f64.sin()]).unwrap() - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn fourier_density_matches_quadrature() {
        let dens = SphereDensity::Fourier {
            c0: 1.0,
            cos: vec![0.2, 0.0, 0.0, 0.5],
            sin: vec![0.0, 0.3],
        };
        let m = SpectralMeasure::density(2, dens.clone()).unwrap();
        for &beta in &[0.5, 1.0, 1.5] {
            for i in 0..12 {
                let th = 0.5 * i as f64;
                let oracle = brute_circle(|phi| dens.eval(&[phi.cos(), phi.sin()]), beta, th);
                let w = omega_nu(&m, beta, &[th.cos(), th.sin()]).unwrap();
                assert!((w - oracle).abs() < 1e-11 * oracle, "beta={beta} th={th} {w} {oracle}");
            }
        }
    }

    #[test]
    fn four_fold_density_equal_on_axes() {
        let m = SpectralMeasure::density(
            2,
            SphereDensity::Fourier {
                c0: 1.0,
                cos: vec![0.0, 0.0, 0.0, 0.5],
                sin: vec![],
            },
        )
        .unwrap();
        let g = Grid::new(2, 16, 0.3).unwrap();
        let s = build_symbol(&m, 1.0, g).unwrap();
        let k = 3;
        let a = s.values[g.ravel(&[k, 0])];
        let b = s.values[g.ravel(&[0, k])];
        assert!((a - b).abs() < 1e-12 * a);
        let oracle = brute_circle(|phi| 1.0 + 0.5 * (4.0 * phi).cos(), 1.0, 0.0) * g.freq(k);
        assert!((a - oracle).abs() < 1e-11 * a);
    }

    #[test]
    fn zonal_uniform_sphere() {
        // Constant density 1/(4π) equals the uniform unit-mass measure.
        let m = SpectralMeasure::density(
            3,
            SphereDensity::Zonal {
                axis: [0.0, 0.0, 1.0],
                legendre: vec![1.0 / (4.0 * PI), 0.0, 0.1],
            },
        )
        .unwrap();
        let u = SpectralMeasure::uniform(3, 1.0).unwrap();
        let beta = 1.2;
        assert!((omega_nu(&u, beta, &[0.0, 0.0, 1.0]).unwrap() - 1.0 / 2.2).abs() < 1e-14);
        // Oracle for the P_2 part: direct 2-D quadrature over the sphere with θ = e_z.
        let direct = integrate(
            |t| {
                let w = 1.0 / (4.0 * PI) + 0.1 * 0.5 * (3.0 * t * t - 1.0);
                2.0 * PI * w * t.abs().powf(beta)
            },
            -1.0,
            1.0,
            &[0.0],
            1e-15,
            1e-14,
            500,
        )
        .value;
        assert!((omega_nu(&m, beta, &[0.0, 0.0, 1.0]).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = SpectralMeasure::uniform(2, 1.0).unwrap();
        assert!(omega_nu(&m, 1.0, &[1.0, 1.0]).is_err());
        assert!(omega_nu(&m, 2.0, &[1.0, 0.0]).is_err());
        let bad = SpectralMeasure::density(
            2,
            SphereDensity::Fourier {
                c0: 0.2,
                cos: vec![0.5],
                sin: vec![],
            },
        );
        assert!(matches!(bad, Err(Error::H2Violation(_))));
    }

    #[test]
    fn symbol_one_dimension() {
        let m = SpectralMeasure::discrete_symmetrized(
            1,
            vec![Atom {
                direction: vec![1.0],
                weight: 1.0,
            }],
        )
        .unwrap();
        let g = Grid::with_extent(1, 64, 2.0 * PI * 64.0 / (PI * 32.0)).unwrap();
        let s = build_symbol(&m, 1.0, g).unwrap();
        for m in 0..64 {
            assert!((s.values[m] - g.freq(m).abs()).abs() < 1e-13);
        }
        let iso = SpectralMeasure::isotropic_unit(2, 1.5).unwrap();
        let g2 = Grid::new(2, 8, 0.7).unwrap();
        let s2 = build_symbol(&iso, 1.5, g2).unwrap();
        for idx in 0..g2.len() {
            let k = g2.wavevector(idx);
            let r = (k[0] * k[0] + k[1] * k[1]).sqrt();
            assert!((s2.values[idx] - r.powf(1.5)).abs() < 1e-12 * (1.0 + s2.values[idx]));
        }
    }

    #[test]
    fn anisotropy_bounds_hold() {
        let m = SpectralMeasure::density(
            2,
            SphereDensity::Fourier {
                c0: 1.0,
                cos: vec![0.3, 0.4],
                sin: vec![0.0, 0.0, 0.2],
            },
        )
        .unwrap();
        let beta = 0.8;
        let (lo, hi) = omega_bounds(&m, beta).unwrap().unwrap();
        for i in 0..360 {
            let th = (i as f64).to_radians();
            let w = omega_nu(&m, beta, &[th.cos(), th.sin()]).unwrap();
            assert!(w >= lo * (1.0 - 1e-12) && w <= hi * (1.0 + 1e-12));
        }
    }
}
