//! The fundamental kernels Z(t,·) and Y(t,·) on spatial grids, and numerical
//! checks of their structure: mass, self-similarity, the time-convolution
//! relation between Z and Y, subordination, L_r scaling, two-sided pointwise
//! bounds, the Hardy convolution bound and the smoothing estimate for R.
//!
//! Kernels are represented by cell averages, computed from Fourier symbols
//! through [`ImageSum`]:
//!
//! * Ẑ(t,ξ) = E_{α,1}(-t^α ψ(ξ)),
//! * Ŷ(t,ξ) = t^{α-1} E_{α,α}(-t^α ψ(ξ)),
//! * ∫_0^τ Ŷ(s,ξ) ds = τ^α E_{α,α+1}(-τ^α ψ(ξ)),
//! * Ĝ(τ,ξ) = e^{-τ ψ(ξ)}.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::grid::{FftPlan, Grid};
use crate::multiplier::ImageSum;
use crate::params::{kappa1, kappa2, smoothing_exponent, smoothing_feasibility, FracParams, SmoothingFeasibility};
use crate::potential::hardy_weight;
use crate::quad::integrate_vec;
use crate::specfun::{g_kernel, rgamma, stable_density, MlParams, MlTable};
use crate::symbol::{build_symbol, SpectralMeasure, SymbolField};

/// Required decay from the peak to the box boundary.
pub const TRUNCATION_RATIO: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    Z,
    Y,
}

impl std::fmt::Display for KernelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelKind::Z => write!(f, "Z"),
            KernelKind::Y => write!(f, "Y"),
        }
    }
}

/// Tabulated Mittag-Leffler profiles for one α, turned into grid multipliers
/// for any time.
pub struct KernelMultipliers<'a> {
    symbol: &'a SymbolField,
    alpha: f64,
    z_table: MlTable,
    y_table: MlTable,
    q_table: MlTable,
}

impl<'a> KernelMultipliers<'a> {
    pub fn new(symbol: &'a SymbolField, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return domain(format!("alpha must lie in (0,1), got {alpha}"));
        }
        Ok(Self {
            symbol,
            alpha,
            z_table: MlTable::new(MlParams::new(alpha, 1.0)?)?,
            y_table: MlTable::new(MlParams::new(alpha, alpha)?)?,
            q_table: MlTable::new(MlParams::new(alpha, alpha + 1.0)?)?,
        })
    }

    pub fn symbol(&self) -> &SymbolField {
        self.symbol
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn grid(&self) -> Grid {
        self.symbol.grid
    }

    /// False if any tabulation node missed the target accuracy.
    pub fn certified(&self) -> bool {
        self.z_table.certified() && self.y_table.certified() && self.q_table.certified()
    }

    pub fn z(&self, t: f64) -> Vec<f64> {
        let shift = self.alpha * t.ln();
        ImageSum::new(self.symbol, 1.0, |lp| self.z_table.eval_ln(shift + lp)).all()
    }

    pub fn y(&self, t: f64) -> Vec<f64> {
        let shift = self.alpha * t.ln();
        let scale = t.powf(self.alpha - 1.0);
        let mut m = ImageSum::new(self.symbol, rgamma(self.alpha), |lp| self.y_table.eval_ln(shift + lp)).all();
        m.iter_mut().for_each(|v| *v *= scale);
        m
    }

    /// Multiplier of ∫_0^τ Y(s,·) ds.
    pub fn y_integral(&self, tau: f64) -> Vec<f64> {
        let shift = self.alpha * tau.ln();
        let scale = tau.powf(self.alpha);
        let mut m = ImageSum::new(self.symbol, rgamma(self.alpha + 1.0), |lp| {
            self.q_table.eval_ln(shift + lp)
        })
        .all();
        m.iter_mut().for_each(|v| *v *= scale);
        m
    }

    /// Multiplier of the β-stable kernel G(τ,·).
    pub fn g(&self, tau: f64) -> Vec<f64> {
        let shift = tau.ln();
        ImageSum::new(self.symbol, 1.0, |lp| (-(shift + lp).exp()).exp()).all()
    }
}

/// Samples of Z(t,·) or Y(t,·) (cell averages) on a spatial grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelField {
    pub which: KernelKind,
    pub t: f64,
    pub grid: Grid,
    pub alpha: f64,
    pub beta: f64,
    pub measure: SpectralMeasure,
    #[serde(skip)]
    pub values: Vec<f64>,
}

impl KernelField {
    pub fn from_multiplier(which: KernelKind, t: f64, mult: &KernelMultipliers<'_>) -> Self {
        let grid = mult.grid();
        let m = match which {
            KernelKind::Z => mult.z(t),
            KernelKind::Y => mult.y(t),
        };
        let values = FftPlan::new(grid).kernel_from_multiplier(&m);
        Self {
            which,
            t,
            grid,
            alpha: mult.alpha(),
            beta: mult.symbol().beta,
            measure: mult.symbol().measure.clone(),
            values,
        }
    }

    pub fn d(&self) -> usize {
        self.grid.d
    }

    pub fn mass(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    /// Mass predicted by the kernel's definition: 1 for Z, g_α(t) for Y.
    pub fn expected_mass(&self) -> f64 {
        match self.which {
            KernelKind::Z => 1.0,
            KernelKind::Y => g_kernel(self.alpha, self.t).unwrap_or(f64::NAN),
        }
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Peak over the largest magnitude on the outer faces of the box.
    pub fn truncation_ratio(&self) -> f64 {
        let g = self.grid;
        let mut edge: f64 = 0.0;
        for (idx, v) in self.values.iter().enumerate() {
            let ix = g.unravel(idx);
            if ix.iter().take(g.d).any(|&i| i == 0) {
                edge = edge.max(v.abs());
            }
        }
        self.peak() / edge
    }

    /// Extent that would meet [`TRUNCATION_RATIO`] given the far-field decay
    /// |x|^{-d-β}, with a 10% margin.
    pub fn suggested_extent(&self) -> f64 {
        let ratio = self.truncation_ratio();
        let power = self.grid.d as f64 + self.beta;
        self.grid.extent() * (TRUNCATION_RATIO / ratio).max(1.0).powf(1.0 / power) * 1.1
    }

    pub fn check_truncation(&self) -> Result<()> {
        let ratio = self.truncation_ratio();
        if !(ratio >= TRUNCATION_RATIO) {
            return Err(Error::GridTooSmall {
                ratio,
                required: TRUNCATION_RATIO,
                suggested_extent: self.suggested_extent(),
            });
        }
        Ok(())
    }

    pub fn check_mass(&self, rel_tol: f64) -> Result<()> {
        let want = self.expected_mass();
        let got = self.mass();
        if !((got - want).abs() <= rel_tol * want) {
            return Err(Error::Invariant(format!(
                "{} mass {got:.12e} differs from {want:.12e} at t = {}",
                self.which, self.t
            )));
        }
        Ok(())
    }

    pub fn check_positivity(&self) -> Result<()> {
        let peak = self.peak();
        let min = self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        if min < -1e-8 * peak {
            return Err(Error::Invariant(format!(
                "{} has negative values down to {min:.3e} (peak {peak:.3e})",
                self.which
            )));
        }
        Ok(())
    }

    /// Mass within 1e-3, positivity, and decay to the boundary.
    pub fn check_invariants(&self) -> Result<()> {
        self.check_mass(1e-3)?;
        self.check_positivity()?;
        self.check_truncation()
    }

    /// Values along the positive first axis: (|x|, value) for x ≥ 0.
    pub fn radial_profile(&self) -> Vec<(f64, f64)> {
        let g = self.grid;
        let mut ix = [g.n / 2; 3];
        (g.n / 2..g.n)
            .map(|j| {
                ix[0] = j;
                (g.coord(j), self.values[g.ravel(&ix)])
            })
            .collect()
    }

    /// Writes `<stem>.bin` (row-major little-endian f64) and `<stem>.json`
    /// (grid, kernel, time and parameters).
    pub fn write_binary(&self, stem: &Path) -> Result<()> {
        let mut bin = BufWriter::new(File::create(stem.with_extension("bin"))?);
        for v in &self.values {
            bin.write_all(&v.to_le_bytes())?;
        }
        bin.flush()?;
        let meta = serde_json::to_string_pretty(self)?;
        std::fs::write(stem.with_extension("json"), meta)?;
        Ok(())
    }

    pub fn read_binary(stem: &Path) -> Result<Self> {
        let meta = std::fs::read_to_string(stem.with_extension("json"))?;
        let mut field: KernelField = serde_json::from_str(&meta)?;
        let bytes = std::fs::read(stem.with_extension("bin"))?;
        if bytes.len() != 8 * field.grid.len() {
            return Err(Error::Io(format!(
                "expected {} values, found {} bytes",
                field.grid.len(),
                bytes.len()
            )));
        }
        field.values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        Ok(field)
    }

    pub fn write_radial_csv(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "r,value")?;
        for (r, v) in self.radial_profile() {
            writeln!(out, "{r:.11e},{v:.11e}")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Z(t,·) on the grid of `symbol`, checked for mass, positivity and decay.
pub fn compute_z(symbol: &SymbolField, alpha: f64, t: f64) -> Result<KernelField> {
    compute(symbol, alpha, t, KernelKind::Z)
}

/// Y(t,·) on the grid of `symbol`, checked for mass, positivity and decay.
pub fn compute_y(symbol: &SymbolField, alpha: f64, t: f64) -> Result<KernelField> {
    compute(symbol, alpha, t, KernelKind::Y)
}

fn compute(symbol: &SymbolField, alpha: f64, t: f64, which: KernelKind) -> Result<KernelField> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("time must be positive, got {t}"));
    }
    let mult = KernelMultipliers::new(symbol, alpha)?;
    let field = KernelField::from_multiplier(which, t, &mult);
    field.check_invariants()?;
    Ok(field)
}

/// Grid resolving the kernel scale t^{α/β} with `resolution` cells and wide
/// enough for the |x|^{-d-β} tail to fall [`TRUNCATION_RATIO`] below the peak.
/// The node count is capped per dimension; past the cap the spacing grows.
pub fn kernel_grid(d: usize, alpha: f64, beta: f64, t: f64, resolution: f64) -> Result<Grid> {
    let scale = t.powf(alpha / beta);
    let half = scale * (10.0 * TRUNCATION_RATIO).powf(1.0 / (d as f64 + beta));
    let mut h = scale / resolution;
    let cap: usize = match d {
        1 => 1 << 20,
        2 => 1 << 10,
        _ => 1 << 7,
    };
    let mut n = ((2.0 * half / h).ceil() as usize).next_power_of_two().max(8);
    if n > cap {
        n = cap;
        h = 2.0 * half / n as f64;
    }
    Grid::new(d, n, h)
}

/// Computes a kernel on [`kernel_grid`], widening the box (at fixed spacing)
/// until the decay check passes.
pub fn compute_auto(
    measure: &SpectralMeasure,
    alpha: f64,
    beta: f64,
    t: f64,
    which: KernelKind,
    resolution: f64,
) -> Result<KernelField> {
    let mut grid = kernel_grid(measure.dimension(), alpha, beta, t, resolution)?;
    for _ in 0..4 {
        let symbol = build_symbol(measure, beta, grid)?;
        let mult = KernelMultipliers::new(&symbol, alpha)?;
        let field = KernelField::from_multiplier(which, t, &mult);
        match field.check_truncation() {
            Ok(()) => {
                field.check_mass(1e-3)?;
                field.check_positivity()?;
                return Ok(field);
            }
            Err(Error::GridTooSmall { suggested_extent, .. }) => {
                let n = ((suggested_extent / grid.h).ceil() as usize).next_power_of_two();
                grid = Grid::new(grid.d, n, grid.h)?;
            }
            Err(e) => return Err(e),
        }
    }
    let symbol = build_symbol(measure, beta, grid)?;
    let mult = KernelMultipliers::new(&symbol, alpha)?;
    let field = KernelField::from_multiplier(which, t, &mult);
    field.check_invariants()?;
    Ok(field)
}

fn relative_l1(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
    let den: f64 = b.iter().map(|y| y.abs()).sum();
    num / den
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubordinationReport {
    /// Relative L1 distance between the two routes.
    pub discrepancy: f64,
    /// Stable-law mass above the integration range, placed at the origin.
    pub tail_mass: f64,
    pub converged: bool,
}

/// P(S > σ) for the one-sided α-stable law, from its convergent series in
/// σ^{-α}.
fn stable_tail(alpha: f64, sigma: f64) -> f64 {
    let y = sigma.powf(-alpha);
    let mut sum = 0.0;
    let mut yk = 1.0;
    let mut fact = 1.0;
    for k in 1..60 {
        yk *= y;
        fact *= k as f64;
        let term = yk * rgamma(1.0 - alpha * k as f64) / fact;
        sum += if k % 2 == 1 { term } else { -term };
        if yk / fact < 1e-18 {
            break;
        }
    }
    sum
}

/// Builds Z(t,·) a second way, as the mixture ∫ G(t^α σ^{-α},·) f_α(σ) dσ
/// of stable kernels over the one-sided α-stable density f_α, and compares
/// with the Mittag-Leffler route. `s_max` restricts the mixture to
/// t^{-α}τ ≤ s_max, i.e. σ ≥ s_max^{-1/α}.
pub fn subordination_check(
    symbol: &SymbolField,
    alpha: f64,
    t: f64,
    s_max: Option<f64>,
) -> Result<SubordinationReport> {
    let mult = KernelMultipliers::new(symbol, alpha)?;
    let reference = FftPlan::new(symbol.grid).kernel_from_multiplier(&mult.z(t));

    // Lower cut where σ f_α(σ) is negligible.
    let mut sigma_lo = 1.0;
    while sigma_lo > 1e-6 && stable_density(alpha, sigma_lo)? * sigma_lo > 1e-17 {
        sigma_lo /= 1.25;
    }
    let mut sigma_hi = 1e14f64.powf(1.0 / alpha);
    if let Some(s) = s_max {
        if !(s >= 0.0) {
            return domain(format!("s_max must be nonnegative, got {s}"));
        }
        let cut = if s == 0.0 { f64::INFINITY } else { s.powf(-1.0 / alpha) };
        sigma_lo = sigma_lo.max(cut);
        sigma_hi = sigma_hi.max(sigma_lo);
    }
    let tail_mass = if sigma_hi.is_finite() {
        stable_tail(alpha, sigma_hi)
    } else {
        0.0
    };

    let len = symbol.grid.len();
    let ta = t.powf(alpha);
    let (v_lo, v_hi) = (sigma_lo.ln(), sigma_hi.ln());
    let mut breaks = vec![v_lo];
    let mut b = v_lo.ceil();
    while b < v_hi {
        if b > v_lo {
            breaks.push(b);
        }
        b += 1.0;
    }
    breaks.push(v_hi);
    let mut failure = None;
    let res = integrate_vec(
        |v| {
            let sigma = v.exp();
            let w = match stable_density(alpha, sigma) {
                Ok(f) => f * sigma,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            };
            if w == 0.0 {
                return vec![0.0; len];
            }
            let mut m = mult.g(ta * (-alpha * v).exp());
            m.iter_mut().for_each(|x| *x *= w);
            m
        },
        len,
        if v_hi > v_lo { &breaks } else { &[] },
        1e-7 * len as f64,
        4000,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let mut m = res.value;
    if m.is_empty() {
        m = vec![0.0; len];
    }
    m.iter_mut().for_each(|x| *x += tail_mass);
    let mixture = FftPlan::new(symbol.grid).kernel_from_multiplier(&m);
    Ok(SubordinationReport {
        discrepancy: relative_l1(&mixture, &reference),
        tail_mass,
        converged: res.converged,
    })
}

/// Relative L1 distance between Z(t,·) and the product-integrated time
/// convolution g_{1-α} ∗ Y(·,x) at t, using `nodes` graded subintervals.
///
/// Writing Y(s) = s^{α-1} Ỹ(s), Ỹ is held constant on each subinterval and
/// the weight (t-s)^{-α} s^{α-1}/Γ(1-α) is integrated exactly through the
/// regularized incomplete beta function I(α, 1-α).
pub fn z_y_relation_check(symbol: &SymbolField, alpha: f64, t: f64, nodes: usize) -> Result<f64> {
    if nodes < 2 {
        return domain("need at least two product-integration nodes");
    }
    let mult = KernelMultipliers::new(symbol, alpha)?;
    let reference = FftPlan::new(symbol.grid).kernel_from_multiplier(&mult.z(t));
    let beta_ab = statrs::function::beta::beta(alpha, 1.0 - alpha);
    let ib = |u: f64| statrs::function::beta::beta_reg(alpha, 1.0 - alpha, u.clamp(0.0, 1.0));
    // Nodes graded toward both ends, where Ỹ varies fastest.
    let node = |j: usize| {
        let u = j as f64 / nodes as f64;
        t * (0.5 - 0.5 * (std::f64::consts::PI * u).cos())
    };
    let mut acc = vec![0.0; symbol.grid.len()];
    for j in 0..nodes {
        let (s0, s1) = (node(j), node(j + 1));
        let w = beta_ab * (ib(s1 / t) - ib(s0 / t)) * rgamma(1.0 - alpha);
        let sm = 0.5 * (s0 + s1);
        let scale = w * sm.powf(1.0 - alpha);
        for (a, y) in acc.iter_mut().zip(mult.y(sm)) {
            *a += scale * y;
        }
    }
    let conv = FftPlan::new(symbol.grid).kernel_from_multiplier(&acc);
    Ok(relative_l1(&conv, &reference))
}

/// Exponent of t in ‖K(t,·)‖_r.
pub fn lr_exponent(which: KernelKind, d: usize, alpha: f64, beta: f64, r: f64) -> f64 {
    let base = -alpha * d as f64 / beta * (1.0 - 1.0 / r);
    match which {
        KernelKind::Z => base,
        KernelKind::Y => base + alpha - 1.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrScalingReport {
    pub which: KernelKind,
    pub r: f64,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub predicted: f64,
}

impl LrScalingReport {
    pub fn relative_error(&self) -> f64 {
        if self.predicted == 0.0 {
            self.slope.abs()
        } else {
            ((self.slope - self.predicted) / self.predicted).abs()
        }
    }
}

/// Least-squares slope and intercept of y against x.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fits log ‖K(t,·)‖_r against log t over `times` on the fixed grid of
/// `symbol`. Rejects r outside the integrability range of the kernel.
pub fn lr_norm_scaling(
    symbol: &SymbolField,
    alpha: f64,
    which: KernelKind,
    r: f64,
    times: &[f64],
) -> Result<LrScalingReport> {
    let d = symbol.grid.d;
    let beta = symbol.beta;
    if !(r >= 1.0) {
        return domain(format!("r must be at least 1, got {r}"));
    }
    let (kappa, name) = match which {
        KernelKind::Z => (kappa1(d, beta), "kappa1"),
        KernelKind::Y => (kappa2(d, beta), "kappa2"),
    };
    // r within rounding of κ counts as r = κ.
    if !(r < kappa * (1.0 - 1e-12)) {
        return Err(Error::NotIntegrable { r, kappa, which: name });
    }
    if times.len() < 2 || times.iter().any(|&t| !(t > 0.0)) {
        return domain("need at least two positive times");
    }
    let (tmin, tmax) = times
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &t| (a.min(t), b.max(t)));
    if tmax / tmin < 10.0 - 1e-9 {
        return domain(format!("times must span a decade, got [{tmin}, {tmax}]"));
    }
    let mult = KernelMultipliers::new(symbol, alpha)?;
    let norms: Vec<f64> = times
        .iter()
        .map(|&t| {
            symbol
                .grid
                .lr_norm(&KernelField::from_multiplier(which, t, &mult).values, r)
        })
        .collect();
    let lx: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let (slope, intercept) = fit_line(&lx, &ly);
    Ok(LrScalingReport {
        which,
        r,
        times: times.to_vec(),
        norms,
        slope,
        intercept,
        predicted: lr_exponent(which, d, alpha, beta, r),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Ω ≤ 1
    NearField,
    /// Ω ≥ 1
    FarField,
}

/// Position of d relative to β (for Z) or 2β (for Y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimateCase {
    Below,
    Critical,
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateFitReport {
    pub which: KernelKind,
    pub t: f64,
    pub regime: Regime,
    pub case: EstimateCase,
    pub lower: f64,
    pub upper: f64,
    pub samples: usize,
    /// Largest relative excursion of the odd-numbered samples outside the
    /// band fitted on the even-numbered ones.
    pub max_relative_violation: f64,
    pub skipped: bool,
}

impl EstimateFitReport {
    pub fn spread(&self) -> f64 {
        self.upper / self.lower
    }

    pub fn passed(&self) -> bool {
        !self.skipped && self.lower > 0.0 && self.lower <= self.upper && self.upper.is_finite()
    }
}

pub fn estimate_case(which: KernelKind, d: usize, beta: f64) -> EstimateCase {
    let threshold = match which {
        KernelKind::Z => beta,
        KernelKind::Y => 2.0 * beta,
    };
    let df = d as f64;
    if df < threshold {
        EstimateCase::Below
    } else if df == threshold {
        EstimateCase::Critical
    } else {
        EstimateCase::Above
    }
}

/// Comparison function g(t,x) of the two-sided bound c g ≤ K ≤ C g, with
/// Ω = |x|^β t^{-α}.
pub fn comparison(which: KernelKind, d: usize, alpha: f64, beta: f64, t: f64, omega: f64) -> f64 {
    let df = d as f64;
    let base = match which {
        KernelKind::Z => t.powf(-df * alpha / beta),
        KernelKind::Y => t.powf(-df * alpha / beta + alpha - 1.0),
    };
    if omega >= 1.0 {
        return base * omega.powf(-1.0 - df / beta);
    }
    match (which, estimate_case(which, d, beta)) {
        (_, EstimateCase::Below) => base,
        (KernelKind::Z, EstimateCase::Critical) => t.powf(-alpha) * (omega.ln().abs() + 1.0),
        (KernelKind::Y, EstimateCase::Critical) => t.powf(-alpha - 1.0) * (omega.ln().abs() + 1.0),
        (KernelKind::Z, EstimateCase::Above) => base * omega.powf(1.0 - df / beta),
        (KernelKind::Y, EstimateCase::Above) => base * omega.powf(2.0 - df / beta),
    }
}

/// Fits the constants of the two-sided pointwise bound on each regime.
/// The origin node, nodes with Ω ∈ [0.9, 1.1] and nodes below 1e-10 of the
/// peak are left out. A regime without nodes is reported as skipped.
pub fn two_sided_fit(field: &KernelField) -> Vec<EstimateFitReport> {
    let g = field.grid;
    let d = g.d;
    let case = estimate_case(field.which, d, field.beta);
    let floor = 1e-10 * field.peak();
    let mut near = Vec::new();
    let mut far = Vec::new();
    for (idx, &k) in field.values.iter().enumerate() {
        let r = g.radius(idx);
        if r == 0.0 || !(k > floor) {
            continue;
        }
        let omega = r.powf(field.beta) * field.t.powf(-field.alpha);
        if (0.9..=1.1).contains(&omega) {
            continue;
        }
        let ratio = k / comparison(field.which, d, field.alpha, field.beta, field.t, omega);
        if omega < 1.0 {
            near.push((r, ratio));
        } else {
            far.push((r, ratio));
        }
    }
    [(Regime::NearField, near), (Regime::FarField, far)]
        .into_iter()
        .map(|(regime, mut samples)| {
            if samples.is_empty() {
                eprintln!(
                    "warning: {} at t = {} has no samples in {:?}; regime skipped",
                    field.which, field.t, regime
                );
                return EstimateFitReport {
                    which: field.which,
                    t: field.t,
                    regime,
                    case,
                    lower: f64::NAN,
                    upper: f64::NAN,
                    samples: 0,
                    max_relative_violation: f64::NAN,
                    skipped: true,
                };
            }
            samples.sort_by(|a, b| a.0.total_cmp(&b.0));
            let band = |it: &mut dyn Iterator<Item = f64>| {
                it.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)))
            };
            let (lower, upper) = band(&mut samples.iter().map(|s| s.1));
            let (even_lo, even_hi) = band(&mut samples.iter().step_by(2).map(|s| s.1));
            let violation = samples
                .iter()
                .skip(1)
                .step_by(2)
                .map(|s| (even_lo / s.1 - 1.0).max(s.1 / even_hi - 1.0).max(0.0))
                .fold(0.0f64, f64::max);
            EstimateFitReport {
                which: field.which,
                t: field.t,
                regime,
                case,
                lower,
                upper,
                samples: samples.len(),
                max_relative_violation: violation,
                skipped: false,
            }
        })
        .collect()
}

/// Circular convolution of a kernel centred at the origin node with `f`,
/// including the cell volume.
pub fn convolve_centered(grid: Grid, kernel: &[f64], f: &[f64]) -> Vec<f64> {
    let plan = FftPlan::new(grid);
    let half = grid.n / 2;
    let mut rolled = vec![0.0; grid.len()];
    for (idx, v) in kernel.iter().enumerate() {
        let mut ix = grid.unravel(idx);
        for a in ix.iter_mut().take(grid.d) {
            *a = (*a + half) % grid.n;
        }
        rolled[grid.ravel(&ix)] = *v;
    }
    let mut a = plan.forward_real(&rolled);
    let b = plan.forward_real(f);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= *y;
    }
    plan.inverse(&mut a);
    let vol = grid.cell_volume();
    a.into_iter().map(|c: Complex64| c.re * vol).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyProfile {
    pub t: f64,
    pub gamma: f64,
    /// Node radii along the positive first axis.
    pub radii: Vec<f64>,
    /// t^{1-α} |x|^γ (Y(t) ⋆ |·|^{-γ})(x).
    pub constants: Vec<f64>,
}

impl HardyProfile {
    pub fn sup(&self) -> f64 {
        self.constants.iter().fold(0.0f64, |m, &v| m.max(v))
    }
}

/// Profile of the Hardy convolution constant at the grid nodes nearest to
/// `radii` on the positive first axis.
pub fn hardy_convolution_check(y: &KernelField, gamma: f64, radii: &[f64]) -> Result<HardyProfile> {
    if y.which != KernelKind::Y {
        return domain("Hardy convolution check needs a Y field");
    }
    if !(gamma > 0.0) {
        return domain(format!("gamma must be positive, got {gamma}"));
    }
    let g = y.grid;
    let weight = hardy_weight(&g, gamma)?;
    let conv = convolve_centered(g, &y.values, &weight);
    let scale = y.t.powf(1.0 - y.alpha);
    let mut out_r = Vec::with_capacity(radii.len());
    let mut out_c = Vec::with_capacity(radii.len());
    for &r in radii {
        let j = g.n / 2 + (r / g.h).round() as usize;
        if j >= g.n || j == g.n / 2 {
            return domain(format!("radius {r} is not resolved by the grid"));
        }
        let mut ix = [g.n / 2; 3];
        ix[0] = j;
        let x = g.coord(j);
        out_r.push(x);
        out_c.push(scale * x.powf(gamma) * conv[g.ravel(&ix)]);
    }
    Ok(HardyProfile {
        t: y.t,
        gamma,
        radii: out_r,
        constants: out_c,
    })
}

/// Test functions for the smoothing estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Probe {
    Gaussian { width: f64 },
    Indicator { radius: f64 },
}

impl Probe {
    fn sample(&self, grid: &Grid, dilation: f64) -> Vec<f64> {
        (0..grid.len())
            .map(|idx| {
                let r = grid.radius(idx) / dilation;
                match *self {
                    Probe::Gaussian { width } => (-0.5 * (r / width).powi(2)).exp(),
                    Probe::Indicator { radius } => {
                        if r <= radius {
                            1.0
                        } else {
                            0.0
                        }
                    }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub q1: f64,
    pub q2: f64,
    pub feasibility: SmoothingFeasibility,
    pub predicted: f64,
    pub times: Vec<f64>,
    /// ‖R(t)(|·|^{-γ} v_t)‖_{q2} / ‖v_t‖_{q1} for the probe dilated to the
    /// kernel scale, v_t(x) = v(x t^{-α/β}).
    pub ratios: Vec<f64>,
    pub fitted_slope: f64,
    /// max/min of ratio·t^{-predicted}.
    pub spread: f64,
    /// The same spread for the undilated probe.
    pub fixed_probe_spread: f64,
}

impl SmoothingReport {
    pub fn relative_error(&self) -> f64 {
        ((self.fitted_slope - self.predicted) / self.predicted).abs()
    }
}

/// Measures the t-power in ‖R(t)(|·|^{-γ}v)‖_{q2} ≤ C t^{e} ‖v‖_{q1}. Each
/// time uses the grid `base` dilated by t^{α/β}.
pub fn smoothing_estimate_check(
    params: &FracParams,
    measure: &SpectralMeasure,
    q1: f64,
    q2: f64,
    times: &[f64],
    base: Grid,
    probe: Probe,
) -> Result<SmoothingReport> {
    let feasibility = smoothing_feasibility(params.d, params.beta, params.gamma, q1, q2);
    if !feasibility.feasible {
        return Err(Error::Hypothesis(format!(
            "smoothing estimate hypotheses fail for (q1, q2) = ({q1}, {q2}): {}",
            feasibility.failing.clone().unwrap_or_default()
        )));
    }
    if base.d != params.d {
        return domain("grid dimension does not match params");
    }
    let (a, b) = (params.alpha, params.beta);
    let predicted = smoothing_exponent(params.d, a, b, params.gamma, q1, q2);
    let apply = |grid: Grid, t: f64, v: &[f64]| -> Result<f64> {
        let symbol = build_symbol(measure, b, grid)?;
        let mult = KernelMultipliers::new(&symbol, a)?;
        let w = hardy_weight(&grid, params.gamma)?;
        let f: Vec<f64> = v.iter().zip(&w).map(|(x, y)| x * y).collect();
        let out = FftPlan::new(grid).apply_multiplier(&f, &mult.y(t));
        Ok(grid.lr_norm(&out, q2) / grid.lr_norm(v, q1))
    };
    let mut ratios = Vec::with_capacity(times.len());
    let mut fixed = Vec::with_capacity(times.len());
    for &t in times {
        let c = t.powf(a / b);
        let grid = base.scaled(c);
        ratios.push(apply(grid, t, &probe.sample(&grid, c))?);
        fixed.push(apply(base, t, &probe.sample(&base, 1.0))?);
    }
    let spread_of = |vals: &[f64]| {
        let scaled: Vec<f64> = vals.iter().zip(times).map(|(v, t)| v * t.powf(-predicted)).collect();
        let hi = scaled.iter().fold(0.0f64, |m, &v| m.max(v));
        let lo = scaled.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        hi / lo
    };
    let lx: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = ratios.iter().map(|v| v.ln()).collect();
    let (fitted_slope, _) = fit_line(&lx, &ly);
    Ok(SmoothingReport {
        q1,
        q2,
        feasibility,
        predicted,
        times: times.to_vec(),
        spread: spread_of(&ratios),
        fixed_probe_spread: spread_of(&fixed),
        ratios,
        fitted_slope,
    })
}
