//! Mild solutions u = S(t)u₀ + ∫₀ᵗ R(t-s)(|·|^{-γ}|u|^{p-1}u)(s) ds on a
//! periodic grid.
//!
//! Time stepping is product integration: the forcing is held constant on
//! each (t_{j-1}, t_j] at its right-endpoint value, and the kernel is
//! integrated exactly in time through the multiplier of ∫₀^τ Y(s,·) ds,
//! Q(τ) = τ^α E_{α,α+1}(-τ^α ψ). The current-step term is implicit and is
//! resolved by Picard iteration.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::grid::{FftPlan, Grid};
use crate::params::FracParams;
use crate::potential::hardy_weight;
use crate::specfun::{rgamma, MlParams, MlTable};
use crate::symbol::{build_symbol, SpectralMeasure, SymbolField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum InitialData {
    GridFunction {
        values: Vec<f64>,
    },
    /// |x|^{-η} on the ball of radius `radius`.
    TruncatedPower {
        eta: f64,
        radius: f64,
    },
    /// A|x|^{-d/q_c} on the ball of radius `radius`.
    ScaledCriticalPower {
        amplitude: f64,
        radius: f64,
    },
    /// A exp(-|x - c|²/(2w²)) with c = (offset, 0, 0).
    GaussianBump {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        offset: f64,
    },
}

impl InitialData {
    /// Samples on `grid`. Power profiles use exact cell averages of the
    /// singular factor.
    pub fn sample(&self, grid: &Grid, params: &FracParams) -> Result<Vec<f64>> {
        let ball = |radius: f64, eta: f64, amplitude: f64| -> Result<Vec<f64>> {
            let w = hardy_weight(grid, eta)?;
            Ok(w.iter()
                .enumerate()
                .map(|(idx, v)| if grid.radius(idx) < radius { amplitude * v } else { 0.0 })
                .collect())
        };
        match self {
            InitialData::GridFunction { values } => {
                if values.len() != grid.len() {
                    return domain(format!(
                        "grid function has {} values, grid has {}",
                        values.len(),
                        grid.len()
                    ));
                }
                Ok(values.clone())
            }
            InitialData::TruncatedPower { eta, radius } => {
                if !(*eta > 0.0) || !(*radius > 1.0) {
                    return domain(format!(
                        "truncated power needs eta > 0 and R > 1, got ({eta}, {radius})"
                    ));
                }
                ball(*radius, *eta, 1.0)
            }
            InitialData::ScaledCriticalPower { amplitude, radius } => {
                if !(*amplitude > 0.0) || !(*radius > 0.0) {
                    return domain("critical power needs A > 0 and R > 0");
                }
                let qc = params.critical_exponent()?;
                ball(*radius, params.df() / qc, *amplitude)
            }
            InitialData::GaussianBump {
                amplitude,
                width,
                offset,
            } => {
                if !(*width > 0.0) {
                    return domain(format!("bump width must be positive, got {width}"));
                }
                Ok((0..grid.len())
                    .map(|idx| {
                        let mut x = grid.point(idx);
                        x[0] -= offset;
                        let r2: f64 = x.iter().map(|v| v * v).sum();
                        amplitude * (-0.5 * r2 / (width * width)).exp()
                    })
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TimeMesh {
    Uniform {
        steps: usize,
    },
    /// t_n = T (n/M)^χ.
    Graded {
        steps: usize,
        grading: f64,
    },
}

impl TimeMesh {
    /// Graded mesh with the default grading 2/α.
    pub fn graded(steps: usize, alpha: f64) -> Self {
        TimeMesh::Graded {
            steps,
            grading: 2.0 / alpha,
        }
    }

    pub fn steps(&self) -> usize {
        match *self {
            TimeMesh::Uniform { steps } | TimeMesh::Graded { steps, .. } => steps,
        }
    }

    pub fn nodes(&self, horizon: f64) -> Result<Vec<f64>> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return domain(format!("horizon must be positive, got {horizon}"));
        }
        let m = self.steps();
        if m == 0 {
            return domain("time mesh needs at least one step");
        }
        let chi = match *self {
            TimeMesh::Uniform { .. } => 1.0,
            TimeMesh::Graded { grading, .. } => {
                if !(grading >= 1.0) {
                    return domain(format!("grading must be at least 1, got {grading}"));
                }
                grading
            }
        };
        Ok((0..=m).map(|n| horizon * (n as f64 / m as f64).powf(chi)).collect())
    }

    /// The same mesh with `factor` times as many steps; graded meshes with
    /// an integer factor contain the coarse nodes.
    pub fn refined(&self, factor: usize) -> Self {
        match *self {
            TimeMesh::Uniform { steps } => TimeMesh::Uniform { steps: steps * factor },
            TimeMesh::Graded { steps, grading } => TimeMesh::Graded {
                steps: steps * factor,
                grading,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub mesh: TimeMesh,
    /// Relative L_q change that ends Picard iteration.
    #[serde(default = "default_picard_tol")]
    pub picard_tol: f64,
    #[serde(default = "default_max_picard")]
    pub max_picard: usize,
    /// Bound on |u|_q beyond which the run stops.
    #[serde(default = "default_overflow")]
    pub overflow: f64,
    /// When false the forcing term is dropped and u = S(t)u₀.
    #[serde(default = "yes")]
    pub nonlinear: bool,
    #[serde(default = "yes")]
    pub store_states: bool,
    /// Radius of the ball for the per-step local mass ∫_{B(ε)} u.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_radius: Option<f64>,
}

fn default_picard_tol() -> f64 {
    1e-8
}

fn default_max_picard() -> usize {
    50
}

fn default_overflow() -> f64 {
    1e12
}

fn yes() -> bool {
    true
}

impl SolverConfig {
    pub fn new(mesh: TimeMesh) -> Self {
        Self {
            mesh,
            picard_tol: default_picard_tol(),
            max_picard: default_max_picard(),
            overflow: default_overflow(),
            nonlinear: true,
            store_states: true,
            probe_radius: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.picard_tol > 0.0) {
            return domain("Picard tolerance must be positive");
        }
        if self.max_picard == 0 {
            return domain("need at least one Picard iteration");
        }
        if !(self.overflow > 0.0) {
            return domain("overflow threshold must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "step")]
pub enum RunStatus {
    Completed,
    PicardDiverged(usize),
    NormOverflow(usize),
}

impl RunStatus {
    pub fn completed(&self) -> bool {
        matches!(self, RunStatus::Completed)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: FracParams,
    pub grid: Grid,
    /// Accepted time nodes, starting at t₀ = 0.
    pub times: Vec<f64>,
    #[serde(skip)]
    pub states: Vec<Vec<f64>>,
    pub lq_norms: Vec<f64>,
    /// t^{(αd/β)(1/q_c - 1/q)} |u(t)|_q; NaN where q_c is undefined.
    pub weighted_norms: Vec<f64>,
    pub sup_norms: Vec<f64>,
    pub local_masses: Vec<f64>,
    pub picard_iters: Vec<usize>,
    pub status: RunStatus,
    /// False for runs with the forcing term dropped.
    pub nonlinear: bool,
}

impl Trajectory {
    pub fn final_state(&self) -> Option<&Vec<f64>> {
        self.states.last()
    }

    /// Exponent of t in the weighted norm.
    pub fn weight_exponent(params: &FracParams) -> f64 {
        match params.critical_exponent() {
            Ok(qc) => params.alpha * params.df() / params.beta * (1.0 / qc - 1.0 / params.q),
            Err(_) => f64::NAN,
        }
    }

    /// CSV rows `t,lq_norm,weighted_norm,sup_norm,local_mass,picard_iters`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "t,lq_norm,weighted_norm,sup_norm,local_mass,picard_iters")?;
        for i in 0..self.times.len() {
            writeln!(
                out,
                "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{}",
                self.times[i],
                self.lq_norms[i],
                self.weighted_norms[i],
                self.sup_norms[i],
                self.local_masses[i],
                self.picard_iters[i]
            )?;
        }
        out.flush()?;
        Ok(())
    }

    /// JSON summary with parameters, status and per-step diagnostics.
    pub fn write_manifest(&self, path: &Path, config: &SolverConfig) -> Result<()> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            trajectory: &'a Trajectory,
            config: &'a SolverConfig,
        }
        let text = serde_json::to_string_pretty(&Manifest {
            trajectory: self,
            config,
        })?;
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Writes states at the stored nodes nearest to `times` as
    /// `<dir>/state_<k>.bin` (little-endian f64) with a `.json` sidecar,
    /// returning the paths.
    pub fn dump_states(&self, dir: &Path, times: &[f64]) -> Result<Vec<PathBuf>> {
        if self.states.is_empty() {
            return domain("trajectory has no stored states");
        }
        let mut paths = Vec::new();
        for (k, &t) in times.iter().enumerate() {
            let i = self
                .times
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
                .map(|(i, _)| i)
                .unwrap_or(0)
                .min(self.states.len() - 1);
            let path = dir.join(format!("state_{k}.bin"));
            let mut out = BufWriter::new(File::create(&path)?);
            for v in &self.states[i] {
                out.write_all(&v.to_le_bytes())?;
            }
            out.flush()?;
            let sidecar = dir.join(format!("state_{k}.json"));
            let meta = serde_json::json!({
                "t": self.times[i],
                "requested_t": t,
                "grid": self.grid,
                "params": self.params,
            });
            std::fs::write(&sidecar, serde_json::to_string_pretty(&meta)?)?;
            paths.push(path);
            paths.push(sidecar);
        }
        Ok(paths)
    }
}

/// Spectral operators of the equation on one grid.
pub struct MildSolver {
    params: FracParams,
    grid: Grid,
    plan: FftPlan,
    /// ln ψ on the DFT nodes, -∞ at the origin.
    ln_psi: Vec<f64>,
    /// Representative DFT indices of the ±k pairs, and their mirrors.
    pairs: Vec<(usize, usize)>,
    z_table: MlTable,
    y_table: MlTable,
    q_table: MlTable,
    weight: Vec<f64>,
}

impl MildSolver {
    pub fn new(params: FracParams, measure: &SpectralMeasure, grid: Grid) -> Result<Self> {
        params.validate()?;
        if grid.d != params.d {
            return domain("grid dimension does not match params");
        }
        if !(params.gamma < params.beta) {
            return Err(Error::Hypothesis(format!(
                "solver needs gamma < min(beta, d), got gamma = {}, beta = {}",
                params.gamma, params.beta
            )));
        }
        let symbol: SymbolField = build_symbol(measure, params.beta, grid)?;
        let ln_psi = symbol.values.iter().map(|v| v.ln()).collect();
        let mut pairs = Vec::with_capacity(grid.len() / 2 + 1);
        for idx in 0..grid.len() {
            let ix = grid.unravel(idx);
            let mut jx = [0usize; 3];
            for a in 0..grid.d {
                jx[a] = (grid.n - ix[a]) % grid.n;
            }
            let mirror = grid.ravel(&jx);
            if idx <= mirror {
                pairs.push((idx, mirror));
            }
        }
        let a = params.alpha;
        Ok(Self {
            params,
            grid,
            plan: FftPlan::new(grid),
            ln_psi,
            pairs,
            z_table: MlTable::new(MlParams::new(a, 1.0)?)?,
            y_table: MlTable::new(MlParams::new(a, a)?)?,
            q_table: MlTable::new(MlParams::new(a, a + 1.0)?)?,
            weight: hardy_weight(&grid, params.gamma)?,
        })
    }

    pub fn params(&self) -> &FracParams {
        &self.params
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn plan(&self) -> &FftPlan {
        &self.plan
    }

    /// Samples of |x|^{-γ} used in the forcing.
    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    fn multiplier(&self, table: &MlTable, shift: f64, scale: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for &(i, j) in &self.pairs {
            let v = scale * table.eval_ln(shift + self.ln_psi[i]);
            out[i] = v;
            out[j] = v;
        }
        out
    }

    /// E_{α,1}(-t^α ψ).
    pub fn z_multiplier(&self, t: f64) -> Vec<f64> {
        self.multiplier(&self.z_table, self.params.alpha * t.ln(), 1.0)
    }

    /// t^{α-1} E_{α,α}(-t^α ψ).
    pub fn y_multiplier(&self, t: f64) -> Vec<f64> {
        let a = self.params.alpha;
        self.multiplier(&self.y_table, a * t.ln(), t.powf(a - 1.0))
    }

    /// τ^α E_{α,α+1}(-τ^α ψ); zero at τ = 0.
    pub fn q_multiplier(&self, tau: f64) -> Vec<f64> {
        if tau <= 0.0 {
            return vec![0.0; self.grid.len()];
        }
        let a = self.params.alpha;
        let m = self.multiplier(&self.q_table, a * tau.ln(), tau.powf(a));
        debug_assert!((m[0] - tau.powf(a) * rgamma(a + 1.0)).abs() <= 1e-12 * m[0]);
        m
    }

    /// S(t)u₀ = Z(t,·) ⋆ u₀.
    pub fn apply_s(&self, u0: &[f64], t: f64) -> Result<Vec<f64>> {
        if !(t > 0.0) {
            return domain(format!("time must be positive, got {t}"));
        }
        self.check_len(u0)?;
        Ok(self.plan.apply_multiplier(u0, &self.z_multiplier(t)))
    }

    /// R(t)(|·|^{-γ} w) = Y(t,·) ⋆ (|·|^{-γ} w).
    pub fn apply_r_hardy(&self, w: &[f64], t: f64) -> Result<Vec<f64>> {
        if !(t > 0.0) {
            return domain(format!("time must be positive, got {t}"));
        }
        self.check_len(w)?;
        let f: Vec<f64> = w.iter().zip(&self.weight).map(|(a, b)| a * b).collect();
        Ok(self.plan.apply_multiplier(&f, &self.y_multiplier(t)))
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.grid.len() {
            return domain(format!("field has {} values, grid has {}", v.len(), self.grid.len()));
        }
        Ok(())
    }

    /// |x|^{-γ}|u|^{p-1}u.
    pub fn forcing(&self, u: &[f64]) -> Vec<f64> {
        let p = self.params.p;
        u.iter()
            .zip(&self.weight)
            .map(|(&v, &w)| w * v.abs().powf(p - 1.0) * v)
            .collect()
    }

    fn local_mass(&self, u: &[f64], radius: Option<f64>) -> f64 {
        let Some(eps) = radius else { return f64::NAN };
        let g = self.grid;
        u.iter()
            .enumerate()
            .filter(|(idx, _)| g.radius(*idx) <= eps)
            .map(|(_, v)| v)
            .sum::<f64>()
            * g.cell_volume()
    }

    /// Solves up to `horizon` from data `u0`.
    pub fn run(&self, u0: &[f64], config: &SolverConfig, horizon: f64) -> Result<Trajectory> {
        config.validate()?;
        self.check_len(u0)?;
        let times = config.mesh.nodes(horizon)?;
        let g = self.grid;
        let q = self.params.q;
        let wexp = Trajectory::weight_exponent(&self.params);
        let mut traj = Trajectory {
            params: self.params,
            grid: g,
            times: vec![0.0],
            states: if config.store_states {
                vec![u0.to_vec()]
            } else {
                Vec::new()
            },
            lq_norms: vec![g.lr_norm(u0, q)],
            weighted_norms: vec![if wexp.is_nan() { f64::NAN } else { 0.0 }],
            sup_norms: vec![g.lr_norm(u0, f64::INFINITY)],
            local_masses: vec![self.local_mass(u0, config.probe_radius)],
            picard_iters: vec![0],
            status: RunStatus::Completed,
            nonlinear: config.nonlinear,
        };
        let u0_hat = self.plan.forward_real(u0);
        let mut forcing_hat: Vec<Vec<Complex64>> = Vec::new();
        let mut prev = u0.to_vec();
        let n_all = g.len();
        for n in 1..times.len() {
            let tn = times[n];
            let z = self.z_multiplier(tn);
            let mut known: Vec<Complex64> = u0_hat.iter().zip(&z).map(|(c, m)| c * m).collect();
            let mut current = vec![0.0; n_all];
            let mut iters = 0;
            if config.nonlinear {
                // History: Σ_{j<n} [Q(t_n - t_{j-1}) - Q(t_n - t_j)] F̂_j.
                let mut q_hi = self.q_multiplier(tn - times[0]);
                for (j, fj) in forcing_hat.iter().enumerate() {
                    let q_lo = self.q_multiplier(tn - times[j + 1]);
                    for k in 0..n_all {
                        known[k] += fj[k] * (q_hi[k] - q_lo[k]);
                    }
                    q_hi = q_lo;
                }
                // q_hi is now Q(t_n - t_{n-1}).
                let q_now = q_hi;
                let mut u = prev.clone();
                let mut converged = false;
                while iters < config.max_picard {
                    iters += 1;
                    let mut spec = self.plan.forward_real(&self.forcing(&u));
                    for k in 0..n_all {
                        spec[k] = known[k] + spec[k] * q_now[k];
                    }
                    self.plan.inverse(&mut spec);
                    let next: Vec<f64> = spec.iter().map(|c| c.re).collect();
                    let diff: Vec<f64> = next.iter().zip(&u).map(|(a, b)| a - b).collect();
                    let size = g.lr_norm(&next, q);
                    let change = g.lr_norm(&diff, q);
                    u = next;
                    if !size.is_finite() || size > config.overflow {
                        traj.status = RunStatus::NormOverflow(n);
                        return Ok(traj);
                    }
                    if change <= config.picard_tol * size {
                        converged = true;
                        break;
                    }
                }
                if !converged {
                    traj.status = RunStatus::PicardDiverged(n);
                    return Ok(traj);
                }
                forcing_hat.push(self.plan.forward_real(&self.forcing(&u)));
                current = u;
            } else {
                self.plan.inverse(&mut known);
                for (c, k) in current.iter_mut().zip(&known) {
                    *c = k.re;
                }
            }
            let norm = g.lr_norm(&current, q);
            if !norm.is_finite() || norm > config.overflow {
                traj.status = RunStatus::NormOverflow(n);
                return Ok(traj);
            }
            traj.times.push(tn);
            traj.lq_norms.push(norm);
            traj.weighted_norms.push(tn.powf(wexp) * norm);
            traj.sup_norms.push(g.lr_norm(&current, f64::INFINITY));
            traj.local_masses.push(self.local_mass(&current, config.probe_radius));
            traj.picard_iters.push(iters);
            if config.store_states {
                traj.states.push(current.clone());
            }
            prev = current;
        }
        Ok(traj)
    }
}

/// Builds the solver and samples the data, then runs to `horizon`.
pub fn run(
    initial: &InitialData,
    params: FracParams,
    measure: &SpectralMeasure,
    grid: Grid,
    config: &SolverConfig,
    horizon: f64,
) -> Result<Trajectory> {
    let solver = MildSolver::new(params, measure, grid)?;
    let u0 = initial.sample(&grid, &params)?;
    solver.run(&u0, config, horizon)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSample {
    pub t: f64,
    /// M t^{-ηρ}, the largest φ the bound allows at this time.
    pub phi: f64,
    /// min of z(t,·) over the grid nodes in t^{α/β} ≤ |x| ≤ t^ρ.
    pub min_on_annulus: f64,
    pub nodes: usize,
}

/// Lower bound of z = S(t)u₀ for u₀ = |x|^{-η} on B(R).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub eta: f64,
    pub rho: f64,
    /// min of z(t,x̂) over unit-sphere nodes and sampled t ∈ [0, 1].
    pub m: f64,
    pub samples: Vec<AnnulusSample>,
}

impl LowerBoundReport {
    /// Every annulus holds nodes and z ≥ φ on them up to `rel_tol`.
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.samples
            .iter()
            .all(|s| s.nodes > 0 && s.min_on_annulus >= s.phi * (1.0 - rel_tol))
    }
}

/// Checks z(t,x) ≥ M t^{-ηρ} on t^{α/β} ≤ |x| ≤ t^ρ at each of `times`
/// in (0, 1). M is sampled at t = 0, at `times` and at 64 log-spaced times
/// in [1e-4, 1].
pub fn lower_bound_check(
    solver: &MildSolver,
    eta: f64,
    radius: f64,
    rho: f64,
    times: &[f64],
) -> Result<LowerBoundReport> {
    let params = *solver.params();
    let grid = solver.grid();
    let ab = params.alpha / params.beta;
    if !(eta > 0.0 && eta < params.df()) {
        return domain(format!("eta must lie in (0, d), got {eta}"));
    }
    if !(rho > 0.0 && rho < ab) {
        return domain(format!("rho must lie in (0, alpha/beta), got {rho}"));
    }
    if times.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
        return domain("check times must lie in (0, 1)");
    }
    let u0 = InitialData::TruncatedPower { eta, radius }.sample(&grid, &params)?;
    let sphere: Vec<usize> = (0..grid.len())
        .filter(|&i| (grid.radius(i) - 1.0).abs() <= 0.5 * grid.h)
        .collect();
    if sphere.is_empty() {
        return domain("grid has no nodes on the unit sphere");
    }
    let on_sphere = |z: &[f64]| sphere.iter().map(|&i| z[i]).fold(f64::INFINITY, f64::min);
    let mut m = on_sphere(&u0);
    let mut sample_times: Vec<f64> = (0..64).map(|k| 1e-4 * 1e4f64.powf(k as f64 / 63.0)).collect();
    sample_times.extend_from_slice(times);
    let mut fields = Vec::with_capacity(times.len());
    for (k, &t) in sample_times.iter().enumerate() {
        let z = solver.apply_s(&u0, t)?;
        m = m.min(on_sphere(&z));
        if k >= 64 {
            fields.push(z);
        }
    }
    let samples = times
        .iter()
        .zip(&fields)
        .map(|(&t, z)| {
            let (lo, hi) = (t.powf(ab), t.powf(rho));
            let vals: Vec<f64> = (0..grid.len())
                .filter(|&i| (lo..=hi).contains(&grid.radius(i)))
                .map(|i| z[i])
                .collect();
            AnnulusSample {
                t,
                phi: m * t.powf(-eta * rho),
                min_on_annulus: vals.iter().copied().fold(f64::INFINITY, f64::min),
                nodes: vals.len(),
            }
        })
        .collect();
    Ok(LowerBoundReport { eta, rho, m, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (MildSolver, FracParams) {
        let p = FracParams::new(1, 0.5, 1.0, 0.25, 3.0, 3.5).unwrap();
        let g = Grid::new(1, 512, 0.1).unwrap();
        let m = SpectralMeasure::isotropic_unit(1, 1.0).unwrap();
        (MildSolver::new(p, &m, g).unwrap(), p)
    }

    #[test]
    fn delta_gives_kernel() {
        let (s, _) = setup();
        let g = s.grid();
        let mut delta = vec![0.0; g.len()];
        delta[0] = 1.0 / g.h;
        let z = s.apply_s(&delta, 1.0).unwrap();
        assert!((g.integrate(&z) - 1.0).abs() < 1e-12);
        // Y(1,·) has mass 1/Γ(α).
        let y = s.apply_r_hardy(&vec![1.0; g.len()], 1.0).unwrap();
        let want = 0.564_189_583_547_756_3 * g.integrate(s.weight());
        assert!((g.integrate(&y) - want).abs() < 1e-12 * want);
    }

    #[test]
    fn q_is_time_integral_of_y() {
        let (s, _) = setup();
        // Q(τ) = ∫_0^τ Y(s) ds at one nonzero frequency, by Gauss-Kronrod
        // in s = τ v² to remove the s^{α-1} singularity.
        let tau = 0.7;
        let k = 5;
        let want = crate::quad::integrate(
            |v| 2.0 * tau * v * s.y_multiplier(tau * v * v)[k],
            0.0,
            1.0,
            &[],
            1e-14,
            1e-12,
            200,
        )
        .value;
        assert!((s.q_multiplier(tau)[k] - want).abs() < 1e-10 * want);
    }

    #[test]
    fn zero_data_stays_zero() {
        let (s, _) = setup();
        let cfg = SolverConfig::new(TimeMesh::graded(8, 0.5));
        let tr = s.run(&vec![0.0; s.grid().len()], &cfg, 1.0).unwrap();
        assert!(tr.status.completed());
        assert!(tr.lq_norms.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_run_is_s() {
        let (s, p) = setup();
        let g = s.grid();
        let u0 = InitialData::GaussianBump {
            amplitude: 1.0,
            width: 1.0,
            offset: 0.0,
        }
        .sample(&g, &p)
        .unwrap();
        let mut cfg = SolverConfig::new(TimeMesh::Uniform { steps: 4 });
        cfg.nonlinear = false;
        let tr = s.run(&u0, &cfg, 2.0).unwrap();
        let direct = s.apply_s(&u0, 2.0).unwrap();
        for (a, b) in tr.final_state().unwrap().iter().zip(&direct) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
        }
    }

    #[test]
    fn mesh_nodes() {
        let t = TimeMesh::Graded { steps: 4, grading: 2.0 }.nodes(16.0).unwrap();
        assert_eq!(t, vec![0.0, 1.0, 4.0, 9.0, 16.0]);
        assert!(TimeMesh::Graded { steps: 4, grading: 0.5 }.nodes(1.0).is_err());
    }

    #[test]
    fn singular_data_lower_bound() {
        let p = FracParams::new(1, 0.9, 1.0, 0.25, 4.0, 1.0).unwrap();
        let g = Grid::new(1, 1 << 16, 1e-3).unwrap();
        let m = SpectralMeasure::isotropic_unit(1, 1.0).unwrap();
        let s = MildSolver::new(p, &m, g).unwrap();
        let times = [1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3];
        let rep = lower_bound_check(&s, 0.6, 2.0, 0.8, &times).unwrap();
        assert!(rep.m > 0.0);
        assert!(rep.holds(0.0));
    }
}
