//! Batch experiments: declarative TOML configs, dispatch to the kernel,
//! solver and regime layers, CSV/JSON artifacts and a run manifest.
//!
//! Every CSV row starts with the config hash, numbers are printed with 12
//! significant digits, and `manifest.json` is written last.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernels::{
    comparison, compute_auto, lr_norm_scaling, two_sided_fit, EstimateCase, KernelField, KernelKind, Regime as Field,
};
use crate::mild_solver::{InitialData, MildSolver, SolverConfig, TimeMesh, Trajectory};
use crate::params::FracParams;
use crate::regimes::{
    asymptotic_profile_check, blowup_experiment, classify, decay_fit, small_data_search, weighted_norm_bound,
    BlowupConfig, BlowupVerdict, Regime, DIVERGENCE_GROWTH,
};
use crate::symbol::{build_symbol, SpectralMeasure};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.toml";

/// Uniform grid with `n` nodes per axis and spacing `h`; the dimension comes
/// from the parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub h: f64,
}

impl GridSpec {
    pub fn build(&self, d: usize) -> Result<Grid> {
        Grid::new(d, self.n, self.h)
    }
}

/// Inclusive range `from..=to` with `count` equally spaced points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.from],
            n => (0..n)
                .map(|i| {
                    if i == n - 1 {
                        self.to
                    } else {
                        self.from + (self.to - self.from) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSuiteSpec {
    pub times: Vec<f64>,
    /// Cells per kernel scale t^{α/β} for the profile and fit fields.
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    /// Fixed grid for the L_r scaling table.
    pub lr_grid: GridSpec,
    #[serde(default = "default_norms")]
    pub norms: Vec<f64>,
    #[serde(default = "default_slope_tolerance")]
    pub slope_tolerance: f64,
    /// Largest accepted C/c in the two-sided fits.
    #[serde(default = "default_max_spread")]
    pub max_spread: f64,
    /// Randomly placed pointwise probes per kernel field.
    #[serde(default)]
    pub probes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverRunSpec {
    pub grid: GridSpec,
    pub initial: InitialData,
    pub solver: SolverConfig,
    pub horizon: f64,
    /// Extra runs with the step count doubled each time.
    #[serde(default)]
    pub refinements: usize,
    /// Relative change of the final L_q norm accepted between refinements.
    #[serde(default = "default_convergence_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub dump_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayStudySpec {
    pub grid: GridSpec,
    /// Truncation radius of the critical power data.
    pub radius: f64,
    pub steps: usize,
    pub horizon: f64,
    pub window: [f64; 2],
    #[serde(default = "one")]
    pub start_amplitude: f64,
    #[serde(default = "default_halvings")]
    pub max_halvings: usize,
    #[serde(default = "default_rate_tolerance")]
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileStudySpec {
    pub grid: GridSpec,
    pub initial: InitialData,
    pub steps: usize,
    pub horizon: f64,
    pub window: [f64; 2],
    #[serde(default = "one")]
    pub r: f64,
    #[serde(default = "yes")]
    pub nonlinear: bool,
    /// Time of the error-to-norm check in nonlinear runs.
    #[serde(default = "default_check_time")]
    pub check_time: f64,
    #[serde(default = "default_max_ratio")]
    pub max_ratio: f64,
    #[serde(default = "default_rate_tolerance")]
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupStudySpec {
    pub ladder: BlowupConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<BlowupVerdict>,
}

/// Sweeps over any of α, β, γ, p, q; unswept values come from `params`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AtlasSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Sweep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Experiment {
    KernelSuite(KernelSuiteSpec),
    SolverRun(SolverRunSpec),
    DecayStudy(DecayStudySpec),
    ProfileStudy(ProfileStudySpec),
    BlowupStudy(BlowupStudySpec),
    Atlas(AtlasSpec),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::KernelSuite(_) => "KernelSuite",
            Experiment::SolverRun(_) => "SolverRun",
            Experiment::DecayStudy(_) => "DecayStudy",
            Experiment::ProfileStudy(_) => "ProfileStudy",
            Experiment::BlowupStudy(_) => "BlowupStudy",
            Experiment::Atlas(_) => "Atlas",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub params: FracParams,
    /// Defaults to the isotropic measure with ω ≡ 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<SpectralMeasure>,
    pub experiment: Experiment,
}

fn default_resolution() -> f64 {
    16.0
}
fn default_norms() -> Vec<f64> {
    vec![2.0]
}
fn default_slope_tolerance() -> f64 {
    0.02
}
fn default_max_spread() -> f64 {
    100.0
}
fn default_convergence_tolerance() -> f64 {
    0.01
}
fn default_rate_tolerance() -> f64 {
    0.1
}
fn default_halvings() -> usize {
    6
}
fn default_check_time() -> f64 {
    50.0
}
fn default_max_ratio() -> f64 {
    0.5
}
fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config_err(e.to_string()))
    }

    pub fn measure(&self) -> Result<SpectralMeasure> {
        match &self.measure {
            Some(m) => Ok(m.clone()),
            None => SpectralMeasure::isotropic_unit(self.params.d, self.params.beta),
        }
    }

    /// SHA-256 of the canonical TOML form, with the output directory left out.
    pub fn hash(&self) -> Result<String> {
        let mut canonical = self.clone();
        canonical.output = None;
        let digest = Sha256::digest(canonical.to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    /// Checks every parameter against its module invariants without running
    /// anything expensive.
    pub fn validate(&self) -> Result<()> {
        let params = self.params;
        params.validate()?;
        let measure = self.measure()?;
        measure.validate()?;
        if measure.dimension() != params.d {
            return Err(config_err(format!(
                "measure lives in dimension {}, params have d = {}",
                measure.dimension(),
                params.d
            )));
        }
        let positive = |name: &str, v: f64| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(config_err(format!("{name} must be positive, got {v}")))
            }
        };
        let window = |w: [f64; 2], horizon: f64| -> Result<()> {
            if !(w[0] > 0.0 && w[0] < w[1] && w[1] <= horizon) {
                return Err(config_err(format!(
                    "window {w:?} must satisfy 0 < a < b <= horizon {horizon}"
                )));
            }
            Ok(())
        };
        let solver_params = || -> Result<()> {
            if !(params.gamma < params.beta) {
                return Err(Error::Hypothesis(format!(
                    "gamma < beta is required by the solver, got gamma = {}, beta = {}",
                    params.gamma, params.beta
                )));
            }
            Ok(())
        };
        match &self.experiment {
            Experiment::KernelSuite(s) => {
                if s.times.len() < 2 {
                    return Err(config_err("kernel suite needs at least two times"));
                }
                for &t in &s.times {
                    positive("time", t)?;
                }
                positive("resolution", s.resolution)?;
                positive("slope tolerance", s.slope_tolerance)?;
                positive("max spread", s.max_spread)?;
                for &r in &s.norms {
                    if !(r >= 1.0) {
                        return Err(config_err(format!("norm index must be at least 1, got {r}")));
                    }
                }
                s.lr_grid.build(params.d)?;
            }
            Experiment::SolverRun(s) => {
                solver_params()?;
                positive("horizon", s.horizon)?;
                positive("tolerance", s.tolerance)?;
                s.solver.validate()?;
                s.solver.mesh.nodes(s.horizon)?;
                let grid = s.grid.build(params.d)?;
                s.initial.sample(&grid, &params)?;
                if !s.dump_times.is_empty() && !s.solver.store_states {
                    return Err(config_err("dump_times needs store_states = true"));
                }
            }
            Experiment::DecayStudy(s) => {
                solver_params()?;
                params.critical_exponent()?;
                positive("horizon", s.horizon)?;
                positive("radius", s.radius)?;
                positive("start amplitude", s.start_amplitude)?;
                window(s.window, s.horizon)?;
                if s.steps == 0 {
                    return Err(config_err("need at least one time step"));
                }
                s.grid.build(params.d)?;
            }
            Experiment::ProfileStudy(s) => {
                solver_params()?;
                positive("horizon", s.horizon)?;
                positive("max ratio", s.max_ratio)?;
                window(s.window, s.horizon)?;
                if s.steps == 0 {
                    return Err(config_err("need at least one time step"));
                }
                if !(s.r >= 1.0) {
                    return Err(config_err(format!("r must be at least 1, got {}", s.r)));
                }
                let grid = s.grid.build(params.d)?;
                s.initial.sample(&grid, &params)?;
            }
            Experiment::BlowupStudy(s) => {
                solver_params()?;
                let c = &s.ladder;
                if c.levels == 0 || c.base_steps == 0 {
                    return Err(config_err("ladder needs at least one level and one step"));
                }
                positive("horizon", c.horizon)?;
                positive("extent", c.extent)?;
                positive("epsilon", c.epsilon)?;
                Grid::with_extent(params.d, c.base_n, c.extent)?;
            }
            Experiment::Atlas(s) => {
                for sweep in [s.alpha, s.beta, s.gamma, s.p, s.q].into_iter().flatten() {
                    if sweep.count == 0 {
                        return Err(config_err("sweep count must be positive"));
                    }
                }
                for point in atlas_points(&params, s) {
                    point.validate()?;
                }
            }
        }
        Ok(())
    }
}

fn atlas_points(base: &FracParams, spec: &AtlasSpec) -> Vec<FracParams> {
    let axis = |s: Option<Sweep>, v: f64| s.map(|s| s.points()).unwrap_or_else(|| vec![v]);
    let mut out = Vec::new();
    for &alpha in &axis(spec.alpha, base.alpha) {
        for &beta in &axis(spec.beta, base.beta) {
            for &gamma in &axis(spec.gamma, base.gamma) {
                for &p in &axis(spec.p, base.p) {
                    for &q in &axis(spec.q, base.q) {
                        out.push(FracParams {
                            alpha,
                            beta,
                            gamma,
                            p,
                            q,
                            ..*base
                        });
                    }
                }
            }
        }
    }
    out
}

/// Overrides from the command line.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    /// Size of the worker pool; 0 means one worker.
    pub workers: usize,
    pub seed: Option<u64>,
    /// Treat warnings as failures.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    /// Path relative to the output directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub name: String,
    pub kind: String,
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    pub workers: usize,
    pub strict: bool,
    pub files: Vec<Artifact>,
    pub timings: Vec<StageTiming>,
    pub total_seconds: f64,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub passed: bool,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let path = if path.is_dir() {
            path.join(MANIFEST_FILE)
        } else {
            path.to_path_buf()
        };
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn failing(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.11e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

fn num(v: f64) -> Cell {
    Cell::Num(v)
}

fn int(v: usize) -> Cell {
    Cell::Int(v as i64)
}

fn text(v: impl ToString) -> Cell {
    Cell::Text(v.to_string())
}

fn opt(v: Option<f64>) -> Cell {
    v.map(num).unwrap_or_else(|| text(""))
}

/// Output directory bookkeeping: every file written goes through here.
struct Run {
    dir: PathBuf,
    hash: String,
    files: Vec<String>,
    checks: Vec<Check>,
    warnings: Vec<String>,
    timings: Vec<StageTiming>,
}

impl Run {
    fn table(&mut self, name: &str, header: &[&str], rows: Vec<Vec<Cell>>) -> Result<()> {
        let mut w = csv::Writer::from_path(self.dir.join(name)).map_err(io_err)?;
        let mut head = vec!["config_hash"];
        head.extend_from_slice(header);
        w.write_record(&head).map_err(io_err)?;
        for row in rows {
            let mut rec = vec![self.hash.clone()];
            rec.extend(row.iter().map(Cell::render));
            w.write_record(&rec).map_err(io_err)?;
        }
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        fs::write(self.dir.join(name), serde_json::to_string_pretty(value)?)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn adopt(&mut self, path: &Path) {
        let rel = path.strip_prefix(&self.dir).unwrap_or(path);
        self.files.push(rel.to_string_lossy().into_owned());
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    fn timed<T>(&mut self, stage: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self);
        self.timings.push(StageTiming {
            stage: stage.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| config_err(e.to_string()))
}

/// Validates `config`, runs it and writes all artifacts under the output
/// directory. Check failures are reported in the manifest, not as errors.
pub fn run_experiment(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunManifest> {
    let start = Instant::now();
    let mut config = config.clone();
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    config.validate()?;
    let dir = opts
        .out
        .clone()
        .or_else(|| config.output.clone())
        .ok_or_else(|| config_err("no output directory: set `output` or pass --out"))?;
    fs::create_dir_all(&dir)?;
    let marker = dir.join(MANIFEST_FILE);
    if marker.exists() {
        fs::remove_file(&marker)?;
    }
    let mut run = Run {
        dir,
        hash: config.hash()?,
        files: Vec::new(),
        checks: Vec::new(),
        warnings: Vec::new(),
        timings: Vec::new(),
    };
    fs::write(run.dir.join(CONFIG_FILE), config.to_toml()?)?;
    run.files.push(CONFIG_FILE.to_string());

    let workers = opts.workers.max(1);
    let pool = pool(workers)?;
    let measure = config.measure()?;
    let params = config.params;
    match &config.experiment {
        Experiment::KernelSuite(s) => kernel_suite(&mut run, &pool, &params, &measure, s, config.seed)?,
        Experiment::SolverRun(s) => solver_run(&mut run, &pool, &params, &measure, s)?,
        Experiment::DecayStudy(s) => decay_study(&mut run, &params, &measure, s)?,
        Experiment::ProfileStudy(s) => profile_study(&mut run, &params, &measure, s)?,
        Experiment::BlowupStudy(s) => blowup_study(&mut run, &params, &measure, s)?,
        Experiment::Atlas(s) => atlas(&mut run, &pool, &params, s)?,
    }

    let mut files = Vec::with_capacity(run.files.len());
    for rel in &run.files {
        let bytes = fs::read(run.dir.join(rel))?;
        files.push(Artifact {
            path: rel.clone(),
            bytes: bytes.len() as u64,
            sha256: Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect(),
        });
    }
    let passed = run.checks.iter().all(|c| c.passed) && !(opts.strict && !run.warnings.is_empty());
    let manifest = RunManifest {
        name: config.name.clone(),
        kind: config.experiment.kind().to_string(),
        config_hash: run.hash.clone(),
        seed: config.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        workers,
        strict: opts.strict,
        files,
        timings: run.timings,
        total_seconds: start.elapsed().as_secs_f64(),
        checks: run.checks,
        warnings: run.warnings,
        passed,
    };
    fs::write(marker, serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

/// Nodes of a radial profile kept for output: the first 64, then a
/// geometric subset.
fn thinned(profile: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut next = 0.0f64;
    for (j, &pt) in profile.iter().enumerate() {
        if j < 64 || j as f64 >= next {
            out.push(pt);
            next = (j as f64 * 1.05).max(j as f64 + 1.0);
        }
    }
    out
}

fn kernel_suite(
    run: &mut Run,
    pool: &rayon::ThreadPool,
    params: &FracParams,
    measure: &SpectralMeasure,
    spec: &KernelSuiteSpec,
    seed: u64,
) -> Result<()> {
    let (alpha, beta, d) = (params.alpha, params.beta, params.d);
    let jobs: Vec<(KernelKind, f64)> = [KernelKind::Z, KernelKind::Y]
        .into_iter()
        .flat_map(|k| spec.times.iter().map(move |&t| (k, t)))
        .collect();
    let fields: Vec<Result<KernelField>> = run.timed("kernel fields", |_| {
        Ok(pool.install(|| {
            jobs.par_iter()
                .map(|&(k, t)| compute_auto(measure, alpha, beta, t, k, spec.resolution))
                .collect()
        }))
    })?;

    let mut radial = Vec::new();
    let mut fits = Vec::new();
    let mut probes = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (&(which, t), field) in jobs.iter().zip(&fields) {
        let field = match field {
            Ok(f) => f,
            Err(e) => {
                run.check(format!("kernel {which}({t})"), false, e.to_string());
                continue;
            }
        };
        run.check(
            format!("kernel {which}({t})"),
            true,
            format!("mass {:.6e}, ratio {:.3e}", field.mass(), field.truncation_ratio()),
        );
        for (r, v) in thinned(&field.radial_profile()) {
            radial.push(vec![text(which), num(t), num(r), num(v)]);
        }
        for rep in two_sided_fit(field) {
            let regime = match rep.regime {
                Field::NearField => "near",
                Field::FarField => "far",
            };
            let case = match rep.case {
                EstimateCase::Below => "below",
                EstimateCase::Critical => "critical",
                EstimateCase::Above => "above",
            };
            let name = format!("two-sided {which}({t}) {regime}");
            if rep.skipped {
                run.warn(format!("{name}: no nodes in regime"));
            } else {
                let ok = rep.passed() && rep.spread() <= spec.max_spread;
                run.check(
                    name,
                    ok,
                    format!(
                        "c = {:.4e}, C = {:.4e}, C/c = {:.3}",
                        rep.lower,
                        rep.upper,
                        rep.spread()
                    ),
                );
            }
            fits.push(vec![
                text(which),
                num(t),
                text(regime),
                text(case),
                num(rep.lower),
                num(rep.upper),
                num(rep.spread()),
                int(rep.samples),
                num(rep.max_relative_violation),
                text(rep.skipped),
            ]);
        }
        let g = field.grid;
        let floor = 1e-10 * field.peak();
        for _ in 0..spec.probes {
            let mut idx = rng.gen_range(0..g.len());
            for _ in 0..1000 {
                if field.values[idx] > floor && g.radius(idx) > 0.0 {
                    break;
                }
                idx = rng.gen_range(0..g.len());
            }
            let x = g.point(idx);
            let r = g.radius(idx);
            let omega = r.powf(beta) * t.powf(-alpha);
            let cmp = comparison(which, d, alpha, beta, t, omega);
            probes.push(vec![
                text(which),
                num(t),
                num(x[0]),
                num(x[1]),
                num(x[2]),
                num(field.values[idx]),
                num(cmp),
                num(field.values[idx] / cmp),
            ]);
        }
    }
    run.table("radial_profiles.csv", &["kernel", "t", "r", "value"], radial)?;
    run.table(
        "two_sided_fit.csv",
        &[
            "kernel",
            "t",
            "regime",
            "case",
            "lower",
            "upper",
            "spread",
            "samples",
            "max_relative_violation",
            "skipped",
        ],
        fits,
    )?;
    if spec.probes > 0 {
        run.table(
            "probes.csv",
            &["kernel", "t", "x1", "x2", "x3", "value", "comparison", "ratio"],
            probes,
        )?;
    }

    let grid = spec.lr_grid.build(d)?;
    let symbol = build_symbol(measure, beta, grid)?;
    let mut slopes = Vec::new();
    let mut norms = Vec::new();
    let scalings: Vec<(KernelKind, f64, Result<_>)> = run.timed("lr scaling", |_| {
        let jobs: Vec<(KernelKind, f64)> = [KernelKind::Z, KernelKind::Y]
            .into_iter()
            .flat_map(|k| spec.norms.iter().map(move |&r| (k, r)))
            .collect();
        Ok(pool.install(|| {
            jobs.par_iter()
                .map(|&(k, r)| (k, r, lr_norm_scaling(&symbol, alpha, k, r, &spec.times)))
                .collect()
        }))
    })?;
    for (which, r, rep) in scalings {
        match rep {
            Ok(rep) => {
                let err = rep.relative_error();
                run.check(
                    format!("L_{r} slope of {which}"),
                    err <= spec.slope_tolerance,
                    format!("slope {:.6}, predicted {:.6}", rep.slope, rep.predicted),
                );
                slopes.push(vec![text(which), num(r), num(rep.slope), num(rep.predicted), num(err)]);
                for (t, v) in rep.times.iter().zip(&rep.norms) {
                    norms.push(vec![text(which), num(r), num(*t), num(*v)]);
                }
            }
            Err(e @ Error::NotIntegrable { .. }) => run.warn(format!("L_{r} norm of {which} skipped: {e}")),
            Err(e) => run.check(format!("L_{r} slope of {which}"), false, e.to_string()),
        }
    }
    run.table(
        "lr_slopes.csv",
        &["kernel", "r", "slope", "predicted", "relative_error"],
        slopes,
    )?;
    run.table("lr_norms.csv", &["kernel", "r", "t", "norm"], norms)?;
    Ok(())
}

fn trajectory_rows(tr: &Trajectory) -> Vec<Vec<Cell>> {
    (0..tr.times.len())
        .map(|i| {
            vec![
                num(tr.times[i]),
                num(tr.lq_norms[i]),
                num(tr.weighted_norms[i]),
                num(tr.sup_norms[i]),
                num(tr.local_masses[i]),
                int(tr.picard_iters[i]),
            ]
        })
        .collect()
}

const TRAJECTORY_HEADER: [&str; 6] = [
    "t",
    "lq_norm",
    "weighted_norm",
    "sup_norm",
    "local_mass",
    "picard_iters",
];

fn status_text(tr: &Trajectory) -> String {
    serde_json::to_string(&tr.status).unwrap_or_default()
}

fn solver_run(
    run: &mut Run,
    pool: &rayon::ThreadPool,
    params: &FracParams,
    measure: &SpectralMeasure,
    spec: &SolverRunSpec,
) -> Result<()> {
    let grid = spec.grid.build(params.d)?;
    let solver = MildSolver::new(*params, measure, grid)?;
    let u0 = spec.initial.sample(&grid, params)?;
    let configs: Vec<SolverConfig> = (0..=spec.refinements)
        .map(|k| SolverConfig {
            mesh: spec.solver.mesh.refined(1 << k),
            ..spec.solver.clone()
        })
        .collect();
    let runs: Vec<(Result<Trajectory>, f64)> = run.timed("solver runs", |_| {
        Ok(pool.install(|| {
            configs
                .par_iter()
                .map(|c| {
                    let start = Instant::now();
                    (solver.run(&u0, c, spec.horizon), start.elapsed().as_secs_f64())
                })
                .collect()
        }))
    })?;
    let mut finals = Vec::new();
    for (k, (tr, secs)) in runs.into_iter().enumerate() {
        run.timings.push(StageTiming {
            stage: format!("run level {k}"),
            seconds: secs,
        });
        let tr = tr?;
        let name = if k == 0 {
            "trajectory.csv".to_string()
        } else {
            format!("trajectory_{k}.csv")
        };
        run.table(&name, &TRAJECTORY_HEADER, trajectory_rows(&tr))?;
        run.check(
            format!("run completed (level {k})"),
            tr.status.completed(),
            format!("status {}, {} steps", status_text(&tr), configs[k].mesh.steps()),
        );
        if k == 0 && !spec.dump_times.is_empty() {
            for path in tr.dump_states(&run.dir, &spec.dump_times)? {
                run.adopt(&path);
            }
        }
        finals.push(tr.lq_norms.last().copied().unwrap_or(f64::NAN));
    }
    for k in 1..finals.len() {
        let change = ((finals[k] - finals[k - 1]) / finals[k - 1]).abs();
        run.check(
            format!("self-convergence (level {} vs {k})", k - 1),
            change <= spec.tolerance,
            format!("final L_q change {change:.3e}"),
        );
    }
    Ok(())
}

fn decay_study(run: &mut Run, params: &FracParams, measure: &SpectralMeasure, spec: &DecayStudySpec) -> Result<()> {
    let grid = spec.grid.build(params.d)?;
    let solver = MildSolver::new(*params, measure, grid)?;
    let mut config = SolverConfig::new(TimeMesh::graded(spec.steps, params.alpha));
    config.store_states = false;
    let radius = spec.radius;
    let search = run.timed("small-data search", |_| {
        small_data_search(
            &solver,
            |amplitude| InitialData::ScaledCriticalPower { amplitude, radius },
            &config,
            spec.horizon,
            spec.start_amplitude,
            spec.max_halvings,
        )
    });
    let search = match search {
        Ok(s) => s,
        Err(e @ Error::Hypothesis(_)) => {
            run.check("small data found", false, e.to_string());
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    let tr = &search.trajectory;
    run.table(
        "search.csv",
        &["amplitude", "completed", "bounded"],
        search
            .attempts
            .iter()
            .map(|a| vec![num(a.amplitude), text(a.completed), text(a.bounded)])
            .collect(),
    )?;
    run.table("trajectory.csv", &TRAJECTORY_HEADER, trajectory_rows(tr))?;
    run.check(
        "small-data run completed",
        tr.status.completed(),
        format!("amplitude {:.4e}, status {}", search.amplitude, status_text(tr)),
    );
    let fit = decay_fit(tr, (spec.window[0], spec.window[1]))?;
    let bound = weighted_norm_bound(tr, spec.horizon / 100.0)?;
    run.check(
        "decay rate",
        fit.relative_error() <= spec.tolerance,
        format!("slope {:.6}, predicted {:.6}", fit.slope, fit.predicted),
    );
    run.check(
        "weighted norm bounded",
        bound.bounded,
        format!("sup {:.6e}, reference {:.6e}", bound.sup, bound.reference),
    );
    run.table(
        "decay_fit.csv",
        &[
            "amplitude",
            "window_start",
            "window_end",
            "points",
            "slope",
            "predicted",
            "relative_error",
            "weighted_sup",
            "weighted_reference",
        ],
        vec![vec![
            num(search.amplitude),
            num(fit.window.0),
            num(fit.window.1),
            int(fit.points),
            num(fit.slope),
            num(fit.predicted),
            num(fit.relative_error()),
            num(bound.sup),
            num(bound.reference),
        ]],
    )?;
    Ok(())
}

fn profile_study(run: &mut Run, params: &FracParams, measure: &SpectralMeasure, spec: &ProfileStudySpec) -> Result<()> {
    let grid = spec.grid.build(params.d)?;
    let solver = MildSolver::new(*params, measure, grid)?;
    let mut config = SolverConfig::new(TimeMesh::graded(spec.steps, params.alpha));
    config.nonlinear = spec.nonlinear;
    let u0 = spec.initial.sample(&grid, params)?;
    let tr = run.timed("solver run", |_| solver.run(&u0, &config, spec.horizon))?;
    run.table("trajectory.csv", &TRAJECTORY_HEADER, trajectory_rows(&tr))?;
    run.check(
        "run completed",
        tr.status.completed(),
        format!("status {}", status_text(&tr)),
    );
    if !tr.status.completed() {
        return Ok(());
    }
    let rep = match asymptotic_profile_check(&solver, &tr, (spec.window[0], spec.window[1]), spec.r) {
        Ok(r) => r,
        Err(e @ Error::Hypothesis(_)) => {
            run.check("profile hypotheses", false, e.to_string());
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    run.table(
        "profile.csv",
        &["t", "error", "norm"],
        (0..rep.times.len())
            .map(|i| vec![num(rep.times[i]), num(rep.errors[i]), num(rep.norms[i])])
            .collect(),
    )?;
    run.table(
        "profile_constants.csv",
        &[
            "a",
            "b",
            "b_tail",
            "forcing_slope",
            "fitted_slope",
            "linear_slope",
            "reference_slope",
        ],
        vec![vec![
            num(rep.a),
            num(rep.b),
            num(rep.b_tail),
            num(rep.forcing_slope),
            num(rep.fitted_slope),
            num(rep.linear_slope),
            num(rep.reference_slope),
        ]],
    )?;
    if spec.nonlinear {
        let (t, err, norm) = rep.at(spec.check_time);
        run.check(
            "profile error against norm",
            err <= spec.max_ratio * norm,
            format!("at t = {t:.4}: error {err:.4e}, norm {norm:.4e}"),
        );
        run.check(
            "profile error beats the decay rate",
            rep.fitted_slope < rep.reference_slope,
            format!(
                "error slope {:.4}, norm rate {:.4}",
                rep.fitted_slope, rep.reference_slope
            ),
        );
    } else {
        let rel = ((rep.fitted_slope - rep.linear_slope) / rep.linear_slope).abs();
        run.check(
            "linear profile rate",
            rel <= spec.tolerance,
            format!("slope {:.6}, predicted {:.6}", rep.fitted_slope, rep.linear_slope),
        );
    }
    Ok(())
}

fn blowup_study(run: &mut Run, params: &FracParams, measure: &SpectralMeasure, spec: &BlowupStudySpec) -> Result<()> {
    let rep = run.timed("ladder", |_| blowup_experiment(params, measure, &spec.ladder))?;
    run.table(
        "ladder.csv",
        &[
            "level",
            "h",
            "steps",
            "completed",
            "divergence_time",
            "last_time",
            "last_mass",
            "reference_time",
            "reference_mass",
            "growth",
        ],
        rep.levels
            .iter()
            .enumerate()
            .map(|(k, l)| {
                vec![
                    int(k),
                    num(l.h),
                    int(l.steps),
                    text(l.completed),
                    opt(l.divergence_time),
                    num(l.last_time),
                    num(l.last_mass),
                    opt(l.reference_time),
                    opt(l.reference_mass),
                    opt(l.growth),
                ]
            })
            .collect(),
    )?;
    run.json("hypotheses.json", &rep.hypotheses)?;
    for c in rep.hypotheses.iter().filter(|c| !c.holds) {
        run.warn(format!("hypothesis fails: {}", c.text));
    }
    let growth: Vec<String> = rep
        .levels
        .iter()
        .filter_map(|l| l.growth)
        .map(|g| format!("{g:.4e}"))
        .collect();
    let detail = format!("verdict {:?}, growth [{}]", rep.verdict, growth.join(", "));
    match spec.expect {
        Some(v) => run.check(format!("blow-up verdict is {v:?}"), rep.verdict == v, detail),
        None => run.check(
            "blow-up verdict conclusive",
            rep.verdict != BlowupVerdict::Inconclusive,
            detail,
        ),
    }
    Ok(())
}

fn atlas(run: &mut Run, pool: &rayon::ThreadPool, base: &FracParams, spec: &AtlasSpec) -> Result<()> {
    let points = atlas_points(base, spec);
    let reports = run.timed("classify", |_| {
        Ok(pool.install(|| points.par_iter().map(classify).collect::<Vec<_>>()))
    })?;
    let mut header = vec![
        "d",
        "alpha",
        "beta",
        "gamma",
        "p",
        "q",
        "q_c",
        "kappa1",
        "kappa2",
        "fujita_exponent",
        "nonexistence_threshold",
    ];
    header.extend(Regime::ALL.iter().map(|r| r.name()));
    let rows = reports
        .iter()
        .map(|rep| {
            let p = rep.params;
            let mut row = vec![
                int(p.d),
                num(p.alpha),
                num(p.beta),
                num(p.gamma),
                num(p.p),
                num(p.q),
                opt(rep.q_c),
                num(rep.kappa1),
                num(rep.kappa2),
                num(rep.fujita_exponent),
                num(rep.nonexistence_threshold),
            ];
            for r in Regime::ALL {
                let v = rep.verdict(r);
                row.push(text(if v.boundary {
                    "boundary"
                } else if v.satisfied {
                    "true"
                } else {
                    "false"
                }));
            }
            row
        })
        .collect();
    run.table("atlas.csv", &header, rows)?;
    run.check(
        "atlas points classified",
        reports.len() == points.len(),
        format!("{} points", points.len()),
    );
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnDiff {
    pub column: String,
    pub max_abs: f64,
    pub max_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDiff {
    pub file: String,
    /// Column rows were matched on, or None for positional matching.
    pub key: Option<String>,
    pub matched_rows: usize,
    pub columns: Vec<ColumnDiff>,
    /// |local_mass| of B over A at A's last row; +∞ when B ended before it.
    pub local_mass_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunComparison {
    pub a: String,
    pub b: String,
    pub tolerance: f64,
    pub files: Vec<FileDiff>,
    /// Every shared numeric value agrees exactly.
    pub identical: bool,
    /// Every norm column agrees within `tolerance` on matched rows.
    pub converged: bool,
    /// Some local-mass ratio reached the divergence growth factor.
    pub divergence_consistent: bool,
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> Result<Table> {
    let mut r = csv::Reader::from_path(path).map_err(io_err)?;
    let header = r.headers().map_err(io_err)?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()).map_err(io_err))
        .collect::<Result<Vec<Vec<String>>>>()?;
    Ok(Table { header, rows })
}

fn parse(s: &str) -> Option<f64> {
    s.parse::<f64>().ok()
}

fn same_value(a: f64, b: f64) -> bool {
    a == b || (a.is_nan() && b.is_nan())
}

fn compare_tables(file: &str, a: &Table, b: &Table) -> Result<FileDiff> {
    if a.header != b.header {
        return Err(Error::Schema(format!(
            "{file}: headers differ ({:?} vs {:?})",
            a.header, b.header
        )));
    }
    let col = |name: &str| a.header.iter().position(|h| h == name);
    let unique = |t: &Table, k: usize| {
        let mut seen = std::collections::BTreeSet::new();
        t.rows.iter().all(|row| seen.insert(row[k].clone()))
    };
    let key = col("t").filter(|&k| unique(a, k) && unique(b, k));
    let pairs: Vec<(usize, usize)> = match key {
        Some(k) => {
            let index: BTreeMap<u64, usize> = b
                .rows
                .iter()
                .enumerate()
                .filter_map(|(j, row)| parse(&row[k]).map(|t| (t.to_bits(), j)))
                .collect();
            a.rows
                .iter()
                .enumerate()
                .filter_map(|(i, row)| parse(&row[k]).and_then(|t| index.get(&t.to_bits()).map(|&j| (i, j))))
                .collect()
        }
        None => {
            if a.rows.len() != b.rows.len() {
                return Err(Error::Schema(format!(
                    "{file}: {} rows vs {} rows and no key column",
                    a.rows.len(),
                    b.rows.len()
                )));
            }
            (0..a.rows.len()).map(|i| (i, i)).collect()
        }
    };
    let mut columns = Vec::new();
    for (c, name) in a.header.iter().enumerate() {
        if name == "config_hash" || Some(c) == key {
            continue;
        }
        let mut max_abs = 0.0f64;
        let mut max_rel = 0.0f64;
        let mut numeric = false;
        let mut textual_mismatch = false;
        for &(i, j) in &pairs {
            match (parse(&a.rows[i][c]), parse(&b.rows[j][c])) {
                (Some(x), Some(y)) => {
                    numeric = true;
                    if same_value(x, y) {
                        continue;
                    }
                    let diff = (x - y).abs();
                    max_abs = max_abs.max(diff);
                    let scale = x.abs().max(y.abs());
                    max_rel = max_rel.max(if scale > 0.0 { diff / scale } else { 0.0 });
                    if diff.is_nan() {
                        max_abs = f64::INFINITY;
                        max_rel = f64::INFINITY;
                    }
                }
                _ => textual_mismatch |= a.rows[i][c] != b.rows[j][c],
            }
        }
        if numeric || textual_mismatch {
            if textual_mismatch {
                max_abs = f64::INFINITY;
                max_rel = f64::INFINITY;
            }
            columns.push(ColumnDiff {
                column: name.clone(),
                max_abs,
                max_rel,
            });
        }
    }
    let local_mass_ratio = match (key, col("local_mass"), a.rows.last()) {
        (Some(k), Some(m), Some(last)) => {
            let t_last = parse(&last[k]).unwrap_or(f64::NAN);
            let mass_a = parse(&last[m]).unwrap_or(f64::NAN).abs();
            let matched = b
                .rows
                .iter()
                .find(|row| parse(&row[k]).map(f64::to_bits) == Some(t_last.to_bits()));
            let b_end = b
                .rows
                .last()
                .and_then(|row| parse(&row[k]))
                .unwrap_or(f64::NEG_INFINITY);
            match matched {
                Some(row) => Some(parse(&row[m]).unwrap_or(f64::NAN).abs() / mass_a),
                None if b_end < t_last => Some(f64::INFINITY),
                None => None,
            }
        }
        _ => None,
    };
    Ok(FileDiff {
        file: file.to_string(),
        key: key.map(|k| a.header[k].clone()),
        matched_rows: pairs.len(),
        columns,
        local_mass_ratio,
    })
}

/// Diffs the CSV artifacts two completed runs share. Rows are matched on
/// the `t` column where there is one, so runs on nested time meshes compare
/// at their common nodes.
pub fn compare_runs(a: &Path, b: &Path, tolerance: f64) -> Result<RunComparison> {
    let ma = RunManifest::load(a)?;
    let mb = RunManifest::load(b)?;
    if ma.kind != mb.kind {
        return Err(Error::Schema(format!(
            "experiment kinds differ: {} vs {}",
            ma.kind, mb.kind
        )));
    }
    let dir = |p: &Path| {
        if p.is_dir() {
            p.to_path_buf()
        } else {
            p.parent().map(Path::to_path_buf).unwrap_or_default()
        }
    };
    let (da, db) = (dir(a), dir(b));
    let mut files = Vec::new();
    for art in ma.files.iter().filter(|f| f.path.ends_with(".csv")) {
        if !mb.files.iter().any(|f| f.path == art.path) {
            continue;
        }
        let ta = read_table(&da.join(&art.path))?;
        let tb = read_table(&db.join(&art.path))?;
        files.push(compare_tables(&art.path, &ta, &tb)?);
    }
    if files.is_empty() {
        return Err(Error::Schema("the runs share no CSV artifacts".into()));
    }
    let identical = files.iter().all(|f| f.columns.iter().all(|c| c.max_abs == 0.0));
    let norm_cols: Vec<&ColumnDiff> = files
        .iter()
        .flat_map(|f| f.columns.iter())
        .filter(|c| c.column.contains("norm"))
        .collect();
    let converged = if norm_cols.is_empty() {
        files
            .iter()
            .flat_map(|f| f.columns.iter())
            .all(|c| c.max_rel <= tolerance)
    } else {
        norm_cols.iter().all(|c| c.max_rel <= tolerance)
    } && files.iter().all(|f| f.matched_rows > 0);
    let divergence_consistent = files
        .iter()
        .filter_map(|f| f.local_mass_ratio)
        .any(|r| r >= DIVERGENCE_GROWTH);
    Ok(RunComparison {
        a: a.display().to_string(),
        b: b.display().to_string(),
        tolerance,
        files,
        identical,
        converged,
        divergence_consistent,
    })
}
