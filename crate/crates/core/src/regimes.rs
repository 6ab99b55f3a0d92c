//! Hypothesis checks for the well-posedness, decay, asymptotic-profile and
//! non-existence results, the Osgood-type comparison function, and the
//! experiments that probe each regime numerically.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::grid::Grid;
use crate::kernels::fit_line;
use crate::mild_solver::{InitialData, MildSolver, SolverConfig, TimeMesh, Trajectory};
use crate::params::{kappa3, smoothing_feasibility, FracParams};
use crate::symbol::SpectralMeasure;

pub use crate::params::{kappa1, kappa2};

/// q_c = d(p-1)/(β-γ).
pub fn critical_exponent(params: &FracParams) -> Result<f64> {
    params.critical_exponent()
}

/// Relative tolerance under which two sides of an inequality count as equal.
const EQUALITY_TOL: f64 = 1e-12;

fn nearly_equal(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= EQUALITY_TOL * a.abs().max(b.abs()).max(1.0)
}

/// One inequality of a hypothesis list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub text: String,
    pub holds: bool,
    /// Failed only because a strict inequality holds with equality.
    pub boundary: bool,
}

impl Clause {
    fn less(text: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let eq = nearly_equal(lhs, rhs);
        Self {
            text: format!("{} ({lhs:.6} < {rhs:.6})", text.into()),
            holds: lhs < rhs && !eq,
            boundary: eq,
        }
    }

    fn less_eq(text: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            text: format!("{} ({lhs:.6} <= {rhs:.6})", text.into()),
            holds: lhs <= rhs || nearly_equal(lhs, rhs),
            boundary: false,
        }
    }

    fn flag(text: impl Into<String>, holds: bool) -> Self {
        Self {
            text: text.into(),
            holds,
            boundary: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Local,
    GlobalSmall,
    GlobalScaled,
    NonnegGlobal,
    Asymptotic,
    Nonexistence,
    NonexistenceCritical,
}

impl Regime {
    pub const ALL: [Regime; 7] = [
        Regime::Local,
        Regime::GlobalSmall,
        Regime::GlobalScaled,
        Regime::NonnegGlobal,
        Regime::Asymptotic,
        Regime::Nonexistence,
        Regime::NonexistenceCritical,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Regime::Local => "local",
            Regime::GlobalSmall => "global_small",
            Regime::GlobalScaled => "global_scaled",
            Regime::NonnegGlobal => "nonneg_global",
            Regime::Asymptotic => "asymptotic",
            Regime::Nonexistence => "nonexistence",
            Regime::NonexistenceCritical => "nonexistence_critical",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub regime: Regime,
    pub satisfied: bool,
    /// Some strict inequality holds with equality; no result applies.
    pub boundary: bool,
    pub clauses: Vec<Clause>,
    /// Hypotheses on the spectral measure or the data, not decided here.
    pub assumed: Vec<String>,
}

impl Verdict {
    fn from_clauses(regime: Regime, clauses: Vec<Clause>, assumed: Vec<String>) -> Self {
        let satisfied = clauses.iter().all(|c| c.holds);
        let boundary = !satisfied && clauses.iter().any(|c| c.boundary);
        Self {
            regime,
            satisfied,
            boundary,
            clauses,
            assumed,
        }
    }

    /// First failing clause, or the boundary note.
    pub fn failing(&self) -> Option<String> {
        if self.satisfied {
            return None;
        }
        let first = self.clauses.iter().find(|c| !c.holds)?;
        if self.boundary {
            Some(format!("boundary, no result applies: {}", first.text))
        } else {
            Some(first.text.clone())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub params: FracParams,
    pub q_c: Option<f64>,
    pub kappa1: f64,
    pub kappa2: f64,
    /// κ₃(r₁) for the pair (q/p, q), when the ε search succeeds.
    pub kappa3: Option<f64>,
    /// 1 + (β-γ)/d, equivalently q_c > 1.
    pub fujita_exponent: f64,
    /// q(1 + β/(α(d-γ))).
    pub nonexistence_threshold: f64,
    pub verdicts: Vec<Verdict>,
}

impl RegimeReport {
    pub fn verdict(&self, regime: Regime) -> &Verdict {
        self.verdicts
            .iter()
            .find(|v| v.regime == regime)
            .expect("every regime has a verdict")
    }
}

/// Upper end of the q window for global solutions, αdp(p-1)/(β(αp-p+1));
/// ∞ never occurs because αp > p-1 is checked separately.
fn global_q_bound(params: &FracParams) -> f64 {
    let (a, p) = (params.alpha, params.p);
    a * params.df() * p * (p - 1.0) / (params.beta * (a * p - p + 1.0))
}

/// Whether 1 ≤ r < d/(d-1), 1 ≤ l < d/(d+1-β), 1/q + 1 = 1/l + 1/r has a
/// solution. In reciprocals a = 1/l ∈ ((d+1-β)/d, 1] and b = 1/r = 1+1/q-a
/// ∈ ((d-1)/d, 1].
fn young_pair_clause(params: &FracParams) -> Clause {
    let d = params.df();
    let q = params.q;
    let a_lo = (d + 1.0 - params.beta) / d;
    let lo = a_lo.max(1.0 / q);
    let hi = 1.0f64.min(1.0 / q + 1.0 / d);
    // Both lower bounds open except 1/q, both upper bounds closed except 1/q + 1/d.
    let lo_open = a_lo >= 1.0 / q;
    let hi_open = 1.0 / q + 1.0 / d <= 1.0;
    let nonempty = if lo_open || hi_open { lo < hi } else { lo <= hi };
    let eq = nearly_equal(lo, hi);
    Clause {
        text: format!("exists (r, l) with 1/q + 1 = 1/l + 1/r in range (1/l window [{lo:.6}, {hi:.6}])"),
        holds: nonempty && !(eq && (lo_open || hi_open)),
        boundary: eq && (lo_open || hi_open),
    }
}

/// Evaluates every hypothesis list literally.
pub fn classify(params: &FracParams) -> RegimeReport {
    let d = params.df();
    let (alpha, beta, gamma, p, q) = (params.alpha, params.beta, params.gamma, params.p, params.q);
    let qc = params.critical_exponent().ok();
    let q1 = q / p;
    let feas = smoothing_feasibility(params.d, beta, gamma, q1, q);

    let gamma_range = || {
        vec![
            Clause::less("0 < gamma", 0.0, gamma),
            Clause::less("gamma < min(beta, d)", gamma, beta.min(d)),
        ]
    };
    let qc_val = qc.unwrap_or(f64::INFINITY);
    let q_above = || Clause::less("max(p, q_c) < q", p.max(qc_val), q);
    let feasibility = || {
        Clause::flag(
            match &feas.failing {
                None => format!("smoothing estimate applies with q1 = q/p = {q1:.6}, q2 = q"),
                Some(msg) => format!("smoothing estimate for q1 = q/p = {q1:.6}, q2 = q: {msg}"),
            },
            feas.feasible,
        )
    };
    let alpha_p = || Clause::less("p - 1 < alpha p", p - 1.0, alpha * p);
    let q_below_global = || {
        if alpha * p > p - 1.0 {
            Clause::less(
                "q < alpha d p (p-1) / (beta (alpha p - p + 1))",
                q,
                global_q_bound(params),
            )
        } else {
            Clause::flag("q window for global solutions undefined since alpha p <= p - 1", false)
        }
    };
    let global = |strict: bool| {
        let mut c = gamma_range();
        let floor = 1.0f64.max(d / beta);
        c.push(if strict {
            Clause::less("max(1, d/beta) < q_c", floor, qc_val)
        } else {
            Clause::less_eq("max(1, d/beta) <= q_c", floor, qc_val)
        });
        c.push(alpha_p());
        c.push(q_above());
        c.push(q_below_global());
        c.push(feasibility());
        c
    };

    let mut local = gamma_range();
    local.push(q_above());
    local.push(feasibility());

    let mut asym = vec![Clause::less("1 < beta", 1.0, beta), Clause::less("beta < 2", beta, 2.0)];
    asym.extend(gamma_range());
    asym.push(Clause::less_eq("1 <= q_c", 1.0, qc_val));
    asym.push(alpha_p());
    asym.push(q_above());
    asym.push(q_below_global());
    asym.push(Clause::less("q < kappa1", q, params.kappa1()));
    if q > p {
        asym.push(Clause::less("q/(q-p) < d/gamma", q / (q - p), d / gamma));
    } else {
        asym.push(Clause::flag("q/(q-p) < d/gamma needs q > p", false));
    }
    asym.push(young_pair_clause(params));

    let threshold = q * (1.0 + beta / (alpha * (d - gamma)));
    let nonexist = vec![
        Clause::less("0 < gamma", 0.0, gamma),
        Clause::less("gamma < d", gamma, d),
        Clause::less("q (1 + beta/(alpha (d - gamma))) < p", threshold, p),
    ];
    let mut critical = gamma_range();
    critical.push(Clause::less("q (1 + beta/(alpha (d - gamma))) < p", threshold, p));

    let spectral = "strict positivity of the symbol (checked when the measure is built)".to_string();
    let verdicts = vec![
        Verdict::from_clauses(Regime::Local, local, vec!["u0 in L_q".into()]),
        Verdict::from_clauses(
            Regime::GlobalSmall,
            global(false),
            vec!["u0 in L_{q_c} with small norm".into()],
        ),
        Verdict::from_clauses(
            Regime::GlobalScaled,
            global(true),
            vec!["|u0| <= A |x|^{-d/q_c} with small A".into()],
        ),
        Verdict::from_clauses(
            Regime::NonnegGlobal,
            global(true),
            vec!["|u0| <= A |x|^{-d/q_c} with small A".into(), "u0 >= 0".into()],
        ),
        Verdict::from_clauses(
            Regime::Asymptotic,
            asym,
            vec![
                "smooth strictly positive spectral density".into(),
                "u0 in L_1 and |x| u0 in L_r".into(),
                "u global in C((0, inf); L_q)".into(),
            ],
        ),
        Verdict::from_clauses(Regime::Nonexistence, nonexist, vec![spectral.clone()]),
        Verdict::from_clauses(
            Regime::NonexistenceCritical,
            critical,
            vec![spectral, "u0 >= B |x|^{-d/q_c} on a ball".into()],
        ),
    ];
    RegimeReport {
        params: *params,
        q_c: qc,
        kappa1: params.kappa1(),
        kappa2: params.kappa2(),
        kappa3: feas.r1.map(|r1| kappa3(params.d, beta, r1)),
        fujita_exponent: 1.0 + (beta - gamma) / d,
        nonexistence_threshold: threshold,
        verdicts,
    }
}

/// Piecewise comparison function below s^p: (1-φ₀^{1-p})s^p on [0, φ₀],
/// φ_i - φ_{i-1} on [φ_{i-1}, φ_i/2], linear on (φ_i/2, φ_i), with
/// φ_i = φ_{i-1}^p. Stored through ln φ_i so that late levels stay finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OsgoodFunction {
    pub p: f64,
    pub phi0: f64,
    /// ln φ_i for i = 0..levels.
    pub ln_phi: Vec<f64>,
}

/// ln(e^a - e^b) for a > b.
fn ln_sub(a: f64, b: f64) -> f64 {
    a + (-(b - a).exp()).ln_1p()
}

/// ln(e^a + e^b).
fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

impl OsgoodFunction {
    /// Builds levels φ₀..φ_levels.
    pub fn new(p: f64, phi0: f64, levels: usize) -> Result<Self> {
        if !(p > 1.0) {
            return domain(format!("p must exceed 1, got {p}"));
        }
        let min = 2f64.powf(1.0 / (p - 1.0));
        if !(phi0 > min) {
            return Err(Error::Hypothesis(format!(
                "phi0 = {phi0} must exceed 2^(1/(p-1)) = {min:.6} for the chain 1 < phi_(i-1) < phi_i/2"
            )));
        }
        let mut ln_phi = vec![phi0.ln()];
        for _ in 0..levels.max(2) {
            let last = *ln_phi.last().unwrap();
            ln_phi.push(p * last);
        }
        Ok(Self { p, phi0, ln_phi })
    }

    pub fn levels(&self) -> usize {
        self.ln_phi.len() - 1
    }

    /// ln(φ_i - φ_{i-1}), the plateau on I_i.
    fn ln_plateau(&self, i: usize) -> f64 {
        ln_sub(self.ln_phi[i], self.ln_phi[i - 1])
    }

    /// ln f(s) from ln s. Beyond the last built level returns +∞.
    pub fn eval_ln(&self, ln_s: f64) -> f64 {
        let (p, lp0) = (self.p, self.ln_phi[0]);
        if ln_s <= lp0 {
            // (1 - φ₀^{1-p}) s^p
            return (-((1.0 - p) * lp0).exp()).ln_1p() + p * ln_s;
        }
        let ln_half = std::f64::consts::LN_2;
        for i in 1..self.ln_phi.len() {
            let mid = self.ln_phi[i] - ln_half;
            if ln_s <= mid {
                return self.ln_plateau(i);
            }
            if ln_s < self.ln_phi[i] {
                if i + 1 >= self.ln_phi.len() {
                    break;
                }
                // w = (s - φ_i/2)/(φ_i/2) ∈ (0, 1)
                return self.ln_linear(i, 2.0 * (ln_s - self.ln_phi[i]).exp() - 1.0);
            }
        }
        f64::INFINITY
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        self.eval_ln(s.ln()).exp()
    }

    /// ln l_i at fraction w of the way from φ_i/2 to φ_i.
    fn ln_linear(&self, i: usize, w: f64) -> f64 {
        let w = w.clamp(0.0, 1.0);
        ln_add(self.ln_plateau(i) + (1.0 - w).ln(), self.ln_plateau(i + 1) + w.ln())
    }

    /// ln of the branch formulas on either side of each breakpoint φ₀,
    /// φ_i/2 and φ_i, as (left, right) pairs.
    pub fn breakpoint_values(&self) -> Vec<(f64, f64)> {
        let p = self.p;
        let lp0 = self.ln_phi[0];
        let mut out = vec![((-((1.0 - p) * lp0).exp()).ln_1p() + p * lp0, self.ln_plateau(1))];
        for i in 1..self.ln_phi.len() - 1 {
            out.push((self.ln_plateau(i), self.ln_linear(i, 0.0)));
            out.push((self.ln_linear(i, 1.0), self.ln_plateau(i + 1)));
        }
        out
    }

    /// Largest |ln f(b⁻) - ln f(b⁺)| over the breakpoints.
    pub fn continuity_defect(&self) -> f64 {
        self.breakpoint_values()
            .iter()
            .map(|(l, r)| (l - r).abs())
            .fold(0.0, f64::max)
    }
}

/// Least-squares slope of ln|u(t)|_q over a window of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub window: (f64, f64),
    pub points: usize,
    pub slope: f64,
    pub intercept: f64,
    /// -(αd/β)(1/q_c - 1/q).
    pub predicted: f64,
}

impl DecayFit {
    pub fn relative_error(&self) -> f64 {
        ((self.slope - self.predicted) / self.predicted).abs()
    }
}

fn window_points(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<(Vec<f64>, Vec<f64>)> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi >= 10.0 * lo * (1.0 - 1e-9)) {
        return domain(format!("fit window [{lo}, {hi}] must span at least one decade"));
    }
    let tol = 1e-9;
    let (x, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= lo * (1.0 - tol) && **t <= hi * (1.0 + tol))
        .map(|(t, v)| (t.ln(), v.ln()))
        .unzip();
    if x.len() < 3 {
        return domain(format!("only {} trajectory nodes inside [{lo}, {hi}]", x.len()));
    }
    let first = x[0].exp();
    let last = x[x.len() - 1].exp();
    if (last / first).log10() < 0.8 * (hi / lo).log10() {
        return domain(format!(
            "trajectory covers only [{first:.4e}, {last:.4e}] of the window"
        ));
    }
    Ok((x, y))
}

pub fn decay_fit(traj: &Trajectory, window: (f64, f64)) -> Result<DecayFit> {
    if !traj.status.completed() {
        return Err(Error::Hypothesis(format!(
            "trajectory did not complete: {:?}",
            traj.status
        )));
    }
    let (x, y) = window_points(&traj.times, &traj.lq_norms, window)?;
    let (slope, intercept) = fit_line(&x, &y);
    Ok(DecayFit {
        window,
        points: x.len(),
        slope,
        intercept,
        predicted: -Trajectory::weight_exponent(&traj.params),
    })
}

/// Whether t^{(αd/β)(1/q_c-1/q)}|u(t)|_q stays within twice its value at
/// the first node past the transient `t ≥ transient`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedBound {
    pub transient: f64,
    pub reference: f64,
    pub sup: f64,
    pub bounded: bool,
}

pub fn weighted_norm_bound(traj: &Trajectory, transient: f64) -> Result<WeightedBound> {
    let i0 = traj
        .times
        .iter()
        .position(|&t| t >= transient && t > 0.0)
        .ok_or_else(|| Error::Domain(format!("no node past t = {transient}")))?;
    let reference = traj.weighted_norms[i0];
    let sup = traj.weighted_norms[i0..].iter().cloned().fold(0.0, f64::max);
    Ok(WeightedBound {
        transient,
        reference,
        sup,
        bounded: traj.status.completed() && sup.is_finite() && sup <= 2.0 * reference,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmallDataAttempt {
    pub amplitude: f64,
    pub completed: bool,
    pub bounded: bool,
}

/// Outcome of halving the data amplitude until a run completes with a
/// bounded weighted norm. The returned run is one further halving below
/// that threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmallDataSearch {
    pub threshold: f64,
    pub amplitude: f64,
    pub attempts: Vec<SmallDataAttempt>,
    pub trajectory: Trajectory,
}

/// `data(A)` builds initial data of amplitude A; the weighted bound is
/// checked past `horizon/100`.
pub fn small_data_search(
    solver: &MildSolver,
    data: impl Fn(f64) -> InitialData,
    config: &SolverConfig,
    horizon: f64,
    start: f64,
    max_halvings: usize,
) -> Result<SmallDataSearch> {
    let grid = solver.grid();
    let params = *solver.params();
    let mut amp = start;
    let mut attempts = Vec::new();
    for _ in 0..=max_halvings {
        let u0 = data(amp).sample(&grid, &params)?;
        let tr = solver.run(&u0, config, horizon)?;
        let bounded = tr.status.completed() && weighted_norm_bound(&tr, horizon / 100.0)?.bounded;
        attempts.push(SmallDataAttempt {
            amplitude: amp,
            completed: tr.status.completed(),
            bounded,
        });
        if bounded {
            let small = 0.5 * amp;
            let u0 = data(small).sample(&grid, &params)?;
            let trajectory = solver.run(&u0, config, horizon)?;
            return Ok(SmallDataSearch {
                threshold: amp,
                amplitude: small,
                attempts,
                trajectory,
            });
        }
        amp *= 0.5;
    }
    Err(Error::Hypothesis(format!(
        "no completing run with bounded weighted norm down to amplitude {:.3e}",
        2.0 * amp
    )))
}

/// Error curve t ↦ |u(t) - AZ(t) - BY(t)|_q and the constants behind it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileReport {
    pub a: f64,
    /// B integrated over the computed horizon plus `b_tail`.
    pub b: f64,
    /// Power-law tail of B beyond the horizon.
    pub b_tail: f64,
    /// Fitted exponent k of ∫|y|^{-γ}|u|^{p-1}u dy ~ t^k on the last decade.
    pub forcing_slope: f64,
    pub times: Vec<f64>,
    pub errors: Vec<f64>,
    pub norms: Vec<f64>,
    pub fitted_slope: f64,
    /// -(αd/β)(1/r - 1/q) - α/β.
    pub linear_slope: f64,
    /// -(αd/β)(1/q_c - 1/q), the rate the error must beat.
    pub reference_slope: f64,
}

impl ProfileReport {
    /// Error and |u|_q at the node nearest `t`.
    pub fn at(&self, t: f64) -> (f64, f64, f64) {
        let i = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        (self.times[i], self.errors[i], self.norms[i])
    }
}

/// Compares a stored trajectory with AZ + BY on `window`. `r` enters only
/// the reported linear rate.
pub fn asymptotic_profile_check(
    solver: &MildSolver,
    traj: &Trajectory,
    window: (f64, f64),
    r: f64,
) -> Result<ProfileReport> {
    let params = *solver.params();
    let verdict = classify(&params);
    let v = verdict.verdict(Regime::Asymptotic);
    if !v.satisfied {
        return Err(Error::Hypothesis(v.failing().unwrap_or_default()));
    }
    if !traj.status.completed() {
        return Err(Error::Hypothesis(format!(
            "trajectory did not complete: {:?}",
            traj.status
        )));
    }
    if traj.states.len() != traj.times.len() {
        return domain("profile check needs stored states");
    }
    if !(r >= 1.0) {
        return domain(format!("r must be at least 1, got {r}"));
    }
    let g: Grid = solver.grid();
    let q = params.q;
    let a = g.integrate(&traj.states[0]);
    let (b, b_tail, forcing_slope) = if traj.nonlinear {
        let masses: Vec<f64> = traj.states.iter().map(|u| g.integrate(&solver.forcing(u))).collect();
        let mut b = 0.0;
        for n in 1..traj.times.len() {
            b += masses[n] * (traj.times[n] - traj.times[n - 1]);
        }
        let horizon = *traj.times.last().unwrap();
        let (x, y): (Vec<f64>, Vec<f64>) = traj
            .times
            .iter()
            .zip(&masses)
            .filter(|(t, m)| **t >= horizon / 10.0 && **m > 0.0)
            .map(|(t, m)| (t.ln(), m.ln()))
            .unzip();
        if x.len() < 3 {
            return domain("too few nodes in the last decade to fit the forcing decay");
        }
        let (k, _) = fit_line(&x, &y);
        if !(k < -1.0) {
            return Err(Error::Hypothesis(format!(
                "B diverges: forcing mass decays like t^{k:.4}, not faster than 1/t"
            )));
        }
        let tail = masses.last().unwrap() * horizon / (-k - 1.0);
        (b + tail, tail, k)
    } else {
        (0.0, 0.0, f64::NAN)
    };
    let plan = solver.plan();
    let mut times = Vec::new();
    let mut errors = Vec::new();
    let mut norms = Vec::new();
    for (n, &t) in traj.times.iter().enumerate() {
        if t < window.0 * (1.0 - 1e-9) || t > window.1 * (1.0 + 1e-9) {
            continue;
        }
        let z = plan.kernel_from_multiplier(&solver.z_multiplier(t));
        let y = plan.kernel_from_multiplier(&solver.y_multiplier(t));
        let diff: Vec<f64> = traj.states[n]
            .iter()
            .zip(z.iter().zip(&y))
            .map(|(u, (z, y))| u - a * z - b * y)
            .collect();
        times.push(t);
        errors.push(g.lr_norm(&diff, q));
        norms.push(g.lr_norm(&traj.states[n], q));
    }
    let (x, y) = window_points(&times, &errors, window)?;
    let (fitted_slope, _) = fit_line(&x, &y);
    let s = params.spread();
    let qc = params.critical_exponent()?;
    Ok(ProfileReport {
        a,
        b,
        b_tail,
        forcing_slope,
        times,
        errors,
        norms,
        fitted_slope,
        linear_slope: -s * params.df() * (1.0 / r - 1.0 / q) - s,
        reference_slope: -s * params.df() * (1.0 / qc - 1.0 / q),
    })
}

/// Refinement ladder for the non-existence experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupConfig {
    pub eta: f64,
    pub rho: f64,
    pub radius: f64,
    pub epsilon: f64,
    pub levels: usize,
    /// Nodes per axis at level 0; doubled per level at fixed extent.
    pub base_n: usize,
    pub extent: f64,
    /// Time steps at level 0; doubled per level on a nested graded mesh.
    pub base_steps: usize,
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupLevel {
    pub h: f64,
    pub steps: usize,
    pub completed: bool,
    /// Time of the step that failed, if any.
    pub divergence_time: Option<f64>,
    pub last_time: f64,
    /// ∫_{B(ε)} u at the last accepted node.
    pub last_mass: f64,
    /// Last accepted time of the next coarser level; the comparison node.
    pub reference_time: Option<f64>,
    /// Local mass at `reference_time`, +∞ if this level diverged earlier.
    pub reference_mass: Option<f64>,
    /// reference_mass over the coarser level's mass at the same node.
    pub growth: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlowupVerdict {
    /// Local mass grows at least 10× per level: consistent with non-existence.
    Divergent,
    /// Every level completes and the local mass changes by at most 10%.
    Stable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub params: FracParams,
    pub config: BlowupConfig,
    pub hypotheses: Vec<Clause>,
    pub levels: Vec<BlowupLevel>,
    pub verdict: BlowupVerdict,
}

impl BlowupReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|c| c.holds)
    }
}

/// Growth factor of the local mass per level that signals divergence.
pub const DIVERGENCE_GROWTH: f64 = 10.0;
/// Relative change of the local mass per level that counts as stable.
pub const STABLE_CHANGE: f64 = 0.1;

/// Runs TruncatedPower data on a space-time refinement ladder. Level k
/// compares with level k-1 at the coarser level's last accepted node;
/// the graded meshes are nested so that node is shared.
pub fn blowup_experiment(
    params: &FracParams,
    measure: &SpectralMeasure,
    config: &BlowupConfig,
) -> Result<BlowupReport> {
    let d = params.df();
    let (alpha, beta, gamma, p, q) = (params.alpha, params.beta, params.gamma, params.p, params.q);
    let (eta, rho) = (config.eta, config.rho);
    let hypotheses = vec![
        Clause::less("0 < eta q", 0.0, eta * q),
        Clause::less("eta q < d - gamma", eta * q, d - gamma),
        Clause::less("0 < rho", 0.0, rho),
        Clause::less("rho < alpha/beta", rho, alpha / beta),
        Clause::less(
            "((d - gamma) rho + 1)/(eta rho) < p",
            ((d - gamma) * rho + 1.0) / (eta * rho),
            p,
        ),
    ];
    if config.levels < 2 || config.base_n < 4 || config.base_steps < 1 {
        return domain("ladder needs at least two levels, 4 nodes and 1 step");
    }
    if !(config.epsilon > 0.0) {
        return domain("epsilon must be positive");
    }
    let data = InitialData::TruncatedPower {
        eta,
        radius: config.radius,
    };
    let mut runs: Vec<(Grid, usize, Trajectory)> = Vec::new();
    for k in 0..config.levels {
        let n = config.base_n << k;
        let grid = Grid::with_extent(params.d, n, config.extent)?;
        let steps = config.base_steps << k;
        let solver = MildSolver::new(*params, measure, grid)?;
        let u0 = data.sample(&grid, params)?;
        let mut sc = SolverConfig::new(TimeMesh::graded(steps, alpha));
        sc.store_states = false;
        sc.probe_radius = Some(config.epsilon);
        let tr = solver.run(&u0, &sc, config.horizon)?;
        runs.push((grid, steps, tr));
    }
    let mesh0 = TimeMesh::graded(config.base_steps, alpha);
    let mut levels = Vec::new();
    for (k, (grid, steps, tr)) in runs.iter().enumerate() {
        let nodes = mesh0.refined(1 << k).nodes(config.horizon)?;
        let divergence_time = match tr.status {
            crate::mild_solver::RunStatus::Completed => None,
            crate::mild_solver::RunStatus::PicardDiverged(n) | crate::mild_solver::RunStatus::NormOverflow(n) => {
                Some(nodes[n])
            }
        };
        let (reference_time, reference_mass, growth) = if k == 0 {
            (None, None, None)
        } else {
            let coarse = &runs[k - 1].2;
            let i = coarse.times.len() - 1;
            let t_ref = coarse.times[i];
            let j = 2 * i;
            let mass = if j < tr.local_masses.len() {
                tr.local_masses[j]
            } else {
                f64::INFINITY
            };
            (Some(t_ref), Some(mass), Some(mass / coarse.local_masses[i]))
        };
        levels.push(BlowupLevel {
            h: grid.h,
            steps: *steps,
            completed: tr.status.completed(),
            divergence_time,
            last_time: *tr.times.last().unwrap(),
            last_mass: *tr.local_masses.last().unwrap(),
            reference_time,
            reference_mass,
            growth,
        });
    }
    let growths: Vec<f64> = levels.iter().filter_map(|l| l.growth).collect();
    let verdict = if growths.iter().all(|&g| g >= DIVERGENCE_GROWTH) && levels.iter().any(|l| !l.completed) {
        BlowupVerdict::Divergent
    } else if levels.iter().all(|l| l.completed) && growths.iter().all(|&g| (g - 1.0).abs() <= STABLE_CHANGE) {
        BlowupVerdict::Stable
    } else {
        BlowupVerdict::Inconclusive
    };
    Ok(BlowupReport {
        params: *params,
        config: config.clone(),
        hypotheses,
        levels,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: usize, alpha: f64, beta: f64, gamma: f64, p: f64, q: f64) -> FracParams {
        FracParams::new(d, alpha, beta, gamma, p, q).unwrap()
    }

    #[test]
    fn local_example() {
        let r = classify(&params(1, 0.5, 1.0, 0.25, 3.0, 3.5));
        assert!((r.q_c.unwrap() - 8.0 / 3.0).abs() < 1e-14);
        let local = r.verdict(Regime::Local);
        assert!(local
            .clauses
            .iter()
            .any(|c| c.text.starts_with("max(p, q_c) < q") && c.holds));
        // q/p = 7/6 needs m - eps >= 7 for r1 >= 1, but m = d/gamma = 4.
        assert!(!local.satisfied);
        assert!(local.failing().unwrap().contains("r1"));
        // αp = 1.5 < p - 1 = 2.
        let g = r.verdict(Regime::GlobalSmall);
        assert!(!g.satisfied);
        assert!(g.failing().unwrap().contains("alpha p"));
    }

    #[test]
    fn nonexistence_thresholds() {
        let r = classify(&params(1, 0.5, 1.0, 0.25, 3.0, 1.0));
        assert!((r.nonexistence_threshold - 11.0 / 3.0).abs() < 1e-14);
        assert!(!r.verdict(Regime::Nonexistence).satisfied);
        let r = classify(&params(1, 0.9, 1.0, 0.25, 3.0, 1.0));
        assert!((r.nonexistence_threshold - (1.0 + 1.0 / 0.675)).abs() < 1e-14);
        assert!(r.verdict(Regime::Nonexistence).satisfied);
    }

    #[test]
    fn equality_is_boundary() {
        // q = q_c = 4 sits on a strict inequality.
        let r = classify(&params(2, 0.5, 1.0, 0.5, 2.0, 4.0));
        let v = r.verdict(Regime::Local);
        assert!(!v.satisfied);
        assert!(v.boundary);
        assert!(v.failing().unwrap().starts_with("boundary"));
    }

    #[test]
    fn young_pair_window() {
        // d = 1: r = 1 forces l = q, admissible only for q < 1/(2-β).
        assert!(young_pair_clause(&params(1, 0.9, 1.9, 0.25, 3.5, 5.5)).holds);
        // d = 2, β = 1.2: q must stay below κ₁ = 2/0.8 = 2.5.
        assert!(young_pair_clause(&params(2, 0.9, 1.2, 0.25, 1.5, 2.4)).holds);
        assert!(!young_pair_clause(&params(2, 0.9, 1.2, 0.25, 1.5, 2.6)).holds);
    }

    #[test]
    fn osgood_values() {
        let f = OsgoodFunction::new(2.0, 3.0, 6).unwrap();
        assert!((f.eval(3.0) - 6.0).abs() < 1e-12);
        assert!((f.eval(4.0) - 6.0).abs() < 1e-12);
        assert_eq!(f.eval(0.0), 0.0);
        // Linear on (4.5, 9) from 6 to 81 - 9 = 72.
        assert!((f.eval(6.75) - 39.0).abs() < 1e-10);
        assert!(f.continuity_defect() < 1e-12);
        assert!(OsgoodFunction::new(2.0, 2.0, 4).is_err());
    }
}
