//! The parameter tuple (d, α, β, γ, p, q) and the exponents derived from it.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracParams {
    pub d: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub p: f64,
    pub q: f64,
}

impl FracParams {
    pub fn new(d: usize, alpha: f64, beta: f64, gamma: f64, p: f64, q: f64) -> Result<Self> {
        let params = Self {
            d,
            alpha,
            beta,
            gamma,
            p,
            q,
        };
        params.validate()?;
        Ok(params)
    }

    /// Range checks; γ < d is required because |x|^{-γ} must be locally
    /// integrable.
    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return domain("dimension d must be at least 1");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return domain(format!("alpha must lie in (0,1), got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta < 2.0) {
            return domain(format!("beta must lie in (0,2), got {}", self.beta));
        }
        if !(self.gamma >= 0.0) {
            return domain(format!("gamma must be nonnegative, got {}", self.gamma));
        }
        if self.gamma >= self.d as f64 {
            return Err(Error::NonIntegrablePotential {
                gamma: self.gamma,
                d: self.d,
            });
        }
        if !(self.p > 1.0) {
            return domain(format!("p must exceed 1, got {}", self.p));
        }
        if !(self.q >= 1.0 && self.q.is_finite()) {
            return domain(format!("q must lie in [1, inf), got {}", self.q));
        }
        Ok(())
    }

    pub fn df(&self) -> f64 {
        self.d as f64
    }

    /// q_c = d(p-1)/(β-γ), defined for γ < β.
    pub fn critical_exponent(&self) -> Result<f64> {
        if self.gamma >= self.beta {
            return domain(format!(
                "critical exponent undefined for gamma = {} >= beta = {}",
                self.gamma, self.beta
            ));
        }
        Ok(self.df() * (self.p - 1.0) / (self.beta - self.gamma))
    }

    /// Integrability threshold for Z: d/(d-β) if d > β, else ∞.
    pub fn kappa1(&self) -> f64 {
        kappa1(self.d, self.beta)
    }

    /// Integrability threshold for Y: d/(d-2β) if d > 2β, else ∞.
    pub fn kappa2(&self) -> f64 {
        kappa2(self.d, self.beta)
    }

    /// Similarity exponent α/β.
    pub fn spread(&self) -> f64 {
        self.alpha / self.beta
    }
}

pub fn kappa1(d: usize, beta: f64) -> f64 {
    let df = d as f64;
    if df > beta {
        df / (df - beta)
    } else {
        f64::INFINITY
    }
}

pub fn kappa2(d: usize, beta: f64) -> f64 {
    let df = d as f64;
    if df > 2.0 * beta {
        df / (df - 2.0 * beta)
    } else {
        f64::INFINITY
    }
}

/// r₁d/(d - 2r₁β) if d > 2r₁β, else ∞.
pub fn kappa3(d: usize, beta: f64, r1: f64) -> f64 {
    let df = d as f64;
    if df > 2.0 * r1 * beta {
        r1 * df / (df - 2.0 * r1 * beta)
    } else {
        f64::INFINITY
    }
}

/// Outcome of the search for an ε making the R-smoothing estimate applicable
/// to the pair (q₁, q₂).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingFeasibility {
    pub feasible: bool,
    pub m: f64,
    pub eps: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub kappa3: Option<f64>,
    /// The inequality that failed for the best candidate, if infeasible.
    pub failing: Option<String>,
}

/// Number of ε candidates, log-spaced in (0, m-1).
const EPS_GRID: usize = 100;

/// Searches ε ∈ (0, m-1), m = d/γ, on a log grid for which
/// r₁ = q₁(m-ε)/(q₁+m-ε) ≥ 1, r₂ = q₁(m+ε)/(q₁+m+ε) ≥ 1 and
/// q₁ ≤ q₂ < κ₃(r₁), with q₁ > 1.
pub fn smoothing_feasibility(d: usize, beta: f64, gamma: f64, q1: f64, q2: f64) -> SmoothingFeasibility {
    let df = d as f64;
    let infeasible = |m: f64, msg: String| SmoothingFeasibility {
        feasible: false,
        m,
        eps: None,
        r1: None,
        r2: None,
        kappa3: None,
        failing: Some(msg),
    };
    if !(gamma > 0.0 && gamma < df) {
        return infeasible(f64::NAN, format!("0 < gamma < d fails (gamma = {gamma}, d = {d})"));
    }
    let m = df / gamma;
    if !(m > 1.0) {
        return infeasible(m, format!("m = d/gamma = {m} must exceed 1"));
    }
    if !(q1 > 1.0 && q1.is_finite()) {
        return infeasible(m, format!("q1 = {q1} must satisfy 1 < q1 < inf"));
    }
    if !(q1 <= q2) {
        return infeasible(m, format!("q1 <= q2 fails (q1 = {q1}, q2 = {q2})"));
    }
    let mut last_failure = String::new();
    for i in 0..EPS_GRID {
        let eps = (m - 1.0) * 10f64.powf(-6.0 * (1.0 - i as f64 / EPS_GRID as f64));
        if !(m - eps > 1.0) {
            continue;
        }
        let r1 = q1 * (m - eps) / (q1 + m - eps);
        let r2 = q1 * (m + eps) / (q1 + m + eps);
        if r1 < 1.0 {
            last_failure = format!("r1 = {r1:.6} < 1 at eps = {eps:.3e}");
            continue;
        }
        if r2 < 1.0 {
            last_failure = format!("r2 = {r2:.6} < 1 at eps = {eps:.3e}");
            continue;
        }
        let k3 = kappa3(d, beta, r1);
        if !(q2 < k3) {
            last_failure = format!("q2 = {q2} >= kappa3 = {k3:.6} at eps = {eps:.3e}");
            continue;
        }
        return SmoothingFeasibility {
            feasible: true,
            m,
            eps: Some(eps),
            r1: Some(r1),
            r2: Some(r2),
            kappa3: Some(k3),
            failing: None,
        };
    }
    infeasible(m, last_failure)
}

/// Time exponent of the R-smoothing estimate:
/// α - 1 - (αd/β)(1/q₁ - 1/q₂) - αγ/β.
pub fn smoothing_exponent(d: usize, alpha: f64, beta: f64, gamma: f64, q1: f64, q2: f64) -> f64 {
    alpha - 1.0 - alpha * d as f64 / beta * (1.0 / q1 - 1.0 / q2) - alpha * gamma / beta
}
