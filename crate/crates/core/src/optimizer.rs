//! Riemannian gradient descent with alternating Barzilai–Borwein trial steps
//! and a Zhang–Hager nonmonotone backtracking line search.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesics::Retraction;
use crate::linalg::Mat;
use crate::manifold::Point;
use crate::metrics::{metric_norm, riemannian_gradient, MetricKind};

/// Smooth cost on the ambient space together with its Euclidean gradient.
pub trait Objective: Send + Sync {
    fn value(&self, x: &Mat) -> f64;
    fn egrad(&self, x: &Mat) -> Mat;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Sufficient-decrease constant β ∈ (0, 1).
    pub beta: f64,
    /// Backtracking factor δ ∈ (0, 1).
    pub delta: f64,
    pub gamma0: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    /// Nonmonotone averaging weight α ∈ [0, 1]; 0 gives the monotone Armijo rule.
    pub alpha: f64,
    pub rstop: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            beta: 1e-4,
            delta: 0.5,
            gamma0: 1e-3,
            gamma_min: 1e-15,
            gamma_max: 1e5,
            alpha: 0.85,
            rstop: 1e-5,
            max_iter: 2000,
            max_backtracks: 50,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.beta) {
            return Err(Error::Config(format!("beta must lie in (0,1), got {}", self.beta)));
        }
        if !open_unit(self.delta) {
            return Err(Error::Config(format!("delta must lie in (0,1), got {}", self.delta)));
        }
        if !(self.gamma0 > 0.0) {
            return Err(Error::Config(format!("gamma0 must be positive, got {}", self.gamma0)));
        }
        if !(self.gamma_min > 0.0 && self.gamma_min < self.gamma_max) {
            return Err(Error::Config(format!(
                "need 0 < gamma_min < gamma_max, got {} and {}",
                self.gamma_min, self.gamma_max
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!("alpha must lie in [0,1], got {}", self.alpha)));
        }
        if !(self.rstop >= 0.0) {
            return Err(Error::Config(format!("rstop must be nonnegative, got {}", self.rstop)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub f: f64,
    pub grad_norm: f64,
    pub feas: f64,
    /// Accepted step size; 0 for the initial record.
    pub tau: f64,
    /// Cumulative objective evaluations.
    pub n_evals: usize,
    pub c: f64,
    pub q: f64,
    /// Seconds since the start of the run.
    pub elapsed: f64,
    /// Cumulative Lyapunov solves spent on gradients.
    pub lyapunov_solves: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Status {
    Converged,
    MaxIter,
    LineSearchFailure,
    Failed(String),
}

impl Status {
    pub fn label(&self) -> &str {
        match self {
            Status::Converged => "Converged",
            Status::MaxIter => "MaxIter",
            Status::LineSearchFailure => "LineSearchFailure",
            Status::Failed(_) => "Failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub status: Status,
    pub point: Point,
    pub history: Vec<IterationRecord>,
    pub iterations: usize,
    pub evaluations: usize,
    pub wall_time: f64,
    pub lyapunov_solves: usize,
    pub flops_proxy: usize,
}

impl RunResult {
    pub fn last(&self) -> &IterationRecord {
        self.history.last().expect("history holds the initial record")
    }

    pub fn max_feas(&self) -> f64 {
        self.history.iter().map(|r| r.feas).fold(0.0, f64::max)
    }
}

/// Alternating BB trial step, clamped to [γ_min, γ_max].
///
/// `w` is X_j − X_{j−1}, `y` is Z_j − Z_{j−1} with Z = −grad f. Odd j uses
/// ⟨W,W⟩/|tr(WᵀY)|, even j uses |tr(WᵀY)|/⟨Y,Y⟩, and j = 0 uses γ₀. A
/// vanishing denominator falls back to γ₀.
pub fn bb_trial_step(j: usize, w: &Mat, y: &Mat, cfg: &SolverConfig) -> f64 {
    let raw = if j == 0 {
        cfg.gamma0
    } else {
        let wy = w.dot(y).abs();
        if j % 2 == 1 {
            if wy <= 1e-14 * w.norm() * y.norm() || wy == 0.0 {
                cfg.gamma0
            } else {
                w.dot(w) / wy
            }
        } else {
            let yy = y.dot(y);
            if yy <= 1e-28 {
                cfg.gamma0
            } else {
                wy / yy
            }
        }
    };
    let raw = if raw.is_finite() { raw } else { cfg.gamma0 };
    raw.min(cfg.gamma_max).max(cfg.gamma_min)
}

/// (c_{j+1}, q_{j+1}) with q_{j+1} = αq_j + 1 and
/// c_{j+1} = (αq_j/q_{j+1})·c_j + f_next/q_{j+1}.
pub fn nonmonotone_update(c: f64, q: f64, f_next: f64, alpha: f64) -> (f64, f64) {
    let q_next = alpha * q + 1.0;
    let c_next = (alpha * q / q_next) * c + f_next / q_next;
    (c_next, q_next)
}

#[derive(Debug, Clone)]
pub struct LineSearchOutcome {
    pub tau: f64,
    pub point: Point,
    pub f: f64,
    /// Number of backtracks ℓ.
    pub backtracks: usize,
    pub evaluations: usize,
}

/// Finds the smallest ℓ with f(R(τZ)) ≤ c + β·τ·slope, τ = γ·δ^ℓ.
///
/// `slope` is g(grad f(X), Z), negative for a descent direction. A trial
/// whose retraction fails or yields a non-finite cost counts as rejected.
pub fn line_search(
    objective: &dyn Objective,
    x: &Point,
    z: &Mat,
    slope: f64,
    gamma: f64,
    c: f64,
    cfg: &SolverConfig,
    retraction: &dyn Retraction,
) -> Result<LineSearchOutcome> {
    let mut tau = gamma;
    let mut evaluations = 0;
    for ell in 0..=cfg.max_backtracks {
        if let Ok(trial) = retraction.retract(x, &(z * tau)) {
            let f = objective.value(trial.x());
            evaluations += 1;
            if f <= c + cfg.beta * tau * slope {
                return Ok(LineSearchOutcome { tau, point: trial, f, backtracks: ell, evaluations });
            }
        }
        if ell < cfg.max_backtracks {
            tau *= cfg.delta;
        }
    }
    Err(Error::LineSearch { backtracks: cfg.max_backtracks, tau, evaluations })
}

/// Runs the descent from `x0` until the relative gradient norm drops below
/// `rstop`, the iteration cap is hit, or the line search fails.
pub fn minimize(
    objective: &dyn Objective,
    x0: &Point,
    metric: &MetricKind,
    retraction: &dyn Retraction,
    cfg: &SolverConfig,
) -> Result<RunResult> {
    cfg.validate()?;
    let start = Instant::now();
    let mut x = x0.clone();
    let mut f = objective.value(x.x());
    let mut evaluations = 1;
    let mut lyapunov_solves = 0;
    let mut flops_proxy = 0;

    let report = gradient_and_norm(objective, &x, metric)?;
    lyapunov_solves += report.0.lyapunov_solves;
    flops_proxy += report.0.flops_proxy;
    let mut grad = report.0.gradient.into_inner();
    let mut gnorm = report.1;
    let gnorm0 = gnorm;

    let (mut c, mut q) = (f, 1.0);
    let mut history = vec![IterationRecord {
        iter: 0,
        f,
        grad_norm: gnorm,
        feas: x.feasibility(),
        tau: 0.0,
        n_evals: evaluations,
        c,
        q,
        elapsed: start.elapsed().as_secs_f64(),
        lyapunov_solves,
    }];

    let mut prev: Option<(Mat, Mat)> = None;
    let mut j = 0;
    let status = loop {
        if gnorm <= cfg.rstop * gnorm0 {
            break Status::Converged;
        }
        if j >= cfg.max_iter {
            break Status::MaxIter;
        }
        let z = -&grad;
        let gamma = match &prev {
            None => bb_trial_step(0, &z, &z, cfg),
            Some((x_prev, z_prev)) => bb_trial_step(j, &(x.x() - x_prev), &(&z - z_prev), cfg),
        };
        let slope = -gnorm * gnorm;
        let outcome = match line_search(objective, &x, &z, slope, gamma, c, cfg, retraction) {
            Ok(o) => o,
            Err(Error::LineSearch { evaluations: spent, .. }) => {
                evaluations += spent;
                break Status::LineSearchFailure;
            }
            Err(e) => break Status::Failed(e.to_string()),
        };
        evaluations += outcome.evaluations;
        let (c_next, q_next) = nonmonotone_update(c, q, outcome.f, cfg.alpha);
        c = c_next;
        q = q_next;

        prev = Some((x.into_inner(), z));
        x = outcome.point;
        f = outcome.f;
        let (report, norm) = match gradient_and_norm(objective, &x, metric) {
            Ok(r) => r,
            Err(e) => break Status::Failed(e.to_string()),
        };
        lyapunov_solves += report.lyapunov_solves;
        flops_proxy += report.flops_proxy;
        grad = report.gradient.into_inner();
        gnorm = norm;
        j += 1;
        history.push(IterationRecord {
            iter: j,
            f,
            grad_norm: gnorm,
            feas: x.feasibility(),
            tau: outcome.tau,
            n_evals: evaluations,
            c,
            q,
            elapsed: start.elapsed().as_secs_f64(),
            lyapunov_solves,
        });
    };

    Ok(RunResult {
        status,
        point: x,
        iterations: j,
        evaluations,
        wall_time: start.elapsed().as_secs_f64(),
        history,
        lyapunov_solves,
        flops_proxy,
    })
}

/// Riemannian gradient and its metric norm. Since grad f is tangent,
/// g(grad f, grad f) = Df(X)[grad f] = tr(∇f̄ᵀ grad f) for every metric.
/// The shortcut cancels badly once grad f is small against ∇f̄; below
/// `SHORTCUT_COSINE` the metric is evaluated directly.
fn gradient_and_norm(
    objective: &dyn Objective,
    x: &Point,
    metric: &MetricKind,
) -> Result<(crate::metrics::GradientReport, f64)> {
    let egrad = objective.egrad(x.x());
    let report = riemannian_gradient(x, &egrad, metric)?;
    let g = report.gradient.z();
    let norm = match metric {
        MetricKind::Euclidean => g.norm(),
        _ => {
            let dot = egrad.dot(g);
            if dot >= SHORTCUT_COSINE * egrad.norm() * g.norm() {
                dot.sqrt()
            } else {
                metric_norm(x, g, metric)?
            }
        }
    };
    Ok((report, norm))
}

const SHORTCUT_COSINE: f64 = 1e-4;
