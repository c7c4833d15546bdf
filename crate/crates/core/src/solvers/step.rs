//! Step-size rules and the adaptive backtracking routine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2_sq};
use crate::solvers::Objective;

/// Step-size policies. `Simple` is the classical `2/(k+1)`; `Short` is the
/// smoothness-bounded step; the two constant rules are the closed-form
/// linear-convergence steps `mu/(2 L n^2)` and `mu/(2 L (n+1)^2 eta^2)`;
/// `Backtracking` estimates `L` and `mu` on the fly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    Simple,
    LineSearch,
    Short,
    ConstantSfw,
    ConstantSfwP,
    Backtracking { tau1: f64, tau2: f64 },
}

impl StepRule {
    pub fn backtracking_default() -> Self {
        StepRule::Backtracking { tau1: 2.0, tau2: 0.9 }
    }

    pub fn is_backtracking(&self) -> bool {
        matches!(self, StepRule::Backtracking { .. })
    }
}

/// Running `L`/`mu` estimates for backtracking mode.
#[derive(Debug, Clone, Copy)]
pub struct BacktrackState {
    pub l: f64,
    pub mu: f64,
}

impl BacktrackState {
    /// Seeds the estimates with a finite-difference probe of the gradient
    /// along `probe_dir` (one extra gradient evaluation).
    pub fn probe(obj: &dyn Objective, x: &[f64], grad_x: &[f64], probe_dir: &[f64]) -> Self {
        let norm = norm2_sq(probe_dir).sqrt();
        if norm == 0.0 {
            return Self { l: 1.0, mu: 1e-3 };
        }
        let h = 1e-3;
        let x2: Vec<f64> = x
            .iter()
            .zip(probe_dir)
            .map(|(&xi, &di)| xi + h * di / norm)
            .collect();
        let g2 = obj.gradient(&x2);
        let diff: f64 = grad_x
            .iter()
            .zip(&g2)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let l = (diff / h).max(1e-9);
        Self { l, mu: l * 1e-3 }
    }
}

/// Outcome of one backtracking call.
#[derive(Debug, Clone, Copy)]
pub struct BacktrackOutcome {
    pub delta: f64,
    pub l: f64,
    pub mu: f64,
    /// `rhs - lhs` of the accepted sufficient-decrease inequality
    /// (nonnegative when a step was accepted; +inf for the zero-step return
    /// on non-descent directions).
    pub margin: f64,
}

/// Adaptive estimation of local `L`, `mu`, and a short step:
/// optimistically relax the previous estimates (`L <- tau2*L`,
/// `mu <- mu/tau2`), propose `delta = min{<-grad, dir>/(L ||dir||^2),
/// delta_max}`, then double `L` (and refresh the secant estimate of `mu`)
/// until `f(x + delta*dir) <= f(x) + delta <grad, dir> + delta^2 L/2 ||dir||^2`.
///
/// A non-descent direction returns `delta = 0` with estimates unchanged.
pub fn backtracking_routine(
    obj: &dyn Objective,
    x: &[f64],
    dir: &[f64],
    grad_x: &[f64],
    l_prev: f64,
    mu_prev: f64,
    delta_max: f64,
    tau1: f64,
    tau2: f64,
) -> Result<BacktrackOutcome> {
    if !(tau1 > 1.0) || !(tau2 <= 1.0) || !(tau2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "backtracking needs tau1 > 1 and 0 < tau2 <= 1, got ({tau1}, {tau2})"
        )));
    }
    if !(l_prev > 0.0) || !(mu_prev > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "backtracking needs positive previous estimates, got L = {l_prev}, mu = {mu_prev}"
        )));
    }
    let slope = dot(grad_x, dir);
    let dir_sq = norm2_sq(dir);
    if slope >= 0.0 || dir_sq == 0.0 {
        return Ok(BacktrackOutcome { delta: 0.0, l: l_prev, mu: mu_prev, margin: f64::INFINITY });
    }

    let f_x = obj.value(x);
    let mut l = tau2 * l_prev;
    let mut mu = mu_prev / tau2;
    let mut delta = (-slope / (l * dir_sq)).min(delta_max);

    let trial = |delta: f64| -> f64 {
        let xt: Vec<f64> = x.iter().zip(dir).map(|(&xi, &di)| xi + delta * di).collect();
        obj.value(&xt)
    };

    let mut f_trial = trial(delta);
    let mut iters = 0usize;
    while f_trial > f_x + delta * slope + 0.5 * delta * delta * l * dir_sq {
        iters += 1;
        if iters > 60 {
            return Err(Error::NumericalFailure(
                "backtracking failed to satisfy sufficient decrease in 60 doublings".into(),
            ));
        }
        l *= tau1;
        let secant = 2.0 * (f_trial - f_x - delta * slope) / (delta * delta * dir_sq);
        if secant.is_finite() && secant > 0.0 {
            mu = mu.min(secant);
        }
        delta = (-slope / (l * dir_sq)).min(delta_max);
        f_trial = trial(delta);
    }
    let margin = (f_x + delta * slope + 0.5 * delta * delta * l * dir_sq) - f_trial;
    Ok(BacktrackOutcome { delta, l, mu, margin })
}

/// Golden-section search for the minimizer of the convex section
/// `t -> f(x + t*dir)` on `[0, delta_max]` (tolerance 1e-10, at most 100
/// evaluations).
pub fn golden_section_step(
    obj: &dyn Objective,
    x: &[f64],
    dir: &[f64],
    delta_max: f64,
) -> f64 {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let phi = |t: f64| -> f64 {
        let xt: Vec<f64> = x.iter().zip(dir).map(|(&xi, &di)| xi + t * di).collect();
        obj.value(&xt)
    };
    let mut a = 0.0;
    let mut b = delta_max;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = phi(c);
    let mut fd = phi(d);
    let mut evals = 2usize;
    let tol = 1e-10 * delta_max.max(1.0);
    while (b - a) > tol && evals < 100 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = phi(d);
        }
        evals += 1;
    }
    0.5 * (a + b)
}

/// Everything a step rule may need at one iteration.
pub(crate) struct StepContext<'a> {
    pub obj: &'a dyn Objective,
    pub x: &'a [f64],
    pub dir: &'a [f64],
    pub grad: &'a [f64],
    /// Iteration counter in the sense of the `2/(k+1)` schedule.
    pub step_index: usize,
    pub delta_max: f64,
    /// Effective smoothness constant for `Short` (declared or estimated).
    pub smoothness: Option<f64>,
    /// Precomputed value for the constant rules.
    pub constant_step: Option<f64>,
    pub line_search_fallback: bool,
}

/// Computes the step length for `rule`, updating `bt` when backtracking.
pub(crate) fn compute_step(
    rule: StepRule,
    ctx: &StepContext,
    bt: &mut Option<BacktrackState>,
) -> Result<(f64, Option<BacktrackOutcome>)> {
    let delta = match rule {
        StepRule::Simple => (2.0 / (ctx.step_index as f64 + 1.0)).min(ctx.delta_max),
        StepRule::LineSearch => {
            if dot(ctx.grad, ctx.dir) >= 0.0 {
                0.0
            } else if let Some(d) = ctx.obj.exact_line_search(ctx.x, ctx.dir, ctx.delta_max) {
                d
            } else if ctx.line_search_fallback {
                golden_section_step(ctx.obj, ctx.x, ctx.dir, ctx.delta_max)
            } else {
                return Err(Error::InvalidParameter(
                    "objective provides no exact line search and the bounded fallback is disabled"
                        .into(),
                ));
            }
        }
        StepRule::Short => {
            let l = ctx.smoothness.ok_or_else(|| {
                Error::InvalidParameter("short step requires a smoothness constant".into())
            })?;
            let denom = l * norm2_sq(ctx.dir);
            if denom <= 0.0 {
                0.0
            } else {
                (-dot(ctx.grad, ctx.dir) / denom).clamp(0.0, ctx.delta_max)
            }
        }
        StepRule::ConstantSfw | StepRule::ConstantSfwP => ctx
            .constant_step
            .ok_or_else(|| {
                Error::InvalidParameter("constant step rule requires mu and L".into())
            })?
            .min(ctx.delta_max),
        StepRule::Backtracking { tau1, tau2 } => {
            let state = bt.as_mut().ok_or_else(|| {
                Error::InvalidParameter("backtracking state not initialized".into())
            })?;
            let out = backtracking_routine(
                ctx.obj, ctx.x, ctx.dir, ctx.grad, state.l, state.mu, ctx.delta_max, tau1, tau2,
            )?;
            state.l = out.l;
            state.mu = out.mu;
            return Ok((out.delta, Some(out)));
        }
    };
    Ok((delta, None))
}
