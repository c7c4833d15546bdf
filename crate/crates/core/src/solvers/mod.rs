//! Iterative first-order solvers over polytopes.
//!
//! All solvers share the same contract: they take an [`Objective`], a
//! [`PolytopeModel`](crate::polytopes::PolytopeModel), a starting point where
//! the algorithm permits one, and [`SolverOptions`]; they return the final
//! iterate plus a [`ConvergenceTrace`] with one row per (outer) iteration.
//! A solver run is single-threaded and owns its state; distinct runs over
//! shared immutable inputs may execute concurrently.

mod afw;
mod fw;
mod rsfw;
mod sfw;
mod step;
mod trace;

pub use afw::{solve_afw, solve_pfw};
pub use fw::solve_fw;
pub use rsfw::{solve_rsfw, solve_rsfw_p};
pub use sfw::{solve_sfw, solve_sfw_p};
pub use step::{
    backtracking_routine, golden_section_step, BacktrackOutcome, BacktrackState, StepRule,
};
pub use trace::{ConvergenceTrace, StopReason, TraceRow, TRACE_CSV_HEADER};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, sub};
use crate::polytopes::PolytopeModel;

/// Feasibility tolerance applied to starting points and maintained by every
/// solver iterate.
pub const FEASIBILITY_TOL: f64 = 1e-8;

/// A smooth convex objective.
///
/// `exact_line_search` returns the minimizer of `t -> f(x + t*dir)` over
/// `[0, max_step]` when a closed form exists; rules fall back to a bounded
/// golden-section search otherwise.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    /// Smoothness constant `L`, when known.
    fn smoothness(&self) -> Option<f64> {
        None
    }

    /// Strong-convexity constant `mu`, when known.
    fn strong_convexity(&self) -> Option<f64> {
        None
    }

    fn exact_line_search(&self, _x: &[f64], _dir: &[f64], _max_step: f64) -> Option<f64> {
        None
    }
}

/// Where the initial lower bound comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundPolicy {
    /// `B0 = f(x0) + <grad f(x0), lmo(grad) - x0>`; always valid by convexity.
    LmoBased,
    /// A user-supplied valid lower bound.
    Value(f64),
}

/// Inner-loop warm start for the refined solvers: the starting value of the
/// inner step counter, derived from the previous outer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarmStart {
    None,
    /// Start at `max(1, floor(J_prev / rho_prime))`.
    Ratio { rho_prime: f64 },
    /// Start at `max(1, floor(sqrt(d_bar_k / d_bar_prev) * J_prev))`.
    RadiusScaled,
}

/// Inner-loop direction correction for `solve_rsfw`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceleration {
    None,
    Away,
    Pairwise,
}

/// Shared solver configuration. Fields irrelevant to a given solver are
/// ignored by it.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Step rule for FW/SFW-family outer updates.
    pub step_rule: StepRule,
    /// Step rule for the refined solvers' inner loops.
    pub inner_rule: StepRule,
    /// Stop once `f(x_k) - B_k` (gap for plain FW/AFW/PFW) falls to this.
    pub tol: f64,
    /// Outer-iteration budget.
    pub max_iter: usize,
    /// Radius contraction ratio of the refined solvers.
    pub rho: f64,
    pub warm_start: WarmStart,
    pub accel: Acceleration,
    pub bound: BoundPolicy,
    /// Inner-iteration cap; `None` applies the default `10 * n`. The
    /// theoretical budget is astronomically large, so runs rely on the bound
    /// test breaking early; a cap that fires is flagged on the trace.
    pub inner_cap: Option<usize>,
    /// Fold a known optimal value into every bound update. Off by default.
    pub known_fstar_bound: Option<f64>,
    /// Allow golden-section fallback when no exact line search exists.
    pub line_search_fallback: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            step_rule: StepRule::LineSearch,
            inner_rule: StepRule::LineSearch,
            tol: 1e-8,
            max_iter: 100_000,
            rho: 1.01,
            warm_start: WarmStart::Ratio { rho_prime: 2.0 },
            accel: Acceleration::None,
            bound: BoundPolicy::LmoBased,
            inner_cap: None,
            known_fstar_bound: None,
            line_search_fallback: true,
        }
    }
}

/// Final iterate plus the per-iteration trace.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub trace: ConvergenceTrace,
}

pub(crate) fn check_start(
    obj: &dyn Objective,
    polytope: &PolytopeModel,
    x0: &[f64],
) -> Result<()> {
    let n = polytope.ambient_dim();
    if obj.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: obj.dim() });
    }
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    if !polytope.contains(x0, FEASIBILITY_TOL) {
        return Err(Error::Infeasible("starting point is outside the polytope".into()));
    }
    Ok(())
}

/// Resolves the initial lower bound, spending one plain LMO call when the
/// policy asks for it. Returns `(B0, lmo_calls_spent)`.
pub(crate) fn initial_bound(
    obj: &dyn Objective,
    polytope: &PolytopeModel,
    x0: &[f64],
    f0: f64,
    policy: BoundPolicy,
    known_fstar: Option<f64>,
) -> Result<(f64, u64)> {
    let (b0, calls) = match policy {
        BoundPolicy::Value(b) => {
            if b > f0 {
                return Err(Error::InvalidBound { b0: b, f0 });
            }
            (b, 0)
        }
        BoundPolicy::LmoBased => {
            let g = obj.gradient(x0);
            let y = polytope.lmo(&g)?;
            (f0 + dot(&g, &sub(&y, x0)), 1)
        }
    };
    let b0 = match known_fstar {
        Some(fs) => b0.max(fs),
        None => b0,
    };
    Ok((b0, calls))
}

/// Declared strong convexity, or an error naming the solver that needs it.
pub(crate) fn require_mu(obj: &dyn Objective, solver: &str) -> Result<f64> {
    match obj.strong_convexity() {
        Some(mu) if mu > 0.0 => Ok(mu),
        Some(mu) => Err(Error::InvalidParameter(format!(
            "{solver} needs mu > 0, objective declares {mu}"
        ))),
        None => Err(Error::InvalidParameter(format!(
            "{solver} needs a strong-convexity constant or the backtracking step rule"
        ))),
    }
}

pub(crate) fn require_l(obj: &dyn Objective, solver: &str) -> Result<f64> {
    match obj.smoothness() {
        Some(l) if l > 0.0 => Ok(l),
        _ => Err(Error::InvalidParameter(format!(
            "{solver} needs a smoothness constant or the backtracking step rule"
        ))),
    }
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::Objective;
    use crate::linalg::{dot, norm2_sq};

    /// f(x) = ||x - target||^2 with L = mu = 2 and closed-form line search.
    pub struct DistanceSq {
        pub target: Vec<f64>,
    }

    impl Objective for DistanceSq {
        fn dim(&self) -> usize {
            self.target.len()
        }
        fn value(&self, x: &[f64]) -> f64 {
            x.iter().zip(&self.target).map(|(a, b)| (a - b) * (a - b)).sum()
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            x.iter().zip(&self.target).map(|(a, b)| 2.0 * (a - b)).collect()
        }
        fn smoothness(&self) -> Option<f64> {
            Some(2.0)
        }
        fn strong_convexity(&self) -> Option<f64> {
            Some(2.0)
        }
        fn exact_line_search(&self, x: &[f64], dir: &[f64], max_step: f64) -> Option<f64> {
            let denom = 2.0 * norm2_sq(dir);
            if denom == 0.0 {
                return Some(0.0);
            }
            Some((-dot(&self.gradient(x), dir) / denom).clamp(0.0, max_step))
        }
    }
}
