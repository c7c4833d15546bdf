//! The standard Frank-Wolfe loop: `y_k = lmo(grad f(x_{k-1}))`, then a
//! convex-combination update.

use crate::error::Result;
use crate::linalg::{dot, lerp_into, sub};
use crate::polytopes::PolytopeModel;
use crate::solvers::step::{compute_step, BacktrackState, StepContext, StepRule};
use crate::solvers::trace::{StopReason, TraceBuilder};
use crate::solvers::{check_start, Objective, SolveResult, SolverOptions};

/// Standard FW. Stops when the FW gap `<grad f(x_k), x_k - y_{k+1}>` reaches
/// `opts.tol` or the iteration budget runs out. The trace's bound column
/// carries the best convexity lower bound `max_k f(x_k) - gap_k`.
pub fn solve_fw(
    obj: &dyn Objective,
    polytope: &PolytopeModel,
    x0: &[f64],
    opts: &SolverOptions,
) -> Result<SolveResult> {
    check_start(obj, polytope, x0)?;
    let mut tb = TraceBuilder::new("fw");
    let mut x = x0.to_vec();
    let mut bound = f64::NEG_INFINITY;
    let mut bt: Option<BacktrackState> = None;

    for k in 0..=opts.max_iter {
        let f_x = obj.value(&x);
        let g = obj.gradient(&x);
        if opts.step_rule.is_backtracking() && bt.is_none() {
            let probe: Vec<f64> = g.iter().map(|v| -v).collect();
            bt = Some(BacktrackState::probe(obj, &x, &g, &probe));
        }
        let y = polytope.lmo(&g)?;
        tb.lmo_calls += 1;
        let gap = dot(&g, &x) - dot(&g, &y);
        bound = bound.max(f_x - gap);
        if let Some(fs) = opts.known_fstar_bound {
            bound = bound.max(fs);
        }
        tb.push(k, f_x, gap, bound, 0.0, 0);

        if gap <= opts.tol {
            return Ok(SolveResult { x, trace: tb.finish(StopReason::Converged) });
        }
        if k == opts.max_iter {
            break;
        }

        let dir = sub(&y, &x);
        let ctx = StepContext {
            obj,
            x: &x,
            dir: &dir,
            grad: &g,
            step_index: k + 1,
            delta_max: 1.0,
            smoothness: obj.smoothness().or(bt.map(|s| s.l)),
            constant_step: constant_step(obj, polytope, opts.step_rule),
            line_search_fallback: opts.line_search_fallback,
        };
        let (delta, out) = compute_step(opts.step_rule, &ctx, &mut bt)?;
        if let Some(o) = out {
            let t = tb.trace_mut();
            t.bt_accepts += 1;
            t.bt_min_margin = t.bt_min_margin.min(o.margin);
        }
        lerp_into(&mut x, &y, delta);
    }
    Ok(SolveResult { x, trace: tb.finish(StopReason::MaxIterations) })
}

fn constant_step(obj: &dyn Objective, polytope: &PolytopeModel, rule: StepRule) -> Option<f64> {
    let (mu, l) = (obj.strong_convexity()?, obj.smoothness()?);
    let n = polytope.ambient_dim() as f64;
    match rule {
        StepRule::ConstantSfw => Some(mu / (2.0 * l * n * n)),
        StepRule::ConstantSfwP => {
            let eta = polytope.geometry().eta;
            Some(mu / (2.0 * l * (n + 1.0) * (n + 1.0) * eta * eta))
        }
        _ => None,
    }
}
