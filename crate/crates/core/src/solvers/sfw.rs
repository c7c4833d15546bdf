//! Simplex Frank-Wolfe: an SLMO step per iteration, a working lower bound
//! from the oracle, and a ball radius tied to the certified gap by
//! `d_k = sqrt(2 (f(x_k) - B_k) / mu)`.

use crate::error::{Error, Result};
use crate::linalg::{dot, lerp_into, sub};
use crate::oracles::{slmo_p_prepare, slmo_p_solve, slmo_prepare, slmo_solve};
use crate::polytopes::PolytopeModel;
use crate::solvers::step::{compute_step, BacktrackState, StepContext};
use crate::solvers::trace::{StopReason, TraceBuilder};
use crate::solvers::{
    check_start, initial_bound, require_l, require_mu, Objective, SolveResult, SolverOptions,
};

/// SFW over the unit simplex. Stops when `f(x_k) - B_k <= opts.tol`.
///
/// Eligible step rules for the linear-rate guarantee are line search, the
/// short step, and the constant step `mu/(2 L n^2)`; backtracking replaces
/// declared constants with running estimates.
pub fn solve_sfw(
    obj: &dyn Objective,
    polytope: &PolytopeModel,
    x0: &[f64],
    opts: &SolverOptions,
) -> Result<SolveResult> {
    if !matches!(polytope, PolytopeModel::Simplex { .. }) {
        return Err(Error::InvalidParameter("solve_sfw requires the unit simplex".into()));
    }
    solve_sfw_impl(obj, polytope, x0, opts, false)
}

/// SFW over an arbitrary polytope: the oracle runs on a Carathéodory
/// representation of the iterate with radius `(eta/D) d_{k-1}`, and the
/// representation is recomputed each iteration.
pub fn solve_sfw_p(
    obj: &dyn Objective,
    polytope: &PolytopeModel,
    x0: &[f64],
    opts: &SolverOptions,
) -> Result<SolveResult> {
    solve_sfw_impl(obj, polytope, x0, opts, true)
}

fn solve_sfw_impl(
    obj: &dyn Objective,
    polytope: &PolytopeModel,
    x0: &[f64],
    opts: &SolverOptions,
    generalized: bool,
) -> Result<SolveResult> {
    check_start(obj, polytope, x0)?;
    let name = if generalized { "sfw_p" } else { "sfw" };
    let n = polytope.ambient_dim() as f64;
    let geom = polytope.geometry();
    let radius_scale = if generalized { geom.eta / geom.diameter } else { 1.0 };

    let mut tb = TraceBuilder::new(name);
    let mut x = x0.to_vec();
    let mut f_x = obj.value(&x);

    let mut bt: Option<BacktrackState> = None;
    if opts.step_rule.is_backtracking() {
        let g0 = obj.gradient(&x);
        let probe: Vec<f64> = g0.iter().map(|v| -v).collect();
        bt = Some(BacktrackState::probe(obj, &x, &g0, &probe));
    }
    let mu_declared = if opts.step_rule.is_backtracking() {
        None
    } else {
        Some(require_mu(obj, name)?)
    };
    let l_declared = if opts.step_rule.is_backtracking() {
        None
    } else {
        Some(require_l(obj, name)?)
    };
    let effective_mu = |bt: &Option<BacktrackState>| mu_declared.or(bt.map(|s| s.mu)).unwrap();
    let effective_l = |bt: &Option<BacktrackState>| l_declared.or(bt.map(|s| s.l));

    let (mut bound, setup) =
        initial_bound(obj, polytope, &x, f_x, opts.bound, opts.known_fstar_bound)?;
    tb.trace_mut().setup_lmo_calls += setup;

    let mut radius = (2.0 * (f_x - bound).max(0.0) / effective_mu(&bt)).sqrt();
    if radius <= 0.0 {
        tb.push(0, f_x, 0.0, bound, 0.0, 0);
        return Ok(SolveResult { x, trace: tb.finish(StopReason::Converged) });
    }

    for k in 0..=opts.max_iter {
        let g = obj.gradient(&x);
        let y = if generalized {
            let rep = polytope.caratheodory(&x)?;
            let rb = slmo_p_prepare(&rep, radius_scale * radius)?;
            tb.trace_mut().prepare_calls += 1;
            let y = slmo_p_solve(&rb, polytope, &g)?;
            tb.lmo_calls += 1;
            tb.slmo2_calls += 1;
            y
        } else {
            let rb = slmo_prepare(&x, radius)?;
            tb.trace_mut().prepare_calls += 1;
            let y = slmo_solve(&rb, &g)?;
            tb.lmo_calls += 1;
            tb.slmo2_calls += 1;
            y
        };
        let gap = dot(&g, &x) - dot(&g, &y);
        tb.push(k, f_x, gap, bound, radius, 0);

        bound = bound.max(f_x - gap);
        if let Some(fs) = opts.known_fstar_bound {
            bound = bound.max(fs);
        }
        if f_x - bound <= opts.tol {
            return Ok(SolveResult { x, trace: tb.finish(StopReason::Converged) });
        }
        if k == opts.max_iter {
            break;
        }

        let dir = sub(&y, &x);
        let constant_step = mu_declared.zip(l_declared).map(|(mu, l)| {
            if generalized {
                mu / (2.0 * l * (n + 1.0) * (n + 1.0) * geom.eta * geom.eta)
            } else {
                mu / (2.0 * l * n * n)
            }
        });
        let ctx = StepContext {
            obj,
            x: &x,
            dir: &dir,
            grad: &g,
            step_index: k + 1,
            delta_max: 1.0,
            smoothness: effective_l(&bt),
            constant_step,
            line_search_fallback: opts.line_search_fallback,
        };
        let (delta, out) = compute_step(opts.step_rule, &ctx, &mut bt)?;
        if let Some(o) = out {
            let t = tb.trace_mut();
            t.bt_accepts += 1;
            t.bt_min_margin = t.bt_min_margin.min(o.margin);
        }
        lerp_into(&mut x, &y, delta);
        f_x = obj.value(&x);
        radius = (2.0 * (f_x - bound).max(0.0) / effective_mu(&bt)).sqrt();
        if radius <= 0.0 {
            // Ball collapsed to the point x, where the restricted gap is 0.
            tb.push(k + 1, f_x, 0.0, bound, 0.0, 0);
            return Ok(SolveResult { x, trace: tb.finish(StopReason::Converged) });
        }
    }
    Ok(SolveResult { x, trace: tb.finish(StopReason::MaxIterations) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::test_util::DistanceSq;
    use crate::solvers::StepRule;
    use crate::solvers::BoundPolicy;

    fn simplex_interior_target(n: usize) -> DistanceSq {
        let total: f64 = (1..=n).map(|i| i as f64).sum();
        DistanceSq { target: (1..=n).map(|i| i as f64 / total).collect() }
    }

    #[test]
    fn starting_at_the_optimum_stops_in_one_iteration() {
        let n = 5;
        let p = PolytopeModel::simplex(n).unwrap();
        let obj = simplex_interior_target(n);
        let x0 = obj.target.clone();
        let opts = SolverOptions { tol: 1e-10, bound: BoundPolicy::Value(-1.0), ..Default::default() };
        let res = solve_sfw(&obj, &p, &x0, &opts).unwrap();
        assert_eq!(res.trace.stop_reason, StopReason::Converged);
        assert_eq!(res.trace.rows.len(), 1);
        assert!(res.trace.rows[0].gap.abs() < 1e-12);
    }

    #[test]
    fn envelope_holds_for_all_three_eligible_rules() {
        let n = 10;
        let p = PolytopeModel::simplex(n).unwrap();
        let obj = simplex_interior_target(n);
        let x0 = vec![1.0 / n as f64; n];
        let (mu, l) = (2.0, 2.0);
        for rule in [StepRule::LineSearch, StepRule::Short, StepRule::ConstantSfw] {
            let opts = SolverOptions {
                step_rule: rule,
                tol: 1e-10,
                max_iter: 30_000,
                ..Default::default()
            };
            let res = solve_sfw(&obj, &p, &x0, &opts).unwrap();
            assert_eq!(res.trace.stop_reason, StopReason::Converged, "{rule:?}");
            let d0 = res.trace.rows[0].radius;
            let scale = 0.5 * mu * d0 * d0;
            let rate = mu / (4.0 * l * (n * n) as f64);
            for row in &res.trace.rows {
                let env = scale * (-rate * row.k as f64).exp();
                assert!(
                    row.f - row.bound <= env * (1.0 + 1e-9) + 1e-12 * scale.max(1.0),
                    "{rule:?} k={} f-B={} env={}",
                    row.k,
                    row.f - row.bound,
                    env
                );
            }
        }
    }

    #[test]
    fn radius_is_nonincreasing_and_bound_nondecreasing() {
        let n = 12;
        let p = PolytopeModel::simplex(n).unwrap();
        let obj = simplex_interior_target(n);
        let x0 = vec![1.0 / n as f64; n];
        let opts = SolverOptions { tol: 1e-9, ..Default::default() };
        let res = solve_sfw(&obj, &p, &x0, &opts).unwrap();
        for w in res.trace.rows.windows(2) {
            assert!(w[1].bound >= w[0].bound - 1e-15);
            assert!(w[1].radius <= w[0].radius + 1e-15);
        }
    }

    #[test]
    fn rejects_invalid_initial_bound_and_wrong_polytope() {
        let n = 4;
        let p = PolytopeModel::simplex(n).unwrap();
        let obj = simplex_interior_target(n);
        let x0 = vec![1.0 / n as f64; n];
        let opts = SolverOptions { bound: BoundPolicy::Value(1e9), ..Default::default() };
        assert!(matches!(
            solve_sfw(&obj, &p, &x0, &opts),
            Err(Error::InvalidBound { .. })
        ));
        let h = PolytopeModel::hypercube(n).unwrap();
        assert!(solve_sfw(&obj, &h, &x0, &SolverOptions::default()).is_err());
    }

    #[test]
    fn sfw_p_on_the_simplex_matches_sfw_trace() {
        // With eta = D the radius scaling is 1 and, on full-support iterates,
        // the generalized oracle coincides with the simplex oracle.
        let n = 6;
        let p = PolytopeModel::simplex(n).unwrap();
        let obj = simplex_interior_target(n);
        let x0 = vec![1.0 / n as f64; n];
        let opts = SolverOptions { tol: 1e-8, step_rule: StepRule::Short, ..Default::default() };
        let a = solve_sfw(&obj, &p, &x0, &opts).unwrap();
        let b = solve_sfw_p(&obj, &p, &x0, &opts).unwrap();
        assert_eq!(a.trace.rows.len(), b.trace.rows.len());
        for (ra, rb) in a.trace.rows.iter().zip(&b.trace.rows) {
            assert!((ra.f - rb.f).abs() <= 1e-10 * (1.0 + ra.f.abs()));
            assert!((ra.gap - rb.gap).abs() <= 1e-9 * (1.0 + ra.gap.abs()));
        }
    }

    #[test]
    fn sfw_p_envelope_on_the_hypercube() {
        let n = 6;
        let p = PolytopeModel::hypercube(n).unwrap();
        let obj = DistanceSq { target: vec![0.3; n] };
        let x0 = vec![0.0; n];
        let opts = SolverOptions { tol: 1e-9, step_rule: StepRule::LineSearch, ..Default::default() };
        let res = solve_sfw_p(&obj, &p, &x0, &opts).unwrap();
        assert_eq!(res.trace.stop_reason, StopReason::Converged);
        let (mu, l) = (2.0, 2.0);
        let eta = p.geometry().eta;
        let d0 = res.trace.rows[0].radius;
        let scale = 0.5 * mu * d0 * d0;
        let nf = n as f64;
        let rate = mu / (4.0 * l * (nf + 1.0) * (nf + 1.0) * eta * eta);
        for row in &res.trace.rows {
            let env = scale * (-rate * row.k as f64).exp();
            assert!(row.f - row.bound <= env * (1.0 + 1e-9) + 1e-12 * scale.max(1.0));
        }
        // One SLMO (prepare + solve) per iteration.
        assert_eq!(res.trace.prepare_calls as usize, res.trace.rows.len());
        assert_eq!(res.trace.last_row().unwrap().slmo2_calls as usize, res.trace.rows.len());
    }

    #[test]
    fn iterates_stay_feasible() {
        let n = 5;
        let p = PolytopeModel::l1_ball(n).unwrap();
        let mut target = vec![0.0; n];
        target[0] = 0.6;
        target[2] = -0.4;
        let obj = DistanceSq { target };
        let x0 = vec![0.0; n];
        let opts = SolverOptions { tol: 1e-9, ..Default::default() };
        let res = solve_sfw_p(&obj, &p, &x0, &opts).unwrap();
        assert!(p.contains(&res.x, crate::solvers::FEASIBILITY_TOL));
        assert_eq!(res.trace.stop_reason, StopReason::Converged);
    }
}
