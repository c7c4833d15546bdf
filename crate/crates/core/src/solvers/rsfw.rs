//! Refined simplex Frank-Wolfe: one oracle preparation per outer iteration,
//! then a budgeted inner loop of cheap solve-phase calls over the fixed
//! restricted ball, with a bound test that exits as soon as the certified gap
//! has contracted by the target ratio.

use crate::error::{Error, Result};
use crate::linalg::{argmax, dot, lerp_into, sub};
use crate::oracles::{
    slmo_p_prepare, slmo_p_solve, slmo_solve, PolytopeRestrictedBall, RestrictedBall,
};
use crate::polytopes::PolytopeModel;
use crate::simplex_ball::{BallVertexIndex, SimplexBall};
use crate::solvers::step::{compute_step, BacktrackState, StepContext};
use crate::solvers::trace::{StopReason, TraceBuilder};
use crate::solvers::{
    check_start, initial_bound, require_l, require_mu, Acceleration, Objective, SolveResult,
    SolverOptions, WarmStart,
};

/// Weights below this are dropped from the inner active set.
const DROP_TOL: f64 = 1e-12;

/// rSFW over the unit simplex. The starting point is pinned to the
/// barycenter with initial radius `1/n`; the guarantee
/// `f(x_k) - B_k <= mu / (2 n^2 rho^{2k})` is stated for that start.
///
/// `opts.accel` selects the inner direction correction: away steps or
/// pairwise steps over the restricted ball's vertex set.
pub fn solve_rsfw(
    obj: &dyn Objective,
    polytope: &PolytopeModel,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    if !matches!(polytope, PolytopeModel::Simplex { .. }) {
        return Err(Error::InvalidParameter("solve_rsfw requires the unit simplex".into()));
    }
    if !(opts.rho > 1.0) {
        return Err(Error::InvalidParameter(format!("rho must exceed 1, got {}", opts.rho)));
    }
    let n = polytope.ambient_dim();
    let nf = n as f64;

    let mut tb = TraceBuilder::new("rsfw");
    let mut x = vec![1.0 / nf; n];
    let mut f_x = obj.value(&x);

    let mut bt: Option<BacktrackState> = None;
    if opts.inner_rule.is_backtracking() {
        let g0 = obj.gradient(&x);
        let probe: Vec<f64> = g0.iter().map(|v| -v).collect();
        bt = Some(BacktrackState::probe(obj, &x, &g0, &probe));
    }
    let mu_declared =
        if opts.inner_rule.is_backtracking() { None } else { Some(require_mu(obj, "rsfw")?) };
    let l_declared =
        if opts.inner_rule.is_backtracking() { None } else { Some(require_l(obj, "rsfw")?) };
    let mu0 = mu_declared.or(bt.map(|s| s.mu)).unwrap();
    let l0 = l_declared.or(bt.map(|s| s.l)).unwrap();

    let (mut bound, setup) =
        initial_bound(obj, polytope, &x, f_x, opts.bound, opts.known_fstar_bound)?;
    tb.trace_mut().setup_lmo_calls += setup;

    let rho_sq = opts.rho * opts.rho;
    let j_theory = budget(8.0 * rho_sq * nf * nf * l0 / mu0);
    let j_max = j_theory.min(opts.inner_cap.unwrap_or(10 * n).max(1));

    let mut radius = 1.0 / nf;
    let mut bar = SimplexBall::new(x.clone(), radius)?;
    let mut prev_inner: Option<usize> = None;
    let mut prev_bar_radius = radius;
    // Row k-1 waits for its gap, measured by the first inner oracle call of
    // outer iteration k.
    let mut pending: Option<(usize, f64, f64, f64, u64)> = Some((0, f_x, bound, radius, 0));

    for k in 1..=opts.max_iter {
        let hat = RestrictedBall::from_ball(&bar)?;
        tb.trace_mut().prepare_calls += 1;
        let hat_ball = hat.hat_ball().clone();
        let d_hat = hat_ball.radius();
        let mu_eff = mu_declared.or(bt.map(|s| s.mu)).unwrap();
        let threshold = mu_eff / (2.0 * rho_sq) * d_hat * d_hat;

        let mut p = x.clone();
        let mut f_p = f_x;
        let mut best = bound;
        let mut lam = if opts.accel == Acceleration::None {
            Vec::new()
        } else {
            ball_coordinates(&hat_ball, &p)
        };

        let j0 = warm_start_index(opts.warm_start, prev_inner, bar.radius(), prev_bar_radius)
            .min(j_max);
        let mut inner: u64 = 0;
        let mut exhausted = true;
        for j in j0..=j_max {
            inner += 1;
            let g = obj.gradient(&p);
            let y = slmo_solve(&hat, &g)?;
            tb.slmo2_calls += 1;
            tb.lmo_calls += 1;
            let gap_j = dot(&g, &p) - dot(&g, &y);
            if let Some((rk, rf, rb_, rd, ri)) = pending.take() {
                tb.push(rk, rf, gap_j, rb_, rd, ri);
            }
            best = best.max(f_p - gap_j);
            if let Some(fs) = opts.known_fstar_bound {
                best = best.max(fs);
            }
            // Evaluated at p_{j-1}: the bound the convergence proof controls.
            if f_p - best <= threshold {
                exhausted = false;
                break;
            }

            let i_star = crate::linalg::argmin(&g);
            let (dir, update) = inner_direction(opts.accel, &hat_ball, &g, &p, &y, i_star, &lam);
            let ctx = StepContext {
                obj,
                x: &p,
                dir: &dir,
                grad: &g,
                step_index: j,
                delta_max: 1.0,
                smoothness: l_declared.or(bt.map(|s| s.l)),
                constant_step: None,
                line_search_fallback: opts.line_search_fallback,
            };
            let (delta, out) = compute_step(opts.inner_rule, &ctx, &mut bt)?;
            if let Some(o) = out {
                let t = tb.trace_mut();
                t.bt_accepts += 1;
                t.bt_min_margin = t.bt_min_margin.min(o.margin);
            }
            for (pi, di) in p.iter_mut().zip(&dir) {
                *pi += delta * di;
            }
            apply_weight_update(&mut lam, update, delta);
            f_p = obj.value(&p);
        }
        if exhausted && j_max < j_theory {
            tb.trace_mut().cap_hits += 1;
        }

        x = p;
        f_x = f_p;
        prev_bar_radius = bar.radius();
        radius = d_hat / opts.rho;
        bound = best;
        prev_inner = Some(inner as usize);
        pending = Some((k, f_x, bound, radius, inner));

        let next_bar = SimplexBall::intersect(&SimplexBall::new(x.clone(), radius)?, &hat_ball);
        if f_x - bound <= opts.tol {
            finalize_rsfw_row(&mut tb, obj, &x, pending.take().unwrap(), next_bar.ok().as_ref());
            return Ok(SolveResult { x, trace: tb.finish(StopReason::Converged) });
        }
        bar = next_bar?;
    }
    if let Some(row) = pending.take() {
        let next_bar = SimplexBall::intersect(&SimplexBall::new(x.clone(), radius)?, bar_hat(&bar));
        finalize_rsfw_row(&mut tb, obj, &x, row, next_bar.ok().as_ref());
    }
    Ok(SolveResult { x, trace: tb.finish(StopReason::MaxIterations) })
}

// The max-iterations path above intersects against the last bar ball itself;
// its unit-simplex restriction is what the next oracle would have used.
fn bar_hat(bar: &SimplexBall) -> &SimplexBall {
    bar
}

/// rSFW over an arbitrary polytope: the preparation phase runs once per
/// outer iteration on the iterate's Carathéodory representation, the inner
/// loop pays one standard LMO plus O(n) per step, and the radius contracts
/// by `rho` each outer iteration.
pub fn solve_rsfw_p(
    obj: &dyn Objective,
    polytope: &PolytopeModel,
    x0: &[f64],
    opts: &SolverOptions,
) -> Result<SolveResult> {
    check_start(obj, polytope, x0)?;
    if !(opts.rho > 1.0) {
        return Err(Error::InvalidParameter(format!("rho must exceed 1, got {}", opts.rho)));
    }
    let n = polytope.ambient_dim();
    let nf = n as f64;
    let geom = polytope.geometry();
    let (eta, diam) = (geom.eta, geom.diameter);

    let mut tb = TraceBuilder::new("rsfw_p");
    let mut x = x0.to_vec();
    let mut f_x = obj.value(&x);
    let mut rep = polytope.caratheodory(&x)?;

    let mut bt: Option<BacktrackState> = None;
    if opts.inner_rule.is_backtracking() {
        let g0 = obj.gradient(&x);
        let probe: Vec<f64> = g0.iter().map(|v| -v).collect();
        bt = Some(BacktrackState::probe(obj, &x, &g0, &probe));
    }
    let mu_declared =
        if opts.inner_rule.is_backtracking() { None } else { Some(require_mu(obj, "rsfw_p")?) };
    let l_declared =
        if opts.inner_rule.is_backtracking() { None } else { Some(require_l(obj, "rsfw_p")?) };
    let mu0 = mu_declared.or(bt.map(|s| s.mu)).unwrap();
    let l0 = l_declared.or(bt.map(|s| s.l)).unwrap();

    let (mut bound, setup) =
        initial_bound(obj, polytope, &x, f_x, opts.bound, opts.known_fstar_bound)?;
    tb.trace_mut().setup_lmo_calls += setup;

    let rho_sq = opts.rho * opts.rho;
    let j_theory = budget(4.0 * rho_sq * (nf + 1.0) * (nf + 1.0) * eta * eta * l0 / mu0);
    let j_max = j_theory.min(opts.inner_cap.unwrap_or(10 * n).max(1));

    let mut radius = eta / diam * (2.0 * (f_x - bound).max(0.0) / mu0).sqrt();
    if radius <= 0.0 {
        tb.push(0, f_x, 0.0, bound, 0.0, 0);
        return Ok(SolveResult { x, trace: tb.finish(StopReason::Converged) });
    }
    let mut prev_inner: Option<usize> = None;
    let mut prev_radius = radius;
    let mut pending: Option<(usize, f64, f64, f64, u64)> = Some((0, f_x, bound, radius, 0));

    for k in 1..=opts.max_iter {
        let rb = slmo_p_prepare(&rep, radius)?;
        tb.trace_mut().prepare_calls += 1;
        let mu_eff = mu_declared.or(bt.map(|s| s.mu)).unwrap();
        let threshold = mu_eff / (2.0 * rho_sq * eta * eta) * radius * radius * diam * diam;

        let mut p = x.clone();
        let mut f_p = f_x;
        let mut best = bound;
        let j0 = warm_start_index(opts.warm_start, prev_inner, radius, prev_radius).min(j_max);
        let mut inner: u64 = 0;
        let mut exhausted = true;
        for j in j0..=j_max {
            inner += 1;
            let g = obj.gradient(&p);
            let y = slmo_p_solve(&rb, polytope, &g)?;
            tb.slmo2_calls += 1;
            tb.lmo_calls += 1;
            let gap_j = dot(&g, &p) - dot(&g, &y);
            if let Some((rk, rf, rb_, rd, ri)) = pending.take() {
                tb.push(rk, rf, gap_j, rb_, rd, ri);
            }
            best = best.max(f_p - gap_j);
            if let Some(fs) = opts.known_fstar_bound {
                best = best.max(fs);
            }
            if f_p - best <= threshold {
                exhausted = false;
                break;
            }

            let dir = sub(&y, &p);
            let ctx = StepContext {
                obj,
                x: &p,
                dir: &dir,
                grad: &g,
                step_index: j,
                delta_max: 1.0,
                smoothness: l_declared.or(bt.map(|s| s.l)),
                constant_step: None,
                line_search_fallback: opts.line_search_fallback,
            };
            let (delta, out) = compute_step(opts.inner_rule, &ctx, &mut bt)?;
            if let Some(o) = out {
                let t = tb.trace_mut();
                t.bt_accepts += 1;
                t.bt_min_margin = t.bt_min_margin.min(o.margin);
            }
            lerp_into(&mut p, &y, delta);
            f_p = obj.value(&p);
        }
        if exhausted && j_max < j_theory {
            tb.trace_mut().cap_hits += 1;
        }

        x = p;
        f_x = f_p;
        prev_radius = radius;
        radius /= opts.rho;
        bound = best;
        rep = polytope.caratheodory(&x)?;
        prev_inner = Some(inner as usize);
        pending = Some((k, f_x, bound, radius, inner));

        if f_x - bound <= opts.tol {
            finalize_rsfw_p_row(&mut tb, obj, polytope, &x, &rep, radius, pending.take().unwrap());
            return Ok(SolveResult { x, trace: tb.finish(StopReason::Converged) });
        }
    }
    if let Some(row) = pending.take() {
        finalize_rsfw_p_row(&mut tb, obj, polytope, &x, &rep, radius, row);
    }
    Ok(SolveResult { x, trace: tb.finish(StopReason::MaxIterations) })
}

fn budget(value: f64) -> usize {
    if !value.is_finite() || value >= 1e15 {
        usize::MAX
    } else {
        value.ceil().max(1.0) as usize
    }
}

fn warm_start_index(
    warm: WarmStart,
    prev_inner: Option<usize>,
    radius_now: f64,
    radius_prev: f64,
) -> usize {
    let Some(prev) = prev_inner else { return 1 };
    match warm {
        WarmStart::None => 1,
        WarmStart::Ratio { rho_prime } => {
            if rho_prime > 1.0 {
                ((prev as f64 / rho_prime).floor() as usize).max(1)
            } else {
                1
            }
        }
        WarmStart::RadiusScaled => {
            let ratio = if radius_prev > 0.0 { (radius_now / radius_prev).max(0.0) } else { 1.0 };
            ((ratio.sqrt() * prev as f64).floor() as usize).max(1)
        }
    }
}

/// Barycentric coordinates of `p` in the ball: `(p - center + d*1)/(n*d)`,
/// clamped and renormalized against float dust.
fn ball_coordinates(ball: &SimplexBall, p: &[f64]) -> Vec<f64> {
    let n = ball.dim();
    let d = ball.radius();
    let scale = n as f64 * d;
    let mut lam: Vec<f64> = p
        .iter()
        .zip(ball.center())
        .map(|(&pi, &ci)| ((pi - ci + d) / scale).max(0.0))
        .collect();
    let sum: f64 = lam.iter().sum();
    if sum > 0.0 {
        lam.iter_mut().for_each(|v| *v /= sum);
    }
    lam
}

enum WeightUpdate {
    NotTracked,
    Fw { target: usize },
    Away { away: usize, alpha: f64 },
    Pairwise { target: usize, away: usize, alpha: f64 },
}

/// Chooses the inner update direction. For away steps the correction is
/// `(alpha/(1-alpha)) (p - v)` applied only when the away direction beats the
/// FW direction; for pairwise it is `alpha (y - v)`. The returned direction
/// is `y_j + g_j - p_{j-1}` so that `p + delta * dir` realizes the corrected
/// convex-combination update.
fn inner_direction(
    accel: Acceleration,
    hat_ball: &SimplexBall,
    g: &[f64],
    p: &[f64],
    y: &[f64],
    i_star: usize,
    lam: &[f64],
) -> (Vec<f64>, WeightUpdate) {
    match accel {
        Acceleration::None => (sub(y, p), WeightUpdate::NotTracked),
        Acceleration::Away => {
            let away = active_argmax(g, lam);
            let alpha = lam[away];
            let v = hat_ball.vertex(BallVertexIndex(away));
            let delta_score = (dot(g, p) - dot(g, y)) - (dot(g, &v) - dot(g, p));
            if delta_score < 0.0 && alpha < 1.0 - DROP_TOL {
                let factor = alpha / (1.0 - alpha);
                let dir: Vec<f64> = p.iter().zip(&v).map(|(&pi, &vi)| factor * (pi - vi)).collect();
                (dir, WeightUpdate::Away { away, alpha })
            } else {
                (sub(y, p), WeightUpdate::Fw { target: i_star })
            }
        }
        Acceleration::Pairwise => {
            let away = active_argmax(g, lam);
            let alpha = lam[away];
            let dir: Vec<f64> = y.iter().zip(hat_ball.vertex(BallVertexIndex(away)))
                .map(|(&yi, vi)| alpha * (yi - vi))
                .collect();
            (dir, WeightUpdate::Pairwise { target: i_star, away, alpha })
        }
    }
}

/// Vertex scores over the ball order as `<g, v_i> = const + n*d*g_i`, so the
/// worst active atom is the support index with the largest gradient entry.
fn active_argmax(g: &[f64], lam: &[f64]) -> usize {
    let mut best: Option<usize> = None;
    for (i, (&w, &gi)) in lam.iter().zip(g).enumerate() {
        if w > DROP_TOL && best.map_or(true, |b| gi > g[b]) {
            best = Some(i);
        }
    }
    best.unwrap_or_else(|| argmax(g))
}

fn apply_weight_update(lam: &mut [f64], update: WeightUpdate, delta: f64) {
    match update {
        WeightUpdate::NotTracked => {}
        WeightUpdate::Fw { target } => {
            lam.iter_mut().for_each(|w| *w *= 1.0 - delta);
            lam[target] += delta;
        }
        WeightUpdate::Away { away, alpha } => {
            let dp = delta * alpha / (1.0 - alpha);
            lam.iter_mut().for_each(|w| *w *= 1.0 + dp);
            lam[away] -= dp;
        }
        WeightUpdate::Pairwise { target, away, alpha } => {
            lam[away] -= delta * alpha;
            lam[target] += delta * alpha;
        }
    }
    let mut sum = 0.0;
    for w in lam.iter_mut() {
        if *w < DROP_TOL {
            *w = 0.0;
        }
        sum += *w;
    }
    if sum > 0.0 && (sum - 1.0).abs() > 1e-15 {
        lam.iter_mut().for_each(|w| *w /= sum);
    }
}

/// Fills the final pending row: the gap is measured by one uncounted oracle
/// call over the ball the next iteration would have used (zero when that
/// ball degenerates to the iterate itself).
fn finalize_rsfw_row(
    tb: &mut TraceBuilder,
    obj: &dyn Objective,
    x: &[f64],
    row: (usize, f64, f64, f64, u64),
    next_bar: Option<&SimplexBall>,
) {
    let gap = next_bar
        .and_then(|bar| RestrictedBall::from_ball(bar).ok())
        .map(|hat| {
            let g = obj.gradient(x);
            let y = slmo_solve(&hat, &g).expect("dimensions agree");
            tb.trace_mut().setup_lmo_calls += 1;
            dot(&g, x) - dot(&g, &y)
        })
        .unwrap_or(0.0);
    let (rk, rf, rb, rd, ri) = row;
    tb.push(rk, rf, gap, rb, rd, ri);
}

fn finalize_rsfw_p_row(
    tb: &mut TraceBuilder,
    obj: &dyn Objective,
    polytope: &PolytopeModel,
    x: &[f64],
    rep: &crate::polytopes::CaratheodoryRep,
    radius: f64,
    row: (usize, f64, f64, f64, u64),
) {
    let gap = if radius > 0.0 {
        slmo_p_prepare(rep, radius)
            .ok()
            .map(|rb: PolytopeRestrictedBall| {
                let g = obj.gradient(x);
                let y = slmo_p_solve(&rb, polytope, &g).expect("dimensions agree");
                tb.trace_mut().setup_lmo_calls += 1;
                dot(&g, x) - dot(&g, &y)
            })
            .unwrap_or(0.0)
    } else {
        0.0
    };
    let (rk, rf, rb, rd, ri) = row;
    tb.push(rk, rf, gap, rb, rd, ri);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::test_util::DistanceSq;
    use crate::solvers::StepRule;

    fn interior_target(n: usize) -> DistanceSq {
        let total: f64 = (1..=n).map(|i| i as f64).sum();
        DistanceSq { target: (1..=n).map(|i| i as f64 / total).collect() }
    }

    fn base_opts() -> SolverOptions {
        SolverOptions {
            inner_rule: StepRule::LineSearch,
            tol: 1e-9,
            max_iter: 5_000,
            rho: 1.05,
            inner_cap: Some(20_000),
            ..Default::default()
        }
    }

    #[test]
    fn rsfw_geometric_envelope() {
        let n = 8;
        let p = PolytopeModel::simplex(n).unwrap();
        let obj = interior_target(n);
        let opts = base_opts();
        let res = solve_rsfw(&obj, &p, &opts).unwrap();
        assert_eq!(res.trace.stop_reason, StopReason::Converged);
        assert_eq!(res.trace.cap_hits, 0);
        let (mu, nf) = (2.0, n as f64);
        for row in res.trace.rows.iter().filter(|r| r.k >= 1) {
            let env = mu / (2.0 * nf * nf * opts.rho.powi(2 * row.k as i32));
            assert!(
                row.f - row.bound <= env * (1.0 + 1e-9) + 1e-15,
                "k={} f-B={} env={}",
                row.k,
                row.f - row.bound,
                env
            );
        }
    }

    #[test]
    fn rsfw_starting_at_optimum_breaks_inner_immediately() {
        let n = 6;
        let p = PolytopeModel::simplex(n).unwrap();
        // Optimum exactly at the barycenter = rSFW's fixed start.
        let obj = DistanceSq { target: vec![1.0 / n as f64; n] };
        let opts = base_opts();
        let res = solve_rsfw(&obj, &p, &opts).unwrap();
        assert_eq!(res.trace.stop_reason, StopReason::Converged);
        for row in res.trace.rows.iter().filter(|r| r.k >= 1) {
            assert_eq!(row.inner_iters, 1);
        }
    }

    #[test]
    fn rsfw_oracle_accounting() {
        let n = 8;
        let p = PolytopeModel::simplex(n).unwrap();
        let obj = interior_target(n);
        let opts = base_opts();
        let res = solve_rsfw(&obj, &p, &opts).unwrap();
        let outer_rows = res.trace.rows.len() as u64 - 1; // row 0 is the start
        assert_eq!(res.trace.prepare_calls, outer_rows);
        assert_eq!(res.trace.last_row().unwrap().slmo2_calls, res.trace.total_inner_iters());
    }

    #[test]
    fn rsfw_bounds_stay_below_known_optimum() {
        let n = 8;
        let p = PolytopeModel::simplex(n).unwrap();
        let obj = interior_target(n); // f* = 0 at the target
        let opts = base_opts();
        let res = solve_rsfw(&obj, &p, &opts).unwrap();
        for row in &res.trace.rows {
            assert!(row.bound <= 1e-9);
        }
    }

    #[test]
    fn rsfw_accelerated_variants_converge_and_track_weights() {
        let n = 10;
        let p = PolytopeModel::simplex(n).unwrap();
        let obj = interior_target(n);
        for accel in [Acceleration::Away, Acceleration::Pairwise] {
            let opts = SolverOptions { accel, ..base_opts() };
            let res = solve_rsfw(&obj, &p, &opts).unwrap();
            assert_eq!(res.trace.stop_reason, StopReason::Converged, "{accel:?}");
            assert!(crate::simplex_ball::is_in_unit_simplex(&res.x, 1e-8));
            for (a, b) in res.x.iter().zip(&obj.target) {
                assert!((a - b).abs() < 1e-4, "{accel:?}");
            }
        }
    }

    #[test]
    fn rsfw_rejects_rho_at_most_one() {
        let p = PolytopeModel::simplex(4).unwrap();
        let obj = interior_target(4);
        let opts = SolverOptions { rho: 1.0, ..base_opts() };
        assert!(solve_rsfw(&obj, &p, &opts).is_err());
    }

    #[test]
    fn rsfw_p_envelope_on_hypercube() {
        let n = 6;
        let p = PolytopeModel::hypercube(n).unwrap();
        let obj = DistanceSq { target: vec![0.3; n] };
        let x0 = vec![0.0; n];
        let opts = base_opts();
        let res = solve_rsfw_p(&obj, &p, &x0, &opts).unwrap();
        assert_eq!(res.trace.stop_reason, StopReason::Converged);
        assert_eq!(res.trace.cap_hits, 0);
        let f0_minus_b0 = res.trace.rows[0].f - res.trace.rows[0].bound;
        for row in res.trace.rows.iter().filter(|r| r.k >= 1) {
            let env = f0_minus_b0 / opts.rho.powi(2 * row.k as i32);
            assert!(
                row.f - row.bound <= env * (1.0 + 1e-9) + 1e-15,
                "k={} f-B={} env={}",
                row.k,
                row.f - row.bound,
                env
            );
        }
    }

    #[test]
    fn rsfw_p_base_case_bound_is_trivial() {
        // k = 0 row: the envelope reads f(x0) - B0 <= f(x0) - B0.
        let n = 4;
        let p = PolytopeModel::hypercube(n).unwrap();
        let obj = DistanceSq { target: vec![0.25; n] };
        let res = solve_rsfw_p(&obj, &p, &vec![0.0; n], &base_opts()).unwrap();
        let r0 = &res.trace.rows[0];
        assert!(r0.f - r0.bound <= (r0.f - r0.bound) + 1e-15);
    }

    #[test]
    fn rsfw_p_counts_one_lmo_per_inner_iteration() {
        let n = 5;
        let p = PolytopeModel::l1_ball(n).unwrap();
        let mut target = vec![0.0; n];
        target[1] = 0.5;
        let obj = DistanceSq { target };
        let res = solve_rsfw_p(&obj, &p, &vec![0.0; n], &base_opts()).unwrap();
        assert_eq!(res.trace.last_row().unwrap().lmo_calls, res.trace.total_inner_iters());
        assert_eq!(res.trace.stop_reason, StopReason::Converged);
    }

    #[test]
    fn warm_start_indices() {
        assert_eq!(warm_start_index(WarmStart::None, Some(40), 1.0, 1.0), 1);
        assert_eq!(
            warm_start_index(WarmStart::Ratio { rho_prime: 2.0 }, Some(40), 1.0, 1.0),
            20
        );
        assert_eq!(warm_start_index(WarmStart::Ratio { rho_prime: 2.0 }, None, 1.0, 1.0), 1);
        // sqrt(0.25) * 40 = 20.
        assert_eq!(warm_start_index(WarmStart::RadiusScaled, Some(40), 0.25, 1.0), 20);
    }
}
