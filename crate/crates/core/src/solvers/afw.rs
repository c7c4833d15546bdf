//! Away-step and pairwise Frank-Wolfe baselines with active-set bookkeeping.

use crate::error::Result;
use crate::linalg::{dot, sub};
use crate::polytopes::PolytopeModel;
use crate::solvers::step::{compute_step, BacktrackState, StepContext};
use crate::solvers::trace::{StopReason, TraceBuilder};
use crate::solvers::{check_start, Objective, SolveResult, SolverOptions};

const DROP_TOL: f64 = 1e-12;

/// Convex combination of polytope vertices carrying the current iterate.
/// Vertices are matched bitwise; the oracles produce each vertex
/// deterministically, so equal vertices are bit-identical.
#[derive(Debug, Clone)]
struct ActiveSet {
    atoms: Vec<(Vec<f64>, f64)>,
}

impl ActiveSet {
    fn from_point(polytope: &PolytopeModel, x: &[f64]) -> Result<Self> {
        let rep = polytope.caratheodory(x)?;
        Ok(Self { atoms: rep.atoms().to_vec() })
    }

    fn worst_atom(&self, g: &[f64]) -> usize {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (i, (v, _)) in self.atoms.iter().enumerate() {
            let score = dot(g, v);
            if score > best_score {
                best_score = score;
                best = i;
            }
        }
        best
    }

    fn index_of(&self, v: &[f64]) -> Option<usize> {
        self.atoms.iter().position(|(a, _)| a == v)
    }

    /// FW step toward `s`: scale all weights by `1 - delta`, add `delta` on `s`.
    fn fw_step(&mut self, s: &[f64], delta: f64) {
        for (_, w) in self.atoms.iter_mut() {
            *w *= 1.0 - delta;
        }
        match self.index_of(s) {
            Some(i) => self.atoms[i].1 += delta,
            None => self.atoms.push((s.to_vec(), delta)),
        }
        self.prune();
    }

    /// Away step from atom `v_idx`: scale by `1 + delta`, subtract on `v`.
    fn away_step(&mut self, v_idx: usize, delta: f64) {
        for (_, w) in self.atoms.iter_mut() {
            *w *= 1.0 + delta;
        }
        self.atoms[v_idx].1 -= delta;
        self.prune();
    }

    /// Pairwise: move `delta` of weight from `v_idx` onto `s`.
    fn pairwise_step(&mut self, s: &[f64], v_idx: usize, delta: f64) {
        self.atoms[v_idx].1 -= delta;
        match self.index_of(s) {
            Some(i) => self.atoms[i].1 += delta,
            None => self.atoms.push((s.to_vec(), delta)),
        }
        self.prune();
    }

    fn prune(&mut self) {
        self.atoms.retain(|(_, w)| *w > DROP_TOL);
        let sum: f64 = self.atoms.iter().map(|(_, w)| w).sum();
        if sum > 0.0 && (sum - 1.0).abs() > 1e-15 {
            for (_, w) in self.atoms.iter_mut() {
                *w /= sum;
            }
        }
    }

    #[cfg(test)]
    fn reconstruct(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (v, w) in &self.atoms {
            for i in 0..n {
                x[i] += w * v[i];
            }
        }
        x
    }
}

/// Away-steps Frank-Wolfe. The starting active set is the Carathéodory
/// representation of `x0` (a single atom when `x0` is a vertex).
pub fn solve_afw(
    obj: &dyn Objective,
    polytope: &PolytopeModel,
    x0: &[f64],
    opts: &SolverOptions,
) -> Result<SolveResult> {
    solve_corrective(obj, polytope, x0, opts, false)
}

/// Pairwise Frank-Wolfe.
pub fn solve_pfw(
    obj: &dyn Objective,
    polytope: &PolytopeModel,
    x0: &[f64],
    opts: &SolverOptions,
) -> Result<SolveResult> {
    solve_corrective(obj, polytope, x0, opts, true)
}

fn solve_corrective(
    obj: &dyn Objective,
    polytope: &PolytopeModel,
    x0: &[f64],
    opts: &SolverOptions,
    pairwise: bool,
) -> Result<SolveResult> {
    check_start(obj, polytope, x0)?;
    let mut tb = TraceBuilder::new(if pairwise { "pfw" } else { "afw" });
    let mut active = ActiveSet::from_point(polytope, x0)?;
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
        let s = polytope.lmo(&g)?;
        tb.lmo_calls += 1;
        let gap = dot(&g, &x) - dot(&g, &s);
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

        let v_idx = active.worst_atom(&g);
        let (v, alpha) = (active.atoms[v_idx].0.clone(), active.atoms[v_idx].1);

        enum Move {
            Fw,
            Away,
            Pair,
        }
        let (dir, delta_max, mv) = if pairwise {
            (sub(&s, &v), alpha, Move::Pair)
        } else {
            let away_score = dot(&g, &v) - dot(&g, &x);
            if gap >= away_score || alpha >= 1.0 - DROP_TOL {
                (sub(&s, &x), 1.0, Move::Fw)
            } else {
                (sub(&x, &v), alpha / (1.0 - alpha), Move::Away)
            }
        };

        if delta_max <= 0.0 {
            // Degenerate correction (the FW vertex is also the worst atom);
            // fall back to a plain FW step to keep progress.
            let dir = sub(&s, &x);
            let ctx = step_ctx(obj, &x, &dir, &g, k + 1, 1.0, &bt, opts);
            let (delta, _) = compute_step(opts.step_rule, &ctx, &mut bt)?;
            for (xi, di) in x.iter_mut().zip(&dir) {
                *xi += delta * di;
            }
            active.fw_step(&s, delta);
            continue;
        }

        let ctx = step_ctx(obj, &x, &dir, &g, k + 1, delta_max, &bt, opts);
        let (delta, out) = compute_step(opts.step_rule, &ctx, &mut bt)?;
        if let Some(o) = out {
            let t = tb.trace_mut();
            t.bt_accepts += 1;
            t.bt_min_margin = t.bt_min_margin.min(o.margin);
        }
        for (xi, di) in x.iter_mut().zip(&dir) {
            *xi += delta * di;
        }
        match mv {
            Move::Fw => active.fw_step(&s, delta),
            Move::Away => active.away_step(v_idx, delta),
            Move::Pair => active.pairwise_step(&s, v_idx, delta),
        }
    }
    Ok(SolveResult { x, trace: tb.finish(StopReason::MaxIterations) })
}

#[allow(clippy::too_many_arguments)]
fn step_ctx<'a>(
    obj: &'a dyn Objective,
    x: &'a [f64],
    dir: &'a [f64],
    g: &'a [f64],
    step_index: usize,
    delta_max: f64,
    bt: &Option<BacktrackState>,
    opts: &SolverOptions,
) -> StepContext<'a> {
    StepContext {
        obj,
        x,
        dir,
        grad: g,
        step_index,
        delta_max,
        smoothness: obj.smoothness().or(bt.map(|s| s.l)),
        constant_step: None,
        line_search_fallback: opts.line_search_fallback,
    }
}
