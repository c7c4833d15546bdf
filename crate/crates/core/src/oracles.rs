//! Restricted linear-minimization oracles.
//!
//! `slmo` minimizes a linear objective over `S(x, d) ∩ S_n`. It splits into a
//! preparation phase (building the intersection ball, one pass of vector
//! min/max work) and a solve phase (one scan of the objective plus one vector
//! add). The solve phase is what the refined solvers call in their inner
//! loops, so it must stay allocation-light and sort-free.
//!
//! `slmo_p` generalizes the oracle to an arbitrary polytope through a
//! Carathéodory representation of the query point. The `N`-dimensional
//! barycentric ball is never materialized: the prepared state stores the
//! weighted base point `Σ (λ_i - min{λ_i, d}) v_i` and the scalar
//! `scale = Σ min{λ_i, d}`, and each solve is one standard LMO plus one
//! scaled vector add.

use crate::error::{Error, Result};
use crate::linalg::argmin;
use crate::polytopes::{CaratheodoryRep, PolytopeModel};
use crate::simplex_ball::{is_in_unit_simplex, SimplexBall, DEFAULT_TOL};

/// Prepared state for the simplex oracle: the intersection ball
/// `S(x̂, d̂) = S(x, d) ∩ S_n`.
#[derive(Debug, Clone)]
pub struct RestrictedBall {
    hat: SimplexBall,
}

impl RestrictedBall {
    /// Wraps an already-intersected ball (`center ∈ S_n` required upstream).
    pub fn from_ball(ball: &SimplexBall) -> Result<Self> {
        Ok(Self { hat: ball.intersect_with_unit_simplex()? })
    }

    pub fn hat_ball(&self) -> &SimplexBall {
        &self.hat
    }

    pub fn dim(&self) -> usize {
        self.hat.dim()
    }
}

/// Prepared state for the polytope oracle.
#[derive(Debug, Clone)]
pub struct PolytopeRestrictedBall {
    base_point: Vec<f64>,
    scale: f64,
    radius_d: f64,
    source_rep: CaratheodoryRep,
}

impl PolytopeRestrictedBall {
    /// `base_point + scale * v` is the oracle output once `v` is the LMO
    /// vertex; `scale` equals `(n+1) d̂` of the barycentric intersection ball.
    pub fn base_point(&self) -> &[f64] {
        &self.base_point
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn radius_d(&self) -> f64 {
        self.radius_d
    }

    pub fn source_rep(&self) -> &CaratheodoryRep {
        &self.source_rep
    }
}

/// SLMO-1: build `S(x̂, d̂) = S(x, d) ∩ S_n` for a query point `x ∈ S_n`.
pub fn slmo_prepare(x: &[f64], d: f64) -> Result<RestrictedBall> {
    if !is_in_unit_simplex(x, DEFAULT_TOL) {
        return Err(Error::Infeasible("slmo query point must lie in the unit simplex".into()));
    }
    RestrictedBall::from_ball(&SimplexBall::new(x.to_vec(), d)?)
}

/// SLMO-2: minimize `<c, ·>` over the prepared ball. One scan of `c` for the
/// argmin, then `y* = (x̂ - d̂·1) + n d̂ e_{i*}` written in a single pass.
pub fn slmo_solve(rb: &RestrictedBall, c: &[f64]) -> Result<Vec<f64>> {
    let n = rb.dim();
    if c.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: c.len() });
    }
    let i_star = argmin(c);
    let d_hat = rb.hat.radius();
    let mut y: Vec<f64> = rb.hat.center().iter().map(|&x| x - d_hat).collect();
    y[i_star] += n as f64 * d_hat;
    Ok(y)
}

/// Full simplex oracle: `argmin { <c, y> : y ∈ S(x, d) ∩ S_n }`.
pub fn slmo(x: &[f64], d: f64, c: &[f64]) -> Result<Vec<f64>> {
    slmo_solve(&slmo_prepare(x, d)?, c)
}

/// SLMO-P-1: reduce a Carathéodory representation and radius `d` to the base
/// point and scale. Entries outside the support contribute nothing since
/// `min{0, d} = 0`.
pub fn slmo_p_prepare(rep: &CaratheodoryRep, d: f64) -> Result<PolytopeRestrictedBall> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::InvalidParameter(format!("slmo_p radius must be positive, got {d}")));
    }
    if rep.is_empty() {
        return Err(Error::InvalidParameter("empty Carathéodory representation".into()));
    }
    let n = rep.ambient_dim();
    let mut base = vec![0.0; n];
    let mut scale = 0.0;
    for (v, w) in rep.atoms() {
        let clipped = w.min(d);
        scale += clipped;
        let keep = w - clipped;
        if keep > 0.0 {
            for i in 0..n {
                base[i] += keep * v[i];
            }
        }
    }
    Ok(PolytopeRestrictedBall {
        base_point: base,
        scale,
        radius_d: d,
        source_rep: rep.clone(),
    })
}

/// SLMO-P-2: one standard LMO plus one scaled vector add.
pub fn slmo_p_solve(
    rb: &PolytopeRestrictedBall,
    polytope: &PolytopeModel,
    c: &[f64],
) -> Result<Vec<f64>> {
    let v_star = polytope.lmo(c)?;
    let mut y = rb.base_point.clone();
    for (yi, vi) in y.iter_mut().zip(&v_star) {
        *yi += rb.scale * vi;
    }
    Ok(y)
}

/// Full polytope oracle from a representation of the query point.
pub fn slmo_p(
    rep: &CaratheodoryRep,
    d: f64,
    polytope: &PolytopeModel,
    c: &[f64],
) -> Result<Vec<f64>> {
    slmo_p_solve(&slmo_p_prepare(rep, d)?, polytope, c)
}

/// Euclidean projection onto the polytope. Supported for the simplex,
/// hypercube, and ℓ1-ball; the flow polytope has no cheap projection and is
/// rejected.
pub fn project(polytope: &PolytopeModel, z: &[f64]) -> Result<Vec<f64>> {
    let n = polytope.ambient_dim();
    if z.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: z.len() });
    }
    match polytope {
        PolytopeModel::Hypercube { .. } => Ok(z.iter().map(|&v| v.clamp(0.0, 1.0)).collect()),
        PolytopeModel::Simplex { .. } => Ok(project_simplex(z)),
        PolytopeModel::L1Ball { .. } => {
            let norm1: f64 = z.iter().map(|v| v.abs()).sum();
            if norm1 <= 1.0 {
                return Ok(z.to_vec());
            }
            let abs: Vec<f64> = z.iter().map(|v| v.abs()).collect();
            let w = project_simplex(&abs);
            Ok(z.iter().zip(w).map(|(&zi, wi)| wi.copysign(zi)).collect())
        }
        PolytopeModel::Flow(_) => Err(Error::Unsupported(
            "projection onto the flow polytope is not provided".into(),
        )),
    }
}

/// Sort-based projection onto the unit simplex (O(n log n) thresholding).
fn project_simplex(z: &[f64]) -> Vec<f64> {
    let mut u = z.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let cand = (cumsum - 1.0) / (j + 1) as f64;
        if uj - cand > 0.0 {
            theta = cand;
        }
    }
    z.iter().map(|&zi| (zi - theta).max(0.0)).collect()
}
