//! Exact arithmetic on simplex balls.
//!
//! A simplex ball `S(x, d)` is the translated and scaled unit simplex
//! `{ (x - d*1) + n*d*lambda : lambda in S_n }`. Every point of the ball has
//! the same coordinate sum as its center. The family is closed under
//! intersection, which is what makes the restricted linear-minimization
//! oracles in [`crate::oracles`] cheap.

use crate::error::{Error, Result};
use crate::linalg::argmin;

/// Absolute tolerance used for membership and simplex-validity checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A simplex ball `S(center, radius)` in the sum-constraint hyperplane.
///
/// Immutable after construction; all operations are pure.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexBall {
    center: Vec<f64>,
    radius: f64,
}

/// Identifies one of the `n` vertices `center + radius * (n*e_i - 1)` of a ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallVertexIndex(pub usize);

/// True iff `x` has nonnegative entries (within `tol`) summing to 1 (within `tol`).
pub fn is_in_unit_simplex(x: &[f64], tol: f64) -> bool {
    !x.is_empty()
        && x.iter().all(|&v| v >= -tol)
        && (x.iter().sum::<f64>() - 1.0).abs() <= tol
}

impl SimplexBall {
    /// Builds `S(center, radius)`. The radius must be strictly positive.
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidDimension("ball center must be non-empty".into()));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::DegenerateBall(radius));
        }
        Ok(Self { center, radius })
    }

    /// The unit simplex as a ball: `S_n = S(1/n * 1, 1/n)`.
    pub fn unit(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("simplex dimension must be >= 1".into()));
        }
        let inv = 1.0 / n as f64;
        Self::new(vec![inv; n], inv)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Membership test: `y` is in the ball iff the barycentric coordinates
    /// `lambda = (y - center + radius*1) / (n*radius)` lie in the unit simplex.
    pub fn contains(&self, y: &[f64], tol: f64) -> Result<bool> {
        let n = self.dim();
        if y.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: y.len() });
        }
        let scale = n as f64 * self.radius;
        let mut sum = 0.0;
        for i in 0..n {
            let lambda = (y[i] - self.center[i] + self.radius) / scale;
            if lambda < -tol {
                return Ok(false);
            }
            sum += lambda;
        }
        Ok((sum - 1.0).abs() <= tol)
    }

    /// The vertex `center + radius * (n*e_i - 1)`.
    pub fn vertex(&self, index: BallVertexIndex) -> Vec<f64> {
        let n = self.dim();
        assert!(index.0 < n, "vertex index {} out of range for dim {}", index.0, n);
        let mut v: Vec<f64> = self.center.iter().map(|&c| c - self.radius).collect();
        v[index.0] += n as f64 * self.radius;
        v
    }

    /// Intersects the ball with the unit simplex: `S_n ∩ S(x, d) = S(x̂, d̂)`
    /// with `d̂ = (Σ min{d, x_i}) / n` and `x̂_i = max{x_i, d} + d̂ - d`.
    ///
    /// Requires the center to lie in `S_n`; the center then witnesses that the
    /// intersection is nonempty.
    pub fn intersect_with_unit_simplex(&self) -> Result<SimplexBall> {
        if !is_in_unit_simplex(&self.center, DEFAULT_TOL) {
            return Err(Error::Infeasible(
                "simplex-ball center must lie in the unit simplex".into(),
            ));
        }
        let n = self.dim();
        let d = self.radius;
        let d_hat = self.center.iter().map(|&x| d.min(x)).sum::<f64>() / n as f64;
        if d_hat <= DEFAULT_TOL * DEFAULT_TOL {
            // Unreachable for a center in S_n with d > 0, kept for totality.
            return Err(Error::DegenerateBall(d_hat));
        }
        let center = self
            .center
            .iter()
            .map(|&x| x.max(d) + d_hat - d)
            .collect();
        SimplexBall::new(center, d_hat)
    }

    /// Intersects two simplex balls with centers in `S_n`:
    /// `d_3 = (1 + Σ min{d_1 - x_1(i), d_2 - x_2(i)}) / n`,
    /// `x_3(i) = max{x_1(i) - d_1, x_2(i) - d_2} + d_3`.
    ///
    /// Fails with [`Error::EmptyIntersection`] when the computed radius is not
    /// positive. When it succeeds, `d_3 <= min(d_1, d_2)` always holds.
    pub fn intersect(b1: &SimplexBall, b2: &SimplexBall) -> Result<SimplexBall> {
        let n = b1.dim();
        if b2.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: b2.dim() });
        }
        if !is_in_unit_simplex(&b1.center, DEFAULT_TOL)
            || !is_in_unit_simplex(&b2.center, DEFAULT_TOL)
        {
            return Err(Error::Infeasible(
                "intersect requires both ball centers in the unit simplex".into(),
            ));
        }
        let sum_min: f64 = b1
            .center
            .iter()
            .zip(&b2.center)
            .map(|(&x1, &x2)| (b1.radius - x1).min(b2.radius - x2))
            .sum();
        let d3 = (1.0 + sum_min) / n as f64;
        if d3 <= DEFAULT_TOL {
            return Err(Error::EmptyIntersection(d3));
        }
        let center = b1
            .center
            .iter()
            .zip(&b2.center)
            .map(|(&x1, &x2)| (x1 - b1.radius).max(x2 - b2.radius) + d3)
            .collect();
        SimplexBall::new(center, d3)
    }

    /// Minimizes `<c, y>` over the ball. The optimum is attained at the vertex
    /// with the smallest objective entry; ties break to the smallest index.
    pub fn argmin_linear(&self, c: &[f64]) -> Result<(Vec<f64>, BallVertexIndex)> {
        let n = self.dim();
        if c.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: c.len() });
        }
        let i_star = BallVertexIndex(argmin(c));
        Ok((self.vertex(i_star), i_star))
    }

    /// Diameter `sqrt(2) * n * radius`.
    pub fn diameter(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.dim() as f64 * self.radius
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist2, dot};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Uniform-ish point of S_n via normalized exponentials.
    fn random_simplex_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut x: Vec<f64> = (0..n).map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
        let s: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= s);
        x
    }

    /// Random member of a ball through its barycentric parametrization.
    fn random_ball_point(ball: &SimplexBall, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = ball.dim();
        let lambda = random_simplex_point(n, rng);
        let mut y: Vec<f64> = ball.center().iter().map(|&c| c - ball.radius()).collect();
        for i in 0..n {
            y[i] += n as f64 * ball.radius() * lambda[i];
        }
        y
    }

    #[test]
    fn unit_ball_matches_unit_simplex() {
        let b = SimplexBall::unit(3).unwrap();
        assert_eq!(b.center(), &[1.0 / 3.0; 3]);
        assert!((b.radius() - 1.0 / 3.0).abs() < 1e-15);
        // Vertices of S(1/n 1, 1/n) are the standard basis vectors.
        for i in 0..3 {
            let v = b.vertex(BallVertexIndex(i));
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v[j] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn unit_ball_rejects_dimension_zero() {
        assert!(matches!(SimplexBall::unit(0), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn degenerate_dimension_one_is_the_point_one() {
        let b = SimplexBall::unit(1).unwrap();
        assert!(b.contains(&[1.0], DEFAULT_TOL).unwrap());
        assert!(!b.contains(&[0.9], DEFAULT_TOL).unwrap());
        let (p, i) = b.argmin_linear(&[5.0]).unwrap();
        assert_eq!(p, vec![1.0]);
        assert_eq!(i, BallVertexIndex(0));
    }

    #[test]
    fn membership_examples() {
        let s3 = SimplexBall::unit(3).unwrap();
        assert!(s3.contains(&[1.0, 0.0, 0.0], DEFAULT_TOL).unwrap());

        let s2 = SimplexBall::unit(2).unwrap();
        assert!(s2.contains(&[0.3, 0.7], DEFAULT_TOL).unwrap());
        assert!(!s2.contains(&[0.3, 0.6], DEFAULT_TOL).unwrap());

        // lambda = (y - x + d*1)/(n*d) = (0, 0.7, 0.05)/0.75 componentwise sums to 1.
        let b = SimplexBall::new(vec![0.5, 0.3, 0.2], 0.25).unwrap();
        assert!(b.contains(&[0.25, 0.75, 0.0], DEFAULT_TOL).unwrap());
    }

    #[test]
    fn center_is_always_a_member() {
        let mut r = rng(1);
        for n in 1..8 {
            let x = random_simplex_point(n, &mut r);
            let b = SimplexBall::new(x.clone(), r.gen_range(0.01..2.0)).unwrap();
            assert!(b.contains(&x, DEFAULT_TOL).unwrap());
        }
    }

    #[test]
    fn contains_rejects_dimension_mismatch() {
        let b = SimplexBall::unit(3).unwrap();
        assert!(b.contains(&[0.5, 0.5], DEFAULT_TOL).is_err());
    }

    #[test]
    fn intersect_unit_simplex_identity_case() {
        let b = SimplexBall::unit(3).unwrap();
        let hat = b.intersect_with_unit_simplex().unwrap();
        assert_eq!(hat.center(), b.center());
        assert!((hat.radius() - b.radius()).abs() < 1e-15);
    }

    #[test]
    fn intersect_unit_simplex_hand_example() {
        // x = (0.5, 0.3, 0.2), d = 0.25:
        // min{d, x_i} = (0.25, 0.25, 0.2) so d_hat = 0.7/3, and
        // x_hat = max{x_i, d} + d_hat - d = (29/60, 17/60, 14/60).
        let b = SimplexBall::new(vec![0.5, 0.3, 0.2], 0.25).unwrap();
        let hat = b.intersect_with_unit_simplex().unwrap();
        assert!((hat.radius() - 0.7 / 3.0).abs() < 1e-15);
        let want = [29.0 / 60.0, 17.0 / 60.0, 14.0 / 60.0];
        for (got, want) in hat.center().iter().zip(want) {
            assert!((got - want).abs() < 1e-15);
        }
        // Every vertex of the result lies in S_3 and in S(x, d).
        let s3 = SimplexBall::unit(3).unwrap();
        for i in 0..3 {
            let v = hat.vertex(BallVertexIndex(i));
            assert!(s3.contains(&v, DEFAULT_TOL).unwrap());
            assert!(b.contains(&v, DEFAULT_TOL).unwrap());
        }
    }

    #[test]
    fn large_radius_collapses_to_unit_simplex() {
        let mut r = rng(2);
        for _ in 0..50 {
            let n = r.gen_range(2..7);
            let x = random_simplex_point(n, &mut r);
            let d = x.iter().cloned().fold(f64::MIN, f64::max) + r.gen_range(0.0..1.0);
            let hat = SimplexBall::new(x, d).unwrap().intersect_with_unit_simplex().unwrap();
            assert!((hat.radius() - 1.0 / n as f64).abs() < 1e-12);
            for &c in hat.center() {
                assert!((c - 1.0 / n as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn self_intersection_is_exact_identity_on_dyadic_input() {
        // Coordinates and radius exactly representable in binary so the
        // algebra collapses without rounding.
        let b = SimplexBall::new(vec![0.5, 0.25, 0.25], 0.125).unwrap();
        let i = SimplexBall::intersect(&b, &b).unwrap();
        assert_eq!(i.center(), b.center());
        assert_eq!(i.radius(), b.radius());
    }

    #[test]
    fn intersect_agrees_with_unit_simplex_path() {
        // Intersecting with S(1/n 1, 1/n) must match intersect_with_unit_simplex.
        let mut r = rng(3);
        for _ in 0..100 {
            let n = r.gen_range(2..7);
            let unit = SimplexBall::unit(n).unwrap();
            let x = random_simplex_point(n, &mut r);
            let b = SimplexBall::new(x, r.gen_range(0.01..1.5)).unwrap();
            let via_general = SimplexBall::intersect(&unit, &b).unwrap();
            let via_special = b.intersect_with_unit_simplex().unwrap();
            assert!((via_general.radius() - via_special.radius()).abs() < 1e-12);
            for (a, c) in via_general.center().iter().zip(via_special.center()) {
                assert!((a - c).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn intersection_membership_equivalence_sampling() {
        let mut r = rng(4);
        for _ in 0..40 {
            let n = 4;
            let x1 = random_simplex_point(n, &mut r);
            let b1 = SimplexBall::new(x1, r.gen_range(0.05..0.8)).unwrap();
            // Center b2 on a point of b1's hat ball so both contain it.
            let hat1 = b1.intersect_with_unit_simplex().unwrap();
            let x2 = random_ball_point(&hat1, &mut r);
            let b2 = SimplexBall::new(x2, r.gen_range(0.05..0.8)).unwrap();
            let cap = SimplexBall::intersect(&b1, &b2).unwrap();
            assert!(cap.radius() <= b1.radius().min(b2.radius()) + 1e-12);
            for _ in 0..250 {
                let y = match r.gen_range(0..3) {
                    0 => random_ball_point(&b1, &mut r),
                    1 => random_ball_point(&b2, &mut r),
                    _ => random_ball_point(&cap, &mut r),
                };
                let both = b1.contains(&y, DEFAULT_TOL).unwrap()
                    && b2.contains(&y, DEFAULT_TOL).unwrap();
                assert_eq!(cap.contains(&y, DEFAULT_TOL).unwrap(), both);
            }
        }
    }

    #[test]
    fn disjoint_balls_error() {
        let b1 = SimplexBall::new(vec![1.0, 0.0, 0.0], 0.01).unwrap();
        let b2 = SimplexBall::new(vec![0.0, 1.0, 0.0], 0.01).unwrap();
        assert!(matches!(
            SimplexBall::intersect(&b1, &b2),
            Err(Error::EmptyIntersection(_))
        ));
    }

    #[test]
    fn argmin_linear_examples() {
        let s3 = SimplexBall::unit(3).unwrap();
        let (p, i) = s3.argmin_linear(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(i, BallVertexIndex(1));
        for (a, b) in p.iter().zip([0.0, 1.0, 0.0]) {
            assert!((a - b).abs() < 1e-15);
        }

        // Constant objective: smallest index wins.
        let (p0, i0) = s3.argmin_linear(&[7.0, 7.0, 7.0]).unwrap();
        assert_eq!(i0, BallVertexIndex(0));
        assert_eq!(p0, s3.vertex(BallVertexIndex(0)));

        // Hand example: x + 0.1*(3 e_1 - 1) = (0.4, 0.5, 0.1).
        let b = SimplexBall::new(vec![0.5, 0.3, 0.2], 0.1).unwrap();
        let (p, i) = b.argmin_linear(&[1.0, -1.0, 0.0]).unwrap();
        assert_eq!(i, BallVertexIndex(1));
        for (a, want) in p.iter().zip([0.4, 0.5, 0.1]) {
            assert!((a - want).abs() < 1e-15);
        }
    }

    #[test]
    fn argmin_linear_beats_every_vertex() {
        let mut r = rng(5);
        for _ in 0..200 {
            let n = r.gen_range(2..=8);
            let x = random_simplex_point(n, &mut r);
            let b = SimplexBall::new(x, r.gen_range(0.01..1.0)).unwrap();
            let c: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
            let (p, _) = b.argmin_linear(&c).unwrap();
            let val = dot(&c, &p);
            for i in 0..n {
                assert!(val <= dot(&c, &b.vertex(BallVertexIndex(i))) + 1e-12);
            }
        }
    }

    #[test]
    fn diameter_examples() {
        let b = SimplexBall::new(vec![0.2, 0.5, 0.3], 0.1).unwrap();
        assert!((b.diameter() - 0.3 * std::f64::consts::SQRT_2).abs() < 1e-12);
        for n in [1, 2, 5, 40] {
            let u = SimplexBall::unit(n).unwrap();
            assert!((u.diameter() - std::f64::consts::SQRT_2).abs() < 1e-12);
        }
        // n = 2, d = 0.5: brute force over the two vertices.
        let b2 = SimplexBall::new(vec![0.5, 0.5], 0.5).unwrap();
        let v0 = b2.vertex(BallVertexIndex(0));
        let v1 = b2.vertex(BallVertexIndex(1));
        assert!((b2.diameter() - dist2(&v0, &v1)).abs() < 1e-12);
    }

    #[test]
    fn inner_and_outer_inclusion_bounds() {
        // ||x - y|| <= d with y in S_n implies membership; members stay within n*d.
        let mut r = rng(6);
        for _ in 0..200 {
            let n = r.gen_range(2..7);
            let x = random_simplex_point(n, &mut r);
            let d = r.gen_range(0.05..0.5);
            let b = SimplexBall::new(x.clone(), d).unwrap();
            let y = random_simplex_point(n, &mut r);
            if dist2(&x, &y) <= d {
                assert!(b.contains(&y, DEFAULT_TOL).unwrap());
            }
            let z = random_ball_point(&b, &mut r);
            assert!(dist2(&x, &z) <= n as f64 * d + 1e-12);
        }
    }
}
