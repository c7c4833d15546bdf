//! Concrete objective functions used by the synthetic experiment families.

use nalgebra::{DMatrix, DVector};

use crate::solvers::Objective;

/// Quadratic objective, either `||Ax - b||^2` (least squares) or
/// `0.5 x'Qx + b'x + c`. Smoothness and strong-convexity constants are the
/// extreme eigenvalues of the Hessian, computed once at construction.
#[derive(Debug, Clone)]
pub enum QuadraticObjective {
    LeastSquares { a: DMatrix<f64>, b: DVector<f64>, l: f64, mu: f64 },
    Form { q: DMatrix<f64>, b: DVector<f64>, constant: f64, l: f64, mu: f64 },
}

impl QuadraticObjective {
    /// `f(x) = ||Ax - b||^2`, Hessian `2 A'A`.
    pub fn least_squares(a: DMatrix<f64>, b: DVector<f64>) -> Self {
        let gram = a.transpose() * &a;
        let eig = gram.symmetric_eigenvalues();
        let l = 2.0 * eig.max();
        let mu = 2.0 * eig.min().max(0.0);
        Self::LeastSquares { a, b, l, mu }
    }

    /// `f(x) = 0.5 x'Qx + b'x + constant` for symmetric PSD `Q`.
    pub fn quadratic_form(q: DMatrix<f64>, b: DVector<f64>, constant: f64) -> Self {
        let eig = q.symmetric_eigenvalues();
        let l = eig.max();
        let mu = eig.min().max(0.0);
        Self::Form { q, b, constant, l, mu }
    }

    /// Overrides the cached constants (used when the generator knows the
    /// spectrum exactly).
    pub fn with_constants(mut self, l_new: f64, mu_new: f64) -> Self {
        match &mut self {
            Self::LeastSquares { l, mu, .. } | Self::Form { l, mu, .. } => {
                *l = l_new;
                *mu = mu_new;
            }
        }
        self
    }
}

impl Objective for QuadraticObjective {
    fn dim(&self) -> usize {
        match self {
            Self::LeastSquares { a, .. } => a.ncols(),
            Self::Form { q, .. } => q.ncols(),
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        let xv = DVector::from_column_slice(x);
        match self {
            Self::LeastSquares { a, b, .. } => {
                let r = a * &xv - b;
                r.norm_squared()
            }
            Self::Form { q, b, constant, .. } => 0.5 * xv.dot(&(q * &xv)) + b.dot(&xv) + constant,
        }
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let xv = DVector::from_column_slice(x);
        match self {
            Self::LeastSquares { a, b, .. } => {
                let r = a * &xv - b;
                (2.0 * a.transpose() * r).as_slice().to_vec()
            }
            Self::Form { q, b, .. } => (q * &xv + b).as_slice().to_vec(),
        }
    }

    fn smoothness(&self) -> Option<f64> {
        match self {
            Self::LeastSquares { l, .. } | Self::Form { l, .. } => Some(*l),
        }
    }

    fn strong_convexity(&self) -> Option<f64> {
        match self {
            Self::LeastSquares { mu, .. } | Self::Form { mu, .. } => {
                (*mu > 0.0).then_some(*mu)
            }
        }
    }

    fn exact_line_search(&self, x: &[f64], dir: &[f64], max_step: f64) -> Option<f64> {
        let xv = DVector::from_column_slice(x);
        let dv = DVector::from_column_slice(dir);
        let (slope, curvature) = match self {
            Self::LeastSquares { a, b, .. } => {
                let r = a * &xv - b;
                let ad = a * &dv;
                (2.0 * r.dot(&ad), 2.0 * ad.norm_squared())
            }
            Self::Form { q, b, .. } => {
                let qd = q * &dv;
                (xv.dot(&qd) + b.dot(&dv), dv.dot(&qd))
            }
        };
        if curvature <= 0.0 {
            // Flat section: any nonincreasing step works; stay put.
            return Some(if slope < 0.0 { max_step } else { 0.0 });
        }
        Some((-slope / curvature).clamp(0.0, max_step))
    }
}

/// Ridge-regularized logistic loss
/// `f(x) = (1/m) sum ln(1 + exp(-b_i <a_i, x>)) + (lambda/2) ||x||^2`.
#[derive(Debug, Clone)]
pub struct LogisticObjective {
    a: DMatrix<f64>,
    labels: DVector<f64>,
    lambda: f64,
    l: f64,
}

impl LogisticObjective {
    pub fn new(a: DMatrix<f64>, labels: DVector<f64>, lambda: f64) -> Self {
        assert_eq!(a.nrows(), labels.len());
        // The logistic curvature is at most 1/4, so L <= lmax(A'A)/(4m) + lambda.
        let m = a.nrows() as f64;
        let gram = a.transpose() * &a;
        let l = gram.symmetric_eigenvalues().max() / (4.0 * m) + lambda;
        Self { a, labels, lambda, l }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn data(&self) -> (&DMatrix<f64>, &DVector<f64>) {
        (&self.a, &self.labels)
    }
}

/// `ln(1 + e^{-z})` without overflow for large `|z|`.
fn softplus_neg(z: f64) -> f64 {
    if z > 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

impl Objective for LogisticObjective {
    fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let xv = DVector::from_column_slice(x);
        let z = &self.a * &xv;
        let m = self.a.nrows() as f64;
        let loss: f64 = z
            .iter()
            .zip(self.labels.iter())
            .map(|(&zi, &bi)| softplus_neg(bi * zi))
            .sum();
        loss / m + 0.5 * self.lambda * xv.norm_squared()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let xv = DVector::from_column_slice(x);
        let z = &self.a * &xv;
        let m = self.a.nrows() as f64;
        // d/dz ln(1+e^{-bz}) = -b * sigma(-bz)
        let w = DVector::from_iterator(
            z.len(),
            z.iter().zip(self.labels.iter()).map(|(&zi, &bi)| {
                let s = 1.0 / (1.0 + (bi * zi).exp());
                -bi * s / m
            }),
        );
        let mut g = self.a.transpose() * w;
        g += self.lambda * xv;
        g.as_slice().to_vec()
    }

    fn smoothness(&self) -> Option<f64> {
        Some(self.l)
    }

    fn strong_convexity(&self) -> Option<f64> {
        (self.lambda > 0.0).then_some(self.lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::gradcheck::max_gradient_rel_error;
    use nalgebra::{DMatrix, DVector};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(m: usize, n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn least_squares_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let a = random_matrix(12, 5, &mut rng);
        let b = DVector::from_fn(12, |_, _| rng.gen_range(-1.0..1.0));
        let obj = QuadraticObjective::least_squares(a, b);
        for _ in 0..20 {
            let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!(max_gradient_rel_error(&obj, &x) < 1e-6);
        }
    }

    #[test]
    fn quadratic_form_gradient_and_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let raw = random_matrix(6, 6, &mut rng);
        let q = &raw * raw.transpose() + DMatrix::identity(6, 6);
        let b = DVector::from_fn(6, |_, _| rng.gen_range(-1.0..1.0));
        let obj = QuadraticObjective::quadratic_form(q.clone(), b, 0.5);
        let l = obj.smoothness().unwrap();
        let mu = obj.strong_convexity().unwrap();
        assert!(mu >= 1.0 - 1e-9 && l >= mu);
        for _ in 0..20 {
            let x: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!(max_gradient_rel_error(&obj, &x) < 1e-6);
        }
    }

    #[test]
    fn exact_line_search_minimizes_the_section() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let a = random_matrix(10, 4, &mut rng);
        let b = DVector::from_fn(10, |_, _| rng.gen_range(-1.0..1.0));
        let obj = QuadraticObjective::least_squares(a, b);
        for _ in 0..30 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let dir: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let t = obj.exact_line_search(&x, &dir, 1.0).unwrap();
            let at = |t: f64| {
                let xt: Vec<f64> =
                    x.iter().zip(&dir).map(|(&xi, &di)| xi + t * di).collect();
                obj.value(&xt)
            };
            for probe in [0.0, 0.25, 0.5, 0.75, 1.0] {
                assert!(at(t) <= at(probe) + 1e-10);
            }
        }
    }

    #[test]
    fn logistic_gradient_matches_finite_differences_and_is_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let a = random_matrix(30, 6, &mut rng);
        let labels = DVector::from_fn(30, |_, _| if rng.gen::<bool>() { 1.0 } else { -1.0 });
        let obj = LogisticObjective::new(a, labels, 0.1);
        for _ in 0..20 {
            let x: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!(max_gradient_rel_error(&obj, &x) < 1e-5);
        }
        // No overflow at extreme margins.
        let big: Vec<f64> = vec![500.0; 6];
        assert!(obj.value(&big).is_finite());
        assert!(obj.gradient(&big).iter().all(|v| v.is_finite()));
    }

    #[test]
    fn logistic_without_ridge_declares_no_strong_convexity() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let a = random_matrix(10, 3, &mut rng);
        let labels = DVector::from_element(10, 1.0);
        let obj = LogisticObjective::new(a, labels, 0.0);
        assert!(obj.strong_convexity().is_none());
        assert!(obj.smoothness().is_some());
    }
}
