//! Seeded synthetic problem generators for the experiment families.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::polytopes::{DagFlowNetwork, PolytopeModel};
use crate::problems::{LogisticObjective, ObjectiveKind, ProblemInstance, QuadraticObjective};

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix(m: usize, n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| rng.sample(StandardNormal))
}

/// Sparse Gaussian vector: each entry survives with probability `keep`.
/// At least one entry is forced to survive.
fn sparse_gaussian(n: usize, keep: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen::<f64>() < keep {
                    rng.sample(StandardNormal)
                } else {
                    0.0
                }
            })
            .collect();
        if v.iter().any(|&x| x != 0.0) {
            return v;
        }
    }
}

/// ℓ1-constrained least squares: Gaussian `A`, a sparse ground truth
/// normalized onto the ℓ1-ball boundary, `b = A x*`, optimal value 0,
/// starting point `x0 = 0`. The ball's condition number is set to `sqrt(n)`
/// as in the experiments.
///
/// `sparsity` is the fraction of *nonzero* entries in the ground truth.
pub fn gen_l1_least_squares(m: usize, n: usize, sparsity: f64, seed: u64) -> Result<ProblemInstance> {
    check_dims(m, n)?;
    if !(sparsity > 0.0 && sparsity < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "sparsity must lie in (0, 1), got {sparsity}"
        )));
    }
    let mut rng = rng_for(seed);
    let a = gaussian_matrix(m, n, &mut rng);
    let mut x_star = sparse_gaussian(n, sparsity, &mut rng);
    let norm1: f64 = x_star.iter().map(|v| v.abs()).sum();
    x_star.iter_mut().for_each(|v| *v /= norm1);
    let b = &a * DVector::from_column_slice(&x_star);

    let eta = (n as f64).sqrt();
    Ok(ProblemInstance {
        name: format!("l1_ls_m{m}_n{n}_s{sparsity}_seed{seed}"),
        objective: ObjectiveKind::Quadratic(QuadraticObjective::least_squares(a, b)),
        polytope: PolytopeModel::l1_ball_with_eta(n, eta)?,
        x0: vec![0.0; n],
        known_fstar: Some(0.0),
        seed,
    })
}

/// Simplex-constrained least squares: sparse nonnegative ground truth
/// normalized to sum 1, `b = A x*`, optimal value 0, `x0 = 1/n`.
///
/// `density` is the fraction of nonzero entries in the ground truth.
pub fn gen_simplex_least_squares(
    m: usize,
    n: usize,
    density: f64,
    seed: u64,
) -> Result<ProblemInstance> {
    check_dims(m, n)?;
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "density must lie in (0, 1], got {density}"
        )));
    }
    let mut rng = rng_for(seed);
    let a = gaussian_matrix(m, n, &mut rng);
    let mut x_star: Vec<f64> =
        sparse_gaussian(n, density, &mut rng).iter().map(|v| v.abs()).collect();
    let sum: f64 = x_star.iter().sum();
    x_star.iter_mut().for_each(|v| *v /= sum);
    let b = &a * DVector::from_column_slice(&x_star);

    Ok(ProblemInstance {
        name: format!("simplex_ls_m{m}_n{n}_d{density}_seed{seed}"),
        objective: ObjectiveKind::Quadratic(QuadraticObjective::least_squares(a, b)),
        polytope: PolytopeModel::simplex(n)?,
        x0: vec![1.0 / n as f64; n],
        known_fstar: Some(0.0),
        seed,
    })
}

/// Convex QP over a flow polytope: `f(x) = 0.5 x'Ax + b'x` with `A` built by
/// conjugating a log-spaced spectrum `[1, cond]` with a random orthogonal
/// matrix, so the declared `(L, mu) = (cond, 1)` are the exact spectrum
/// endpoints. The start is an extreme unit flow.
pub fn gen_flow_qp(network: DagFlowNetwork, cond: f64, seed: u64) -> Result<ProblemInstance> {
    if !(cond >= 1.0) {
        return Err(Error::InvalidParameter(format!("cond must be >= 1, got {cond}")));
    }
    let n = network.num_edges();
    let mut rng = rng_for(seed);

    let spectrum: Vec<f64> = if n == 1 {
        vec![1.0]
    } else {
        (0..n).map(|i| cond.powf(i as f64 / (n - 1) as f64)).collect()
    };
    let q_orth = random_orthogonal(n, &mut rng);
    let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(&spectrum));
    let a = &q_orth * lambda * q_orth.transpose();
    // Symmetrize away rounding skew.
    let a = 0.5 * (&a + a.transpose());
    let b = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));

    let polytope = PolytopeModel::flow(network);
    let c0: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let x0 = polytope.lmo(&c0)?;

    let objective = QuadraticObjective::quadratic_form(a, b, 0.0)
        .with_constants(spectrum[n - 1], spectrum[0]);
    Ok(ProblemInstance {
        name: format!("flow_qp_n{n}_cond{cond}_seed{seed}"),
        objective: ObjectiveKind::Quadratic(objective),
        polytope,
        x0,
        known_fstar: None,
        seed,
    })
}

/// ℓ1-constrained ridge logistic regression on synthetic Gaussian data with
/// labels from a sparse ground-truth predictor. `lambda` defaults to `1/n`
/// and the ball radius `beta` defaults to 1; radii other than 1 are folded
/// into the data so the polytope stays the unit ball.
pub fn gen_logistic(
    m: usize,
    n: usize,
    lambda: Option<f64>,
    beta: f64,
    seed: u64,
) -> Result<ProblemInstance> {
    check_dims(m, n)?;
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let lambda = lambda.unwrap_or(1.0 / n as f64);
    if lambda < 0.0 {
        return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
    }
    let mut rng = rng_for(seed);
    let a = gaussian_matrix(m, n, &mut rng);
    let w_star = sparse_gaussian(n, 0.3, &mut rng);
    let margins = &a * DVector::from_column_slice(&w_star);
    let labels = DVector::from_iterator(
        m,
        margins.iter().map(|&z| {
            let noisy = z + 0.1 * rng.sample::<f64, _>(StandardNormal);
            if noisy >= 0.0 {
                1.0
            } else {
                -1.0
            }
        }),
    );
    let scaled = beta * a;
    let scaled_lambda = lambda * beta * beta;

    Ok(ProblemInstance {
        name: format!("logistic_m{m}_n{n}_seed{seed}"),
        objective: ObjectiveKind::Logistic(LogisticObjective::new(scaled, labels, scaled_lambda)),
        polytope: PolytopeModel::l1_ball_with_eta(n, (n as f64).sqrt())?,
        x0: vec![0.0; n],
        known_fstar: None,
        seed,
    })
}

fn check_dims(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidDimension(format!("need m, n >= 1, got ({m}, {n})")));
    }
    Ok(())
}

/// Q factor of a Gaussian matrix with the sign convention fixed by the
/// R diagonal, giving a Haar-ish orthogonal matrix.
fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let raw = gaussian_matrix(n, n, rng);
    let qr = raw.qr();
    let r_diag: Vec<f64> = (0..n).map(|i| qr.r()[(i, i)]).collect();
    let mut q = qr.q();
    for (j, d) in r_diag.iter().enumerate() {
        if *d < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::gradcheck::max_gradient_rel_error;
    use crate::solvers::Objective;

    #[test]
    fn l1_instance_matches_construction() {
        let inst = gen_l1_least_squares(40, 10, 0.7, 7).unwrap();
        assert_eq!(inst.known_fstar, Some(0.0));
        assert_eq!(inst.x0, vec![0.0; 10]);
        // Reproducible for the same seed.
        let again = gen_l1_least_squares(40, 10, 0.7, 7).unwrap();
        assert_eq!(inst.objective.value(&inst.x0), again.objective.value(&again.x0));
        // Different seed changes the data.
        let other = gen_l1_least_squares(40, 10, 0.7, 8).unwrap();
        assert!(inst.objective.value(&inst.x0) != other.objective.value(&other.x0));
    }

    #[test]
    fn generated_optima_reach_zero() {
        // Reconstruct x* indirectly: f(x*) = 0 means min over feasible
        // samples is >= 0 and the declared optimum is attainable.
        let inst = gen_simplex_least_squares(30, 8, 0.6, 3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..200 {
            let y = inst.polytope.random_point(&mut rng);
            assert!(inst.objective.value(&y) >= -1e-12);
        }
    }

    #[test]
    fn flow_qp_spectrum_endpoints_match_declared_constants() {
        let net = DagFlowNetwork::layered(3, 3).unwrap();
        let inst = gen_flow_qp(net, 100.0, 11).unwrap();
        let ObjectiveKind::Quadratic(QuadraticObjective::Form { q, .. }) = &inst.objective else {
            panic!("expected a quadratic form");
        };
        let eig = q.symmetric_eigenvalues();
        assert!((eig.max() - inst.objective.smoothness().unwrap()).abs() < 1e-8);
        assert!((eig.min() - inst.objective.strong_convexity().unwrap()).abs() < 1e-8);
        assert!(inst.polytope.contains(&inst.x0, 1e-12));
    }

    #[test]
    fn flow_qp_isotropic_case_is_identity_spectrum() {
        let net = DagFlowNetwork::layered(2, 2).unwrap();
        let inst = gen_flow_qp(net, 1.0, 5).unwrap();
        let ObjectiveKind::Quadratic(QuadraticObjective::Form { q, .. }) = &inst.objective else {
            panic!("expected a quadratic form");
        };
        // cond = 1 conjugates the identity: A = c I exactly up to rounding.
        for i in 0..q.nrows() {
            for j in 0..q.ncols() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((q[(i, j)] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn logistic_defaults_and_gradient() {
        let inst = gen_logistic(50, 12, None, 1.0, 13).unwrap();
        let ObjectiveKind::Logistic(obj) = &inst.objective else {
            panic!("expected logistic");
        };
        assert!((obj.lambda() - 1.0 / 12.0).abs() < 1e-15);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let x = inst.polytope.random_point(&mut rng);
            assert!(max_gradient_rel_error(&inst.objective, &x) < 1e-4);
        }
    }

    #[test]
    fn logistic_without_ridge_has_no_declared_mu() {
        let inst = gen_logistic(20, 6, Some(0.0), 1.0, 2).unwrap();
        assert!(inst.objective.strong_convexity().is_none());
    }

    #[test]
    fn all_generators_produce_feasible_starts_and_valid_constants() {
        let instances = vec![
            gen_l1_least_squares(30, 10, 0.5, 1).unwrap(),
            gen_simplex_least_squares(30, 10, 0.6, 1).unwrap(),
            gen_flow_qp(DagFlowNetwork::layered(2, 3).unwrap(), 50.0, 1).unwrap(),
            gen_logistic(30, 10, None, 1.0, 1).unwrap(),
        ];
        for inst in instances {
            assert!(inst.polytope.contains(&inst.x0, 1e-9), "{}", inst.name);
            if let (Some(mu), Some(l)) =
                (inst.objective.strong_convexity(), inst.objective.smoothness())
            {
                assert!(mu <= l + 1e-12, "{}", inst.name);
            }
        }
    }
}
