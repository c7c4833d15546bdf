//! Central finite-difference validation of analytic gradients.

use crate::solvers::Objective;

/// Central differences with `h = 1e-6 * (1 + ||x||)` per coordinate.
pub fn finite_difference_gradient(obj: &dyn Objective, x: &[f64]) -> Vec<f64> {
    let norm = crate::linalg::norm2(x);
    let h = 1e-6 * (1.0 + norm);
    let mut g = vec![0.0; x.len()];
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let orig = xp[i];
        xp[i] = orig + h;
        let fp = obj.value(&xp);
        xp[i] = orig - h;
        let fm = obj.value(&xp);
        xp[i] = orig;
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Relative error `||g - g_fd|| / max(1, ||g||)` between the analytic and
/// finite-difference gradients.
pub fn max_gradient_rel_error(obj: &dyn Objective, x: &[f64]) -> f64 {
    let g = obj.gradient(x);
    let fd = finite_difference_gradient(obj, x);
    let diff: f64 = g
        .iter()
        .zip(&fd)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    diff / crate::linalg::norm2(&g).max(1.0)
}
