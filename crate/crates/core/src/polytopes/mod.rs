//! Polytope abstraction: linear minimization oracle, Carathéodory
//! representation, and geometry constants, with four concrete families.
//!
//! Vertex enumeration is deliberately confined to [`enumerate`]: the number
//! of vertices can be exponential (hypercube) and solver paths must never
//! depend on it.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::argmin;

pub mod enumerate;
mod flow;

pub use flow::{DagFlowNetwork, FlowPolytope};

/// Geometry constants used by the generalized solvers.
///
/// `eta` is the polytope condition number `psi * diameter / xi`. `xi` and
/// `psi` are informational; when present they satisfy that identity.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeGeometry {
    pub diameter: f64,
    pub eta: f64,
    pub xi: Option<f64>,
    pub psi: Option<f64>,
}

/// Sparse convex combination of polytope vertices representing a point.
///
/// Invariants: at most `ambient_dim + 1` atoms, strictly positive weights
/// summing to one, and the weighted vertex sum reconstructs the point.
#[derive(Debug, Clone)]
pub struct CaratheodoryRep {
    atoms: Vec<(Vec<f64>, f64)>,
    ambient_dim: usize,
}

impl CaratheodoryRep {
    pub fn new(atoms: Vec<(Vec<f64>, f64)>, ambient_dim: usize) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParameter("representation needs at least one atom".into()));
        }
        if atoms.len() > ambient_dim + 1 {
            return Err(Error::NumericalFailure(format!(
                "representation has {} atoms, more than n+1 = {}",
                atoms.len(),
                ambient_dim + 1
            )));
        }
        let mut sum = 0.0;
        for (v, w) in &atoms {
            if v.len() != ambient_dim {
                return Err(Error::DimensionMismatch { expected: ambient_dim, got: v.len() });
            }
            if !(*w > 0.0) {
                return Err(Error::InvalidParameter(format!("atom weight {w} is not positive")));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NumericalFailure(format!("atom weights sum to {sum}, expected 1")));
        }
        Ok(Self { atoms, ambient_dim })
    }

    pub fn atoms(&self) -> &[(Vec<f64>, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Weighted sum of the atoms.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.ambient_dim];
        for (v, w) in &self.atoms {
            for i in 0..self.ambient_dim {
                x[i] += w * v[i];
            }
        }
        x
    }
}

/// One of the supported polytope families.
///
/// Models are immutable after construction and all operations are pure.
#[derive(Debug, Clone)]
pub enum PolytopeModel {
    Simplex { n: usize },
    Hypercube { n: usize },
    L1Ball { n: usize, eta_override: Option<f64> },
    Flow(FlowPolytope),
}

impl PolytopeModel {
    pub fn simplex(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self::Simplex { n })
    }

    pub fn hypercube(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self::Hypercube { n })
    }

    /// Unit ℓ1-ball. The default condition number is the safe upper end `n`;
    /// use [`PolytopeModel::l1_ball_with_eta`] to supply a tighter value.
    pub fn l1_ball(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self::L1Ball { n, eta_override: None })
    }

    pub fn l1_ball_with_eta(n: usize, eta: f64) -> Result<Self> {
        check_dim(n)?;
        if !(eta > 0.0) {
            return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
        }
        Ok(Self::L1Ball { n, eta_override: Some(eta) })
    }

    pub fn flow(network: DagFlowNetwork) -> Self {
        Self::Flow(FlowPolytope::new(network))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Simplex { .. } => "simplex",
            Self::Hypercube { .. } => "hypercube",
            Self::L1Ball { .. } => "l1_ball",
            Self::Flow(_) => "flow",
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Self::Simplex { n } | Self::Hypercube { n } | Self::L1Ball { n, .. } => *n,
            Self::Flow(f) => f.ambient_dim(),
        }
    }

    /// Linear minimization oracle: a vertex minimizing `<c, v>`.
    /// Ties break to the smallest index (lexicographically smallest path for
    /// flow polytopes under first-improvement relaxation).
    pub fn lmo(&self, c: &[f64]) -> Result<Vec<f64>> {
        let n = self.ambient_dim();
        if c.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: c.len() });
        }
        Ok(match self {
            Self::Simplex { .. } => {
                let mut v = vec![0.0; n];
                v[argmin(c)] = 1.0;
                v
            }
            Self::Hypercube { .. } => c.iter().map(|&ci| if ci < 0.0 { 1.0 } else { 0.0 }).collect(),
            Self::L1Ball { .. } => {
                let mut best = 0;
                for i in 1..n {
                    if c[i].abs() > c[best].abs() {
                        best = i;
                    }
                }
                let mut v = vec![0.0; n];
                v[best] = -sgn(c[best]);
                v
            }
            Self::Flow(f) => f.min_cost_path_flow(c),
        })
    }

    /// Carathéodory representation of a feasible point as a convex
    /// combination of at most `n + 1` vertices.
    pub fn caratheodory(&self, x: &[f64]) -> Result<CaratheodoryRep> {
        let n = self.ambient_dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: x.len() });
        }
        if !self.contains(x, crate::simplex_ball::DEFAULT_TOL) {
            return Err(Error::Infeasible(format!(
                "point is not in the {} within tolerance",
                self.kind_name()
            )));
        }
        match self {
            Self::Simplex { .. } => caratheodory_simplex(x),
            Self::Hypercube { .. } => caratheodory_hypercube(x),
            Self::L1Ball { .. } => caratheodory_l1(x),
            Self::Flow(f) => f.caratheodory(x),
        }
    }

    /// Geometry constants `D` and `eta` (with `xi`, `psi` where closed forms
    /// exist).
    pub fn geometry(&self) -> PolytopeGeometry {
        match self {
            Self::Simplex { .. } => PolytopeGeometry {
                diameter: std::f64::consts::SQRT_2,
                eta: std::f64::consts::SQRT_2,
                xi: Some(1.0),
                psi: Some(1.0),
            },
            Self::Hypercube { n } => {
                let s = (*n as f64).sqrt();
                PolytopeGeometry { diameter: s, eta: s, xi: Some(1.0), psi: Some(1.0) }
            }
            Self::L1Ball { n, eta_override } => {
                let nf = *n as f64;
                match eta_override {
                    Some(eta) => {
                        PolytopeGeometry { diameter: 2.0, eta: *eta, xi: None, psi: None }
                    }
                    None => PolytopeGeometry {
                        diameter: 2.0,
                        eta: nf,
                        xi: Some(2.0 / nf.sqrt()),
                        psi: Some(nf.sqrt()),
                    },
                }
            }
            Self::Flow(f) => f.geometry(),
        }
    }

    /// Feasibility predicate with absolute tolerance `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.ambient_dim() {
            return false;
        }
        match self {
            Self::Simplex { .. } => crate::simplex_ball::is_in_unit_simplex(x, tol),
            Self::Hypercube { .. } => x.iter().all(|&v| v >= -tol && v <= 1.0 + tol),
            Self::L1Ball { .. } => x.iter().map(|v| v.abs()).sum::<f64>() <= 1.0 + tol,
            Self::Flow(f) => f.contains(x, tol),
        }
    }

    /// Vertex predicate used by representation checks.
    pub fn is_vertex(&self, v: &[f64], tol: f64) -> bool {
        if v.len() != self.ambient_dim() {
            return false;
        }
        match self {
            Self::Simplex { .. } => {
                let ones = v.iter().filter(|&&x| (x - 1.0).abs() <= tol).count();
                ones == 1 && v.iter().all(|&x| x.abs() <= tol || (x - 1.0).abs() <= tol)
            }
            Self::Hypercube { .. } => {
                v.iter().all(|&x| x.abs() <= tol || (x - 1.0).abs() <= tol)
            }
            Self::L1Ball { .. } => {
                let big = v.iter().filter(|&&x| (x.abs() - 1.0).abs() <= tol).count();
                big == 1 && v.iter().all(|&x| x.abs() <= tol || (x.abs() - 1.0).abs() <= tol)
            }
            Self::Flow(f) => f.is_unit_path_flow(v, tol),
        }
    }

    /// A deterministic feasible starting point.
    pub fn reference_point(&self) -> Vec<f64> {
        let n = self.ambient_dim();
        match self {
            Self::Simplex { .. } => vec![1.0 / n as f64; n],
            Self::Hypercube { .. } => vec![0.5; n],
            Self::L1Ball { .. } => vec![0.0; n],
            Self::Flow(f) => {
                // Extreme flow along everywhere-smallest edge indices.
                f.min_cost_path_flow(&vec![0.0; n])
            }
        }
    }

    /// Random feasible point, used by benchmarks and randomized tests.
    pub fn random_point<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.ambient_dim();
        match self {
            Self::Simplex { .. } => random_simplex_point(n, rng),
            Self::Hypercube { .. } => (0..n).map(|_| rng.gen::<f64>()).collect(),
            Self::L1Ball { .. } => {
                let mut x = random_simplex_point(n, rng);
                let shrink = rng.gen::<f64>();
                for xi in x.iter_mut() {
                    *xi *= shrink * if rng.gen::<bool>() { 1.0 } else { -1.0 };
                }
                x
            }
            Self::Flow(f) => {
                let k = rng.gen_range(2..=4usize);
                let mut x = vec![0.0; n];
                let weights = random_simplex_point(k, rng);
                for w in weights {
                    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let path = f.min_cost_path_flow(&c);
                    for i in 0..n {
                        x[i] += w * path[i];
                    }
                }
                x
            }
        }
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension("polytope dimension must be >= 1".into()));
    }
    Ok(())
}

/// Sign convention matching the ℓ1 representation: `sgn(0) = 1`.
fn sgn(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn random_simplex_point<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    x
}

fn caratheodory_simplex(x: &[f64]) -> Result<CaratheodoryRep> {
    let n = x.len();
    let mut atoms = Vec::new();
    for (i, &w) in x.iter().enumerate() {
        if w > 0.0 {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            atoms.push((v, w));
        }
    }
    CaratheodoryRep::new(atoms, n)
}

/// Staircase representation: sort coordinates descending, walk down the
/// levels emitting prefix-indicator vertices; the all-ones and all-zeros
/// vertices absorb the top and bottom levels.
fn caratheodory_hypercube(x: &[f64]) -> Result<CaratheodoryRep> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[b].partial_cmp(&x[a]).unwrap_or(std::cmp::Ordering::Equal));

    let mut atoms = Vec::new();
    let push = |atoms: &mut Vec<(Vec<f64>, f64)>, v: Vec<f64>, w: f64| {
        if w > 0.0 {
            atoms.push((v, w));
        }
    };

    let mut prefix = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        prefix[order[i]] = 1.0;
        let w = x[order[i]] - x[order[i + 1]];
        push(&mut atoms, prefix.clone(), w);
    }
    push(&mut atoms, vec![1.0; n], x[order[n - 1]].min(1.0));
    push(&mut atoms, vec![0.0; n], 1.0 - x[order[0]].max(0.0));

    if atoms.is_empty() {
        // All levels collapsed; x is (numerically) a vertex itself.
        let v: Vec<f64> = x.iter().map(|&v| if v > 0.5 { 1.0 } else { 0.0 }).collect();
        atoms.push((v, 1.0));
    } else {
        renormalize(&mut atoms);
    }
    CaratheodoryRep::new(atoms, n)
}

/// Signed-basis representation with the slack split across `± e_n`:
/// `x = Σ_{i<n} |x_i| sgn(x_i) e_i + (|x_n| + s) sgn(x_n) e_n - s sgn(x_n) e_n`
/// where `s = (1 - Σ |x_i|) / 2`.
fn caratheodory_l1(x: &[f64]) -> Result<CaratheodoryRep> {
    let n = x.len();
    let norm1: f64 = x.iter().map(|v| v.abs()).sum();
    let s = ((1.0 - norm1) / 2.0).max(0.0);
    let mut atoms = Vec::new();
    for (i, &xi) in x.iter().enumerate().take(n - 1) {
        if xi.abs() > 0.0 {
            let mut v = vec![0.0; n];
            v[i] = sgn(xi);
            atoms.push((v, xi.abs()));
        }
    }
    let last = x[n - 1];
    if last.abs() + s > 0.0 {
        let mut v = vec![0.0; n];
        v[n - 1] = sgn(last);
        atoms.push((v, last.abs() + s));
    }
    if s > 0.0 {
        let mut v = vec![0.0; n];
        v[n - 1] = -sgn(last);
        atoms.push((v, s));
    }
    renormalize(&mut atoms);
    CaratheodoryRep::new(atoms, n)
}

/// Rescales weights so they sum to exactly one, absorbing float dust from a
/// feasibility tolerance on the input point.
fn renormalize(atoms: &mut [(Vec<f64>, f64)]) {
    let sum: f64 = atoms.iter().map(|(_, w)| w).sum();
    if sum > 0.0 && (sum - 1.0).abs() > 1e-15 {
        for (_, w) in atoms.iter_mut() {
            *w /= sum;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn families(n: usize) -> Vec<PolytopeModel> {
        vec![
            PolytopeModel::simplex(n).unwrap(),
            PolytopeModel::hypercube(n).unwrap(),
            PolytopeModel::l1_ball(n).unwrap(),
        ]
    }

    #[test]
    fn lmo_examples() {
        let s = PolytopeModel::simplex(3).unwrap();
        assert_eq!(s.lmo(&[3.0, 1.0, 2.0]).unwrap(), vec![0.0, 1.0, 0.0]);

        let h = PolytopeModel::hypercube(3).unwrap();
        assert_eq!(h.lmo(&[-1.0, 2.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0]);

        let l = PolytopeModel::l1_ball(3).unwrap();
        assert_eq!(l.lmo(&[1.0, -3.0, 2.0]).unwrap(), vec![0.0, 1.0, 0.0]);
        assert_eq!(l.lmo(&[2.0, 0.0, 0.0]).unwrap(), vec![-1.0, 0.0, 0.0]);
    }

    #[test]
    fn lmo_beats_enumerated_vertices() {
        let mut r = rng(11);
        for n in 2..=6 {
            for p in families(n) {
                let verts = enumerate::vertices(&p).unwrap();
                for _ in 0..50 {
                    let c: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
                    let y = p.lmo(&c).unwrap();
                    assert!(p.is_vertex(&y, 1e-12), "{} lmo output not a vertex", p.kind_name());
                    let val = dot(&c, &y);
                    for v in &verts {
                        assert!(val <= dot(&c, v) + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn caratheodory_reconstructs_random_points() {
        let mut r = rng(12);
        for n in 2..=7 {
            for p in families(n) {
                for _ in 0..50 {
                    let x = p.random_point(&mut r);
                    let rep = p.caratheodory(&x).unwrap();
                    assert!(rep.len() <= n + 1);
                    let back = rep.reconstruct();
                    for (a, b) in back.iter().zip(&x) {
                        assert!((a - b).abs() < 1e-10, "{} reconstruction", p.kind_name());
                    }
                    for (v, w) in rep.atoms() {
                        assert!(*w > 0.0);
                        assert!(p.is_vertex(v, 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn caratheodory_of_a_vertex_is_a_single_atom() {
        let h = PolytopeModel::hypercube(4).unwrap();
        let rep = h.caratheodory(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(rep.len(), 1);
        assert_eq!(rep.atoms()[0].1, 1.0);
    }

    #[test]
    fn caratheodory_l1_hand_example() {
        let l = PolytopeModel::l1_ball(2).unwrap();
        let rep = l.caratheodory(&[0.3, -0.2]).unwrap();
        // s = 0.25: atoms (e_1, 0.3), (-e_2, 0.45), (e_2, 0.25).
        assert_eq!(rep.len(), 3);
        let atoms = rep.atoms();
        assert_eq!(atoms[0].0, vec![1.0, 0.0]);
        assert!((atoms[0].1 - 0.3).abs() < 1e-12);
        assert_eq!(atoms[1].0, vec![0.0, -1.0]);
        assert!((atoms[1].1 - 0.45).abs() < 1e-12);
        assert_eq!(atoms[2].0, vec![0.0, 1.0]);
        assert!((atoms[2].1 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn caratheodory_l1_boundary_drops_slack_atoms() {
        let l = PolytopeModel::l1_ball(3).unwrap();
        let rep = l.caratheodory(&[0.5, -0.5, 0.0]).unwrap();
        assert_eq!(rep.len(), 2);
        let back = rep.reconstruct();
        assert!((back[0] - 0.5).abs() < 1e-12 && (back[1] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn caratheodory_rejects_infeasible_points() {
        let s = PolytopeModel::simplex(3).unwrap();
        assert!(matches!(s.caratheodory(&[0.5, 0.4, 0.3]), Err(Error::Infeasible(_))));
        let l = PolytopeModel::l1_ball(2).unwrap();
        assert!(l.caratheodory(&[0.9, 0.3]).is_err());
    }

    #[test]
    fn geometry_closed_forms() {
        let g = PolytopeModel::hypercube(9).unwrap().geometry();
        assert!((g.diameter - 3.0).abs() < 1e-15);
        assert!((g.eta - 3.0).abs() < 1e-15);

        for n in [2usize, 17] {
            let g = PolytopeModel::simplex(n).unwrap().geometry();
            assert!((g.diameter - std::f64::consts::SQRT_2).abs() < 1e-15);
            assert!((g.eta - std::f64::consts::SQRT_2).abs() < 1e-15);
        }

        let g = PolytopeModel::l1_ball(100).unwrap().geometry();
        assert!((g.diameter - 2.0).abs() < 1e-15);
        assert!((g.eta - 100.0).abs() < 1e-15);
        let g = PolytopeModel::l1_ball_with_eta(100, 10.0).unwrap().geometry();
        assert!((g.eta - 10.0).abs() < 1e-15);
        assert!(g.xi.is_none() && g.psi.is_none());
    }

    #[test]
    fn geometry_identity_when_xi_psi_present() {
        let mut r = rng(13);
        for n in 2..=8 {
            for p in families(n) {
                let g = p.geometry();
                if let (Some(xi), Some(psi)) = (g.xi, g.psi) {
                    assert!((g.eta - psi * g.diameter / xi).abs() < 1e-12);
                }
                assert!(g.diameter > 0.0 && g.eta >= 1.0);
                let _ = r.gen::<f64>();
            }
        }
    }

    #[test]
    fn random_points_are_feasible() {
        let mut r = rng(14);
        for n in 1..=6 {
            for p in families(n) {
                for _ in 0..20 {
                    let x = p.random_point(&mut r);
                    assert!(p.contains(&x, 1e-9), "{} random point infeasible", p.kind_name());
                }
            }
        }
    }
}
