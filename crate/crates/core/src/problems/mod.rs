//! Objective implementations and seeded synthetic generators for the
//! experiment families, with a binary-payload instance file format for
//! reproducible benchmark runs.

mod generators;
pub mod gradcheck;
pub mod io;
mod objectives;

pub use generators::{gen_flow_qp, gen_l1_least_squares, gen_logistic, gen_simplex_least_squares};
pub use objectives::{LogisticObjective, QuadraticObjective};

use crate::polytopes::PolytopeModel;
use crate::solvers::Objective;

/// An objective paired with its kind tag, so instances can be serialized.
#[derive(Debug, Clone)]
pub enum ObjectiveKind {
    Quadratic(QuadraticObjective),
    Logistic(LogisticObjective),
}

impl Objective for ObjectiveKind {
    fn dim(&self) -> usize {
        match self {
            Self::Quadratic(o) => o.dim(),
            Self::Logistic(o) => o.dim(),
        }
    }
    fn value(&self, x: &[f64]) -> f64 {
        match self {
            Self::Quadratic(o) => o.value(x),
            Self::Logistic(o) => o.value(x),
        }
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Self::Quadratic(o) => o.gradient(x),
            Self::Logistic(o) => o.gradient(x),
        }
    }
    fn smoothness(&self) -> Option<f64> {
        match self {
            Self::Quadratic(o) => o.smoothness(),
            Self::Logistic(o) => o.smoothness(),
        }
    }
    fn strong_convexity(&self) -> Option<f64> {
        match self {
            Self::Quadratic(o) => o.strong_convexity(),
            Self::Logistic(o) => o.strong_convexity(),
        }
    }
    fn exact_line_search(&self, x: &[f64], dir: &[f64], max_step: f64) -> Option<f64> {
        match self {
            Self::Quadratic(o) => o.exact_line_search(x, dir, max_step),
            Self::Logistic(o) => o.exact_line_search(x, dir, max_step),
        }
    }
}

/// A ready-to-solve problem: objective, feasible set, starting point, and
/// (when the construction pins it) the optimal value.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub name: String,
    pub objective: ObjectiveKind,
    pub polytope: PolytopeModel,
    pub x0: Vec<f64>,
    pub known_fstar: Option<f64>,
    pub seed: u64,
}

impl ProblemInstance {
    pub fn objective(&self) -> &dyn Objective {
        &self.objective
    }
}
