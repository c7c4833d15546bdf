//! Simplex-ball calculus, restricted linear-minimization oracles, and
//! linearly convergent Frank-Wolfe solvers over polytopes.
//!
//! The crate is organized around five layers:
//!
//! * [`simplex_ball`] — exact arithmetic on simplex balls (construction,
//!   intersection, membership, linear optimization, diameter).
//! * [`polytopes`] — the polytope abstraction (LMO, Carathéodory
//!   representation, geometry constants) with four concrete families:
//!   unit simplex, hypercube, ℓ1-ball, and DAG s-t flow polytope.
//! * [`oracles`] — the restricted oracles SLMO / SLMO-P split into a
//!   preparation phase and a cheap per-call solve phase, plus Euclidean
//!   projection baselines.
//! * [`solvers`] — FW, SFW, rSFW, SFW-P, rSFW-P, AFW, PFW with the step-size
//!   rules, adaptive backtracking, warm starts, and convergence traces.
//! * [`problems`] / [`bench`] — synthetic problem generators and the
//!   benchmark harness behind the `sfw-bench` binary.

pub mod bench;
pub mod error;
pub mod linalg;
pub mod oracles;
pub mod polytopes;
pub mod problems;
pub mod simplex_ball;
pub mod solvers;

pub use error::{Error, Result};
pub use simplex_ball::{BallVertexIndex, SimplexBall, DEFAULT_TOL};
