//! Exhaustive vertex enumeration. Test support only: vertex counts grow
//! exponentially (hypercube) and solver code paths must never call this.

use crate::error::{Error, Result};
use crate::polytopes::PolytopeModel;

const MAX_VERTICES: usize = 1 << 20;

/// Every vertex of the polytope. Errors when the vertex set is too large to
/// materialize.
pub fn vertices(p: &PolytopeModel) -> Result<Vec<Vec<f64>>> {
    let n = p.ambient_dim();
    match p {
        PolytopeModel::Simplex { .. } => Ok((0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                v
            })
            .collect()),
        PolytopeModel::Hypercube { .. } => {
            if n >= 20 {
                return Err(Error::Unsupported(format!("2^{n} hypercube vertices")));
            }
            Ok((0..1usize << n)
                .map(|mask| (0..n).map(|i| ((mask >> i) & 1) as f64).collect())
                .collect())
        }
        PolytopeModel::L1Ball { .. } => Ok((0..2 * n)
            .map(|k| {
                let mut v = vec![0.0; n];
                v[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
                v
            })
            .collect()),
        PolytopeModel::Flow(f) => f.enumerate_path_flows(MAX_VERTICES),
    }
}
