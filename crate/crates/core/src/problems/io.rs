//! Instance files: a JSON header describing the problem followed by one flat
//! little-endian `f64` block holding the matrix payloads (column-major).
//!
//! Layout: magic `SFWI`, `u32` version, `u64` header length, the JSON
//! header, then the arrays in header order.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytopes::{DagFlowNetwork, FlowPolytope, PolytopeModel};
use crate::problems::{LogisticObjective, ObjectiveKind, ProblemInstance, QuadraticObjective};

const MAGIC: &[u8; 4] = b"SFWI";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct FileHeader {
    name: String,
    seed: u64,
    known_fstar: Option<f64>,
    polytope: PolytopeHeader,
    objective: ObjectiveHeader,
    /// Array names and lengths, in payload order.
    arrays: Vec<(String, usize)>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum PolytopeHeader {
    Simplex { n: usize },
    Hypercube { n: usize },
    L1Ball { n: usize, eta: Option<f64> },
    Flow { network: String, eta: Option<f64> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ObjectiveHeader {
    LeastSquares { m: usize, n: usize },
    QuadraticForm { n: usize, constant: f64, l: f64, mu: f64 },
    Logistic { m: usize, n: usize, lambda: f64 },
}

pub fn save_instance<P: AsRef<Path>>(path: P, inst: &ProblemInstance) -> Result<()> {
    let bytes = to_bytes(inst)?;
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn load_instance<P: AsRef<Path>>(path: P) -> Result<ProblemInstance> {
    from_bytes(&std::fs::read(path)?)
}

pub fn to_bytes(inst: &ProblemInstance) -> Result<Vec<u8>> {
    let polytope = match &inst.polytope {
        PolytopeModel::Simplex { n } => PolytopeHeader::Simplex { n: *n },
        PolytopeModel::Hypercube { n } => PolytopeHeader::Hypercube { n: *n },
        PolytopeModel::L1Ball { n, eta_override } => {
            PolytopeHeader::L1Ball { n: *n, eta: *eta_override }
        }
        PolytopeModel::Flow(f) => PolytopeHeader::Flow {
            network: f.network().to_text(),
            eta: f.eta_override(),
        },
    };

    let mut arrays: Vec<(String, Vec<f64>)> = vec![("x0".into(), inst.x0.clone())];
    let objective = match &inst.objective {
        ObjectiveKind::Quadratic(QuadraticObjective::LeastSquares { a, b, .. }) => {
            arrays.push(("a".into(), a.as_slice().to_vec()));
            arrays.push(("b".into(), b.as_slice().to_vec()));
            ObjectiveHeader::LeastSquares { m: a.nrows(), n: a.ncols() }
        }
        ObjectiveKind::Quadratic(QuadraticObjective::Form { q, b, constant, l, mu }) => {
            arrays.push(("q".into(), q.as_slice().to_vec()));
            arrays.push(("b".into(), b.as_slice().to_vec()));
            ObjectiveHeader::QuadraticForm { n: q.ncols(), constant: *constant, l: *l, mu: *mu }
        }
        ObjectiveKind::Logistic(o) => {
            let (a, labels) = o.data();
            arrays.push(("a".into(), a.as_slice().to_vec()));
            arrays.push(("labels".into(), labels.as_slice().to_vec()));
            ObjectiveHeader::Logistic { m: a.nrows(), n: a.ncols(), lambda: o.lambda() }
        }
    };

    let header = FileHeader {
        name: inst.name.clone(),
        seed: inst.seed,
        known_fstar: inst.known_fstar,
        polytope,
        objective,
        arrays: arrays.iter().map(|(n, v)| (n.clone(), v.len())).collect(),
    };
    let header_json = serde_json::to_vec(&header)?;

    let mut out = Vec::new();
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(header_json.len() as u64).to_le_bytes())?;
    out.write_all(&header_json)?;
    for (_, v) in &arrays {
        for x in v {
            out.write_all(&x.to_le_bytes())?;
        }
    }
    Ok(out)
}

pub fn from_bytes(bytes: &[u8]) -> Result<ProblemInstance> {
    let mut cursor = std::io::Cursor::new(bytes);
    let mut magic = [0u8; 4];
    cursor.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Parse("not an instance file (bad magic)".into()));
    }
    let mut word = [0u8; 4];
    cursor.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != VERSION {
        return Err(Error::Parse(format!("unsupported instance version {version}")));
    }
    let mut len = [0u8; 8];
    cursor.read_exact(&mut len)?;
    let header_len = u64::from_le_bytes(len) as usize;
    let mut header_json = vec![0u8; header_len];
    cursor.read_exact(&mut header_json)?;
    let header: FileHeader = serde_json::from_slice(&header_json)?;

    let mut arrays = Vec::with_capacity(header.arrays.len());
    for (name, count) in &header.arrays {
        let mut v = Vec::with_capacity(*count);
        let mut buf = [0u8; 8];
        for _ in 0..*count {
            cursor.read_exact(&mut buf).map_err(|_| {
                Error::Parse(format!("payload truncated while reading array {name:?}"))
            })?;
            v.push(f64::from_le_bytes(buf));
        }
        arrays.push((name.clone(), v));
    }

    let take = |name: &str| -> Result<Vec<f64>> {
        arrays
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::Parse(format!("missing array {name:?}")))
    };

    let polytope = match header.polytope {
        PolytopeHeader::Simplex { n } => PolytopeModel::simplex(n)?,
        PolytopeHeader::Hypercube { n } => PolytopeModel::hypercube(n)?,
        PolytopeHeader::L1Ball { n, eta } => match eta {
            Some(eta) => PolytopeModel::l1_ball_with_eta(n, eta)?,
            None => PolytopeModel::l1_ball(n)?,
        },
        PolytopeHeader::Flow { network, eta } => {
            let net = DagFlowNetwork::from_text(&network)?;
            let mut fp = FlowPolytope::new(net);
            if let Some(eta) = eta {
                fp = fp.with_eta(eta);
            }
            PolytopeModel::Flow(fp)
        }
    };

    let objective = match header.objective {
        ObjectiveHeader::LeastSquares { m, n } => {
            let a = DMatrix::from_column_slice(m, n, &take("a")?);
            let b = DVector::from_column_slice(&take("b")?);
            ObjectiveKind::Quadratic(QuadraticObjective::least_squares(a, b))
        }
        ObjectiveHeader::QuadraticForm { n, constant, l, mu } => {
            let q = DMatrix::from_column_slice(n, n, &take("q")?);
            let b = DVector::from_column_slice(&take("b")?);
            ObjectiveKind::Quadratic(
                QuadraticObjective::quadratic_form(q, b, constant).with_constants(l, mu),
            )
        }
        ObjectiveHeader::Logistic { m, n, lambda } => {
            let a = DMatrix::from_column_slice(m, n, &take("a")?);
            let labels = DVector::from_column_slice(&take("labels")?);
            ObjectiveKind::Logistic(LogisticObjective::new(a, labels, lambda))
        }
    };

    Ok(ProblemInstance {
        name: header.name,
        objective,
        polytope,
        x0: take("x0")?,
        known_fstar: header.known_fstar,
        seed: header.seed,
    })
}
