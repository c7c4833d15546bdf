//! Oracle microbenchmarks: per-call timing of lmo / slmo / slmo-2 /
//! projection over a dimension sweep, with batched inner loops so every
//! measurement spans at least a millisecond.

use std::hint::black_box;
use std::path::Path;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracles::{project, slmo_p_prepare, slmo_p_solve, slmo_prepare, slmo_solve};
use crate::polytopes::{DagFlowNetwork, PolytopeModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Lmo,
    /// Full restricted oracle; preparation (including the Carathéodory
    /// representation on general polytopes) is part of the timing.
    Slmo,
    /// Solve phase only; the prepared state is built outside the timer.
    Slmo2,
    Projection,
}

impl OracleKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Lmo => "lmo",
            Self::Slmo => "slmo",
            Self::Slmo2 => "slmo2",
            Self::Projection => "projection",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BenchPolytope {
    Simplex,
    Hypercube,
    L1Ball,
    /// Layered DAG sized to approximate each requested dimension.
    Flow {
        #[serde(default = "default_flow_width")]
        width: usize,
    },
}

fn default_flow_width() -> usize {
    8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleBenchSpec {
    pub name: String,
    pub polytope: BenchPolytope,
    pub dims: Vec<usize>,
    pub oracles: Vec<OracleKind>,
    #[serde(default = "default_reps")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_reps() -> usize {
    20
}

impl OracleBenchSpec {
    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn from_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone)]
pub struct OracleMeasurement {
    pub oracle: OracleKind,
    /// Realized ambient dimension (may differ from the requested one for
    /// structured polytopes).
    pub n: usize,
    pub mean_ns: f64,
    pub std_ns: f64,
}

fn build_polytope(kind: &BenchPolytope, n: usize) -> Result<PolytopeModel> {
    match kind {
        BenchPolytope::Simplex => PolytopeModel::simplex(n),
        BenchPolytope::Hypercube => PolytopeModel::hypercube(n),
        BenchPolytope::L1Ball => PolytopeModel::l1_ball(n),
        BenchPolytope::Flow { width } => {
            let w = (*width).max(1);
            let layers = ((n.saturating_sub(2 * w)) / (w * w)).max(1);
            Ok(PolytopeModel::flow(DagFlowNetwork::layered(layers, w)?))
        }
    }
}

/// Times one closure per call: calibrates a batch size so a measurement
/// takes at least ~1 ms, then reports per-call nanoseconds.
fn time_per_call<F: FnMut()>(mut f: F) -> f64 {
    let t0 = Instant::now();
    f();
    let single = t0.elapsed().as_nanos().max(1) as f64;
    let batch = ((1_000_000.0 / single).ceil() as usize).clamp(1, 10_000_000);
    let t1 = Instant::now();
    for _ in 0..batch {
        f();
    }
    t1.elapsed().as_nanos() as f64 / batch as f64
}

/// Runs the sweep. Unsupported (oracle, polytope) pairs — projection onto
/// the flow polytope — are skipped.
pub fn run_oracle_bench(spec: &OracleBenchSpec) -> Result<Vec<OracleMeasurement>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::new();
    for &dim in &spec.dims {
        if dim == 0 {
            return Err(Error::InvalidDimension("bench dimension must be >= 1".into()));
        }
        let polytope = build_polytope(&spec.polytope, dim)?;
        let n = polytope.ambient_dim();
        for &oracle in &spec.oracles {
            if matches!(oracle, OracleKind::Projection)
                && matches!(polytope, PolytopeModel::Flow(_))
            {
                continue;
            }
            let mut samples = Vec::with_capacity(spec.repetitions);
            for _ in 0..spec.repetitions.max(1) {
                let c: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                let x = polytope.random_point(&mut rng);
                let d: f64 = rng.gen();
                let d = d.max(1e-3);
                let per_call = match oracle {
                    OracleKind::Lmo => {
                        time_per_call(|| {
                            black_box(polytope.lmo(black_box(&c)).expect("dims agree"));
                        })
                    }
                    OracleKind::Slmo => match &polytope {
                        PolytopeModel::Simplex { .. } => time_per_call(|| {
                            let rb = slmo_prepare(black_box(&x), d).expect("x feasible");
                            black_box(slmo_solve(&rb, black_box(&c)).expect("dims agree"));
                        }),
                        _ => time_per_call(|| {
                            let rep = polytope.caratheodory(black_box(&x)).expect("x feasible");
                            let rb = slmo_p_prepare(&rep, d).expect("valid rep");
                            black_box(
                                slmo_p_solve(&rb, &polytope, black_box(&c)).expect("dims agree"),
                            );
                        }),
                    },
                    OracleKind::Slmo2 => match &polytope {
                        PolytopeModel::Simplex { .. } => {
                            let rb = slmo_prepare(&x, d).expect("x feasible");
                            time_per_call(|| {
                                black_box(slmo_solve(&rb, black_box(&c)).expect("dims agree"));
                            })
                        }
                        _ => {
                            let rep = polytope.caratheodory(&x).expect("x feasible");
                            let rb = slmo_p_prepare(&rep, d).expect("valid rep");
                            time_per_call(|| {
                                black_box(
                                    slmo_p_solve(&rb, &polytope, black_box(&c))
                                        .expect("dims agree"),
                                );
                            })
                        }
                    },
                    OracleKind::Projection => {
                        let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                        time_per_call(|| {
                            black_box(project(&polytope, black_box(&z)).expect("supported"));
                        })
                    }
                };
                samples.push(per_call);
            }
            let mean = samples.iter().sum::<f64>() / samples.len() as f64;
            let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>()
                / samples.len() as f64;
            out.push(OracleMeasurement { oracle, n, mean_ns: mean, std_ns: var.sqrt() });
        }
    }
    Ok(out)
}

/// Writes the measurement table as `oracle,n,mean_ns,std_ns`.
pub fn write_measurements_csv<W: std::io::Write>(
    mut w: W,
    rows: &[OracleMeasurement],
) -> std::io::Result<()> {
    writeln!(w, "oracle,n,mean_ns,std_ns")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.oracle.name(), r.n, r.mean_ns, r.std_ns)?;
    }
    Ok(())
}

/// Least-squares slope of `log(mean_ns)` against `log(n)` for one oracle.
pub fn loglog_slope(rows: &[OracleMeasurement], oracle: OracleKind) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.oracle == oracle)
        .map(|r| ((r.n as f64).ln(), r.mean_ns.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
}
