//! Benchmark harness: experiment suites over (solver, repetition) cells,
//! oracle microbenchmarks, and trace summaries. This is the library behind
//! the `sfw-bench` binary; everything here is callable from tests.

mod oracle;
mod summarize;

pub use oracle::{
    loglog_slope, run_oracle_bench, write_measurements_csv, BenchPolytope, OracleBenchSpec,
    OracleKind, OracleMeasurement,
};
pub use summarize::{read_trace_csv, summarize_dir, SummaryOptions};

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytopes::DagFlowNetwork;
use crate::problems::{
    gen_flow_qp, gen_l1_least_squares, gen_logistic, gen_simplex_least_squares, ProblemInstance,
};
use crate::solvers::{
    solve_afw, solve_fw, solve_pfw, solve_rsfw, solve_rsfw_p, solve_sfw, solve_sfw_p,
    Acceleration, BoundPolicy, Objective, SolveResult, SolverOptions, StepRule, WarmStart,
};

/// Problem family selector for experiment specs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProblemConfig {
    L1LeastSquares { m: usize, n: usize, sparsity: f64 },
    SimplexLeastSquares { m: usize, n: usize, density: f64 },
    FlowQp {
        #[serde(default)]
        layers: Option<usize>,
        #[serde(default)]
        width: Option<usize>,
        #[serde(default)]
        network_file: Option<String>,
        cond: f64,
    },
    Logistic {
        m: usize,
        n: usize,
        #[serde(default)]
        lambda: Option<f64>,
        #[serde(default)]
        beta: Option<f64>,
    },
    File { path: String },
}

/// Builds the instance for one repetition (`seed` already offset).
pub fn build_problem(cfg: &ProblemConfig, seed: u64) -> Result<ProblemInstance> {
    match cfg {
        ProblemConfig::L1LeastSquares { m, n, sparsity } => {
            gen_l1_least_squares(*m, *n, *sparsity, seed)
        }
        ProblemConfig::SimplexLeastSquares { m, n, density } => {
            gen_simplex_least_squares(*m, *n, *density, seed)
        }
        ProblemConfig::FlowQp { layers, width, network_file, cond } => {
            let network = match (network_file, layers, width) {
                (Some(path), _, _) => DagFlowNetwork::from_file(path)?,
                (None, Some(l), Some(w)) => DagFlowNetwork::layered(*l, *w)?,
                _ => {
                    return Err(Error::InvalidParameter(
                        "flow_qp needs either network_file or layers + width".into(),
                    ))
                }
            };
            gen_flow_qp(network, *cond, seed)
        }
        ProblemConfig::Logistic { m, n, lambda, beta } => {
            gen_logistic(*m, *n, *lambda, beta.unwrap_or(1.0), seed)
        }
        ProblemConfig::File { path } => crate::problems::io::load_instance(path),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Fw,
    Sfw,
    SfwP,
    Rsfw,
    RsfwP,
    Afw,
    Pfw,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Fw => "fw",
            Self::Sfw => "sfw",
            Self::SfwP => "sfw_p",
            Self::Rsfw => "rsfw",
            Self::RsfwP => "rsfw_p",
            Self::Afw => "afw",
            Self::Pfw => "pfw",
        }
    }
}

fn default_step_rule() -> StepRule {
    StepRule::LineSearch
}
fn default_rho() -> f64 {
    1.01
}
fn default_tol() -> f64 {
    1e-8
}
fn default_max_iter() -> usize {
    100_000
}
fn default_bound() -> BoundPolicy {
    BoundPolicy::LmoBased
}
fn default_warm() -> WarmStart {
    WarmStart::Ratio { rho_prime: 2.0 }
}
fn default_accel() -> Acceleration {
    Acceleration::None
}

/// One solver cell of an experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub solver: SolverKind,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default = "default_step_rule")]
    pub step_rule: StepRule,
    #[serde(default = "default_step_rule")]
    pub inner_rule: StepRule,
    #[serde(default = "default_rho")]
    pub rho: f64,
    /// Convenience override for the ratio warm start.
    #[serde(default)]
    pub rho_prime: Option<f64>,
    #[serde(default = "default_bound")]
    pub bound: BoundPolicy,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub inner_cap: Option<usize>,
    #[serde(default = "default_warm")]
    pub warm_start: WarmStart,
    #[serde(default = "default_accel")]
    pub accel: Acceleration,
    /// Inject the instance's known optimal value into the bound updates.
    #[serde(default)]
    pub use_known_fstar: bool,
    /// Per-solver problem-seed override (solvers themselves are
    /// deterministic; this regenerates the instance).
    #[serde(default)]
    pub seed: Option<u64>,
}

impl SolverConfig {
    pub fn new(solver: SolverKind) -> Self {
        serde_json::from_value(serde_json::json!({ "solver": solver.name() }))
            .expect("default solver config deserializes")
    }

    pub fn label(&self) -> String {
        match &self.label {
            Some(l) => l.clone(),
            None => self.solver.name().to_string(),
        }
    }

    pub fn to_options(&self, known_fstar: Option<f64>) -> SolverOptions {
        let warm_start = match (self.warm_start, self.rho_prime) {
            (WarmStart::Ratio { .. }, Some(rp)) => WarmStart::Ratio { rho_prime: rp },
            (w, _) => w,
        };
        SolverOptions {
            step_rule: self.step_rule,
            inner_rule: self.inner_rule,
            tol: self.tol,
            max_iter: self.max_iter,
            rho: self.rho,
            warm_start,
            accel: self.accel,
            bound: self.bound,
            inner_cap: self.inner_cap,
            known_fstar_bound: if self.use_known_fstar { known_fstar } else { None },
            line_search_fallback: true,
        }
    }
}

/// A full experiment: one problem, several solvers, repeated runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub problem: ProblemConfig,
    pub solvers: Vec<SolverConfig>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
}

fn default_repetitions() -> usize {
    1
}

impl ExperimentSpec {
    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn from_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Outcome of one (solver, repetition) cell.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub label: String,
    pub solver: SolverKind,
    pub repetition: usize,
    pub trace_file: Option<PathBuf>,
    pub error: Option<String>,
    pub iterations: usize,
    pub final_f: f64,
    pub final_gap: f64,
    pub iters_to_tol: Option<usize>,
    pub time_to_tol_ns: Option<u128>,
    pub total_time_ns: u128,
    /// `None` when no envelope applies (plain FW/AFW/PFW, backtracking mode,
    /// or an ineligible step rule).
    pub envelope_violations: Option<u64>,
    pub cap_hits: u64,
}

#[derive(Debug)]
pub struct ExperimentReport {
    pub name: String,
    pub cells: Vec<CellOutcome>,
    pub summary_file: PathBuf,
}

impl ExperimentReport {
    /// True when every cell completed and no envelope assertion failed.
    pub fn all_ok(&self) -> bool {
        self.cells
            .iter()
            .all(|c| c.error.is_none() && c.envelope_violations.unwrap_or(0) == 0)
    }
}

pub fn dispatch_solver(
    kind: SolverKind,
    inst: &ProblemInstance,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    let obj = inst.objective();
    let p = &inst.polytope;
    match kind {
        SolverKind::Fw => solve_fw(obj, p, &inst.x0, opts),
        SolverKind::Sfw => solve_sfw(obj, p, &inst.x0, opts),
        SolverKind::SfwP => solve_sfw_p(obj, p, &inst.x0, opts),
        SolverKind::Rsfw => solve_rsfw(obj, p, opts),
        SolverKind::RsfwP => solve_rsfw_p(obj, p, &inst.x0, opts),
        SolverKind::Afw => solve_afw(obj, p, &inst.x0, opts),
        SolverKind::Pfw => solve_pfw(obj, p, &inst.x0, opts),
    }
}

/// Theoretical per-iteration envelope for the SFW family, when one applies
/// to the configured step rule and declared constants.
pub fn envelope_violation_count(
    kind: SolverKind,
    cfg: &SolverConfig,
    inst: &ProblemInstance,
    trace: &crate::solvers::ConvergenceTrace,
) -> Option<u64> {
    let eligible_outer = matches!(
        cfg.step_rule,
        StepRule::LineSearch | StepRule::Short | StepRule::ConstantSfw | StepRule::ConstantSfwP
    );
    let eligible_inner = matches!(
        cfg.inner_rule,
        StepRule::Simple | StepRule::LineSearch | StepRule::Short
    );
    let mu = inst.objective.strong_convexity()?;
    let l = inst.objective.smoothness()?;
    let n = inst.polytope.ambient_dim() as f64;
    let eta = inst.polytope.geometry().eta;
    let rows = &trace.rows;
    if rows.is_empty() {
        return Some(0);
    }
    let d0 = rows[0].radius;
    let f0_gap = rows[0].f - rows[0].bound;
    let rho = cfg.rho;

    let env = |k: usize| -> Option<f64> {
        match kind {
            SolverKind::Sfw if eligible_outer => {
                Some(0.5 * mu * d0 * d0 * (-mu / (4.0 * l * n * n) * k as f64).exp())
            }
            SolverKind::SfwP if eligible_outer => {
                let denom = 4.0 * l * (n + 1.0) * (n + 1.0) * eta * eta;
                Some(0.5 * mu * d0 * d0 * (-mu / denom * k as f64).exp())
            }
            SolverKind::Rsfw if eligible_inner && k >= 1 => {
                Some(mu / (2.0 * n * n * rho.powi(2 * k as i32)))
            }
            SolverKind::RsfwP if eligible_inner && k >= 1 => {
                Some(f0_gap * rho.powi(-2 * (k as i32)))
            }
            _ => None,
        }
    };
    if env(1).is_none() && env(0).is_none() {
        return None;
    }
    let scale = f0_gap.abs().max(1.0);
    let mut violations = 0;
    for row in rows {
        if let Some(e) = env(row.k) {
            if row.f - row.bound > e * (1.0 + 1e-9) + 1e-12 * scale {
                violations += 1;
            }
        }
    }
    Some(violations)
}

/// Runs every (solver, repetition) cell of the spec, writing one trace CSV
/// per cell plus a summary CSV. Cell failures are recorded and the run
/// continues.
pub fn run_experiment(
    spec: &ExperimentSpec,
    seed_override: Option<u64>,
    out_dir: &Path,
    threads: Option<usize>,
) -> Result<ExperimentReport> {
    std::fs::create_dir_all(out_dir)?;
    let base_seed = seed_override.unwrap_or(spec.seed);

    let cells: Vec<(usize, usize)> = (0..spec.solvers.len())
        .flat_map(|s| (0..spec.repetitions.max(1)).map(move |r| (s, r)))
        .collect();

    let run_cell = |&(s, r): &(usize, usize)| -> CellOutcome {
        let cfg = &spec.solvers[s];
        let label = cfg.label();
        let seed = cfg.seed.unwrap_or(base_seed) + r as u64;
        let inst = match build_problem(&spec.problem, seed) {
            Ok(i) => i,
            Err(e) => return failed_cell(cfg, r, format!("problem generation: {e}")),
        };
        let opts = cfg.to_options(inst.known_fstar);
        match dispatch_solver(cfg.solver, &inst, &opts) {
            Ok(res) => {
                let trace = &res.trace;
                let last = trace.last_row();
                let iters_to_tol = trace.iterations_to_gap(cfg.tol);
                let time_to_tol = iters_to_tol.and_then(|k| {
                    trace.rows.iter().find(|row| row.k == k).map(|row| row.time_ns)
                });
                CellOutcome {
                    label,
                    solver: cfg.solver,
                    repetition: r,
                    trace_file: None,
                    error: None,
                    iterations: trace.rows.last().map_or(0, |row| row.k),
                    final_f: last.map_or(f64::NAN, |row| row.f),
                    final_gap: last.map_or(f64::NAN, |row| row.gap),
                    iters_to_tol,
                    time_to_tol_ns: time_to_tol,
                    total_time_ns: last.map_or(0, |row| row.time_ns),
                    envelope_violations: envelope_violation_count(cfg.solver, cfg, &inst, trace),
                    cap_hits: trace.cap_hits,
                }
                .with_trace(out_dir, &spec.name, trace, r)
            }
            Err(e) => failed_cell(cfg, r, e.to_string()),
        }
    };

    let mut outcomes: Vec<CellOutcome> = match threads {
        Some(t) if t > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            pool.install(|| cells.par_iter().map(run_cell).collect())
        }
        _ => cells.iter().map(run_cell).collect(),
    };
    outcomes.sort_by(|a, b| (a.label.clone(), a.repetition).cmp(&(b.label.clone(), b.repetition)));

    let summary_file = out_dir.join(format!("{}_summary.csv", spec.name));
    write_summary(&summary_file, &outcomes)?;
    Ok(ExperimentReport { name: spec.name.clone(), cells: outcomes, summary_file })
}

impl CellOutcome {
    fn with_trace(
        mut self,
        out_dir: &Path,
        exp_name: &str,
        trace: &crate::solvers::ConvergenceTrace,
        rep: usize,
    ) -> Self {
        let path = out_dir.join(format!("{exp_name}_{}_rep{rep}.csv", self.label));
        match std::fs::File::create(&path).and_then(|f| trace.write_csv(f)) {
            Ok(()) => self.trace_file = Some(path),
            Err(e) => self.error = Some(format!("trace write: {e}")),
        }
        self
    }
}

fn failed_cell(cfg: &SolverConfig, rep: usize, error: String) -> CellOutcome {
    CellOutcome {
        label: cfg.label(),
        solver: cfg.solver,
        repetition: rep,
        trace_file: None,
        error: Some(error),
        iterations: 0,
        final_f: f64::NAN,
        final_gap: f64::NAN,
        iters_to_tol: None,
        time_to_tol_ns: None,
        total_time_ns: 0,
        envelope_violations: None,
        cap_hits: 0,
    }
}

fn write_summary(path: &Path, cells: &[CellOutcome]) -> Result<()> {
    use std::io::Write;
    let mut f = std::fs::File::create(path)?;
    writeln!(
        f,
        "label,solver,rep,status,iterations,final_f,final_gap,iters_to_tol,time_to_tol_ns,total_time_ns,envelope_violations,cap_hits"
    )?;
    for c in cells {
        let status = if c.error.is_some() { "error" } else { "ok" };
        writeln!(
            f,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            c.label,
            c.solver.name(),
            c.repetition,
            status,
            c.iterations,
            c.final_f,
            c.final_gap,
            c.iters_to_tol.map_or(String::new(), |v| v.to_string()),
            c.time_to_tol_ns.map_or(String::new(), |v| v.to_string()),
            c.total_time_ns,
            c.envelope_violations.map_or(String::new(), |v| v.to_string()),
            c.cap_hits
        )?;
    }
    Ok(())
}
