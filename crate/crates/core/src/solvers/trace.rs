//! Per-iteration convergence traces and their CSV form.

use std::io::Write;
use std::time::Instant;

/// One outer-iteration record.
///
/// `gap` is the oracle gap `<grad f(x_k), x_k - y_{k+1}>` where `y_{k+1}` is
/// the solution returned by the solver's own oracle at `x_k`; for convex
/// objectives it upper-bounds the primal gap whenever the oracle's feasible
/// set contains the optimum. `bound` and `radius` are the lower bound `B_k`
/// and ball radius `d_k` held at the end of iteration `k` (zero radius for
/// solvers that do not maintain one).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub f: f64,
    pub gap: f64,
    pub bound: f64,
    pub radius: f64,
    pub time_ns: u128,
    pub lmo_calls: u64,
    pub slmo2_calls: u64,
    pub inner_iters: u64,
}

/// Why a solver returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The stopping criterion was met.
    Converged,
    /// The iteration budget ran out first.
    MaxIterations,
}

/// Full record of one solver run.
#[derive(Debug, Clone)]
pub struct ConvergenceTrace {
    pub solver: String,
    pub rows: Vec<TraceRow>,
    pub stop_reason: StopReason,
    /// SLMO-1 / SLMO-P-1 preparation calls (one per outer iteration for the
    /// refined solvers).
    pub prepare_calls: u64,
    /// Outer iterations whose inner loop was stopped by the configured cap
    /// rather than the bound test.
    pub cap_hits: u64,
    /// Oracle calls spent on setup (initial lower bound) and on computing the
    /// final row's gap; excluded from the per-row counters.
    pub setup_lmo_calls: u64,
    /// Accepted backtracking steps and the worst sufficient-decrease margin
    /// (`rhs - lhs` of the acceptance inequality) among them.
    pub bt_accepts: u64,
    pub bt_min_margin: f64,
}

pub const TRACE_CSV_HEADER: &str = "k,f,gap,B,d,time_ns,lmo,slmo2,inner";

impl ConvergenceTrace {
    pub fn new(solver: &str) -> Self {
        Self {
            solver: solver.to_string(),
            rows: Vec::new(),
            stop_reason: StopReason::MaxIterations,
            prepare_calls: 0,
            cap_hits: 0,
            setup_lmo_calls: 0,
            bt_accepts: 0,
            bt_min_margin: f64::INFINITY,
        }
    }

    pub fn last_row(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    /// Total inner iterations across all outer iterations.
    pub fn total_inner_iters(&self) -> u64 {
        self.rows.iter().map(|r| r.inner_iters).sum()
    }

    /// First iteration index whose gap is at or below `tol`, if any.
    pub fn iterations_to_gap(&self, tol: f64) -> Option<usize> {
        self.rows.iter().find(|r| r.gap <= tol).map(|r| r.k)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{TRACE_CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.k, r.f, r.gap, r.bound, r.radius, r.time_ns, r.lmo_calls, r.slmo2_calls, r.inner_iters
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// Mutable bookkeeping threaded through a solver run.
pub(crate) struct TraceBuilder {
    trace: ConvergenceTrace,
    start: Instant,
    pub lmo_calls: u64,
    pub slmo2_calls: u64,
}

impl TraceBuilder {
    pub fn new(solver: &str) -> Self {
        Self {
            trace: ConvergenceTrace::new(solver),
            start: Instant::now(),
            lmo_calls: 0,
            slmo2_calls: 0,
        }
    }

    pub fn elapsed_ns(&self) -> u128 {
        self.start.elapsed().as_nanos()
    }

    pub fn push(&mut self, k: usize, f: f64, gap: f64, bound: f64, radius: f64, inner: u64) {
        let time_ns = self.elapsed_ns();
        self.trace.rows.push(TraceRow {
            k,
            f,
            gap,
            bound,
            radius,
            time_ns,
            lmo_calls: self.lmo_calls,
            slmo2_calls: self.slmo2_calls,
            inner_iters: inner,
        });
    }

    pub fn trace_mut(&mut self) -> &mut ConvergenceTrace {
        &mut self.trace
    }

    pub fn finish(mut self, reason: StopReason) -> ConvergenceTrace {
        self.trace.stop_reason = reason;
        self.trace
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_pinned_header_and_one_line_per_row() {
        let mut b = TraceBuilder::new("fw");
        b.lmo_calls = 1;
        b.push(0, 1.5, 0.25, 0.5, 0.0, 0);
        let t = b.finish(StopReason::Converged);
        let csv = t.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("k,f,gap,B,d,time_ns,lmo,slmo2,inner"));
        let row = lines.next().unwrap();
        assert!(row.starts_with("0,1.5,0.25,0.5,0,"));
        assert!(lines.next().is_none());
    }

    #[test]
    fn iterations_to_gap_finds_first_crossing() {
        let mut b = TraceBuilder::new("fw");
        for (k, gap) in [(0, 1.0), (1, 0.5), (2, 0.05), (3, 0.01)] {
            b.push(k, 0.0, gap, 0.0, 0.0, 0);
        }
        let t = b.finish(StopReason::Converged);
        assert_eq!(t.iterations_to_gap(0.1), Some(2));
        assert_eq!(t.iterations_to_gap(1e-9), None);
    }
}
