//! Post-hoc summaries of trace directories: a human-readable table plus
//! optional down-sampled plot-data CSVs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::solvers::{TraceRow, TRACE_CSV_HEADER};

#[derive(Debug, Clone)]
pub struct SummaryOptions {
    /// Gap threshold for the iterations-to-tolerance column.
    pub tol: f64,
    /// When set, write `plot_<label>.csv` series (k, gap, time_ns),
    /// down-sampled to at most `plot_points` rows, into this directory.
    pub plot_dir: Option<PathBuf>,
    pub plot_points: usize,
}

impl Default for SummaryOptions {
    fn default() -> Self {
        Self { tol: 1e-6, plot_dir: None, plot_points: 500 }
    }
}

/// Parses a trace CSV produced by [`crate::solvers::ConvergenceTrace`].
pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == TRACE_CSV_HEADER => {}
        _ => return Err(Error::Parse(format!("{} is not a trace CSV", path.display()))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 9 {
            return Err(Error::Parse(format!("row {i} has {} columns", cols.len())));
        }
        let field = |j: usize| -> Result<f64> {
            cols[j].parse().map_err(|_| Error::Parse(format!("bad number {:?}", cols[j])))
        };
        rows.push(TraceRow {
            k: cols[0].parse().map_err(|_| Error::Parse("bad k".into()))?,
            f: field(1)?,
            gap: field(2)?,
            bound: field(3)?,
            radius: field(4)?,
            time_ns: cols[5].parse().map_err(|_| Error::Parse("bad time".into()))?,
            lmo_calls: cols[6].parse().map_err(|_| Error::Parse("bad lmo".into()))?,
            slmo2_calls: cols[7].parse().map_err(|_| Error::Parse("bad slmo2".into()))?,
            inner_iters: cols[8].parse().map_err(|_| Error::Parse("bad inner".into()))?,
        });
    }
    Ok(rows)
}

/// Strips the `_rep<k>` suffix from a trace file stem to get its group label.
fn group_label(stem: &str) -> String {
    match stem.rfind("_rep") {
        Some(pos) if stem[pos + 4..].chars().all(|c| c.is_ascii_digit()) => {
            stem[..pos].to_string()
        }
        _ => stem.to_string(),
    }
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    values[values.len() / 2]
}

/// Scans `dir` for trace CSVs, groups them by solver label, and renders a
/// table. An empty directory yields the header only.
pub fn summarize_dir(dir: &Path, opts: &SummaryOptions) -> Result<String> {
    let mut groups: BTreeMap<String, Vec<(PathBuf, Vec<TraceRow>)>> = BTreeMap::new();
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    entries.sort();
    for path in entries {
        let Ok(rows) = read_trace_csv(&path) else { continue };
        let stem = path.file_stem().unwrap_or_default().to_string_lossy().to_string();
        groups.entry(group_label(&stem)).or_default().push((path, rows));
    }

    let mut out = String::new();
    out.push_str(&format!(
        "{:<40} {:>4} {:>10} {:>12} {:>12} {:>12}\n",
        "solver", "reps", "rows", "final_gap", "iters@tol", "time_ms"
    ));
    for (label, runs) in &groups {
        let mut finals: Vec<f64> =
            runs.iter().filter_map(|(_, r)| r.last().map(|row| row.gap)).collect();
        let mut iters: Vec<f64> = runs
            .iter()
            .filter_map(|(_, r)| {
                r.iter().find(|row| row.gap <= opts.tol).map(|row| row.k as f64)
            })
            .collect();
        let mut times: Vec<f64> = runs
            .iter()
            .filter_map(|(_, r)| r.last().map(|row| row.time_ns as f64 / 1e6))
            .collect();
        let mut rows: Vec<f64> = runs.iter().map(|(_, r)| r.len() as f64).collect();
        let iters_str = if iters.is_empty() {
            "-".to_string()
        } else {
            format!("{:.0}", median(&mut iters))
        };
        out.push_str(&format!(
            "{:<40} {:>4} {:>10.0} {:>12.3e} {:>12} {:>12.2}\n",
            label,
            runs.len(),
            median(&mut rows),
            median(&mut finals),
            iters_str,
            median(&mut times)
        ));

        if let Some(plot_dir) = &opts.plot_dir {
            std::fs::create_dir_all(plot_dir)?;
            if let Some((_, rows)) = runs.first() {
                let stride = (rows.len() / opts.plot_points.max(1)).max(1);
                let mut csv = String::from("k,gap,time_ns\n");
                for (i, row) in rows.iter().enumerate() {
                    if i % stride == 0 || i + 1 == rows.len() {
                        csv.push_str(&format!("{},{},{}\n", row.k, row.gap, row.time_ns));
                    }
                }
                std::fs::write(plot_dir.join(format!("plot_{label}.csv")), csv)?;
            }
        }
    }
    Ok(out)
}
