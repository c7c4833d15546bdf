//! Benchmark CLI: runs experiment suites and oracle microbenchmarks, and
//! summarizes trace directories.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use simplex_fw::bench::{
    run_experiment, run_oracle_bench, summarize_dir, ExperimentSpec, OracleBenchSpec,
    SummaryOptions,
};

#[derive(Parser)]
#[command(name = "sfw-bench", version, about = "Frank-Wolfe solver benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (solver, repetition) cell of an experiment spec, writing
    /// one trace CSV per cell plus a summary CSV.
    Experiment {
        /// JSON experiment spec.
        spec: PathBuf,
        /// Override the spec's problem seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: traces/<spec name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for independent cells (default: sequential).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Time oracle kernels over a dimension sweep.
    OracleBench {
        /// JSON oracle-bench spec.
        spec: PathBuf,
        /// Override the spec's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: traces/<spec name>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize the trace CSVs in a directory.
    Summarize {
        dir: PathBuf,
        /// Gap threshold for the iterations-to-tolerance column.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Also emit down-sampled gap-vs-iteration plot CSVs here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> simplex_fw::Result<bool> {
    match Cli::parse().command {
        Command::Experiment { spec, seed, out, threads } => {
            let spec = ExperimentSpec::from_file(&spec)?;
            let out = out.unwrap_or_else(|| PathBuf::from("traces").join(&spec.name));
            let report = run_experiment(&spec, seed, &out, threads)?;
            for cell in &report.cells {
                match &cell.error {
                    Some(e) => println!(
                        "{} rep {}: ERROR {e}",
                        cell.label, cell.repetition
                    ),
                    None => println!(
                        "{} rep {}: {} iters, final gap {:.3e}, {:.1} ms{}",
                        cell.label,
                        cell.repetition,
                        cell.iterations,
                        cell.final_gap,
                        cell.total_time_ns as f64 / 1e6,
                        match cell.envelope_violations {
                            Some(0) => String::new(),
                            Some(v) => format!(", {v} envelope violations"),
                            None => String::new(),
                        }
                    ),
                }
            }
            println!("summary: {}", report.summary_file.display());
            Ok(report.all_ok())
        }
        Command::OracleBench { spec, seed, out } => {
            let mut spec = OracleBenchSpec::from_file(&spec)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            let out = out.unwrap_or_else(|| PathBuf::from("traces").join(&spec.name));
            std::fs::create_dir_all(&out)?;
            let rows = run_oracle_bench(&spec)?;
            let path = out.join(format!("{}_oracles.csv", spec.name));
            let file = std::fs::File::create(&path)?;
            simplex_fw::bench::write_measurements_csv(file, &rows)?;
            for r in &rows {
                println!("{:<12} n={:<9} {:>12.1} ns/call (±{:.1})", r.oracle.name(), r.n, r.mean_ns, r.std_ns);
            }
            println!("written: {}", path.display());
            Ok(true)
        }
        Command::Summarize { dir, tol, out } => {
            let opts = SummaryOptions { tol, plot_dir: out, ..Default::default() };
            print!("{}", summarize_dir(&dir, &opts)?);
            Ok(true)
        }
    }
}
