use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use smoothmax::cli::{
    self, exit, parse_points_csv, reduction_from_env, run_bench, run_gradcheck, run_solve, Algorithm, BenchConfig,
    BenchReport, CliError, GradcheckConfig, SolveOptions, TraceRow,
};
use smoothmax::testkit::PointDistribution;

#[derive(Parser)]
#[command(
    name = "smoothmax",
    version,
    about = "Smoothed min-max solver and enclosing-ball benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Smooth,
    Coreset,
    Exact,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Smooth => Algorithm::Smooth,
            AlgorithmArg::Coreset => Algorithm::Coreset,
            AlgorithmArg::Exact => Algorithm::Exact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DistributionArg {
    Gaussian,
    SphereSurface,
    Clustered,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an enclosing ball for the points in a CSV file.
    Solve {
        #[arg(long)]
        input: PathBuf,
        /// Relative approximation ε̃ in (0, 1].
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, value_enum, default_value = "smooth")]
        algorithm: AlgorithmArg,
        /// Output JSON path (stdout if omitted).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Seed for the exact solver's point order.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-iteration CSV trace.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Check the radius against the exact solver.
        #[arg(long)]
        verify: bool,
    },
    /// Compare algorithms over a sweep of ε̃ on one generated instance.
    Bench {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, value_enum, default_value = "gaussian")]
        distribution: DistributionArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.025")]
        epsilons: Vec<f64>,
        #[arg(long, value_delimiter = ',', value_enum, default_value = "smooth,coreset")]
        algorithms: Vec<AlgorithmArg>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Check smooth-max gradients and Hessians against finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 10.0)]
        smoother: f64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::solver(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::solver(e.to_string()))
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(CliError::solver)
}

fn run(command: Command) -> Result<u8, CliError> {
    let (reduction, threads) = reduction_from_env()?;
    if threads > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::usage(e.to_string()))?;
    }

    match command {
        Command::Solve {
            input,
            epsilon,
            algorithm,
            output,
            seed,
            trace,
            verify,
        } => {
            let algorithm = Algorithm::from(algorithm);
            let cloud = parse_points_csv(&input).map_err(CliError::parse)?;
            let opts = SolveOptions {
                algorithm,
                relative_epsilon: epsilon,
                seed,
                trace: trace.is_some(),
                verify,
                reduction,
            };
            let (result, rows) = run_solve(&cloud, &opts)?;
            if let Some(path) = trace {
                let mut text = String::from(TraceRow::csv_header(algorithm));
                text.push('\n');
                for r in &rows {
                    text.push_str(&r.to_csv());
                    text.push('\n');
                }
                write_output(Some(&path), &text)?;
            }
            write_output(output.as_deref(), &to_json(&result)?)?;
            Ok(exit::OK)
        }
        Command::Bench {
            n,
            dim,
            distribution,
            seed,
            epsilons,
            algorithms,
            output,
            format,
        } => {
            let distribution = match distribution {
                DistributionArg::Gaussian => PointDistribution::Gaussian,
                DistributionArg::SphereSurface => PointDistribution::SphereSurface,
                DistributionArg::Clustered => PointDistribution::Clustered { clusters: 3 },
            };
            let cfg = BenchConfig {
                n,
                dim,
                distribution,
                seed,
                epsilons,
                algorithms: algorithms.into_iter().map(Algorithm::from).collect(),
                reduction,
            };
            let report: BenchReport = run_bench(&cfg)?;
            let text = match format {
                Format::Json => to_json(&report)?,
                Format::Csv => report.to_csv(),
            };
            write_output(output.as_deref(), &text)?;
            Ok(exit::OK)
        }
        Command::Gradcheck {
            seed,
            n,
            dim,
            smoother,
            trials,
        } => {
            let summary = run_gradcheck(&GradcheckConfig {
                seed,
                n,
                dim,
                smoother,
                trials,
            })?;
            println!(
                "trials={} max_gradient_error={:.3e} (trial {}) max_hessian_error={:.3e} (trial {}) max_asymmetry={:.3e}",
                summary.trials,
                summary.max_gradient_error,
                summary.worst_gradient_trial,
                summary.max_hessian_error,
                summary.worst_hessian_trial,
                summary.max_asymmetry
            );
            if summary.passed {
                Ok(exit::OK)
            } else {
                eprintln!(
                    "tolerance exceeded: gradient <= {:e}, Hessian <= {:e}",
                    cli::GRADIENT_TOLERANCE,
                    cli::HESSIAN_TOLERANCE
                );
                Ok(exit::CHECK_FAILED)
            }
        }
    }
}

fn main() -> ExitCode {
    let parsed = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(parsed.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
