//! Command implementations behind the `smoothmax` binary. Each command takes
//! already-parsed arguments and returns its output, so the binary only deals
//! with flags, files and exit codes.

mod bench;
mod csv;
mod gradcheck;
mod solve;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

pub use bench::{run_bench, BenchConfig, BenchReport, BenchRow, InstanceDescriptor, ScalingFit};
pub use csv::{parse_points_csv, parse_points_str};
pub use gradcheck::{run_gradcheck, GradcheckConfig, GradcheckSummary, GRADIENT_TOLERANCE, HESSIAN_TOLERANCE};
pub use solve::{run_solve, ConstantsOutput, SolveOptions, SolveOutput, TraceRow};

use crate::error::Error;
use crate::smooth::Reduction;

/// Environment variable selecting the parallel-reduction thread count.
pub const THREADS_ENV: &str = "SMOOTHMAX_THREADS";

pub mod exit {
    pub const OK: u8 = 0;
    pub const CHECK_FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const PARSE: u8 = 3;
    pub const SOLVER: u8 = 4;
}

/// An error together with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: exit::USAGE,
            message: message.into(),
        }
    }

    pub fn parse(err: Error) -> Self {
        Self {
            code: exit::PARSE,
            message: err.to_string(),
        }
    }

    pub fn solver(err: impl fmt::Display) -> Self {
        Self {
            code: exit::SOLVER,
            message: err.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Smooth,
    Coreset,
    Exact,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Smooth => "smooth",
            Algorithm::Coreset => "coreset",
            Algorithm::Exact => "exact",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "smooth" => Ok(Algorithm::Smooth),
            "coreset" => Ok(Algorithm::Coreset),
            "exact" => Ok(Algorithm::Exact),
            other => Err(format!(
                "unknown algorithm '{other}' (expected smooth, coreset or exact)"
            )),
        }
    }
}

/// Reads [`THREADS_ENV`]: unset, empty or 1 means sequential.
pub fn reduction_from_env() -> Result<(Reduction, usize), CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => {
            let threads: usize = v
                .trim()
                .parse()
                .map_err(|_| CliError::usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
            match threads {
                0 => Err(CliError::usage(format!("{THREADS_ENV} must be at least 1"))),
                1 => Ok((Reduction::Sequential, 1)),
                t => Ok((Reduction::Parallel, t)),
            }
        }
        _ => Ok((Reduction::Sequential, 1)),
    }
}

pub(crate) fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

pub(crate) fn check_relative_epsilon(eps: f64) -> Result<(), CliError> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(CliError::usage(format!("--epsilon must lie in (0, 1], got {eps}")))
    }
}
