use std::time::Instant;

use serde::Serialize;

use super::{check_relative_epsilon, elapsed_ms, Algorithm, CliError};
use crate::baselines::{badoiu_clarkson_observed, welzl_exact, MAX_EXACT_DIM};
use crate::meb::{solve_meb_observed, MebConfig, MebResult, PointCloud};
use crate::smooth::Reduction;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub algorithm: Algorithm,
    pub relative_epsilon: f64,
    pub seed: u64,
    pub trace: bool,
    pub verify: bool,
    pub reduction: Reduction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsOutput {
    pub s: f64,
    #[serde(rename = "L_s")]
    pub l_s: f64,
    #[serde(rename = "U_s")]
    pub u_s: f64,
    pub kappa_s: f64,
    #[serde(rename = "G_s")]
    pub g_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOutput {
    pub exact_radius: f64,
    pub radius_over_exact: f64,
    pub within_guarantee: bool,
}

/// JSON document written by `solve`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOutput {
    pub algorithm: String,
    pub n: usize,
    pub d: usize,
    pub epsilon: f64,
    pub center: Vec<f64>,
    pub radius: f64,
    pub iterations: usize,
    pub planned_iterations: usize,
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsOutput>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyOutput>,
}

/// One per-iteration trace line. For the smoothed solver `value` is
/// `f_s(y_t)` and `gradient_norm` is `‖∇f_s(y_t)‖`; for the core-set
/// iteration `value` is the covering radius of the current center.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub value: f64,
    pub gradient_norm: Option<f64>,
}

impl TraceRow {
    pub fn csv_header(algorithm: Algorithm) -> &'static str {
        match algorithm {
            Algorithm::Smooth => "t,smooth_value,gradient_norm",
            _ => "t,covering_radius",
        }
    }

    pub fn to_csv(&self) -> String {
        match self.gradient_norm {
            Some(g) => format!("{},{},{}", self.t, self.value, g),
            None => format!("{},{}", self.t, self.value),
        }
    }
}

/// Solves one instance; returns the JSON document and, when requested, the
/// per-iteration trace.
pub fn run_solve(cloud: &PointCloud, opts: &SolveOptions) -> Result<(SolveOutput, Vec<TraceRow>), CliError> {
    check_relative_epsilon(opts.relative_epsilon)?;
    let mut trace = Vec::new();
    let start = Instant::now();
    let result: MebResult = match opts.algorithm {
        Algorithm::Smooth => {
            let mut config = MebConfig::new(opts.relative_epsilon).map_err(CliError::solver)?;
            config.reduction = opts.reduction;
            solve_meb_observed(cloud, &config, |p| {
                if opts.trace {
                    trace.push(TraceRow {
                        t: p.t,
                        value: p.smooth_value.unwrap_or(f64::NAN),
                        gradient_norm: Some(p.gradient_norm),
                    });
                }
            })
            .map_err(CliError::solver)?
        }
        Algorithm::Coreset => badoiu_clarkson_observed(cloud, opts.relative_epsilon, |k, sq| {
            if opts.trace {
                trace.push(TraceRow {
                    t: k,
                    value: sq.sqrt(),
                    gradient_norm: None,
                });
            }
        })
        .map_err(CliError::solver)?,
        Algorithm::Exact => {
            let exact = welzl_exact(cloud, opts.seed).map_err(CliError::solver)?;
            MebResult {
                center: exact.center,
                radius: exact.radius,
                iterations: 0,
                planned_iterations: 0,
                epsilon_gap_used: 0.0,
                radius_lower: 0.0,
                radius_upper: 0.0,
                constants: None,
            }
        }
    };
    let wall_time_ms = elapsed_ms(start);

    let verify = if opts.verify {
        if cloud.dim() > MAX_EXACT_DIM {
            return Err(CliError::usage(format!(
                "--verify needs an exact reference, available up to dimension {MAX_EXACT_DIM}"
            )));
        }
        let exact = welzl_exact(cloud, opts.seed).map_err(CliError::solver)?;
        let ratio = if exact.radius > 0.0 {
            result.radius / exact.radius
        } else if result.radius == 0.0 {
            1.0
        } else {
            f64::INFINITY
        };
        let bound = match opts.algorithm {
            Algorithm::Exact => 1.0,
            _ => 1.0 + opts.relative_epsilon,
        };
        Some(VerifyOutput {
            exact_radius: exact.radius,
            radius_over_exact: ratio,
            within_guarantee: ratio <= bound * (1.0 + 1e-9),
        })
    } else {
        None
    };

    let output = SolveOutput {
        algorithm: opts.algorithm.name().to_string(),
        n: cloud.n(),
        d: cloud.dim(),
        epsilon: opts.relative_epsilon,
        center: result.center,
        radius: result.radius,
        iterations: result.iterations,
        planned_iterations: result.planned_iterations,
        wall_time_ms,
        constants: result.constants.map(|c| ConstantsOutput {
            s: c.s,
            l_s: c.l_s,
            u_s: c.u_s,
            kappa_s: c.kappa_s,
            g_s: c.g_s,
        }),
        verify,
    };
    if let Some(v) = &output.verify {
        if !v.within_guarantee {
            return Err(CliError::solver(format!(
                "verification failed: radius {} is {} times the exact radius {}",
                output.radius, v.radius_over_exact, v.exact_radius
            )));
        }
    }
    Ok((output, trace))
}
