//! Iteration and wall-time comparison of the enclosing-ball algorithms over a
//! sweep of approximation factors on one generated instance.

use std::time::Instant;

use serde::Serialize;

use super::{check_relative_epsilon, elapsed_ms, Algorithm, CliError};
use crate::baselines::{badoiu_clarkson, badoiu_clarkson_observed, welzl_exact, MAX_EXACT_DIM};
use crate::meb::{farthest_sq_distance, solve_meb, solve_meb_observed, MebConfig, MebResult, PointCloud};
use crate::smooth::Reduction;
use crate::testkit::{random_point_cloud, PointDistribution};

/// Relative epsilon of the core-set run used as reference when the exact
/// solver is unavailable.
pub const NEAR_EXACT_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub n: usize,
    pub dim: usize,
    pub distribution: PointDistribution,
    pub seed: u64,
    pub epsilons: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub reduction: Reduction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceDescriptor {
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub distribution: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub algorithm: String,
    pub epsilon: f64,
    /// Steps executed.
    pub iterations: usize,
    /// Formula value the run was budgeted with.
    pub planned_iterations: usize,
    /// First step count whose iterate already covers the points with radius
    /// `≤ (1+ε̃)·R_exact`; needs the exact radius.
    pub observed_iterations: Option<usize>,
    pub wall_time_ms: f64,
    pub radius: f64,
    pub radius_over_exact: Option<f64>,
}

/// Least-squares slope of `log(iterations)` against `log(1/ε̃)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub algorithm: String,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub instance: InstanceDescriptor,
    /// Exact optimal radius, when the exact solver ran.
    pub exact_radius: Option<f64>,
    /// Core-set radius at [`NEAR_EXACT_EPSILON`], used instead when the
    /// dimension is too high for the exact solver.
    pub reference_radius: Option<f64>,
    pub reference: String,
    pub rows: Vec<BenchRow>,
    pub scaling: Vec<ScalingFit>,
}

impl BenchReport {
    pub const CSV_HEADER: &'static str =
        "algorithm,epsilon,iterations,planned_iterations,observed_iterations,wall_time_ms,radius,radius_over_exact";

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.algorithm,
                r.epsilon,
                r.iterations,
                r.planned_iterations,
                opt(r.observed_iterations.map(|v| v.to_string())),
                r.wall_time_ms,
                r.radius,
                opt(r.radius_over_exact.map(|v| v.to_string())),
            ));
        }
        out
    }
}

pub(crate) fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn covers(cloud: &PointCloud, x: &[f64], target_sq: f64) -> bool {
    farthest_sq_distance(cloud, x)
        .map(|(sq, _)| sq <= target_sq)
        .unwrap_or(false)
}

/// Runs `algorithm` once with instrumentation to find the first sufficient
/// step count (the untimed warm-up), then once more for timing.
fn bench_one(
    cloud: &PointCloud,
    algorithm: Algorithm,
    eps: f64,
    exact_radius: Option<f64>,
    cfg: &BenchConfig,
) -> Result<BenchRow, CliError> {
    let target_sq = exact_radius.map(|r| ((1.0 + eps) * r).powi(2) * (1.0 + 1e-12));
    let mut observed: Option<usize> = None;

    let run = |instrument: bool, observed: &mut Option<usize>| -> Result<MebResult, CliError> {
        match algorithm {
            Algorithm::Smooth => {
                let mut mc = MebConfig::new(eps).map_err(CliError::solver)?;
                mc.reduction = cfg.reduction;
                match (instrument, target_sq) {
                    (true, Some(target)) => {
                        let r = solve_meb_observed(cloud, &mc, |p| {
                            if observed.is_none() && covers(cloud, p.x, target) {
                                *observed = Some(p.t - 1);
                            }
                        })
                        .map_err(CliError::solver)?;
                        if observed.is_none() && r.radius * r.radius <= target {
                            *observed = Some(r.iterations);
                        }
                        Ok(r)
                    }
                    _ => solve_meb(cloud, &mc).map_err(CliError::solver),
                }
            }
            Algorithm::Coreset => match (instrument, target_sq) {
                (true, Some(target)) => {
                    let r = badoiu_clarkson_observed(cloud, eps, |k, sq| {
                        if observed.is_none() && sq <= target {
                            *observed = Some(k - 1);
                        }
                    })
                    .map_err(CliError::solver)?;
                    if observed.is_none() && r.radius * r.radius <= target {
                        *observed = Some(r.iterations);
                    }
                    Ok(r)
                }
                _ => badoiu_clarkson(cloud, eps).map_err(CliError::solver),
            },
            Algorithm::Exact => {
                let e = welzl_exact(cloud, cfg.seed).map_err(CliError::solver)?;
                Ok(MebResult {
                    center: e.center,
                    radius: e.radius,
                    iterations: 0,
                    planned_iterations: 0,
                    epsilon_gap_used: 0.0,
                    radius_lower: 0.0,
                    radius_upper: 0.0,
                    constants: None,
                })
            }
        }
    };

    run(true, &mut observed)?;
    let start = Instant::now();
    let result = run(false, &mut None)?;
    let wall_time_ms = elapsed_ms(start);

    Ok(BenchRow {
        algorithm: algorithm.name().to_string(),
        epsilon: eps,
        iterations: result.iterations,
        planned_iterations: result.planned_iterations,
        observed_iterations: if algorithm == Algorithm::Exact { None } else { observed },
        wall_time_ms,
        radius: result.radius,
        radius_over_exact: exact_radius.map(|r| if r > 0.0 { result.radius / r } else { 1.0 }),
    })
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport, CliError> {
    if cfg.n == 0 || cfg.dim == 0 {
        return Err(CliError::usage("--n and --dim must be positive"));
    }
    if cfg.epsilons.is_empty() || cfg.algorithms.is_empty() {
        return Err(CliError::usage("need at least one epsilon and one algorithm"));
    }
    for &e in &cfg.epsilons {
        check_relative_epsilon(e)?;
    }
    let cloud = random_point_cloud(cfg.seed, cfg.n, cfg.dim, cfg.distribution).map_err(CliError::solver)?;

    let (exact_radius, reference_radius, reference) = if cfg.dim <= MAX_EXACT_DIM {
        let e = welzl_exact(&cloud, cfg.seed).map_err(CliError::solver)?;
        (Some(e.radius), None, "welzl_exact".to_string())
    } else {
        let r = badoiu_clarkson(&cloud, NEAR_EXACT_EPSILON).map_err(CliError::solver)?;
        (None, Some(r.radius), format!("coreset_eps_{NEAR_EXACT_EPSILON}"))
    };

    let mut rows = Vec::new();
    for &algorithm in &cfg.algorithms {
        for &eps in &cfg.epsilons {
            rows.push(bench_one(&cloud, algorithm, eps, exact_radius, cfg)?);
        }
    }

    let mut scaling = Vec::new();
    for &algorithm in &cfg.algorithms {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.algorithm == algorithm.name() && r.iterations > 0)
            .map(|r| (1.0 / r.epsilon, r.iterations as f64))
            .collect();
        if let Some(slope) = loglog_slope(&points) {
            scaling.push(ScalingFit {
                algorithm: algorithm.name().to_string(),
                slope,
            });
        }
    }

    Ok(BenchReport {
        instance: InstanceDescriptor {
            seed: cfg.seed,
            n: cfg.n,
            d: cfg.dim,
            distribution: cfg.distribution.name().to_string(),
        },
        exact_radius,
        reference_radius,
        reference,
        rows,
        scaling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0].iter().map(|&x| (x, 3.0 * x * x)).collect();
        assert!((loglog_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert!(loglog_slope(&pts[..1]).is_none());
    }
}
