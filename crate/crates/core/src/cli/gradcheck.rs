use serde::Serialize;

use super::CliError;
use crate::smooth::{smooth_gradient, smooth_hessian, smooth_value, Smoother};
use crate::testkit::{
    finite_diff_gradient, finite_diff_jacobian, relative_error, rng, RandomQuadraticFamily, DEFAULT_FD_STEP,
};

pub const GRADIENT_TOLERANCE: f64 = 1e-5;
pub const HESSIAN_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct GradcheckConfig {
    pub seed: u64,
    pub n: usize,
    pub dim: usize,
    pub smoother: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradcheckSummary {
    pub trials: usize,
    pub max_gradient_error: f64,
    pub worst_gradient_trial: usize,
    pub max_hessian_error: f64,
    pub worst_hessian_trial: usize,
    pub max_asymmetry: f64,
    pub passed: bool,
}

/// Compares analytic gradients and Hessians of the smooth max against
/// central differences on random quadratic families.
pub fn run_gradcheck(cfg: &GradcheckConfig) -> Result<GradcheckSummary, CliError> {
    if cfg.trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    if cfg.n == 0 || cfg.dim == 0 {
        return Err(CliError::usage("--n and --dim must be positive"));
    }
    let smoother = Smoother::new(cfg.smoother).map_err(|e| CliError::usage(e.to_string()))?;
    let mut points = rng(cfg.seed);
    let mut summary = GradcheckSummary {
        trials: cfg.trials,
        max_gradient_error: 0.0,
        worst_gradient_trial: 0,
        max_hessian_error: 0.0,
        worst_hessian_trial: 0,
        max_asymmetry: 0.0,
        passed: false,
    };

    for trial in 0..cfg.trials {
        let instance = RandomQuadraticFamily::generate(cfg.seed.wrapping_add(trial as u64), cfg.n, cfg.dim)
            .map_err(CliError::solver)?;
        let fam = &instance.family;
        let x = instance.random_point(&mut points);

        let analytic = smooth_gradient(fam, &smoother, &x).map_err(CliError::solver)?;
        let numeric = finite_diff_gradient(
            |p| smooth_value(fam, &smoother, p).expect("finite quadratic family"),
            &x,
            DEFAULT_FD_STEP,
        );
        let g_err = relative_error(&analytic, &numeric);
        if g_err > summary.max_gradient_error || g_err.is_nan() {
            summary.max_gradient_error = g_err;
            summary.worst_gradient_trial = trial;
        }

        let hessian = smooth_hessian(fam, &smoother, &x).map_err(CliError::solver)?;
        let numeric_h = finite_diff_jacobian(
            |p| smooth_gradient(fam, &smoother, p).expect("finite quadratic family"),
            &x,
            DEFAULT_FD_STEP,
        );
        let h_err = relative_error(hessian.as_slice(), numeric_h.as_slice());
        if h_err > summary.max_hessian_error || h_err.is_nan() {
            summary.max_hessian_error = h_err;
            summary.worst_hessian_trial = trial;
        }
        let asym = (&hessian - hessian.transpose()).amax();
        summary.max_asymmetry = summary.max_asymmetry.max(asym);
    }
    summary.passed = summary.max_gradient_error <= GRADIENT_TOLERANCE
        && summary.max_hessian_error <= HESSIAN_TOLERANCE
        && summary.max_asymmetry <= 1e-10;
    Ok(summary)
}
