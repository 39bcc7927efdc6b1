//! Nesterov accelerated gradient descent on the smoothed objective.
//!
//! The smoother is chosen so the smoothing regret `log(n)/s` is exactly half
//! the requested gap; the iteration count is then the number of steps after
//! which the accelerated-descent bound on the smooth gap falls below the
//! other half.

use crate::error::{Error, Result};
use crate::family::{ComponentFamily, DomainConstants};
use crate::smooth::{self, Reduction, Smoother};

/// Runs longer than this are refused instead of truncated.
pub const MAX_PLANNED_ITERATIONS: u64 = 1 << 31;

/// `s = 2·log(n)/ε`. Zero when `n = 1`; callers treat that case as already
/// smooth.
pub fn smoother_for_gap(epsilon: f64, n: usize) -> f64 {
    2.0 * (n as f64).ln() / epsilon
}

/// Momentum coefficient `(√κ − 1)/(√κ + 1)`, written as `1 − 2/(√κ + 1)`.
pub fn momentum(kappa: f64) -> f64 {
    1.0 - 2.0 / (kappa.sqrt() + 1.0)
}

/// Iterate triple of the accelerated scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub x_current: Vec<f64>,
    pub x_previous: Vec<f64>,
    pub y_current: Vec<f64>,
    /// Index of `x_current`; starts at 1.
    pub t: usize,
}

impl OptimizerState {
    pub fn start(x1: Vec<f64>) -> Self {
        Self {
            x_previous: x1.clone(),
            y_current: x1.clone(),
            x_current: x1,
            t: 1,
        }
    }
}

/// One accelerated step:
///
/// ```text
/// x_{t+1} = y_t − ∇f_s(y_t)/U
/// y_{t+1} = x_{t+1} + (1 − 2/(√κ + 1))·(x_{t+1} − x_t)
/// ```
pub fn agd_step<G>(state: &OptimizerState, gradient: G, upper: f64, kappa: f64) -> Result<OptimizerState>
where
    G: FnOnce(&[f64]) -> Result<Vec<f64>>,
{
    if upper.is_nan() || upper <= 0.0 || kappa.is_nan() || kappa < 1.0 {
        return Err(Error::invalid(format!(
            "step needs U > 0 and κ >= 1 (got U = {upper}, κ = {kappa})"
        )));
    }
    let grad = gradient(&state.y_current)?;
    if grad.len() != state.y_current.len() {
        return Err(Error::DimensionMismatch {
            expected: state.y_current.len(),
            got: grad.len(),
        });
    }
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::Divergence {
            iteration: state.t,
            iterate: state.y_current.clone(),
        });
    }
    let beta = momentum(kappa);
    let step = 1.0 / upper;
    let x_next: Vec<f64> = state.y_current.iter().zip(&grad).map(|(y, g)| y - step * g).collect();
    let y_next = x_next
        .iter()
        .zip(&state.x_current)
        .map(|(xn, xc)| xn + beta * (xn - xc))
        .collect();
    Ok(OptimizerState {
        x_previous: state.x_current.clone(),
        x_current: x_next,
        y_current: y_next,
        t: state.t + 1,
    })
}

/// Bound on `f_s(x_t) − f_s(x*)`:
/// `(L/2·D² + initial_gap)·exp(−(t − 1)/√κ)`.
pub fn gap_bound(t: usize, lower: f64, kappa: f64, distance: f64, initial_gap: f64) -> f64 {
    let t = t.max(1);
    (0.5 * lower * distance * distance + initial_gap) * (-((t - 1) as f64) / kappa.sqrt()).exp()
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

fn ceil_count(raw: f64) -> Result<usize> {
    let t = raw.ceil();
    if !t.is_finite() || t > MAX_PLANNED_ITERATIONS as f64 {
        return Err(Error::Configuration(format!(
            "planned iteration count {raw:.3e} exceeds the limit of {MAX_PLANNED_ITERATIONS}"
        )));
    }
    Ok((t as usize).max(1))
}

/// Iterations sufficient for an `ε` gap on `f` with a generic family:
///
/// ```text
/// t = 1 + √(2G²·log(n)/(εL) + Ũ/L) · log((L·D² + 2G·D)/ε)
/// ```
///
/// rounded up. Returns 1 for `n = 1` or when the log argument is at most 1.
pub fn required_iterations_general(
    epsilon: f64,
    n: usize,
    gradient_bound: f64,
    lower: f64,
    pseudo_smoothness: f64,
    distance: f64,
) -> Result<usize> {
    check_positive("epsilon", epsilon)?;
    check_positive("gradient bound", gradient_bound)?;
    check_positive("strong convexity", lower)?;
    check_positive("pseudo-smoothness", pseudo_smoothness)?;
    check_positive("distance", distance)?;
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n == 1 {
        return Ok(1);
    }
    let g2 = gradient_bound * gradient_bound;
    let root = (2.0 / epsilon * g2 * (n as f64).ln() / lower + pseudo_smoothness / lower).sqrt();
    let arg = (lower * distance * distance + 2.0 * gradient_bound * distance) / epsilon;
    if arg <= 1.0 {
        return Ok(1);
    }
    ceil_count(1.0 + root * arg.ln())
}

/// Steps for a single smooth strongly convex function (no smoothing regret):
/// the smallest `t` with `(L/2·D² + G·D)·exp(−t/√κ) ≤ ε`.
fn required_iterations_unsmoothed(
    epsilon: f64,
    kappa: f64,
    lower: f64,
    gradient_bound: f64,
    distance: f64,
) -> Result<usize> {
    let arg = (0.5 * lower * distance * distance + gradient_bound * distance) / epsilon;
    if arg <= 1.0 {
        return Ok(1);
    }
    ceil_count(kappa.sqrt() * arg.ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Requested gap `ε` on the original max objective.
    pub epsilon: f64,
    /// Starting point `x_1`.
    pub x1: Vec<f64>,
    /// `D ≥ ‖x_1 − x*‖`.
    pub initial_distance_bound: f64,
    /// Hard cap on the number of steps.
    pub max_iterations_override: Option<usize>,
    pub reduction: Reduction,
}

impl OptimizerConfig {
    pub fn new(epsilon: f64, x1: Vec<f64>, initial_distance_bound: f64) -> Self {
        Self {
            epsilon,
            x1,
            initial_distance_bound,
            max_iterations_override: None,
            reduction: Reduction::Sequential,
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        check_positive("epsilon", self.epsilon)?;
        check_positive("initial distance bound", self.initial_distance_bound)?;
        if self.x1.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.x1.len(),
            });
        }
        if self.x1.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("initial point must be finite"));
        }
        if self.max_iterations_override == Some(0) {
            return Err(Error::invalid("iteration override must be positive"));
        }
        Ok(())
    }
}

/// Constants derived during initialization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConstants {
    /// Smoother; 0 when the family has a single component.
    pub s: f64,
    pub l_s: f64,
    pub u_s: f64,
    pub kappa_s: f64,
    pub g_s: f64,
}

/// Outcome of one `run_to_gap`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub x_final: Vec<f64>,
    pub epsilon: f64,
    pub iterations_run: usize,
    pub planned_iterations: usize,
    pub constants: SolverConstants,
    /// `f(x_final)`, exact max.
    pub f_final: f64,
    /// Accelerated-descent bound at the final iterate plus the smoothing
    /// regret `log(n)/s`.
    pub gap_certificate: f64,
}

/// What the observer sees before each step.
#[derive(Debug, Clone, Copy)]
pub struct Progress<'a> {
    /// Index of `x_current`.
    pub t: usize,
    pub x: &'a [f64],
    pub y: &'a [f64],
    /// `f_s(y_t)`.
    pub smooth_value: Option<f64>,
    /// `‖∇f_s(y_t)‖`.
    pub gradient_norm: f64,
}

/// Step budget and initial-gap bound for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationPlan {
    pub planned_iterations: usize,
    /// Upper bound on `f_s(x_1) − f_s(x*)` used in the certificate.
    pub initial_gap: f64,
}

/// Initialization: smoother, eigenvalue bracket and condition number.
pub fn initialize<F: ComponentFamily + ?Sized>(
    family: &F,
    constants: &DomainConstants,
    epsilon: f64,
) -> Result<SolverConstants> {
    if family.is_empty() {
        return Err(Error::EmptyInput);
    }
    if constants.len() != family.len() {
        return Err(Error::invalid(format!(
            "constants cover {} components but the family has {}",
            constants.len(),
            family.len()
        )));
    }
    check_positive("epsilon", epsilon)?;
    let g_s = constants.gradient_norm_bound();
    let (s, l_s, u_s) = if family.len() == 1 {
        (0.0, constants.min_strong_convexity(), constants.max_smoothness())
    } else {
        let s = smoother_for_gap(epsilon, family.len());
        let (l, u) = smooth::hessian_eig_bounds(constants, &Smoother::new(s)?);
        (s, l, u)
    };
    let kappa_s = smooth::condition_number(l_s, u_s)?;
    Ok(SolverConstants {
        s,
        l_s,
        u_s,
        kappa_s,
        g_s,
    })
}

/// Default plan: the generic iteration formula with `ε` (half for the
/// smoothing regret, half for the optimization gap), and `G·D` bounding the
/// initial smooth gap.
pub fn default_plan<F: ComponentFamily + ?Sized>(
    family: &F,
    constants: &DomainConstants,
    config: &OptimizerConfig,
    derived: &SolverConstants,
) -> Result<IterationPlan> {
    let d = config.initial_distance_bound;
    let planned_iterations = if family.len() == 1 {
        required_iterations_unsmoothed(config.epsilon, derived.kappa_s, derived.l_s, derived.g_s, d)?
    } else {
        required_iterations_general(
            config.epsilon,
            family.len(),
            derived.g_s,
            derived.l_s,
            constants.max_smoothness(),
            d,
        )?
    };
    Ok(IterationPlan {
        planned_iterations,
        initial_gap: derived.g_s * d,
    })
}

/// Runs the smoothed min-max optimizer until the planned iteration count.
pub fn run_to_gap<F: ComponentFamily + ?Sized>(
    family: &F,
    constants: &DomainConstants,
    config: &OptimizerConfig,
) -> Result<SolveReport> {
    run_to_gap_observed(family, constants, config, |_| {})
}

/// [`run_to_gap`] with a per-iteration observer.
pub fn run_to_gap_observed<F, O>(
    family: &F,
    constants: &DomainConstants,
    config: &OptimizerConfig,
    observer: O,
) -> Result<SolveReport>
where
    F: ComponentFamily + ?Sized,
    O: FnMut(&Progress<'_>),
{
    config.validate(family.dim())?;
    let derived = initialize(family, constants, config.epsilon)?;
    let plan = default_plan(family, constants, config, &derived)?;
    run_with_plan(family, config, derived, plan, observer)
}

/// Runs the accelerated loop with explicitly supplied constants and plan.
pub fn run_with_plan<F, O>(
    family: &F,
    config: &OptimizerConfig,
    derived: SolverConstants,
    plan: IterationPlan,
    mut observer: O,
) -> Result<SolveReport>
where
    F: ComponentFamily + ?Sized,
    O: FnMut(&Progress<'_>),
{
    config.validate(family.dim())?;
    if plan.planned_iterations as u64 > MAX_PLANNED_ITERATIONS {
        return Err(Error::Configuration(format!(
            "planned iteration count {} exceeds the limit of {MAX_PLANNED_ITERATIONS}",
            plan.planned_iterations
        )));
    }
    let n = family.len();
    let smoother = if n > 1 {
        Some(Smoother::new(derived.s)?.with_reduction(config.reduction))
    } else {
        None
    };
    let steps = match config.max_iterations_override {
        Some(cap) => plan.planned_iterations.min(cap),
        None => plan.planned_iterations,
    };

    let mut state = OptimizerState::start(config.x1.clone());
    for _ in 0..steps {
        let mut value_at_y = None;
        let mut grad_norm = 0.0;
        let next = agd_step(
            &state,
            |y| {
                let (value, gradient) = match &smoother {
                    Some(sm) => {
                        let e = smooth::smooth_eval(family, sm, y)?;
                        (e.value, e.gradient)
                    }
                    None => {
                        let v = smooth::component_values(family, y, Reduction::Sequential)?[0];
                        (v, family.gradient(0, y))
                    }
                };
                value_at_y = Some(value);
                grad_norm = gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
                Ok(gradient)
            },
            derived.u_s,
            derived.kappa_s,
        )?;
        observer(&Progress {
            t: state.t,
            x: &state.x_current,
            y: &state.y_current,
            smooth_value: value_at_y,
            gradient_norm: grad_norm,
        });
        state = next;
    }

    let (f_final, _) = smooth::max_component(family, &state.x_current)?;
    if !f_final.is_finite() {
        return Err(Error::Divergence {
            iteration: state.t,
            iterate: state.x_current,
        });
    }
    let regret = if n > 1 { (n as f64).ln() / derived.s } else { 0.0 };
    let gap_certificate = gap_bound(
        state.t,
        derived.l_s,
        derived.kappa_s,
        config.initial_distance_bound,
        plan.initial_gap,
    ) + regret;
    Ok(SolveReport {
        x_final: state.x_current,
        epsilon: config.epsilon,
        iterations_run: steps,
        planned_iterations: plan.planned_iterations,
        constants: derived,
        f_final,
        gap_certificate,
    })
}

/// Epsilon-halving restarts: round `k` targets `ε_0 / 2^k` and starts from
/// the previous round's final iterate.
pub fn run_online<F, P>(
    family: &F,
    mut constants_provider: P,
    epsilon_0: f64,
    rounds: usize,
    config: &OptimizerConfig,
) -> Result<Vec<SolveReport>>
where
    F: ComponentFamily + ?Sized,
    P: FnMut(f64) -> Result<DomainConstants>,
{
    check_positive("epsilon_0", epsilon_0)?;
    if rounds == 0 {
        return Err(Error::invalid("need at least one round"));
    }
    let mut reports = Vec::with_capacity(rounds);
    let mut round_config = config.clone();
    round_config.epsilon = epsilon_0;
    for _ in 0..rounds {
        let constants = constants_provider(round_config.epsilon)?;
        let report = run_to_gap(family, &constants, &round_config)?;
        round_config.x1 = report.x_final.clone();
        round_config.epsilon /= 2.0;
        reports.push(report);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::QuadraticFamily;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn smoother_examples() {
        assert!(close(smoother_for_gap(0.1, 2), 13.862944, 1e-6));
        assert_eq!(smoother_for_gap(0.5, 1), 0.0);
        assert!(close(smoother_for_gap(0.01, 1000), 1381.5511, 1e-7));
    }

    #[test]
    fn unit_condition_number_has_no_momentum() {
        assert_eq!(momentum(1.0), 0.0);
        let state = OptimizerState {
            x_current: vec![1.0],
            x_previous: vec![3.0],
            y_current: vec![1.0],
            t: 4,
        };
        let next = agd_step(&state, |y| Ok(vec![2.0 * y[0]]), 2.0, 1.0).unwrap();
        assert_eq!(next.x_current, vec![0.0]);
        assert_eq!(next.y_current, vec![0.0]);
        assert_eq!(next.x_previous, vec![1.0]);
        assert_eq!(next.t, 5);
    }

    #[test]
    fn exact_step_on_parabola() {
        let s = OptimizerState::start(vec![5.0]);
        let next = agd_step(&s, |y| Ok(vec![2.0 * y[0]]), 2.0, 1.0).unwrap();
        assert_eq!(next.x_current, vec![0.0]);
    }

    #[test]
    fn zero_gradient_is_fixed_point() {
        let s = OptimizerState::start(vec![0.25, -1.0]);
        let next = agd_step(&s, |_| Ok(vec![0.0, 0.0]), 3.0, 9.0).unwrap();
        assert_eq!(next.x_current, s.x_current);
        assert_eq!(next.y_current, s.y_current);
    }

    #[test]
    fn momentum_extrapolates() {
        let state = OptimizerState {
            x_current: vec![1.0],
            x_previous: vec![1.0],
            y_current: vec![1.0],
            t: 1,
        };
        // κ = 9: β = 1/2.
        let next = agd_step(&state, |_| Ok(vec![1.0]), 1.0, 9.0).unwrap();
        assert_eq!(next.x_current, vec![0.0]);
        assert_eq!(next.y_current, vec![-0.5]);
    }

    #[test]
    fn non_finite_gradient_diverges() {
        let s = OptimizerState::start(vec![1.0]);
        let err = agd_step(&s, |_| Ok(vec![f64::NAN]), 1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Divergence { iteration: 1, .. }));
        assert!(agd_step(&s, |_| Ok(vec![0.0]), 0.0, 1.0).is_err());
        assert!(agd_step(&s, |_| Ok(vec![0.0]), 1.0, 0.5).is_err());
    }

    #[test]
    fn gap_bound_examples() {
        assert!(close(gap_bound(1, 2.0, 4.0, 1.0, 3.0), 4.0, 1e-15));
        assert!(close(gap_bound(11, 2.0, 1.0, 1.0, 0.0), (-10.0f64).exp(), 1e-12));
        assert!(close(gap_bound(11, 2.0, 1.0, 1.0, 0.0), 4.54e-5, 1e-3));
        let mut prev = f64::INFINITY;
        for t in 1..50 {
            let b = gap_bound(t, 0.5, 30.0, 2.0, 1.0);
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn general_iteration_golden_value() {
        assert_eq!(required_iterations_general(0.1, 2, 1.0, 2.0, 2.0, 1.0).unwrap(), 12);
        assert_eq!(required_iterations_general(0.1, 1, 1.0, 2.0, 2.0, 1.0).unwrap(), 1);
        assert!(required_iterations_general(0.0, 2, 1.0, 2.0, 2.0, 1.0).is_err());
        assert!(required_iterations_general(1e-300, 1000, 1e100, 1e-100, 1.0, 1e10).is_err());
    }

    #[test]
    fn general_iteration_monotone() {
        let eps = [1.0, 0.3, 0.1, 0.03, 0.01];
        let ns = [2usize, 10, 100, 1000];
        for &n in &ns {
            let counts: Vec<usize> = eps
                .iter()
                .map(|&e| required_iterations_general(e, n, 3.0, 1.0, 2.0, 2.0).unwrap())
                .collect();
            assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
        }
        for &e in &eps {
            let counts: Vec<usize> = ns
                .iter()
                .map(|&n| required_iterations_general(e, n, 3.0, 1.0, 2.0, 2.0).unwrap())
                .collect();
            assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
        }
    }

    fn two_wells() -> (QuadraticFamily, DomainConstants) {
        let fam = QuadraticFamily::new(vec![vec![-1.0, 0.0], vec![1.0, 0.0]], vec![1.0, 1.0]).unwrap();
        let consts = fam.constants_on_ball(3.0).unwrap();
        (fam, consts)
    }

    #[test]
    fn run_reaches_gap() {
        let (fam, consts) = two_wells();
        // Optimum is the midpoint with value 1.
        let cfg = OptimizerConfig::new(0.05, vec![2.0, 1.5], 3.0);
        let report = run_to_gap(&fam, &consts, &cfg).unwrap();
        assert_eq!(report.iterations_run, report.planned_iterations);
        assert!(report.f_final - 1.0 <= 0.05, "{}", report.f_final);
        assert!(report.gap_certificate <= 0.05 + 1e-12, "{}", report.gap_certificate);
        assert!(close(report.constants.s, smoother_for_gap(0.05, 2), 1e-15));
    }

    #[test]
    fn override_caps_steps() {
        let (fam, consts) = two_wells();
        let mut cfg = OptimizerConfig::new(0.05, vec![2.0, 1.5], 3.0);
        cfg.max_iterations_override = Some(3);
        let mut seen = Vec::new();
        let report = run_to_gap_observed(&fam, &consts, &cfg, |p| seen.push(p.t)).unwrap();
        assert_eq!(report.iterations_run, 3);
        assert_eq!(seen, vec![1, 2, 3]);
    }

    #[test]
    fn single_component_solves_without_smoothing() {
        let fam = QuadraticFamily::new(vec![vec![0.5, -0.5]], vec![2.0]).unwrap();
        let consts = fam.constants_on_ball(2.0).unwrap();
        let report = run_to_gap(&fam, &consts, &OptimizerConfig::new(1e-6, vec![1.0, 1.0], 2.0)).unwrap();
        assert_eq!(report.constants.s, 0.0);
        assert!(report.f_final <= 1e-6);
    }

    #[test]
    fn online_single_round_matches_run() {
        let (fam, consts) = two_wells();
        let cfg = OptimizerConfig::new(0.2, vec![0.5, 1.0], 3.0);
        let online = run_online(&fam, |_| Ok(consts.clone()), 0.2, 1, &cfg).unwrap();
        let direct = run_to_gap(&fam, &consts, &cfg).unwrap();
        assert_eq!(online.len(), 1);
        assert_eq!(online[0], direct);

        let rounds = run_online(&fam, |_| Ok(consts.clone()), 0.2, 3, &cfg).unwrap();
        let eps: Vec<f64> = rounds.iter().map(|r| r.epsilon).collect();
        assert_eq!(eps, vec![0.2, 0.1, 0.05]);
        assert!(rounds[2].f_final - 1.0 <= 0.05);
        assert!(run_online(&fam, |_| Ok(consts.clone()), 0.2, 0, &cfg).is_err());
    }
}
