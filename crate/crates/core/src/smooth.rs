//! LogSumExp smooth maximum over a component family.
//!
//! Every exponential is evaluated after subtracting `m = max_i f_i(x)`, so
//! the arguments are `≤ 0` and nothing overflows regardless of the smoother
//! or the magnitude of the component values.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::{ComponentFamily, DomainConstants};

/// Components per chunk in the parallel reduction. Fixed so partial sums are
/// combined in the same order whatever the thread count.
const PARALLEL_CHUNK: usize = 256;

/// How per-component sums are reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    /// Single pass in index order; bit-reproducible.
    #[default]
    Sequential,
    /// Chunked reduction on the current rayon pool. Agrees with
    /// `Sequential` to about 1e-12 relative.
    Parallel,
}

/// The smoother `s > 0` together with the reduction mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Smoother {
    s: f64,
    reduction: Reduction,
}

impl Smoother {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::invalid(format!("smoother must be positive and finite, got {s}")));
        }
        Ok(Self {
            s,
            reduction: Reduction::Sequential,
        })
    }

    pub fn with_reduction(mut self, reduction: Reduction) -> Self {
        self.reduction = reduction;
        self
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn reduction(&self) -> Reduction {
        self.reduction
    }
}

/// One smoothed evaluation at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothEval {
    /// `f_s(x)`.
    pub value: f64,
    /// Softmax weights `p_s(x)`.
    pub weights: Vec<f64>,
    /// `∇f_s(x) = Σ_i p_i ∇f_i(x)`.
    pub gradient: Vec<f64>,
    /// Lowest index attaining `max_i f_i(x)`.
    pub max_index: usize,
    /// `f(x) = max_i f_i(x)`.
    pub max_value: f64,
}

fn check_dim<F: ComponentFamily + ?Sized>(family: &F, x: &[f64]) -> Result<()> {
    if x.len() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            got: x.len(),
        });
    }
    if family.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

/// All `f_i(x)`, checked for finiteness.
pub fn component_values<F: ComponentFamily + ?Sized>(family: &F, x: &[f64], reduction: Reduction) -> Result<Vec<f64>> {
    check_dim(family, x)?;
    let values: Vec<f64> = match reduction {
        Reduction::Sequential => (0..family.len()).map(|i| family.value(i, x)).collect(),
        Reduction::Parallel => (0..family.len()).into_par_iter().map(|i| family.value(i, x)).collect(),
    };
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFiniteComponent { index, value });
    }
    Ok(values)
}

/// `(max_i v_i, argmax)` with ties going to the lowest index.
pub(crate) fn argmax(values: &[f64]) -> (f64, usize) {
    let mut best = (values[0], 0);
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > best.0 {
            best = (v, i);
        }
    }
    best
}

/// `f(x) = max_i f_i(x)` and the attaining index.
pub fn max_component<F: ComponentFamily + ?Sized>(family: &F, x: &[f64]) -> Result<(f64, usize)> {
    let values = component_values(family, x, Reduction::Sequential)?;
    Ok(argmax(&values))
}

/// Shifted exponentials `exp(s(v_i − m))` and their sum.
fn shifted_exponentials(values: &[f64], max_value: f64, s: f64) -> (Vec<f64>, f64) {
    let exps: Vec<f64> = values.iter().map(|v| (s * (v - max_value)).exp()).collect();
    let total = exps.iter().sum();
    (exps, total)
}

/// Value, weights and argmax from precomputed component values.
fn lse_from_values(values: &[f64], s: f64) -> (f64, Vec<f64>, f64, usize) {
    let (max_value, max_index) = argmax(values);
    let (mut weights, total) = shifted_exponentials(values, max_value, s);
    // total >= 1 because the maximal term is exp(0)
    let value = max_value + total.ln() / s;
    for w in &mut weights {
        *w /= total;
    }
    (value, weights, max_value, max_index)
}

fn weighted_gradient<F: ComponentFamily + ?Sized>(
    family: &F,
    x: &[f64],
    weights: &[f64],
    reduction: Reduction,
) -> Vec<f64> {
    let dim = family.dim();
    let accumulate = |range: std::ops::Range<usize>| {
        let mut acc = vec![0.0; dim];
        let mut g = vec![0.0; dim];
        for i in range {
            let w = weights[i];
            if w == 0.0 {
                continue;
            }
            family.gradient_into(i, x, &mut g);
            for (a, gi) in acc.iter_mut().zip(&g) {
                *a += w * gi;
            }
        }
        acc
    };
    match reduction {
        Reduction::Sequential => accumulate(0..weights.len()),
        Reduction::Parallel => {
            let n = weights.len();
            let chunks: Vec<Vec<f64>> = (0..n.div_ceil(PARALLEL_CHUNK))
                .into_par_iter()
                .map(|c| accumulate(c * PARALLEL_CHUNK..((c + 1) * PARALLEL_CHUNK).min(n)))
                .collect();
            let mut acc = vec![0.0; dim];
            for part in chunks {
                for (a, p) in acc.iter_mut().zip(part) {
                    *a += p;
                }
            }
            acc
        }
    }
}

/// Full smoothed evaluation: value, weights, gradient and the exact max.
pub fn smooth_eval<F: ComponentFamily + ?Sized>(family: &F, smoother: &Smoother, x: &[f64]) -> Result<SmoothEval> {
    let values = component_values(family, x, smoother.reduction)?;
    let (value, weights, max_value, max_index) = lse_from_values(&values, smoother.s);
    let gradient = weighted_gradient(family, x, &weights, smoother.reduction);
    Ok(SmoothEval {
        value,
        weights,
        gradient,
        max_index,
        max_value,
    })
}

/// `f_s(x) = m + (1/s)·log Σ_i exp(s(f_i(x) − m))`.
pub fn smooth_value<F: ComponentFamily + ?Sized>(family: &F, smoother: &Smoother, x: &[f64]) -> Result<f64> {
    let values = component_values(family, x, smoother.reduction)?;
    Ok(lse_from_values(&values, smoother.s).0)
}

/// Softmax weights `p_{s,i}(x)`; they sum to one.
pub fn softmax_weights<F: ComponentFamily + ?Sized>(family: &F, smoother: &Smoother, x: &[f64]) -> Result<Vec<f64>> {
    let values = component_values(family, x, smoother.reduction)?;
    Ok(lse_from_values(&values, smoother.s).1)
}

/// `∇f_s(x) = E_p[∇f_i(x)]`.
pub fn smooth_gradient<F: ComponentFamily + ?Sized>(family: &F, smoother: &Smoother, x: &[f64]) -> Result<Vec<f64>> {
    Ok(smooth_eval(family, smoother, x)?.gradient)
}

/// `∇²f_s(x) = s·Cov_p(∇f_i) + E_p[∇²f_i]`.
///
/// Requires the family to expose Hessians. The covariance is accumulated
/// around the weighted mean gradient, which is the same matrix as
/// `E[g gᵀ] − E[g]E[g]ᵀ` but never goes slightly indefinite from
/// cancellation.
pub fn smooth_hessian<F: ComponentFamily + ?Sized>(family: &F, smoother: &Smoother, x: &[f64]) -> Result<DMatrix<f64>> {
    let eval = smooth_eval(family, smoother, x)?;
    let dim = family.dim();
    let mean = nalgebra::DVector::from_column_slice(&eval.gradient);
    let mut cov = DMatrix::<f64>::zeros(dim, dim);
    let mut expected_hessian = DMatrix::<f64>::zeros(dim, dim);
    for (i, &w) in eval.weights.iter().enumerate() {
        let h = family
            .hessian(i, x)
            .ok_or(Error::UnsupportedCapability("component Hessians"))?;
        if w == 0.0 {
            continue;
        }
        let centered = nalgebra::DVector::from_vec(family.gradient(i, x)) - &mean;
        cov.ger(w, &centered, &centered, 1.0);
        expected_hessian += h * w;
    }
    let mut hessian = cov * smoother.s + expected_hessian;
    // symmetrize away roundoff
    let t = hessian.transpose();
    hessian = (hessian + t) * 0.5;
    Ok(hessian)
}

/// `(f(x), f(x) + log(n)/s)`: the smooth value always lies in this range.
pub fn sandwich_bounds(max_value: f64, smoother: &Smoother, n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    Ok((max_value, max_value + (n as f64).ln() / smoother.s))
}

/// Eigenvalue bracket `(L_s, U_s)` for the Hessian of `f_s` on the working
/// set: `L_s = min_i ℓ_i`, `U_s = s·G² + max_i u_i`.
pub fn hessian_eig_bounds(constants: &DomainConstants, smoother: &Smoother) -> (f64, f64) {
    let g = constants.gradient_norm_bound();
    (
        constants.min_strong_convexity(),
        smoother.s * g * g + constants.max_smoothness(),
    )
}

/// `κ = U/L`.
pub fn condition_number(lower: f64, upper: f64) -> Result<f64> {
    if lower.is_nan() || lower <= 0.0 || !upper.is_finite() || upper < lower {
        return Err(Error::invalid(format!(
            "condition number needs 0 < L ({lower}) <= U ({upper})"
        )));
    }
    Ok(upper / lower)
}
