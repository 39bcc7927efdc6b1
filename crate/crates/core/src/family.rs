//! Component families: the finite set of functions whose pointwise maximum is
//! being minimized, together with the curvature constants that parameterize
//! the optimizer.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A finite family `{f_i}` of strongly convex, smooth functions on `R^dim`.
///
/// The objective is `f(x) = max_i f_i(x)`. Implementations must be pure:
/// identical inputs give identical outputs.
pub trait ComponentFamily: Sync {
    /// Number of components `n`.
    fn len(&self) -> usize;

    /// Ambient dimension.
    fn dim(&self) -> usize;

    /// `f_i(x)`.
    fn value(&self, i: usize, x: &[f64]) -> f64;

    /// Writes `∇f_i(x)` into `out` (length `dim`).
    fn gradient_into(&self, i: usize, x: &[f64], out: &mut [f64]);

    /// `∇²f_i(x)`, if the family can provide it. Only verification paths
    /// need this.
    fn hessian(&self, _i: usize, _x: &[f64]) -> Option<DMatrix<f64>> {
        None
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn gradient(&self, i: usize, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.gradient_into(i, x, &mut out);
        out
    }
}

impl<F: ComponentFamily + ?Sized> ComponentFamily for &F {
    fn len(&self) -> usize {
        (**self).len()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, i: usize, x: &[f64]) -> f64 {
        (**self).value(i, x)
    }
    fn gradient_into(&self, i: usize, x: &[f64], out: &mut [f64]) {
        (**self).gradient_into(i, x, out)
    }
    fn hessian(&self, i: usize, x: &[f64]) -> Option<DMatrix<f64>> {
        (**self).hessian(i, x)
    }
}

/// Strong-convexity and smoothness parameters of each component over the
/// working set, plus a common gradient-norm bound there.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainConstants {
    strong_convexity: Vec<f64>,
    smoothness: Vec<f64>,
    gradient_norm_bound: f64,
}

impl DomainConstants {
    pub fn new(strong_convexity: Vec<f64>, smoothness: Vec<f64>, gradient_norm_bound: f64) -> Result<Self> {
        if strong_convexity.is_empty() || strong_convexity.len() != smoothness.len() {
            return Err(Error::invalid(format!(
                "need one strong-convexity and one smoothness constant per component (got {} and {})",
                strong_convexity.len(),
                smoothness.len()
            )));
        }
        for (i, (&l, &u)) in strong_convexity.iter().zip(&smoothness).enumerate() {
            if !(l > 0.0 && l.is_finite() && u.is_finite() && l <= u) {
                return Err(Error::invalid(format!(
                    "component {i}: require 0 < strong convexity ({l}) <= smoothness ({u})"
                )));
            }
        }
        if !(gradient_norm_bound > 0.0 && gradient_norm_bound.is_finite()) {
            return Err(Error::invalid(format!(
                "gradient norm bound must be positive and finite, got {gradient_norm_bound}"
            )));
        }
        Ok(Self {
            strong_convexity,
            smoothness,
            gradient_norm_bound,
        })
    }

    /// Same constants `l`, `u` for each of `n` components.
    pub fn uniform(n: usize, l: f64, u: f64, gradient_norm_bound: f64) -> Result<Self> {
        Self::new(vec![l; n], vec![u; n], gradient_norm_bound)
    }

    pub fn len(&self) -> usize {
        self.strong_convexity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strong_convexity.is_empty()
    }

    pub fn strong_convexity(&self) -> &[f64] {
        &self.strong_convexity
    }

    pub fn smoothness(&self) -> &[f64] {
        &self.smoothness
    }

    pub fn gradient_norm_bound(&self) -> f64 {
        self.gradient_norm_bound
    }

    /// `min_i ℓ_i`.
    pub fn min_strong_convexity(&self) -> f64 {
        self.strong_convexity.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max_i u_i`, the pseudo-smoothness.
    pub fn max_smoothness(&self) -> f64 {
        self.smoothness.iter().copied().fold(0.0, f64::max)
    }
}

/// `f_i(x) = a_i·‖x − c_i‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFamily {
    dim: usize,
    centers: Vec<f64>,
    curvatures: Vec<f64>,
}

impl QuadraticFamily {
    pub fn new(centers: Vec<Vec<f64>>, curvatures: Vec<f64>) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::EmptyInput);
        }
        if centers.len() != curvatures.len() {
            return Err(Error::invalid(format!(
                "{} centers but {} curvatures",
                centers.len(),
                curvatures.len()
            )));
        }
        let dim = centers[0].len();
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        let mut flat = Vec::with_capacity(dim * centers.len());
        for c in &centers {
            if c.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: c.len(),
                });
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("center coordinates must be finite"));
            }
            flat.extend_from_slice(c);
        }
        if let Some(a) = curvatures.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(Error::invalid(format!("curvatures must be positive, got {a}")));
        }
        Ok(Self {
            dim,
            centers: flat,
            curvatures,
        })
    }

    pub fn center(&self, i: usize) -> &[f64] {
        &self.centers[i * self.dim..(i + 1) * self.dim]
    }

    pub fn curvatures(&self) -> &[f64] {
        &self.curvatures
    }

    /// Exact constants over the ball of radius `domain_radius` about the
    /// origin: `ℓ_i = u_i = 2a_i` and `G = max_i 2a_i (r + ‖c_i‖)`.
    pub fn constants_on_ball(&self, domain_radius: f64) -> Result<DomainConstants> {
        let two_a: Vec<f64> = self.curvatures.iter().map(|a| 2.0 * a).collect();
        let g = (0..self.len())
            .map(|i| {
                let norm = self.center(i).iter().map(|v| v * v).sum::<f64>().sqrt();
                two_a[i] * (domain_radius + norm)
            })
            .fold(0.0, f64::max);
        DomainConstants::new(two_a.clone(), two_a, g)
    }
}

impl ComponentFamily for QuadraticFamily {
    fn len(&self) -> usize {
        self.curvatures.len()
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, i: usize, x: &[f64]) -> f64 {
        let sq: f64 = x.iter().zip(self.center(i)).map(|(a, b)| (a - b) * (a - b)).sum();
        self.curvatures[i] * sq
    }

    fn gradient_into(&self, i: usize, x: &[f64], out: &mut [f64]) {
        let two_a = 2.0 * self.curvatures[i];
        for ((o, a), b) in out.iter_mut().zip(x).zip(self.center(i)) {
            *o = two_a * (a - b);
        }
    }

    fn hessian(&self, i: usize, _x: &[f64]) -> Option<DMatrix<f64>> {
        Some(DMatrix::identity(self.dim, self.dim) * (2.0 * self.curvatures[i]))
    }
}
