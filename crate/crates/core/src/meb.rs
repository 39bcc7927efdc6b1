//! (1+ε̃)-approximate minimal enclosing ball through the smoothed solver.
//!
//! The objective is `f(x) = max_i ‖x − c_i‖²`. Every component has Hessian
//! `2I`, so all curvature constants are 2; the gradient bound and the
//! absolute gap are derived from `f` at the centroid.

use nalgebra::DMatrix;

use crate::agd::{self, IterationPlan, OptimizerConfig, Progress, SolverConstants};
use crate::error::{Error, Result};
use crate::family::{ComponentFamily, DomainConstants};
use crate::smooth::Reduction;

/// `n` points in `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptyInput)?.len();
        let mut coords = Vec::with_capacity(dim * points.len());
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("points need at least one coordinate"));
        }
        if coords.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        Ok(Self { dim, coords })
    }

    pub fn n(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.points().map(<[f64]>::to_vec).collect()
    }

    /// Applies `p ↦ scale·p + shift` to every point.
    pub fn affine(&self, scale: f64, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: shift.len(),
            });
        }
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(k, v)| scale * v + shift[k % self.dim])
            .collect();
        Self::from_flat(self.dim, coords)
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl ComponentFamily for PointCloud {
    fn len(&self) -> usize {
        self.n()
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, i: usize, x: &[f64]) -> f64 {
        sq_dist(x, self.point(i))
    }

    fn gradient_into(&self, i: usize, x: &[f64], out: &mut [f64]) {
        for ((o, a), c) in out.iter_mut().zip(x).zip(self.point(i)) {
            *o = 2.0 * (a - c);
        }
    }

    fn hessian(&self, _i: usize, _x: &[f64]) -> Option<DMatrix<f64>> {
        Some(DMatrix::identity(self.dim, self.dim) * 2.0)
    }
}

/// Requested approximation factor `1 + ε̃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MebConfig {
    pub relative_epsilon: f64,
    pub reduction: Reduction,
}

impl MebConfig {
    pub fn new(relative_epsilon: f64) -> Result<Self> {
        if !(relative_epsilon > 0.0 && relative_epsilon <= 1.0) {
            return Err(Error::invalid(format!(
                "relative epsilon must lie in (0, 1], got {relative_epsilon}"
            )));
        }
        Ok(Self {
            relative_epsilon,
            reduction: Reduction::Sequential,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MebResult {
    pub center: Vec<f64>,
    /// Covering radius `max_i ‖center − c_i‖`.
    pub radius: f64,
    pub iterations: usize,
    pub planned_iterations: usize,
    /// Absolute gap on `f` handed to the optimizer (0 for degenerate clouds
    /// and for solvers that do not use one).
    pub epsilon_gap_used: f64,
    /// Bracket `[√f(x1)/2, √f(x1)]` on the optimal radius.
    pub radius_lower: f64,
    pub radius_upper: f64,
    /// Optimizer constants; only set by the smoothed solver.
    pub constants: Option<SolverConstants>,
}

/// Arithmetic mean of the points.
pub fn centroid_init(cloud: &PointCloud) -> Vec<f64> {
    let mut c = vec![0.0; cloud.dim()];
    for p in cloud.points() {
        for (a, v) in c.iter_mut().zip(p) {
            *a += v;
        }
    }
    let n = cloud.n() as f64;
    c.iter_mut().for_each(|a| *a /= n);
    c
}

/// `max_i ‖x − c_i‖²` and the lowest attaining index.
pub fn farthest_sq_distance(cloud: &PointCloud, x: &[f64]) -> Result<(f64, usize)> {
    if x.len() != cloud.dim() {
        return Err(Error::DimensionMismatch {
            expected: cloud.dim(),
            got: x.len(),
        });
    }
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, p) in cloud.points().enumerate() {
        let d = sq_dist(x, p);
        if d > best.0 {
            best = (d, i);
        }
    }
    Ok(best)
}

/// `(√f/2, √f)` for `f = f(x1)` with `x1` in the convex hull.
pub fn radius_bounds(f_at_x1: f64) -> (f64, f64) {
    let r = f_at_x1.max(0.0).sqrt();
    (0.5 * r, r)
}

/// `G = 6·√(5·f(x1) + ε/2)`.
pub fn meb_gradient_bound(f_at_x1: f64, epsilon_gap: f64) -> f64 {
    6.0 * (5.0 * f_at_x1 + 0.5 * epsilon_gap).sqrt()
}

/// `t = 1 + log(1 + 4/ε̃)·√(1 + 18(1 + 20/ε̃)·log n)`, rounded up; 1 for a
/// single point.
pub fn required_iterations_meb(relative_epsilon: f64, n: usize) -> Result<usize> {
    if !(relative_epsilon > 0.0 && relative_epsilon <= 1.0) {
        return Err(Error::invalid(format!(
            "relative epsilon must lie in (0, 1], got {relative_epsilon}"
        )));
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n == 1 {
        return Ok(1);
    }
    let e = relative_epsilon;
    let root = (1.0 + 18.0 * (1.0 + 20.0 / e) * (n as f64).ln()).sqrt();
    Ok((1.0 + (1.0 + 4.0 / e).ln() * root).ceil() as usize)
}

/// Absolute gap on `f` for a `(1+ε̃)` radius, using the lower radius bound
/// `R² ≥ f(x1)/4`.
pub fn absolute_gap(relative_epsilon: f64, f_at_x1: f64) -> f64 {
    (2.0 * relative_epsilon + relative_epsilon * relative_epsilon) * 0.25 * f_at_x1
}

pub fn solve_meb(cloud: &PointCloud, config: &MebConfig) -> Result<MebResult> {
    solve_meb_observed(cloud, config, |_| {})
}

/// [`solve_meb`] with a per-iteration observer on the underlying optimizer.
pub fn solve_meb_observed<O>(cloud: &PointCloud, config: &MebConfig, observer: O) -> Result<MebResult>
where
    O: FnMut(&Progress<'_>),
{
    MebConfig::new(config.relative_epsilon)?;
    let x1 = centroid_init(cloud);
    let (f1, _) = farthest_sq_distance(cloud, &x1)?;
    let (radius_lower, radius_upper) = radius_bounds(f1);

    let first = cloud.point(0);
    if cloud.n() == 1 || f1 == 0.0 || cloud.points().all(|p| p == first) {
        return Ok(MebResult {
            center: first.to_vec(),
            radius: 0.0,
            iterations: 0,
            planned_iterations: 0,
            epsilon_gap_used: 0.0,
            radius_lower: 0.0,
            radius_upper: 0.0,
            constants: None,
        });
    }

    let n = cloud.n();
    let epsilon = absolute_gap(config.relative_epsilon, f1);
    let g = meb_gradient_bound(f1, epsilon);
    let distance = f1.sqrt();
    let constants = DomainConstants::uniform(n, 2.0, 2.0, g)?;

    let mut opt = OptimizerConfig::new(epsilon, x1, distance);
    opt.reduction = config.reduction;
    let derived = agd::initialize(cloud, &constants, epsilon)?;

    let general = agd::required_iterations_general(epsilon, n, g, 2.0, 2.0, distance)?;
    let specialized = required_iterations_meb(config.relative_epsilon, n)?;
    // f_s(x1) − f_s(x*) ≤ f(x1) − R² + ε/2 ≤ (3/4)·f(x1) + ε/2
    let initial_gap = (g * distance).min(0.75 * f1 + 0.5 * epsilon);
    let plan = IterationPlan {
        planned_iterations: general.min(specialized),
        initial_gap,
    };
    let report = agd::run_with_plan(cloud, &opt, derived, plan, observer)?;

    Ok(MebResult {
        radius: report.f_final.sqrt(),
        center: report.x_final,
        iterations: report.iterations_run,
        planned_iterations: report.planned_iterations,
        epsilon_gap_used: epsilon,
        radius_lower,
        radius_upper,
        constants: Some(report.constants),
    })
}
