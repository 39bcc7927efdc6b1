//! Verification helpers: finite-difference derivatives, a brute-force grid
//! minimizer, and seeded instance generators.
//!
//! All randomness goes through `ChaCha8Rng::seed_from_u64`, so every
//! generator is a pure function of its seed and parameters on every
//! platform.

use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};

use crate::error::{Error, Result};
use crate::family::{DomainConstants, QuadraticFamily};
use crate::meb::PointCloud;

/// Default central-difference step on unit-scale inputs.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-coordinate step: `h` on unit-scale coordinates, relative beyond that.
fn coordinate_step(h: f64, xj: f64) -> f64 {
    h * xj.abs().max(1.0)
}

/// Central differences `(f(x + h e_j) − f(x − h e_j)) / 2h`.
pub fn finite_diff_gradient<F>(f: F, x: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|j| {
            let hj = coordinate_step(h, x[j]);
            probe[j] = x[j] + hj;
            let up = f(&probe);
            probe[j] = x[j] - hj;
            let down = f(&probe);
            probe[j] = x[j];
            (up - down) / (2.0 * hj)
        })
        .collect()
}

/// Central-difference Jacobian of a vector field; column `j` is the
/// derivative along `e_j`.
pub fn finite_diff_jacobian<G>(g: G, x: &[f64], h: f64) -> DMatrix<f64>
where
    G: Fn(&[f64]) -> Vec<f64>,
{
    let n = x.len();
    let mut probe = x.to_vec();
    let mut jac = DMatrix::zeros(n, n);
    for j in 0..n {
        let hj = coordinate_step(h, x[j]);
        probe[j] = x[j] + hj;
        let up = g(&probe);
        probe[j] = x[j] - hj;
        let down = g(&probe);
        probe[j] = x[j];
        for i in 0..n {
            jac[(i, j)] = (up[i] - down[i]) / (2.0 * hj);
        }
    }
    jac
}

/// `‖a − b‖ / max(‖b‖, 1)`: relative error with an absolute floor so a
/// vanishing reference does not blow it up.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let norm: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    diff / norm.max(1.0)
}

/// Exhaustive grid search over the box followed by successive zoomed grids
/// around the incumbent. Intended for `dim ≤ 3`.
pub fn grid_oracle_minimize<F>(f: F, lower: &[f64], upper: &[f64], resolution: usize) -> Result<(Vec<f64>, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    if resolution < 2 {
        return Err(Error::invalid("grid resolution must be at least 2"));
    }
    if lower.len() != upper.len() || lower.is_empty() {
        return Err(Error::invalid("box bounds must be non-empty and of equal length"));
    }
    if lower
        .iter()
        .zip(upper)
        .any(|(l, u)| !(l.is_finite() && u.is_finite() && l <= u))
    {
        return Err(Error::invalid("box must be finite with lower <= upper"));
    }
    let dim = lower.len();
    let mut lo = lower.to_vec();
    let mut hi = upper.to_vec();
    let mut best = (lo.clone(), f(&lo));
    let mut res = resolution;

    for _ in 0..200 {
        let cells: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| (h - l) / (res - 1) as f64).collect();
        let mut idx = vec![0usize; dim];
        let mut point = vec![0.0; dim];
        loop {
            for k in 0..dim {
                point[k] = lo[k] + cells[k] * idx[k] as f64;
            }
            let v = f(&point);
            if v < best.1 {
                best = (point.clone(), v);
            }
            // odometer increment
            let mut k = 0;
            while k < dim {
                idx[k] += 1;
                if idx[k] < res {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == dim {
                break;
            }
        }
        let widest = cells.iter().copied().fold(0.0, f64::max);
        let scale = best.0.iter().map(|v| v.abs()).fold(1.0, f64::max);
        if widest <= 1e-14 * scale {
            break;
        }
        for k in 0..dim {
            lo[k] = best.0[k] - 2.0 * cells[k];
            hi[k] = best.0[k] + 2.0 * cells[k];
        }
        res = 9;
    }
    Ok(best)
}

/// Random `f_i(x) = a_i‖x − c_i‖²` with centers uniform in `[−1, 1]^dim`
/// and curvatures uniform in `[curv_min, curv_max]`.
#[derive(Debug, Clone)]
pub struct RandomQuadraticFamily {
    pub family: QuadraticFamily,
    pub centers: Vec<Vec<f64>>,
    pub curvatures: Vec<f64>,
    /// Exact constants over [`Self::domain_radius`]: `ℓ_i = u_i = 2a_i`.
    pub true_constants: DomainConstants,
    pub domain_radius: f64,
}

impl RandomQuadraticFamily {
    pub const CURV_MIN: f64 = 0.5;
    pub const CURV_MAX: f64 = 2.0;

    pub fn generate(seed: u64, n: usize, dim: usize) -> Result<Self> {
        Self::generate_with(seed, n, dim, Self::CURV_MIN, Self::CURV_MAX)
    }

    pub fn generate_with(seed: u64, n: usize, dim: usize, curv_min: f64, curv_max: f64) -> Result<Self> {
        if n == 0 || dim == 0 {
            return Err(Error::invalid("need n >= 1 and dim >= 1"));
        }
        if !(curv_min > 0.0 && curv_min <= curv_max) {
            return Err(Error::invalid("curvature range must satisfy 0 < min <= max"));
        }
        let mut rng = rng(seed);
        let centers: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect())
            .collect();
        let curvatures: Vec<f64> = (0..n).map(|_| rng.random_range(curv_min..=curv_max)).collect();
        let family = QuadraticFamily::new(centers.clone(), curvatures.clone())?;
        // the box [−1, 1]^dim and everything the optimizer visits sit well
        // inside this ball
        let domain_radius = 2.0 * (dim as f64).sqrt();
        let true_constants = family.constants_on_ball(domain_radius)?;
        Ok(Self {
            family,
            centers,
            curvatures,
            true_constants,
            domain_radius,
        })
    }

    /// Uniform point in the cube `[−1, 1]^dim`.
    pub fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..self.centers[0].len())
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointDistribution {
    /// Standard normal coordinates.
    Gaussian,
    /// Uniform on the unit sphere centered at the origin.
    SphereSurface,
    /// Gaussian blobs (σ = 0.1) around `clusters` centers in `[−1, 1]^dim`;
    /// points are dealt round-robin.
    Clustered { clusters: usize },
}

impl PointDistribution {
    pub fn name(&self) -> &'static str {
        match self {
            PointDistribution::Gaussian => "gaussian",
            PointDistribution::SphereSurface => "sphere_surface",
            PointDistribution::Clustered { .. } => "clustered",
        }
    }
}

impl FromStr for PointDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(PointDistribution::Gaussian),
            "sphere_surface" | "sphere" => Ok(PointDistribution::SphereSurface),
            "clustered" => Ok(PointDistribution::Clustered { clusters: 3 }),
            other => Err(Error::invalid(format!(
                "unknown distribution '{other}' (expected gaussian, sphere_surface or clustered)"
            ))),
        }
    }
}

fn gaussian_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn random_point_cloud(seed: u64, n: usize, dim: usize, distribution: PointDistribution) -> Result<PointCloud> {
    if n == 0 || dim == 0 {
        return Err(Error::invalid("need n >= 1 and dim >= 1"));
    }
    let mut rng = rng(seed);
    let points: Vec<Vec<f64>> = match distribution {
        PointDistribution::Gaussian => (0..n).map(|_| gaussian_vec(&mut rng, dim)).collect(),
        PointDistribution::SphereSurface => (0..n)
            .map(|_| loop {
                let v = gaussian_vec(&mut rng, dim);
                let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                if norm > 1e-12 {
                    break v.into_iter().map(|a| a / norm).collect();
                }
            })
            .collect(),
        PointDistribution::Clustered { clusters } => {
            if clusters == 0 {
                return Err(Error::invalid("need at least one cluster"));
            }
            let centers: Vec<Vec<f64>> = (0..clusters)
                .map(|_| (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect())
                .collect();
            (0..n)
                .map(|i| {
                    let c = &centers[i % clusters];
                    gaussian_vec(&mut rng, dim)
                        .into_iter()
                        .zip(c)
                        .map(|(z, m)| m + 0.1 * z)
                        .collect()
                })
                .collect()
        }
    };
    PointCloud::new(points)
}
