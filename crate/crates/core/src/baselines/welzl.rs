//! Exact minimal enclosing ball by Welzl's randomized incremental
//! construction with move-to-front.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::meb::{sq_dist, PointCloud};

/// Largest dimension the exact solver accepts.
pub const MAX_EXACT_DIM: usize = 12;

/// Relative slack when testing whether a point lies inside the current ball.
const INSIDE_TOL: f64 = 1e-12;

/// Rounds of "restart with the worst violator in front" before giving up on
/// roundoff and returning the covering ball of the last support.
const MAX_PIVOT_ROUNDS: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactMebResult {
    pub center: Vec<f64>,
    pub radius: f64,
    /// Indices of the points on the boundary that determine the ball.
    pub support: Vec<usize>,
}

/// Smallest ball having every support point on its boundary: the
/// circumcenter within their affine hull.
///
/// Returns `None` when the support is affinely dependent and has no common
/// circumsphere.
pub(crate) fn circumball(points: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let (first, rest) = points.split_first()?;
    if rest.is_empty() {
        return Some((first.to_vec(), 0.0));
    }
    let dim = first.len();
    let k = rest.len();
    let diffs: Vec<DVector<f64>> = rest
        .iter()
        .map(|p| DVector::from_iterator(dim, p.iter().zip(*first).map(|(a, b)| a - b)))
        .collect();
    let gram = DMatrix::from_fn(k, k, |i, j| 2.0 * diffs[i].dot(&diffs[j]));
    let rhs = DVector::from_iterator(k, diffs.iter().map(|v| v.norm_squared()));

    let scale = rhs.amax().max(f64::MIN_POSITIVE);
    let lambda = match gram.clone().lu().solve(&rhs) {
        Some(l) if l.iter().all(|v| v.is_finite()) => l,
        // rank-deficient: least-squares circumcenter of the affine subspace
        _ => gram.svd(true, true).solve(&rhs, 1e-12 * scale).ok()?,
    };
    let mut center: Vec<f64> = first.to_vec();
    for (l, d) in lambda.iter().zip(&diffs) {
        for (c, v) in center.iter_mut().zip(d.iter()) {
            *c += l * v;
        }
    }
    let r2 = sq_dist(&center, first);
    // every support point must actually sit on the sphere
    let consistent = rest
        .iter()
        .all(|p| (sq_dist(&center, p) - r2).abs() <= 1e-9 * r2.max(scale));
    consistent.then_some((center, r2))
}

struct MoveToFront<'a> {
    cloud: &'a PointCloud,
    order: Vec<usize>,
    support: Vec<usize>,
    center: Vec<f64>,
    /// Negative for the empty ball.
    sq_radius: f64,
    best_support: Vec<usize>,
}

impl MoveToFront<'_> {
    fn outside(&self, idx: usize) -> bool {
        if self.sq_radius < 0.0 {
            return true;
        }
        sq_dist(self.cloud.point(idx), &self.center) > self.sq_radius * (1.0 + INSIDE_TOL)
    }

    fn set_ball_from_support(&mut self) -> bool {
        if self.support.is_empty() {
            self.sq_radius = -1.0;
            return true;
        }
        let pts: Vec<&[f64]> = self.support.iter().map(|&i| self.cloud.point(i)).collect();
        match circumball(&pts) {
            Some((c, r2)) => {
                self.center = c;
                self.sq_radius = r2;
                self.best_support.clone_from(&self.support);
                true
            }
            None => false,
        }
    }

    /// Ball of the first `end` points in `order` with the current support on
    /// its boundary.
    fn run(&mut self, end: usize) {
        if self.support.len() == self.cloud.dim() + 1 {
            return;
        }
        let mut i = 0;
        while i < end {
            let idx = self.order[i];
            if self.outside(idx) {
                self.support.push(idx);
                if self.set_ball_from_support() {
                    self.run(i);
                }
                self.support.pop();
                self.order[..=i].rotate_right(1);
            }
            i += 1;
        }
    }
}

/// Exact minimal enclosing ball; deterministic for a given `seed`.
pub fn welzl_exact(cloud: &PointCloud, seed: u64) -> Result<ExactMebResult> {
    if cloud.dim() > MAX_EXACT_DIM {
        return Err(Error::UnsupportedDimension {
            dim: cloud.dim(),
            max: MAX_EXACT_DIM,
        });
    }
    let mut order: Vec<usize> = (0..cloud.n()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut mtf = MoveToFront {
        cloud,
        order,
        support: Vec::with_capacity(cloud.dim() + 1),
        center: cloud.point(0).to_vec(),
        sq_radius: -1.0,
        best_support: Vec::new(),
    };
    for _ in 0..MAX_PIVOT_ROUNDS {
        mtf.support.clear();
        mtf.sq_radius = -1.0;
        let n = mtf.order.len();
        mtf.run(n);
        // roundoff can leave a point marginally outside; pull the worst one
        // to the front and rerun
        let worst = (0..n)
            .map(|k| (k, sq_dist(cloud.point(mtf.order[k]), &mtf.center)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .filter(|&(_, d)| d > mtf.sq_radius * (1.0 + 1e-10));
        match worst {
            Some((k, _)) => mtf.order[..=k].rotate_right(1),
            None => break,
        }
    }

    let sq_radius = cloud.points().map(|p| sq_dist(p, &mtf.center)).fold(0.0, f64::max);
    let mut support = mtf.best_support;
    support.sort_unstable();
    Ok(ExactMebResult {
        center: mtf.center,
        radius: sq_radius.sqrt(),
        support,
    })
}
