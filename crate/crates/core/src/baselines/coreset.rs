//! Farthest-point core-set iteration for the enclosing ball.

use crate::error::{Error, Result};
use crate::meb::{farthest_sq_distance, radius_bounds, MebResult, PointCloud};

/// `⌈1/ε̃²⌉`, guarded against `1/0.1² = 100.00000000000001`-style roundoff.
pub fn coreset_iterations(relative_epsilon: f64) -> usize {
    let raw = 1.0 / (relative_epsilon * relative_epsilon);
    (raw * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

pub fn badoiu_clarkson(cloud: &PointCloud, relative_epsilon: f64) -> Result<MebResult> {
    badoiu_clarkson_observed(cloud, relative_epsilon, |_, _| {})
}

/// Runs `c_k = c_{k−1} + (q_k − c_{k−1})/(k + 1)` from the first point, with
/// `q_k` the point farthest from `c_{k−1}`. The observer gets
/// `(k, max_i ‖c_{k−1} − c_i‖²)` before each update.
pub fn badoiu_clarkson_observed<O>(cloud: &PointCloud, relative_epsilon: f64, mut observer: O) -> Result<MebResult>
where
    O: FnMut(usize, f64),
{
    if !(relative_epsilon > 0.0 && relative_epsilon <= 1.0) {
        return Err(Error::invalid(format!(
            "relative epsilon must lie in (0, 1], got {relative_epsilon}"
        )));
    }
    let mut center = cloud.point(0).to_vec();
    let (f0, _) = farthest_sq_distance(cloud, &center)?;
    let (radius_lower, radius_upper) = radius_bounds(f0);
    if cloud.n() == 1 {
        return Ok(MebResult {
            center,
            radius: 0.0,
            iterations: 0,
            planned_iterations: 0,
            epsilon_gap_used: 0.0,
            radius_lower,
            radius_upper,
            constants: None,
        });
    }

    let iterations = coreset_iterations(relative_epsilon);
    for k in 1..=iterations {
        let (sq, far) = farthest_sq_distance(cloud, &center)?;
        observer(k, sq);
        let step = 1.0 / (k as f64 + 1.0);
        for (c, q) in center.iter_mut().zip(cloud.point(far)) {
            *c += (q - *c) * step;
        }
    }
    let (sq, _) = farthest_sq_distance(cloud, &center)?;
    Ok(MebResult {
        center,
        radius: sq.sqrt(),
        iterations,
        planned_iterations: iterations,
        epsilon_gap_used: 0.0,
        radius_lower,
        radius_upper,
        constants: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iteration_counts() {
        assert_eq!(coreset_iterations(0.2), 25);
        assert_eq!(coreset_iterations(0.1), 100);
        assert_eq!(coreset_iterations(0.05), 400);
        assert_eq!(coreset_iterations(0.025), 1600);
        assert_eq!(coreset_iterations(1.0), 1);
        assert_eq!(coreset_iterations(0.3), 12);
    }

    #[test]
    fn two_points_exact_after_one_step() {
        let cloud = PointCloud::new(vec![vec![0.0], vec![2.0]]).unwrap();
        let mut seen = Vec::new();
        let r = badoiu_clarkson_observed(&cloud, 1.0, |k, sq| seen.push((k, sq))).unwrap();
        assert_eq!(seen, vec![(1, 4.0)]);
        assert_eq!((r.center, r.radius, r.iterations), (vec![1.0], 1.0, 1));
    }

    #[test]
    fn singleton() {
        let cloud = PointCloud::new(vec![vec![1.0, 2.0]]).unwrap();
        let r = badoiu_clarkson(&cloud, 0.1).unwrap();
        assert_eq!((r.center, r.radius, r.iterations), (vec![1.0, 2.0], 0.0, 0));
    }
}
