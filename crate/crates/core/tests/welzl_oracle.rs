//! The exact solver against brute force: the optimal ball is the smallest
//! circumball, taken over supports of at most `d + 1` points, that covers
//! the whole cloud.

use nalgebra::{DMatrix, DVector};

use smoothmax::baselines::welzl_exact;
use smoothmax::meb::PointCloud;
use smoothmax::testkit::{random_point_cloud, PointDistribution};

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Smallest ball with every point of `support` on its boundary and center in
/// their affine hull.
fn circumball(support: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let p0 = support[0];
    let k = support.len() - 1;
    if k == 0 {
        return Some((p0.to_vec(), 0.0));
    }
    let diffs: Vec<Vec<f64>> = support[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let gram = DMatrix::from_fn(k, k, |i, j| {
        diffs[i].iter().zip(&diffs[j]).map(|(a, b)| a * b).sum::<f64>()
    });
    let rhs = DVector::from_fn(k, |i, _| 0.5 * diffs[i].iter().map(|a| a * a).sum::<f64>());
    if gram.determinant().abs() < 1e-12 {
        return None;
    }
    let lambda = gram.lu().solve(&rhs)?;
    let mut c = p0.to_vec();
    for (l, d) in lambda.iter().zip(&diffs) {
        for (ci, di) in c.iter_mut().zip(d) {
            *ci += l * di;
        }
    }
    let r2 = sq(&c, p0);
    Some((c, r2))
}

fn brute_force_radius(cloud: &PointCloud) -> f64 {
    let n = cloud.n();
    let max_size = (cloud.dim() + 1).min(n);
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        if mask.count_ones() as usize > max_size {
            continue;
        }
        let support: Vec<&[f64]> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| cloud.point(i)).collect();
        if let Some((c, r2)) = circumball(&support) {
            if r2 < best && cloud.points().all(|p| sq(p, &c) <= r2 * (1.0 + 1e-9) + 1e-12) {
                best = r2;
            }
        }
    }
    best.sqrt()
}

#[test]
fn matches_brute_force() {
    let dists = [
        PointDistribution::Gaussian,
        PointDistribution::SphereSurface,
        PointDistribution::Clustered { clusters: 2 },
    ];
    for seed in 0..60u64 {
        let n = 2 + (seed as usize % 11);
        let d = 1 + (seed as usize / 3 % 4);
        let cloud = random_point_cloud(seed, n, d, dists[seed as usize % 3]).unwrap();
        let oracle = brute_force_radius(&cloud);
        let got = welzl_exact(&cloud, seed).unwrap();
        assert!(
            (got.radius - oracle).abs() <= 1e-9 * oracle,
            "seed {seed} (n {n}, d {d}): welzl {} vs brute force {oracle}",
            got.radius
        );
        for p in cloud.points() {
            assert!(sq(p, &got.center) <= got.radius * got.radius * (1.0 + 1e-9));
        }
        for &i in &got.support {
            let r = sq(cloud.point(i), &got.center).sqrt();
            assert!(
                (r - got.radius).abs() <= 1e-9 * got.radius,
                "support point {i} off the sphere"
            );
        }
    }
}

#[test]
fn radius_does_not_depend_on_seed() {
    let cloud = random_point_cloud(77, 400, 5, PointDistribution::Gaussian).unwrap();
    let base = welzl_exact(&cloud, 0).unwrap();
    for seed in 1..10 {
        let other = welzl_exact(&cloud, seed).unwrap();
        assert!((other.radius - base.radius).abs() <= 1e-10 * base.radius);
        assert!(other
            .center
            .iter()
            .zip(&base.center)
            .all(|(a, b)| (a - b).abs() <= 1e-8 * base.radius));
    }
}
