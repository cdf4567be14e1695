#![allow(dead_code)]

use dcov::{DiscreteJoint, MetricSpec, PairedSample, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coordinates on a coarse grid so that repeated atoms and ties occur.
pub fn grid_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-4i32..=4) as f64 * 0.5).collect()
}

pub fn gauss_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| StandardNormal.sample(rng)).collect()
}

/// A random joint law with support ≤ 6 and dimensions ≤ 3.
pub fn random_joint(seed: u64, beta: f64) -> DiscreteJoint {
    let mut r = rng(seed);
    let k = r.random_range(1..=6);
    let (dx, dy) = (r.random_range(1..=3), r.random_range(1..=3));
    let coarse = r.random_bool(0.5);
    let pt = |d: usize, r: &mut ChaCha8Rng| if coarse { grid_point(r, d) } else { gauss_point(r, d) };
    let atoms: Vec<(Point, Point)> =
        (0..k).map(|_| (Point::Coords(pt(dx, &mut r)), Point::Coords(pt(dy, &mut r)))).collect();
    let w: Vec<f64> = (0..k).map(|_| r.random_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    let mut probs: Vec<f64> = w.iter().map(|v| v / total).collect();
    // make the weights sum to one up to the last ulp
    let head: f64 = probs[..k - 1].iter().sum();
    probs[k - 1] = 1.0 - head;
    DiscreteJoint::new(atoms, probs, MetricSpec::euclidean(dx, beta).unwrap(), MetricSpec::euclidean(dy, beta).unwrap())
        .unwrap()
}

/// A dependent Gaussian sample: y mixes the x coordinates with noise.
pub fn random_sample(seed: u64, n: usize, dx: usize, dy: usize, beta: f64) -> PairedSample {
    let mut r = rng(seed);
    let x: Vec<Vec<f64>> = (0..n).map(|_| gauss_point(&mut r, dx)).collect();
    let y: Vec<Vec<f64>> = x
        .iter()
        .map(|xi| {
            (0..dy)
                .map(|j| xi[j % dx] + 0.7 * Distribution::<f64>::sample(&StandardNormal, &mut r))
                .collect()
        })
        .collect();
    PairedSample::euclidean(x, y, beta).unwrap()
}

/// A random orthogonal matrix from Gram–Schmidt on Gaussian columns.
pub fn random_rotation(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = Vec::new();
    while q.len() < dim {
        let mut v = gauss_point(rng, dim);
        for u in &q {
            let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-6 {
            q.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    q
}

pub fn apply(m: &[Vec<f64>], shift: &[f64], v: &[f64]) -> Vec<f64> {
    m.iter().zip(shift).map(|(row, s)| row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() + s).collect()
}

pub fn coords(points: &[Point]) -> Vec<Vec<f64>> {
    points.iter().map(|p| p.coords().unwrap().to_vec()).collect()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}
