mod common;

use common::*;
use dcov::charrv::{char_rv, cov_moment_exact, cov_moment_mc, dcov_charrv_mc_joint, hhat_m};
use dcov::{
    dcov_centered, dcov_charfn_1d, dcov_charrv_mc, dcov_exact, dcov_hm, dcov_plugin_d1, CharRvConfig, DiscreteJoint,
    ExactMethod, MetricSpec, Point, QuadConfig,
};
use rand::Rng;

fn bernoulli(beta: f64) -> DiscreteJoint {
    let s = MetricSpec::euclidean(1, beta).unwrap();
    DiscreteJoint::uniform(
        vec![(Point::scalar(0.0), Point::scalar(0.0)), (Point::scalar(1.0), Point::scalar(1.0))],
        s.clone(),
        s,
    )
    .unwrap()
}

fn cheap_quad() -> QuadConfig {
    QuadConfig { eps: 1e-4, t_max: 100.0, points: 8, panels_per_decade: 4, tol: 1e-3 }
}

#[test]
fn char_rv_bounded_and_one_at_origin() {
    let mut r = rng(1);
    for _ in 0..200 {
        let pts: Vec<Point> = (0..5).map(|_| Point::Coords(gauss_point(&mut r, 3))).collect();
        let xi = gauss_point(&mut r, 3);
        let w = [0.1, 0.2, 0.3, 0.25, 0.15];
        assert!(char_rv(&pts, &w, &xi, r.random_range(-10.0..10.0)).unwrap().norm() <= 1.0 + 1e-15);
        assert_eq!(char_rv(&pts, &w, &xi, 0.0).unwrap().re, 1.0);
    }
}

#[test]
fn factorizes_for_product_laws() {
    for seed in 0..10u64 {
        let j = random_joint(seed, 1.0).product_of_marginals().unwrap();
        let (m, _) = cov_moment_mc(&j, 1.3, 0.7, 200, seed).unwrap();
        assert!(m <= 1e-24, "seed {seed}: {m}");
    }
}

#[test]
fn gaussian_average_matches_expansion() {
    for seed in 0..4u64 {
        let j = random_joint(seed + 10, 1.0);
        for (a, b) in [(0.3, 0.5), (1.0, 1.0), (2.0, 0.6)] {
            let exact = cov_moment_exact(&j, a, b).unwrap();
            let (mc, se) = cov_moment_mc(&j, a, b, 4000, seed).unwrap();
            assert!((mc - exact).abs() <= 3.0 * se + 1e-14, "seed {seed} ({a},{b}): {mc} ± {se} vs {exact}");
        }
    }
}

#[test]
fn bernoulli_methods_agree() {
    let j = bernoulli(1.0);
    let e = dcov_charrv_mc_joint(&j, &CharRvConfig { draws: 2000, seed: 11, quad: QuadConfig::default() }).unwrap();
    let se = e.stderr.unwrap();
    assert!((e.value - 0.25).abs() <= 3.0 * se, "{e:?}");
    let f = dcov_charfn_1d(&j, &QuadConfig::default()).unwrap().value;
    assert!(rel_close(f, 0.25, 1e-3));
    assert_eq!(dcov_exact(&j, ExactMethod::D1).unwrap().value, 0.25);
}

#[test]
fn gaussian_sample_matches_centered() {
    let s = random_sample(5, 24, 3, 2, 1.0);
    let want = dcov_centered(&s).unwrap().value;
    let e = dcov_charrv_mc(&s, &CharRvConfig { draws: 400, seed: 3, quad: cheap_quad() }).unwrap();
    let se = e.stderr.unwrap();
    assert!((e.value - want).abs() <= 3.0 * se + 1e-3 * want, "{} ± {se} vs {want}", e.value);
}

#[test]
fn charrv_is_seed_deterministic() {
    let s = random_sample(6, 10, 2, 2, 0.8);
    let cfg = CharRvConfig { draws: 50, seed: 9, quad: cheap_quad() };
    assert_eq!(dcov_charrv_mc(&s, &cfg).unwrap(), dcov_charrv_mc(&s, &cfg).unwrap());
}

#[test]
fn hm_nondecreasing_and_converges() {
    for seed in 0..6u64 {
        let beta = [0.5, 1.0, 1.5][seed as usize % 3];
        let s = random_sample(seed, 30, 2, 2, beta);
        let maxd2 = [s.x_points(), s.y_points()]
            .iter()
            .flat_map(|pts| {
                let c = coords(pts);
                let mut m: f64 = 0.0;
                for a in &c {
                    for b in &c {
                        m = m.max(a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum());
                    }
                }
                [m]
            })
            .fold(0.0, f64::max);
        let mut prev = f64::NEG_INFINITY;
        for k in -4..=6 {
            let v = dcov_hm(&s, 10f64.powi(k) * maxd2).unwrap().value;
            assert!(v >= prev - 1e-12, "seed {seed}: not monotone at 1e{k}");
            prev = v;
        }
        // the gap shrinks like (d²/M)^{1-β/2}, so only β ≤ 1 reaches 1e-3 here
        if beta <= 1.0 {
            let target = dcov_plugin_d1(&s).unwrap().value;
            let v = dcov_hm(&s, 1e6 * maxd2).unwrap().value;
            assert!((v - target).abs() <= 1e-3, "{v} vs {target}");
        }
    }
}

#[test]
fn truncated_kernel_obeys_uniform_bound() {
    let mut r = rng(77);
    for i in 0..20_000usize {
        let beta = [0.5, 1.0, 1.5, 2.0 - 1e-9][i % 4];
        let q: Vec<Vec<f64>> = (0..4)
            .map(|_| {
                let s = 10f64.powf(r.random_range(-2.0..2.0));
                gauss_point(&mut r, 2).into_iter().map(|v| v * s).collect()
            })
            .collect();
        let n: Vec<f64> = q.iter().map(|v| v.iter().map(|c| c * c).sum::<f64>().sqrt()).collect();
        let c = if beta <= 1.0 { 2.0 } else { beta * 2f64.powf(beta) };
        let bound = c * (0..4).map(|k| (n[k] * n[(k + 1) % 4]).powf(beta / 2.0)).sum::<f64>();
        for m in [1e-3, 1.0, 1e3, 1e9] {
            let h = hhat_m([&q[0], &q[1], &q[2], &q[3]], m, beta).abs();
            assert!(h <= bound * (1.0 + 1e-9) + 1e-12, "beta {beta} M {m}: {h} > {bound}");
        }
    }
}
