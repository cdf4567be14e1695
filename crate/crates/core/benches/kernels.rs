use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dcov::inference::perm_test;
use dcov::par::with_threads;
use dcov::{dcov_centered, dcov_charrv_mc, CharRvConfig, PairedSample, QuadConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sample(n: usize) -> PairedSample {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
    let y: Vec<Vec<f64>> = x.iter().map(|v| vec![v[0] * v[1] + r.random_range(-0.1..0.1)]).collect();
    PairedSample::euclidean(x, y, 1.0).unwrap()
}

// `None` uses the global pool; `Some(1)` forces a single worker.
const POOLS: [(&str, Option<usize>); 2] = [("sequential", Some(1)), ("parallel", None)];

fn centered(c: &mut Criterion) {
    let mut g = c.benchmark_group("dcov_centered");
    for n in [500, 2000] {
        let s = sample(n);
        for (name, threads) in POOLS {
            g.bench_with_input(BenchmarkId::new(name, n), &s, |b, s| {
                b.iter(|| with_threads(threads, || dcov_centered(s).unwrap()))
            });
        }
    }
    g.finish();
}

fn permutation(c: &mut Criterion) {
    let mut g = c.benchmark_group("perm_test");
    g.sample_size(10);
    let s = sample(200);
    for (name, threads) in POOLS {
        g.bench_function(name, |b| b.iter(|| with_threads(threads, || perm_test(&s, 199, 7).unwrap())));
    }
    g.finish();
}

fn projection(c: &mut Criterion) {
    let mut g = c.benchmark_group("charrv");
    g.sample_size(10);
    let s = sample(40);
    let cfg = CharRvConfig { draws: 100, seed: 3, quad: QuadConfig::coarse() };
    for (name, threads) in POOLS {
        g.bench_function(name, |b| b.iter(|| with_threads(threads, || dcov_charrv_mc(&s, &cfg).unwrap())));
    }
    g.finish();
}

criterion_group!(benches, centered, permutation, projection);
criterion_main!(benches);
