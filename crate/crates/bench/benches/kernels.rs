use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparsekl::oracle::global_min_enum;
use sparsekl::solver::{prox_theta_h, proximal_gradient, random_feasible_point, SolverConfig};
use sparsekl::subdiff::subdiff_distance;
use sparsekl::{sym_eig, HKind, ProblemSpec, SymMatrix, ThetaKind};

fn random_sym(p: usize, seed: u64) -> SymMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<f64> = (0..p * p).map(|_| rng.random_range(-1.0..1.0)).collect();
    SymMatrix::from_fn(p, |i, j| v[i.min(j) * p + i.max(j)])
}

fn eig(c: &mut Criterion) {
    let mut g = c.benchmark_group("sym_eig");
    for p in [4, 16, 64] {
        let a = random_sym(p, 1);
        g.bench_with_input(BenchmarkId::from_parameter(p), &a, |b, a| b.iter(|| sym_eig(black_box(a))));
    }
    g.finish();
}

fn subdiff(c: &mut Criterion) {
    let mut g = c.benchmark_group("subdiff_distance");
    for theta in [ThetaKind::Sphere, ThetaKind::Simplex] {
        let spec = ProblemSpec::new(random_sym(64, 2), theta, HKind::SparsityBall { kappa: 16 }).unwrap();
        let x = random_feasible_point(&spec, 3);
        g.bench_function(theta.name(), |b| b.iter(|| subdiff_distance(black_box(&spec), black_box(&x))));
    }
    g.finish();
}

fn prox(c: &mut Criterion) {
    let mut g = c.benchmark_group("prox_theta_h");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let u: Vec<f64> = (0..256).map(|_| rng.random_range(-1.0..1.0)).collect();
    for theta in ThetaKind::ALL {
        for h in [HKind::ZeroNorm { nu: 0.05 }, HKind::SparsityBall { kappa: 32 }] {
            let name = format!("{}/{}", theta.name(), if matches!(h, HKind::ZeroNorm { .. }) { "zero_norm" } else { "sparsity" });
            g.bench_function(name, |b| b.iter(|| prox_theta_h(theta, h, black_box(&u), 0.3)));
        }
    }
    g.finish();
}

fn solver(c: &mut Criterion) {
    let spec = ProblemSpec::new(random_sym(32, 5), ThetaKind::Sphere, HKind::SparsityBall { kappa: 8 }).unwrap();
    let x0 = random_feasible_point(&spec, 6);
    let cfg = SolverConfig { max_iters: 500, ..SolverConfig::default() };
    c.bench_function("proximal_gradient/sphere_p32", |b| b.iter(|| proximal_gradient(&spec, black_box(&x0), &cfg)));

    let small = ProblemSpec::new(random_sym(10, 7), ThetaKind::Sphere, HKind::SparsityBall { kappa: 4 }).unwrap();
    c.bench_function("global_min_enum/sphere_p10", |b| b.iter(|| global_min_enum(black_box(&small))));
}

criterion_group!(benches, eig, subdiff, prox, solver);
criterion_main!(benches);
