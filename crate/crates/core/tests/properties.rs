use proptest::prelude::*;
use sparsekl::oracle::{global_min_enum, prox_bruteforce, prox_objective};
use sparsekl::sets::{project_sparse_simplex, project_sparse_sphere, project_sparse_sphere_nonneg};
use sparsekl::solver::{prox_theta_h, proximal_gradient, random_feasible_point, SolverConfig};
use sparsekl::subdiff::{objective, subdiff_distance};
use sparsekl::{HKind, ProblemSpec, SymMatrix, ThetaKind};

fn sym(p: usize) -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-2.0f64..2.0, p * p).prop_map(move |v| {
        SymMatrix::from_fn(p, |i, j| v[i.min(j) * p + i.max(j)])
    })
}

fn instance() -> impl Strategy<Value = (SymMatrix, usize)> {
    (2usize..=6).prop_flat_map(|p| (sym(p), 1..=p))
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // a sparse projection is the prox of the indicator, so the brute-force
    // prox with t = 1 gives the optimal squared distance
    #[test]
    fn sparse_projections_are_nearest(
        u in prop::collection::vec(-3.0f64..3.0, 1..=7),
        k in 1usize..=7,
    ) {
        let p = u.len();
        let kappa = k.min(p);
        let h = HKind::SparsityBall { kappa };
        for (theta, x) in [
            (ThetaKind::Sphere, project_sparse_sphere(&u, kappa)),
            (ThetaKind::SphereNonneg, project_sparse_sphere_nonneg(&u, kappa)),
            (ThetaKind::Simplex, project_sparse_simplex(&u, kappa)),
        ] {
            let x = x.unwrap();
            let best = prox_bruteforce(theta, h, &u, 1.0).unwrap();
            prop_assert!(sq_dist(&x, &u) / 2.0 <= best.value + 1e-9);
            prop_assert!(x.iter().filter(|v| **v != 0.0).count() <= kappa);
        }
    }

    #[test]
    fn prox_matches_enumeration(u in prop::collection::vec(-3.0f64..3.0, 1..=6), t in 0.05f64..2.0, nu in 0.01f64..1.0) {
        let h = HKind::ZeroNorm { nu };
        for theta in ThetaKind::ALL {
            let x = prox_theta_h(theta, h, &u, t).unwrap();
            let best = prox_bruteforce(theta, h, &u, t).unwrap().value;
            prop_assert!(prox_objective(h, &u, t, &x) <= best + 1e-9);
        }
    }

    #[test]
    fn solver_descends_and_ends_critical((a, kappa) in instance(), seed in 0u64..1000) {
        for theta in [ThetaKind::Sphere, ThetaKind::Simplex, ThetaKind::SphereNonneg] {
            let spec = ProblemSpec::new(a.clone(), theta, HKind::SparsityBall { kappa }).unwrap();
            let x0 = random_feasible_point(&spec, seed);
            let cfg = SolverConfig { max_iters: 5000, ..SolverConfig::default() };
            let trace = proximal_gradient(&spec, &x0, &cfg).unwrap();
            let values = trace.values();
            for w in values.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-10 * (1.0 + w[0].abs()));
            }
            let last = trace.last();
            prop_assert!(spec.in_domain(&last.x));
            prop_assert!((objective(&spec, &last.x) - last.value).abs() <= 1e-12);
            if last.step_norm <= cfg.tol {
                let d = subdiff_distance(&spec, &last.x).unwrap().distance;
                prop_assert!(d <= 1e-8, "distance {} at {:?}", d, last.x);
            }
            let global = global_min_enum(&spec).unwrap().value;
            prop_assert!(last.value >= global - 1e-9);
        }
    }
}
