use enorm_core::linalg::{random_complex_matrix, rng_from_seed};
use enorm_core::*;
use proptest::prelude::*;

fn pair_and_energy(dim: usize, seed: u64, u: f64) -> (OperatorPair, f64) {
    let pair = OperatorPair::random(dim, seed).unwrap();
    let e = pair.ground_energy() + (pair.max_energy() - pair.ground_energy()) * u;
    (pair, e)
}

fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    a.sub(b).unwrap().max_abs() <= tol * (1.0 + a.max_abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enorm_is_a_norm(dim in 2usize..6, seed in any::<u64>(), u in 0.05f64..1.0,
                       re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let (pair, e) = pair_and_energy(dim, seed, u);
        let g = pair.g().clone();
        let b = random_complex_matrix(&mut rng_from_seed(seed ^ 0x5eed), dim, dim);
        let norm = |m: ComplexMatrix| enorm_dual(&OperatorPair::new(m, g.clone()).unwrap(), e).unwrap().value;
        let na = norm(pair.a().clone());
        let nb = norm(b.clone());
        let c = C64::new(re, im);
        prop_assert!((norm(pair.a().scale(c)) - c.norm() * na).abs() <= 1e-9 * (1.0 + c.norm() * na));
        prop_assert!(norm(pair.a().add(&b).unwrap()) <= na + nb + 1e-9);
        prop_assert!(na <= pair.a().operator_norm() + 1e-9);
    }

    #[test]
    fn energy_chain(dim in 2usize..6, seed in any::<u64>(), u1 in 0.01f64..1.0, u2 in 0.01f64..1.0) {
        let (pair, e1) = pair_and_energy(dim, seed, u1.min(u2));
        let (_, e2) = pair_and_energy(dim, seed, u1.max(u2));
        let v1 = enorm_dual(&pair, e1).unwrap().value;
        let v2 = enorm_dual(&pair, e2).unwrap().value;
        prop_assert!(v1 <= v2 + 1e-9);
        prop_assert!(v2 <= (e2 / e1).sqrt() * v1 + 1e-9);
    }

    #[test]
    fn witness_is_feasible_and_attains(dim in 2usize..6, seed in any::<u64>(), u in 0.05f64..1.0) {
        let (pair, e) = pair_and_energy(dim, seed, u);
        let p = enorm_dual(&pair, e).unwrap();
        let energy = expectation(pair.g(), &p.witness).unwrap();
        let value2 = expectation(pair.objective(), &p.witness).unwrap();
        prop_assert!(energy <= e + 1e-8 * (1.0 + e));
        prop_assert!((value2 - p.value * p.value).abs() <= 1e-7 * (1.0 + p.value * p.value));
    }

    #[test]
    fn primal_never_exceeds_dual(dim in 2usize..5, seed in any::<u64>(), u in 0.05f64..1.0) {
        let (pair, e) = pair_and_energy(dim, seed, u);
        let dual = enorm_dual(&pair, e).unwrap().value;
        let primal = enorm_primal_pure(&pair, e, seed).unwrap().value;
        prop_assert!(primal <= dual + 1e-9);
        prop_assert!(primal >= dual - 1e-6);
    }

    #[test]
    fn frontier_round_trip(dim in 2usize..5, seed in any::<u64>()) {
        let pair = OperatorPair::random(dim, seed).unwrap();
        let grid: Vec<f64> = (1..=8).map(|k| pair.max_energy() * k as f64 / 8.0).collect();
        let curve = enorm_curve(&pair, &grid).unwrap();
        let frontier = gamma_frontier(&curve).unwrap();
        prop_assert!(frontier.points.windows(2).all(|w| w[0].b <= w[1].b && w[0].a >= w[1].a - 1e-12));
        for pt in &curve.points {
            let v = enorm_from_gamma(&frontier, pt.energy);
            prop_assert!((v - pt.value).abs() <= 1e-6 * (1.0 + pt.value));
        }
        let op = GammaPoint::new(pair.a().operator_norm() * (1.0 + 1e-9), 0.0).unwrap();
        prop_assert_eq!(gamma_membership(&curve, op), Membership::Member);
    }

    #[test]
    fn tensor_mixed_product(seed in any::<u64>(), p in 1usize..4, q in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        let a = random_complex_matrix(&mut rng, p, p);
        let b = random_complex_matrix(&mut rng, q, q);
        let c = random_complex_matrix(&mut rng, p, p);
        let d = random_complex_matrix(&mut rng, q, q);
        let lhs = tensor(&a, &b).matmul(&tensor(&c, &d)).unwrap();
        let rhs = tensor(&a.matmul(&c).unwrap(), &b.matmul(&d).unwrap());
        prop_assert!(close(&lhs, &rhs, 1e-12));
        prop_assert!(close(&tensor(&a, &b).adjoint(), &tensor(&a.adjoint(), &b.adjoint()), 0.0));
    }

    #[test]
    fn eigensystem_reconstructs(dim in 1usize..9, seed in any::<u64>()) {
        let x = random_complex_matrix(&mut rng_from_seed(seed), dim, dim);
        let h = HermitianMatrix::with_tolerance(x.add(&x.adjoint()).unwrap(), 1e-12).unwrap();
        let es = h.eigensystem();
        prop_assert!(es.values.windows(2).all(|w| w[0] <= w[1]));
        let v = &es.vectors;
        let d = ComplexMatrix::from_real_diagonal(&es.values);
        let rebuilt = v.matmul(&d).unwrap().matmul(&v.adjoint()).unwrap();
        prop_assert!(close(h.as_complex(), &rebuilt, 1e-10));
    }
}
