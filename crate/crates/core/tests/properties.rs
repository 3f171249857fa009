use proptest::prelude::*;
use swk_core::dynamics::Walker;
use swk_core::graph::{build_random_weighted, parse_graph, write_graph, GraphSpec, RandomGraphOptions};
use swk_core::linalg::{norm2, CMatrix, C64};
use swk_core::mapping::full_spectrum_check;
use swk_core::operators::{identity_suite, BuildOptions, Profile, WalkOperators};
use swk_core::sierpinski::{generate_spectral_set, rho, rho_preimages, verify_closure, CLOSURE_TOL};
use swk_core::spectral::{
    compare_points, eig_hermitian, joukowsky, joukowsky_inverse, kernel_dimension, rank, Tolerances,
};

fn random_options() -> impl Strategy<Value = RandomGraphOptions> {
    (3usize..10, 0.3f64..0.9, any::<u64>(), any::<bool>(), any::<bool>()).prop_map(|(v, p, seed, c, t)| {
        RandomGraphOptions {
            vertices: v,
            edge_probability: p,
            seed,
            complex_weights: c,
            random_theta: t,
        }
    })
}

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b)), n)
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    complex_vec(rows * cols).prop_map(move |v| CMatrix::from_row_major(rows, cols, v).unwrap())
}

fn spec() -> impl Strategy<Value = GraphSpec> {
    prop_oneof![
        (3usize..50).prop_map(|n| GraphSpec::Cycle { n }),
        (1usize..4, 3usize..6).prop_map(|(d, side)| GraphSpec::Torus { d, side }),
        (2usize..9).prop_map(|n| GraphSpec::Complete { n }),
        (2usize..5, 0usize..4).prop_map(|(d, depth)| GraphSpec::Tree { d, depth }),
        (2usize..4, 0usize..4).prop_map(|(d, level)| GraphSpec::SierpinskiPre { d, level }),
        (2usize..4, 0usize..4).prop_map(|(d, level)| GraphSpec::SierpinskiDouble { d, level }),
        (1usize..20, 0.0f64..=1.0).prop_map(|(n, c)| GraphSpec::PartitionOfUnity {
            grid_points: n,
            profile: Profile::Constant(c),
        }),
        random_options().prop_map(GraphSpec::Random),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_graphs_satisfy_operator_identities(opts in random_options()) {
        let g = build_random_weighted(opts).unwrap();
        let ops = WalkOperators::from_graph(&g, &BuildOptions::default()).unwrap();
        prop_assert!(ops.check_invariants(1e-10).is_ok());
        let report = identity_suite(&ops, 1e-10);
        prop_assert!(report.pass(), "{:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn graph_text_round_trips(opts in random_options()) {
        let g = build_random_weighted(opts).unwrap();
        prop_assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
    }

    #[test]
    fn spec_strings_round_trip(s in spec()) {
        let text = s.to_string();
        prop_assert_eq!(text.parse::<GraphSpec>().unwrap(), s);
    }

    #[test]
    fn evolution_preserves_norm_and_storage_agrees(opts in random_options(), seed in complex_vec(64)) {
        let g = build_random_weighted(opts).unwrap();
        let dense = WalkOperators::from_graph(&g, &BuildOptions::default()).unwrap();
        let sparse = WalkOperators::from_graph(&g, &BuildOptions { dense_limit: 0, ..BuildOptions::default() }).unwrap();
        prop_assert!(sparse.is_sparse() && !dense.is_sparse());
        let n = g.arc_count();
        let mut psi: Vec<C64> = seed.iter().cycle().take(n).copied().collect();
        let norm = norm2(&psi);
        prop_assume!(norm > 1e-3);
        psi.iter_mut().for_each(|a| *a /= norm);
        let mut a = Walker::new(&dense, &psi).unwrap();
        let mut b = Walker::new(&sparse, &psi).unwrap();
        for _ in 0..40 {
            a.step().unwrap();
            b.step().unwrap();
        }
        prop_assert!(a.max_norm_deviation() <= 1e-9);
        let diff: Vec<C64> = a.state().psi.iter().zip(&b.state().psi).map(|(x, y)| x - y).collect();
        prop_assert!(norm2(&diff) <= 1e-12);
    }

    #[test]
    fn joukowsky_inverse_lands_on_the_circle(x in -0.999999f64..0.999999) {
        let (up, down) = joukowsky_inverse(x).unwrap();
        prop_assert!((up.norm() - 1.0).abs() <= 1e-14 && (down - up.conj()).norm() <= 1e-15);
        prop_assert!(up.im >= 0.0);
        prop_assert!((joukowsky(up).unwrap().re - x).abs() <= 1e-14);
    }

    #[test]
    fn preimages_invert_rho(d in 2usize..9, t in 0.0f64..1.0) {
        let top = ((d + 3) * (d + 3)) as f64 / (8 * d) as f64;
        let y = -2.0 + t * (top + 2.0);
        let roots = rho_preimages(d, y);
        prop_assert!(!roots.is_empty());
        for x in roots {
            prop_assert!((rho(d, x) - y).abs() <= 1e-10 * y.abs().max(1.0));
        }
    }

    #[test]
    fn spectral_sets_are_bounded_and_closed(d in 2usize..6, depth in 0usize..7) {
        let set = generate_spectral_set(d, depth).unwrap();
        prop_assert!(set.len() <= set.size_bound());
        prop_assert!(set.values().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(set.values().iter().any(|&v| v == -1.0 / d as f64));
        prop_assert!(verify_closure(&set, CLOSURE_TOL).pass);
    }

    #[test]
    fn rank_of_low_rank_products(n in 2usize..10, m in 2usize..10, r in 1usize..5, a in matrix(10, 5), b in matrix(5, 10)) {
        let r = r.min(n).min(m);
        let left = CMatrix::from_fn(n, r, |i, j| a.row(i)[j]);
        let right = CMatrix::from_fn(r, m, |i, j| b.row(i)[j]);
        let p = left.matmul(&right);
        prop_assume!(rank(&left, 1e-6).unwrap() == r && rank(&right, 1e-6).unwrap() == r);
        prop_assert_eq!(rank(&p, 1e-9).unwrap(), r);
        prop_assert_eq!(kernel_dimension(&p, 1e-9).unwrap(), m - r);
    }

    #[test]
    fn hermitian_eigenvalues_reproduce_the_trace(a in matrix(8, 8)) {
        let h = CMatrix::from_fn(8, 8, |i, j| (a.row(i)[j] + a.row(j)[i].conj()) / 2.0);
        let e = eig_hermitian(&h).unwrap();
        let trace: f64 = (0..8).map(|i| h.row(i)[i].re).sum();
        prop_assert!((e.values.iter().sum::<f64>() - trace).abs() <= 1e-12);
        prop_assert!(e.residual <= 1e-12);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn matching_is_permutation_invariant(points in complex_vec(20), shift in 0usize..20) {
        let mut shuffled = points.clone();
        shuffled.rotate_left(shift);
        let m = compare_points(&points, &shuffled, 1e-12);
        prop_assert!(m.is_match());
        prop_assert_eq!(m.matched_count(), points.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn mapping_theorem_holds_on_random_graphs(opts in random_options()) {
        let g = build_random_weighted(opts).unwrap();
        let ops = WalkOperators::from_graph(&g, &BuildOptions::default()).unwrap();
        let v = full_spectrum_check(&ops, &Tolerances::default()).unwrap();
        prop_assert!(v.pass, "{:?}", v.failed_checks().collect::<Vec<_>>());
    }
}
