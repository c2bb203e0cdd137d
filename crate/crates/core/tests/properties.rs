//! Property tests over randomly drawn networks, matrices and configurations.

use holoep::config::RunConfig;
use holoep::data::{idx_parse, idx_serialize, IdxTensor, IdxType};
use holoep::estimators::{cauchy_derivative, ground_truth_dudbeta, rbp_delta, LinearSolver};
use holoep::homeostasis::{decompose, homeo_loss_exact, symmetry_measure};
use holoep::linalg::{Lu, Matrix};
use holoep::models::{one_hot, sigma, softmax};
use holoep::training::{sgd_step, TrainConfig};
use holoep::{relax, residual, Dims, Dynamics, ModelKind, Network, NetworkState, SolverSettings, C64};
use proptest::prelude::*;

fn matrix(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| Matrix::from_vec(n, n, v).unwrap())
}

fn kind() -> impl Strategy<Value = ModelKind> {
    prop_oneof![
        Just(ModelKind::ReciprocalMLP),
        Just(ModelKind::HopfieldMLP),
        Just(ModelKind::DirectFeedback),
        Just(ModelKind::PCN),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symmetric_plus_skew_reconstructs(j in matrix(6)) {
        let (s, a) = decompose(&j).unwrap();
        for r in 0..6 {
            for c in 0..6 {
                prop_assert!((s.get(r, c) + a.get(r, c) - j.get(r, c)).abs() < 1e-15);
                prop_assert!((s.get(r, c) - s.get(c, r)).abs() < 1e-15);
                prop_assert!((a.get(r, c) + a.get(c, r)).abs() < 1e-15);
            }
        }
        let m = symmetry_measure(&j).unwrap();
        prop_assert!((0.0..=1.0).contains(&m));
        prop_assert!((homeo_loss_exact(&j).unwrap() - 2.0 * a.frobenius_sqr()).abs() < 1e-12);
    }

    #[test]
    fn symmetry_measure_is_scale_invariant(j in matrix(5), s in 0.1f64..10.0) {
        let mut k = j.clone();
        k.scale(s);
        prop_assert!((symmetry_measure(&j).unwrap() - symmetry_measure(&k).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn lu_solves_diagonally_dominant_systems(a in matrix(7), b in prop::collection::vec(-1.0f64..1.0, 7)) {
        let m = Matrix::from_fn(7, 7, |r, c| a.get(r, c) + if r == c { 8.0 } else { 0.0 });
        let lu = Lu::factor(&m).unwrap();
        let x = lu.solve(&b);
        let back = m.matvec(&x);
        for (y, z) in back.iter().zip(&b) {
            prop_assert!((y - z).abs() < 1e-12);
        }
        let xt = lu.solve_transpose(&b);
        for (y, z) in m.matvec_t(&xt).iter().zip(&b) {
            prop_assert!((y - z).abs() < 1e-12);
        }
    }

    #[test]
    fn cauchy_derivative_is_exact_below_n(coeffs in prop::collection::vec(-2.0f64..2.0, 4), amp in 0.01f64..1.0) {
        // Degree-3 polynomial: the N = 5 contour sum has no aliasing.
        let f = |b: C64| coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * b + c);
        let d = cauchy_derivative(f, amp, 5);
        prop_assert!((d.re - coeffs[1]).abs() < 1e-11);
        prop_assert!(d.im.abs() < 1e-11);
    }

    #[test]
    fn shifted_sigmoid_is_monotone_and_bounded(x in -50.0f64..50.0, dx in 1e-3f64..1.0) {
        let (a, b) = (sigma(x), sigma(x + dx));
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a);
        prop_assert!((sigma(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn softmax_is_a_distribution(z in prop::collection::vec(-30.0f64..30.0, 1..12)) {
        let p = softmax(&z);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn idx_round_trips(dims in prop::collection::vec(1usize..5, 1..4), seed in any::<u64>()) {
        let n: usize = dims.iter().product();
        let data: Vec<f64> = (0..n).map(|i| ((seed.wrapping_add(i as u64 * 31)) % 256) as f64).collect();
        let t = IdxTensor { dtype: IdxType::U8, dims, data };
        prop_assert_eq!(idx_parse(&idx_serialize(&t).unwrap()).unwrap(), t);
    }

    #[test]
    fn sgd_without_momentum_is_plain_descent(seed in any::<u64>(), lr in 0.0f64..2.0) {
        let net = Network::init(ModelKind::ReciprocalMLP, Dims::new(3, vec![4, 3], 2), seed, 0.3).unwrap();
        let mut p = net.params.clone();
        let g = net.params.clone();
        let mut v = net.params.zeros_like::<f64>();
        let cfg = TrainConfig { lr, momentum: 0.0, ..TrainConfig::default() };
        sgd_step(&mut p, &g, &mut v, &cfg);
        for (a, b) in p.to_flat().iter().zip(net.params.to_flat()) {
            prop_assert!((a - (1.0 - lr) * b).abs() < 1e-14);
        }
    }

    #[test]
    fn relaxation_reaches_small_residual(k in kind(), seed in 0u64..1000, alpha in 0.0f64..1.57) {
        let net = Network::init(k, Dims::new(5, vec![6, 4], 3), seed, alpha).unwrap();
        let x: Vec<f64> = (0..5).map(|i| ((seed + i) % 7) as f64 / 7.0).collect();
        let y = one_hot(seed as usize % 3, 3);
        let b = net.bind(&x, &y).unwrap();
        let s = SolverSettings::default().with_budgets(5000, 5000).with_damping(0.5);
        let r = relax(&b, C64::new(0.0, 0.0), &NetworkState::zeros(b.layer_dims()), &s).unwrap();
        prop_assert!(r.converged, "residual {}", r.residual);
        prop_assert!(residual(&b, &r.state, C64::new(0.0, 0.0)).unwrap() <= 1e-8);
        prop_assert!(r.state.is_real());
    }

    #[test]
    fn iterative_and_dense_oracles_agree(seed in 0u64..1000, alpha in 0.0f64..1.57) {
        let net = Network::init(ModelKind::ReciprocalMLP, Dims::new(4, vec![5, 5], 3), seed, alpha).unwrap();
        let x = vec![0.2, 0.7, 0.1, 0.9];
        let y = one_hot(1, 3);
        let b = net.bind(&x, &y).unwrap();
        let s = SolverSettings::default().with_tolerance(1e-13).with_budgets(5000, 5000);
        let u = relax(&b, C64::new(0.0, 0.0), &NetworkState::zeros(b.layer_dims()), &s).unwrap().state.real_parts();
        let it = LinearSolver::Iterative { tolerance: 1e-13, max_iter: 5000 };
        let t1 = ground_truth_dudbeta(&b, &u, it).unwrap();
        let t2 = ground_truth_dudbeta(&b, &u, LinearSolver::Dense).unwrap();
        prop_assert!(t1.relative_error(&t2) < 1e-9);
        let r1 = rbp_delta(&b, &u, it).unwrap();
        let r2 = rbp_delta(&b, &u, LinearSolver::Dense).unwrap();
        prop_assert!(r1.relative_error(&r2) < 1e-9);
    }

    #[test]
    fn hopfield_oracles_coincide(seed in 0u64..1000) {
        let net = Network::init(ModelKind::HopfieldMLP, Dims::new(4, vec![5, 4], 3), seed, 0.0).unwrap();
        let x = vec![0.3, 0.5, 0.8, 0.1];
        let y = one_hot(2, 3);
        let b = net.bind(&x, &y).unwrap();
        let s = SolverSettings::default().with_tolerance(1e-13).with_budgets(5000, 5000).with_damping(0.5);
        let u = relax(&b, C64::new(0.0, 0.0), &NetworkState::zeros(b.layer_dims()), &s).unwrap().state.real_parts();
        let t = ground_truth_dudbeta(&b, &u, LinearSolver::Dense).unwrap();
        let r = rbp_delta(&b, &u, LinearSolver::Dense).unwrap();
        prop_assert!(t.relative_error(&r) < 1e-10);
    }

    #[test]
    fn run_config_round_trips(
        lr in 0.0f64..1.0,
        amp in 0.001f64..1.0,
        layers in prop::collection::vec(1usize..300, 1..4),
        seed in any::<u64>(),
        homeo in any::<bool>(),
        workers in 0usize..8,
    ) {
        let mut c = RunConfig::default();
        c.train.lr = lr;
        c.estimator.amplitude = amp;
        c.model.layers = layers;
        c.model.seed = seed;
        c.train.homeostasis = homeo;
        c.workers = workers;
        prop_assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
    }
}

#[test]
fn unknown_config_key_is_named() {
    let err = RunConfig::parse("train.lr = 0.1\ntrain.learning_rate = 3\n").unwrap_err();
    assert!(err.to_string().contains("train.learning_rate"), "{err}");
}
