use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::linalg::Matrix;
use crate::scalar::dot;

const KINDS: [ModelKind; 4] = [
    ModelKind::ReciprocalMLP,
    ModelKind::HopfieldMLP,
    ModelKind::DirectFeedback,
    ModelKind::PCN,
];

fn toy(kind: ModelKind, seed: u64) -> Network {
    let dims = Dims::new(5, vec![4, 3, 2], 3);
    let mut net = Network::init(kind, dims, seed, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb1a5);
    for b in &mut net.params.b {
        b.iter_mut().for_each(|x| *x = rng.random_range(-0.5..0.5));
    }
    net.params.b_ro.iter_mut().for_each(|x| *x = rng.random_range(-0.5..0.5));
    net
}

fn rand_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

fn sample(net: &Network, seed: u64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = rand_vec(&mut rng, net.dims.input, 0.0, 1.0);
    let y = one_hot(1, net.dims.classes);
    let u = rand_vec(&mut rng, net.state_dim(), -0.3, 1.2);
    (x, y, u)
}

fn field(b: &Bound<'_>, u: &[f64], beta: f64) -> Vec<f64> {
    let mut g = vec![0.0; u.len()];
    b.update(u, beta, &mut g);
    g.iter().zip(u).map(|(g, u)| g - u).collect()
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(1e-300)
}

#[test]
fn dense_jacobian_matches_finite_differences() {
    for kind in KINDS {
        let net = toy(kind, 11);
        let (x, y, u) = sample(&net, 1);
        let b = net.bind(&x, &y).unwrap();
        let j = b.jacobian_dense(&u).unwrap();
        let h = 1e-6;
        for c in 0..u.len() {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[c] += h;
            dn[c] -= h;
            let (fp, fm) = (field(&b, &up, 0.0), field(&b, &dn, 0.0));
            for r in 0..u.len() {
                let fd = (fp[r] - fm[r]) / (2.0 * h);
                assert!((fd - j.get(r, c)).abs() < 1e-6, "{kind} J[{r},{c}]");
            }
        }
    }
}

#[test]
fn products_agree_with_dense_jacobian() {
    for kind in KINDS {
        let net = toy(kind, 12);
        let (x, y, u) = sample(&net, 2);
        let b = net.bind(&x, &y).unwrap();
        let j = b.jacobian_dense(&u).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = rand_vec(&mut rng, u.len(), -1.0, 1.0);
        let jv = j.matvec(&v);
        let jtv = j.transpose().matvec(&v);
        for (a, e) in b.jvp(&u, &v).iter().zip(&jv) {
            assert!((a - e).abs() < 1e-12, "{kind} jvp");
        }
        for (a, e) in b.vjp(&u, &v).iter().zip(&jtv) {
            assert!((a - e).abs() < 1e-12, "{kind} vjp");
        }
        let zero = vec![0.0; u.len()];
        assert!(b.jvp(&u, &zero).iter().all(|&z| z == 0.0));
    }
}

#[test]
fn hopfield_jacobian_is_symmetric() {
    for seed in 0..5 {
        let net = toy(ModelKind::HopfieldMLP, seed);
        let (x, y, u) = sample(&net, seed + 10);
        let j = net.bind(&x, &y).unwrap().jacobian_dense(&u).unwrap();
        assert!(j.max_abs_diff(&j.transpose()) < 1e-12);
    }
}

#[test]
fn dense_jacobian_refuses_large_states() {
    let net = toy(ModelKind::ReciprocalMLP, 1);
    let (x, y, u) = sample(&net, 1);
    let b = net.bind(&x, &y).unwrap();
    assert!(matches!(
        b.jacobian_dense_limited(&u, 5),
        Err(Error::TooLarge { size: 9, limit: 5 })
    ));
}

#[test]
fn feedforward_limit_is_lower_triangular() {
    let mut net = toy(ModelKind::DirectFeedback, 3);
    net.params.w_fb.as_mut().unwrap().scale(0.0);
    let (x, y, u) = sample(&net, 3);
    let j = net.bind(&x, &y).unwrap().jacobian_dense(&u).unwrap();
    let n = u.len();
    for r in 0..n {
        assert_eq!(j.get(r, r), -1.0);
        for c in r + 1..n {
            assert_eq!(j.get(r, c), 0.0);
        }
    }
}

/// Directional finite difference of a scalar function of the parameters.
fn param_fd(net: &Network, dir: &[f64], f: impl Fn(&Network) -> f64) -> f64 {
    let h = 1e-6;
    let base = net.params.to_flat();
    let shifted = |s: f64| {
        let mut p = net.params.clone();
        let flat: Vec<f64> = base.iter().zip(dir).map(|(a, d)| a + s * d).collect();
        p.set_flat(&flat).unwrap();
        net.with_params(p)
    };
    (f(&shifted(h)) - f(&shifted(-h))) / (2.0 * h)
}

fn random_direction(net: &Network, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rand_vec(&mut rng, net.params.num_params(), -1.0, 1.0)
}

#[test]
fn bilinear_gradient_matches_finite_differences() {
    for kind in KINDS {
        let net = toy(kind, 21);
        let (x, y, u) = sample(&net, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = rand_vec(&mut rng, u.len(), -1.0, 1.0);
        let bv = rand_vec(&mut rng, u.len(), -1.0, 1.0);
        let g = net.bind(&x, &y).unwrap().bilinear_grad(&u, &a, &bv);
        for seed in 0..3 {
            let dir = random_direction(&net, seed);
            let fd = param_fd(&net, &dir, |n| dot(&a, &n.bind(&x, &y).unwrap().jvp(&u, &bv)));
            let an = dot(&g.to_flat(), &dir);
            assert!((fd - an).abs() < 1e-5 * an.abs().max(1e-3), "{kind}: {fd} vs {an}");
        }
        let zero = vec![0.0; u.len()];
        assert_eq!(net.bind(&x, &y).unwrap().bilinear_grad(&u, &zero, &bv).norm(), 0.0);
    }
}

#[test]
fn presyn_gradient_matches_finite_differences() {
    for kind in KINDS {
        let net = toy(kind, 31);
        let (x, y, u) = sample(&net, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let delta = rand_vec(&mut rng, u.len(), -1.0, 1.0);
        let g = net.bind(&x, &y).unwrap().presyn_grad(&u, &delta).unwrap();
        assert_eq!(g.w_ro.frobenius(), 0.0);
        for seed in 0..3 {
            let dir = random_direction(&net, 100 + seed);
            let fd = param_fd(&net, &dir, |n| dot(&delta, &field(&n.bind(&x, &y).unwrap(), &u, 0.0)));
            let an = dot(&g.to_flat(), &dir);
            assert!((fd - an).abs() < 1e-6 * an.abs().max(1e-3), "{kind}: {fd} vs {an}");
        }
    }
}

#[test]
fn presyn_gradient_is_linear_in_complex_error() {
    for kind in KINDS {
        let net = toy(kind, 41);
        let (x, y, u) = sample(&net, 6);
        let b = net.bind(&x, &y).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let re = rand_vec(&mut rng, u.len(), -1.0, 1.0);
        let im = rand_vec(&mut rng, u.len(), -1.0, 1.0);
        let uc: Vec<C64> = u.iter().map(|&a| C64::new(a, 0.0)).collect();
        let dc: Vec<C64> = re.iter().zip(&im).map(|(&a, &b)| C64::new(a, b)).collect();
        let gc = b.presyn_grad(&uc, &dc).unwrap().to_flat();
        let gr = b.presyn_grad(&u, &re).unwrap().to_flat();
        let gi = b.presyn_grad(&u, &im).unwrap().to_flat();
        for ((c, r), i) in gc.iter().zip(&gr).zip(&gi) {
            assert!((c.re - r).abs() < 1e-13 && (c.im - i).abs() < 1e-13);
        }
        let zero = vec![C64::new(0.0, 0.0); u.len()];
        assert_eq!(b.presyn_grad(&uc, &zero).unwrap().norm(), 0.0);
    }
}

#[test]
fn hopfield_split_fuses_to_tied_gradient() {
    let net = toy(ModelKind::HopfieldMLP, 51);
    let (x, y, u) = sample(&net, 7);
    let b = net.bind(&x, &y).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let delta = rand_vec(&mut rng, u.len(), -1.0, 1.0);
    let tied = b.presyn_grad(&u, &delta).unwrap();
    let split = b.hopfield_split(&u, &delta).unwrap();
    for (f, t) in split.fused().iter().zip(&tied.w_fwd) {
        assert!(f.max_abs_diff(t) < 1e-15);
    }
    let other = toy(ModelKind::ReciprocalMLP, 1);
    assert!(other.bind(&x, &y).unwrap().hopfield_split(&u, &delta).is_err());
}

#[test]
fn teaching_direction_is_beta_derivative() {
    for kind in KINDS {
        let net = toy(kind, 61);
        let (x, y, u) = sample(&net, 8);
        let b = net.bind(&x, &y).unwrap();
        let h = 1e-6;
        let (fp, fm) = (field(&b, &u, h), field(&b, &u, -h));
        let fd: Vec<f64> = fp.iter().zip(&fm).map(|(a, c)| (a - c) / (2.0 * h)).collect();
        assert!(rel_err(&b.teaching_direction(&u), &fd) < 1e-8, "{kind}");
    }
}

#[test]
fn path_average_matches_pointwise_average() {
    for kind in KINDS {
        let net = toy(kind, 71);
        let (x, y, u) = sample(&net, 9);
        let b = net.bind(&x, &y).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let states: Vec<Vec<C64>> = (0..4)
            .map(|_| u.iter().map(|&a| C64::new(a + rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1))).collect())
            .collect();
        let delta: Vec<C64> = (0..u.len()).map(|_| C64::new(rng.random_range(-1.0..1.0), 0.3)).collect();
        let mut path = PresynPath::new(&b);
        let mut expect: Params<C64> = net.params.zeros_like();
        for s in &states {
            path.push(&b, s);
            expect.axpy(0.25, &b.presyn_grad(s, &delta).unwrap());
        }
        let got = path.contract(&b, &delta).unwrap();
        for (g, e) in got.to_flat().iter().zip(expect.to_flat()) {
            assert!((g - e).norm() < 1e-12, "{kind}");
        }
    }
}

#[test]
fn zero_parameters_map_to_zero_state() {
    let dims = Dims::new(3, vec![4, 2], 2);
    for kind in [ModelKind::ReciprocalMLP, ModelKind::HopfieldMLP, ModelKind::DirectFeedback] {
        let net = Network::new(kind, dims.clone(), Params::zeros(kind, &dims)).unwrap();
        let (x, y) = (vec![0.3, 0.1, 0.9], one_hot(0, 2));
        let b = net.bind(&x, &y).unwrap();
        let s = NetworkState::from_real(&dims.layers, &[0.2, -1.0, 3.0, 0.5, 0.1, 0.7]).unwrap();
        let next = b.step(&s, C64::new(0.0, 0.0)).unwrap();
        assert!(next.as_slice().iter().all(|z| z.norm() == 0.0));
    }
}

#[test]
fn single_layer_identity_input_is_fixed_point() {
    let dims = Dims::new(2, vec![2], 2);
    let mut p: ModelParams = Params::zeros(ModelKind::ReciprocalMLP, &dims);
    p.w_in = Matrix::identity(2);
    let net = Network::new(ModelKind::ReciprocalMLP, dims.clone(), p).unwrap();
    let x = [0.4, -0.7];
    let y = one_hot(1, 2);
    let b = net.bind(&x, &y).unwrap();
    let s = NetworkState::from_real(&dims.layers, &x).unwrap();
    let next = b.step(&s, C64::new(0.0, 0.0)).unwrap();
    assert_eq!(next, s);
}

#[test]
fn pcn_update_matches_hand_evaluation() {
    let dims = Dims::new(2, vec![2, 2], 2);
    let mut p: ModelParams = Params::zeros(ModelKind::PCN, &dims);
    p.w_in = Matrix::from_vec(2, 2, vec![1.0, 0.5, -0.5, 1.0]).unwrap();
    p.w_fwd[0] = Matrix::from_vec(2, 2, vec![0.8, -0.2, 0.3, 0.6]).unwrap();
    p.w_bwd[0] = Matrix::from_vec(2, 2, vec![0.5, 0.1, -0.4, 0.7]).unwrap();
    p.b[1] = vec![0.1, -0.1];
    let net = Network::new(ModelKind::PCN, dims.clone(), p).unwrap();
    let x = [0.2, 0.6];
    let y = one_hot(0, 2);
    let b = net.bind(&x, &y).unwrap();
    let u = [0.3, 0.9, -0.2, 0.4];
    let s = |z: f64| 1.0 / (1.0 + (-4.0 * z + 2.0).exp());
    let ds = |z: f64| 4.0 * s(z) * (1.0 - s(z));
    // Prediction errors.
    let e0 = [u[0] - (0.2 + 0.5 * 0.6), u[1] - (-0.5 * 0.2 + 0.6)];
    let v0 = [s(u[0]), s(u[1])];
    let e1 = [
        u[2] - (0.8 * v0[0] - 0.2 * v0[1] + 0.1),
        u[3] - (0.3 * v0[0] + 0.6 * v0[1] - 0.1),
    ];
    let eps = b.pcn_errors(&u);
    for (a, e) in eps.concat().iter().zip([e0[0], e0[1], e1[0], e1[1]]) {
        assert!((a - e).abs() < 1e-15);
    }
    // Value-neuron Euler step with η = 0.5 and β = 0.
    let fb = [0.5 * e1[0] + 0.1 * e1[1], -0.4 * e1[0] + 0.7 * e1[1]];
    let expect = [
        u[0] + 0.5 * (-e0[0] + ds(u[0]) * fb[0]),
        u[1] + 0.5 * (-e0[1] + ds(u[1]) * fb[1]),
        u[2] + 0.5 * (-e1[0]),
        u[3] + 0.5 * (-e1[1]),
    ];
    let mut out = [0.0; 4];
    b.update(&u, 0.0, &mut out);
    for (a, e) in out.iter().zip(expect) {
        assert!((a - e).abs() < 1e-15);
    }
}

#[test]
fn real_step_stays_real_and_matches_complex_path() {
    for kind in KINDS {
        let net = toy(kind, 81);
        let (x, y, u) = sample(&net, 11);
        let b = net.bind(&x, &y).unwrap();
        let s = NetworkState::from_real(&net.dims.layers, &u).unwrap();
        let next = b.step(&s, C64::new(0.3, 0.0)).unwrap();
        assert!(next.is_real(), "{kind}");
        let mut out = vec![0.0; u.len()];
        b.update(&u, 0.3, &mut out);
        for (a, e) in next.real_parts().iter().zip(&out) {
            assert!((a - e).abs() < 1e-15);
        }
    }
}

#[test]
fn readout_gradient_matches_finite_differences() {
    let net = toy(ModelKind::ReciprocalMLP, 91);
    let (x, y, u) = sample(&net, 12);
    let g = net.bind(&x, &y).unwrap().readout_grad(&u);
    let dir = random_direction(&net, 7);
    let fd = param_fd(&net, &dir, |n| n.bind(&x, &y).unwrap().readout_loss(&u).0);
    let an = dot(&g.to_flat(), &dir);
    assert!((fd - an).abs() < 1e-6 * an.abs());
}

#[test]
fn readout_loss_edge_cases() {
    let dims = Dims::new(2, vec![3], 4);
    let net = Network::new(ModelKind::ReciprocalMLP, dims.clone(), Params::zeros(ModelKind::ReciprocalMLP, &dims)).unwrap();
    let x = [0.0, 0.0];
    let y = one_hot(2, 4);
    let b = net.bind(&x, &y).unwrap();
    let (loss, err) = b.readout_loss(&[0.1, 0.2, 0.3]);
    assert!((loss - 4f64.ln()).abs() < 1e-14);
    assert!((err.iter().sum::<f64>()).abs() < 1e-15);
}

#[test]
fn checkpoint_round_trip_is_lossless() {
    for kind in KINDS {
        let net = toy(kind, 101);
        let ck = Checkpoint::from_network(&net, 1.0, 101);
        let back = Checkpoint::from_json(&ck.to_json().unwrap()).unwrap().to_network().unwrap();
        assert_eq!(back, net);
    }
}

#[test]
fn checkpoint_rejects_shape_mismatch() {
    let net = toy(ModelKind::ReciprocalMLP, 1);
    let mut ck = Checkpoint::from_network(&net, 0.0, 1);
    ck.tensors[1].shape = vec![1, 1];
    assert!(matches!(ck.to_network(), Err(Error::Checkpoint(_))));
}

#[test]
fn bind_checks_lengths() {
    let net = toy(ModelKind::ReciprocalMLP, 1);
    assert!(net.bind(&[0.0; 4], &one_hot(0, 3)).is_err());
    assert!(net.bind(&[0.0; 5], &one_hot(0, 2)).is_err());
    assert!(NudgeSpec::new(C64::new(0.1, 0.0), vec![0.0, 1.0, 1.0]).is_err());
    assert!(NudgeSpec::new(C64::new(0.1, 0.0), vec![0.0, 1.0, 0.0]).is_ok());
}
