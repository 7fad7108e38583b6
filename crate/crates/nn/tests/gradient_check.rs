//! Finite-difference verification of every analytic gradient, plus the
//! hand-computed layer oracles. The numeric side only ever invokes
//! forward passes, keeping it independent of the backward code.

use gti_nn::gradcheck::{central_diff_grad, max_rel_err};
use gti_nn::layers::{BatchNorm2d, Conv2d, Deconv2d, Fc, Layer};
use gti_nn::loss::{bce, bce_with_logits};
use gti_nn::optim::{Adam, Sgd};
use gti_nn::tensor::Tensor4;
use gti_nn::Net;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FD_STEP: f64 = 1e-5;
const TOL: f64 = 1e-4;
const FLOOR: f64 = 1e-6;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_tensor(n: usize, c: usize, h: usize, w: usize, rng: &mut ChaCha8Rng) -> Tensor4 {
    let data = (0..n * c * h * w).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Tensor4::from_vec(n, c, h, w, data).unwrap()
}

/// Scalar readout sum(r * y) with fixed random weights r.
fn readout(y: &Tensor4, r: &[f64]) -> f64 {
    y.data.iter().zip(r).map(|(a, b)| a * b).sum()
}

/// FD-check one layer wrt its input and each parameter array.
fn check_layer(mut layer: Layer, x: &Tensor4, training: bool, label: &str) {
    let mut r = rng(999);
    let (y0, cache) = layer.clone().forward(x, training).unwrap();
    let read: Vec<f64> = (0..y0.data.len()).map(|_| r.gen_range(-1.0..1.0)).collect();

    let gy = Tensor4::from_vec(y0.n, y0.c, y0.h, y0.w, read.clone()).unwrap();
    let (gx, grads) = layer.backward(&cache, &gy).unwrap();

    // input gradient
    let proto = layer.clone();
    let numeric = central_diff_grad(
        |v| {
            let probe = Tensor4::from_vec(x.n, x.c, x.h, x.w, v.to_vec()).unwrap();
            let (y, _) = proto.clone().forward(&probe, training).unwrap();
            readout(&y, &read)
        },
        &x.data,
        FD_STEP,
    );
    let err = max_rel_err(&gx.data, &numeric, FLOOR);
    assert!(err < TOL, "{label}: input grad rel-err {err}");

    // parameter gradients
    let n_params = layer.param_arrays().len();
    for pi in 0..n_params {
        let base = layer.param_arrays()[pi].clone();
        let proto = layer.clone();
        let numeric = central_diff_grad(
            |v| {
                let mut probe = proto.clone();
                *probe.param_arrays_mut()[pi] = v.to_vec();
                let (y, _) = probe.forward(x, training).unwrap();
                readout(&y, &read)
            },
            &base,
            FD_STEP,
        );
        let err = max_rel_err(&grads.arrays[pi], &numeric, FLOOR);
        assert!(err < TOL, "{label}: param {pi} grad rel-err {err}");
    }
}

#[test]
fn conv_matches_hand_oracle() {
    // all-ones 4x4 input, all-ones 4x4 kernel, pad 1, stride 2: every
    // 2x2 output entry sees nine in-bounds ones.
    let mut rg = rng(1);
    let mut conv = Conv2d::new(1, 1, &mut rg);
    conv.weight = vec![1.0; 16];
    conv.bias = vec![0.0];
    let x = Tensor4::from_vec(1, 1, 4, 4, vec![1.0; 16]).unwrap();
    let (y, _) = Layer::Conv(conv).forward(&x, false).unwrap();
    assert_eq!((y.n, y.c, y.h, y.w), (1, 1, 2, 2));
    assert_eq!(y.data, vec![9.0; 4]);
}

#[test]
fn conv_gradients() {
    let mut rg = rng(2);
    let conv = Conv2d::new(2, 3, &mut rg);
    let x = random_tensor(2, 2, 4, 4, &mut rg);
    check_layer(Layer::Conv(conv), &x, true, "conv");
}

#[test]
fn deconv_gradients() {
    let mut rg = rng(3);
    let deconv = Deconv2d::new(3, 2, &mut rg);
    let x = random_tensor(2, 3, 2, 2, &mut rg);
    check_layer(Layer::Deconv(deconv), &x, true, "deconv");
}

#[test]
fn deconv_doubles_and_conv_halves() {
    let mut rg = rng(4);
    let conv = Conv2d::new(1, 4, &mut rg);
    let deconv = Deconv2d::new(4, 1, &mut rg);
    let x = random_tensor(1, 1, 8, 8, &mut rg);
    let (mid, _) = Layer::Conv(conv).forward(&x, false).unwrap();
    assert_eq!((mid.h, mid.w), (4, 4));
    let (back, _) = Layer::Deconv(deconv).forward(&mid, false).unwrap();
    assert_eq!((back.h, back.w), (8, 8));
}

#[test]
fn conv_deconv_adjoint_identity() {
    // <conv(x), y> == <x, deconv(y)> when deconv reuses the conv kernel
    // (same flat layout under the [in][out] reinterpretation) and both
    // biases vanish.
    let mut rg = rng(5);
    let (ic, oc) = (3, 2);
    let mut conv = Conv2d::new(ic, oc, &mut rg);
    conv.bias = vec![0.0; oc];
    let adjoint = Deconv2d {
        in_ch: oc,
        out_ch: ic,
        weight: conv.weight.clone(),
        bias: vec![0.0; ic],
    };
    let x = random_tensor(2, ic, 6, 6, &mut rg);
    let y = random_tensor(2, oc, 3, 3, &mut rg);
    let (cx, _) = Layer::Conv(conv).forward(&x, false).unwrap();
    let (ay, _) = Layer::Deconv(adjoint).forward(&y, false).unwrap();
    let lhs: f64 = cx.data.iter().zip(&y.data).map(|(a, b)| a * b).sum();
    let rhs: f64 = x.data.iter().zip(&ay.data).map(|(a, b)| a * b).sum();
    assert!(
        (lhs - rhs).abs() < 1e-8,
        "adjoint mismatch: {lhs} vs {rhs}"
    );
}

#[test]
fn batchnorm_normalizes_batch() {
    // channel with mean 5, variance 4, unit scale, zero shift
    let mut rg = rng(6);
    let mut bn = BatchNorm2d::new(1, &mut rg);
    bn.gamma = vec![1.0];
    bn.beta = vec![0.0];
    let data = vec![3.0, 7.0, 3.0, 7.0, 3.0, 7.0, 3.0, 7.0];
    let x = Tensor4::from_vec(8, 1, 1, 1, data).unwrap();
    let (y, _) = Layer::BatchNorm(bn).forward(&x, true).unwrap();
    let mean: f64 = y.data.iter().sum::<f64>() / 8.0;
    let var: f64 = y.data.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 8.0;
    assert!(mean.abs() < 1e-6);
    assert!((var - 1.0).abs() < 1e-3, "bn eps shifts variance: {var}");
}

#[test]
fn batchnorm_gradients_training_and_eval() {
    let mut rg = rng(7);
    let bn = BatchNorm2d::new(3, &mut rg);
    let x = random_tensor(4, 3, 2, 2, &mut rg);
    check_layer(Layer::BatchNorm(bn.clone()), &x, true, "batchnorm-train");
    let mut warm = bn;
    // move running stats off their init values first
    let _ = Layer::BatchNorm(warm.clone()).forward(&x, true).unwrap();
    warm.running_mean = vec![0.3, -0.1, 0.2];
    warm.running_var = vec![1.4, 0.6, 0.9];
    check_layer(Layer::BatchNorm(warm), &x, false, "batchnorm-eval");
}

#[test]
fn fc_gradients_and_identity() {
    let mut rg = rng(8);
    let fc = Fc::new(12, 5, &mut rg);
    let x = random_tensor(3, 3, 2, 2, &mut rg);
    check_layer(Layer::Fc(fc), &x, true, "fc");

    // identity weights pass the gradient straight through
    let mut id = Fc::new(4, 4, &mut rg);
    id.weight = vec![0.0; 16];
    for i in 0..4 {
        id.weight[i * 4 + i] = 1.0;
    }
    id.bias = vec![0.0; 4];
    let x = random_tensor(2, 4, 1, 1, &mut rg);
    let layer = Layer::Fc(id);
    let (y, cache) = layer.clone().forward(&x, false).unwrap();
    let gy = random_tensor(2, 4, 1, 1, &mut rg);
    let (gx, _) = layer.backward(&cache, &gy).unwrap();
    assert_eq!(y.data, x.data);
    assert_eq!(gx.data, gy.data);
}

#[test]
fn activation_values_and_gradients() {
    // LR = max(x, 0.2 x)
    let mut rg = rng(9);
    let x = Tensor4::from_vec(1, 2, 1, 1, vec![-1.0, 3.0]).unwrap();
    let (y, _) = Layer::LeakyRelu(0.2).forward(&x, false).unwrap();
    assert_eq!(y.data, vec![-0.2, 3.0]);

    let x = random_tensor(2, 3, 2, 2, &mut rg);
    check_layer(Layer::LeakyRelu(0.2), &x, false, "leaky_relu");
    check_layer(Layer::Sigmoid, &x, false, "sigmoid");
    check_layer(Layer::Tanh, &x, false, "tanh");
}

#[test]
fn bce_gradients() {
    let mut rg = rng(10);
    let probs_raw: Vec<f64> = (0..12).map(|_| rg.gen_range(0.05..0.95)).collect();
    let targets: Vec<f64> = (0..12).map(|_| f64::from(rg.gen_range(0..2))).collect();
    let p = Tensor4::from_vec(3, 4, 1, 1, probs_raw.clone()).unwrap();
    let t = Tensor4::from_vec(3, 4, 1, 1, targets.clone()).unwrap();

    let (_, grad) = bce(&p, &t).unwrap();
    let numeric = central_diff_grad(
        |v| {
            let probe = Tensor4::from_vec(3, 4, 1, 1, v.to_vec()).unwrap();
            bce(&probe, &t).unwrap().0
        },
        &probs_raw,
        FD_STEP,
    );
    assert!(max_rel_err(&grad.data, &numeric, FLOOR) < TOL);

    let logits_raw: Vec<f64> = (0..12).map(|_| rg.gen_range(-3.0..3.0)).collect();
    let z = Tensor4::from_vec(3, 4, 1, 1, logits_raw.clone()).unwrap();
    let (_, grad) = bce_with_logits(&z, &t).unwrap();
    let numeric = central_diff_grad(
        |v| {
            let probe = Tensor4::from_vec(3, 4, 1, 1, v.to_vec()).unwrap();
            bce_with_logits(&probe, &t).unwrap().0
        },
        &logits_raw,
        FD_STEP,
    );
    assert!(max_rel_err(&grad.data, &numeric, FLOOR) < TOL);

    // sigmoid(logits) fed to plain bce agrees with the fused form
    let (sig, _) = Layer::Sigmoid.forward(&z, false).unwrap();
    let (l1, _) = bce(&sig, &t).unwrap();
    let (l2, _) = bce_with_logits(&z, &t).unwrap();
    assert!((l1 - l2).abs() < 1e-9);
}

#[test]
fn small_net_end_to_end_gradients() {
    // composed stack: the caches and reshapes must chain correctly
    let mut rg = rng(11);
    let net = Net::new(vec![
        Layer::Fc(Fc::new(6, 4 * 2 * 2, &mut rg)),
        Layer::Reshape { c: 4, h: 2, w: 2 },
        Layer::BatchNorm(BatchNorm2d::new(4, &mut rg)),
        Layer::LeakyRelu(0.2),
        Layer::Deconv(Deconv2d::new(4, 1, &mut rg)),
        Layer::Sigmoid,
    ]);
    let x = random_tensor(3, 6, 1, 1, &mut rg);
    let mut r = rng(12);
    let read: Vec<f64> = (0..3 * 16).map(|_| r.gen_range(-1.0..1.0)).collect();

    let mut live = net.clone();
    let (y, caches) = live.forward(&x, true).unwrap();
    let gy = Tensor4::from_vec(y.n, y.c, y.h, y.w, read.clone()).unwrap();
    let (gx, _) = live.backward(&caches, &gy).unwrap();

    let numeric = central_diff_grad(
        |v| {
            let probe = Tensor4::from_vec(3, 6, 1, 1, v.to_vec()).unwrap();
            let (y, _) = net.clone().forward(&probe, true).unwrap();
            readout(&y, &read)
        },
        &x.data,
        FD_STEP,
    );
    assert!(max_rel_err(&gx.data, &numeric, FLOOR) < TOL);
}

#[test]
fn adam_first_step_is_signed_lr() {
    let mut adam = Adam::new(0.1, 0.5, 0.999, 1e-8);
    let mut p = vec![1.0, -2.0, 0.5];
    let g = vec![3.0, -0.7, 0.001];
    let before = p.clone();
    adam.step(&mut [&mut p], &[&g]).unwrap();
    for i in 0..3 {
        let delta = p[i] - before[i];
        let expect = -0.1 * g[i].signum();
        assert!(
            (delta - expect).abs() < 0.01 * expect.abs(),
            "step {delta} vs {expect}"
        );
    }
}

#[test]
fn adam_zero_gradient_is_noop() {
    let mut adam = Adam::dcgan(2e-4);
    let mut p = vec![0.25, -1.5];
    adam.step(&mut [&mut p], &[&[0.0, 0.0]]).unwrap();
    assert_eq!(p, vec![0.25, -1.5]);
}

#[test]
fn adam_minimizes_quadratic() {
    // f(w) = (w-3)^2 from w=0
    let mut adam = Adam::new(0.1, 0.9, 0.999, 1e-8);
    let mut w = vec![0.0];
    for _ in 0..2000 {
        let g = vec![2.0 * (w[0] - 3.0)];
        adam.step(&mut [&mut w], &[&g]).unwrap();
    }
    assert!((w[0] - 3.0).abs() < 0.01, "adam stalled at {}", w[0]);
}

#[test]
fn sgd_rejects_non_finite() {
    let sgd = Sgd::new(0.1);
    let mut p = vec![1.0];
    assert!(sgd.step(&mut [&mut p], &[&[f64::NAN]]).is_err());
}

#[test]
fn forward_is_deterministic_per_seed() {
    let build = || {
        let mut rg = rng(77);
        Net::new(vec![
            Layer::Fc(Fc::new(5, 8, &mut rg)),
            Layer::Reshape { c: 2, h: 2, w: 2 },
            Layer::Conv(Conv2d::new(2, 3, &mut rg)),
        ])
    };
    let mut a = build();
    let mut b = build();
    let mut rg = rng(78);
    let x = random_tensor(2, 5, 1, 1, &mut rg);
    let (ya, _) = a.forward(&x, true).unwrap();
    let (yb, _) = b.forward(&x, true).unwrap();
    assert_eq!(ya.data, yb.data);
}

#[test]
fn non_finite_input_rejected_at_boundary() {
    let mut rg = rng(79);
    let mut net = Net::new(vec![Layer::Fc(Fc::new(2, 2, &mut rg))]);
    let x = Tensor4::from_vec(1, 2, 1, 1, vec![1.0, f64::NAN]).unwrap();
    assert!(net.forward(&x, true).is_err());
}
