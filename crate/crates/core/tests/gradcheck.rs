//! Finite-difference verification of the analytic BPTT gradients.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stlf_core::nn::{loss_rmse, CellKind, Dims, Network};

const FD_STEP: f64 = 1e-5;
const REL_TOL: f64 = 1e-4;
const ABS_FLOOR: f64 = 1e-6;

fn random_instance(seed: u64, dims: Dims, steps: usize, kind: CellKind) -> (Network, Array2<f64>, Array1<f64>) {
    let net = Network::init(kind, dims, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
    let seq = Array2::from_shape_fn((steps, dims.input), |_| rng.random_range(-1.0..1.0));
    let target = Array1::from_shape_fn(dims.output, |_| rng.random_range(-1.0..1.0));
    (net, seq, target)
}

fn loss_at(net: &Network, flat: &[f64], seq: &Array2<f64>, target: &Array1<f64>) -> f64 {
    let mut probe = net.clone();
    probe.load_flat(flat).unwrap();
    let pred = probe.predict(seq).unwrap();
    loss_rmse(pred.view(), target.view()).unwrap()
}

fn central_difference(net: &Network, seq: &Array2<f64>, target: &Array1<f64>) -> Vec<f64> {
    let base = net.flatten();
    let mut grad = vec![0.0; base.len()];
    let mut flat = base.clone();
    for i in 0..base.len() {
        flat[i] = base[i] + FD_STEP;
        let plus = loss_at(net, &flat, seq, target);
        flat[i] = base[i] - FD_STEP;
        let minus = loss_at(net, &flat, seq, target);
        flat[i] = base[i];
        grad[i] = (plus - minus) / (2.0 * FD_STEP);
    }
    grad
}

fn assert_gradients_match(net: &Network, seq: &Array2<f64>, target: &Array1<f64>, label: &str) {
    let (_, cache) = net.forward(seq).unwrap();
    let analytic = net.backward_flat(seq, target.view(), &cache).unwrap();
    let numeric = central_difference(net, seq, target);
    for info in net.layout() {
        for k in info.offset..info.offset + info.len {
            let a = analytic[k];
            let n = numeric[k];
            let tol = ABS_FLOOR.max(REL_TOL * a.abs().max(n.abs()));
            assert!(
                (a - n).abs() <= tol,
                "{label} {}[{}]: analytic {a} vs numeric {n}",
                info.name,
                k - info.offset
            );
        }
    }
}

#[test]
fn lstm_gradients_match_finite_differences() {
    let dims = Dims {
        input: 3,
        hidden: 4,
        output: 2,
        layers: 1,
    };
    for seed in 0..3 {
        let (net, seq, target) = random_instance(seed, dims, 5, CellKind::Lstm);
        assert_gradients_match(&net, &seq, &target, "lstm");
    }
}

#[test]
fn stacked_lstm_gradients_match_finite_differences() {
    let dims = Dims {
        input: 3,
        hidden: 4,
        output: 2,
        layers: 2,
    };
    let (net, seq, target) = random_instance(11, dims, 4, CellKind::Lstm);
    assert_gradients_match(&net, &seq, &target, "lstm-2layer");
}

#[test]
fn rnn_gradients_match_finite_differences() {
    let dims = Dims {
        input: 3,
        hidden: 4,
        output: 2,
        layers: 1,
    };
    for seed in 20..22 {
        let (net, seq, target) = random_instance(seed, dims, 5, CellKind::Rnn);
        assert_gradients_match(&net, &seq, &target, "rnn");
    }
}

#[test]
fn gru_gradients_match_finite_differences() {
    let dims = Dims {
        input: 3,
        hidden: 4,
        output: 2,
        layers: 1,
    };
    for seed in 30..32 {
        let (net, seq, target) = random_instance(seed, dims, 5, CellKind::Gru);
        assert_gradients_match(&net, &seq, &target, "gru");
    }
}

#[test]
fn stacked_gru_gradients_match_finite_differences() {
    let dims = Dims {
        input: 2,
        hidden: 3,
        output: 2,
        layers: 2,
    };
    let (net, seq, target) = random_instance(44, dims, 3, CellKind::Gru);
    assert_gradients_match(&net, &seq, &target, "gru-2layer");
}
