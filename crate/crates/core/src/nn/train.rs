use rand::seq::SliceRandom;

use super::adam::{adam_step, AdamState};
use super::loss::loss_rmse;
use super::network::Network;
use crate::data::WindowSet;
use crate::rng::rng_from_seed;
use crate::{Error, Result};

/// Gradient-training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub hidden_dim: usize,
    pub num_layers: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Optional max-norm gradient clip; off by default.
    pub grad_clip: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden_dim: 10,
            num_layers: 1,
            learning_rate: 0.005,
            batch_size: 64,
            epochs: 200,
            seed: 0,
            grad_clip: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_dim == 0 || self.num_layers == 0 || self.batch_size == 0 {
            return Err(Error::InvalidConfig(
                "hidden_dim, num_layers and batch_size must be ≥ 1".into(),
            ));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "learning_rate must be a positive number, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

/// Mean-of-batch gradient over the given samples.
fn batch_gradient(
    net: &Network,
    windows: &WindowSet,
    batch: &[usize],
) -> Result<(Vec<f64>, f64)> {
    let mut grads = vec![0.0; net.param_count()];
    let mut loss_sum = 0.0;
    for &idx in batch {
        let seq = &windows.inputs[idx];
        let target = windows.targets[idx].view();
        let (pred, cache) = net.forward(seq)?;
        loss_sum += loss_rmse(pred.view(), target)?;
        let sample = net.backward_flat(seq, target, &cache)?;
        for (acc, g) in grads.iter_mut().zip(&sample) {
            *acc += g;
        }
    }
    let scale = 1.0 / batch.len() as f64;
    for g in grads.iter_mut() {
        *g *= scale;
    }
    Ok((grads, loss_sum))
}

fn clip_max_norm(grads: &mut [f64], max_norm: f64) {
    let norm = grads.iter().map(|g| g * g).sum::<f64>().sqrt();
    if norm > max_norm {
        let scale = max_norm / norm;
        for g in grads.iter_mut() {
            *g *= scale;
        }
    }
}

/// Seeded mini-batch Adam training.
///
/// Samples are reshuffled every epoch with the config seed; updates and
/// reductions run sequentially, so the result is bitwise reproducible.
/// Returns the trained network and the per-epoch mean sample loss.
pub fn train(
    windows: &WindowSet,
    cfg: &TrainConfig,
    init: Network,
) -> Result<(Network, Vec<f64>)> {
    cfg.validate()?;
    if windows.is_empty() {
        return Err(Error::EmptyWindowSet);
    }
    let mut net = init;
    if cfg.epochs == 0 {
        return Ok((net, Vec::new()));
    }

    let mut rng = rng_from_seed(cfg.seed);
    let mut order: Vec<usize> = (0..windows.len()).collect();
    let mut state = AdamState::new(net.param_count(), cfg.learning_rate);
    let mut history = Vec::with_capacity(cfg.epochs);

    for _epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let (mut grads, loss_sum) = batch_gradient(&net, windows, batch)?;
            epoch_loss += loss_sum;
            if let Some(max_norm) = cfg.grad_clip {
                clip_max_norm(&mut grads, max_norm);
            }
            let mut flat = net.flatten();
            match adam_step(&mut flat, &grads, &mut state) {
                Ok(()) => net.load_flat(&flat)?,
                Err(e @ Error::NonFiniteGradient { .. }) => {
                    log::warn!("{e}");
                }
                Err(e) => return Err(e),
            }
        }
        history.push(epoch_loss / windows.len() as f64);
    }
    Ok((net, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{build_windows, LoadMatrix};
    use crate::nn::{CellKind, Dims};
    use ndarray::Array1;

    fn toy_windows() -> WindowSet {
        // Noiseless repeating daily shape: constant target per hour.
        let days = 12;
        let values: Vec<f64> = (0..days * 24)
            .map(|i| ((i % 24) as f64 / 23.0).sin() * 0.4 + 0.3)
            .collect();
        let m = LoadMatrix::from_values(&values).unwrap();
        build_windows(&m, 3).unwrap()
    }

    fn small_cfg() -> TrainConfig {
        TrainConfig {
            hidden_dim: 6,
            num_layers: 1,
            learning_rate: 0.01,
            batch_size: 4,
            epochs: 30,
            seed: 5,
            grad_clip: None,
        }
    }

    fn init_net(windows: &WindowSet, cfg: &TrainConfig, kind: CellKind) -> Network {
        Network::init(
            kind,
            Dims {
                input: windows.input_dim(),
                hidden: cfg.hidden_dim,
                output: 24,
                layers: cfg.num_layers,
            },
            77,
        )
    }

    #[test]
    fn zero_epochs_is_a_noop() {
        let windows = toy_windows();
        let cfg = TrainConfig {
            epochs: 0,
            ..small_cfg()
        };
        let init = init_net(&windows, &cfg, CellKind::Lstm);
        let (out, history) = train(&windows, &cfg, init.clone()).unwrap();
        assert_eq!(out, init);
        assert!(history.is_empty());
    }

    #[test]
    fn same_seed_trains_bitwise_identically() {
        let windows = toy_windows();
        let cfg = small_cfg();
        let init = init_net(&windows, &cfg, CellKind::Lstm);
        let (a, ha) = train(&windows, &cfg, init.clone()).unwrap();
        let (b, hb) = train(&windows, &cfg, init).unwrap();
        assert_eq!(a, b);
        assert_eq!(ha, hb);
    }

    #[test]
    fn loss_decreases_on_learnable_task() {
        let windows = toy_windows();
        for kind in [CellKind::Lstm, CellKind::Rnn, CellKind::Gru] {
            let cfg = small_cfg();
            let init = init_net(&windows, &cfg, kind);
            let (_, history) = train(&windows, &cfg, init).unwrap();
            assert!(
                history.last().unwrap() < history.first().unwrap(),
                "{kind:?}: {history:?}"
            );
        }
    }

    #[test]
    fn empty_window_set_is_an_error() {
        let empty = WindowSet {
            n_days: 3,
            inputs: vec![],
            targets: vec![],
        };
        assert!(matches!(
            train(&empty, &small_cfg(), init_net(&toy_windows(), &small_cfg(), CellKind::Lstm)),
            Err(Error::EmptyWindowSet)
        ));
    }

    #[test]
    fn short_final_batch_is_consumed() {
        let windows = toy_windows(); // 9 samples
        let cfg = TrainConfig {
            batch_size: 4, // 4 + 4 + 1
            epochs: 2,
            ..small_cfg()
        };
        let init = init_net(&windows, &cfg, CellKind::Lstm);
        let (_, history) = train(&windows, &cfg, init).unwrap();
        assert_eq!(history.len(), 2);
        assert!(history.iter().all(|l| l.is_finite()));
    }

    #[test]
    fn gradient_clip_still_learns() {
        let windows = toy_windows();
        let cfg = TrainConfig {
            grad_clip: Some(0.5),
            ..small_cfg()
        };
        let init = init_net(&windows, &cfg, CellKind::Lstm);
        let (_, history) = train(&windows, &cfg, init).unwrap();
        assert!(history.last().unwrap() < history.first().unwrap());
    }

    #[test]
    fn batch_gradient_is_the_mean_of_sample_gradients() {
        let windows = toy_windows();
        let net = init_net(&windows, &small_cfg(), CellKind::Lstm);
        let (batch, _) = batch_gradient(&net, &windows, &[0, 1]).unwrap();
        let mut mean = vec![0.0; net.param_count()];
        for &idx in &[0usize, 1] {
            let (_, cache) = net.forward(&windows.inputs[idx]).unwrap();
            let g = net
                .backward_flat(&windows.inputs[idx], windows.targets[idx].view(), &cache)
                .unwrap();
            for (m, v) in mean.iter_mut().zip(&g) {
                *m += v / 2.0;
            }
        }
        for (b, m) in batch.iter().zip(&mean) {
            assert!((b - m).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_target_reached_through_bias() {
        // Zero-input windows: only bias_out can lower the loss.
        let windows = WindowSet {
            n_days: 2,
            inputs: vec![ndarray::Array2::zeros((2, 24)); 6],
            targets: vec![Array1::from_elem(24, 0.7); 6],
        };
        let cfg = TrainConfig {
            epochs: 150,
            learning_rate: 0.05,
            ..small_cfg()
        };
        let init = init_net(&windows, &cfg, CellKind::Lstm);
        let (net, history) = train(&windows, &cfg, init).unwrap();
        assert!(history.last().unwrap() < &0.05);
        let pred = net.predict(&windows.inputs[0]).unwrap();
        assert!((pred[0] - 0.7).abs() < 0.1);
    }
}
