//! Network-weight fitness: validation RMSE after a short Adam probe.

use super::{optimize, PsoOutcome, SwarmConfig};
use crate::data::WindowSet;
use crate::nn::{loss_rmse, train, Network, TensorClass, TrainConfig};
use crate::{Error, Result};

/// Which tensor classes the swarm controls; everything else keeps its
/// seeded initialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TargetMask {
    pub input_weights: bool,
    pub recurrent_weights: bool,
    pub gate_biases: bool,
    pub output_head: bool,
}

impl Default for TargetMask {
    /// Input-side matrices plus the output head.
    fn default() -> Self {
        Self {
            input_weights: true,
            recurrent_weights: false,
            gate_biases: false,
            output_head: true,
        }
    }
}

impl TargetMask {
    pub fn includes(&self, class: TensorClass) -> bool {
        match class {
            TensorClass::Input => self.input_weights,
            TensorClass::Recurrent => self.recurrent_weights,
            TensorClass::GateBias => self.gate_biases,
            TensorClass::Head => self.output_head,
        }
    }

    /// `(offset, len)` runs of the flattened vector under swarm control.
    pub fn spans(&self, net: &Network) -> Vec<(usize, usize)> {
        net.layout()
            .iter()
            .filter(|t| self.includes(t.class))
            .map(|t| (t.offset, t.len))
            .collect()
    }

    /// Swarm search dimension for `net`.
    pub fn dim(&self, net: &Network) -> usize {
        self.spans(net).iter().map(|(_, len)| len).sum()
    }
}

/// Everything a fitness evaluation needs.
///
/// Fitness of a position: overlay it onto the template network's masked
/// tensors, run `probe_epochs` of Adam on the probe-training windows, then
/// score mean RMSE on the held-out validation windows. The probe seed is
/// fixed, so fitness is a pure function of the position.
#[derive(Debug, Clone)]
pub struct FitnessSpec<'a> {
    pub train_windows: &'a WindowSet,
    pub eval_windows: &'a WindowSet,
    pub probe_epochs: usize,
    pub base: TrainConfig,
    pub target_mask: TargetMask,
    /// Seeded starting network the positions are overlaid onto.
    pub template: &'a Network,
}

/// Applies a masked position onto a copy of the template.
pub(crate) fn overlay_position(
    template: &Network,
    mask: &TargetMask,
    position: &[f64],
) -> Result<Network> {
    let spans = mask.spans(template);
    let expected: usize = spans.iter().map(|(_, len)| len).sum();
    if expected != position.len() {
        return Err(Error::ShapeMismatch(format!(
            "position length {} vs masked tensor size {expected}",
            position.len()
        )));
    }
    let mut flat = template.flatten();
    let mut cursor = 0;
    for (offset, len) in spans {
        flat[offset..offset + len].copy_from_slice(&position[cursor..cursor + len]);
        cursor += len;
    }
    let mut net = template.clone();
    net.load_flat(&flat)?;
    Ok(net)
}

/// Mean RMSE of `net` over a window set.
fn validation_loss(net: &Network, windows: &WindowSet) -> Result<f64> {
    if windows.is_empty() {
        return Err(Error::EmptyWindowSet);
    }
    let mut sum = 0.0;
    for (seq, target) in windows.inputs.iter().zip(&windows.targets) {
        let pred = net.predict(seq)?;
        sum += loss_rmse(pred.view(), target.view())?;
    }
    Ok(sum / windows.len() as f64)
}

/// Fitness of one swarm position (see [`FitnessSpec`]).
pub fn network_fitness(spec: &FitnessSpec<'_>, position: &[f64]) -> Result<f64> {
    let candidate = overlay_position(spec.template, &spec.target_mask, position)?;
    let probe_cfg = TrainConfig {
        epochs: spec.probe_epochs,
        ..spec.base.clone()
    };
    let (probed, _) = train(spec.train_windows, &probe_cfg, candidate)?;
    validation_loss(&probed, spec.eval_windows)
}

/// Runs the swarm over the masked weights of `spec.template`.
pub fn optimize_network(spec: &FitnessSpec<'_>, cfg: &SwarmConfig) -> Result<PsoOutcome> {
    let dim = spec.target_mask.dim(spec.template);
    optimize(|position| network_fitness(spec, position), dim, cfg)
}

/// Overlays a finished search's best position onto the template.
pub fn apply_best_position(
    template: &Network,
    mask: &TargetMask,
    outcome: &PsoOutcome,
) -> Result<Network> {
    overlay_position(template, mask, &outcome.best_position)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{build_windows, LoadMatrix};
    use crate::nn::{CellKind, Dims};

    fn windows() -> WindowSet {
        let values: Vec<f64> = (0..10 * 24)
            .map(|i| 0.5 + 0.3 * ((i % 24) as f64 / 24.0 * std::f64::consts::TAU).sin())
            .collect();
        build_windows(&LoadMatrix::from_values(&values).unwrap(), 2).unwrap()
    }

    fn template(w: &WindowSet) -> Network {
        Network::init(
            CellKind::Lstm,
            Dims {
                input: w.input_dim(),
                hidden: 4,
                output: 24,
                layers: 1,
            },
            3,
        )
    }

    #[test]
    fn default_mask_covers_input_and_head() {
        let w = windows();
        let net = template(&w);
        let mask = TargetMask::default();
        // 4 input matrices (4·24 each) + head (24·4 + 24).
        assert_eq!(mask.dim(&net), 4 * 4 * 24 + 24 * 4 + 24);
        for info in net.layout() {
            let included = mask.includes(info.class);
            let should = matches!(info.class, TensorClass::Input | TensorClass::Head);
            assert_eq!(included, should, "{}", info.name);
        }
    }

    #[test]
    fn overlay_touches_only_masked_spans() {
        let w = windows();
        let net = template(&w);
        let mask = TargetMask::default();
        let position = vec![0.123; mask.dim(&net)];
        let overlaid = overlay_position(&net, &mask, &position).unwrap();
        let before = net.flatten();
        let after = overlaid.flatten();
        let spans = mask.spans(&net);
        for (i, (a, b)) in before.iter().zip(&after).enumerate() {
            let masked = spans.iter().any(|&(off, len)| i >= off && i < off + len);
            if masked {
                assert_eq!(*b, 0.123);
            } else {
                assert_eq!(a, b, "unmasked coordinate {i} changed");
            }
        }
    }

    #[test]
    fn zero_probe_epochs_scores_the_raw_init() {
        let w = windows();
        let (train_w, eval_w) = w.split_validation(0.2);
        let net = template(&w);
        let mask = TargetMask::default();
        let spec = FitnessSpec {
            train_windows: &train_w,
            eval_windows: &eval_w,
            probe_epochs: 0,
            base: TrainConfig {
                epochs: 0,
                seed: 9,
                hidden_dim: 4,
                ..TrainConfig::default()
            },
            target_mask: mask,
            template: &net,
        };
        let position = net
            .flatten()
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                mask.spans(&net)
                    .iter()
                    .any(|&(off, len)| *i >= off && *i < off + len)
            })
            .map(|(_, v)| *v)
            .collect::<Vec<_>>();
        // With the template's own coordinates the fitness must equal the
        // untrained validation loss.
        let fit = network_fitness(&spec, &position).unwrap();
        let direct = validation_loss(&net, &eval_w).unwrap();
        assert_eq!(fit, direct);
    }

    #[test]
    fn optimize_network_runs_and_is_deterministic() {
        let w = windows();
        let (train_w, eval_w) = w.split_validation(0.2);
        let net = template(&w);
        let spec = FitnessSpec {
            train_windows: &train_w,
            eval_windows: &eval_w,
            probe_epochs: 1,
            base: TrainConfig {
                hidden_dim: 4,
                batch_size: 8,
                seed: 9,
                ..TrainConfig::default()
            },
            target_mask: TargetMask::default(),
            template: &net,
        };
        let cfg = SwarmConfig {
            particles: 3,
            iterations: 2,
            seed: 21,
            ..SwarmConfig::default()
        };
        let a = optimize_network(&spec, &cfg).unwrap();
        let b = optimize_network(&spec, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.best_fitness.is_finite());
        // The best found position cannot be worse than the first evaluation.
        assert!(a.best_fitness <= a.trace[0].fitness);
    }
}
