use super::lstm::{GradientSet, LstmParams};
use super::network::{flatten_lstm_grads, Network};
use crate::{Error, Result};

/// Adam optimizer state over a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub alpha: f64,
    pub epsilon: f64,
}

impl AdamState {
    /// Fresh state with the customary decay rates β₁ = 0.9, β₂ = 0.999 and
    /// ε = 1e-8.
    pub fn new(dim: usize, alpha: f64) -> Self {
        Self {
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            alpha,
            epsilon: 1e-8,
        }
    }
}

/// One Adam update:
/// t ← t+1; m ← β₁m + (1−β₁)g; v ← β₂v + (1−β₂)g²;
/// θ ← θ − α·m̂/(√v̂ + ε) with the bias-corrected moments.
///
/// A non-finite gradient leaves parameters and state untouched and is
/// reported as an error.
pub fn adam_step(params: &mut [f64], grads: &[f64], state: &mut AdamState) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(Error::ShapeMismatch(format!(
            "params {} / grads {} / state {}",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    if let Some(idx) = grads.iter().position(|g| !g.is_finite()) {
        return Err(Error::NonFiniteGradient {
            tensor: format!("flat index {idx}"),
        });
    }

    state.t += 1;
    let bc1 = 1.0 - state.beta1.powi(state.t as i32);
    let bc2 = 1.0 - state.beta2.powi(state.t as i32);
    for i in 0..params.len() {
        let g = grads[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        params[i] -= state.alpha * m_hat / (v_hat.sqrt() + state.epsilon);
    }
    Ok(())
}

/// [`adam_step`] over an LSTM's typed parameter and gradient tensors.
pub fn adam_step_lstm(
    params: &mut LstmParams,
    grads: &GradientSet,
    state: &mut AdamState,
) -> Result<()> {
    let mut net = Network::Lstm(params.clone());
    let mut flat = net.flatten();
    let grads_flat = flatten_lstm_grads(grads);
    adam_step(&mut flat, &grads_flat, state)?;
    net.load_flat(&flat)?;
    match net {
        Network::Lstm(p) => *params = p,
        _ => unreachable!(),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_roughly_alpha() {
        for g in [1e-3, 0.5, -2.0, 10.0, -1e3] {
            let mut state = AdamState::new(1, 0.1);
            let mut theta = vec![3.0];
            adam_step(&mut theta, &[g], &mut state).unwrap();
            let moved = (theta[0] - 3.0).abs();
            assert!(
                (moved - 0.1).abs() < 0.001,
                "gradient {g}: moved {moved}, want ≈ alpha"
            );
            assert_eq!((theta[0] - 3.0).signum(), -g.signum());
        }
    }

    #[test]
    fn zero_gradients_leave_parameters_unchanged() {
        let mut state = AdamState::new(3, 0.1);
        let mut theta = vec![1.0, -2.0, 0.5];
        for _ in 0..50 {
            adam_step(&mut theta, &[0.0, 0.0, 0.0], &mut state).unwrap();
        }
        assert_eq!(theta, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn quadratic_objective_converges() {
        // θ² from θ₀ = 5: the recurrence itself is the oracle; record the
        // first step count where |θ| < 1e-2 and pin the 400-step bound.
        let mut state = AdamState::new(1, 0.1);
        let mut theta = vec![5.0];
        let mut converged_at = None;
        for step in 1..=400 {
            let g = 2.0 * theta[0];
            adam_step(&mut theta, &[g], &mut state).unwrap();
            if theta[0].abs() < 1e-2 {
                converged_at = Some(step);
                break;
            }
        }
        let steps = converged_at.expect("|θ| should drop below 1e-2 within 400 steps");
        assert!(steps < 400, "took {steps} steps");
    }

    #[test]
    fn non_finite_gradient_skips_the_step() {
        let mut state = AdamState::new(2, 0.1);
        let mut theta = vec![1.0, 2.0];
        let before = (theta.clone(), state.clone());
        let err = adam_step(&mut theta, &[0.1, f64::NAN], &mut state);
        assert!(matches!(err, Err(Error::NonFiniteGradient { .. })));
        assert_eq!((theta, state), before);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let mut state = AdamState::new(2, 0.1);
        let mut theta = vec![1.0];
        assert!(adam_step(&mut theta, &[0.1, 0.2], &mut state).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // Empirical step-size bound: each coordinate moves at most 3α.
            #[test]
            fn update_magnitude_is_bounded(
                grads in proptest::collection::vec(
                    proptest::collection::vec(-100.0f64..100.0, 4..=4),
                    1..40,
                ),
            ) {
                let mut state = AdamState::new(4, 0.05);
                let mut theta = vec![0.0; 4];
                for g in &grads {
                    let before = theta.clone();
                    adam_step(&mut theta, g, &mut state).unwrap();
                    for k in 0..4 {
                        prop_assert!((theta[k] - before[k]).abs() <= 3.0 * 0.05 + 1e-12);
                    }
                }
            }
        }
    }
}
