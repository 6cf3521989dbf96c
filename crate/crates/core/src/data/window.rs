use ndarray::{Array1, Array2};

use super::LoadMatrix;
use crate::{Error, Result};

/// Supervised N-days-to-one-day samples.
///
/// Sample `k` pairs the stacked days `k..k+N` (one sequence step per day,
/// 24 values each) with day `k+N` as the target.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSet {
    pub n_days: usize,
    /// Each input is an `(n_days, 24)` step-major array.
    pub inputs: Vec<Array2<f64>>,
    /// Each target is the following day's 24 values.
    pub targets: Vec<Array1<f64>>,
}

impl WindowSet {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Input width of each sequence step.
    pub fn input_dim(&self) -> usize {
        self.inputs.first().map_or(24, |a| a.ncols())
    }

    /// Sequence length of each sample.
    pub fn steps(&self) -> usize {
        self.inputs.first().map_or(self.n_days, |a| a.nrows())
    }

    /// Reshapes day-vector samples `(N, 24)` into hour-scalar samples
    /// `(N·24, 1)` for hour-level unrolling.
    pub fn into_hourly(self) -> Self {
        let inputs = self
            .inputs
            .into_iter()
            .map(|a| {
                let steps = a.nrows() * a.ncols();
                a.into_shape_with_order((steps, 1))
                    .expect("row-major reshape cannot fail")
            })
            .collect();
        Self {
            n_days: self.n_days,
            inputs,
            targets: self.targets,
        }
    }

    /// Splits off the trailing `fraction` of samples (at least one, at most
    /// all but one) as a validation slice. A single-sample set is reused as
    /// both halves.
    pub fn split_validation(&self, fraction: f64) -> (Self, Self) {
        let n = self.len();
        if n <= 1 {
            return (self.clone(), self.clone());
        }
        let n_val = ((n as f64 * fraction).round() as usize).clamp(1, n - 1);
        let cut = n - n_val;
        let head = Self {
            n_days: self.n_days,
            inputs: self.inputs[..cut].to_vec(),
            targets: self.targets[..cut].to_vec(),
        };
        let tail = Self {
            n_days: self.n_days,
            inputs: self.inputs[cut..].to_vec(),
            targets: self.targets[cut..].to_vec(),
        };
        (head, tail)
    }
}

/// Slides an N-day window over the matrix.
///
/// A matrix of `D` days yields `D − N` samples; requires `D > N`.
pub fn build_windows(matrix: &LoadMatrix, n_days: usize) -> Result<WindowSet> {
    if n_days == 0 {
        return Err(Error::InvalidConfig("window length N must be ≥ 1".into()));
    }
    let days = matrix.days();
    if days <= n_days {
        return Err(Error::TooFewDays {
            needed: n_days + 1,
            got: days,
        });
    }
    let mut inputs = Vec::with_capacity(days - n_days);
    let mut targets = Vec::with_capacity(days - n_days);
    for k in 0..days - n_days {
        let mut input = Array2::zeros((n_days, 24));
        for step in 0..n_days {
            input.row_mut(step).assign(&matrix.day(k + step));
        }
        inputs.push(input);
        targets.push(matrix.day(k + n_days).to_owned());
    }
    Ok(WindowSet {
        n_days,
        inputs,
        targets,
    })
}
