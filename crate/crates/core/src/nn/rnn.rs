use ndarray::{Array1, Array2, ArrayView1};

use super::math::{add_outer, matvec_t};
use super::network::Dims;
use crate::{Error, Result};

/// Weights of one tanh RNN layer.
#[derive(Debug, Clone, PartialEq)]
pub struct RnnGates {
    pub w_x: Array2<f64>,
    pub w_h: Array2<f64>,
    pub bias: Array1<f64>,
}

impl RnnGates {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        Self {
            w_x: Array2::zeros((hidden, input)),
            w_h: Array2::zeros((hidden, hidden)),
            bias: Array1::zeros(hidden),
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.w_x.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.w_x.ncols()
    }
}

/// Layered tanh RNN with a linear output head.
#[derive(Debug, Clone, PartialEq)]
pub struct RnnParams {
    pub layers: Vec<RnnGates>,
    pub w_out: Array2<f64>,
    pub bias_out: Array1<f64>,
}

impl RnnParams {
    pub fn zeros(dims: Dims) -> Self {
        let layers = (0..dims.layers)
            .map(|l| RnnGates::zeros(if l == 0 { dims.input } else { dims.hidden }, dims.hidden))
            .collect();
        Self {
            layers,
            w_out: Array2::zeros((dims.output, dims.hidden)),
            bias_out: Array1::zeros(dims.output),
        }
    }

    pub fn dims(&self) -> Dims {
        Dims {
            input: self.layers[0].input_dim(),
            hidden: self.layers[0].hidden_dim(),
            output: self.w_out.nrows(),
            layers: self.layers.len(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RnnCache {
    pub x: Array1<f64>,
    pub h_prev: Array1<f64>,
    pub h: Array1<f64>,
}

/// h = tanh(W_x·x + W_h·h_prev + b)
pub fn rnn_cell_forward(
    x: ArrayView1<'_, f64>,
    prev_h: &Array1<f64>,
    gates: &RnnGates,
) -> Result<(Array1<f64>, RnnCache)> {
    if x.len() != gates.input_dim() || prev_h.len() != gates.hidden_dim() {
        return Err(Error::ShapeMismatch(format!(
            "cell expects input {} / hidden {}, got {} / {}",
            gates.input_dim(),
            gates.hidden_dim(),
            x.len(),
            prev_h.len()
        )));
    }
    let h = (gates.w_x.dot(&x) + gates.w_h.dot(prev_h) + &gates.bias).mapv(f64::tanh);
    let cache = RnnCache {
        x: x.to_owned(),
        h_prev: prev_h.clone(),
        h: h.clone(),
    };
    Ok((h, cache))
}

pub(crate) fn rnn_layer_backward(
    gates: &RnnGates,
    caches: &[RnnCache],
    dh_external: &[Array1<f64>],
    grads: &mut RnnGates,
) -> Vec<Array1<f64>> {
    let steps = caches.len();
    let mut dx = vec![Array1::zeros(gates.input_dim()); steps];
    let mut dh_rec = Array1::<f64>::zeros(gates.hidden_dim());
    for t in (0..steps).rev() {
        let cache = &caches[t];
        let dh = &dh_external[t] + &dh_rec;
        let da = &dh * &cache.h.mapv(|v| 1.0 - v * v);
        add_outer(&mut grads.w_x, &da, cache.x.view());
        add_outer(&mut grads.w_h, &da, cache.h_prev.view());
        grads.bias += &da;
        dx[t] = matvec_t(&gates.w_x, &da);
        dh_rec = matvec_t(&gates.w_h, &da);
    }
    dx
}
