use ndarray::{Array1, Array2, ArrayView1};

use super::math::{add_matvec_t, add_outer, matvec_t, sigmoid};
use super::network::Dims;
use crate::{Error, Result};

/// Weights of one GRU layer: update gate `z`, reset gate `r`, candidate `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GruGates {
    pub w_xz: Array2<f64>,
    pub w_xr: Array2<f64>,
    pub w_xn: Array2<f64>,
    pub w_hz: Array2<f64>,
    pub w_hr: Array2<f64>,
    pub w_hn: Array2<f64>,
    pub bias_z: Array1<f64>,
    pub bias_r: Array1<f64>,
    pub bias_n: Array1<f64>,
}

impl GruGates {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        Self {
            w_xz: Array2::zeros((hidden, input)),
            w_xr: Array2::zeros((hidden, input)),
            w_xn: Array2::zeros((hidden, input)),
            w_hz: Array2::zeros((hidden, hidden)),
            w_hr: Array2::zeros((hidden, hidden)),
            w_hn: Array2::zeros((hidden, hidden)),
            bias_z: Array1::zeros(hidden),
            bias_r: Array1::zeros(hidden),
            bias_n: Array1::zeros(hidden),
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.w_xz.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.w_xz.ncols()
    }
}

/// Layered GRU with a linear output head.
#[derive(Debug, Clone, PartialEq)]
pub struct GruParams {
    pub layers: Vec<GruGates>,
    pub w_out: Array2<f64>,
    pub bias_out: Array1<f64>,
}

impl GruParams {
    pub fn zeros(dims: Dims) -> Self {
        let layers = (0..dims.layers)
            .map(|l| GruGates::zeros(if l == 0 { dims.input } else { dims.hidden }, dims.hidden))
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
pub struct GruCache {
    pub x: Array1<f64>,
    pub h_prev: Array1<f64>,
    pub z: Array1<f64>,
    pub r: Array1<f64>,
    pub n: Array1<f64>,
    /// r ∘ h_prev, the recurrent input of the candidate gate.
    pub rh: Array1<f64>,
}

/// Standard GRU step:
/// z = σ(W_xz·x + W_hz·h + b_z), r = σ(W_xr·x + W_hr·h + b_r),
/// n = tanh(W_xn·x + W_hn·(r∘h) + b_n), h' = (1−z)∘h + z∘n.
///
/// An update gate forced to zero leaves the state untouched.
pub fn gru_cell_forward(
    x: ArrayView1<'_, f64>,
    prev_h: &Array1<f64>,
    gates: &GruGates,
) -> Result<(Array1<f64>, GruCache)> {
    if x.len() != gates.input_dim() || prev_h.len() != gates.hidden_dim() {
        return Err(Error::ShapeMismatch(format!(
            "cell expects input {} / hidden {}, got {} / {}",
            gates.input_dim(),
            gates.hidden_dim(),
            x.len(),
            prev_h.len()
        )));
    }
    let z = (gates.w_xz.dot(&x) + gates.w_hz.dot(prev_h) + &gates.bias_z).mapv(sigmoid);
    let r = (gates.w_xr.dot(&x) + gates.w_hr.dot(prev_h) + &gates.bias_r).mapv(sigmoid);
    let rh = &r * prev_h;
    let n = (gates.w_xn.dot(&x) + gates.w_hn.dot(&rh) + &gates.bias_n).mapv(f64::tanh);
    let h = (1.0 - &z) * prev_h + &z * &n;
    let cache = GruCache {
        x: x.to_owned(),
        h_prev: prev_h.clone(),
        z,
        r,
        n,
        rh,
    };
    Ok((h, cache))
}

pub(crate) fn gru_layer_backward(
    gates: &GruGates,
    caches: &[GruCache],
    dh_external: &[Array1<f64>],
    grads: &mut GruGates,
) -> Vec<Array1<f64>> {
    let steps = caches.len();
    let mut dx = vec![Array1::zeros(gates.input_dim()); steps];
    let mut dh_rec = Array1::<f64>::zeros(gates.hidden_dim());
    for t in (0..steps).rev() {
        let cache = &caches[t];
        let dh = &dh_external[t] + &dh_rec;

        let dz = &dh * &(&cache.n - &cache.h_prev);
        let dn = &dh * &cache.z;
        let mut dh_prev = &dh * &(1.0 - &cache.z);

        let da_n = &dn * &cache.n.mapv(|v| 1.0 - v * v);
        add_outer(&mut grads.w_xn, &da_n, cache.x.view());
        add_outer(&mut grads.w_hn, &da_n, cache.rh.view());
        grads.bias_n += &da_n;
        let d_rh = matvec_t(&gates.w_hn, &da_n);
        let dr = &d_rh * &cache.h_prev;
        dh_prev += &(&d_rh * &cache.r);

        let da_r = &dr * &cache.r * &(1.0 - &cache.r);
        add_outer(&mut grads.w_xr, &da_r, cache.x.view());
        add_outer(&mut grads.w_hr, &da_r, cache.h_prev.view());
        grads.bias_r += &da_r;
        add_matvec_t(&mut dh_prev, &gates.w_hr, &da_r);

        let da_z = &dz * &cache.z * &(1.0 - &cache.z);
        add_outer(&mut grads.w_xz, &da_z, cache.x.view());
        add_outer(&mut grads.w_hz, &da_z, cache.h_prev.view());
        grads.bias_z += &da_z;
        add_matvec_t(&mut dh_prev, &gates.w_hz, &da_z);

        let mut dxt = matvec_t(&gates.w_xn, &da_n);
        add_matvec_t(&mut dxt, &gates.w_xr, &da_r);
        add_matvec_t(&mut dxt, &gates.w_xz, &da_z);
        dx[t] = dxt;
        dh_rec = dh_prev;
    }
    dx
}
