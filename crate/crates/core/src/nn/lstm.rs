use ndarray::{Array1, Array2, ArrayView1};

use super::math::{add_matvec_t, add_outer, matvec_t, sigmoid};
use super::network::Dims;
use crate::{Error, Result};

/// Gate weights of one LSTM layer.
///
/// Input-to-gate matrices are `hidden × input`, hidden-to-gate matrices
/// `hidden × hidden`, biases length `hidden`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmGates {
    pub w_xf: Array2<f64>,
    pub w_xi: Array2<f64>,
    pub w_xc: Array2<f64>,
    pub w_xo: Array2<f64>,
    pub w_hf: Array2<f64>,
    pub w_hi: Array2<f64>,
    pub w_hc: Array2<f64>,
    pub w_ho: Array2<f64>,
    pub bias_f: Array1<f64>,
    pub bias_i: Array1<f64>,
    pub bias_c: Array1<f64>,
    pub bias_o: Array1<f64>,
}

impl LstmGates {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        Self {
            w_xf: Array2::zeros((hidden, input)),
            w_xi: Array2::zeros((hidden, input)),
            w_xc: Array2::zeros((hidden, input)),
            w_xo: Array2::zeros((hidden, input)),
            w_hf: Array2::zeros((hidden, hidden)),
            w_hi: Array2::zeros((hidden, hidden)),
            w_hc: Array2::zeros((hidden, hidden)),
            w_ho: Array2::zeros((hidden, hidden)),
            bias_f: Array1::zeros(hidden),
            bias_i: Array1::zeros(hidden),
            bias_c: Array1::zeros(hidden),
            bias_o: Array1::zeros(hidden),
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.w_xf.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.w_xf.ncols()
    }
}

/// Full parameter set of one LSTM model: layered gates plus the linear
/// output head applied to the final hidden state.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    pub layers: Vec<LstmGates>,
    /// `output × hidden` projection.
    pub w_out: Array2<f64>,
    pub bias_out: Array1<f64>,
}

impl LstmParams {
    pub fn zeros(dims: Dims) -> Self {
        let layers = (0..dims.layers)
            .map(|l| LstmGates::zeros(if l == 0 { dims.input } else { dims.hidden }, dims.hidden))
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

/// Hidden and cell state of one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub h: Array1<f64>,
    pub c: Array1<f64>,
}

impl LstmState {
    pub fn zeros(hidden: usize) -> Self {
        Self {
            h: Array1::zeros(hidden),
            c: Array1::zeros(hidden),
        }
    }
}

/// Everything the backward pass needs from one cell step.
#[derive(Debug, Clone)]
pub struct GateCache {
    pub x: Array1<f64>,
    pub h_prev: Array1<f64>,
    pub c_prev: Array1<f64>,
    pub f: Array1<f64>,
    pub i: Array1<f64>,
    /// Candidate state c̃ (tanh gate).
    pub g: Array1<f64>,
    pub o: Array1<f64>,
    pub c: Array1<f64>,
    pub tanh_c: Array1<f64>,
}

/// One LSTM step:
/// f/i/o = σ(W_x·x + W_h·h + b), c̃ = tanh(·),
/// C = f∘C_prev + i∘c̃, h = o∘tanh(C).
pub fn lstm_cell_forward(
    x: ArrayView1<'_, f64>,
    prev: &LstmState,
    gates: &LstmGates,
) -> Result<(LstmState, GateCache)> {
    if x.len() != gates.input_dim() || prev.h.len() != gates.hidden_dim() {
        return Err(Error::ShapeMismatch(format!(
            "cell expects input {} / hidden {}, got {} / {}",
            gates.input_dim(),
            gates.hidden_dim(),
            x.len(),
            prev.h.len()
        )));
    }
    let pre = |w_x: &Array2<f64>, w_h: &Array2<f64>, b: &Array1<f64>| {
        w_x.dot(&x) + w_h.dot(&prev.h) + b
    };
    let f = pre(&gates.w_xf, &gates.w_hf, &gates.bias_f).mapv(sigmoid);
    let i = pre(&gates.w_xi, &gates.w_hi, &gates.bias_i).mapv(sigmoid);
    let g = pre(&gates.w_xc, &gates.w_hc, &gates.bias_c).mapv(f64::tanh);
    let o = pre(&gates.w_xo, &gates.w_ho, &gates.bias_o).mapv(sigmoid);
    let c = &f * &prev.c + &i * &g;
    let tanh_c = c.mapv(f64::tanh);
    let h = &o * &tanh_c;

    let cache = GateCache {
        x: x.to_owned(),
        h_prev: prev.h.clone(),
        c_prev: prev.c.clone(),
        f,
        i,
        g,
        o,
        c: c.clone(),
        tanh_c,
    };
    Ok((LstmState { h, c }, cache))
}

/// Forward state of a whole sequence pass.
#[derive(Debug, Clone)]
pub struct SequenceCache {
    /// `[layer][step]` cell caches.
    pub steps: Vec<Vec<GateCache>>,
    pub prediction: Array1<f64>,
}

impl SequenceCache {
    fn final_hidden(&self) -> Array1<f64> {
        let top = self.steps.last().expect("at least one layer");
        let last = top.last().expect("at least one step");
        &last.o * &last.tanh_c
    }
}

/// Runs the layer stack over `seq` (step-major, `steps × input`) from zero
/// initial state and applies the output head to the final hidden state.
pub fn sequence_forward(
    seq: &Array2<f64>,
    params: &LstmParams,
) -> Result<(Array1<f64>, SequenceCache)> {
    let dims = params.dims();
    if seq.nrows() == 0 {
        return Err(Error::ShapeMismatch("empty input sequence".into()));
    }
    if seq.ncols() != dims.input {
        return Err(Error::ShapeMismatch(format!(
            "sequence step width {} vs input_dim {}",
            seq.ncols(),
            dims.input
        )));
    }

    let steps = seq.nrows();
    let mut caches: Vec<Vec<GateCache>> = Vec::with_capacity(dims.layers);
    let mut layer_input = seq.clone();
    for gates in &params.layers {
        let mut state = LstmState::zeros(dims.hidden);
        let mut layer_caches = Vec::with_capacity(steps);
        let mut next_input = Array2::zeros((steps, dims.hidden));
        for t in 0..steps {
            let (new_state, cache) = lstm_cell_forward(layer_input.row(t), &state, gates)?;
            next_input.row_mut(t).assign(&new_state.h);
            layer_caches.push(cache);
            state = new_state;
        }
        caches.push(layer_caches);
        layer_input = next_input;
    }

    let final_h = layer_input.row(steps - 1);
    let prediction = params.w_out.dot(&final_h) + &params.bias_out;
    Ok((
        prediction.clone(),
        SequenceCache {
            steps: caches,
            prediction,
        },
    ))
}

/// Gradient of every tensor in [`LstmParams`], same shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    pub layers: Vec<LstmGates>,
    pub w_out: Array2<f64>,
    pub bias_out: Array1<f64>,
}

impl GradientSet {
    pub fn zeros_like(params: &LstmParams) -> Self {
        Self {
            layers: params
                .layers
                .iter()
                .map(|g| LstmGates::zeros(g.input_dim(), g.hidden_dim()))
                .collect(),
            w_out: Array2::zeros(params.w_out.raw_dim()),
            bias_out: Array1::zeros(params.bias_out.raw_dim()),
        }
    }
}

/// BPTT through one layer. `dh_external[t]` carries loss gradient injected
/// at step `t` from above (head or upper layer); returns per-step input
/// gradients for the layer below.
pub(crate) fn lstm_layer_backward(
    gates: &LstmGates,
    caches: &[GateCache],
    dh_external: &[Array1<f64>],
    grads: &mut LstmGates,
) -> Vec<Array1<f64>> {
    let hidden = gates.hidden_dim();
    let input = gates.input_dim();
    let steps = caches.len();
    let mut dx = vec![Array1::zeros(input); steps];
    let mut dh_rec = Array1::<f64>::zeros(hidden);
    let mut dc = Array1::<f64>::zeros(hidden);

    for t in (0..steps).rev() {
        let cache = &caches[t];
        let dh = &dh_external[t] + &dh_rec;

        let d_o = &dh * &cache.tanh_c;
        let da_o = &d_o * &cache.o * &(1.0 - &cache.o);
        dc = dc + &dh * &cache.o * cache.tanh_c.mapv(|v| 1.0 - v * v);

        let d_f = &dc * &cache.c_prev;
        let da_f = &d_f * &cache.f * &(1.0 - &cache.f);
        let d_i = &dc * &cache.g;
        let da_i = &d_i * &cache.i * &(1.0 - &cache.i);
        let d_g = &dc * &cache.i;
        let da_c = &d_g * &cache.g.mapv(|v| 1.0 - v * v);

        add_outer(&mut grads.w_xf, &da_f, cache.x.view());
        add_outer(&mut grads.w_xi, &da_i, cache.x.view());
        add_outer(&mut grads.w_xc, &da_c, cache.x.view());
        add_outer(&mut grads.w_xo, &da_o, cache.x.view());
        add_outer(&mut grads.w_hf, &da_f, cache.h_prev.view());
        add_outer(&mut grads.w_hi, &da_i, cache.h_prev.view());
        add_outer(&mut grads.w_hc, &da_c, cache.h_prev.view());
        add_outer(&mut grads.w_ho, &da_o, cache.h_prev.view());
        grads.bias_f += &da_f;
        grads.bias_i += &da_i;
        grads.bias_c += &da_c;
        grads.bias_o += &da_o;

        let mut dxt = matvec_t(&gates.w_xf, &da_f);
        add_matvec_t(&mut dxt, &gates.w_xi, &da_i);
        add_matvec_t(&mut dxt, &gates.w_xc, &da_c);
        add_matvec_t(&mut dxt, &gates.w_xo, &da_o);
        dx[t] = dxt;

        dh_rec = matvec_t(&gates.w_hf, &da_f);
        add_matvec_t(&mut dh_rec, &gates.w_hi, &da_i);
        add_matvec_t(&mut dh_rec, &gates.w_hc, &da_c);
        add_matvec_t(&mut dh_rec, &gates.w_ho, &da_o);

        dc = &dc * &cache.f;
    }
    dx
}

/// Exact RMSE-loss gradients for every parameter tensor via reverse
/// accumulation through all gates and time steps.
///
/// At zero residual the loss gradient is taken as zero (squared-error
/// chain convention for d√u/du at u = 0).
pub fn backward(
    seq: &Array2<f64>,
    target: ArrayView1<'_, f64>,
    params: &LstmParams,
    cache: &SequenceCache,
) -> Result<GradientSet> {
    let dims = params.dims();
    if cache.steps.len() != dims.layers
        || cache.steps[0].len() != seq.nrows()
        || target.len() != dims.output
    {
        return Err(Error::ShapeMismatch(
            "cache does not match sequence/params".into(),
        ));
    }

    let mut grads = GradientSet::zeros_like(params);
    let dy = super::loss::rmse_gradient(&cache.prediction, target);
    let final_h = cache.final_hidden();
    add_outer(&mut grads.w_out, &dy, final_h.view());
    grads.bias_out += &dy;

    let steps = seq.nrows();
    let mut dh_external = vec![Array1::zeros(dims.hidden); steps];
    dh_external[steps - 1] = matvec_t(&params.w_out, &dy);

    for (layer, gates) in params.layers.iter().enumerate().rev() {
        let dx = lstm_layer_backward(gates, &cache.steps[layer], &dh_external, &mut grads.layers[layer]);
        dh_external = dx;
    }
    Ok(grads)
}
