use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;

use super::gru::{gru_cell_forward, gru_layer_backward, GruCache, GruGates, GruParams};
use super::loss::rmse_gradient;
use super::lstm::{backward as lstm_backward, sequence_forward, GradientSet, LstmGates, LstmParams, SequenceCache};
use super::math::{add_outer, matvec_t};
use super::rnn::{rnn_cell_forward, rnn_layer_backward, RnnCache, RnnGates, RnnParams};
use crate::rng::rng_from_seed;
use crate::{Error, Result};

/// Shape of a recurrent model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub input: usize,
    pub hidden: usize,
    pub output: usize,
    pub layers: usize,
}

/// Recurrent cell family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Lstm,
    Rnn,
    Gru,
}

impl CellKind {
    pub fn name(self) -> &'static str {
        match self {
            CellKind::Lstm => "lstm",
            CellKind::Rnn => "rnn",
            CellKind::Gru => "gru",
        }
    }
}

/// Role of a tensor inside the model, used to scope swarm optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorClass {
    /// Input-side matrices of the first layer.
    Input,
    /// Hidden-to-hidden matrices and inter-layer input matrices.
    Recurrent,
    /// Gate bias vectors.
    GateBias,
    /// Output projection and its bias.
    Head,
}

/// One tensor's position inside the flattened parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorInfo {
    pub name: String,
    pub class: TensorClass,
    pub offset: usize,
    pub len: usize,
}

/// A trained (or trainable) model of any supported cell kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Network {
    Lstm(LstmParams),
    Rnn(RnnParams),
    Gru(GruParams),
}

/// Forward-pass state kept for the backward pass.
#[derive(Debug, Clone)]
pub enum NetworkCache {
    Lstm(SequenceCache),
    Rnn(RecurrentSeqCache<RnnCache>),
    Gru(RecurrentSeqCache<GruCache>),
}

/// Sequence cache of single-state cells (RNN/GRU).
#[derive(Debug, Clone)]
pub struct RecurrentSeqCache<C> {
    pub steps: Vec<Vec<C>>,
    pub final_h: Array1<f64>,
    pub prediction: Array1<f64>,
}

impl Network {
    pub fn kind(&self) -> CellKind {
        match self {
            Network::Lstm(_) => CellKind::Lstm,
            Network::Rnn(_) => CellKind::Rnn,
            Network::Gru(_) => CellKind::Gru,
        }
    }

    pub fn dims(&self) -> Dims {
        match self {
            Network::Lstm(p) => p.dims(),
            Network::Rnn(p) => p.dims(),
            Network::Gru(p) => p.dims(),
        }
    }

    pub fn zeros(kind: CellKind, dims: Dims) -> Self {
        match kind {
            CellKind::Lstm => Network::Lstm(LstmParams::zeros(dims)),
            CellKind::Rnn => Network::Rnn(RnnParams::zeros(dims)),
            CellKind::Gru => Network::Gru(GruParams::zeros(dims)),
        }
    }

    /// Seeded uniform initialization: every weight drawn from
    /// `[−1/√fan_in, +1/√fan_in]` where fan_in is the tensor's column
    /// count (its own length for bias vectors). Tensors are filled in
    /// canonical flatten order, so the result is reproducible bit for bit.
    pub fn init(kind: CellKind, dims: Dims, seed: u64) -> Self {
        let mut net = Self::zeros(kind, dims);
        let mut rng = rng_from_seed(seed);
        let mut flat = net.flatten();
        let mut pos = 0;
        for info in net.layout() {
            let fan_in = net.tensor_fan_in(&info);
            let bound = 1.0 / (fan_in as f64).sqrt();
            for v in flat[pos..pos + info.len].iter_mut() {
                *v = rng.random_range(-bound..bound);
            }
            pos += info.len;
        }
        net.load_flat(&flat).expect("layout-sized buffer");
        net
    }

    fn tensor_fan_in(&self, info: &TensorInfo) -> usize {
        let dims = self.dims();
        match info.class {
            TensorClass::Input => dims.input,
            // Recurrent and inter-layer matrices consume hidden states.
            TensorClass::Recurrent | TensorClass::GateBias => dims.hidden,
            TensorClass::Head => {
                if info.len == dims.output {
                    dims.output
                } else {
                    dims.hidden
                }
            }
        }
    }

    pub fn param_count(&self) -> usize {
        self.layout().iter().map(|t| t.len).sum()
    }

    /// Tensor order of the flattened vector: per layer the canonical gate
    /// tensors, then the head.
    pub fn layout(&self) -> Vec<TensorInfo> {
        let mut b = LayoutBuilder::default();
        match self {
            Network::Lstm(p) => {
                for (l, g) in p.layers.iter().enumerate() {
                    let input_class = layer_input_class(l);
                    b.mat(format!("layer{l}.w_xf"), input_class, &g.w_xf);
                    b.mat(format!("layer{l}.w_xi"), input_class, &g.w_xi);
                    b.mat(format!("layer{l}.w_xc"), input_class, &g.w_xc);
                    b.mat(format!("layer{l}.w_xo"), input_class, &g.w_xo);
                    b.mat(format!("layer{l}.w_hf"), TensorClass::Recurrent, &g.w_hf);
                    b.mat(format!("layer{l}.w_hi"), TensorClass::Recurrent, &g.w_hi);
                    b.mat(format!("layer{l}.w_hc"), TensorClass::Recurrent, &g.w_hc);
                    b.mat(format!("layer{l}.w_ho"), TensorClass::Recurrent, &g.w_ho);
                    b.vec(format!("layer{l}.bias_f"), TensorClass::GateBias, &g.bias_f);
                    b.vec(format!("layer{l}.bias_i"), TensorClass::GateBias, &g.bias_i);
                    b.vec(format!("layer{l}.bias_c"), TensorClass::GateBias, &g.bias_c);
                    b.vec(format!("layer{l}.bias_o"), TensorClass::GateBias, &g.bias_o);
                }
                b.mat("w_out".into(), TensorClass::Head, &p.w_out);
                b.vec("bias_out".into(), TensorClass::Head, &p.bias_out);
            }
            Network::Rnn(p) => {
                for (l, g) in p.layers.iter().enumerate() {
                    b.mat(format!("layer{l}.w_x"), layer_input_class(l), &g.w_x);
                    b.mat(format!("layer{l}.w_h"), TensorClass::Recurrent, &g.w_h);
                    b.vec(format!("layer{l}.bias"), TensorClass::GateBias, &g.bias);
                }
                b.mat("w_out".into(), TensorClass::Head, &p.w_out);
                b.vec("bias_out".into(), TensorClass::Head, &p.bias_out);
            }
            Network::Gru(p) => {
                for (l, g) in p.layers.iter().enumerate() {
                    let input_class = layer_input_class(l);
                    b.mat(format!("layer{l}.w_xz"), input_class, &g.w_xz);
                    b.mat(format!("layer{l}.w_xr"), input_class, &g.w_xr);
                    b.mat(format!("layer{l}.w_xn"), input_class, &g.w_xn);
                    b.mat(format!("layer{l}.w_hz"), TensorClass::Recurrent, &g.w_hz);
                    b.mat(format!("layer{l}.w_hr"), TensorClass::Recurrent, &g.w_hr);
                    b.mat(format!("layer{l}.w_hn"), TensorClass::Recurrent, &g.w_hn);
                    b.vec(format!("layer{l}.bias_z"), TensorClass::GateBias, &g.bias_z);
                    b.vec(format!("layer{l}.bias_r"), TensorClass::GateBias, &g.bias_r);
                    b.vec(format!("layer{l}.bias_n"), TensorClass::GateBias, &g.bias_n);
                }
                b.mat("w_out".into(), TensorClass::Head, &p.w_out);
                b.vec("bias_out".into(), TensorClass::Head, &p.bias_out);
            }
        }
        b.infos
    }

    /// Row-major concatenation of all tensors in layout order.
    pub fn flatten(&self) -> Vec<f64> {
        match self {
            Network::Lstm(p) => flatten_lstm_parts(&p.layers, &p.w_out, &p.bias_out),
            Network::Rnn(p) => flatten_rnn_parts(&p.layers, &p.w_out, &p.bias_out),
            Network::Gru(p) => flatten_gru_parts(&p.layers, &p.w_out, &p.bias_out),
        }
    }

    /// Inverse of [`Network::flatten`]; the buffer must match exactly.
    pub fn load_flat(&mut self, flat: &[f64]) -> Result<()> {
        let mut r = FlatReader::new(flat);
        match self {
            Network::Lstm(p) => {
                for g in &mut p.layers {
                    for m in [
                        &mut g.w_xf, &mut g.w_xi, &mut g.w_xc, &mut g.w_xo, &mut g.w_hf,
                        &mut g.w_hi, &mut g.w_hc, &mut g.w_ho,
                    ] {
                        r.take_mat(m)?;
                    }
                    for v in [&mut g.bias_f, &mut g.bias_i, &mut g.bias_c, &mut g.bias_o] {
                        r.take_vec(v)?;
                    }
                }
                r.take_mat(&mut p.w_out)?;
                r.take_vec(&mut p.bias_out)?;
            }
            Network::Rnn(p) => {
                for g in &mut p.layers {
                    r.take_mat(&mut g.w_x)?;
                    r.take_mat(&mut g.w_h)?;
                    r.take_vec(&mut g.bias)?;
                }
                r.take_mat(&mut p.w_out)?;
                r.take_vec(&mut p.bias_out)?;
            }
            Network::Gru(p) => {
                for g in &mut p.layers {
                    for m in [
                        &mut g.w_xz, &mut g.w_xr, &mut g.w_xn, &mut g.w_hz, &mut g.w_hr,
                        &mut g.w_hn,
                    ] {
                        r.take_mat(m)?;
                    }
                    for v in [&mut g.bias_z, &mut g.bias_r, &mut g.bias_n] {
                        r.take_vec(v)?;
                    }
                }
                r.take_mat(&mut p.w_out)?;
                r.take_vec(&mut p.bias_out)?;
            }
        }
        r.finish()
    }

    /// Runs the model over a step-major sequence, keeping the cache.
    pub fn forward(&self, seq: &Array2<f64>) -> Result<(Array1<f64>, NetworkCache)> {
        match self {
            Network::Lstm(p) => {
                let (pred, cache) = sequence_forward(seq, p)?;
                Ok((pred, NetworkCache::Lstm(cache)))
            }
            Network::Rnn(p) => {
                let (pred, cache) = rnn_sequence_forward(seq, p)?;
                Ok((pred, NetworkCache::Rnn(cache)))
            }
            Network::Gru(p) => {
                let (pred, cache) = gru_sequence_forward(seq, p)?;
                Ok((pred, NetworkCache::Gru(cache)))
            }
        }
    }

    pub fn predict(&self, seq: &Array2<f64>) -> Result<Array1<f64>> {
        Ok(self.forward(seq)?.0)
    }

    /// RMSE-loss gradient in flatten order.
    pub fn backward_flat(
        &self,
        seq: &Array2<f64>,
        target: ArrayView1<'_, f64>,
        cache: &NetworkCache,
    ) -> Result<Vec<f64>> {
        match (self, cache) {
            (Network::Lstm(p), NetworkCache::Lstm(c)) => {
                let g = lstm_backward(seq, target, p, c)?;
                Ok(flatten_lstm_parts(&g.layers, &g.w_out, &g.bias_out))
            }
            (Network::Rnn(p), NetworkCache::Rnn(c)) => {
                let g = rnn_backward(seq, target, p, c)?;
                Ok(flatten_rnn_parts(&g.layers, &g.w_out, &g.bias_out))
            }
            (Network::Gru(p), NetworkCache::Gru(c)) => {
                let g = gru_backward(seq, target, p, c)?;
                Ok(flatten_gru_parts(&g.layers, &g.w_out, &g.bias_out))
            }
            _ => Err(Error::ShapeMismatch("cache kind does not match model".into())),
        }
    }
}

fn layer_input_class(layer: usize) -> TensorClass {
    if layer == 0 {
        TensorClass::Input
    } else {
        TensorClass::Recurrent
    }
}

/// Flattens the [`GradientSet`] of an LSTM in the same order as its params.
pub(crate) fn flatten_lstm_grads(g: &GradientSet) -> Vec<f64> {
    flatten_lstm_parts(&g.layers, &g.w_out, &g.bias_out)
}

pub(crate) fn flatten_lstm_parts(
    layers: &[LstmGates],
    w_out: &Array2<f64>,
    bias_out: &Array1<f64>,
) -> Vec<f64> {
    let mut out = Vec::new();
    for g in layers {
        for m in [&g.w_xf, &g.w_xi, &g.w_xc, &g.w_xo, &g.w_hf, &g.w_hi, &g.w_hc, &g.w_ho] {
            out.extend(m.iter());
        }
        for v in [&g.bias_f, &g.bias_i, &g.bias_c, &g.bias_o] {
            out.extend(v.iter());
        }
    }
    out.extend(w_out.iter());
    out.extend(bias_out.iter());
    out
}

fn flatten_rnn_parts(layers: &[RnnGates], w_out: &Array2<f64>, bias_out: &Array1<f64>) -> Vec<f64> {
    let mut out = Vec::new();
    for g in layers {
        out.extend(g.w_x.iter());
        out.extend(g.w_h.iter());
        out.extend(g.bias.iter());
    }
    out.extend(w_out.iter());
    out.extend(bias_out.iter());
    out
}

fn flatten_gru_parts(layers: &[GruGates], w_out: &Array2<f64>, bias_out: &Array1<f64>) -> Vec<f64> {
    let mut out = Vec::new();
    for g in layers {
        for m in [&g.w_xz, &g.w_xr, &g.w_xn, &g.w_hz, &g.w_hr, &g.w_hn] {
            out.extend(m.iter());
        }
        for v in [&g.bias_z, &g.bias_r, &g.bias_n] {
            out.extend(v.iter());
        }
    }
    out.extend(w_out.iter());
    out.extend(bias_out.iter());
    out
}

#[derive(Default)]
struct LayoutBuilder {
    infos: Vec<TensorInfo>,
    offset: usize,
}

impl LayoutBuilder {
    fn mat(&mut self, name: String, class: TensorClass, m: &Array2<f64>) {
        self.push(name, class, m.len());
    }
    fn vec(&mut self, name: String, class: TensorClass, v: &Array1<f64>) {
        self.push(name, class, v.len());
    }
    fn push(&mut self, name: String, class: TensorClass, len: usize) {
        self.infos.push(TensorInfo {
            name,
            class,
            offset: self.offset,
            len,
        });
        self.offset += len;
    }
}

struct FlatReader<'a> {
    data: &'a [f64],
    pos: usize,
}

impl<'a> FlatReader<'a> {
    fn new(data: &'a [f64]) -> Self {
        Self { data, pos: 0 }
    }

    fn take(&mut self, len: usize) -> Result<&'a [f64]> {
        if self.pos + len > self.data.len() {
            return Err(Error::ShapeMismatch(format!(
                "flat parameter buffer too short: need {} more at {}",
                len, self.pos
            )));
        }
        let slice = &self.data[self.pos..self.pos + len];
        self.pos += len;
        Ok(slice)
    }

    fn take_mat(&mut self, m: &mut Array2<f64>) -> Result<()> {
        let slice = self.take(m.len())?;
        for (dst, src) in m.iter_mut().zip(slice) {
            *dst = *src;
        }
        Ok(())
    }

    fn take_vec(&mut self, v: &mut Array1<f64>) -> Result<()> {
        let slice = self.take(v.len())?;
        for (dst, src) in v.iter_mut().zip(slice) {
            *dst = *src;
        }
        Ok(())
    }

    fn finish(self) -> Result<()> {
        if self.pos == self.data.len() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "flat parameter buffer has {} unused values",
                self.data.len() - self.pos
            )))
        }
    }
}

fn check_seq(seq: &Array2<f64>, input_dim: usize) -> Result<()> {
    if seq.nrows() == 0 {
        return Err(Error::ShapeMismatch("empty input sequence".into()));
    }
    if seq.ncols() != input_dim {
        return Err(Error::ShapeMismatch(format!(
            "sequence step width {} vs input_dim {}",
            seq.ncols(),
            input_dim
        )));
    }
    Ok(())
}

fn rnn_sequence_forward(
    seq: &Array2<f64>,
    params: &RnnParams,
) -> Result<(Array1<f64>, RecurrentSeqCache<RnnCache>)> {
    let dims = params.dims();
    check_seq(seq, dims.input)?;
    let steps = seq.nrows();
    let mut caches = Vec::with_capacity(dims.layers);
    let mut layer_input = seq.clone();
    for gates in &params.layers {
        let mut h = Array1::zeros(dims.hidden);
        let mut layer_caches = Vec::with_capacity(steps);
        let mut next_input = Array2::zeros((steps, dims.hidden));
        for t in 0..steps {
            let (new_h, cache) = rnn_cell_forward(layer_input.row(t), &h, gates)?;
            next_input.row_mut(t).assign(&new_h);
            layer_caches.push(cache);
            h = new_h;
        }
        caches.push(layer_caches);
        layer_input = next_input;
    }
    let final_h = layer_input.row(steps - 1).to_owned();
    let prediction = params.w_out.dot(&final_h) + &params.bias_out;
    Ok((
        prediction.clone(),
        RecurrentSeqCache {
            steps: caches,
            final_h,
            prediction,
        },
    ))
}

fn gru_sequence_forward(
    seq: &Array2<f64>,
    params: &GruParams,
) -> Result<(Array1<f64>, RecurrentSeqCache<GruCache>)> {
    let dims = params.dims();
    check_seq(seq, dims.input)?;
    let steps = seq.nrows();
    let mut caches = Vec::with_capacity(dims.layers);
    let mut layer_input = seq.clone();
    for gates in &params.layers {
        let mut h = Array1::zeros(dims.hidden);
        let mut layer_caches = Vec::with_capacity(steps);
        let mut next_input = Array2::zeros((steps, dims.hidden));
        for t in 0..steps {
            let (new_h, cache) = gru_cell_forward(layer_input.row(t), &h, gates)?;
            next_input.row_mut(t).assign(&new_h);
            layer_caches.push(cache);
            h = new_h;
        }
        caches.push(layer_caches);
        layer_input = next_input;
    }
    let final_h = layer_input.row(steps - 1).to_owned();
    let prediction = params.w_out.dot(&final_h) + &params.bias_out;
    Ok((
        prediction.clone(),
        RecurrentSeqCache {
            steps: caches,
            final_h,
            prediction,
        },
    ))
}

fn rnn_backward(
    seq: &Array2<f64>,
    target: ArrayView1<'_, f64>,
    params: &RnnParams,
    cache: &RecurrentSeqCache<RnnCache>,
) -> Result<RnnParams> {
    let dims = params.dims();
    if cache.steps.len() != dims.layers || cache.steps[0].len() != seq.nrows() {
        return Err(Error::ShapeMismatch("cache does not match sequence".into()));
    }
    let mut grads = RnnParams::zeros(dims);
    let dy = rmse_gradient(&cache.prediction, target);
    add_outer(&mut grads.w_out, &dy, cache.final_h.view());
    grads.bias_out += &dy;

    let steps = seq.nrows();
    let mut dh_external = vec![Array1::zeros(dims.hidden); steps];
    dh_external[steps - 1] = matvec_t(&params.w_out, &dy);
    for (layer, gates) in params.layers.iter().enumerate().rev() {
        dh_external =
            rnn_layer_backward(gates, &cache.steps[layer], &dh_external, &mut grads.layers[layer]);
    }
    Ok(grads)
}

fn gru_backward(
    seq: &Array2<f64>,
    target: ArrayView1<'_, f64>,
    params: &GruParams,
    cache: &RecurrentSeqCache<GruCache>,
) -> Result<GruParams> {
    let dims = params.dims();
    if cache.steps.len() != dims.layers || cache.steps[0].len() != seq.nrows() {
        return Err(Error::ShapeMismatch("cache does not match sequence".into()));
    }
    let mut grads = GruParams::zeros(dims);
    let dy = rmse_gradient(&cache.prediction, target);
    add_outer(&mut grads.w_out, &dy, cache.final_h.view());
    grads.bias_out += &dy;

    let steps = seq.nrows();
    let mut dh_external = vec![Array1::zeros(dims.hidden); steps];
    dh_external[steps - 1] = matvec_t(&params.w_out, &dy);
    for (layer, gates) in params.layers.iter().enumerate().rev() {
        dh_external =
            gru_layer_backward(gates, &cache.steps[layer], &dh_external, &mut grads.layers[layer]);
    }
    Ok(grads)
}
