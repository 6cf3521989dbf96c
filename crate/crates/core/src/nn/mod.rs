//! Minimal recurrent network kernel.
//!
//! Three cell types (LSTM, plain tanh RNN, GRU) share the same shape: a
//! stack of recurrent layers unrolled over the input sequence, a linear
//! head on the final hidden state, RMSE loss, exact reverse-mode gradients
//! and an Adam update loop. Everything is f64 and deterministic under a
//! fixed seed.

mod adam;
mod gru;
mod loss;
mod lstm;
mod math;
mod network;
mod rnn;
mod serialize;
mod train;

pub use adam::{adam_step, adam_step_lstm, AdamState};
pub use gru::{gru_cell_forward, GruGates, GruParams};
pub use loss::loss_rmse;
pub use lstm::{
    backward, lstm_cell_forward, sequence_forward, GateCache, GradientSet, LstmGates, LstmParams,
    LstmState, SequenceCache,
};
pub use network::{CellKind, Dims, Network, NetworkCache, TensorClass, TensorInfo};
pub use rnn::{rnn_cell_forward, RnnGates, RnnParams};
pub use serialize::{load_network, save_network};
pub use train::{train, TrainConfig};
