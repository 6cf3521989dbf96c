//! Day-ahead electrical load forecasting from hourly history.
//!
//! The forecasting pipeline cleans raw hourly load data, decomposes it into
//! quasi-stationary oscillatory components by empirical mode decomposition,
//! trains one small recurrent network per component (optionally seeding the
//! input/output weights with a particle swarm search), and sums the
//! renormalized per-component day-ahead predictions into the final 24-hour
//! forecast.
//!
//! Modules:
//! - [`data`]: CSV ingestion, bad-data detection and revision, min-max
//!   normalization, supervised window construction.
//! - [`emd`]: envelope sifting, IMF extraction, component recombination.
//! - [`nn`]: LSTM/RNN/GRU cells, BPTT gradients, Adam, seeded training,
//!   model serialization.
//! - [`pso`]: inertia-weight particle swarm over flattened network weights.
//! - [`pipeline`]: end-to-end fit/forecast orchestration, MAPE evaluation,
//!   method-comparison and sweep experiment harnesses.

pub mod data;
pub mod emd;
mod error;
pub mod nn;
pub mod pipeline;
pub mod pso;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
