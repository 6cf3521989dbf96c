//! End-to-end forecasting pipeline.
//!
//! `fit` cleans the history, optionally decomposes it into frequency
//! parts, and trains one network per part (optionally swarm-seeding the
//! input/output weights). `forecast_day` replays the same preprocessing,
//! feeds each model the last N days of its component and sums the
//! denormalized 24-hour predictions.

mod experiment;

pub use experiment::{
    compare_methods, persistence_baseline, sweep_input_pattern, sweep_mix, write_summary_csv,
    write_table_csv, ExperimentRow, ExperimentTable, MethodOutcome,
};

use crate::data::{
    build_windows, clean_matrix, denormalize, normalize_all, CleaningConfig, LoadMatrix,
    LoadSeries, NormalizationParams, WindowSet,
};
use crate::emd::{decompose, recombine_with_scheme, MixScheme, SiftConfig};
use crate::nn::{train, CellKind, Dims, Network, TrainConfig};
use crate::pso::{optimize_network, FitnessSpec, PsoTraceRow, SwarmConfig, TargetMask};
use crate::rng::{derive_seed, stream};
use crate::{Error, Result};

/// Forecasting method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Lstm,
    EmdLstm,
    PsoLstm,
    EmdPsoLstm,
    Rnn,
    Gru,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Lstm,
        Variant::EmdLstm,
        Variant::PsoLstm,
        Variant::EmdPsoLstm,
        Variant::Rnn,
        Variant::Gru,
    ];

    pub fn uses_emd(self) -> bool {
        matches!(self, Variant::EmdLstm | Variant::EmdPsoLstm)
    }

    pub fn uses_pso(self) -> bool {
        matches!(self, Variant::PsoLstm | Variant::EmdPsoLstm)
    }

    pub fn cell_kind(self) -> CellKind {
        match self {
            Variant::Rnn => CellKind::Rnn,
            Variant::Gru => CellKind::Gru,
            _ => CellKind::Lstm,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Lstm => "lstm",
            Variant::EmdLstm => "emd_lstm",
            Variant::PsoLstm => "pso_lstm",
            Variant::EmdPsoLstm => "emd_pso_lstm",
            Variant::Rnn => "rnn",
            Variant::Gru => "gru",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == name)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown variant `{name}`")))
    }
}

/// Full pipeline configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub cleaning: CleaningConfig,
    pub sift: SiftConfig,
    /// MIXn: IMFs 1..=n merge into the high-frequency part.
    pub mix_index: usize,
    pub mix_scheme: MixScheme,
    /// Window length N of the N-days-to-one-day pattern.
    pub window_days: usize,
    /// Unroll hours (N·24 scalar steps) instead of days (N 24-wide steps).
    pub hourly_unroll: bool,
    pub train: TrainConfig,
    pub swarm: SwarmConfig,
    /// Adam epochs inside each swarm fitness evaluation.
    pub probe_epochs: usize,
    pub variant: Variant,
    /// Master seed; every stochastic stage derives its own stream.
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            cleaning: CleaningConfig::default(),
            sift: SiftConfig::default(),
            mix_index: 3,
            mix_scheme: MixScheme::Separate,
            window_days: 7,
            hourly_unroll: false,
            train: TrainConfig::default(),
            swarm: SwarmConfig::default(),
            probe_epochs: 5,
            variant: Variant::EmdPsoLstm,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.cleaning.validate()?;
        self.sift.validate()?;
        self.train.validate()?;
        self.swarm.validate()?;
        if self.window_days == 0 {
            return Err(Error::InvalidConfig("window_days must be ≥ 1".into()));
        }
        if self.mix_index == 0 {
            return Err(Error::InvalidConfig("mix_index must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// One trained per-component model.
#[derive(Debug, Clone)]
pub struct ComponentModel {
    pub component_id: usize,
    /// Min/max of this component's training data, nothing else.
    pub norm: NormalizationParams,
    pub network: Network,
    pub loss_history: Vec<f64>,
    /// Swarm trace when the variant used PSO.
    pub pso_trace: Option<Vec<PsoTraceRow>>,
}

/// Day-ahead forecast with optional evaluation against the actual day.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastResult {
    /// Denormalized per-component 24-hour predictions.
    pub per_component: Vec<Vec<f64>>,
    /// Element-wise sum of the components.
    pub aggregate: Vec<f64>,
    pub actual: Option<Vec<f64>>,
    pub mape_per_hour: Option<Vec<f64>>,
    pub mape_mean: Option<f64>,
}

impl ForecastResult {
    /// Attaches the observed day and its MAPE.
    pub fn with_actual(mut self, actual: &[f64]) -> Result<Self> {
        let (per_hour, mean) = evaluate_mape(&self.aggregate, actual)?;
        self.actual = Some(actual.to_vec());
        self.mape_per_hour = Some(per_hour);
        self.mape_mean = Some(mean);
        Ok(self)
    }
}

/// Cleans the history and splits it into modeling components.
fn preprocess(history: &LoadSeries, cfg: &PipelineConfig) -> Result<Vec<Vec<f64>>> {
    let matrix = LoadMatrix::from_values(&history.values)?;
    let (cleaned, _, _) = clean_matrix(&matrix, &cfg.cleaning)?;
    let values = cleaned.to_values();
    if cfg.variant.uses_emd() {
        let imf_set = decompose(&values, &cfg.sift)?;
        let parts = recombine_with_scheme(&imf_set, cfg.mix_index, cfg.mix_scheme)?;
        Ok(parts.parts)
    } else {
        Ok(vec![values])
    }
}

fn component_windows(
    component: &[f64],
    norm: &NormalizationParams,
    cfg: &PipelineConfig,
) -> Result<WindowSet> {
    let normalized = normalize_all(component, norm)?;
    let matrix = LoadMatrix::from_values(&normalized)?;
    let windows = build_windows(&matrix, cfg.window_days)?;
    Ok(if cfg.hourly_unroll {
        windows.into_hourly()
    } else {
        windows
    })
}

fn fit_component(
    component_id: usize,
    component: &[f64],
    cfg: &PipelineConfig,
) -> Result<ComponentModel> {
    let norm = NormalizationParams::fit(component)?;
    let windows = component_windows(component, &norm, cfg)?;
    let dims = Dims {
        input: windows.input_dim(),
        hidden: cfg.train.hidden_dim,
        output: 24,
        layers: cfg.train.num_layers,
    };
    let init_seed = derive_seed(cfg.seed, stream::init(component_id));
    let mut network = Network::init(cfg.variant.cell_kind(), dims, init_seed);

    let mut pso_trace = None;
    if cfg.variant.uses_pso() {
        let (train_w, eval_w) = windows.split_validation(0.1);
        let probe_base = TrainConfig {
            seed: derive_seed(cfg.seed, stream::probe(component_id)),
            ..cfg.train.clone()
        };
        let spec = FitnessSpec {
            train_windows: &train_w,
            eval_windows: &eval_w,
            probe_epochs: cfg.probe_epochs,
            base: probe_base,
            target_mask: TargetMask::default(),
            template: &network,
        };
        let swarm_cfg = SwarmConfig {
            seed: derive_seed(cfg.seed, stream::swarm(component_id)),
            ..cfg.swarm.clone()
        };
        let outcome = optimize_network(&spec, &swarm_cfg)?;
        network = crate::pso::apply_best_position(&network, &TargetMask::default(), &outcome)?;
        pso_trace = Some(outcome.trace);
    }

    let train_cfg = TrainConfig {
        seed: derive_seed(cfg.seed, stream::shuffle(component_id)),
        ..cfg.train.clone()
    };
    let (network, loss_history) = train(&windows, &train_cfg, network)?;
    Ok(ComponentModel {
        component_id,
        norm,
        network,
        loss_history,
        pso_trace,
    })
}

/// Trains one model per component of the (cleaned, decomposed) history.
pub fn fit(history: &LoadSeries, cfg: &PipelineConfig) -> Result<Vec<ComponentModel>> {
    cfg.validate()?;
    let days = history.len() / 24;
    if !history.len().is_multiple_of(24) {
        return Err(Error::NotWholeDays {
            len: history.len(),
        });
    }
    if days < cfg.window_days + 2 {
        return Err(Error::TooFewDays {
            needed: cfg.window_days + 2,
            got: days,
        });
    }
    let components = preprocess(history, cfg)?;
    components
        .iter()
        .enumerate()
        .map(|(k, comp)| fit_component(k, comp, cfg).map_err(|e| e.in_component(k)))
        .collect()
}

/// Predicts the 24 hours following the history.
///
/// The history is cleaned and decomposed exactly as in [`fit`]; each model
/// consumes the last N days of its component and its prediction is
/// denormalized with the training-time parameters, then the components are
/// summed.
pub fn forecast_day(
    models: &[ComponentModel],
    history: &LoadSeries,
    cfg: &PipelineConfig,
) -> Result<ForecastResult> {
    cfg.validate()?;
    if models.is_empty() {
        return Err(Error::InvalidConfig("no component models".into()));
    }
    let components = preprocess(history, cfg)?;
    if components.len() != models.len() {
        return Err(Error::ShapeMismatch(format!(
            "history decomposes into {} parts but {} models were trained",
            components.len(),
            models.len()
        )));
    }
    let days = history.len() / 24;
    if days < cfg.window_days {
        return Err(Error::TooFewDays {
            needed: cfg.window_days,
            got: days,
        });
    }

    let mut per_component = Vec::with_capacity(models.len());
    for (model, component) in models.iter().zip(&components) {
        let normalized = normalize_all(component, &model.norm)
            .map_err(|e| e.in_component(model.component_id))?;
        let tail = &normalized[normalized.len() - cfg.window_days * 24..];
        let steps = if cfg.hourly_unroll {
            (cfg.window_days * 24, 1)
        } else {
            (cfg.window_days, 24)
        };
        let seq = ndarray::Array2::from_shape_vec(steps, tail.to_vec())
            .expect("tail length equals window_days × 24");
        let pred = model
            .network
            .predict(&seq)
            .map_err(|e| e.in_component(model.component_id))?;
        per_component.push(
            pred.iter()
                .map(|&v| denormalize(v, &model.norm))
                .collect::<Vec<f64>>(),
        );
    }

    let mut aggregate = vec![0.0; 24];
    for component in &per_component {
        for (a, v) in aggregate.iter_mut().zip(component) {
            *a += v;
        }
    }
    Ok(ForecastResult {
        per_component,
        aggregate,
        actual: None,
        mape_per_hour: None,
        mape_mean: None,
    })
}

/// Per-hour and mean absolute percentage error, in percent.
///
/// Zero actual values are rejected: the ratio is undefined there.
pub fn evaluate_mape(pred: &[f64], actual: &[f64]) -> Result<(Vec<f64>, f64)> {
    if pred.len() != actual.len() || pred.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "prediction length {} vs actual length {}",
            pred.len(),
            actual.len()
        )));
    }
    let mut per_hour = Vec::with_capacity(pred.len());
    for (hour, (p, a)) in pred.iter().zip(actual).enumerate() {
        if *a == 0.0 {
            return Err(Error::ZeroActual { hour });
        }
        per_hour.push(100.0 * (a - p).abs() / a.abs());
    }
    let mean = per_hour.iter().sum::<f64>() / per_hour.len() as f64;
    Ok((per_hour, mean))
}

/// Forecast CSV: `hour,component_1..component_K,aggregate[,actual,mape]`.
pub fn write_forecast_csv<W: std::io::Write>(mut w: W, result: &ForecastResult) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<writer>".into(),
        source,
    };
    let k = result.per_component.len();
    let mut header = String::from("hour");
    for i in 1..=k {
        header.push_str(&format!(",component_{i}"));
    }
    header.push_str(",aggregate");
    if result.actual.is_some() {
        header.push_str(",actual,mape");
    }
    writeln!(w, "{header}").map_err(io_err)?;
    for hour in 0..24 {
        let mut line = hour.to_string();
        for component in &result.per_component {
            line.push_str(&format!(",{}", component[hour]));
        }
        line.push_str(&format!(",{}", result.aggregate[hour]));
        if let (Some(actual), Some(mape)) = (&result.actual, &result.mape_per_hour) {
            line.push_str(&format!(",{},{}", actual[hour], mape[hour]));
        }
        writeln!(w, "{line}").map_err(io_err)?;
    }
    Ok(())
}

/// Flat key-value metrics report.
pub fn write_metrics<W: std::io::Write>(mut w: W, result: &ForecastResult) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<writer>".into(),
        source,
    };
    writeln!(w, "components={}", result.per_component.len()).map_err(io_err)?;
    if let Some(mean) = result.mape_mean {
        writeln!(w, "mape_mean={mean}").map_err(io_err)?;
    }
    if let Some(per_hour) = &result.mape_per_hour {
        for (hour, v) in per_hour.iter().enumerate() {
            writeln!(w, "mape_hour_{hour:02}={v}").map_err(io_err)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
