//! Method-comparison and parameter-sweep harnesses.

use super::{evaluate_mape, fit, forecast_day, PipelineConfig, Variant};
use crate::data::LoadSeries;
use crate::{Error, Result};

/// Successful run of one experiment setting.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub predictions: Vec<f64>,
    pub mape_per_hour: Vec<f64>,
    pub mape_mean: f64,
}

/// One experiment setting; failures are isolated per row.
#[derive(Debug, Clone)]
pub struct ExperimentRow {
    pub label: String,
    pub outcome: std::result::Result<MethodOutcome, String>,
}

/// Hour-level experiment table against one actual day.
#[derive(Debug, Clone)]
pub struct ExperimentTable {
    pub actual: Vec<f64>,
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentTable {
    pub fn succeeded(&self) -> impl Iterator<Item = (&str, &MethodOutcome)> {
        self.rows
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok().map(|o| (r.label.as_str(), o)))
    }
}

fn run_setting(
    history: &LoadSeries,
    target_day: &[f64],
    cfg: &PipelineConfig,
) -> Result<MethodOutcome> {
    let models = fit(history, cfg)?;
    let forecast = forecast_day(&models, history, cfg)?;
    let (mape_per_hour, mape_mean) = evaluate_mape(&forecast.aggregate, target_day)?;
    Ok(MethodOutcome {
        predictions: forecast.aggregate,
        mape_per_hour,
        mape_mean,
    })
}

fn isolated(
    history: &LoadSeries,
    target_day: &[f64],
    cfg: &PipelineConfig,
    label: String,
) -> ExperimentRow {
    let outcome = run_setting(history, target_day, cfg).map_err(|e| {
        log::warn!("{label}: {e}");
        e.to_string()
    });
    ExperimentRow { label, outcome }
}

/// Fits and scores every variant on the same history, target day and
/// master seed. A failing variant is reported in its row; the others
/// still run.
pub fn compare_methods(
    history: &LoadSeries,
    target_day: &[f64],
    variants: &[Variant],
    base_cfg: &PipelineConfig,
) -> Result<ExperimentTable> {
    if target_day.len() != 24 {
        return Err(Error::ShapeMismatch(format!(
            "target day has {} hours",
            target_day.len()
        )));
    }
    let rows = variants
        .iter()
        .map(|&variant| {
            let cfg = PipelineConfig {
                variant,
                ..base_cfg.clone()
            };
            isolated(history, target_day, &cfg, variant.name().to_string())
        })
        .collect();
    Ok(ExperimentTable {
        actual: target_day.to_vec(),
        rows,
    })
}

/// Sweeps the window length N of the input pattern.
pub fn sweep_input_pattern(
    history: &LoadSeries,
    target_day: &[f64],
    window_lengths: &[usize],
    base_cfg: &PipelineConfig,
) -> Result<ExperimentTable> {
    if target_day.len() != 24 {
        return Err(Error::ShapeMismatch(format!(
            "target day has {} hours",
            target_day.len()
        )));
    }
    let rows = window_lengths
        .iter()
        .map(|&n| {
            let cfg = PipelineConfig {
                window_days: n,
                ..base_cfg.clone()
            };
            isolated(history, target_day, &cfg, format!("{n}-1"))
        })
        .collect();
    Ok(ExperimentTable {
        actual: target_day.to_vec(),
        rows,
    })
}

/// Sweeps the MIXn recombination index. The variant must have a
/// decomposition stage; rows with other variants fail in isolation.
pub fn sweep_mix(
    history: &LoadSeries,
    target_day: &[f64],
    mix_indices: &[usize],
    base_cfg: &PipelineConfig,
) -> Result<ExperimentTable> {
    if target_day.len() != 24 {
        return Err(Error::ShapeMismatch(format!(
            "target day has {} hours",
            target_day.len()
        )));
    }
    let rows = mix_indices
        .iter()
        .map(|&n| {
            let label = format!("MIX{n}");
            if !base_cfg.variant.uses_emd() {
                return ExperimentRow {
                    label,
                    outcome: Err(format!(
                        "variant {} has no decomposition stage",
                        base_cfg.variant.name()
                    )),
                };
            }
            let cfg = PipelineConfig {
                mix_index: n,
                ..base_cfg.clone()
            };
            isolated(history, target_day, &cfg, label)
        })
        .collect();
    Ok(ExperimentTable {
        actual: target_day.to_vec(),
        rows,
    })
}

/// Same-hour-one-week-earlier forecast: the 24 values observed exactly
/// seven days before the day following `history`.
pub fn persistence_baseline(history: &LoadSeries) -> Result<Vec<f64>> {
    if !history.len().is_multiple_of(24) {
        return Err(Error::NotWholeDays {
            len: history.len(),
        });
    }
    if history.len() < 7 * 24 {
        return Err(Error::TooFewDays {
            needed: 7,
            got: history.len() / 24,
        });
    }
    let start = history.len() - 7 * 24;
    Ok(history.values[start..start + 24].to_vec())
}

/// Hour-level table mirroring the published comparison layout: one row per
/// hour with the actual value and `prediction,mape` per successful
/// setting, then a final `average` row of mean MAPEs.
pub fn write_table_csv<W: std::io::Write>(mut w: W, table: &ExperimentTable) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<writer>".into(),
        source,
    };
    let ok_rows: Vec<(&str, &MethodOutcome)> = table.succeeded().collect();
    let mut header = String::from("hour,actual");
    for (label, _) in &ok_rows {
        header.push_str(&format!(",{label},{label}_mape"));
    }
    writeln!(w, "{header}").map_err(io_err)?;
    for hour in 0..24 {
        let mut line = format!("{hour},{}", table.actual[hour]);
        for (_, outcome) in &ok_rows {
            line.push_str(&format!(
                ",{},{:.2}",
                outcome.predictions[hour], outcome.mape_per_hour[hour]
            ));
        }
        writeln!(w, "{line}").map_err(io_err)?;
    }
    let mut avg = String::from("average,");
    for (_, outcome) in &ok_rows {
        avg.push_str(&format!(",,{:.2}", outcome.mape_mean));
    }
    writeln!(w, "{avg}").map_err(io_err)?;
    Ok(())
}

/// One row per setting: `label,mean_mape,status`.
pub fn write_summary_csv<W: std::io::Write>(mut w: W, table: &ExperimentTable) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<writer>".into(),
        source,
    };
    writeln!(w, "label,mean_mape,status").map_err(io_err)?;
    for row in &table.rows {
        match &row.outcome {
            Ok(outcome) => {
                writeln!(w, "{},{:.4},ok", row.label, outcome.mape_mean).map_err(io_err)?
            }
            Err(message) => writeln!(
                w,
                "{},,error: {}",
                row.label,
                message.replace(',', ";").replace('\n', " ")
            )
            .map_err(io_err)?,
        }
    }
    Ok(())
}
