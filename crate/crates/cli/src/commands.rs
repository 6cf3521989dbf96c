//! The seven batch commands.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use stlf_core::data::{
    load_csv, write_cleaning_report, write_series_csv, clean_matrix, CsvSchema, LoadMatrix,
    LoadSeries, NormalizationParams,
};
use stlf_core::emd::{decompose, write_components_csv};
use stlf_core::nn::{load_network, save_network};
use stlf_core::pipeline::{
    compare_methods, evaluate_mape, fit, forecast_day, sweep_input_pattern, sweep_mix,
    write_forecast_csv, write_summary_csv, write_table_csv, ComponentModel,
    ExperimentTable, Variant,
};
use stlf_core::{Error, Result};

use crate::config::{render_manifest, ResolvedConfig};
use crate::output::{sha256_file, OutputSet};

struct Timings {
    started: Instant,
    stages: BTreeMap<String, u128>,
}

impl Timings {
    fn new() -> Self {
        Self {
            started: Instant::now(),
            stages: BTreeMap::new(),
        }
    }

    fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.stages
            .insert(name.to_string(), start.elapsed().as_millis());
        out
    }

    fn finish(mut self) -> BTreeMap<String, u128> {
        self.stages
            .insert("total".into(), self.started.elapsed().as_millis());
        self.stages
    }
}

fn read_history(input: &Path) -> Result<LoadSeries> {
    load_csv(input, &CsvSchema::default())
}

fn manifest_output(
    out: &mut OutputSet,
    out_dir: &Path,
    cfg: &ResolvedConfig,
    command: &str,
    input_sha: &str,
    timings: Timings,
) {
    let manifest = render_manifest(cfg, command, input_sha, &timings.finish());
    out.add(out_dir.join("manifest.txt"), manifest.into_bytes());
}

/// `clean`: revise outliers, emit cleaned.csv + report.csv.
pub fn cmd_clean(input: &Path, out_dir: &Path, cfg: &ResolvedConfig) -> Result<()> {
    let mut timings = Timings::new();
    let input_sha = sha256_file(input)?;
    let history = timings.stage("load", || read_history(input))?;
    let matrix = LoadMatrix::from_values(&history.values)?;
    let (cleaned, stats, revisions) =
        timings.stage("clean", || clean_matrix(&matrix, &cfg.pipeline.cleaning))?;

    let cleaned_series = LoadSeries {
        values: cleaned.to_values(),
        ..history.clone()
    };
    let mut cleaned_csv = Vec::new();
    write_series_csv(&mut cleaned_csv, &cleaned_series)?;
    let mut report_csv = Vec::new();
    write_cleaning_report(&mut report_csv, &revisions)?;

    let mut out = OutputSet::default();
    out.add(out_dir.join("cleaned.csv"), cleaned_csv);
    out.add(out_dir.join("report.csv"), report_csv);
    manifest_output(&mut out, out_dir, cfg, "clean", &input_sha, timings);
    out.commit()?;
    println!(
        "cleaned {} hours; {} cells revised (mean {:.2}, stddev {:.2})",
        history.len(),
        revisions.len(),
        stats.mean,
        stats.stddev
    );
    Ok(())
}

/// `decompose`: clean then sift, emit wide components.csv.
pub fn cmd_decompose(input: &Path, out_dir: &Path, cfg: &ResolvedConfig) -> Result<()> {
    let mut timings = Timings::new();
    let input_sha = sha256_file(input)?;
    let history = timings.stage("load", || read_history(input))?;
    let matrix = LoadMatrix::from_values(&history.values)?;
    let (cleaned, _, _) = timings.stage("clean", || clean_matrix(&matrix, &cfg.pipeline.cleaning))?;
    let imf_set = timings.stage("decompose", || {
        decompose(&cleaned.to_values(), &cfg.pipeline.sift)
    })?;

    let mut components_csv = Vec::new();
    write_components_csv(&mut components_csv, &imf_set)?;

    let mut out = OutputSet::default();
    out.add(out_dir.join("components.csv"), components_csv);
    manifest_output(&mut out, out_dir, cfg, "decompose", &input_sha, timings);
    out.commit()?;
    println!(
        "decomposed into {} IMFs plus residual",
        imf_set.imfs.len()
    );
    Ok(())
}

fn meta_csv(models: &[ComponentModel]) -> Vec<u8> {
    let mut text = String::from("component_id,x_min,x_max\n");
    for m in models {
        text.push_str(&format!("{},{},{}\n", m.component_id, m.norm.x_min, m.norm.x_max));
    }
    text.into_bytes()
}

fn loss_history_csv(models: &[ComponentModel]) -> Vec<u8> {
    let mut text = String::from("component_id,epoch,loss\n");
    for m in models {
        for (epoch, loss) in m.loss_history.iter().enumerate() {
            text.push_str(&format!("{},{},{}\n", m.component_id, epoch, loss));
        }
    }
    text.into_bytes()
}

/// `train`: fit per-component models, emit model files + manifest.
pub fn cmd_train(input: &Path, out_dir: &Path, cfg: &ResolvedConfig) -> Result<()> {
    let mut timings = Timings::new();
    let input_sha = sha256_file(input)?;
    let history = timings.stage("load", || read_history(input))?;
    let models = timings.stage("fit", || fit(&history, &cfg.pipeline))?;

    let mut out = OutputSet::default();
    for model in &models {
        let mut blob = Vec::new();
        save_network(&mut blob, &model.network)?;
        out.add(
            out_dir.join(format!("models/component_{}.bin", model.component_id)),
            blob,
        );
    }
    out.add(out_dir.join("models/meta.csv"), meta_csv(&models));
    out.add(out_dir.join("loss_history.csv"), loss_history_csv(&models));

    let pso_rows: Vec<String> = models
        .iter()
        .filter_map(|m| m.pso_trace.as_ref().map(|t| (m.component_id, t)))
        .flat_map(|(id, trace)| {
            trace.iter().map(move |r| {
                format!(
                    "{id},{},{},{},{}",
                    r.iteration, r.particle, r.fitness, r.gbest_fitness
                )
            })
        })
        .collect();
    if !pso_rows.is_empty() {
        let mut text = String::from("component_id,iteration,particle,fitness,gbest_fitness\n");
        text.push_str(&pso_rows.join("\n"));
        text.push('\n');
        out.add(out_dir.join("pso_trace.csv"), text.into_bytes());
    }

    manifest_output(&mut out, out_dir, cfg, "train", &input_sha, timings);
    out.commit()?;
    println!("trained {} component model(s) into {}", models.len(), out_dir.display());
    Ok(())
}

fn load_models(models_dir: &Path) -> Result<Vec<ComponentModel>> {
    let meta_path = models_dir.join("models/meta.csv");
    let text = std::fs::read_to_string(&meta_path).map_err(|source| Error::Io {
        path: meta_path.clone(),
        source,
    })?;
    let mut models = Vec::new();
    for (no, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::BadRow {
                line: no + 1,
                message: format!("bad meta row in {}", meta_path.display()),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::BadRow {
                line: no + 1,
                message: format!("bad number `{s}` in {}", meta_path.display()),
            })
        };
        let component_id: usize = fields[0].parse().map_err(|_| Error::BadRow {
            line: no + 1,
            message: "bad component id".into(),
        })?;
        let norm = NormalizationParams::new(parse(fields[1])?, parse(fields[2])?)?;
        let bin_path = models_dir.join(format!("models/component_{component_id}.bin"));
        let file = std::fs::File::open(&bin_path).map_err(|source| Error::Io {
            path: bin_path.clone(),
            source,
        })?;
        let network = load_network(std::io::BufReader::new(file))?;
        models.push(ComponentModel {
            component_id,
            norm,
            network,
            loss_history: Vec::new(),
            pso_trace: None,
        });
    }
    if models.is_empty() {
        return Err(Error::BadModelFile(format!(
            "{} lists no components",
            meta_path.display()
        )));
    }
    Ok(models)
}

/// `predict`: forecast the 24 hours after the input history using models
/// trained by `train` (config comes from that run's manifest).
pub fn cmd_predict(
    input: &Path,
    models_dir: &Path,
    out_dir: &Path,
    cfg: &ResolvedConfig,
) -> Result<()> {
    let mut timings = Timings::new();
    let input_sha = sha256_file(input)?;
    let history = timings.stage("load", || read_history(input))?;
    let models = timings.stage("load_models", || load_models(models_dir))?;
    let result = timings.stage("forecast", || forecast_day(&models, &history, &cfg.pipeline))?;

    let mut forecast_csv = Vec::new();
    write_forecast_csv(&mut forecast_csv, &result)?;
    let mut out = OutputSet::default();
    out.add(out_dir.join("forecast.csv"), forecast_csv);
    manifest_output(&mut out, out_dir, cfg, "predict", &input_sha, timings);
    out.commit()?;
    println!(
        "forecast written; aggregate range [{:.2}, {:.2}]",
        result.aggregate.iter().cloned().fold(f64::INFINITY, f64::min),
        result.aggregate.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    );
    Ok(())
}

/// Reads the `aggregate` column of a forecast.csv.
fn read_forecast_aggregate(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = text.lines();
    let header = lines.next().ok_or(Error::NoDataRows)?;
    let col = header
        .split(',')
        .position(|h| h == "aggregate")
        .ok_or_else(|| Error::BadRow {
            line: 1,
            message: "forecast file has no `aggregate` column".into(),
        })?;
    let mut values = Vec::new();
    for (no, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let field = line.split(',').nth(col).ok_or_else(|| Error::BadRow {
            line: no + 2,
            message: "short row".into(),
        })?;
        values.push(field.parse().map_err(|_| Error::BadRow {
            line: no + 2,
            message: format!("bad aggregate value `{field}`"),
        })?);
    }
    if values.len() != 24 {
        return Err(Error::ShapeMismatch(format!(
            "forecast has {} rows, expected 24",
            values.len()
        )));
    }
    Ok(values)
}

/// `evaluate`: MAPE of a forecast against an observed day.
pub fn cmd_evaluate(forecast: &Path, actual: &Path, out_dir: &Path, cfg: &ResolvedConfig) -> Result<()> {
    let mut timings = Timings::new();
    let input_sha = sha256_file(forecast)?;
    let pred = read_forecast_aggregate(forecast)?;
    let observed = read_history(actual)?;
    if observed.len() != 24 {
        return Err(Error::ShapeMismatch(format!(
            "actual day has {} hours, expected 24",
            observed.len()
        )));
    }
    let (per_hour, mean) = timings.stage("evaluate", || evaluate_mape(&pred, &observed.values))?;

    let mut metrics = String::new();
    metrics.push_str(&format!("mape_mean={mean}\n"));
    for (hour, v) in per_hour.iter().enumerate() {
        metrics.push_str(&format!("mape_hour_{hour:02}={v}\n"));
    }
    let mut out = OutputSet::default();
    out.add(out_dir.join("metrics.txt"), metrics.into_bytes());
    manifest_output(&mut out, out_dir, cfg, "evaluate", &input_sha, timings);
    out.commit()?;
    println!("mean MAPE {mean:.2}%");
    Ok(())
}

/// Last day of the series as the evaluation target, the rest as history.
fn split_target_day(series: &LoadSeries) -> Result<(LoadSeries, Vec<f64>)> {
    if !series.len().is_multiple_of(24) {
        return Err(Error::NotWholeDays { len: series.len() });
    }
    if series.len() < 48 {
        return Err(Error::TooFewDays {
            needed: 2,
            got: series.len() / 24,
        });
    }
    let cut = series.len() - 24;
    let history = LoadSeries {
        start: series.start,
        values: series.values[..cut].to_vec(),
        unit: series.unit.clone(),
    };
    Ok((history, series.values[cut..].to_vec()))
}

fn emit_table(
    out_dir: &Path,
    cfg: &ResolvedConfig,
    command: &str,
    input_sha: &str,
    timings: Timings,
    table: &ExperimentTable,
    stem: &str,
) -> Result<()> {
    let mut table_csv = Vec::new();
    write_table_csv(&mut table_csv, table)?;
    let mut summary_csv = Vec::new();
    write_summary_csv(&mut summary_csv, table)?;

    let mut out = OutputSet::default();
    out.add(out_dir.join(format!("{stem}_table.csv")), table_csv);
    out.add(out_dir.join(format!("{stem}_summary.csv")), summary_csv);
    manifest_output(&mut out, out_dir, cfg, command, input_sha, timings);
    out.commit()?;

    let mut any_ok = false;
    for row in &table.rows {
        match &row.outcome {
            Ok(o) => {
                any_ok = true;
                println!("{}: mean MAPE {:.2}%", row.label, o.mape_mean);
            }
            Err(e) => eprintln!("{}: failed: {e}", row.label),
        }
    }
    if any_ok {
        Ok(())
    } else {
        Err(Error::Other("every setting failed".into()))
    }
}

/// `compare`: train each variant on all but the last day and score the
/// day-ahead forecasts against that day.
pub fn cmd_compare(
    input: &Path,
    out_dir: &Path,
    variants: &[Variant],
    cfg: &ResolvedConfig,
) -> Result<()> {
    let mut timings = Timings::new();
    let input_sha = sha256_file(input)?;
    let series = timings.stage("load", || read_history(input))?;
    let (history, target) = split_target_day(&series)?;
    let table = timings.stage("compare", || {
        compare_methods(&history, &target, variants, &cfg.pipeline)
    })?;
    emit_table(out_dir, cfg, "compare", &input_sha, timings, &table, "compare")
}

/// Sweep axis of `cmd_sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Window length N of the N-to-one input pattern.
    InputPattern,
    /// MIXn recombination index.
    Mix,
}

/// `sweep`: one fit/forecast per value of the swept parameter.
pub fn cmd_sweep(
    input: &Path,
    out_dir: &Path,
    kind: SweepKind,
    values: &[usize],
    cfg: &ResolvedConfig,
) -> Result<()> {
    let mut timings = Timings::new();
    let input_sha = sha256_file(input)?;
    let series = timings.stage("load", || read_history(input))?;
    let (history, target) = split_target_day(&series)?;
    let table = timings.stage("sweep", || match kind {
        SweepKind::InputPattern => sweep_input_pattern(&history, &target, values, &cfg.pipeline),
        SweepKind::Mix => sweep_mix(&history, &target, values, &cfg.pipeline),
    })?;
    emit_table(out_dir, cfg, "sweep", &input_sha, timings, &table, "sweep")
}
