//! `stlf` — day-ahead load forecasting from hourly CSV history.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stlf_core::pipeline::Variant;
use stlf_core::Error;

use commands::SweepKind;
use config::ResolvedConfig;

#[derive(Parser)]
#[command(
    name = "stlf",
    version,
    about = "Day-ahead electrical load forecasting: EMD decomposition + per-component recurrent models"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Key=value config file; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; every stochastic stage derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default `out`).
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Force sequential reductions (this build always reduces
    /// sequentially; the flag is recorded in the manifest).
    #[arg(long, global = true)]
    deterministic: bool,
    /// Recombination of IMFs past the merged block: separate | two-part.
    #[arg(long, global = true)]
    mix_scheme: Option<String>,
    /// Swarm sweep order: sync | paper.
    #[arg(long, global = true)]
    pso_loop: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Detect and revise bad load points.
    Clean {
        /// Input CSV with `timestamp,load` columns.
        #[arg(long)]
        input: PathBuf,
    },
    /// Decompose the (cleaned) series into IMFs plus residual.
    Decompose {
        #[arg(long)]
        input: PathBuf,
    },
    /// Train per-component models on the whole input history.
    Train {
        #[arg(long)]
        input: PathBuf,
        /// Forecasting variant: lstm | emd_lstm | pso_lstm | emd_pso_lstm | rnn | gru.
        #[arg(long)]
        variant: Option<String>,
    },
    /// Forecast the 24 hours following the input history.
    Predict {
        #[arg(long)]
        input: PathBuf,
        /// Directory produced by `train` (reads its manifest and models).
        #[arg(long)]
        models: PathBuf,
    },
    /// Score a forecast against an observed day.
    Evaluate {
        /// forecast.csv produced by `predict`.
        #[arg(long)]
        forecast: PathBuf,
        /// Observed day as a 24-row `timestamp,load` CSV.
        #[arg(long)]
        actual: PathBuf,
    },
    /// Fit several variants on all but the last day and score them
    /// against that day.
    Compare {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated variants (default: all six).
        #[arg(long)]
        variants: Option<String>,
    },
    /// Sweep the input-pattern length or the MIX index.
    Sweep {
        #[arg(long)]
        input: PathBuf,
        /// Swept parameter: n | mix.
        #[arg(long)]
        parameter: String,
        /// Comma-separated values, e.g. `1,3,7,14`.
        #[arg(long)]
        values: String,
    },
}

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn classify(err: &Error) -> u8 {
    match err {
        Error::Io { .. }
        | Error::Csv(_)
        | Error::NoDataRows
        | Error::BadRow { .. }
        | Error::NonHourlyGap { .. }
        | Error::DuplicateTimestamp { .. }
        | Error::NotWholeDays { .. }
        | Error::TooFewDays { .. }
        | Error::EmptyWindowSet
        | Error::BadModelFile(_) => EXIT_DATA,
        Error::InvalidConfig(_) => EXIT_USAGE,
        Error::Component { source, .. } => classify(source),
        Error::FitnessEvaluation { source, .. } => classify(source),
        _ => EXIT_NUMERIC,
    }
}

fn resolve_config(cli: &Cli) -> Result<ResolvedConfig, Error> {
    let mut cfg = ResolvedConfig::default();
    if let Some(path) = &cli.global.config {
        config::load_config_file(path, &mut cfg)?;
    }
    if let Some(seed) = cli.global.seed {
        cfg.pipeline.seed = seed;
    }
    if cli.global.deterministic {
        cfg.deterministic = true;
    }
    if let Some(scheme) = &cli.global.mix_scheme {
        cfg.pipeline.mix_scheme = config::parse_mix_scheme(scheme)?;
    }
    if let Some(mode) = &cli.global.pso_loop {
        cfg.pipeline.swarm.loop_mode = config::parse_pso_loop(mode)?;
    }
    Ok(cfg)
}

fn parse_values(values: &str) -> Result<Vec<usize>, Error> {
    values
        .split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad sweep value `{v}`")))
        })
        .collect()
}

fn parse_variants(list: &str) -> Result<Vec<Variant>, Error> {
    list.split(',').map(|v| Variant::parse(v.trim())).collect()
}

fn run(cli: &Cli) -> Result<(), Error> {
    let mut cfg = resolve_config(cli)?;
    let out_dir = &cli.global.out_dir;
    match &cli.command {
        Command::Clean { input } => commands::cmd_clean(input, out_dir, &cfg),
        Command::Decompose { input } => commands::cmd_decompose(input, out_dir, &cfg),
        Command::Train { input, variant } => {
            if let Some(name) = variant {
                cfg.pipeline.variant = Variant::parse(name)?;
            }
            commands::cmd_train(input, out_dir, &cfg)
        }
        Command::Predict { input, models } => {
            // The training manifest carries the preprocessing config the
            // models were built with; explicit flags still win.
            let mut predict_cfg = ResolvedConfig::default();
            config::load_config_file(&models.join("manifest.txt"), &mut predict_cfg)?;
            if let Some(path) = &cli.global.config {
                config::load_config_file(path, &mut predict_cfg)?;
            }
            if let Some(seed) = cli.global.seed {
                predict_cfg.pipeline.seed = seed;
            }
            commands::cmd_predict(input, models, out_dir, &predict_cfg)
        }
        Command::Evaluate { forecast, actual } => {
            commands::cmd_evaluate(forecast, actual, out_dir, &cfg)
        }
        Command::Compare { input, variants } => {
            let variants = match variants {
                Some(list) => parse_variants(list)?,
                None => Variant::ALL.to_vec(),
            };
            commands::cmd_compare(input, out_dir, &variants, &cfg)
        }
        Command::Sweep {
            input,
            parameter,
            values,
        } => {
            let kind = match parameter.as_str() {
                "n" => SweepKind::InputPattern,
                "mix" => SweepKind::Mix,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown sweep parameter `{other}` (expected n or mix)"
                    )))
                }
            };
            commands::cmd_sweep(input, out_dir, kind, &parse_values(values)?, &cfg)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help/version are not usage errors.
            use clap::error::ErrorKind;
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::from(classify(&err))
        }
    }
}
