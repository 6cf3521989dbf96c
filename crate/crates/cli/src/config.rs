//! Flat key=value configuration files and run manifests.
//!
//! A manifest is a valid config file: it echoes every resolved config key
//! and adds informational `manifest.*` entries, which the parser skips.
//! Re-running a command with `--config manifest.txt` therefore reproduces
//! the run.

use std::collections::BTreeMap;
use std::path::Path;

use stlf_core::data::CleaningConfig;
use stlf_core::emd::{BoundaryPolicy, MixScheme, SiftConfig};
use stlf_core::nn::TrainConfig;
use stlf_core::pipeline::{PipelineConfig, Variant};
use stlf_core::pso::{PsoLoop, SwarmConfig};
use stlf_core::Error;

/// Pipeline config plus CLI-only switches.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResolvedConfig {
    pub pipeline: PipelineConfig,
    /// Forces sequential reductions; execution is always sequential in
    /// this build, so the flag is recorded verbatim.
    pub deterministic: bool,
}


fn bad(key: &str, value: &str) -> Error {
    Error::InvalidConfig(format!("bad value `{value}` for key `{key}`"))
}

fn parse_f64(key: &str, value: &str) -> Result<f64, Error> {
    value.parse().map_err(|_| bad(key, value))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, Error> {
    value.parse().map_err(|_| bad(key, value))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, Error> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(bad(key, value)),
    }
}

pub fn parse_mix_scheme(value: &str) -> Result<MixScheme, Error> {
    match value {
        "separate" => Ok(MixScheme::Separate),
        "two-part" => Ok(MixScheme::TwoPart),
        _ => Err(bad("mix_scheme", value)),
    }
}

pub fn parse_pso_loop(value: &str) -> Result<PsoLoop, Error> {
    match value {
        "sync" => Ok(PsoLoop::Sync),
        "paper" => Ok(PsoLoop::Paper),
        _ => Err(bad("swarm.loop", value)),
    }
}

fn parse_boundary(value: &str) -> Result<BoundaryPolicy, Error> {
    match value {
        "mirror" => Ok(BoundaryPolicy::Mirror),
        "clamp" => Ok(BoundaryPolicy::Clamp),
        _ => Err(bad("sift.boundary_policy", value)),
    }
}

/// Applies one `key = value` pair onto the config.
fn apply_pair(cfg: &mut ResolvedConfig, key: &str, value: &str) -> Result<(), Error> {
    let p = &mut cfg.pipeline;
    match key {
        "seed" => p.seed = value.parse().map_err(|_| bad(key, value))?,
        "variant" => p.variant = Variant::parse(value)?,
        "window_days" => p.window_days = parse_usize(key, value)?,
        "mix_index" => p.mix_index = parse_usize(key, value)?,
        "mix_scheme" => p.mix_scheme = parse_mix_scheme(value)?,
        "hourly_unroll" => p.hourly_unroll = parse_bool(key, value)?,
        "probe_epochs" => p.probe_epochs = parse_usize(key, value)?,
        "deterministic" => cfg.deterministic = parse_bool(key, value)?,
        "cleaning.epsilon" => p.cleaning.epsilon = parse_f64(key, value)?,
        "cleaning.alpha" => p.cleaning.alpha = parse_f64(key, value)?,
        "cleaning.beta" => p.cleaning.beta = parse_f64(key, value)?,
        "cleaning.gamma" => p.cleaning.gamma = parse_f64(key, value)?,
        "sift.sd_threshold" => p.sift.sd_threshold = parse_f64(key, value)?,
        "sift.max_sift_iters" => p.sift.max_sift_iters = parse_usize(key, value)?,
        "sift.max_imfs" => p.sift.max_imfs = parse_usize(key, value)?,
        "sift.boundary_policy" => p.sift.boundary_policy = parse_boundary(value)?,
        "train.hidden_dim" => p.train.hidden_dim = parse_usize(key, value)?,
        "train.num_layers" => p.train.num_layers = parse_usize(key, value)?,
        "train.learning_rate" => p.train.learning_rate = parse_f64(key, value)?,
        "train.batch_size" => p.train.batch_size = parse_usize(key, value)?,
        "train.epochs" => p.train.epochs = parse_usize(key, value)?,
        "train.grad_clip" => {
            p.train.grad_clip = if value == "off" {
                None
            } else {
                Some(parse_f64(key, value)?)
            }
        }
        "swarm.particles" => p.swarm.particles = parse_usize(key, value)?,
        "swarm.iterations" => p.swarm.iterations = parse_usize(key, value)?,
        "swarm.inertia" => p.swarm.inertia = parse_f64(key, value)?,
        "swarm.cognitive" => p.swarm.cognitive = parse_f64(key, value)?,
        "swarm.social" => p.swarm.social = parse_f64(key, value)?,
        "swarm.v_max" => p.swarm.v_max = parse_f64(key, value)?,
        "swarm.bounds_low" => p.swarm.bounds.0 = parse_f64(key, value)?,
        "swarm.bounds_high" => p.swarm.bounds.1 = parse_f64(key, value)?,
        "swarm.loop" => p.swarm.loop_mode = parse_pso_loop(value)?,
        _ if key.starts_with("manifest.") => {} // informational
        _ => {
            return Err(Error::InvalidConfig(format!("unknown config key `{key}`")));
        }
    }
    Ok(())
}

/// Reads a config (or manifest) file into the config.
pub fn load_config_file(path: &Path, cfg: &mut ResolvedConfig) -> Result<(), Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("{}:{}: expected `key = value`", path.display(), no + 1))
        })?;
        apply_pair(cfg, key.trim(), value.trim())?;
    }
    Ok(())
}

fn fmt_grad_clip(clip: Option<f64>) -> String {
    match clip {
        None => "off".to_string(),
        Some(v) => v.to_string(),
    }
}

/// Every resolved key, in stable order.
pub fn config_entries(cfg: &ResolvedConfig) -> Vec<(String, String)> {
    let p = &cfg.pipeline;
    let CleaningConfig {
        epsilon,
        alpha,
        beta,
        gamma,
    } = p.cleaning.clone();
    let SiftConfig {
        sd_threshold,
        max_sift_iters,
        max_imfs,
        boundary_policy,
    } = p.sift.clone();
    let TrainConfig {
        hidden_dim,
        num_layers,
        learning_rate,
        batch_size,
        epochs,
        seed: _,
        grad_clip,
    } = p.train.clone();
    let SwarmConfig {
        particles,
        iterations,
        inertia,
        cognitive,
        social,
        v_max,
        bounds,
        seed: _,
        loop_mode,
    } = p.swarm.clone();
    let boundary = match boundary_policy {
        BoundaryPolicy::Mirror => "mirror",
        BoundaryPolicy::Clamp => "clamp",
    };
    let scheme = match p.mix_scheme {
        MixScheme::Separate => "separate",
        MixScheme::TwoPart => "two-part",
    };
    let loop_name = match loop_mode {
        PsoLoop::Sync => "sync",
        PsoLoop::Paper => "paper",
    };
    vec![
        ("seed".into(), p.seed.to_string()),
        ("variant".into(), p.variant.name().into()),
        ("window_days".into(), p.window_days.to_string()),
        ("mix_index".into(), p.mix_index.to_string()),
        ("mix_scheme".into(), scheme.into()),
        ("hourly_unroll".into(), p.hourly_unroll.to_string()),
        ("probe_epochs".into(), p.probe_epochs.to_string()),
        ("deterministic".into(), cfg.deterministic.to_string()),
        ("cleaning.epsilon".into(), epsilon.to_string()),
        ("cleaning.alpha".into(), alpha.to_string()),
        ("cleaning.beta".into(), beta.to_string()),
        ("cleaning.gamma".into(), gamma.to_string()),
        ("sift.sd_threshold".into(), sd_threshold.to_string()),
        ("sift.max_sift_iters".into(), max_sift_iters.to_string()),
        ("sift.max_imfs".into(), max_imfs.to_string()),
        ("sift.boundary_policy".into(), boundary.into()),
        ("train.hidden_dim".into(), hidden_dim.to_string()),
        ("train.num_layers".into(), num_layers.to_string()),
        ("train.learning_rate".into(), learning_rate.to_string()),
        ("train.batch_size".into(), batch_size.to_string()),
        ("train.epochs".into(), epochs.to_string()),
        ("train.grad_clip".into(), fmt_grad_clip(grad_clip)),
        ("swarm.particles".into(), particles.to_string()),
        ("swarm.iterations".into(), iterations.to_string()),
        ("swarm.inertia".into(), inertia.to_string()),
        ("swarm.cognitive".into(), cognitive.to_string()),
        ("swarm.social".into(), social.to_string()),
        ("swarm.v_max".into(), v_max.to_string()),
        ("swarm.bounds_low".into(), bounds.0.to_string()),
        ("swarm.bounds_high".into(), bounds.1.to_string()),
        ("swarm.loop".into(), loop_name.into()),
    ]
}

/// Renders a manifest: the config snapshot plus `manifest.*` facts.
pub fn render_manifest(
    cfg: &ResolvedConfig,
    command: &str,
    input_sha256: &str,
    timings_ms: &BTreeMap<String, u128>,
) -> String {
    let mut out = String::from("# run manifest; also a valid --config file\n");
    for (key, value) in config_entries(cfg) {
        out.push_str(&format!("{key} = {value}\n"));
    }
    out.push_str(&format!("manifest.tool_version = {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("manifest.command = {command}\n"));
    out.push_str(&format!("manifest.input_sha256 = {input_sha256}\n"));
    for (stage, ms) in timings_ms {
        out.push_str(&format!("manifest.timing.{stage}_ms = {ms}\n"));
    }
    out
}
