use stlf_core::data::LoadSeries;
use stlf_core::emd::{BoundaryPolicy, MixScheme, SiftConfig};
use stlf_core::nn::TrainConfig;
use stlf_core::pipeline::{compare_methods, PipelineConfig, Variant};
use stlf_core::pso::SwarmConfig;
use stlf_core::synth::{synthetic_series, SyntheticConfig};

fn composite(days: usize, seed: u64, slope_per_day: f64) -> LoadSeries {
    let mut s = synthetic_series(&SyntheticConfig {
        days,
        seed,
        base: 700.0,
        daily_amplitude: 60.0,
        weekly_amplitude: 30.0,
        noise_fraction: 0.01,
    });
    for (t, v) in s.values.iter_mut().enumerate() {
        *v += slope_per_day * t as f64 / 24.0;
    }
    s
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let slope: f64 = args[1].parse().unwrap();
    let scheme = if args[2] == "two-part" { MixScheme::TwoPart } else { MixScheme::Separate };
    let mix: usize = args[3].parse().unwrap();
    for seed in 0..5u64 {
        let full = composite(120, seed + 50, slope);
        let cut = full.len() - 24;
        let history = LoadSeries { start: full.start, values: full.values[..cut].to_vec(), unit: None };
        let target = &full.values[cut..];
        let cfg = PipelineConfig {
            seed,
            mix_index: mix,
            mix_scheme: scheme,
            sift: SiftConfig { sd_threshold: 0.2, max_sift_iters: 10, boundary_policy: BoundaryPolicy::Clamp, ..SiftConfig::default() },
            train: TrainConfig { epochs: 150, ..TrainConfig::default() },
            swarm: SwarmConfig { particles: 8, iterations: 6, bounds: (-0.3, 0.3), v_max: 0.15, ..SwarmConfig::default() },
            probe_epochs: 4,
            ..PipelineConfig::default()
        };
        let table = compare_methods(&history, target, &[Variant::Lstm, Variant::EmdPsoLstm], &cfg).unwrap();
        let get = |label: &str| table.rows.iter().find(|r| r.label == label).and_then(|r| r.outcome.as_ref().ok()).map(|o| o.mape_mean).unwrap();
        let (a, b) = (get("lstm"), get("emd_pso_lstm"));
        println!("seed {seed}: lstm {a:.2}% emd_pso {b:.2}% {}", if b <= a { "EMD-WIN" } else { "" });
    }
}
