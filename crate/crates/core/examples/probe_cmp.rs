use stlf_core::data::LoadSeries;
use stlf_core::emd::{BoundaryPolicy, MixScheme, SiftConfig};
use stlf_core::nn::TrainConfig;
use stlf_core::pipeline::{compare_methods, PipelineConfig, Variant};
use stlf_core::pso::SwarmConfig;
use stlf_core::synth::{synthetic_series, SyntheticConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let days: usize = args[1].parse().unwrap();
    let epochs: usize = args[2].parse().unwrap();
    for seed in 0..5u64 {
        let full = synthetic_series(&SyntheticConfig { days, seed: seed + 50, ..SyntheticConfig::default() });
        let cut = full.len() - 24;
        let history = LoadSeries { start: full.start, values: full.values[..cut].to_vec(), unit: None };
        let target = &full.values[cut..];
        let cfg = PipelineConfig {
            seed,
            mix_index: 4,
            mix_scheme: MixScheme::TwoPart,
            sift: SiftConfig { sd_threshold: 0.2, max_sift_iters: 10, boundary_policy: BoundaryPolicy::Clamp, ..SiftConfig::default() },
            train: TrainConfig { epochs, ..TrainConfig::default() },
            swarm: SwarmConfig { particles: 8, iterations: 6, bounds: (-0.3, 0.3), v_max: 0.15, ..SwarmConfig::default() },
            probe_epochs: 4,
            ..PipelineConfig::default()
        };
        let table = compare_methods(&history, target, &[Variant::Lstm, Variant::EmdPsoLstm], &cfg).unwrap();
        let get = |label: &str| table.rows.iter().find(|r| r.label == label).and_then(|r| r.outcome.as_ref().ok()).map(|o| o.mape_mean).unwrap();
        println!("seed {seed}: lstm {:.2}% emd_pso {:.2}%", get("lstm"), get("emd_pso_lstm"));
    }
}
