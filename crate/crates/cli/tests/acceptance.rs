//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `cargo test -- --nocapture`).

use std::path::Path;
use std::process::Command;

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stlf_core::data::{write_series_csv, LoadSeries};
use stlf_core::emd::{
    count_zero_crossings, decompose, find_extrema, MixScheme, SiftConfig,
};
use stlf_core::nn::{adam_step, loss_rmse, AdamState, CellKind, Dims, Network, TrainConfig};
use stlf_core::pipeline::{
    compare_methods, evaluate_mape, fit, forecast_day, persistence_baseline, write_table_csv,
    PipelineConfig, Variant,
};
use stlf_core::pso::{optimize, PsoLoop, SwarmConfig};
use stlf_core::synth::{synthetic_series, synthetic_year, SyntheticConfig};

fn criterion(n: usize, desc: &str, body: impl FnOnce() -> Result<String, String>) {
    match body() {
        Ok(detail) => println!("[PASS] criterion {n}: {desc} — {detail}"),
        Err(problem) => {
            println!("[FAIL] criterion {n}: {desc} — {problem}");
            panic!("criterion {n} failed: {problem}");
        }
    }
}

// --- criterion 1 -----------------------------------------------------

fn fd_gradient(net: &Network, seq: &Array2<f64>, target: &Array1<f64>) -> Vec<f64> {
    let step = 1e-5;
    let base = net.flatten();
    let mut flat = base.clone();
    let mut grad = vec![0.0; base.len()];
    let loss_with = |flat: &[f64]| {
        let mut probe = net.clone();
        probe.load_flat(flat).unwrap();
        let pred = probe.predict(seq).unwrap();
        loss_rmse(pred.view(), target.view()).unwrap()
    };
    for i in 0..base.len() {
        flat[i] = base[i] + step;
        let plus = loss_with(&flat);
        flat[i] = base[i] - step;
        let minus = loss_with(&flat);
        flat[i] = base[i];
        grad[i] = (plus - minus) / (2.0 * step);
    }
    grad
}

#[test]
fn criterion_1_gradient_oracle() {
    criterion(
        1,
        "analytic BPTT gradients match central finite differences",
        || {
            let dims = Dims {
                input: 3,
                hidden: 4,
                output: 2,
                layers: 1,
            };
            let mut checked = 0usize;
            let mut worst: f64 = 0.0;
            for seed in 0..20u64 {
                let net = Network::init(CellKind::Lstm, dims, seed);
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
                let seq = Array2::from_shape_fn((5, 3), |_| rng.random_range(-1.0..1.0));
                let target = Array1::from_shape_fn(2, |_| rng.random_range(-1.0..1.0));
                let (_, cache) = net.forward(&seq).unwrap();
                let analytic = net.backward_flat(&seq, target.view(), &cache).unwrap();
                let numeric = fd_gradient(&net, &seq, &target);
                for info in net.layout() {
                    for k in info.offset..info.offset + info.len {
                        let (a, n) = (analytic[k], numeric[k]);
                        let tol = 1e-6f64.max(1e-4 * a.abs().max(n.abs()));
                        if (a - n).abs() > tol {
                            return Err(format!(
                                "seed {seed} tensor {}: analytic {a} vs numeric {n}",
                                info.name
                            ));
                        }
                        let denom = a.abs().max(n.abs()).max(1e-6);
                        worst = worst.max((a - n).abs() / denom);
                        checked += 1;
                    }
                }
            }
            Ok(format!(
                "{checked} coordinates across 20 instances, worst relative gap {worst:.2e}"
            ))
        },
    );
}

// --- criterion 2 -----------------------------------------------------

fn smooth_noise_fixture(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    let walk: Vec<f64> = (0..len + 4)
        .map(|_| {
            acc += rng.random_range(-1.0..1.0);
            acc
        })
        .collect();
    walk.windows(5).map(|w| w.iter().sum::<f64>() / 5.0).collect()
}

fn structured_fixtures() -> Vec<(&'static str, Vec<f64>)> {
    let tau = std::f64::consts::TAU;
    vec![
        (
            "two-tone",
            (0..600)
                .map(|t| {
                    let t = t as f64;
                    (tau * t / 12.0).sin() + 2.0 * (tau * t / 120.0).sin()
                })
                .collect(),
        ),
        (
            "sine+trend",
            (0..720)
                .map(|t| {
                    let t = t as f64;
                    (tau * t / 24.0).sin() + 0.01 * t
                })
                .collect(),
        ),
        (
            "amplitude-modulated",
            (0..800)
                .map(|t| {
                    let t = t as f64;
                    (1.0 + 0.5 * (tau * t / 160.0).sin()) * (tau * t / 16.0).sin()
                })
                .collect(),
        ),
        (
            "chirp",
            (0..600)
                .map(|t| {
                    let t = t as f64;
                    (tau * (t + t * t / 1200.0) / 40.0).sin()
                })
                .collect(),
        ),
        (
            "load-like",
            synthetic_series(&SyntheticConfig {
                days: 28,
                seed: 77,
                ..SyntheticConfig::default()
            })
            .values,
        ),
    ]
}

#[test]
fn criterion_2_emd_reconstruction() {
    criterion(
        2,
        "EMD reconstruction within 1e-8 and IMF count condition",
        || {
            let cfg = SiftConfig::default();
            let mut fixtures: Vec<(String, Vec<f64>)> = (0..50)
                .map(|seed| {
                    let len = 240 + (seed as usize * 13) % 360;
                    (format!("random-{seed}"), smooth_noise_fixture(seed, len))
                })
                .collect();
            for (name, series) in structured_fixtures() {
                fixtures.push((name.to_string(), series));
            }
            let mut worst_rel: f64 = 0.0;
            let mut validated_imfs = 0usize;
            for (name, series) in &fixtures {
                let set = decompose(series, &cfg)
                    .map_err(|e| format!("{name}: decompose failed: {e}"))?;
                let recon = set.reconstruct();
                let scale = series.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let err = recon
                    .iter()
                    .zip(series)
                    .fold(0.0f64, |m, (r, v)| m.max((r - v).abs()))
                    / scale;
                if err >= 1e-8 {
                    return Err(format!("{name}: reconstruction error {err:.2e}"));
                }
                worst_rel = worst_rel.max(err);
                for (i, (imf, capped)) in
                    set.imfs.iter().zip(&set.iteration_capped).enumerate()
                {
                    if *capped {
                        continue;
                    }
                    let extrema = find_extrema(imf).count() as i64;
                    let crossings = count_zero_crossings(imf) as i64;
                    if (extrema - crossings).abs() > 1 {
                        return Err(format!(
                            "{name}: IMF {i} has {extrema} extrema vs {crossings} crossings"
                        ));
                    }
                    validated_imfs += 1;
                }
            }
            Ok(format!(
                "{} fixtures, worst relative error {worst_rel:.2e}, {validated_imfs} IMFs validated",
                fixtures.len()
            ))
        },
    );
}

// --- criterion 3 -----------------------------------------------------

#[test]
fn criterion_3_emd_separation() {
    criterion(3, "EMD separates a sine from a linear trend", || {
        let tau = std::f64::consts::TAU;
        let series: Vec<f64> = (0..720)
            .map(|t| {
                let t = t as f64;
                (tau * t / 24.0).sin() + 0.005 * t
            })
            .collect();
        let pure: Vec<f64> = (0..720).map(|t| (tau * t as f64 / 24.0).sin()).collect();
        let set = decompose(&series, &SiftConfig::default()).map_err(|e| e.to_string())?;
        let imf1 = &set.imfs[0];
        let n = imf1.len() as f64;
        let (ma, mb) = (
            imf1.iter().sum::<f64>() / n,
            pure.iter().sum::<f64>() / n,
        );
        let mut cov = 0.0;
        let mut va = 0.0;
        let mut vb = 0.0;
        for (a, b) in imf1.iter().zip(&pure) {
            cov += (a - ma) * (b - mb);
            va += (a - ma) * (a - ma);
            vb += (b - mb) * (b - mb);
        }
        let corr = cov / (va.sqrt() * vb.sqrt());
        if corr <= 0.99 {
            return Err(format!("IMF1 correlation {corr:.4} ≤ 0.99"));
        }
        let residual_extrema = find_extrema(&set.residual).count();
        if residual_extrema > 2 {
            return Err(format!("residual has {residual_extrema} extrema"));
        }
        Ok(format!(
            "IMF1 correlation {corr:.4}, residual extrema {residual_extrema}"
        ))
    });
}

// --- criterion 4 -----------------------------------------------------

#[test]
fn criterion_4_adam() {
    criterion(4, "Adam convergence and first-step size", || {
        let mut state = AdamState::new(1, 0.1);
        let mut theta = vec![5.0];
        let mut converged_at = None;
        for step in 1..=400 {
            let g = 2.0 * theta[0];
            adam_step(&mut theta, &[g], &mut state).map_err(|e| e.to_string())?;
            if theta[0].abs() < 1e-2 {
                converged_at = Some(step);
                break;
            }
        }
        let steps = converged_at.ok_or_else(|| {
            format!("|θ| = {} after 400 steps", theta[0].abs())
        })?;

        for g in [1e-3, 0.017, 0.5, -3.0, 42.0, -1e4] {
            let mut state = AdamState::new(1, 0.1);
            let mut theta = vec![0.0];
            adam_step(&mut theta, &[g], &mut state).map_err(|e| e.to_string())?;
            let moved = theta[0].abs();
            if (moved - 0.1).abs() > 0.001 {
                return Err(format!("gradient {g}: first step {moved} not within 1% of α"));
            }
        }
        Ok(format!("θ² reached |θ| < 1e-2 in {steps} steps; first-step size ≈ α"))
    });
}

// --- criterion 5 -----------------------------------------------------

#[test]
fn criterion_5_pso_sphere() {
    criterion(5, "PSO solves the 5-dim sphere", || {
        let sphere = |x: &[f64]| Ok(x.iter().map(|v| v * v).sum());
        let mut hits = 0;
        let mut worst: f64 = 0.0;
        for seed in 0..10u64 {
            let cfg = SwarmConfig {
                particles: 20,
                iterations: 50,
                v_max: 2.0,
                bounds: (-5.0, 5.0),
                seed,
                loop_mode: PsoLoop::Sync,
                ..SwarmConfig::default()
            };
            let out = optimize(sphere, 5, &cfg).map_err(|e| e.to_string())?;
            let mut prev = f64::INFINITY;
            for row in &out.trace {
                if row.gbest_fitness > prev {
                    return Err(format!("seed {seed}: gbest history not monotone"));
                }
                prev = row.gbest_fitness;
            }
            if out.best_fitness < 1e-2 {
                hits += 1;
            }
            worst = worst.max(out.best_fitness);
        }
        if hits < 9 {
            return Err(format!("only {hits}/10 seeds reached 1e-2 (worst {worst:.2e})"));
        }
        Ok(format!("{hits}/10 seeds converged, worst final gbest {worst:.2e}"))
    });
}

// --- criterion 6 -----------------------------------------------------

/// Configuration used for the synthetic end-to-end check. Swarm budget is
/// trimmed for runtime; the shallow sift, clamped envelope boundaries and
/// two-part recombination keep the decomposition tails stable on this
/// short series.
fn synthetic_e2e_config(seed: u64) -> PipelineConfig {
    PipelineConfig {
        variant: Variant::EmdPsoLstm,
        seed,
        mix_index: 4,
        mix_scheme: MixScheme::TwoPart,
        sift: SiftConfig {
            sd_threshold: 0.2,
            max_sift_iters: 10,
            boundary_policy: stlf_core::emd::BoundaryPolicy::Clamp,
            ..SiftConfig::default()
        },
        train: TrainConfig {
            epochs: 300,
            ..TrainConfig::default()
        },
        swarm: SwarmConfig {
            particles: 16,
            iterations: 12,
            bounds: (-0.3, 0.3),
            v_max: 0.15,
            ..SwarmConfig::default()
        },
        probe_epochs: 8,
        ..PipelineConfig::default()
    }
}

#[test]
fn criterion_6_end_to_end_synthetic() {
    criterion(
        6,
        "EMD-PSO-LSTM beats week-ago persistence on ≥ 4 of 5 seeds",
        || {
            let mut wins = 0;
            let mut lines = Vec::new();
            for seed in 0..5u64 {
                let full = synthetic_series(&SyntheticConfig {
                    days: 200,
                    seed,
                    ..SyntheticConfig::default()
                });
                let cut = full.len() - 24;
                let history = LoadSeries {
                    start: full.start,
                    values: full.values[..cut].to_vec(),
                    unit: None,
                };
                let target = &full.values[cut..];

                let cfg = synthetic_e2e_config(seed);
                let models = fit(&history, &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
                let forecast =
                    forecast_day(&models, &history, &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
                let (_, model_mape) =
                    evaluate_mape(&forecast.aggregate, target).map_err(|e| e.to_string())?;
                let baseline = persistence_baseline(&history).map_err(|e| e.to_string())?;
                let (_, persistence_mape) =
                    evaluate_mape(&baseline, target).map_err(|e| e.to_string())?;
                if model_mape < persistence_mape {
                    wins += 1;
                }
                lines.push(format!(
                    "seed {seed}: model {model_mape:.2}% vs persistence {persistence_mape:.2}%"
                ));
            }
            if wins < 4 {
                return Err(format!("only {wins}/5 wins ({})", lines.join("; ")));
            }
            Ok(format!("{wins}/5 wins ({})", lines.join("; ")))
        },
    );
}

// --- criterion 7 -----------------------------------------------------

#[test]
fn criterion_7_paper_protocol() {
    criterion(
        7,
        "year-long decomposition shape and six-variant protocol",
        || {
            // Stand-in evidence on generated data: a year of load-like
            // hourly values decomposes into 10±2 IMFs.
            let year = synthetic_year(1);
            let set = decompose(&year.values, &SiftConfig::default()).map_err(|e| e.to_string())?;
            let k = set.imfs.len();
            if !(8..=12).contains(&k) {
                return Err(format!("synthetic year gave {k} IMFs, outside 10±2"));
            }

            // The real-data branch runs only when a dataset is supplied.
            let mut detail = format!("synthetic year: {k} IMFs + res");
            match std::env::var("EUNITE_CSV") {
                Err(_) => {
                    detail.push_str("; EUNITE_CSV not set, dataset branch skipped");
                }
                Ok(path) => {
                    let series = stlf_core::data::load_csv(
                        Path::new(&path),
                        &stlf_core::data::CsvSchema::default(),
                    )
                    .map_err(|e| e.to_string())?;
                    if series.len() != 8760 {
                        return Err(format!("{path}: expected 8760 hours, got {}", series.len()));
                    }
                    let set = decompose(&series.values, &SiftConfig::default())
                        .map_err(|e| e.to_string())?;
                    if !(8..=12).contains(&set.imfs.len()) {
                        return Err(format!("{path}: {} IMFs, outside 10±2", set.imfs.len()));
                    }
                    let cut = series.len() - 24;
                    let history = LoadSeries {
                        start: series.start,
                        values: series.values[..cut].to_vec(),
                        unit: None,
                    };
                    let cfg = PipelineConfig::default();
                    let table =
                        compare_methods(&history, &series.values[cut..], &Variant::ALL, &cfg)
                            .map_err(|e| e.to_string())?;
                    let mut csv = Vec::new();
                    write_table_csv(&mut csv, &table).map_err(|e| e.to_string())?;
                    let header = String::from_utf8_lossy(&csv)
                        .lines()
                        .next()
                        .unwrap_or_default()
                        .to_string();
                    for variant in Variant::ALL {
                        if !header.contains(variant.name()) {
                            return Err(format!("table lacks column for {}", variant.name()));
                        }
                    }
                    // Reference point ~1.4–3% on the published data; reported,
                    // not asserted.
                    let best = table
                        .succeeded()
                        .find(|(label, _)| *label == "emd_pso_lstm")
                        .map(|(_, outcome)| outcome.mape_mean);
                    if let Some(mape) = best {
                        detail.push_str(&format!("; EUNITE emd_pso_lstm mean MAPE {mape:.2}%"));
                    }
                }
            }
            Ok(detail)
        },
    );
}

// --- criterion 8 -----------------------------------------------------

#[test]
fn criterion_8_bitwise_determinism() {
    criterion(
        8,
        "train+predict twice from one manifest gives bitwise-equal forecasts",
        || {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let series = synthetic_series(&SyntheticConfig {
                days: 30,
                seed: 3,
                ..SyntheticConfig::default()
            });
            let input = dir.path().join("input.csv");
            let mut buf = Vec::new();
            write_series_csv(&mut buf, &series).map_err(|e| e.to_string())?;
            std::fs::write(&input, buf).map_err(|e| e.to_string())?;

            let cfg_path = dir.path().join("run.cfg");
            std::fs::write(
                &cfg_path,
                "variant = emd_pso_lstm\n\
                 seed = 11\n\
                 train.epochs = 12\n\
                 train.hidden_dim = 5\n\
                 swarm.particles = 4\n\
                 swarm.iterations = 3\n\
                 probe_epochs = 1\n",
            )
            .map_err(|e| e.to_string())?;

            let run = |args: &[&str]| -> Result<(), String> {
                let out = Command::new(env!("CARGO_BIN_EXE_stlf"))
                    .args(args)
                    .output()
                    .map_err(|e| e.to_string())?;
                if out.status.success() {
                    Ok(())
                } else {
                    Err(format!(
                        "{args:?}: {}",
                        String::from_utf8_lossy(&out.stderr)
                    ))
                }
            };

            let t1 = dir.path().join("t1");
            run(&[
                "train",
                "--input",
                input.to_str().unwrap(),
                "--config",
                cfg_path.to_str().unwrap(),
                "--out-dir",
                t1.to_str().unwrap(),
            ])?;
            // Second run replays the first run's manifest verbatim.
            let t2 = dir.path().join("t2");
            run(&[
                "train",
                "--input",
                input.to_str().unwrap(),
                "--config",
                t1.join("manifest.txt").to_str().unwrap(),
                "--out-dir",
                t2.to_str().unwrap(),
            ])?;
            let p1 = dir.path().join("p1");
            let p2 = dir.path().join("p2");
            for (models, pred) in [(&t1, &p1), (&t2, &p2)] {
                run(&[
                    "predict",
                    "--input",
                    input.to_str().unwrap(),
                    "--models",
                    models.to_str().unwrap(),
                    "--out-dir",
                    pred.to_str().unwrap(),
                ])?;
            }
            let a = std::fs::read(p1.join("forecast.csv")).map_err(|e| e.to_string())?;
            let b = std::fs::read(p2.join("forecast.csv")).map_err(|e| e.to_string())?;
            if a != b {
                return Err("forecast CSVs differ between replayed runs".into());
            }
            Ok(format!("identical forecast.csv ({} bytes)", a.len()))
        },
    );
}

// --- criterion 9 -----------------------------------------------------

#[test]
fn criterion_9_metric_fidelity() {
    criterion(9, "MAPE reproduces the published reference numbers", || {
        let (per_hour, _) = evaluate_mape(&[731.91], &[754.00]).map_err(|e| e.to_string())?;
        if (per_hour[0] - 2.93).abs() > 0.01 {
            return Err(format!("row MAPE {:.4} not within 0.01 of 2.93", per_hour[0]));
        }

        // Published per-hour MAPE column of the best method, whose mean is
        // reported as 1.43.
        let column = [
            1.77, 0.31, 2.68, 2.30, 1.64, 2.56, 0.53, 0.75, 1.92, 1.22, 0.60, 0.08, 0.77, 2.58,
            2.03, 0.94, 2.97, 2.45, 0.20, 1.29, 1.28, 1.49, 0.65, 1.26,
        ];
        let mean: f64 = column.iter().sum::<f64>() / column.len() as f64;
        if (mean - 1.43).abs() > 0.01 {
            return Err(format!("column mean {mean:.4} not within 0.01 of 1.43"));
        }
        Ok(format!(
            "row MAPE {:.2}%, column mean {mean:.4}% rounds to 1.43",
            per_hour[0]
        ))
    });
}
