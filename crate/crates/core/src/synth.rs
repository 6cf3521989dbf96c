//! Synthetic load-like series for demos, experiments and tests.

use chrono::NaiveDateTime;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::data::LoadSeries;

/// Parameters of a daily+weekly sinusoid profile with Gaussian noise.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub days: usize,
    pub base: f64,
    pub daily_amplitude: f64,
    pub weekly_amplitude: f64,
    /// Noise standard deviation as a fraction of `base`.
    pub noise_fraction: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            days: 200,
            base: 700.0,
            daily_amplitude: 100.0,
            weekly_amplitude: 50.0,
            noise_fraction: 0.02,
            seed: 0,
        }
    }
}

/// Generates `days × 24` hourly values starting 1998-01-01T00:00.
pub fn synthetic_series(cfg: &SyntheticConfig) -> LoadSeries {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let sigma = cfg.noise_fraction * cfg.base;
    let two_pi = 2.0 * std::f64::consts::PI;
    let values = (0..cfg.days * 24)
        .map(|t| {
            let t = t as f64;
            let daily = cfg.daily_amplitude * (two_pi * t / 24.0).sin();
            let weekly = cfg.weekly_amplitude * (two_pi * t / (24.0 * 7.0)).sin();
            // Box-Muller from two uniforms keeps the dependency surface small.
            let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.random_range(0.0..1.0);
            let gauss = (-2.0 * u1.ln()).sqrt() * (two_pi * u2).cos();
            cfg.base + daily + weekly + sigma * gauss
        })
        .collect();
    let start = NaiveDateTime::parse_from_str("1998-01-01T00:00:00", "%Y-%m-%dT%H:%M:%S")
        .expect("fixed timestamp parses");
    LoadSeries::new(start, values)
}

/// Year-long profile shaped like an hourly utility-load recording:
/// daily cycle with morning/evening harmonics, weekly cycle, synoptic
/// (multi-day) weather swings, monthly and annual drift, plus noise.
pub fn synthetic_year(seed: u64) -> LoadSeries {
    let mut series = synthetic_series(&SyntheticConfig {
        days: 365,
        seed,
        ..SyntheticConfig::default()
    });
    let two_pi = 2.0 * std::f64::consts::PI;
    for (t, v) in series.values.iter_mut().enumerate() {
        let t = t as f64;
        let day = t / 24.0;
        *v += 35.0 * (two_pi * t / 12.0 + 0.9).sin()
            + 15.0 * (two_pi * t / 8.0 + 0.4).sin()
            + 25.0 * (two_pi * day / 2.05 + 0.2).sin()
            + 40.0 * (two_pi * day / 4.2).sin() * (1.0 + 0.5 * (two_pi * day / 19.0).sin())
            + 25.0 * (two_pi * day / 9.3 + 1.3).sin()
            + 30.0 * (two_pi * day / 30.5 + 0.7).sin()
            + 40.0 * (two_pi * day / 70.0 + 0.5).sin()
            + 120.0 * (two_pi * day / 365.0 + 1.0).cos();
    }
    series
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let cfg = SyntheticConfig::default();
        assert_eq!(synthetic_series(&cfg), synthetic_series(&cfg));
        let other = SyntheticConfig {
            seed: 1,
            ..SyntheticConfig::default()
        };
        assert_ne!(synthetic_series(&cfg), synthetic_series(&other));
    }

    #[test]
    fn length_and_scale_are_sane() {
        let s = synthetic_series(&SyntheticConfig::default());
        assert_eq!(s.len(), 200 * 24);
        for &v in &s.values {
            assert!(v > 400.0 && v < 1000.0, "value {v} out of plausible band");
        }
    }
}
