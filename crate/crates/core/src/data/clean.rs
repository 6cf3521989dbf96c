use super::LoadMatrix;
use crate::{Error, Result};

/// Bad-data filter and revision weights.
///
/// A cell is flagged when its deviation from the global mean exceeds
/// `3·σ·epsilon`. Flagged cells are replaced by a convex combination of
/// same-hour neighbors on adjacent days (weight `alpha`), adjacent hours on
/// the same day (`beta`) and the global mean (`gamma`).
#[derive(Debug, Clone, PartialEq)]
pub struct CleaningConfig {
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for CleaningConfig {
    fn default() -> Self {
        // Neighbors weighted above the global mean to preserve local shape.
        Self {
            epsilon: 1.0,
            alpha: 0.4,
            beta: 0.4,
            gamma: 0.2,
        }
    }
}

impl CleaningConfig {
    pub fn validate(&self) -> Result<()> {
        // Infinite epsilon is legal: the threshold then dominates and
        // nothing is ever flagged.
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be a positive number, got {}",
                self.epsilon
            )));
        }
        if self.alpha < 0.0 || self.beta < 0.0 || self.gamma < 0.0 {
            return Err(Error::InvalidConfig(
                "revision weights must be non-negative".into(),
            ));
        }
        let sum = self.alpha + self.beta + self.gamma;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "alpha + beta + gamma must equal 1, got {sum}"
            )));
        }
        Ok(())
    }
}

/// Statistics of one detection pass.
#[derive(Debug, Clone, PartialEq)]
pub struct CleaningStats {
    /// Global mean of the matrix.
    pub mean: f64,
    /// Population standard deviation of the matrix.
    pub stddev: f64,
    /// `(day, hour)` cells whose deviation exceeded the threshold.
    pub flagged: Vec<(usize, usize)>,
}

/// Flags every cell with `|x − μ| > 3·σ·epsilon`.
///
/// μ and σ are computed over the whole matrix; σ is the population standard
/// deviation. A constant matrix has σ = 0 and flags nothing.
pub fn detect_outliers(matrix: &LoadMatrix, cfg: &CleaningConfig) -> Result<CleaningStats> {
    cfg.validate()?;
    let n = (matrix.days() * 24) as f64;
    let mean = matrix.iter().sum::<f64>() / n;
    let var = matrix.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let stddev = var.sqrt();
    let threshold = 3.0 * stddev * cfg.epsilon;

    let mut flagged = Vec::new();
    for day in 0..matrix.days() {
        for hour in 0..24 {
            if (matrix.get(day, hour) - mean).abs() > threshold {
                flagged.push((day, hour));
            }
        }
    }
    Ok(CleaningStats {
        mean,
        stddev,
        flagged,
    })
}

/// Value that replaces cell `(day, hour)`.
///
/// Boundary cells count their single existing neighbor twice so the
/// `alpha/2` and `beta/2` coefficients still sum to `alpha` and `beta`.
pub fn revise_point(
    matrix: &LoadMatrix,
    day: usize,
    hour: usize,
    cfg: &CleaningConfig,
    stats: &CleaningStats,
) -> f64 {
    let days = matrix.days();
    let day_neighbors = if days == 1 {
        // No adjacent days exist at all; the global mean stands in.
        2.0 * stats.mean
    } else if day == 0 {
        2.0 * matrix.get(1, hour)
    } else if day == days - 1 {
        2.0 * matrix.get(day - 1, hour)
    } else {
        matrix.get(day - 1, hour) + matrix.get(day + 1, hour)
    };
    let hour_neighbors = if hour == 0 {
        2.0 * matrix.get(day, 1)
    } else if hour == 23 {
        2.0 * matrix.get(day, 22)
    } else {
        matrix.get(day, hour - 1) + matrix.get(day, hour + 1)
    };
    cfg.alpha / 2.0 * day_neighbors + cfg.beta / 2.0 * hour_neighbors + cfg.gamma * stats.mean
}

/// One revision record: `(day, hour, original, revised)`.
pub type Revision = (usize, usize, f64, f64);

/// Single-pass cleaning: detect, then revise every flagged cell using
/// pre-pass statistics and pre-pass neighbor values.
///
/// Returns the cleaned matrix, the detection stats and the revision
/// records.
pub fn clean_matrix(
    matrix: &LoadMatrix,
    cfg: &CleaningConfig,
) -> Result<(LoadMatrix, CleaningStats, Vec<Revision>)> {
    let stats = detect_outliers(matrix, cfg)?;
    let mut cleaned = matrix.clone();
    let mut revisions = Vec::with_capacity(stats.flagged.len());
    for &(day, hour) in &stats.flagged {
        let original = matrix.get(day, hour);
        let revised = revise_point(matrix, day, hour, cfg, &stats);
        cleaned.set(day, hour, revised);
        revisions.push((day, hour, original, revised));
    }
    Ok((cleaned, stats, revisions))
}

/// Writes a cleaning report as `day,hour,original,revised` CSV rows.
pub fn write_cleaning_report<W: std::io::Write>(mut w: W, revisions: &[Revision]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<writer>".into(),
        source,
    };
    writeln!(w, "day,hour,original,revised").map_err(io_err)?;
    for &(day, hour, original, revised) in revisions {
        writeln!(w, "{day},{hour},{original},{revised}").map_err(io_err)?;
    }
    Ok(())
}
