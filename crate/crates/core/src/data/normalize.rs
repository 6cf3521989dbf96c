use crate::{Error, Result};

/// Min-max scaling parameters of one component's training data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationParams {
    pub x_min: f64,
    pub x_max: f64,
}

impl NormalizationParams {
    pub fn new(x_min: f64, x_max: f64) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max < x_min {
            return Err(Error::InvalidConfig(format!(
                "invalid normalization range [{x_min}, {x_max}]"
            )));
        }
        Ok(Self { x_min, x_max })
    }

    /// The exact min/max of `values`.
    pub fn fit(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NoDataRows);
        }
        let x_min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let x_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::new(x_min, x_max)
    }

    fn range(&self) -> Result<f64> {
        if self.x_max > self.x_min {
            Ok(self.x_max - self.x_min)
        } else {
            Err(Error::DegenerateRange(self.x_min))
        }
    }
}

/// Maps a value to `(x − x_min) / (x_max − x_min)`.
///
/// Values outside the fitted range map outside `[0, 1]`; they are not
/// clipped, so forecast-time extrapolation survives the round trip.
pub fn normalize(x: f64, params: &NormalizationParams) -> Result<f64> {
    Ok((x - params.x_min) / params.range()?)
}

/// Inverse of [`normalize`]: `x·(x_max − x_min) + x_min`.
pub fn denormalize(x: f64, params: &NormalizationParams) -> f64 {
    x * (params.x_max - params.x_min) + params.x_min
}

pub fn normalize_all(values: &[f64], params: &NormalizationParams) -> Result<Vec<f64>> {
    let range = params.range()?;
    Ok(values.iter().map(|x| (x - params.x_min) / range).collect())
}

pub fn denormalize_all(values: &[f64], params: &NormalizationParams) -> Vec<f64> {
    values.iter().map(|&x| denormalize(x, params)).collect()
}
