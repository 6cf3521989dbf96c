use ndarray::Array2;

use crate::{Error, Result};

/// Hourly values arranged as a day-major grid of 24 columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadMatrix {
    grid: Array2<f64>,
}

impl LoadMatrix {
    /// Reshapes a flat hourly series into whole days.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() || !values.len().is_multiple_of(24) {
            return Err(Error::NotWholeDays { len: values.len() });
        }
        let days = values.len() / 24;
        let grid = Array2::from_shape_vec((days, 24), values.to_vec())
            .expect("shape checked above");
        Ok(Self { grid })
    }

    pub fn days(&self) -> usize {
        self.grid.nrows()
    }

    pub fn get(&self, day: usize, hour: usize) -> f64 {
        self.grid[(day, hour)]
    }

    pub fn set(&mut self, day: usize, hour: usize, value: f64) {
        self.grid[(day, hour)] = value;
    }

    /// Day `d` as a 24-value slice.
    pub fn day(&self, d: usize) -> ndarray::ArrayView1<'_, f64> {
        self.grid.row(d)
    }

    pub fn grid(&self) -> &Array2<f64> {
        &self.grid
    }

    /// Flattens back to the hourly series (row-major, chronological).
    pub fn to_values(&self) -> Vec<f64> {
        self.grid.iter().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.grid.iter().copied()
    }
}
