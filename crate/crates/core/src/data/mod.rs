//! Raw load ingestion, bad-data revision, normalization and windowing.

mod clean;
mod matrix;
mod normalize;
mod series;
mod window;

pub use clean::{
    clean_matrix, detect_outliers, revise_point, write_cleaning_report, CleaningConfig,
    CleaningStats, Revision,
};
pub use matrix::LoadMatrix;
pub use normalize::{denormalize, denormalize_all, normalize, normalize_all, NormalizationParams};
pub use series::{load_csv, write_series_csv, CsvSchema, LoadSeries};
pub use window::{build_windows, WindowSet};
