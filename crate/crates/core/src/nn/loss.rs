use ndarray::{Array1, ArrayView1};

use crate::{Error, Result};

/// Root mean squared error between prediction and target.
pub fn loss_rmse(pred: ArrayView1<'_, f64>, target: ArrayView1<'_, f64>) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(Error::ShapeMismatch(format!(
            "prediction length {} vs target length {}",
            pred.len(),
            target.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::ShapeMismatch("empty prediction".into()));
    }
    let mse = pred
        .iter()
        .zip(target.iter())
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / pred.len() as f64;
    Ok(mse.sqrt())
}

/// ∂RMSE/∂pred; zero at zero residual by convention.
pub(crate) fn rmse_gradient(pred: &Array1<f64>, target: ArrayView1<'_, f64>) -> Array1<f64> {
    let n = pred.len() as f64;
    let rmse = loss_rmse(pred.view(), target).expect("shapes already validated");
    if rmse == 0.0 {
        return Array1::zeros(pred.len());
    }
    let mut grad = pred - &target;
    grad.mapv_inplace(|g| g / (n * rmse));
    grad
}
