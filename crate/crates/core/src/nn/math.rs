use ndarray::{Array1, Array2, ArrayView1};

pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// acc += u ⊗ v
pub(crate) fn add_outer(acc: &mut Array2<f64>, u: &Array1<f64>, v: ArrayView1<'_, f64>) {
    for (mut row, &ui) in acc.rows_mut().into_iter().zip(u.iter()) {
        row.scaled_add(ui, &v);
    }
}

/// acc += Wᵀ·u
pub(crate) fn add_matvec_t(acc: &mut Array1<f64>, w: &Array2<f64>, u: &Array1<f64>) {
    for (row, &ui) in w.rows().into_iter().zip(u.iter()) {
        acc.scaled_add(ui, &row);
    }
}

/// Wᵀ·u
pub(crate) fn matvec_t(w: &Array2<f64>, u: &Array1<f64>) -> Array1<f64> {
    let mut out = Array1::zeros(w.ncols());
    add_matvec_t(&mut out, w, u);
    out
}
