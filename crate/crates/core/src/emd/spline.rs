use crate::{Error, Result};

/// Envelope behavior beyond the outermost extrema.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPolicy {
    /// Reflect the two extrema nearest each end across the series boundary.
    /// Suppresses envelope swing at the ends.
    Mirror,
    /// Pin the nearest extremum value at the series boundary itself.
    Clamp,
}

/// Natural cubic spline through strictly increasing knots.
///
/// Second derivatives vanish at both end knots; with two knots the
/// interpolant degenerates to the straight line through them.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second_derivs: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} knot positions vs {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::InsufficientExtrema(format!(
                "need at least 2 knots, got {}",
                xs.len()
            )));
        }
        for i in 1..xs.len() {
            if xs[i] <= xs[i - 1] {
                return Err(Error::InvalidConfig(format!(
                    "knot positions must be strictly increasing at index {i}"
                )));
            }
        }

        // Tridiagonal solve for the knot second derivatives.
        let n = xs.len();
        let mut second = vec![0.0; n];
        let mut scratch = vec![0.0; n.saturating_sub(1)];
        for i in 1..n - 1 {
            let sig = (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1]);
            let p = sig * second[i - 1] + 2.0;
            second[i] = (sig - 1.0) / p;
            let slope_diff = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
                - (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
            scratch[i] = (6.0 * slope_diff / (xs[i + 1] - xs[i - 1]) - sig * scratch[i - 1]) / p;
        }
        for k in (1..n - 1).rev() {
            second[k] = second[k] * second[k + 1] + scratch[k];
        }

        Ok(Self {
            xs,
            ys,
            second_derivs: second,
        })
    }

    /// Evaluates the spline; outside the knot range the boundary polynomial
    /// extrapolates.
    pub fn evaluate(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let mut lo = 0;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.xs[mid] > x {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let h = self.xs[hi] - self.xs[lo];
        let a = (self.xs[hi] - x) / h;
        let b = (x - self.xs[lo]) / h;
        a * self.ys[lo]
            + b * self.ys[hi]
            + ((a * a * a - a) * self.second_derivs[lo]
                + (b * b * b - b) * self.second_derivs[hi])
                * h
                * h
                / 6.0
    }
}

/// Extends envelope knots past the series ends according to `policy`.
///
/// Knots already sitting on a boundary index are not duplicated.
fn extend_knots(extrema: &[(usize, f64)], length: usize, policy: BoundaryPolicy) -> Vec<(f64, f64)> {
    let mut knots: Vec<(f64, f64)> = extrema.iter().map(|&(i, v)| (i as f64, v)).collect();
    if knots.is_empty() {
        return knots;
    }
    let right_edge = (length - 1) as f64;
    match policy {
        BoundaryPolicy::Mirror => {
            // A knot already sitting on a boundary anchors the envelope
            // there; only unanchored ends get reflected support.
            let mut prefix: Vec<(f64, f64)> = Vec::new();
            if knots[0].0 > 0.0 {
                for &(x, y) in knots.iter().take(2) {
                    if x > 0.0 {
                        prefix.push((-x, y));
                    }
                }
                prefix.reverse();
            }
            let mut suffix: Vec<(f64, f64)> = Vec::new();
            if knots.last().unwrap().0 < right_edge {
                for &(x, y) in knots.iter().rev().take(2) {
                    if x < right_edge {
                        suffix.push((2.0 * right_edge - x, y));
                    }
                }
            }
            let mut extended = prefix;
            extended.append(&mut knots);
            extended.extend(suffix);
            extended
        }
        BoundaryPolicy::Clamp => {
            let mut extended = Vec::with_capacity(knots.len() + 2);
            if knots[0].0 > 0.0 {
                extended.push((0.0, knots[0].1));
            }
            extended.append(&mut knots);
            if extended.last().unwrap().0 < right_edge {
                let y = extended.last().unwrap().1;
                extended.push((right_edge, y));
            }
            extended
        }
    }
}

/// Cubic-spline envelope through `extrema`, sampled at indices
/// `0..length`, with boundary knots added per `policy`.
pub fn spline_envelope(
    extrema: &[(usize, f64)],
    length: usize,
    policy: BoundaryPolicy,
) -> Result<Vec<f64>> {
    let knots = extend_knots(extrema, length, policy);
    if knots.len() < 2 {
        return Err(Error::InsufficientExtrema(format!(
            "envelope needs ≥ 2 knots after boundary extension, got {}",
            knots.len()
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = knots.into_iter().unzip();
    let spline = CubicSpline::natural(xs, ys)?;
    Ok((0..length).map(|i| spline.evaluate(i as f64)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn two_boundary_knots_give_a_straight_line() {
        // Knots on the series boundary are not extended, so the natural
        // spline degenerates to the connecting line.
        let env = spline_envelope(&[(0, 1.0), (9, 4.0)], 10, BoundaryPolicy::Mirror).unwrap();
        for (i, &v) in env.iter().enumerate() {
            let line = 1.0 + 3.0 * i as f64 / 9.0;
            assert!((v - line).abs() < 1e-10, "index {i}: {v} vs {line}");
        }
        let env = spline_envelope(&[(0, 1.0), (9, 4.0)], 10, BoundaryPolicy::Clamp).unwrap();
        assert!((env[3] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn interpolates_knots_exactly() {
        let knots: Vec<(usize, f64)> = [2usize, 5, 11, 17]
            .iter()
            .map(|&i| (i, (i as f64 - 8.0).powi(2)))
            .collect();
        for policy in [BoundaryPolicy::Mirror, BoundaryPolicy::Clamp] {
            let env = spline_envelope(&knots, 20, policy).unwrap();
            for &(i, v) in &knots {
                assert!((env[i] - v).abs() < 1e-10, "{policy:?} knot {i}");
            }
        }
    }

    #[test]
    fn upper_envelope_of_sine_is_near_one_in_the_interior() {
        let n = 240; // 10 periods of sin(2πt/24)
        let series: Vec<f64> = (0..n).map(|t| (2.0 * PI * t as f64 / 24.0).sin()).collect();
        let maxima = crate::emd::find_extrema(&series).maxima;
        let env = spline_envelope(&maxima, n, BoundaryPolicy::Mirror).unwrap();
        for (i, &v) in env.iter().enumerate().take(2 * n / 3).skip(n / 3) {
            assert!((v - 1.0).abs() < 0.05, "index {i}: envelope {v}");
        }
    }

    #[test]
    fn no_knots_is_an_error() {
        assert!(matches!(
            spline_envelope(&[], 10, BoundaryPolicy::Mirror),
            Err(Error::InsufficientExtrema(_))
        ));
    }

    #[test]
    fn single_interior_knot_extends_to_a_constant() {
        let env = spline_envelope(&[(5, 2.0)], 11, BoundaryPolicy::Mirror).unwrap();
        for &v in &env {
            assert!((v - 2.0).abs() < 1e-10);
        }
    }
}
