//! Empirical mode decomposition.
//!
//! A series is sifted into intrinsic mode functions by repeatedly
//! subtracting the mean of its upper and lower cubic-spline envelopes, then
//! the extracted IMF is removed from the running residual and the process
//! repeats until the residual is trend-like (at most two extrema) or the
//! component cap is hit. Components can afterwards be recombined into
//! frequency parts before modeling.

mod extrema;
mod spline;

pub use extrema::{count_zero_crossings, find_extrema, satisfies_imf_condition, ExtremaSet};
pub use spline::{spline_envelope, BoundaryPolicy, CubicSpline};

use crate::{Error, Result};

/// Sifting controls.
#[derive(Debug, Clone, PartialEq)]
pub struct SiftConfig {
    /// Cauchy-style stopping ratio Σ(h_prev − h)² / Σ h_prev².
    pub sd_threshold: f64,
    /// Hard cap on sifting passes per IMF.
    pub max_sift_iters: usize,
    /// Hard cap on extracted IMFs.
    pub max_imfs: usize,
    pub boundary_policy: BoundaryPolicy,
}

impl Default for SiftConfig {
    fn default() -> Self {
        // 0.2 under-sifts with the ratio-of-sums criterion and merges
        // adjacent scales; 0.05 with a deeper cap keeps octaves separated.
        Self {
            sd_threshold: 0.05,
            max_sift_iters: 30,
            max_imfs: 16,
            boundary_policy: BoundaryPolicy::Mirror,
        }
    }
}

impl SiftConfig {
    pub fn validate(&self) -> Result<()> {
        // Infinite sd_threshold is legal and stops after a single sift.
        if self.sd_threshold.is_nan() || self.sd_threshold <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "sd_threshold must be a positive number, got {}",
                self.sd_threshold
            )));
        }
        if self.max_sift_iters == 0 || self.max_imfs == 0 {
            return Err(Error::InvalidConfig(
                "max_sift_iters and max_imfs must be ≥ 1".into(),
            ));
        }
        Ok(())
    }
}

/// Ordered IMFs plus the final residual.
#[derive(Debug, Clone, PartialEq)]
pub struct ImfSet {
    pub imfs: Vec<Vec<f64>>,
    pub residual: Vec<f64>,
    /// Sifting passes spent on each IMF.
    pub sift_iterations: Vec<usize>,
    /// Whether the iteration cap forced that IMF out before convergence.
    pub iteration_capped: Vec<bool>,
}

impl ImfSet {
    /// IMFs plus residual.
    pub fn component_count(&self) -> usize {
        self.imfs.len() + 1
    }

    pub fn len(&self) -> usize {
        self.residual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residual.is_empty()
    }

    /// Element-wise Σ IMFs + residual.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut sum = vec![0.0; self.len()];
        for imf in &self.imfs {
            for (s, v) in sum.iter_mut().zip(imf) {
                *s += v;
            }
        }
        for (s, v) in sum.iter_mut().zip(&self.residual) {
            *s += v;
        }
        sum
    }
}

/// Endpoints that protrude beyond the nearest extremum become envelope
/// knots themselves, so the spline cannot cut through the signal there.
fn anchor_protruding_ends(knots: &mut Vec<(usize, f64)>, series: &[f64], upper: bool) {
    let last = series.len() - 1;
    let sticks_out = |a: f64, b: f64| if upper { a > b } else { a < b };
    if sticks_out(series[0], knots[0].1) && knots[0].0 != 0 {
        knots.insert(0, (0, series[0]));
    }
    let tail = *knots.last().expect("non-empty");
    if sticks_out(series[last], tail.1) && tail.0 != last {
        knots.push((last, series[last]));
    }
}

/// One sifting pass: returns `h` minus the envelope mean, and the mean.
///
/// The mean is `(e_max + e_min) / 2` of the upper and lower spline
/// envelopes.
pub fn sift_once(h: &[f64], cfg: &SiftConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let extrema = find_extrema(h);
    if extrema.maxima.is_empty() || extrema.minima.is_empty() {
        return Err(Error::InsufficientExtrema(format!(
            "{} maxima / {} minima; need both sides for envelopes",
            extrema.maxima.len(),
            extrema.minima.len()
        )));
    }
    let mut maxima = extrema.maxima;
    let mut minima = extrema.minima;
    anchor_protruding_ends(&mut maxima, h, true);
    anchor_protruding_ends(&mut minima, h, false);
    let upper = spline_envelope(&maxima, h.len(), cfg.boundary_policy)?;
    let lower = spline_envelope(&minima, h.len(), cfg.boundary_policy)?;
    let mean: Vec<f64> = upper
        .iter()
        .zip(&lower)
        .map(|(u, l)| (u + l) / 2.0)
        .collect();
    let sifted: Vec<f64> = h.iter().zip(&mean).map(|(v, m)| v - m).collect();
    Ok((sifted, mean))
}

fn sd_ratio(prev: &[f64], mean: &[f64]) -> f64 {
    // h_prev − h == mean, so the numerator is Σ mean².
    let num: f64 = mean.iter().map(|m| m * m).sum();
    let den: f64 = prev.iter().map(|v| v * v).sum();
    if den > 0.0 {
        num / den
    } else {
        f64::INFINITY
    }
}

fn can_sift(series: &[f64]) -> bool {
    let e = find_extrema(series);
    !e.maxima.is_empty() && !e.minima.is_empty() && e.count() > 2
}

/// One extracted IMF with its sifting diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SiftResult {
    pub imf: Vec<f64>,
    pub iterations: usize,
    /// True when `max_sift_iters` stopped the loop before both the SD
    /// threshold and the IMF count condition were met.
    pub hit_iteration_cap: bool,
}

/// Sifts `r` until the SD ratio drops below the threshold and the
/// extrema/zero-crossing condition holds, or the iteration cap fires
/// (logged as a warning).
pub fn extract_imf(r: &[f64], cfg: &SiftConfig) -> Result<SiftResult> {
    cfg.validate()?;
    if !can_sift(r) {
        return Err(Error::InsufficientExtrema(
            "series has too few extrema to sift".into(),
        ));
    }
    let mut h = r.to_vec();
    let mut iterations = 0;
    let mut hit_iteration_cap = false;
    loop {
        let (sifted, mean) = sift_once(&h, cfg)?;
        iterations += 1;
        let sd = sd_ratio(&h, &mean);
        h = sifted;
        if sd < cfg.sd_threshold && satisfies_imf_condition(&h) {
            break;
        }
        if iterations >= cfg.max_sift_iters {
            hit_iteration_cap = true;
            log::warn!(
                "sifting stopped by the {}-iteration cap (sd = {sd:.4})",
                cfg.max_sift_iters
            );
            break;
        }
        if !can_sift(&h) {
            // Nothing left to sift against; accept the current candidate.
            hit_iteration_cap = !satisfies_imf_condition(&h);
            break;
        }
    }
    Ok(SiftResult {
        imf: h,
        iterations,
        hit_iteration_cap,
    })
}

/// Full decomposition: extract IMFs from the running residual until it is
/// trend-like (≤ 2 extrema) or `max_imfs` is reached.
pub fn decompose(series: &[f64], cfg: &SiftConfig) -> Result<ImfSet> {
    cfg.validate()?;
    if series.len() < 4 {
        return Err(Error::NotDecomposable(format!(
            "length {} < 4",
            series.len()
        )));
    }
    let mut residual = series.to_vec();
    let mut imfs = Vec::new();
    let mut sift_iterations = Vec::new();
    let mut iteration_capped = Vec::new();

    while imfs.len() < cfg.max_imfs && find_extrema(&residual).count() > 2 {
        let result = extract_imf(&residual, cfg)?;
        for (r, v) in residual.iter_mut().zip(&result.imf) {
            *r -= v;
        }
        imfs.push(result.imf);
        sift_iterations.push(result.iterations);
        iteration_capped.push(result.hit_iteration_cap);
    }

    if imfs.is_empty() {
        return Err(Error::NotDecomposable(
            "series has at most 2 extrema; nothing to extract".into(),
        ));
    }
    Ok(ImfSet {
        imfs,
        residual,
        sift_iterations,
        iteration_capped,
    })
}

/// How IMFs beyond the merged high-frequency block are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MixScheme {
    /// IMFs 1..=n merge into one part; the remaining IMFs and the residual
    /// stay separate components.
    #[default]
    Separate,
    /// Everything outside the merged block collapses into a single
    /// low-frequency part.
    TwoPart,
}

/// Recombined frequency parts.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyParts {
    pub parts: Vec<Vec<f64>>,
    pub mix_index: usize,
}

impl FrequencyParts {
    pub fn sum(&self) -> Vec<f64> {
        let len = self.parts.first().map_or(0, Vec::len);
        let mut sum = vec![0.0; len];
        for part in &self.parts {
            for (s, v) in sum.iter_mut().zip(part) {
                *s += v;
            }
        }
        sum
    }
}

fn elementwise_sum<'a>(series: impl Iterator<Item = &'a Vec<f64>>, len: usize) -> Vec<f64> {
    let mut sum = vec![0.0; len];
    for s in series {
        for (acc, v) in sum.iter_mut().zip(s) {
            *acc += v;
        }
    }
    sum
}

/// Stacks IMFs 1..=`mix_index` into a high-frequency part.
pub fn recombine(imf_set: &ImfSet, mix_index: usize) -> Result<FrequencyParts> {
    recombine_with_scheme(imf_set, mix_index, MixScheme::Separate)
}

/// [`recombine`] with an explicit treatment of the remaining components.
pub fn recombine_with_scheme(
    imf_set: &ImfSet,
    mix_index: usize,
    scheme: MixScheme,
) -> Result<FrequencyParts> {
    let k = imf_set.imfs.len();
    if mix_index == 0 || mix_index > k {
        return Err(Error::MixIndexOutOfRange {
            n: mix_index,
            max: k,
        });
    }
    let len = imf_set.len();
    let high = elementwise_sum(imf_set.imfs.iter().take(mix_index), len);
    let mut parts = vec![high];
    match scheme {
        MixScheme::Separate => {
            for imf in imf_set.imfs.iter().skip(mix_index) {
                parts.push(imf.clone());
            }
            parts.push(imf_set.residual.clone());
        }
        MixScheme::TwoPart => {
            let mut low = elementwise_sum(imf_set.imfs.iter().skip(mix_index), len);
            for (acc, v) in low.iter_mut().zip(&imf_set.residual) {
                *acc += v;
            }
            parts.push(low);
        }
    }
    Ok(FrequencyParts { parts, mix_index })
}

/// Writes components as wide CSV: one column per IMF plus `res`, one row
/// per hour.
pub fn write_components_csv<W: std::io::Write>(mut w: W, imf_set: &ImfSet) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<writer>".into(),
        source,
    };
    let header: Vec<String> = (1..=imf_set.imfs.len())
        .map(|i| format!("imf{i}"))
        .chain(std::iter::once("res".to_string()))
        .collect();
    writeln!(w, "{}", header.join(",")).map_err(io_err)?;
    for row in 0..imf_set.len() {
        let mut fields: Vec<String> = imf_set
            .imfs
            .iter()
            .map(|imf| imf[row].to_string())
            .collect();
        fields.push(imf_set.residual[row].to_string());
        writeln!(w, "{}", fields.join(",")).map_err(io_err)?;
    }
    Ok(())
}
