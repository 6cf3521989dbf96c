/// Interior local extrema of a series.
///
/// Only strict interior extrema count; a plateau of equal values is
/// reported once, at its midpoint index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExtremaSet {
    pub maxima: Vec<(usize, f64)>,
    pub minima: Vec<(usize, f64)>,
}

impl ExtremaSet {
    pub fn count(&self) -> usize {
        self.maxima.len() + self.minima.len()
    }
}

/// Finds all interior maxima and minima of `series`.
pub fn find_extrema(series: &[f64]) -> ExtremaSet {
    let mut out = ExtremaSet::default();
    let n = series.len();
    if n < 3 {
        return out;
    }

    // Compress runs of equal values into (start, end, value) segments so a
    // plateau is classified once.
    let mut segments: Vec<(usize, usize, f64)> = Vec::new();
    let mut start = 0;
    for i in 1..n {
        if series[i] != series[start] {
            segments.push((start, i - 1, series[start]));
            start = i;
        }
    }
    segments.push((start, n - 1, series[start]));

    for k in 1..segments.len().saturating_sub(1) {
        let (seg_start, seg_end, value) = segments[k];
        let prev = segments[k - 1].2;
        let next = segments[k + 1].2;
        let mid = (seg_start + seg_end) / 2;
        if value > prev && value > next {
            out.maxima.push((mid, value));
        } else if value < prev && value < next {
            out.minima.push((mid, value));
        }
    }
    out
}

/// Number of sign changes, counting a crossing through exact zeros once.
pub fn count_zero_crossings(series: &[f64]) -> usize {
    let mut crossings = 0;
    let mut last_sign = 0i8;
    for &v in series {
        let sign = if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        };
        if sign != 0 {
            if last_sign != 0 && sign != last_sign {
                crossings += 1;
            }
            last_sign = sign;
        }
    }
    crossings
}

/// IMF condition: extrema and zero-crossing counts differ by at most one.
pub fn satisfies_imf_condition(series: &[f64]) -> bool {
    let extrema = find_extrema(series).count() as i64;
    let crossings = count_zero_crossings(series) as i64;
    (extrema - crossings).abs() <= 1
}
