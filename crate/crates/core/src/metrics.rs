//! Tournament metrics: binary gain, score and normal-approximation 95%
//! confidence radii.

use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("no samples")]
    EmptySample,
    #[error("a confidence radius needs at least two samples")]
    InsufficientSample,
}

/// Mean binary outcome in percent.
pub fn binary_gain(outcomes: &[i8]) -> Result<f64, MetricsError> {
    if outcomes.is_empty() {
        return Err(MetricsError::EmptySample);
    }
    let sum: i64 = outcomes.iter().map(|&b| i64::from(b)).sum();
    Ok(sum as f64 / outcomes.len() as f64 * 100.0)
}

/// Mean terminal score.
pub fn score_metric(scores: &[f64]) -> Result<f64, MetricsError> {
    if scores.is_empty() {
        return Err(MetricsError::EmptySample);
    }
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// `1.96 · s / sqrt(n)` with the unbiased sample standard deviation `s`.
pub fn confidence_radius_95(samples: &[f64]) -> Result<f64, MetricsError> {
    let n = samples.len();
    if n < 2 {
        return Err(MetricsError::InsufficientSample);
    }
    // shifted by the first sample so constant data gives exactly zero
    let shift = samples[0];
    let sum: f64 = samples.iter().map(|x| x - shift).sum();
    let sum_sq: f64 = samples.iter().map(|x| (x - shift) * (x - shift)).sum();
    let var = ((sum_sq - sum * sum / n as f64) / (n - 1) as f64).max(0.0);
    Ok(1.96 * libm::sqrt(var) / libm::sqrt(n as f64))
}

/// Aggregate of one cell. Percentages are in `[0, 100]`; `gain` and its
/// radius are in percentage points; `score` is in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsSummary {
    pub n: usize,
    pub gain: f64,
    /// NaN when `n < 2`.
    pub cr95_gain: f64,
    pub win: f64,
    pub draw: f64,
    pub loss: f64,
    pub score: f64,
    /// NaN when `n < 2`.
    pub cr95_score: f64,
}

/// Summarizes `(b, score)` samples.
pub fn summarize(samples: &[(i8, f64)]) -> Result<MetricsSummary, MetricsError> {
    let n = samples.len();
    if n == 0 {
        return Err(MetricsError::EmptySample);
    }
    let count = |b: i8| samples.iter().filter(|s| s.0 == b).count();
    let pct = |k: usize| k as f64 * 100.0 / n as f64;
    let (w, d, l) = (count(1), count(0), count(-1));
    let b_pct: Vec<f64> = samples.iter().map(|s| f64::from(s.0) * 100.0).collect();
    let scores: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let radius = |xs: &[f64]| confidence_radius_95(xs).unwrap_or(f64::NAN);
    Ok(MetricsSummary {
        n,
        // computed from the counts so that gain = win − loss holds to rounding
        gain: pct(w) - pct(l),
        cr95_gain: radius(&b_pct),
        win: pct(w),
        draw: pct(d),
        loss: pct(l),
        score: score_metric(&scores)?,
        cr95_score: radius(&scores),
    })
}
