//! Sampling schedules, log-log slope fits, log-corrected compensation and
//! plateau checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// Values below this are treated as underflow and dropped before fitting.
pub const UNDERFLOW: f64 = 1e-300;

/// Fraction of the earliest samples ignored by [`check_decay`].
pub const DEFAULT_DISCARD: f64 = 0.2;

pub const MIN_FIT_SAMPLES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSample {
    pub t: f64,
    pub value: f64,
}

impl RateSample {
    pub fn new(t: f64, value: f64) -> Self {
        RateSample { t, value }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub window: (f64, f64),
    pub samples_used: usize,
    /// Samples removed as nonpositive or below [`UNDERFLOW`].
    pub dropped: usize,
}

/// `count` log-spaced times from `t0` to `t1`, both included.
pub fn sample_schedule(t0: f64, t1: f64, count: usize) -> Result<Vec<f64>> {
    if count < MIN_FIT_SAMPLES {
        return Err(Error::domain(format!("schedule needs at least {MIN_FIT_SAMPLES} samples, got {count}")));
    }
    if !(t0.is_finite() && t1.is_finite() && t0 > 0.0 && t1 > t0) {
        return Err(Error::domain(format!("schedule needs 0 < t0 < t1, got [{t0}, {t1}]")));
    }
    let (a, b) = (t0.ln(), t1.ln());
    let last = count - 1;
    Ok((0..count)
        .map(|i| match i {
            0 => t0,
            i if i == last => t1,
            i => (a + (b - a) * i as f64 / last as f64).exp(),
        })
        .collect())
}

/// Least squares of `log value` against `log t` over all usable samples.
pub fn fit_loglog(samples: &[RateSample]) -> Result<RateFit> {
    let usable: Vec<&RateSample> = samples
        .iter()
        .filter(|s| s.t > 0.0 && s.value.is_finite() && s.value >= UNDERFLOW)
        .collect();
    let dropped = samples.len() - usable.len();
    if usable.len() < MIN_FIT_SAMPLES {
        return Err(Error::Fit(format!(
            "{} usable samples, need {MIN_FIT_SAMPLES} ({dropped} dropped)",
            usable.len()
        )));
    }
    let x: Vec<f64> = usable.iter().map(|s| s.t.ln()).collect();
    let y: Vec<f64> = usable.iter().map(|s| s.value.ln()).collect();
    let n = x.len() as f64;
    let mx = compensated_sum(x.iter().copied()) / n;
    let my = compensated_sum(y.iter().copied()) / n;
    let sxx = compensated_sum(x.iter().map(|x| (x - mx) * (x - mx)));
    if !(sxx > 0.0) {
        return Err(Error::Fit("all sample times coincide".into()));
    }
    let sxy = compensated_sum(x.iter().zip(&y).map(|(x, y)| (x - mx) * (y - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = compensated_sum(x.iter().zip(&y).map(|(x, y)| {
        let r = y - (intercept + slope * x);
        r * r
    }));
    let (lo, hi) = usable
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.t), hi.max(s.t)));
    Ok(RateFit {
        slope,
        intercept,
        rms_residual: (rss / n).sqrt(),
        window: (lo, hi),
        samples_used: usable.len(),
        dropped,
    })
}

/// Fit after discarding the earliest `discard` fraction of samples (by time),
/// keeping at least [`MIN_FIT_SAMPLES`].
pub fn fit_window(samples: &[RateSample], discard: f64) -> Result<RateFit> {
    if !(0.0..1.0).contains(&discard) {
        return Err(Error::domain(format!("discard fraction {discard} outside [0, 1)")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.t.total_cmp(&b.t));
    let skip = ((sorted.len() as f64) * discard).floor() as usize;
    let skip = skip.min(sorted.len().saturating_sub(MIN_FIT_SAMPLES));
    fit_loglog(&sorted[skip..])
}

/// `(min, max)` of `value · t^p · (log t)^σ`.
pub fn log_corrected_fit(samples: &[RateSample], p: f64, sigma: f64) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::Fit("no samples".into()));
    }
    if let Some(s) = samples.iter().find(|s| !(s.t >= 2.0)) {
        return Err(Error::domain(format!("log-corrected fit needs t >= 2, got {}", s.t)));
    }
    Ok(samples
        .iter()
        .map(|s| s.value * s.t.powf(p) * s.t.ln().powf(sigma))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c), hi.max(c))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub lo: f64,
    pub hi: f64,
    pub ratio: f64,
}

/// Min and max over the trailing `window_fraction` of the samples (by time).
pub fn plateau_check(samples: &[RateSample], window_fraction: f64) -> Result<Plateau> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::domain(format!("window fraction {window_fraction} outside (0, 1]")));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.t.total_cmp(&b.t));
    let take = ((sorted.len() as f64) * window_fraction).ceil() as usize;
    if take == 0 {
        return Err(Error::Fit("empty plateau window".into()));
    }
    let window = &sorted[sorted.len() - take..];
    let (lo, hi) = window
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.value), hi.max(s.value)));
    Ok(Plateau { lo, hi, ratio: hi / lo })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub passed: bool,
    pub expected_slope: f64,
    pub tol: f64,
    /// `|slope - expected|`.
    pub gap: f64,
    pub fit: RateFit,
}

/// Pass iff the windowed slope is within `tol` of `expected_slope`.
pub fn check_decay(samples: &[RateSample], expected_slope: f64, tol: f64) -> Result<BoundCheck> {
    let fit = fit_window(samples, DEFAULT_DISCARD)?;
    let gap = (fit.slope - expected_slope).abs();
    Ok(BoundCheck {
        passed: gap <= tol,
        expected_slope,
        tol,
        gap,
        fit,
    })
}

/// Pairs times with values.
pub fn samples(t: &[f64], values: &[f64]) -> Vec<RateSample> {
    t.iter().zip(values).map(|(&t, &v)| RateSample::new(t, v)).collect()
}
