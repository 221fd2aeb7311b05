// SPDX-License-Identifier: Apache-2.0

//! Small-sample statistics shared by the estimators and the experiment reports.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::seed::Seed;

/// Monte Carlo estimate over independent trials.
///
/// Trials whose cost is unreachable are counted in `failures` and excluded
/// from `mean` and `std_err`, so one failed trial cannot swamp the estimate.
/// `mean` is NaN when every trial failed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub trials: usize,
    pub failures: usize,
}

impl Estimate {
    /// Builds an estimate from per-trial values; non-finite values are failures.
    pub fn from_samples(samples: &[f64]) -> Self {
        let finite: Vec<f64> = samples.iter().copied().filter(|v| v.is_finite()).collect();
        Estimate {
            mean: mean(&finite).unwrap_or(f64::NAN),
            std_err: std_err(&finite).unwrap_or(f64::NAN),
            trials: samples.len(),
            failures: samples.len() - finite.len(),
        }
    }

    /// Exact value, no sampling error.
    pub fn exact(value: f64) -> Self {
        Estimate {
            mean: value,
            std_err: 0.0,
            trials: 0,
            failures: 0,
        }
    }

    pub fn failure_fraction(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.failures as f64 / self.trials as f64
        }
    }

    pub fn negated(self) -> Self {
        Estimate {
            mean: -self.mean,
            ..self
        }
    }

    /// True when `value` lies within `k` standard errors of the mean.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_err
    }
}

pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return if xs.is_empty() { None } else { Some(0.0) };
    }
    let m = mean(xs)?;
    Some(xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64)
}

/// Undefined below two samples.
pub fn std_err(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    variance(xs).map(|v| (v / xs.len() as f64).sqrt())
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Percentile bootstrap interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Bootstrap CI for `mean(numer) / mean(denom)`, resampling both groups
/// independently. Returns `None` if either group is empty.
pub fn bootstrap_ratio_ci(
    numer: &[f64],
    denom: &[f64],
    resamples: usize,
    level: f64,
    seed: Seed,
) -> Option<Interval> {
    if numer.is_empty() || denom.is_empty() || resamples == 0 {
        return None;
    }
    let mut rng = seed.rng();
    let mut ratios = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let a = resample_mean(numer, &mut rng);
        let b = resample_mean(denom, &mut rng);
        ratios.push(a / b);
    }
    ratios.sort_by(f64::total_cmp);
    let alpha = (1.0 - level) / 2.0;
    Some(Interval {
        lo: quantile_sorted(&ratios, alpha),
        hi: quantile_sorted(&ratios, 1.0 - alpha),
    })
}

fn resample_mean<R: Rng>(xs: &[f64], rng: &mut R) -> f64 {
    let n = xs.len();
    (0..n).map(|_| xs[rng.random_range(0..n)]).sum::<f64>() / n as f64
}

/// Linear-interpolated quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}
