use std::collections::VecDeque;

use crate::error::{ensure, InvalidTunable};
use crate::signal_gen::{MAX_BPM, MIN_BPM};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeartConfig {
    /// Trailing span whose inter-peak intervals feed the median.
    pub bpm_window_ms: u64,
    /// Time constant of the baseline moving average.
    pub baseline_tau_ms: f64,
    /// Slowdown when the current rate drops below this fraction of baseline.
    pub slowdown_ratio: f64,
}

impl Default for HeartConfig {
    fn default() -> Self {
        Self { bpm_window_ms: 10_000, baseline_tau_ms: 60_000.0, slowdown_ratio: 0.9 }
    }
}

impl HeartConfig {
    pub fn validate(&self) -> Result<(), InvalidTunable> {
        ensure(self.bpm_window_ms > 0, "detect.bpm_window_ms", || "must be positive".into())?;
        ensure(
            self.baseline_tau_ms > 0.0 && self.baseline_tau_ms.is_finite(),
            "detect.baseline_tau_ms",
            || format!("{} must be positive", self.baseline_tau_ms),
        )?;
        ensure(self.slowdown_ratio > 0.0 && self.slowdown_ratio < 1.0, "detect.slowdown_ratio", || {
            format!("{} not in (0, 1)", self.slowdown_ratio)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HeartEstimate {
    /// Current rate; 0 when not valid.
    pub bpm: f64,
    /// Slow reference rate; 0 until the first valid estimate.
    pub baseline_bpm: f64,
    pub slowdown: bool,
    /// At least three peaks in the trailing window and a plausible rate.
    pub valid: bool,
}

/// Heart rate from peak times, with a slow baseline to flag a drop.
///
/// The baseline is an exponential moving average updated once per accepted
/// peak. While a slowdown is flagged the baseline is frozen, so a sustained
/// drop keeps being reported against the pre-drop reference.
#[derive(Debug, Clone, Default)]
pub struct HeartEstimator {
    peaks: VecDeque<f64>,
    baseline: Option<f64>,
    baseline_at: f64,
    estimate: HeartEstimate,
}

impl HeartEstimator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts with an established baseline, as if a long steady stretch at
    /// `bpm` had already been observed.
    pub fn with_baseline(bpm: f64) -> Self {
        Self { baseline: Some(bpm), ..Self::default() }
    }

    pub fn estimate(&self) -> HeartEstimate {
        self.estimate
    }

    /// Advances to `now_ms`, folding in a newly detected peak if any.
    pub fn estimate_heart(&mut self, now_ms: f64, peak: Option<f64>, cfg: &HeartConfig) -> HeartEstimate {
        let fresh = match peak {
            Some(t) if self.peaks.back().is_none_or(|&last| t > last) => {
                self.peaks.push_back(t);
                true
            }
            _ => false,
        };
        let window = cfg.bpm_window_ms as f64;
        while let Some(&front) = self.peaks.front() {
            if now_ms - front < window {
                break;
            }
            self.peaks.pop_front();
        }

        let bpm = self.median_interval().map(|iv| 60_000.0 / iv);
        let Some(bpm) = bpm.filter(|b| (MIN_BPM..=MAX_BPM).contains(b)) else {
            self.estimate = HeartEstimate {
                bpm: 0.0,
                baseline_bpm: self.baseline.unwrap_or(0.0),
                slowdown: false,
                valid: false,
            };
            return self.estimate;
        };

        let newest = *self.peaks.back().expect("median implies peaks");
        let baseline = *self.baseline.get_or_insert_with(|| {
            self.baseline_at = newest;
            bpm
        });
        let slowdown = is_slowdown(bpm, baseline, cfg.slowdown_ratio);
        if fresh && !slowdown {
            let dt = (newest - self.baseline_at).max(0.0);
            let alpha = 1.0 - (-dt / cfg.baseline_tau_ms).exp();
            self.baseline = Some(baseline + alpha * (bpm - baseline));
        }
        if fresh {
            self.baseline_at = newest;
        }
        self.estimate =
            HeartEstimate { bpm, baseline_bpm: self.baseline.unwrap_or(baseline), slowdown, valid: true };
        self.estimate
    }

    fn median_interval(&self) -> Option<f64> {
        if self.peaks.len() < 3 {
            return None;
        }
        let mut intervals: Vec<f64> =
            self.peaks.iter().zip(self.peaks.iter().skip(1)).map(|(a, b)| b - a).collect();
        intervals.sort_by(f64::total_cmp);
        let n = intervals.len();
        Some(if n % 2 == 1 { intervals[n / 2] } else { 0.5 * (intervals[n / 2 - 1] + intervals[n / 2]) })
    }
}

pub fn is_slowdown(bpm: f64, baseline_bpm: f64, ratio: f64) -> bool {
    bpm < ratio * baseline_bpm
}
