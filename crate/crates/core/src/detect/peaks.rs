use std::collections::VecDeque;

use super::DetectError;
use crate::error::{ensure, InvalidTunable};
use crate::signal_gen::SensorSample;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakDetectorConfig {
    /// Minimum spacing between accepted peaks.
    pub refractory_ms: u64,
    /// A peak must exceed this fraction of the rolling maximum.
    pub rel_threshold: f64,
    /// Span of the rolling maximum/minimum.
    pub rolling_ms: u64,
    /// Rolling max minus rolling min below which the channel is treated as
    /// carrying no pulse (finger off the sensor).
    pub min_swing: f64,
}

impl Default for PeakDetectorConfig {
    fn default() -> Self {
        Self { refractory_ms: 250, rel_threshold: 0.6, rolling_ms: 2000, min_swing: 0.3 }
    }
}

impl PeakDetectorConfig {
    pub fn validate(&self) -> Result<(), InvalidTunable> {
        ensure(self.refractory_ms > 0, "detect.refractory_ms", || "must be positive".into())?;
        ensure(self.rel_threshold > 0.0 && self.rel_threshold < 1.0, "detect.rel_threshold", || {
            format!("{} not in (0, 1)", self.rel_threshold)
        })?;
        ensure(self.rolling_ms > 0, "detect.rolling_ms", || "must be positive".into())?;
        ensure((0.0..1.0).contains(&self.min_swing), "detect.min_swing", || {
            format!("{} not in [0, 1)", self.min_swing)
        })
    }
}

/// Monotonic deque giving the extreme value over a trailing time span.
#[derive(Debug, Clone, Default)]
struct RollingExtreme {
    q: VecDeque<(u64, f64)>,
}

impl RollingExtreme {
    /// `better(a, b)` is true when `a` dominates `b`.
    fn push(&mut self, t: u64, v: f64, span_ms: u64, better: fn(f64, f64) -> bool) {
        while let Some(&(_, back)) = self.q.back() {
            if better(back, v) {
                break;
            }
            self.q.pop_back();
        }
        self.q.push_back((t, v));
        while let Some(&(front_t, _)) = self.q.front() {
            if t - front_t < span_ms {
                break;
            }
            self.q.pop_front();
        }
    }

    fn value(&self) -> f64 {
        self.q.front().map_or(0.0, |&(_, v)| v)
    }
}

/// Streaming systolic-peak detector for the PPG channel.
///
/// A sample is a candidate once the following sample is seen, so peaks are
/// reported one sample late. The reported time is refined by fitting a
/// parabola through the candidate and its neighbours.
#[derive(Debug, Clone, Default)]
pub struct PeakDetector {
    history: VecDeque<SensorSample>,
    max: RollingExtreme,
    min: RollingExtreme,
    last_peak_sample_ms: Option<u64>,
}

impl PeakDetector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn detect_heart_peaks(
        &mut self,
        sample: &SensorSample,
        cfg: &PeakDetectorConfig,
    ) -> Result<Option<f64>, DetectError> {
        if let Some(prev) = self.history.back() {
            if sample.t_ms <= prev.t_ms {
                return Err(DetectError::OutOfOrder { prev_ms: prev.t_ms, t_ms: sample.t_ms });
            }
        }
        self.history.push_back(*sample);
        if self.history.len() > 3 {
            self.history.pop_front();
        }
        self.max.push(sample.t_ms, sample.ppg_ir, cfg.rolling_ms, |a, b| a > b);
        self.min.push(sample.t_ms, sample.ppg_ir, cfg.rolling_ms, |a, b| a < b);

        let [before, mid, after] = match self.history.make_contiguous() {
            [a, b, c] => [*a, *b, *c],
            _ => return Ok(None),
        };
        let is_local_max = mid.ppg_ir > before.ppg_ir && mid.ppg_ir >= after.ppg_ir;
        if !is_local_max {
            return Ok(None);
        }
        let rolling_max = self.max.value();
        if mid.ppg_ir <= cfg.rel_threshold * rolling_max || rolling_max - self.min.value() < cfg.min_swing {
            return Ok(None);
        }
        if let Some(last) = self.last_peak_sample_ms {
            if mid.t_ms - last < cfg.refractory_ms {
                return Ok(None);
            }
        }
        self.last_peak_sample_ms = Some(mid.t_ms);
        Ok(Some(refine(before, mid, after)))
    }
}

/// Vertex of the parabola through three equally spaced samples.
fn refine(before: SensorSample, mid: SensorSample, after: SensorSample) -> f64 {
    let half_step = (after.t_ms - before.t_ms) as f64 / 2.0;
    let curvature = before.ppg_ir - 2.0 * mid.ppg_ir + after.ppg_ir;
    if curvature >= 0.0 {
        return mid.t_ms as f64;
    }
    let shift = 0.5 * (before.ppg_ir - after.ppg_ir) / curvature;
    mid.t_ms as f64 + shift.clamp(-0.5, 0.5) * half_step
}
