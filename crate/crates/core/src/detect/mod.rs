//! Vigilance and cardiac metrics from raw sensor samples.
//!
//! Each detector is a plain state value stepped once per sample. [`Detector`]
//! bundles them into the per-tick pipeline used by the harness.

mod blink;
mod eye;
mod heart;
mod peaks;

use thiserror::Error;

pub use blink::{compute_perclos, BlinkEvent, BlinkTracker, BlinkTrackerConfig, VigilanceMetrics};
pub use eye::{EyeClassifier, EyeClassifierConfig, EyeState};
pub use heart::{is_slowdown, HeartConfig, HeartEstimate, HeartEstimator};
pub use peaks::{PeakDetector, PeakDetectorConfig};

use crate::error::InvalidTunable;
use crate::signal_gen::SensorSample;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetectError {
    #[error("sample at {t_ms} ms does not follow previous sample at {prev_ms} ms")]
    OutOfOrder { prev_ms: u64, t_ms: u64 },
    #[error("PERCLOS window is empty")]
    EmptyWindow,
}

/// Every detection tunable.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DetectConfig {
    pub eye: EyeClassifierConfig,
    pub blink: BlinkTrackerConfig,
    pub peaks: PeakDetectorConfig,
    pub heart: HeartConfig,
}

impl DetectConfig {
    pub fn validate(&self) -> Result<(), InvalidTunable> {
        self.eye.validate()?;
        self.blink.validate()?;
        self.peaks.validate()?;
        self.heart.validate()
    }
}

/// Everything the detectors learned from one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectOutput {
    pub eye: EyeState,
    /// A closure that ended on this sample.
    pub closure: Option<BlinkEvent>,
    pub vigilance: VigilanceMetrics,
    /// Refined time of a heartbeat peak reported on this sample.
    pub peak_ms: Option<f64>,
    pub heart: HeartEstimate,
}

/// Eye classifier, blink tracker, peak detector and heart estimator driven
/// in lockstep.
#[derive(Debug, Clone, Default)]
pub struct Detector {
    cfg: DetectConfig,
    eye: EyeClassifier,
    blinks: BlinkTracker,
    peaks: PeakDetector,
    heart: HeartEstimator,
}

impl Detector {
    pub fn new(cfg: DetectConfig) -> Self {
        Self { cfg, ..Self::default() }
    }

    pub fn config(&self) -> &DetectConfig {
        &self.cfg
    }

    pub fn step(&mut self, sample: &SensorSample) -> Result<DetectOutput, DetectError> {
        let eye = self.eye.classify_eye(sample, &self.cfg.eye);
        let (closure, vigilance) = self.blinks.update_blink_tracker(sample.t_ms, eye, &self.cfg.blink)?;
        let peak_ms = self.peaks.detect_heart_peaks(sample, &self.cfg.peaks)?;
        let heart = self.heart.estimate_heart(sample.t_ms as f64, peak_ms, &self.cfg.heart);
        Ok(DetectOutput { eye, closure, vigilance, peak_ms, heart })
    }
}
