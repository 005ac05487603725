use crate::error::{ensure, InvalidTunable};
use crate::signal_gen::SensorSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EyeState {
    #[default]
    Open,
    Closed,
}

/// Hysteresis thresholds on eye reflectance plus a dwell time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EyeClassifierConfig {
    /// Reflectance below which the eyelid is taken to cover the eye.
    pub close_threshold: f64,
    /// Reflectance above which the eye is taken to be open again.
    pub open_threshold: f64,
    /// How long a crossing must persist before the state flips.
    pub debounce_ms: u64,
}

impl Default for EyeClassifierConfig {
    fn default() -> Self {
        Self { close_threshold: 0.40, open_threshold: 0.60, debounce_ms: 30 }
    }
}

impl EyeClassifierConfig {
    pub fn validate(&self) -> Result<(), InvalidTunable> {
        ensure(self.close_threshold > 0.0 && self.close_threshold < 1.0, "detect.close_threshold", || {
            format!("{} not in (0, 1)", self.close_threshold)
        })?;
        ensure(
            self.open_threshold > self.close_threshold && self.open_threshold < 1.0,
            "detect.open_threshold",
            || format!("{} not in (close_threshold, 1)", self.open_threshold),
        )
    }
}

/// Debounced Schmitt trigger over the eye channel.
#[derive(Debug, Clone, Default)]
pub struct EyeClassifier {
    state: EyeState,
    /// Start of the current run of samples beyond the opposite threshold.
    pending_since: Option<u64>,
}

impl EyeClassifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&self) -> EyeState {
        self.state
    }

    pub fn classify_eye(&mut self, sample: &SensorSample, cfg: &EyeClassifierConfig) -> EyeState {
        let crossing = match self.state {
            EyeState::Open => sample.eye_ir < cfg.close_threshold,
            EyeState::Closed => sample.eye_ir > cfg.open_threshold,
        };
        if !crossing {
            self.pending_since = None;
            return self.state;
        }
        let since = *self.pending_since.get_or_insert(sample.t_ms);
        if sample.t_ms.saturating_sub(since) >= cfg.debounce_ms {
            self.state = match self.state {
                EyeState::Open => EyeState::Closed,
                EyeState::Closed => EyeState::Open,
            };
            self.pending_since = None;
        }
        self.state
    }
}
