use crate::error::{ensure, InvalidTunable};

/// On/off pulsing of the piezo buzzer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirenPattern {
    pub period_ms: u64,
    /// Fraction of each period the buzzer sounds.
    pub duty: f64,
}

impl Default for SirenPattern {
    fn default() -> Self {
        Self { period_ms: 500, duty: 0.5 }
    }
}

impl SirenPattern {
    pub fn validate(&self) -> Result<(), InvalidTunable> {
        ensure(self.period_ms > 0, "device.siren_period_ms", || "must be positive".into())?;
        ensure(self.duty > 0.0 && self.duty <= 1.0, "device.siren_duty", || {
            format!("{} not in (0, 1]", self.duty)
        })
    }
}

pub fn buzzer_signal(pattern: &SirenPattern, t_ms: u64) -> bool {
    ((t_ms % pattern.period_ms) as f64) < pattern.duty * pattern.period_ms as f64
}
