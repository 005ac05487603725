use std::f64::consts::PI;

/// Resting level of the finger channel between systolic lobes.
pub const PPG_BASELINE: f64 = 0.2;
/// Level at the top of the systolic lobe.
pub const PPG_PEAK: f64 = 0.8;
/// Phase of the systolic peak within one cardiac cycle.
pub const PPG_PEAK_PHASE: f64 = 0.15;
/// Width of the systolic lobe as a fraction of the cycle.
pub const PPG_LOBE_WIDTH: f64 = 0.3;

/// Normalized IR intensity reflected from the fingertip at a given point of
/// the cardiac cycle.
///
/// A single raised-cosine lobe centred on [`PPG_PEAK_PHASE`] sits on a flat
/// baseline. The lobe reaches the baseline exactly at its edges, so the
/// waveform is continuous across the cycle boundary. Phases outside `[0, 1)`
/// are wrapped.
pub fn ppg_waveform(phase: f64) -> f64 {
    let phase = phase.rem_euclid(1.0);
    let offset = phase - PPG_PEAK_PHASE;
    let half_width = PPG_LOBE_WIDTH / 2.0;
    if offset.abs() >= half_width {
        return PPG_BASELINE;
    }
    let lobe = 0.5 * (1.0 + (PI * offset / half_width).cos());
    PPG_BASELINE + (PPG_PEAK - PPG_BASELINE) * lobe
}
