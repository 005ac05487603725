//! Scripted driver scenarios and the synthetic sensor streams they produce.
//!
//! The generator stands in for the two IR reflectance channels: one aimed at
//! the eye (eyeball reflects, eyelid does not) and one at a fingertip (blood
//! volume modulates the returned intensity once per heartbeat). Every stream
//! is paired with the ground truth that produced it.

mod generate;
mod ppg;
mod scenario;

pub use generate::{
    generate, Generated, GroundTruth, SensorSample, SensorStream, TruthPoint, CLOSED_LEVEL, OPEN_LEVEL,
};
pub use ppg::{ppg_waveform, PPG_BASELINE, PPG_LOBE_WIDTH, PPG_PEAK, PPG_PEAK_PHASE};
pub use scenario::{
    parse_scenario, EventKind, Scenario, ScenarioError, ScenarioErrorKind, ScenarioEvent, DEFAULT_BPM,
    DEFAULT_SEED, MAX_BPM, MIN_BPM,
};
