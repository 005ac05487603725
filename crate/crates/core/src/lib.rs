//! Simulation and detection pipeline for an IR-sensor drowsy-driver alert
//! system.
//!
//! Samples from an eye reflectance channel and a finger PPG channel feed a
//! set of detectors (eye state, blinks, PERCLOS, heartbeat), whose metrics
//! drive a three-level alert state machine. The state machine's commands are
//! rendered into buzzer, vibrator PWM, and GSM SMS outputs.

pub mod detect;
pub mod device;
pub mod error;
pub mod escalate;
pub mod harness;
pub mod signal_gen;

mod text;
