#![allow(dead_code)]

use std::path::PathBuf;

use drowsy_core::detect::{BlinkEvent, DetectConfig, Detector};
use drowsy_core::signal_gen::{EventKind, Scenario, SensorSample};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Independent reader for the text-mode SMS byte sequence.
pub fn decode_gsm_at(bytes: &[u8]) -> Option<(String, String)> {
    let rest = bytes.strip_prefix(b"AT+CMGF=1\r")?;
    let rest = rest.strip_prefix(b"AT+CMGS=\"")?;
    let quote = rest.iter().position(|&b| b == b'"')?;
    let (recipient, rest) = rest.split_at(quote);
    let rest = rest.strip_prefix(b"\"\r")?;
    let (body, tail) = rest.split_last().map(|(last, body)| (body, *last))?;
    if tail != 0x1A || body.contains(&0x1A) || body.contains(&b'\r') {
        return None;
    }
    Some((String::from_utf8(recipient.to_vec()).ok()?, String::from_utf8(body.to_vec()).ok()?))
}

/// Random eye-event timeline with clear gaps between events, ending well
/// before the scenario does. Event edges fall on the sample grid.
pub fn random_eye_scenario(seed: u64, duration_ms: u64, rate: u32, max_closure_ms: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Scenario { seed, ..Scenario::new(duration_ms, rate) };
    let period = s.sample_period_ms();
    let snap = |t: u64| t / period * period;
    let mut at = snap(rng.random_range(200..2000u64));
    loop {
        let d = snap(rng.random_range(100..=max_closure_ms));
        if at + d + 500 > duration_ms {
            break;
        }
        let kind = match rng.random_range(0..3) {
            0 => EventKind::Blink { duration_ms: d },
            1 => EventKind::Microsleep { duration_ms: d },
            _ => EventKind::EyesClosed { duration_ms: d },
        };
        s = s.with_event(at, kind);
        at += d + snap(rng.random_range(150..4000u64));
    }
    s
}

/// Closure spans recovered by the detector pipeline.
pub fn recovered_closures(samples: &[SensorSample], cfg: DetectConfig) -> Vec<BlinkEvent> {
    let mut det = Detector::new(cfg);
    samples.iter().filter_map(|s| det.step(s).expect("in-order stream").closure).collect()
}
