//! Reference driving scenarios with known alert outcomes. These back the
//! checked-in fixtures and the end-to-end tests.

use crate::escalate::AlertLevel::{self, *};
use crate::signal_gen::{EventKind, Scenario};

/// A named scenario and the level changes it must produce.
#[derive(Debug, Clone)]
pub struct Canonical {
    pub name: &'static str,
    pub scenario: Scenario,
    pub expected: Vec<(AlertLevel, AlertLevel)>,
}

const ROUTINE_NOISE: f64 = 0.02;

/// Ordinary blinks of 100-280 ms roughly every 3.5-4.5 s, starting at
/// `from_ms`, stopping before `to_ms` and staying clear of `avoid`.
fn routine_blinks(mut s: Scenario, from_ms: u64, to_ms: u64, avoid: &[(u64, u64)]) -> Scenario {
    let mut at = from_ms;
    let mut k = 0u64;
    while at + 1000 < to_ms {
        let duration_ms = 100 + (k * 37) % 181;
        let clear = avoid.iter().all(|&(s0, s1)| at + duration_ms + 500 < s0 || at > s1 + 500);
        if clear {
            s = s.with_event(at, EventKind::Blink { duration_ms });
        }
        at += 3500 + (k * 523) % 1000;
        k += 1;
    }
    s
}

fn base(duration_ms: u64, seed: u64, bpm: f64) -> Scenario {
    Scenario { seed, initial_bpm: bpm, ..Scenario::new(duration_ms, 100) }
        .with_event(0, EventKind::SetNoise { sigma: ROUTINE_NOISE })
}

/// Ten minutes of an alert driver: routine blinks, steady 72 bpm.
pub fn alert_driver() -> Canonical {
    let s = routine_blinks(base(600_000, 1, 72.0), 2000, 600_000, &[]);
    Canonical { name: "alert_driver", scenario: s, expected: vec![] }
}

/// A single 200 ms blink.
pub fn short_blink() -> Canonical {
    let s = base(20_000, 2, 72.0).with_event(5000, EventKind::Blink { duration_ms: 200 });
    Canonical { name: "short_blink", scenario: s, expected: vec![] }
}

/// A 600 ms closure with a steady heart rate.
pub fn closure_600ms() -> Canonical {
    let span = (15_000, 15_600);
    let s = routine_blinks(base(30_000, 3, 72.0), 2000, 30_000, &[span])
        .with_event(span.0, EventKind::EyesClosed { duration_ms: span.1 - span.0 });
    Canonical { name: "closure_600ms", scenario: s, expected: vec![(Awake, Stage1), (Stage1, Awake)] }
}

/// Heart rate falls from 75 to 60 bpm at 20 s; a 5 s microsleep at 30 s.
pub fn microsleep_slowdown() -> Canonical {
    let span = (30_000, 35_000);
    let s = routine_blinks(base(60_000, 4, 75.0), 2000, 60_000, &[span])
        .with_event(20_000, EventKind::SetHeartRate { bpm: 60.0 })
        .with_event(span.0, EventKind::Microsleep { duration_ms: span.1 - span.0 });
    Canonical {
        name: "microsleep_slowdown",
        scenario: s,
        expected: vec![(Awake, Stage1), (Stage1, Stage2), (Stage2, Awake)],
    }
}

/// The finger leaves the PPG sensor at 10 s; a 5 s microsleep at 30 s.
/// Stage2 is reached on closure length alone once heart data has been
/// missing long enough.
pub fn sensor_dropout() -> Canonical {
    let span = (30_000, 35_000);
    let s = routine_blinks(base(60_000, 5, 72.0), 2000, 60_000, &[span])
        .with_event(10_000, EventKind::PpgDropout { duration_ms: 40_000 })
        .with_event(span.0, EventKind::Microsleep { duration_ms: span.1 - span.0 });
    Canonical {
        name: "sensor_dropout",
        scenario: s,
        expected: vec![(Awake, Stage1), (Stage1, Stage2), (Stage2, Awake)],
    }
}

pub fn all() -> Vec<Canonical> {
    let mut all =
        vec![alert_driver(), short_blink(), closure_600ms(), microsleep_slowdown(), sensor_dropout()];
    for c in &mut all {
        c.scenario.normalize();
    }
    all
}

/// Short noisy run whose CSV trace is kept as a byte-exact fixture.
pub fn golden_trace() -> Scenario {
    let mut s = base(5_000, 9, 72.0)
        .with_event(800, EventKind::Blink { duration_ms: 150 })
        .with_event(2000, EventKind::EyesClosed { duration_ms: 600 });
    s.normalize();
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_scenarios_are_valid() {
        for c in all() {
            c.scenario.validate().unwrap_or_else(|e| panic!("{}: {e}", c.name));
        }
        golden_trace().validate().unwrap();
    }

    #[test]
    fn routine_blinks_stay_short() {
        let c = alert_driver();
        let blinks: Vec<u64> = c.scenario.events.iter().filter_map(|e| e.kind.eye_closure_ms()).collect();
        assert!(blinks.len() > 100);
        assert!(blinks.iter().all(|&d| (100..=280).contains(&d)));
    }
}
