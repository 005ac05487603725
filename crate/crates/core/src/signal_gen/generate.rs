use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::ppg::{ppg_waveform, PPG_BASELINE, PPG_PEAK_PHASE};
use super::scenario::{EventKind, Scenario, ScenarioError};

/// Eye-channel reflectance while the eyeball faces the emitter.
pub const OPEN_LEVEL: f64 = 0.85;
/// Eye-channel reflectance while the eyelid covers the eye.
pub const CLOSED_LEVEL: f64 = 0.10;

/// Beat phase is tracked in units of bpm·ms; one cardiac cycle is 60 000.
const CYCLE: f64 = 60_000.0;

/// One fixed-rate reading of both IR channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorSample {
    pub t_ms: u64,
    /// Eye reflectance, normalized to `[0, 1]`.
    pub eye_ir: f64,
    /// Finger PPG intensity, normalized to `[0, 1]`.
    pub ppg_ir: f64,
}

/// What the generator actually scripted at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthPoint {
    pub eye_closed: bool,
    pub true_bpm: f64,
    /// The systolic peak of a beat fell between the previous sample and this one.
    pub beat: bool,
}

/// Per-sample ground truth for a generated stream.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundTruth {
    pub eye_closed: Vec<bool>,
    pub true_bpm: Vec<f64>,
    /// Scripted eye-closure spans as `(start_ms, end_ms)`, end exclusive.
    pub blink_events: Vec<(u64, u64)>,
    /// Sample times at which a systolic peak was crossed.
    pub beat_times_ms: Vec<u64>,
}

impl GroundTruth {
    /// Beats whose sample time lies in `[from_ms, to_ms)`.
    pub fn beats_between(&self, from_ms: u64, to_ms: u64) -> usize {
        self.beat_times_ms.iter().filter(|&&t| t >= from_ms && t < to_ms).count()
    }
}

/// A fully generated run.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub samples: Vec<SensorSample>,
    pub truth: GroundTruth,
}

/// Generates the whole stream and its ground truth.
pub fn generate(scenario: &Scenario) -> Result<Generated, ScenarioError> {
    let stream = SensorStream::new(scenario)?;
    let n = stream.len();
    let mut samples = Vec::with_capacity(n);
    let mut truth = GroundTruth {
        eye_closed: Vec::with_capacity(n),
        true_bpm: Vec::with_capacity(n),
        blink_events: stream.closures.clone(),
        beat_times_ms: Vec::new(),
    };
    for (sample, point) in stream {
        samples.push(sample);
        truth.eye_closed.push(point.eye_closed);
        truth.true_bpm.push(point.true_bpm);
        if point.beat {
            truth.beat_times_ms.push(sample.t_ms);
        }
    }
    Ok(Generated { samples, truth })
}

/// Lazily synthesizes samples for a scenario, one tick at a time.
#[derive(Debug, Clone)]
pub struct SensorStream {
    period_ms: u64,
    total: usize,
    index: usize,
    rng: ChaCha8Rng,
    /// Sorted `(at_ms, kind)` for rate and noise changes.
    settings: Vec<(u64, EventKind)>,
    next_setting: usize,
    closures: Vec<(u64, u64)>,
    dropouts: Vec<(u64, u64)>,
    bpm: f64,
    sigma: f64,
    /// Unwrapped beat phase accumulator in bpm·ms.
    beat_acc: f64,
}

impl SensorStream {
    pub fn new(scenario: &Scenario) -> Result<Self, ScenarioError> {
        scenario.validate()?;
        let mut scenario = scenario.clone();
        scenario.normalize();
        let mut settings = Vec::new();
        let mut closures = Vec::new();
        let mut dropouts = Vec::new();
        for ev in &scenario.events {
            match ev.kind {
                EventKind::SetHeartRate { .. } | EventKind::SetNoise { .. } => {
                    settings.push((ev.at_ms, ev.kind))
                }
                EventKind::PpgDropout { duration_ms } => dropouts.push((ev.at_ms, ev.at_ms + duration_ms)),
                _ => {
                    if let Some(d) = ev.kind.eye_closure_ms() {
                        closures.push((ev.at_ms, ev.at_ms + d));
                    }
                }
            }
        }
        Ok(Self {
            period_ms: scenario.sample_period_ms(),
            total: scenario.sample_count(),
            index: 0,
            rng: ChaCha8Rng::seed_from_u64(scenario.seed),
            settings,
            next_setting: 0,
            closures,
            dropouts,
            bpm: scenario.initial_bpm,
            sigma: 0.0,
            beat_acc: 0.0,
        })
    }

    pub fn period_ms(&self) -> u64 {
        self.period_ms
    }

    /// Scripted eye-closure spans, sorted.
    pub fn closures(&self) -> &[(u64, u64)] {
        &self.closures
    }

    fn apply_settings(&mut self, t_ms: u64) {
        while let Some(&(at, kind)) = self.settings.get(self.next_setting) {
            if at > t_ms {
                break;
            }
            match kind {
                EventKind::SetHeartRate { bpm } => self.bpm = bpm,
                EventKind::SetNoise { sigma } => self.sigma = sigma,
                _ => unreachable!("only rate and noise settings are queued"),
            }
            self.next_setting += 1;
        }
    }

    fn noise(&mut self) -> f64 {
        // Draw unconditionally so the stream position never depends on sigma.
        let z: f64 = self.rng.sample(StandardNormal);
        self.sigma * z
    }
}

fn inside(spans: &[(u64, u64)], t: u64) -> bool {
    spans.iter().any(|&(s, e)| s <= t && t < e)
}

impl Iterator for SensorStream {
    type Item = (SensorSample, TruthPoint);

    fn next(&mut self) -> Option<Self::Item> {
        if self.index >= self.total {
            return None;
        }
        let t_ms = self.index as u64 * self.period_ms;
        let prev_acc = self.beat_acc;
        if self.index > 0 {
            // Phase advances over the previous period at the rate in force then.
            self.beat_acc += self.bpm * self.period_ms as f64;
        }
        self.apply_settings(t_ms);

        let beat_offset = PPG_PEAK_PHASE * CYCLE;
        let beat = self.index > 0
            && ((self.beat_acc - beat_offset) / CYCLE).floor() > ((prev_acc - beat_offset) / CYCLE).floor();

        let eye_closed = inside(&self.closures, t_ms);
        let eye_clean = if eye_closed { CLOSED_LEVEL } else { OPEN_LEVEL };
        let ppg_clean = if inside(&self.dropouts, t_ms) {
            PPG_BASELINE
        } else {
            ppg_waveform(self.beat_acc.rem_euclid(CYCLE) / CYCLE)
        };
        let eye_ir = (eye_clean + self.noise()).clamp(0.0, 1.0);
        let ppg_ir = (ppg_clean + self.noise()).clamp(0.0, 1.0);

        self.index += 1;
        Some((SensorSample { t_ms, eye_ir, ppg_ir }, TruthPoint { eye_closed, true_bpm: self.bpm, beat }))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.total - self.index;
        (left, Some(left))
    }
}

impl ExactSizeIterator for SensorStream {}

#[cfg(test)]
mod tests {
    use super::*;

    fn local_maxima(samples: &[SensorSample]) -> Vec<u64> {
        samples
            .windows(3)
            .filter(|w| w[1].ppg_ir > w[0].ppg_ir && w[1].ppg_ir >= w[2].ppg_ir)
            .map(|w| w[1].t_ms)
            .collect()
    }

    #[test]
    fn quiet_scenario_is_flat_open() {
        let g = generate(&Scenario::new(10_000, 100)).unwrap();
        assert_eq!(g.samples.len(), 1000);
        assert!(g.samples.iter().all(|s| s.eye_ir == OPEN_LEVEL));
        assert!(g.truth.eye_closed.iter().all(|&c| !c));
        assert!(g.truth.blink_events.is_empty());
    }

    #[test]
    fn timestamps_step_by_period() {
        for rate in [50, 100, 250] {
            let g = generate(&Scenario::new(2_000, rate)).unwrap();
            let period = 1000 / rate as u64;
            for (i, s) in g.samples.iter().enumerate() {
                assert_eq!(s.t_ms, i as u64 * period);
            }
        }
    }

    #[test]
    fn microsleep_closes_exact_span() {
        let s = Scenario::new(10_000, 100).with_event(3000, EventKind::Microsleep { duration_ms: 2000 });
        let g = generate(&s).unwrap();
        for (sample, &closed) in g.samples.iter().zip(&g.truth.eye_closed) {
            let expect = (3000..5000).contains(&sample.t_ms);
            assert_eq!(closed, expect, "t = {}", sample.t_ms);
            let level = if expect { CLOSED_LEVEL } else { OPEN_LEVEL };
            assert_eq!(sample.eye_ir, level);
        }
        assert_eq!(g.truth.blink_events, vec![(3000, 5000)]);
    }

    #[test]
    fn sixty_bpm_peaks_one_second_apart() {
        let s = Scenario::new(10_000, 100).with_event(0, EventKind::SetHeartRate { bpm: 60.0 });
        let g = generate(&s).unwrap();
        let peaks = local_maxima(&g.samples);
        assert_eq!(peaks.len(), 10);
        for w in peaks.windows(2) {
            assert_eq!(w[1] - w[0], 1000);
        }
        assert_eq!(peaks, g.truth.beat_times_ms);
    }

    #[test]
    fn heart_rate_change_takes_effect_at_event() {
        let s = Scenario::new(20_000, 100).with_event(10_000, EventKind::SetHeartRate { bpm: 60.0 });
        let g = generate(&s).unwrap();
        assert_eq!(g.truth.true_bpm[999], 72.0);
        assert_eq!(g.truth.true_bpm[1000], 60.0);
    }

    #[test]
    fn dropout_flattens_ppg() {
        let s = Scenario::new(10_000, 100).with_event(2000, EventKind::PpgDropout { duration_ms: 3000 });
        let g = generate(&s).unwrap();
        for sample in &g.samples {
            if (2000..5000).contains(&sample.t_ms) {
                assert_eq!(sample.ppg_ir, PPG_BASELINE);
            }
        }
        assert!(g.samples[5000 / 10..].iter().any(|s| s.ppg_ir > 0.7));
    }

    #[test]
    fn noise_is_seeded_and_clamped() {
        let s = Scenario { seed: 42, ..Scenario::new(5_000, 250) }
            .with_event(0, EventKind::SetNoise { sigma: 0.5 });
        let a = generate(&s).unwrap();
        let b = generate(&s).unwrap();
        assert_eq!(a, b);
        assert!(a.samples.iter().all(|s| (0.0..=1.0).contains(&s.eye_ir) && (0.0..=1.0).contains(&s.ppg_ir)));
        let other = generate(&Scenario { seed: 43, ..s.clone() }).unwrap();
        assert_ne!(a.samples, other.samples);
    }

    #[test]
    fn invalid_scenario_is_rejected() {
        let s = Scenario::new(1_000, 100).with_event(900, EventKind::Blink { duration_ms: 200 });
        assert!(generate(&s).is_err());
    }
}
