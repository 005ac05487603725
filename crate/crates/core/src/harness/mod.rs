//! Fixed-tick simulation loop: scenario → sensors → detectors → escalation
//! → device outputs, with a per-tick trace and ground-truth scoring.

pub mod canonical;
mod cli;
mod config;
mod csv;

use std::path::PathBuf;

use thiserror::Error;

pub use cli::{cli, EXIT_IO, EXIT_OK, EXIT_VALIDATION};
pub use config::RunConfig;
pub use csv::{emit_csv, write_csv, CSV_HEADER};

use crate::detect::{DetectError, Detector};
use crate::device::{buzzer_signal, encode_gsm_at};
use crate::error::InvalidTunable;
use crate::escalate::{AlertLevel, AlertState, EscalateError, Transition};
use crate::signal_gen::{parse_scenario, Scenario, ScenarioError, SensorStream};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config{}: {message}", line.map(|l| format!(" line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },
    #[error("invalid config: {0}")]
    Invalid(#[from] InvalidTunable),
    #[error("scenario {}: {source}", path.display())]
    Scenario { path: PathBuf, source: ScenarioError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error(transparent)]
    Escalate(#[from] EscalateError),
}

impl HarnessError {
    pub fn is_io(&self) -> bool {
        matches!(self, HarnessError::Io { .. })
    }
}

/// One tick of the pipeline, as written to CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t_ms: u64,
    pub eye_ir: f64,
    pub ppg_ir: f64,
    pub eye_closed: bool,
    pub perclos: f64,
    pub bpm: f64,
    pub slowdown: bool,
    pub level: AlertLevel,
    /// Buzzer output after siren modulation.
    pub buzzer: bool,
    pub vibrator_duty: u8,
}

/// A Stage1 entry matched to the scripted closure that caused it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Episode {
    pub closure_start_ms: u64,
    pub closure_end_ms: u64,
    pub stage1_ms: u64,
    pub stage2_ms: Option<u64>,
    /// Stage1 entry minus closure start minus `t_blink_ms`.
    pub detection_latency_ms: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub sample_period_ms: u64,
    pub transitions: Vec<Transition>,
    pub episodes: Vec<Episode>,
    /// Stage1 entries with no scripted closure of at least `t_blink_ms` behind them.
    pub false_alarm_count: usize,
    /// Scripted closures long enough for Stage2 during which Stage2 was never active.
    pub missed_count: usize,
    pub gsm_payloads: Vec<Vec<u8>>,
    pub trace: Vec<TraceRow>,
}

impl RunReport {
    pub fn stage2_entries(&self) -> usize {
        self.transitions.iter().filter(|t| t.to == AlertLevel::Stage2).count()
    }

    /// `key=value` summary lines.
    pub fn summary(&self) -> String {
        let latencies: Vec<i64> = self.episodes.iter().map(|e| e.detection_latency_ms).collect();
        let mut out = format!(
            "ticks={}\nepisodes={}\nstage2_entries={}\nfalse_alarms={}\nmisses={}\ngsm_messages={}\n",
            self.trace.len(),
            self.episodes.len(),
            self.stage2_entries(),
            self.false_alarm_count,
            self.missed_count,
            self.gsm_payloads.len(),
        );
        match latencies.iter().max() {
            Some(max) => {
                let mean = latencies.iter().sum::<i64>() as f64 / latencies.len() as f64;
                out.push_str(&format!("mean_latency_ms={mean:.1}\nmax_latency_ms={max}\n"));
            }
            None => out.push_str("mean_latency_ms=none\nmax_latency_ms=none\n"),
        }
        out
    }
}

/// Loads the scenario named by `config` and runs it.
pub fn run(config: &RunConfig) -> Result<RunReport, HarnessError> {
    config.validate()?;
    let scenario = load_scenario(config)?;
    run_scenario(&scenario, config)
}

pub fn load_scenario(config: &RunConfig) -> Result<Scenario, HarnessError> {
    let path = &config.scenario;
    let text =
        std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
    let mut scenario =
        parse_scenario(&text).map_err(|source| HarnessError::Scenario { path: path.clone(), source })?;
    if let Some(seed) = config.seed {
        scenario.seed = seed;
    }
    Ok(scenario)
}

/// Runs an in-memory scenario; `config.scenario` and `config.seed` are ignored.
pub fn run_scenario(scenario: &Scenario, config: &RunConfig) -> Result<RunReport, HarnessError> {
    config.validate()?;
    let stream = SensorStream::new(scenario)
        .map_err(|source| HarnessError::Scenario { path: PathBuf::from("<memory>"), source })?;
    let closures = stream.closures().to_vec();
    let period = stream.period_ms();

    let mut detector = Detector::new(config.detect);
    let mut state = AlertState::new();
    let mut transitions = Vec::new();
    let mut gsm_payloads = Vec::new();
    let mut trace = Vec::with_capacity(stream.len());

    for (sample, _) in stream {
        let out = detector.step(&sample)?;
        let (next, cmd) = state.step(sample.t_ms, &out.vigilance, &out.heart, &config.escalate)?;
        if next.level != state.level {
            transitions.push(Transition { t_ms: sample.t_ms, from: state.level, to: next.level });
        }
        if let Some(alert) = &cmd.gsm {
            gsm_payloads.push(encode_gsm_at(alert));
        }
        let buzzer = cmd.buzzer_on && buzzer_signal(&config.siren, sample.t_ms - next.entered_at_ms);
        trace.push(TraceRow {
            t_ms: sample.t_ms,
            eye_ir: sample.eye_ir,
            ppg_ir: sample.ppg_ir,
            eye_closed: out.vigilance.eyes_closed,
            perclos: out.vigilance.perclos,
            bpm: out.heart.bpm,
            slowdown: out.heart.slowdown,
            level: next.level,
            buzzer,
            vibrator_duty: cmd.vibrator_duty,
        });
        state = next;
    }

    let score = score(&transitions, &closures, config, period);
    Ok(RunReport {
        sample_period_ms: period,
        transitions,
        episodes: score.episodes,
        false_alarm_count: score.false_alarms,
        missed_count: score.missed,
        gsm_payloads,
        trace,
    })
}

struct Score {
    episodes: Vec<Episode>,
    false_alarms: usize,
    missed: usize,
}

/// Matches alert transitions against scripted closures. A transition is
/// attributed to a closure if it happens between the closure's start and
/// its end plus the detector's lag (debounce plus two samples).
fn score(transitions: &[Transition], closures: &[(u64, u64)], config: &RunConfig, period: u64) -> Score {
    let t_blink = config.escalate.t_blink_ms;
    let long_enough = config.escalate.t_blink_ms + config.escalate.t_persist_ms;
    let slack = config.detect.eye.debounce_ms + 2 * period;
    let covers = |&(start, end): &(u64, u64), t: u64| start <= t && t <= end + slack;
    let entries = |to: AlertLevel| transitions.iter().filter(move |t| t.to == to).map(|t| t.t_ms);

    let mut episodes = Vec::new();
    let mut false_alarms = 0;
    for stage1 in entries(AlertLevel::Stage1) {
        let cause = closures.iter().find(|c| c.1 - c.0 >= t_blink && covers(c, stage1));
        match cause {
            Some(&(start, end)) => episodes.push(Episode {
                closure_start_ms: start,
                closure_end_ms: end,
                stage1_ms: stage1,
                stage2_ms: entries(AlertLevel::Stage2).find(|&t| t >= stage1 && covers(&(start, end), t)),
                detection_latency_ms: stage1 as i64 - start as i64 - t_blink as i64,
            }),
            None => false_alarms += 1,
        }
    }
    // Stage2 spans; a closure that begins while an earlier alarm is still
    // sounding is covered by it.
    let mut stage2 = Vec::new();
    for t in transitions {
        if t.to == AlertLevel::Stage2 {
            stage2.push((t.t_ms, u64::MAX));
        } else if t.from == AlertLevel::Stage2 {
            if let Some(span) = stage2.last_mut() {
                span.1 = t.t_ms;
            }
        }
    }
    let missed = closures
        .iter()
        .filter(|c| c.1 - c.0 >= long_enough)
        .filter(|&&(start, end)| !stage2.iter().any(|&(a, b)| a <= end + slack && start < b))
        .count();
    Score { episodes, false_alarms, missed }
}
