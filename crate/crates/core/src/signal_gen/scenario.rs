use std::fmt;
use std::fmt::Write as _;

use crate::text::{content_lines, split_key};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_BPM: f64 = 72.0;
pub const MIN_BPM: f64 = 20.0;
pub const MAX_BPM: f64 = 250.0;

/// What happens at a scripted instant of the driver timeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    Blink {
        duration_ms: u64,
    },
    Microsleep {
        duration_ms: u64,
    },
    EyesClosed {
        duration_ms: u64,
    },
    SetHeartRate {
        bpm: f64,
    },
    SetNoise {
        sigma: f64,
    },
    /// Finger lifted off the PPG sensor: the channel sits at its baseline.
    PpgDropout {
        duration_ms: u64,
    },
}

impl EventKind {
    /// Duration of the eye closure, for the three eye events.
    pub fn eye_closure_ms(&self) -> Option<u64> {
        match *self {
            EventKind::Blink { duration_ms }
            | EventKind::Microsleep { duration_ms }
            | EventKind::EyesClosed { duration_ms } => Some(duration_ms),
            _ => None,
        }
    }

    fn span_ms(&self) -> Option<u64> {
        match *self {
            EventKind::PpgDropout { duration_ms } => Some(duration_ms),
            _ => self.eye_closure_ms(),
        }
    }

    fn keyword(&self) -> &'static str {
        match self {
            EventKind::Blink { .. } => "blink",
            EventKind::Microsleep { .. } => "microsleep",
            EventKind::EyesClosed { .. } => "eyesclosed",
            EventKind::SetHeartRate { .. } => "sethr",
            EventKind::SetNoise { .. } => "setnoise",
            EventKind::PpgDropout { .. } => "ppgdropout",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioEvent {
    pub at_ms: u64,
    pub kind: EventKind,
}

impl ScenarioEvent {
    pub fn new(at_ms: u64, kind: EventKind) -> Self {
        Self { at_ms, kind }
    }

    /// End of the event's span, for events that have one.
    pub fn end_ms(&self) -> Option<u64> {
        self.kind.span_ms().map(|d| self.at_ms + d)
    }
}

/// A scripted driver timeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub duration_ms: u64,
    pub sample_rate_hz: u32,
    pub seed: u64,
    pub initial_bpm: f64,
    pub events: Vec<ScenarioEvent>,
}

impl Scenario {
    /// An event-free timeline with default seed and heart rate.
    pub fn new(duration_ms: u64, sample_rate_hz: u32) -> Self {
        Self { duration_ms, sample_rate_hz, seed: DEFAULT_SEED, initial_bpm: DEFAULT_BPM, events: Vec::new() }
    }

    pub fn with_event(mut self, at_ms: u64, kind: EventKind) -> Self {
        self.events.push(ScenarioEvent::new(at_ms, kind));
        self
    }

    /// Milliseconds between consecutive samples.
    pub fn sample_period_ms(&self) -> u64 {
        1000 / u64::from(self.sample_rate_hz)
    }

    /// Number of samples the generator emits.
    pub fn sample_count(&self) -> usize {
        (self.duration_ms * u64::from(self.sample_rate_hz) / 1000) as usize
    }

    /// Checks every invariant. Events need not be sorted; [`Self::normalize`]
    /// sorts them.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let lines = vec![None; self.events.len()];
        validate_parts(self.duration_ms, self.sample_rate_hz, self.initial_bpm, &self.events, &lines)
    }

    /// Sorts events by start time, keeping file order for ties.
    pub fn normalize(&mut self) {
        self.events.sort_by_key(|e| e.at_ms);
    }

    /// Renders the scenario in the file grammar accepted by [`parse_scenario`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "duration {}", self.duration_ms);
        let _ = writeln!(out, "rate {}", self.sample_rate_hz);
        let _ = writeln!(out, "seed {}", self.seed);
        let _ = writeln!(out, "bpm {}", self.initial_bpm);
        for ev in &self.events {
            let arg = match ev.kind {
                EventKind::Blink { duration_ms }
                | EventKind::Microsleep { duration_ms }
                | EventKind::EyesClosed { duration_ms }
                | EventKind::PpgDropout { duration_ms } => duration_ms.to_string(),
                EventKind::SetHeartRate { bpm } => bpm.to_string(),
                EventKind::SetNoise { sigma } => sigma.to_string(),
            };
            let _ = writeln!(out, "event {} {} {}", ev.at_ms, ev.kind.keyword(), arg);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioErrorKind {
    Syntax(String),
    MissingKey(&'static str),
    DuplicateKey(String),
    /// The sample period must be a whole number of milliseconds.
    InvalidRate(u32),
    OutOfRange {
        what: &'static str,
        value: String,
    },
    ZeroDuration,
    PastDuration {
        end_ms: u64,
        duration_ms: u64,
    },
    /// Two eye events overlap; `other` is the line (if known) of the earlier one.
    Overlap {
        other: Option<usize>,
    },
}

/// A scenario failed to parse or validate. `line` is 1-based when the
/// scenario came from text.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioError {
    pub line: Option<usize>,
    pub kind: ScenarioErrorKind,
}

impl ScenarioError {
    fn at(line: Option<usize>, kind: ScenarioErrorKind) -> Self {
        Self { line, kind }
    }

    fn syntax(line: usize, msg: impl Into<String>) -> Self {
        Self::at(Some(line), ScenarioErrorKind::Syntax(msg.into()))
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        match &self.kind {
            ScenarioErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ScenarioErrorKind::MissingKey(key) => write!(f, "missing required key `{key}`"),
            ScenarioErrorKind::DuplicateKey(key) => write!(f, "duplicate key `{key}`"),
            ScenarioErrorKind::InvalidRate(hz) => {
                write!(f, "sample rate {hz} Hz must be positive and divide 1000")
            }
            ScenarioErrorKind::OutOfRange { what, value } => {
                write!(f, "{what} out of range: {value}")
            }
            ScenarioErrorKind::ZeroDuration => write!(f, "event duration must be positive"),
            ScenarioErrorKind::PastDuration { end_ms, duration_ms } => {
                write!(f, "event ends at {end_ms} ms, past scenario duration {duration_ms} ms")
            }
            ScenarioErrorKind::Overlap { other } => match other {
                Some(other) => write!(f, "eye event overlaps eye event on line {other}"),
                None => write!(f, "overlapping eye events"),
            },
        }
    }
}

impl std::error::Error for ScenarioError {}

/// Parses a scenario file. The result is validated and its events sorted.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut duration = None;
    let mut rate = None;
    let mut seed = None;
    let mut bpm = None;
    let mut events = Vec::new();
    let mut lines = Vec::new();

    for (line, content) in content_lines(text) {
        let (key, rest) = split_key(content);
        let args: Vec<&str> = rest.split_whitespace().collect();
        let single = |slot_name: &str| -> Result<&str, ScenarioError> {
            match args.as_slice() {
                [v] => Ok(*v),
                _ => Err(ScenarioError::syntax(line, format!("`{slot_name}` takes exactly one value"))),
            }
        };
        match key {
            "duration" => set_once(&mut duration, line, key, parse_num(line, single(key)?)?)?,
            "rate" => set_once(&mut rate, line, key, parse_num(line, single(key)?)?)?,
            "seed" => set_once(&mut seed, line, key, parse_num(line, single(key)?)?)?,
            "bpm" => set_once(&mut bpm, line, key, parse_num(line, single(key)?)?)?,
            "event" => {
                events.push(parse_event(line, &args)?);
                lines.push(Some(line));
            }
            other => {
                return Err(ScenarioError::syntax(line, format!("unknown key `{other}`")));
            }
        }
    }

    let duration_ms: u64 =
        duration.ok_or(ScenarioError::at(None, ScenarioErrorKind::MissingKey("duration")))?;
    let sample_rate_hz: u32 = rate.ok_or(ScenarioError::at(None, ScenarioErrorKind::MissingKey("rate")))?;
    let initial_bpm = bpm.unwrap_or(DEFAULT_BPM);

    // Stable sort keeps file order for simultaneous events.
    let mut order: Vec<usize> = (0..events.len()).collect();
    order.sort_by_key(|&i| events[i].at_ms);
    let events: Vec<ScenarioEvent> = order.iter().map(|&i| events[i]).collect();
    let lines: Vec<Option<usize>> = order.iter().map(|&i| lines[i]).collect();

    validate_parts(duration_ms, sample_rate_hz, initial_bpm, &events, &lines)?;

    Ok(Scenario { duration_ms, sample_rate_hz, seed: seed.unwrap_or(DEFAULT_SEED), initial_bpm, events })
}

fn set_once<T>(slot: &mut Option<T>, line: usize, key: &str, value: T) -> Result<(), ScenarioError> {
    if slot.is_some() {
        return Err(ScenarioError::at(Some(line), ScenarioErrorKind::DuplicateKey(key.to_string())));
    }
    *slot = Some(value);
    Ok(())
}

fn parse_num<T: std::str::FromStr>(line: usize, token: &str) -> Result<T, ScenarioError> {
    token.parse().map_err(|_| ScenarioError::syntax(line, format!("invalid number `{token}`")))
}

fn parse_event(line: usize, args: &[&str]) -> Result<ScenarioEvent, ScenarioError> {
    let [at, kind, value] = args else {
        return Err(ScenarioError::syntax(line, "expected `event <at_ms> <kind> <value>`"));
    };
    let at_ms = parse_num(line, at)?;
    let kind = match *kind {
        "blink" => EventKind::Blink { duration_ms: parse_num(line, value)? },
        "microsleep" => EventKind::Microsleep { duration_ms: parse_num(line, value)? },
        "eyesclosed" => EventKind::EyesClosed { duration_ms: parse_num(line, value)? },
        "ppgdropout" => EventKind::PpgDropout { duration_ms: parse_num(line, value)? },
        "sethr" => EventKind::SetHeartRate { bpm: parse_num(line, value)? },
        "setnoise" => EventKind::SetNoise { sigma: parse_num(line, value)? },
        other => {
            return Err(ScenarioError::syntax(line, format!("unknown event kind `{other}`")));
        }
    };
    Ok(ScenarioEvent { at_ms, kind })
}

fn check_bpm(line: Option<usize>, bpm: f64) -> Result<(), ScenarioError> {
    if (MIN_BPM..=MAX_BPM).contains(&bpm) {
        Ok(())
    } else {
        Err(ScenarioError::at(line, ScenarioErrorKind::OutOfRange { what: "bpm", value: bpm.to_string() }))
    }
}

/// `events` must be sorted by `at_ms`; `lines[i]` locates `events[i]`.
fn validate_parts(
    duration_ms: u64,
    sample_rate_hz: u32,
    initial_bpm: f64,
    events: &[ScenarioEvent],
    lines: &[Option<usize>],
) -> Result<(), ScenarioError> {
    if sample_rate_hz == 0 || sample_rate_hz > 1000 || 1000 % sample_rate_hz != 0 {
        return Err(ScenarioError::at(None, ScenarioErrorKind::InvalidRate(sample_rate_hz)));
    }
    check_bpm(None, initial_bpm)?;

    let mut sorted: Vec<usize> = (0..events.len()).collect();
    sorted.sort_by_key(|&i| events[i].at_ms);
    // Latest-ending eye event seen so far, as (end_ms, index).
    let mut last_eye: Option<(u64, usize)> = None;

    for &i in &sorted {
        let ev = &events[i];
        let line = lines[i];
        match ev.kind {
            EventKind::SetHeartRate { bpm } => check_bpm(line, bpm)?,
            EventKind::SetNoise { sigma } if !(sigma >= 0.0 && sigma.is_finite()) => {
                return Err(ScenarioError::at(
                    line,
                    ScenarioErrorKind::OutOfRange { what: "sigma", value: sigma.to_string() },
                ));
            }
            _ => {}
        }
        if ev.kind.span_ms() == Some(0) {
            return Err(ScenarioError::at(line, ScenarioErrorKind::ZeroDuration));
        }
        let end_ms = ev.end_ms().unwrap_or(ev.at_ms);
        if end_ms > duration_ms {
            return Err(ScenarioError::at(line, ScenarioErrorKind::PastDuration { end_ms, duration_ms }));
        }
        if ev.kind.eye_closure_ms().is_some() {
            if let Some((prev_end, prev)) = last_eye {
                if ev.at_ms < prev_end {
                    return Err(ScenarioError::at(line, ScenarioErrorKind::Overlap { other: lines[prev] }));
                }
            }
            if last_eye.is_none_or(|(prev_end, _)| end_ms > prev_end) {
                last_eye = Some((end_ms, i));
            }
        }
    }
    Ok(())
}
