use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::HarnessError;
use crate::detect::DetectConfig;
use crate::device::{validate_body, validate_recipient, GsmAlert, SirenPattern};
use crate::error::InvalidTunable;
use crate::escalate::EscalationConfig;
use crate::text::{split_key, strip_comment};

/// Everything one run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Scenario file; relative paths are resolved against the config file.
    pub scenario: PathBuf,
    /// Replaces the scenario's own seed.
    pub seed: Option<u64>,
    pub detect: DetectConfig,
    pub escalate: EscalationConfig,
    pub siren: SirenPattern,
    pub csv: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(scenario: impl Into<PathBuf>) -> Self {
        Self {
            scenario: scenario.into(),
            seed: None,
            detect: DetectConfig::default(),
            escalate: EscalationConfig::default(),
            siren: SirenPattern::default(),
            csv: None,
        }
    }

    pub fn validate(&self) -> Result<(), InvalidTunable> {
        self.detect.validate()?;
        self.escalate.validate()?;
        self.siren.validate()
    }

    /// Reads a config file, resolving relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.scenario = base.join(&cfg.scenario);
        if let Some(csv) = cfg.csv.take() {
            cfg.csv = Some(base.join(csv));
        }
        Ok(cfg)
    }

    /// Parses config text. Unset tunables keep their defaults; the result is
    /// validated.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut scenario = None;
        let mut cfg = RunConfig::new("");
        let mut recipient = cfg.escalate.alert.recipient().to_string();
        let mut body = cfg.escalate.alert.body().to_string();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim_start();
            // The message body is free text, so it is taken verbatim.
            if let Some(rest) = trimmed.strip_prefix("gsm.body") {
                if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                    body = rest.trim().to_string();
                    continue;
                }
            }
            let content = strip_comment(raw).trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = split_key(content);
            let d = &mut cfg.detect;
            let e = &mut cfg.escalate;
            match key {
                "scenario" => scenario = Some(PathBuf::from(value)),
                "seed" => cfg.seed = Some(num(line, key, value)?),
                "detect.close_threshold" => d.eye.close_threshold = num(line, key, value)?,
                "detect.open_threshold" => d.eye.open_threshold = num(line, key, value)?,
                "detect.debounce_ms" => d.eye.debounce_ms = num(line, key, value)?,
                "detect.blink_max_ms" => d.blink.blink_max_ms = num(line, key, value)?,
                "detect.window_ms" => d.blink.window_ms = num(line, key, value)?,
                "detect.refractory_ms" => d.peaks.refractory_ms = num(line, key, value)?,
                "detect.rel_threshold" => d.peaks.rel_threshold = num(line, key, value)?,
                "detect.rolling_ms" => d.peaks.rolling_ms = num(line, key, value)?,
                "detect.min_swing" => d.peaks.min_swing = num(line, key, value)?,
                "detect.bpm_window_ms" => d.heart.bpm_window_ms = num(line, key, value)?,
                "detect.baseline_tau_ms" => d.heart.baseline_tau_ms = num(line, key, value)?,
                "detect.slowdown_ratio" => d.heart.slowdown_ratio = num(line, key, value)?,
                "escalate.t_blink_ms" => e.t_blink_ms = num(line, key, value)?,
                "escalate.t_persist_ms" => e.t_persist_ms = num(line, key, value)?,
                "escalate.t_recover_ms" => e.t_recover_ms = num(line, key, value)?,
                "escalate.slowdown_required" => e.slowdown_required = num(line, key, value)?,
                "escalate.dropout_ms" => e.dropout_ms = num(line, key, value)?,
                "escalate.vibrator_duty" => e.vibrator_duty = num(line, key, value)?,
                "device.siren_period_ms" => cfg.siren.period_ms = num(line, key, value)?,
                "device.siren_duty" => cfg.siren.duty = num(line, key, value)?,
                "gsm.recipient" => recipient = value.to_string(),
                "output.csv" => cfg.csv = Some(PathBuf::from(value)),
                other => {
                    return Err(HarnessError::Config {
                        line: Some(line),
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
        }

        cfg.scenario = scenario
            .ok_or(HarnessError::Config { line: None, message: "missing required key `scenario`".into() })?;
        validate_recipient(&recipient)
            .map_err(|err| InvalidTunable::new("gsm.recipient", err.to_string()))?;
        validate_body(&body).map_err(|err| InvalidTunable::new("gsm.body", err.to_string()))?;
        cfg.escalate.alert = GsmAlert::new(recipient, body).expect("fields validated above");
        cfg.validate()?;
        Ok(cfg)
    }

    /// Renders every setting in the grammar [`Self::parse`] reads.
    pub fn to_config_string(&self) -> String {
        let d = &self.detect;
        let e = &self.escalate;
        let mut out = String::new();
        let mut kv = |key: &str, value: &dyn std::fmt::Display| {
            let _ = writeln!(out, "{key} {value}");
        };
        kv("scenario", &self.scenario.display());
        if let Some(seed) = self.seed {
            kv("seed", &seed);
        }
        kv("detect.close_threshold", &d.eye.close_threshold);
        kv("detect.open_threshold", &d.eye.open_threshold);
        kv("detect.debounce_ms", &d.eye.debounce_ms);
        kv("detect.blink_max_ms", &d.blink.blink_max_ms);
        kv("detect.window_ms", &d.blink.window_ms);
        kv("detect.refractory_ms", &d.peaks.refractory_ms);
        kv("detect.rel_threshold", &d.peaks.rel_threshold);
        kv("detect.rolling_ms", &d.peaks.rolling_ms);
        kv("detect.min_swing", &d.peaks.min_swing);
        kv("detect.bpm_window_ms", &d.heart.bpm_window_ms);
        kv("detect.baseline_tau_ms", &d.heart.baseline_tau_ms);
        kv("detect.slowdown_ratio", &d.heart.slowdown_ratio);
        kv("escalate.t_blink_ms", &e.t_blink_ms);
        kv("escalate.t_persist_ms", &e.t_persist_ms);
        kv("escalate.t_recover_ms", &e.t_recover_ms);
        kv("escalate.slowdown_required", &e.slowdown_required);
        kv("escalate.dropout_ms", &e.dropout_ms);
        kv("escalate.vibrator_duty", &e.vibrator_duty);
        kv("device.siren_period_ms", &self.siren.period_ms);
        kv("device.siren_duty", &self.siren.duty);
        kv("gsm.recipient", &e.alert.recipient());
        kv("gsm.body", &e.alert.body());
        if let Some(csv) = &self.csv {
            kv("output.csv", &csv.display());
        }
        out
    }
}

fn num<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, HarnessError> {
    value.parse().map_err(|_| HarnessError::Config {
        line: Some(line),
        message: format!("invalid value `{value}` for `{key}`"),
    })
}
