//! Alert escalation: fuses eye-closure and heart-rate metrics into a
//! three-level alert and the actuator commands for each level.
//!
//! ```text
//!            closure > t_blink            closure > t_blink + t_persist
//!   Awake ----------------------> Stage1 --------------------------------> Stage2
//!     ^                             |       and (slowdown | not required |   |
//!     |        open >= t_recover    |            heart lost > dropout_ms)    |
//!     +-----------------------------+----------------------------------------+
//! ```
//!
//! Stage1 sounds the buzzer. Stage2 adds the seat vibrator and sends one GSM
//! alert on entry. Only one transition happens per step, so Stage2 is always
//! preceded by at least one tick of Stage1.

use std::fmt;

use thiserror::Error;

use crate::detect::{HeartEstimate, VigilanceMetrics};
use crate::device::GsmAlert;
use crate::error::{ensure, InvalidTunable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum AlertLevel {
    #[default]
    Awake,
    Stage1,
    Stage2,
}

impl AlertLevel {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlertLevel::Awake => "awake",
            AlertLevel::Stage1 => "stage1",
            AlertLevel::Stage2 => "stage2",
        }
    }
}

impl fmt::Display for AlertLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EscalationConfig {
    /// Closure length that sounds the buzzer.
    pub t_blink_ms: u64,
    /// Further closure beyond `t_blink_ms` before the vibrator engages.
    pub t_persist_ms: u64,
    /// Continuous open-eye time that ends an episode.
    pub t_recover_ms: u64,
    /// Stage2 also needs a heart-rate slowdown.
    pub slowdown_required: bool,
    /// Heart data missing this long waives the slowdown requirement.
    pub dropout_ms: u64,
    /// Vibrator PWM duty in Stage2.
    pub vibrator_duty: u8,
    pub alert: GsmAlert,
}

impl Default for EscalationConfig {
    fn default() -> Self {
        Self {
            t_blink_ms: 400,
            t_persist_ms: 3000,
            t_recover_ms: 1000,
            slowdown_required: true,
            dropout_ms: 10_000,
            vibrator_duty: 200,
            alert: GsmAlert::new("+15551234567", "DROWSY DRIVER ALERT").expect("default alert is valid"),
        }
    }
}

impl EscalationConfig {
    pub fn validate(&self) -> Result<(), InvalidTunable> {
        let positive = || "must be positive".to_string();
        ensure(self.t_blink_ms > 0, "escalate.t_blink_ms", positive)?;
        ensure(self.t_persist_ms > 0, "escalate.t_persist_ms", positive)?;
        ensure(self.t_recover_ms > 0, "escalate.t_recover_ms", positive)?;
        ensure(self.dropout_ms > 0, "escalate.dropout_ms", positive)?;
        ensure(self.vibrator_duty > 0, "escalate.vibrator_duty", positive)
    }
}

/// Outputs for one tick.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ActuatorCommand {
    pub buzzer_on: bool,
    pub vibrator_duty: u8,
    /// Present only on the tick that enters Stage2.
    pub gsm: Option<GsmAlert>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EscalateError {
    #[error("time went backwards: {now_ms} ms after {last_ms} ms")]
    TimeRegression { last_ms: u64, now_ms: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AlertState {
    pub level: AlertLevel,
    pub entered_at_ms: u64,
    /// The GSM alert for the current episode has gone out.
    pub gsm_sent: bool,
    last_ms: Option<u64>,
    open_since_ms: Option<u64>,
    heart_lost_since_ms: Option<u64>,
}

impl AlertState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Pure transition function: the next state and this tick's commands.
    pub fn step(
        &self,
        now_ms: u64,
        vig: &VigilanceMetrics,
        heart: &HeartEstimate,
        cfg: &EscalationConfig,
    ) -> Result<(AlertState, ActuatorCommand), EscalateError> {
        if let Some(last_ms) = self.last_ms {
            if now_ms < last_ms {
                return Err(EscalateError::TimeRegression { last_ms, now_ms });
            }
        }
        let mut next = *self;
        next.last_ms = Some(now_ms);
        if vig.eyes_closed {
            next.open_since_ms = None;
        } else {
            next.open_since_ms.get_or_insert(now_ms);
        }
        if heart.valid {
            next.heart_lost_since_ms = None;
        } else {
            next.heart_lost_since_ms.get_or_insert(now_ms);
        }

        let closure_ms = if vig.eyes_closed { vig.current_closure_ms } else { 0 };
        let recovered = next.open_since_ms.is_some_and(|since| now_ms - since >= cfg.t_recover_ms);
        let heart_lost = next.heart_lost_since_ms.is_some_and(|since| now_ms - since > cfg.dropout_ms);
        let heart_ok = heart.slowdown || !cfg.slowdown_required || heart_lost;

        let target = match self.level {
            AlertLevel::Awake if closure_ms > cfg.t_blink_ms => AlertLevel::Stage1,
            AlertLevel::Stage1 if closure_ms > cfg.t_blink_ms + cfg.t_persist_ms && heart_ok => {
                AlertLevel::Stage2
            }
            AlertLevel::Stage1 | AlertLevel::Stage2 if recovered => AlertLevel::Awake,
            level => level,
        };

        let mut gsm = None;
        if target != self.level {
            next.level = target;
            next.entered_at_ms = now_ms;
            match target {
                AlertLevel::Stage2 if !self.gsm_sent => {
                    gsm = Some(cfg.alert.clone());
                    next.gsm_sent = true;
                }
                AlertLevel::Awake => next.gsm_sent = false,
                _ => {}
            }
        }

        let command = ActuatorCommand {
            buzzer_on: next.level != AlertLevel::Awake,
            vibrator_duty: if next.level == AlertLevel::Stage2 { cfg.vibrator_duty } else { 0 },
            gsm,
        };
        Ok((next, command))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub t_ms: u64,
    pub from: AlertLevel,
    pub to: AlertLevel,
}

/// Collapses a per-tick level sequence into its transitions.
pub fn episode_log(levels: impl IntoIterator<Item = (u64, AlertLevel)>) -> Vec<Transition> {
    let mut out = Vec::new();
    let mut prev = AlertLevel::Awake;
    for (t_ms, level) in levels {
        if level != prev {
            out.push(Transition { t_ms, from: prev, to: level });
            prev = level;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    use AlertLevel::*;

    fn vig(closed: bool, closure_ms: u64) -> VigilanceMetrics {
        VigilanceMetrics {
            eyes_closed: closed,
            current_closure_ms: if closed { closure_ms } else { 0 },
            ..Default::default()
        }
    }

    fn heart(slowdown: bool) -> HeartEstimate {
        HeartEstimate { bpm: 60.0, baseline_bpm: 75.0, slowdown, valid: true }
    }

    /// Steps through `ticks` of (closed, slowdown, valid) at `period` ms,
    /// deriving closure duration from consecutive closed ticks.
    fn walk(
        ticks: &[(bool, bool, bool)],
        period: u64,
        cfg: &EscalationConfig,
    ) -> (Vec<(u64, AlertLevel)>, Vec<ActuatorCommand>) {
        let mut state = AlertState::new();
        let mut closed_since = None;
        let mut levels = Vec::new();
        let mut cmds = Vec::new();
        for (i, &(closed, slowdown, valid)) in ticks.iter().enumerate() {
            let t = i as u64 * period;
            if closed {
                closed_since.get_or_insert(t);
            } else {
                closed_since = None;
            }
            let v = vig(closed, closed_since.map_or(0, |s| t - s));
            let h = HeartEstimate { valid, slowdown: slowdown && valid, ..heart(false) };
            let (next, cmd) = state.step(t, &v, &h, cfg).unwrap();
            state = next;
            levels.push((t, state.level));
            cmds.push(cmd);
        }
        (levels, cmds)
    }

    fn closure_ticks(
        open_before: usize,
        closed: usize,
        open_after: usize,
        slowdown: bool,
    ) -> Vec<(bool, bool, bool)> {
        let mut v = vec![(false, slowdown, true); open_before];
        v.extend(vec![(true, slowdown, true); closed]);
        v.extend(vec![(false, slowdown, true); open_after]);
        v
    }

    fn levels_of(log: &[Transition]) -> Vec<(AlertLevel, AlertLevel)> {
        log.iter().map(|t| (t.from, t.to)).collect()
    }

    #[test]
    fn awake_to_stage1_sounds_buzzer() {
        let cfg = EscalationConfig::default();
        let (s, cmd) = AlertState::new().step(1000, &vig(true, 500), &heart(false), &cfg).unwrap();
        assert_eq!(s.level, Stage1);
        assert!(cmd.buzzer_on);
        assert_eq!(cmd.vibrator_duty, 0);
        assert!(cmd.gsm.is_none());
    }

    #[test]
    fn stage1_to_stage2_with_slowdown() {
        let cfg = EscalationConfig::default();
        let (s1, _) = AlertState::new().step(1000, &vig(true, 500), &heart(true), &cfg).unwrap();
        let (s2, cmd) = s1.step(4100, &vig(true, 3600), &heart(true), &cfg).unwrap();
        assert_eq!(s2.level, Stage2);
        assert!(cmd.buzzer_on);
        assert_eq!(cmd.vibrator_duty, 200);
        assert_eq!(cmd.gsm, Some(cfg.alert.clone()));
        assert!(s2.gsm_sent);
    }

    #[test]
    fn stage1_holds_without_slowdown() {
        let cfg = EscalationConfig::default();
        let (s1, _) = AlertState::new().step(1000, &vig(true, 500), &heart(false), &cfg).unwrap();
        let (s, cmd) = s1.step(9000, &vig(true, 8500), &heart(false), &cfg).unwrap();
        assert_eq!(s.level, Stage1);
        assert!(cmd.gsm.is_none());
    }

    #[test]
    fn override_allows_stage2_without_slowdown() {
        let cfg = EscalationConfig { slowdown_required: false, ..Default::default() };
        let (s1, _) = AlertState::new().step(1000, &vig(true, 500), &heart(false), &cfg).unwrap();
        let (s2, _) = s1.step(4100, &vig(true, 3600), &heart(false), &cfg).unwrap();
        assert_eq!(s2.level, Stage2);
    }

    #[test]
    fn recovery_after_continuous_open() {
        let cfg = EscalationConfig::default();
        let (s1, _) = AlertState::new().step(0, &vig(true, 500), &heart(true), &cfg).unwrap();
        let (s2, _) = s1.step(3500, &vig(true, 4000), &heart(true), &cfg).unwrap();
        assert_eq!(s2.level, Stage2);
        let (s, _) = s2.step(4000, &vig(false, 0), &heart(true), &cfg).unwrap();
        assert_eq!(s.level, Stage2);
        let (s, _) = s.step(4999, &vig(false, 0), &heart(true), &cfg).unwrap();
        assert_eq!(s.level, Stage2);
        let (s, cmd) = s.step(5000, &vig(false, 0), &heart(true), &cfg).unwrap();
        assert_eq!(s.level, Awake);
        assert_eq!(cmd, ActuatorCommand::default());
        assert!(!s.gsm_sent);
    }

    #[test]
    fn time_regression_is_an_error() {
        let cfg = EscalationConfig::default();
        let (s, _) = AlertState::new().step(100, &vig(false, 0), &heart(false), &cfg).unwrap();
        assert_eq!(
            s.step(99, &vig(false, 0), &heart(false), &cfg).unwrap_err(),
            EscalateError::TimeRegression { last_ms: 100, now_ms: 99 }
        );
        assert!(s.step(100, &vig(false, 0), &heart(false), &cfg).is_ok());
    }

    #[test]
    fn episode_logs_for_canonical_walks() {
        let cfg = EscalationConfig::default();
        let (levels, _) = walk(&closure_ticks(500, 0, 500, false), 10, &cfg);
        assert!(episode_log(levels).is_empty());

        let (levels, _) = walk(&closure_ticks(100, 20, 300, false), 10, &cfg);
        assert!(episode_log(levels).is_empty(), "200 ms blink stays awake");

        let (levels, _) = walk(&closure_ticks(100, 500, 300, true), 10, &cfg);
        assert_eq!(levels_of(&episode_log(levels)), vec![(Awake, Stage1), (Stage1, Stage2), (Stage2, Awake)]);

        let (levels, _) = walk(&closure_ticks(100, 60, 300, false), 10, &cfg);
        assert_eq!(levels_of(&episode_log(levels)), vec![(Awake, Stage1), (Stage1, Awake)]);
    }

    #[test]
    fn canonical_transition_times() {
        let cfg = EscalationConfig::default();
        // Closed from t = 1000 to 6000 at 10 ms ticks.
        let (levels, cmds) = walk(&closure_ticks(100, 500, 300, true), 10, &cfg);
        let log = episode_log(levels);
        assert_eq!(log[0].t_ms, 1410);
        assert_eq!(log[1].t_ms, 4410);
        assert_eq!(log[2].t_ms, 7000);
        assert_eq!(cmds.iter().filter(|c| c.gsm.is_some()).count(), 1);
    }

    #[test]
    fn heart_dropout_fail_safe() {
        let cfg = EscalationConfig::default();
        // Heart data lost from t = 0; eyes close at 5000 ms for 6 s.
        let mut ticks = vec![(false, false, false); 500];
        ticks.extend(vec![(true, false, false); 600]);
        ticks.extend(vec![(false, false, false); 200]);
        let (levels, _) = walk(&ticks, 10, &cfg);
        let log = episode_log(levels);
        assert_eq!(levels_of(&log), vec![(Awake, Stage1), (Stage1, Stage2), (Stage2, Awake)]);
        // Lost since 0, so the waiver opens just after 10 s.
        assert_eq!(log[1].t_ms, 10_010);
    }

    #[test]
    fn episode_log_skips_repeats() {
        let log = episode_log([(0, Awake), (10, Awake), (20, Stage1), (30, Stage1), (40, Awake)]);
        assert_eq!(log.len(), 2);
        assert_eq!(log[0], Transition { t_ms: 20, from: Awake, to: Stage1 });
    }

    #[test]
    fn config_validation_names_field() {
        let cfg = EscalationConfig { t_blink_ms: 0, ..Default::default() };
        assert_eq!(cfg.validate().unwrap_err().field, "escalate.t_blink_ms");
        let cfg = EscalationConfig { vibrator_duty: 0, ..Default::default() };
        assert_eq!(cfg.validate().unwrap_err().field, "escalate.vibrator_duty");
    }

    fn tick_strategy() -> impl Strategy<Value = Vec<(bool, bool, bool)>> {
        // Runs of identical ticks give realistic closures and open stretches.
        prop::collection::vec((any::<bool>(), any::<bool>(), prop::bool::weighted(0.9), 1usize..700), 1..30)
            .prop_map(|runs| {
                runs.into_iter().flat_map(|(c, s, v, n)| std::iter::repeat_n((c, s, v), n)).collect()
            })
    }

    proptest! {
        #[test]
        fn safety_invariants_hold(ticks in tick_strategy()) {
            let cfg = EscalationConfig::default();
            let (levels, cmds) = walk(&ticks, 10, &cfg);
            let mut prev = Awake;
            let mut gsm_this_episode = 0;
            for ((_, level), cmd) in levels.iter().zip(&cmds) {
                prop_assert!(!(prev == Awake && *level == Stage2));
                prop_assert_eq!(cmd.buzzer_on, *level != Awake);
                prop_assert_eq!(cmd.vibrator_duty > 0, *level == Stage2);
                if cmd.gsm.is_some() {
                    prop_assert!(prev == Stage1 && *level == Stage2);
                    gsm_this_episode += 1;
                    prop_assert!(gsm_this_episode <= 1);
                }
                if *level == Awake {
                    gsm_this_episode = 0;
                }
                prev = *level;
            }
        }

        #[test]
        fn quiet_streams_stay_awake(ticks in tick_strategy()) {
            // Cap every closure below t_blink (39 ticks of 10 ms = 380 ms) and drop slowdown.
            let mut capped = Vec::with_capacity(ticks.len());
            let mut run = 0;
            for (closed, _, valid) in ticks {
                run = if closed { run + 1 } else { 0 };
                capped.push((closed && run <= 39, false, valid));
            }
            let (levels, cmds) = walk(&capped, 10, &EscalationConfig::default());
            prop_assert!(levels.iter().all(|(_, l)| *l == Awake));
            prop_assert!(cmds.iter().all(|c| *c == ActuatorCommand::default()));
        }

        #[test]
        fn escalation_is_monotone_in_closure_length(a in 1usize..800, extra in 0usize..400) {
            let cfg = EscalationConfig::default();
            let peak = |closed: usize| {
                let (levels, _) = walk(&closure_ticks(50, closed, 150, true), 10, &cfg);
                levels.into_iter().map(|(_, l)| l).max().unwrap()
            };
            prop_assert!(peak(a + extra) >= peak(a));
        }

        #[test]
        fn step_is_deterministic(closed in any::<bool>(), closure in 0u64..10_000, slowdown in any::<bool>(), now in 0u64..100_000) {
            let cfg = EscalationConfig::default();
            let s = AlertState::new();
            let v = vig(closed, closure);
            let h = heart(slowdown);
            prop_assert_eq!(s.step(now, &v, &h, &cfg).unwrap(), s.step(now, &v, &h, &cfg).unwrap());
        }
    }
}
