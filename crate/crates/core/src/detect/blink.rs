use std::collections::VecDeque;

use super::eye::EyeState;
use super::DetectError;
use crate::error::{ensure, InvalidTunable};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlinkTrackerConfig {
    /// Closures at least this long are not blinks.
    pub blink_max_ms: u64,
    /// Trailing window for blink count, PERCLOS and longest closure.
    pub window_ms: u64,
}

impl Default for BlinkTrackerConfig {
    fn default() -> Self {
        Self { blink_max_ms: 400, window_ms: 60_000 }
    }
}

impl BlinkTrackerConfig {
    pub fn validate(&self) -> Result<(), InvalidTunable> {
        ensure(self.blink_max_ms > 0, "detect.blink_max_ms", || "must be positive".into())?;
        ensure(self.window_ms > 0, "detect.window_ms", || "must be positive".into())
    }
}

/// A completed eye closure. Emitted for every closure; only short ones
/// count towards the blink rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlinkEvent {
    pub start_ms: u64,
    pub end_ms: u64,
}

impl BlinkEvent {
    pub fn duration_ms(&self) -> u64 {
        self.end_ms - self.start_ms
    }

    pub fn is_blink(&self, blink_max_ms: u64) -> bool {
        self.duration_ms() < blink_max_ms
    }
}

/// Eye-closure statistics over the trailing window.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VigilanceMetrics {
    pub window_ms: u64,
    pub blink_count: u32,
    pub perclos: f64,
    /// Length of the ongoing closure, 0 while the eyes are open.
    pub current_closure_ms: u64,
    pub longest_closure_ms: u64,
    pub eyes_closed: bool,
}

/// Closed-sample fraction of a window of per-sample eye states.
pub fn compute_perclos(closed: &[bool]) -> Result<f64, DetectError> {
    if closed.is_empty() {
        return Err(DetectError::EmptyWindow);
    }
    let n_closed = closed.iter().filter(|&&c| c).count();
    Ok(n_closed as f64 / closed.len() as f64)
}

/// Counts blinks and tracks closure durations from a classified eye stream.
#[derive(Debug, Clone, Default)]
pub struct BlinkTracker {
    last_t: Option<u64>,
    closure_start: Option<u64>,
    window: VecDeque<(u64, bool)>,
    closed_in_window: usize,
    closures: VecDeque<BlinkEvent>,
}

impl BlinkTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn update_blink_tracker(
        &mut self,
        t_ms: u64,
        eye: EyeState,
        cfg: &BlinkTrackerConfig,
    ) -> Result<(Option<BlinkEvent>, VigilanceMetrics), DetectError> {
        if let Some(prev) = self.last_t {
            if t_ms <= prev {
                return Err(DetectError::OutOfOrder { prev_ms: prev, t_ms });
            }
        }
        self.last_t = Some(t_ms);

        let closed = eye == EyeState::Closed;
        let mut finished = None;
        match (self.closure_start, closed) {
            (None, true) => self.closure_start = Some(t_ms),
            (Some(start), false) => {
                let ev = BlinkEvent { start_ms: start, end_ms: t_ms };
                self.closures.push_back(ev);
                self.closure_start = None;
                finished = Some(ev);
            }
            _ => {}
        }

        self.window.push_back((t_ms, closed));
        if closed {
            self.closed_in_window += 1;
        }
        let in_window = |t: u64| t_ms - t < cfg.window_ms;
        while let Some(&(t, c)) = self.window.front() {
            if in_window(t) {
                break;
            }
            self.window.pop_front();
            if c {
                self.closed_in_window -= 1;
            }
        }
        while let Some(ev) = self.closures.front() {
            if in_window(ev.end_ms) {
                break;
            }
            self.closures.pop_front();
        }

        let current_closure_ms = self.closure_start.map_or(0, |s| t_ms - s);
        let blink_count = self.closures.iter().filter(|ev| ev.is_blink(cfg.blink_max_ms)).count() as u32;
        let longest_closure_ms = self
            .closures
            .iter()
            .map(BlinkEvent::duration_ms)
            .chain(std::iter::once(current_closure_ms))
            .max()
            .unwrap_or(0);

        let metrics = VigilanceMetrics {
            window_ms: cfg.window_ms,
            blink_count,
            perclos: self.closed_in_window as f64 / self.window.len() as f64,
            current_closure_ms,
            longest_closure_ms,
            eyes_closed: closed,
        };
        Ok((finished, metrics))
    }

    /// Per-sample closed flags currently inside the window, oldest first.
    pub fn window_flags(&self) -> impl Iterator<Item = bool> + '_ {
        self.window.iter().map(|&(_, c)| c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feed(
        tracker: &mut BlinkTracker,
        cfg: &BlinkTrackerConfig,
        from: u64,
        to: u64,
        eye: EyeState,
    ) -> (Vec<BlinkEvent>, VigilanceMetrics) {
        let mut events = Vec::new();
        let mut last = VigilanceMetrics::default();
        for t in (from..to).step_by(10) {
            let (ev, m) = tracker.update_blink_tracker(t, eye, cfg).unwrap();
            events.extend(ev);
            last = m;
        }
        (events, last)
    }

    #[test]
    fn perclos_examples() {
        assert_eq!(compute_perclos(&[false; 60]).unwrap(), 0.0);
        assert_eq!(compute_perclos(&[true; 60]).unwrap(), 1.0);
        let mut w = vec![false; 60];
        w[..15].fill(true);
        assert_eq!(compute_perclos(&w).unwrap(), 0.25);
        assert_eq!(compute_perclos(&[]), Err(DetectError::EmptyWindow));
    }

    #[test]
    fn short_closure_is_a_blink() {
        let cfg = BlinkTrackerConfig::default();
        let mut tr = BlinkTracker::new();
        feed(&mut tr, &cfg, 0, 1000, EyeState::Open);
        feed(&mut tr, &cfg, 1000, 1180, EyeState::Closed);
        let (events, m) = feed(&mut tr, &cfg, 1180, 1200, EyeState::Open);
        assert_eq!(events, vec![BlinkEvent { start_ms: 1000, end_ms: 1180 }]);
        assert_eq!(m.blink_count, 1);
        assert_eq!(m.longest_closure_ms, 180);
        assert_eq!(m.current_closure_ms, 0);
    }

    #[test]
    fn long_closure_is_not_a_blink() {
        let cfg = BlinkTrackerConfig::default();
        let mut tr = BlinkTracker::new();
        feed(&mut tr, &cfg, 0, 1000, EyeState::Open);
        let (_, during) = feed(&mut tr, &cfg, 1000, 3000, EyeState::Closed);
        assert_eq!(during.current_closure_ms, 1990);
        let (events, m) = feed(&mut tr, &cfg, 3000, 3100, EyeState::Open);
        assert_eq!(events.len(), 1);
        assert_eq!(m.blink_count, 0);
        assert_eq!(m.longest_closure_ms, 2000);
    }

    #[test]
    fn window_forgets_old_blinks() {
        let cfg = BlinkTrackerConfig { window_ms: 1000, ..Default::default() };
        let mut tr = BlinkTracker::new();
        feed(&mut tr, &cfg, 0, 100, EyeState::Closed);
        let (_, m) = feed(&mut tr, &cfg, 100, 500, EyeState::Open);
        assert_eq!(m.blink_count, 1);
        let (_, m) = feed(&mut tr, &cfg, 500, 1100, EyeState::Open);
        assert_eq!(m.blink_count, 1, "blink ended at 100, still inside (100, 1090]");
        let (_, m) = feed(&mut tr, &cfg, 1100, 1200, EyeState::Open);
        assert_eq!(m.blink_count, 0);
        assert_eq!(m.perclos, 0.0);
    }

    #[test]
    fn perclos_tracks_window_exactly() {
        let cfg = BlinkTrackerConfig { window_ms: 600, ..Default::default() };
        let mut tr = BlinkTracker::new();
        feed(&mut tr, &cfg, 0, 300, EyeState::Open);
        let (_, m) = feed(&mut tr, &cfg, 300, 450, EyeState::Closed);
        let flags: Vec<bool> = tr.window_flags().collect();
        assert_eq!(flags.len(), 45);
        assert_eq!(m.perclos, compute_perclos(&flags).unwrap());
        let (_, m) = feed(&mut tr, &cfg, 450, 1000, EyeState::Open);
        let flags: Vec<bool> = tr.window_flags().collect();
        assert_eq!(flags.len(), 60);
        assert_eq!(m.perclos, compute_perclos(&flags).unwrap());
    }

    #[test]
    fn out_of_order_rejected() {
        let cfg = BlinkTrackerConfig::default();
        let mut tr = BlinkTracker::new();
        tr.update_blink_tracker(100, EyeState::Open, &cfg).unwrap();
        assert_eq!(
            tr.update_blink_tracker(50, EyeState::Open, &cfg).unwrap_err(),
            DetectError::OutOfOrder { prev_ms: 100, t_ms: 50 }
        );
        assert!(tr.update_blink_tracker(100, EyeState::Open, &cfg).is_err());
    }
}
