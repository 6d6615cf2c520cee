//! Variable-step sliding extremum over piecewise-constant interval signals.
//!
//! For a window `[a, b]` the output at `m` is the extremum of the input over
//! `[m + a, m + b]`. An input piece covering `[s, e)` is therefore active for
//! outputs in `[s - b, e - a)`. Pieces enter and leave in input order, so the
//! candidates for the extremum form a monotonic deque. Lower and upper
//! endpoints are tracked by separate deques.

use std::collections::VecDeque;

use super::worklist::Moment;
use crate::interval::Interval;

/// One monotonic edge: `(leave moment, endpoint)`; endpoints are
/// non-increasing front to back for a maximum, non-decreasing for a minimum.
type Edge = VecDeque<(Moment, f64)>;

#[derive(Debug, Clone)]
pub(crate) struct Filter {
    max: bool,
    a: f64,
    b: f64,
    /// Closed pieces that enter after `cursor`: `(enter, leave, value)`.
    pending: VecDeque<(Moment, Moment, Interval)>,
    open: Option<(Moment, Interval)>,
    lo: Edge,
    hi: Edge,
    /// Every output before `cursor` has been emitted.
    cursor: Moment,
    pub ops: u64,
}

impl Filter {
    pub fn new(max: bool, a: f64, b: f64, start: Moment) -> Self {
        Filter {
            max,
            a,
            b,
            pending: VecDeque::new(),
            open: None,
            lo: Edge::new(),
            hi: Edge::new(),
            cursor: start,
            ops: 0,
        }
    }

    /// Number of stored elements, the cost of a clone.
    pub fn size(&self) -> usize {
        self.pending.len() + self.lo.len() + self.hi.len() + 1
    }

    /// Starts a new input piece at `start`, closing the previous one there.
    pub fn feed(&mut self, start: Moment, v: Interval) {
        self.close(start);
        self.open = Some((start, v));
    }

    /// Ends the current input piece at `end`.
    pub fn close(&mut self, end: Moment) {
        if let Some((start, v)) = self.open.take() {
            debug_assert!(start < end);
            let enter = start.shift(-self.b);
            let leave = end.shift(-self.a);
            if self.pending.is_empty() && enter <= self.cursor {
                self.enter(leave, v);
            } else {
                self.pending.push_back((enter, leave, v));
            }
        }
    }

    fn enter(&mut self, leave: Moment, v: Interval) {
        let max = self.max;
        // pop while the newcomer is at least as good: ties keep the newest
        let dominated = |old: f64, new: f64| if max { new >= old } else { new <= old };
        for (edge, x) in [(&mut self.lo, v.lo()), (&mut self.hi, v.hi())] {
            while let Some(&(_, back)) = edge.back() {
                if !dominated(back, x) {
                    break;
                }
                edge.pop_back();
                self.ops += 1;
            }
            edge.push_back((leave, x));
            self.ops += 1;
        }
    }

    /// Emits the outputs at every event moment in `[cursor, limit)`, starting
    /// with one at `cursor` itself. Input must be closed up to `limit + b`.
    pub fn emit_until(&mut self, limit: Moment, mut out: impl FnMut(Moment, Interval)) {
        while self.cursor < limit {
            let m = self.cursor;
            while let Some(&(enter, leave, v)) = self.pending.front() {
                if enter > m {
                    break;
                }
                self.pending.pop_front();
                self.enter(leave, v);
            }
            for edge in [&mut self.lo, &mut self.hi] {
                while edge.front().is_some_and(|&(leave, _)| leave <= m) {
                    edge.pop_front();
                    self.ops += 1;
                }
            }
            let (lo, hi) = match (self.lo.front(), self.hi.front()) {
                (Some(l), Some(h)) => (l.1, h.1),
                _ => panic!("sliding window at {m:?} covers no input"),
            };
            out(m, Interval::new(lo, hi).expect("edge endpoints are ordered"));
            self.ops += 1;
            let mut next = limit;
            if let Some(p) = self.pending.front() {
                next = next.min(p.0);
            }
            for edge in [&self.lo, &self.hi] {
                if let Some(f) = edge.front() {
                    next = next.min(f.0);
                }
            }
            self.cursor = next;
        }
    }
}

/// A breakpoint of a piecewise-constant signal: `rosi` holds from `time` up
/// to the next entry's time, and the last entry holds forever.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorklistEntry {
    pub time: f64,
    pub rosi: Interval,
}

impl WorklistEntry {
    pub fn new(time: f64, rosi: Interval) -> Self {
        WorklistEntry { time, rosi }
    }
}

fn sliding(entries: &[WorklistEntry], window: Interval, max: bool) -> Vec<WorklistEntry> {
    let (Some(first), Some(last)) = (entries.first(), entries.last()) else {
        return Vec::new();
    };
    assert!(
        window.lo() >= 0.0 && window.hi().is_finite() && !window.is_empty(),
        "sliding window must satisfy 0 <= a <= b < inf"
    );
    let mut f = Filter::new(max, window.lo(), window.hi(), Moment::at(first.time));
    for e in entries {
        f.feed(Moment::at(e.time), e.rosi);
    }
    f.close(Moment::at(f64::INFINITY));
    let mut out = Vec::new();
    f.emit_until(Moment::after(last.time), |m, v| {
        out.push(WorklistEntry::new(m.t, v))
    });
    out
}

/// Sliding maximum `y(t) = sup of x over [t + a, t + b]` for `t` in
/// `[t_first, t_last]`, computed endpointwise.
///
/// The output lists `y` at the start time and at every time where the
/// window gains or loses an input piece.
pub fn sliding_max(entries: &[WorklistEntry], window: Interval) -> Vec<WorklistEntry> {
    sliding(entries, window, true)
}

/// The dual of [`sliding_max`].
pub fn sliding_min(entries: &[WorklistEntry], window: Interval) -> Vec<WorklistEntry> {
    sliding(entries, window, false)
}
