//! Monitors for untimed formulas with bounded operands.
//!
//! Each supported class folds the operand values at successive sample
//! instants into a [`Summary`] of at most two intervals. Operand values come
//! from embedded bounded monitors; a sample enters the summary once both
//! operand values at its time are final, so only the samples of the last
//! `w_phi` time units are buffered.
//!
//! The result is prefix robustness: the untimed operators quantify over the
//! sample instants observed so far.

use std::collections::VecDeque;

use thiserror::Error;

use crate::bounded::{verdict_of, BoundedMonitor, MonitorError, Options, StepOutput, Verdict};
use crate::formula::{compute_last, untimed_class, Formula, FormulaError, UntimedKind};
use crate::interval::Interval;
use crate::signal::{Sample, Schema};

/// Constant-size state of an untimed class over the operand sequences
/// `p` (of `phi`) and `q` (of `psi`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    kind: UntimedKind,
    /// Main accumulator.
    t: Interval,
    /// Running extremum of `p`, for the classes that need one.
    m: Interval,
}

impl Summary {
    pub fn new(kind: UntimedKind) -> Self {
        use UntimedKind::*;
        let (t, m) = match kind {
            G | GOrF => (Interval::TOP, Interval::TOP),
            F | FAndG => (Interval::BOTTOM, Interval::BOTTOM),
            U => (Interval::BOTTOM, Interval::TOP),
            FAndF => (Interval::BOTTOM, Interval::BOTTOM),
            GOrG => (Interval::TOP, Interval::TOP),
            GF | FG => (Interval::EMPTY, Interval::EMPTY),
        };
        Summary { kind, t, m }
    }

    pub fn kind(&self) -> UntimedKind {
        self.kind
    }

    /// Folds in the next pair of operand values and returns the value of the
    /// class over everything folded so far. `q` is ignored by unary classes.
    pub fn push(&mut self, p: Interval, q: Interval) -> Interval {
        use UntimedKind::*;
        match self.kind {
            G => self.t = self.t.min(p),
            F => self.t = self.t.max(p),
            U => {
                self.m = self.m.min(p);
                self.t = self.t.max(q.min(self.m));
            }
            GOrF => self.t = q.max(p.min(self.t)),
            FAndG => self.t = q.min(p.max(self.t)),
            FAndF => {
                self.t = self.t.max(q.min(self.m)).max(q.min(p));
                self.m = self.m.max(p);
            }
            GOrG => {
                self.t = self.t.min(q.max(self.m)).min(q.max(p));
                self.m = self.m.min(p);
            }
            GF | FG => return p,
        }
        self.t
    }

    /// Number of intervals the class keeps between samples.
    pub fn state_size(&self) -> usize {
        use UntimedKind::*;
        match self.kind {
            GF | FG => 0,
            G | F | GOrF | FAndG => 1,
            U | FAndF | GOrG => 2,
        }
    }
}

/// Direction in which the prefix value of `kind` only ever moves, if any:
/// `Some(Falsified)` when the upper bound never increases, `Some(Satisfied)`
/// when the lower bound never decreases.
pub fn absorbing(kind: UntimedKind) -> Option<Verdict> {
    use UntimedKind::*;
    match kind {
        G | GOrG => Some(Verdict::Falsified),
        F | U | FAndF => Some(Verdict::Satisfied),
        GF | FG | GOrF | FAndG => None,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UntimedError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Monitor(#[from] MonitorError),
    #[error("operands look {w} time units ahead; a minimum sample gap (delta) is required")]
    MissingDelta { w: f64 },
    #[error("sample at {time} is {gap} after the previous one, less than delta = {delta}")]
    GapBelowDelta { time: f64, gap: f64, delta: f64 },
    #[error("{len} samples pending, more than k = {k}")]
    BufferOverflow { len: usize, k: usize },
}

/// Online monitor for a formula recognised by [`untimed_class`].
#[derive(Debug, Clone)]
pub struct UntimedMonitor {
    summary: Summary,
    phi: BoundedMonitor,
    psi: Option<BoundedMonitor>,
    /// Sample times whose operand values are not all final yet.
    pending: VecDeque<f64>,
    delta: Option<f64>,
    w: f64,
    k: usize,
    last_time: Option<f64>,
    max_pending: usize,
    rosi: Option<Interval>,
    frozen: Option<StepOutput>,
}

impl UntimedMonitor {
    /// `delta` is the minimum gap between samples; it is required when an
    /// operand has a temporal operator.
    pub fn new(
        formula: &Formula,
        schema: &Schema,
        delta: Option<f64>,
        opts: Options,
    ) -> Result<Self, UntimedError> {
        let class =
            untimed_class(formula).ok_or_else(|| FormulaError::Unsupported(formula.to_string()))?;
        let mut w = compute_last(&class.phi);
        if let Some(psi) = &class.psi {
            w = w.max(compute_last(psi));
        }
        if let Some(d) = delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(FormulaError::BadDelta(d).into());
            }
        }
        let k = match delta {
            _ if w == 0.0 => 0,
            Some(d) => (w / d).ceil() as usize,
            None => return Err(UntimedError::MissingDelta { w }),
        };
        let phi = BoundedMonitor::streaming(&class.phi, schema, opts)?;
        let psi = match &class.psi {
            Some(f) => Some(BoundedMonitor::streaming(f, schema, opts)?),
            None => None,
        };
        Ok(UntimedMonitor {
            summary: Summary::new(class.kind),
            phi,
            psi,
            pending: VecDeque::new(),
            delta,
            w,
            k,
            last_time: None,
            max_pending: 0,
            rosi: None,
            frozen: None,
        })
    }

    pub fn kind(&self) -> UntimedKind {
        self.summary.kind()
    }

    /// `w_phi`: the largest look-ahead of the operands.
    pub fn window(&self) -> f64 {
        self.w
    }

    /// `k_phi`: the bound on pending samples.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pending_len(&self) -> usize {
        self.pending.len()
    }

    /// Largest number of pending samples seen after any step.
    pub fn max_pending(&self) -> usize {
        self.max_pending
    }

    /// Intervals held by the summary.
    pub fn state_size(&self) -> usize {
        self.summary.state_size()
    }

    /// Elementary operations of the operand monitors.
    pub fn ops(&self) -> u64 {
        self.phi.ops() + self.psi.as_ref().map_or(0, BoundedMonitor::ops)
    }

    /// Prefix robustness after the last sample.
    pub fn rosi(&self) -> Option<Interval> {
        self.rosi
    }

    /// The verdict decided so far, or the sign of the prefix value once the
    /// input has ended.
    pub fn final_verdict(&self) -> Verdict {
        match self.frozen {
            Some(out) => out.verdict,
            None => self.rosi.map_or(Verdict::Unknown, verdict_of),
        }
    }

    /// Feeds one sample. The verdict is only decided in the direction in
    /// which the class value is monotone; afterwards calls are no-ops.
    pub fn step(&mut self, sample: &Sample) -> Result<StepOutput, UntimedError> {
        if let Some(out) = self.frozen {
            return Ok(out);
        }
        let rosi = self.advance(sample)?;
        let verdict = match (absorbing(self.kind()), verdict_of(rosi)) {
            (Some(dir), v) if v == dir => v,
            _ => Verdict::Unknown,
        };
        let out = StepOutput { rosi, verdict };
        if verdict.is_decided() {
            self.frozen = Some(out);
        }
        Ok(out)
    }

    /// Feeds one sample and returns the prefix robustness.
    pub fn advance(&mut self, sample: &Sample) -> Result<Interval, UntimedError> {
        if let (Some(last), Some(delta)) = (self.last_time, self.delta) {
            let gap = sample.time - last;
            if gap > 0.0 && gap < delta {
                return Err(UntimedError::GapBelowDelta {
                    time: sample.time,
                    gap,
                    delta,
                });
            }
        }
        self.phi.feed(sample)?;
        if let Some(psi) = &mut self.psi {
            psi.feed(sample)?;
        }
        self.last_time = Some(sample.time);
        self.pending.push_back(sample.time);

        let mut peek = self.summary;
        let mut rosi = Interval::EMPTY;
        for &t in &self.pending {
            let (p, q) = self.operands(t);
            rosi = peek.push(p, q);
        }

        while let Some(&t) = self.pending.front() {
            let done = self.phi.is_final_at(t) && self.psi.as_ref().is_none_or(|m| m.is_final_at(t));
            if !done {
                break;
            }
            debug_assert!(t + self.w <= sample.time);
            let (p, q) = self.operands(t);
            self.summary.push(p, q);
            self.pending.pop_front();
        }
        let keep = self.pending.front().copied().unwrap_or(sample.time);
        self.phi.release_before(keep);
        if let Some(psi) = &mut self.psi {
            psi.release_before(keep);
        }
        self.max_pending = self.max_pending.max(self.pending.len());
        if self.pending.len() > self.k {
            return Err(UntimedError::BufferOverflow {
                len: self.pending.len(),
                k: self.k,
            });
        }
        self.rosi = Some(rosi);
        Ok(rosi)
    }

    fn operands(&self, t: f64) -> (Interval, Interval) {
        let p = self.phi.node_value(0, t).expect("pending operand value is retained");
        let q = match &self.psi {
            Some(m) => m.node_value(0, t).expect("pending operand value is retained"),
            None => p,
        };
        (p, q)
    }
}
