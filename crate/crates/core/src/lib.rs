//! Online robust satisfaction intervals (RoSI) for Signal Temporal Logic.
//!
//! A RoSI bounds the robustness of a formula over every completion of a
//! partially observed, piecewise-constant signal. The [`bounded`] monitor
//! refines it sample by sample for formulas with finite windows; the
//! [`untimed`] monitors handle the untimed classes that admit a bounded
//! summary.

pub mod bounded;
pub mod cli;
pub mod formula;
pub mod interval;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod signal;
pub mod untimed;

pub use bounded::{verdict_of, BoundedMonitor, MonitorError, Options, StepOutput, Verdict};
pub use formula::{parse, Formula, Predicate};
pub use interval::Interval;
pub use signal::{PartialSignal, Sample, Schema};
