//! Direct evaluation of bounded until over two worklists.

use super::worklist::{fold_range, value_at, Entries, Moment};
use crate::interval::Interval;

/// Sorted, deduplicated breakpoint times of `entries` strictly inside `(lo, hi)`.
fn inner_times(entries: &Entries, lo: f64, hi: f64, out: &mut Vec<f64>) {
    let start = entries.partition_point(|(m, _)| m.t <= lo);
    for (m, _) in entries.range(start..) {
        if m.t >= hi {
            break;
        }
        out.push(m.t);
    }
}

/// `sup over t2 in [tau + a, tau + b] of min(h2(t2), inf over (tau, t2) of h1)`.
///
/// The inner infimum over an empty range is `+inf`, so at `t2 = tau` only
/// `h2(tau)` counts. Returns the value and the number of elementary steps.
pub fn until_at(h1: &Entries, h2: &Entries, tau: f64, a: f64, b: f64) -> (Interval, u64) {
    let (lo, hi) = (tau + a, tau + b);
    let mut times = vec![lo];
    inner_times(h1, lo, hi, &mut times);
    inner_times(h2, lo, hi, &mut times);
    times.push(hi);
    times.sort_by(|x, y| x.partial_cmp(y).unwrap());
    times.dedup();
    // each breakpoint plus a point inside every gap
    let mut cands = Vec::with_capacity(2 * times.len());
    for (k, &t) in times.iter().enumerate() {
        cands.push(t);
        if let Some(&next) = times.get(k + 1) {
            cands.push(t + (next - t) / 2.0);
        }
    }
    let mut ops = cands.len() as u64;
    // inner infimum over [after(tau), prev)
    let mut prev = Moment::after(tau).max(Moment::at(lo));
    let mut inner = fold_range(h1, Moment::after(tau), prev, Interval::TOP, Interval::min);
    let mut best = Interval::BOTTOM;
    for &t2 in &cands {
        let to = Moment::at(t2);
        if to > prev {
            inner = fold_range(h1, prev, to, inner, Interval::min);
            ops += 1;
            prev = to;
        }
        best = best.max(value_at(h2, to).min(inner));
    }
    (best, ops)
}

/// Output breakpoints of until in `[from, end)`: every entry time `s` of
/// either operand at or after `from.t`, shifted by `0`, `-a` and `-b`, on
/// both sides, plus `from` itself.
pub fn candidates(h1: &Entries, h2: &Entries, from: Moment, end: Moment, a: f64, b: f64) -> Vec<Moment> {
    let mut ts = vec![from.t];
    for h in [h1, h2] {
        let start = h.partition_point(|(m, _)| m.t < from.t);
        for (m, _) in h.range(start..) {
            ts.extend([m.t, m.t - a, m.t - b]);
        }
    }
    if end.t.is_finite() {
        ts.push(end.t);
    }
    let mut out: Vec<Moment> = ts
        .into_iter()
        .flat_map(|t| [Moment::at(t), Moment::after(t)])
        .filter(|m| from <= *m && *m < end)
        .collect();
    out.sort();
    out.dedup();
    out
}

/// A real time at which the output takes its value at `m`: `m.t` itself, or
/// a point strictly between `m.t` and the next candidate time.
pub fn representative(m: Moment, next_t: Option<f64>) -> f64 {
    if !m.after {
        return m.t;
    }
    match next_t {
        Some(n) => m.t + (n - m.t) / 2.0,
        None => m.t + 1.0,
    }
}
