//! Time points with a side and piecewise-constant worklists over them.

use std::cmp::Ordering;
use std::collections::VecDeque;

use crate::interval::Interval;

/// A real time `t`, or the instant just after it.
///
/// Moments order by `t`, then `At` before `After`. A worklist value attached
/// to `(t, After)` holds on an open interval starting at `t`, which is how
/// the boundary between the closed observed prefix `[t0, ti]` and the
/// unknown future is represented exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub t: f64,
    pub after: bool,
}

impl Moment {
    pub const fn at(t: f64) -> Self {
        Moment { t, after: false }
    }

    pub const fn after(t: f64) -> Self {
        Moment { t, after: true }
    }

    /// Shifts the time, keeping the side.
    pub fn shift(self, d: f64) -> Self {
        Moment {
            t: self.t + d,
            after: self.after,
        }
    }
}

// times are never NaN
impl Eq for Moment {}

impl PartialOrd for Moment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Moment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.t
            .partial_cmp(&other.t)
            .expect("moment time is NaN")
            .then(self.after.cmp(&other.after))
    }
}

/// Sorted `(moment, value)` pairs; each value holds up to the next moment.
pub type Entries = VecDeque<(Moment, Interval)>;

/// Index of the entry whose segment contains `m`.
///
/// Panics if `m` precedes the first entry.
pub fn index_at(entries: &Entries, m: Moment) -> usize {
    let n = entries.partition_point(|(s, _)| *s <= m);
    assert!(n > 0, "moment {m:?} precedes the worklist");
    n - 1
}

pub fn value_at(entries: &Entries, m: Moment) -> Interval {
    entries[index_at(entries, m)].1
}

/// Segments restricted to `[from, to)`: first `(from, value at from)`, then
/// every later breakpoint below `to`.
pub fn pieces(entries: &Entries, from: Moment, to: Moment) -> impl Iterator<Item = (Moment, Interval)> + '_ {
    let first = index_at(entries, from);
    std::iter::once((from, entries[first].1)).chain(
        entries
            .range(first + 1..)
            .take_while(move |(m, _)| *m < to)
            .copied(),
    )
}

/// Folds `f` over the values taken on `[from, to)`; `init` when the range is empty.
pub fn fold_range(
    entries: &Entries,
    from: Moment,
    to: Moment,
    init: Interval,
    f: impl Fn(Interval, Interval) -> Interval,
) -> Interval {
    if from >= to {
        return init;
    }
    pieces(entries, from, to).fold(init, |acc, (_, v)| f(acc, v))
}

/// Appends unless the value repeats the last one.
pub fn push_coalesced(entries: &mut Entries, m: Moment, v: Interval) {
    if let Some((last, lv)) = entries.back() {
        debug_assert!(*last < m, "worklist moments must increase");
        if *lv == v {
            return;
        }
    }
    entries.push_back((m, v));
}

/// Drops every entry at or after `m`.
pub fn truncate_from(entries: &mut Entries, m: Moment) {
    let keep = entries.partition_point(|(s, _)| *s < m);
    entries.truncate(keep);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(list: &[(Moment, f64)]) -> Entries {
        list.iter().map(|&(m, v)| (m, Interval::point(v))).collect()
    }

    #[test]
    fn moment_order() {
        assert!(Moment::at(1.0) < Moment::after(1.0));
        assert!(Moment::after(1.0) < Moment::at(1.5));
        assert_eq!(Moment::after(1.0).shift(-0.5), Moment::after(0.5));
    }

    #[test]
    fn lookup_and_pieces() {
        let w = e(&[(Moment::at(0.0), 1.0), (Moment::after(1.0), 2.0), (Moment::at(3.0), 3.0)]);
        assert_eq!(value_at(&w, Moment::at(1.0)), Interval::point(1.0));
        assert_eq!(value_at(&w, Moment::at(2.0)), Interval::point(2.0));
        let p: Vec<_> = pieces(&w, Moment::at(0.5), Moment::at(3.0)).collect();
        assert_eq!(p.len(), 2);
        assert_eq!(p[0], (Moment::at(0.5), Interval::point(1.0)));
        let m = fold_range(&w, Moment::at(0.5), Moment::after(3.0), Interval::TOP, Interval::min);
        assert_eq!(m, Interval::point(1.0));
        let empty = fold_range(&w, Moment::at(1.0), Moment::at(1.0), Interval::TOP, Interval::min);
        assert_eq!(empty, Interval::TOP);
    }

    #[test]
    fn coalesce_and_truncate() {
        let mut w = Entries::new();
        push_coalesced(&mut w, Moment::at(0.0), Interval::point(1.0));
        push_coalesced(&mut w, Moment::at(1.0), Interval::point(1.0));
        push_coalesced(&mut w, Moment::at(2.0), Interval::point(2.0));
        assert_eq!(w.len(), 2);
        truncate_from(&mut w, Moment::at(2.0));
        assert_eq!(w.len(), 1);
    }
}
