//! Closed intervals over the extended reals.
//!
//! Every robustness value handled by the monitors is an [`Interval`]: a
//! singular interval `[v, v]` once the value is fully determined, a wider one
//! while the signal is still partial. Only the operations the robust
//! semantics needs are provided: negation, scalar shift, Minkowski sum,
//! componentwise min/max and intersection.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("interval endpoint is NaN")]
    NaN,
    #[error("lower endpoint {lo} exceeds upper endpoint {hi}")]
    Inverted { lo: f64, hi: f64 },
    #[error("cannot parse interval from {0:?}")]
    Syntax(String),
}

// f64 endpoints are never NaN, so equality is total.
impl Eq for Interval {}

/// A closed interval `[lo, hi]` with `lo <= hi`, endpoints in `[-inf, +inf]`.
///
/// The empty interval is a distinguished value (`lo > hi` internally) and
/// propagates through every operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const EMPTY: Interval = Interval {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };

    /// `(-inf, +inf)`: nothing is known.
    pub const UNBOUNDED: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// Identity element of [`Interval::min`].
    pub const TOP: Interval = Interval {
        lo: f64::INFINITY,
        hi: f64::INFINITY,
    };

    /// Identity element of [`Interval::max`].
    pub const BOTTOM: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::NEG_INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_nan() || hi.is_nan() {
            return Err(IntervalError::NaN);
        }
        if lo > hi {
            return Err(IntervalError::Inverted { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// The singular interval `[v, v]`.
    ///
    /// Panics if `v` is NaN.
    pub fn point(v: f64) -> Self {
        assert!(!v.is_nan(), "singular interval from NaN");
        Interval { lo: v, hi: v }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn is_singular(&self) -> bool {
        self.lo == self.hi
    }

    /// `self ⊆ other`. The empty interval is contained in everything.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        self.is_empty() || (other.lo <= self.lo && self.hi <= other.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// `-[lo, hi] = [-hi, -lo]`.
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Self {
        if self.is_empty() {
            return Self::EMPTY;
        }
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    /// `c + [lo, hi] = [c + lo, c + hi]`; infinite endpoints absorb the shift.
    pub fn add_scalar(self, c: f64) -> Self {
        if self.is_empty() {
            return Self::EMPTY;
        }
        assert!(c.is_finite(), "interval shift by non-finite scalar {c}");
        Interval {
            lo: c + self.lo,
            hi: c + self.hi,
        }
    }

    /// Minkowski sum `[a1 + a2, b1 + b2]`.
    ///
    /// Only ever applied to time windows, whose lower endpoints are finite;
    /// a `-inf + inf` endpoint sum is a caller bug and panics.
    pub fn minkowski_sum(self, other: Interval) -> Self {
        if self.is_empty() || other.is_empty() {
            return Self::EMPTY;
        }
        let lo = self.lo + other.lo;
        let hi = self.hi + other.hi;
        assert!(
            !lo.is_nan() && !hi.is_nan(),
            "minkowski sum of {self} and {other} mixes opposite infinities"
        );
        Interval { lo, hi }
    }

    /// Componentwise minimum `[min(a1, a2), min(b1, b2)]`.
    pub fn min(self, other: Interval) -> Self {
        if self.is_empty() || other.is_empty() {
            return Self::EMPTY;
        }
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.min(other.hi),
        }
    }

    /// Componentwise maximum, the dual of [`Interval::min`].
    pub fn max(self, other: Interval) -> Self {
        if self.is_empty() || other.is_empty() {
            return Self::EMPTY;
        }
        Interval {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn intersect(self, other: Interval) -> Self {
        if self.is_empty() || other.is_empty() {
            return Self::EMPTY;
        }
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if hi < lo {
            Self::EMPTY
        } else {
            Interval { lo, hi }
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("empty")
        } else {
            // f64's Display is the shortest round-tripping form and renders
            // infinities as `inf` / `-inf`.
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

impl FromStr for Interval {
    type Err = IntervalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "empty" {
            return Ok(Self::EMPTY);
        }
        let inner = s
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| IntervalError::Syntax(s.to_string()))?;
        let (lo, hi) = inner
            .split_once(',')
            .ok_or_else(|| IntervalError::Syntax(s.to_string()))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| IntervalError::Syntax(s.to_string()))
        };
        Interval::new(parse(lo)?, parse(hi)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const INF: f64 = f64::INFINITY;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn neg_examples() {
        assert_eq!(iv(1.0, 3.0).neg(), iv(-3.0, -1.0));
        assert_eq!(iv(0.0, 0.0).neg(), iv(0.0, 0.0));
        assert_eq!(iv(-INF, 5.0).neg(), iv(-5.0, INF));
        assert!(Interval::EMPTY.neg().is_empty());
    }

    #[test]
    fn add_scalar_examples() {
        assert_eq!(iv(1.0, 3.0).add_scalar(2.0), iv(3.0, 5.0));
        assert_eq!(iv(1.0, 3.0).add_scalar(0.0), iv(1.0, 3.0));
        assert_eq!(iv(-INF, 0.0).add_scalar(-1.0), iv(-INF, -1.0));
    }

    #[test]
    fn minkowski_examples() {
        assert_eq!(iv(1.0, 2.0).minkowski_sum(iv(3.0, 4.0)), iv(4.0, 6.0));
        assert_eq!(iv(0.0, 0.0).minkowski_sum(iv(3.0, 4.0)), iv(3.0, 4.0));
        // horizon of the x>0 node under G[0,a] F[b,c]
        let (a, b, c) = (1.25, 2.5, 3.5);
        assert_eq!(iv(0.0, a).minkowski_sum(iv(b, c)), iv(b, a + c));
        assert!(iv(0.0, 1.0).minkowski_sum(Interval::EMPTY).is_empty());
        // untimed windows
        assert_eq!(iv(0.0, 1.0).minkowski_sum(iv(0.0, INF)), iv(0.0, INF));
    }

    #[test]
    #[should_panic]
    fn minkowski_rejects_opposite_infinities() {
        let _ = iv(-INF, -INF).minkowski_sum(iv(INF, INF));
    }

    #[test]
    fn min_max_examples() {
        assert_eq!(iv(1.0, 4.0).min(iv(2.0, 3.0)), iv(1.0, 3.0));
        let i = iv(-2.0, 7.5);
        assert_eq!(i.min(i), i);
        assert_eq!(iv(-1.0, -1.0).max(iv(1.0, 1.0)), iv(1.0, 1.0));
        assert_eq!(Interval::TOP.min(i), i);
        assert_eq!(Interval::BOTTOM.max(i), i);
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(iv(1.0, 3.0).intersect(iv(2.0, 5.0)), iv(2.0, 3.0));
        assert!(iv(1.0, 2.0).intersect(iv(3.0, 4.0)).is_empty());
        let i = iv(-1.0, 1.0);
        assert_eq!(i.intersect(i), i);
        assert_eq!(iv(1.0, 2.0).intersect(iv(2.0, 3.0)), iv(2.0, 2.0));
    }

    #[test]
    fn constructor_rejects_bad_endpoints() {
        assert_eq!(Interval::new(f64::NAN, 1.0), Err(IntervalError::NaN));
        assert!(matches!(
            Interval::new(2.0, 1.0),
            Err(IntervalError::Inverted { .. })
        ));
    }

    #[test]
    fn render_and_parse() {
        assert_eq!(iv(-INF, INF).to_string(), "[-inf, inf]");
        assert_eq!(iv(-2.0, -2.0).to_string(), "[-2, -2]");
        assert_eq!("[-inf, 0.5]".parse::<Interval>().unwrap(), iv(-INF, 0.5));
        assert!("empty".parse::<Interval>().unwrap().is_empty());
        assert!("[1, 0]".parse::<Interval>().is_err());
        assert!("1, 2".parse::<Interval>().is_err());
    }

    fn endpoint() -> impl Strategy<Value = f64> {
        prop_oneof![
            1 => Just(f64::NEG_INFINITY),
            1 => Just(f64::INFINITY),
            8 => -1.0e6..1.0e6f64,
        ]
    }

    fn interval() -> impl Strategy<Value = Interval> {
        (endpoint(), endpoint()).prop_map(|(a, b)| iv(a.min(b), a.max(b)))
    }

    proptest! {
        #[test]
        fn display_round_trips(i in interval()) {
            let back: Interval = i.to_string().parse().unwrap();
            prop_assert_eq!(back, i);
        }

        #[test]
        fn lattice_laws(a in interval(), b in interval(), c in interval()) {
            prop_assert_eq!(a.max(b).min(a.max(c)), a.max(b.min(c)));
            prop_assert_eq!(a.min(b.max(c)), a.min(b).max(a.min(c)));
            prop_assert_eq!(a.max(b).max(c), a.max(b.max(c)));
            prop_assert_eq!(a.max(b).min(a), a);
        }

        #[test]
        fn neg_is_involutive_and_dualises_min(a in interval(), b in interval()) {
            prop_assert_eq!(a.neg().neg(), a);
            prop_assert_eq!(a.min(b).neg(), a.neg().max(b.neg()));
        }

        #[test]
        fn min_max_monotone_under_containment(
            a in interval(), b in interval(), c in interval(),
        ) {
            let a_sub = Interval::point(a.lo());
            prop_assert!(a_sub.min(b).is_subset_of(&a.min(b)));
            prop_assert!(a_sub.max(c).is_subset_of(&a.max(c)));
        }
    }
}
