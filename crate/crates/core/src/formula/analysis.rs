//! Horizons, look-ahead and untimed-class recognition.

use thiserror::Error;

use super::Formula;
use crate::interval::Interval;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormulaError {
    #[error("formula is not in a supported untimed class: {0}")]
    Unsupported(String),
    #[error("operand `{0}` of the untimed operator has an unbounded horizon")]
    UnboundedOperand(String),
    #[error("minimum sample gap must be positive and finite, got {0}")]
    BadDelta(f64),
    #[error("formula contains an untimed operator where a bounded formula is required")]
    NotBounded,
}

/// `[0, inf)`, the implicit window of an untimed operator.
fn untimed_window() -> Interval {
    Interval::new(0.0, f64::INFINITY).unwrap()
}

/// Per-node horizons in pre-order.
///
/// The root has `[0, 0]`; a child of a boolean node inherits its parent's
/// horizon; a child of a temporal node with window `[a, b]` gets
/// `[a, b] ⊕ hor(parent)`, except the left operand of until, which is read
/// over the whole open stretch before the right operand and gets
/// `[0, b] ⊕ hor(parent)`.
pub fn compute_horizons(f: &Formula) -> Vec<Interval> {
    fn walk(f: &Formula, hor: Interval, out: &mut Vec<Interval>) {
        out.push(hor);
        match f {
            Formula::Pred(_) => {}
            Formula::Not(a) => walk(a, hor, out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                walk(a, hor, out);
                walk(b, hor, out);
            }
            Formula::Always(w, a) | Formula::Eventually(w, a) => walk(a, w.minkowski_sum(hor), out),
            Formula::Until(w, a, b) => {
                let left = Interval::new(0.0, w.hi()).unwrap();
                walk(a, left.minkowski_sum(hor), out);
                walk(b, w.minkowski_sum(hor), out);
            }
            Formula::AlwaysUntimed(a) | Formula::EventuallyUntimed(a) => {
                walk(a, untimed_window().minkowski_sum(hor), out)
            }
            Formula::UntilUntimed(a, b) => {
                let h = untimed_window().minkowski_sum(hor);
                walk(a, h, out);
                walk(b, h, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(f, Interval::point(0.0), &mut out);
    out
}

/// The largest offset past `t` at which data is read to evaluate `f` at `t`:
/// the supremum of the horizons of all proper subformulas, `0` for a
/// predicate and `inf` whenever an untimed operator occurs.
pub fn compute_last(f: &Formula) -> f64 {
    compute_horizons(f)
        .into_iter()
        .skip(1)
        .map(|h| h.hi())
        .fold(0.0, f64::max)
}

/// Kind of an untimed formula monitored with a bounded summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UntimedKind {
    /// `G phi`
    G,
    /// `F phi`
    F,
    /// `phi U psi`
    U,
    /// `G F phi`
    GF,
    /// `F G phi`
    FG,
    /// `G (phi or F psi)`
    GOrF,
    /// `F (phi and G psi)`
    FAndG,
    /// `F (phi and F psi)`
    FAndF,
    /// `G (phi or G psi)`
    GOrG,
}

impl UntimedKind {
    pub const ALL: [UntimedKind; 9] = [
        UntimedKind::G,
        UntimedKind::F,
        UntimedKind::U,
        UntimedKind::GF,
        UntimedKind::FG,
        UntimedKind::GOrF,
        UntimedKind::FAndG,
        UntimedKind::FAndF,
        UntimedKind::GOrG,
    ];

    /// Whether the kind has a second operand `psi`.
    pub fn binary(self) -> bool {
        matches!(
            self,
            UntimedKind::U
                | UntimedKind::GOrF
                | UntimedKind::FAndG
                | UntimedKind::FAndF
                | UntimedKind::GOrG
        )
    }
}

/// A recognised untimed formula with its bounded operands.
#[derive(Debug, Clone, PartialEq)]
pub struct UntimedClass {
    pub kind: UntimedKind,
    pub phi: Formula,
    pub psi: Option<Formula>,
}

/// Matches `f` against the untimed classes, modulo commutativity of `and`/`or`.
///
/// Returns `None` for bounded formulas and for untimed formulas outside the
/// supported classes.
pub fn untimed_class(f: &Formula) -> Option<UntimedClass> {
    use UntimedKind::*;
    let one = |kind, phi: &Formula| {
        phi.is_bounded().then(|| UntimedClass {
            kind,
            phi: phi.clone(),
            psi: None,
        })
    };
    let two = |kind, phi: &Formula, psi: &Formula| {
        (phi.is_bounded() && psi.is_bounded()).then(|| UntimedClass {
            kind,
            phi: phi.clone(),
            psi: Some(psi.clone()),
        })
    };
    // (phi, psi) such that `x op inner(psi)` where x = phi, in either order
    fn split<'a>(
        a: &'a Formula,
        b: &'a Formula,
        inner: fn(&Formula) -> Option<&Formula>,
    ) -> Option<(&'a Formula, &'a Formula)> {
        if let Some(psi) = inner(b) {
            if a.is_bounded() && psi.is_bounded() {
                return Some((a, psi));
            }
        }
        if let Some(psi) = inner(a) {
            if b.is_bounded() && psi.is_bounded() {
                return Some((b, psi));
            }
        }
        None
    }
    fn ev(f: &Formula) -> Option<&Formula> {
        match f {
            Formula::EventuallyUntimed(x) => Some(x),
            _ => None,
        }
    }
    fn alw(f: &Formula) -> Option<&Formula> {
        match f {
            Formula::AlwaysUntimed(x) => Some(x),
            _ => None,
        }
    }
    match f {
        Formula::AlwaysUntimed(body) => match body.as_ref() {
            Formula::EventuallyUntimed(x) => one(GF, x),
            Formula::Or(a, b) => {
                if let Some((phi, psi)) = split(a, b, ev) {
                    two(GOrF, phi, psi)
                } else if let Some((phi, psi)) = split(a, b, alw) {
                    two(GOrG, phi, psi)
                } else {
                    one(G, body)
                }
            }
            _ => one(G, body),
        },
        Formula::EventuallyUntimed(body) => match body.as_ref() {
            Formula::AlwaysUntimed(x) => one(FG, x),
            Formula::And(a, b) => {
                if let Some((phi, psi)) = split(a, b, alw) {
                    two(FAndG, phi, psi)
                } else if let Some((phi, psi)) = split(a, b, ev) {
                    two(FAndF, phi, psi)
                } else {
                    one(F, body)
                }
            }
            _ => one(F, body),
        },
        Formula::UntilUntimed(a, b) => two(U, a, b),
        _ => None,
    }
}

/// `w_phi`: the largest look-ahead among the bounded operands of an untimed
/// class, or among the proper subformulas of a bounded formula.
pub fn operand_window(f: &Formula) -> Result<f64, FormulaError> {
    if f.is_bounded() {
        return Ok(f
            .preorder()
            .into_iter()
            .skip(1)
            .map(compute_last)
            .fold(0.0, f64::max));
    }
    let class = untimed_class(f).ok_or_else(|| FormulaError::Unsupported(f.to_string()))?;
    let mut w = compute_last(&class.phi);
    if let Some(psi) = &class.psi {
        w = w.max(compute_last(psi));
    }
    Ok(w)
}

/// `k_phi = ceil(w_phi / delta)`, the most samples whose operand values can
/// still be pending when samples are at least `delta` apart.
pub fn compute_k(f: &Formula, delta: f64) -> Result<usize, FormulaError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(FormulaError::BadDelta(delta));
    }
    let w = operand_window(f)?;
    if !w.is_finite() {
        return Err(FormulaError::UnboundedOperand(f.to_string()));
    }
    Ok((w / delta).ceil() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn running_example_horizons() {
        let (a, b, c) = (1.25, 2.5, 3.5);
        let f = parse("G[0,1.25](not(y > 0) or F[2.5,3.5](x > 0))").unwrap();
        let h = compute_horizons(&f);
        assert_eq!(
            h,
            vec![
                iv(0.0, 0.0),
                iv(0.0, a),
                iv(0.0, a),
                iv(0.0, a),
                iv(0.0, a),
                iv(b, a + c)
            ]
        );
        assert_eq!(compute_last(&f), a + c);
    }

    #[test]
    fn simple_horizons() {
        assert_eq!(compute_horizons(&parse("x > 0").unwrap()), vec![iv(0.0, 0.0)]);
        let h = compute_horizons(&parse("G[0,2](F[1,3](x>0))").unwrap());
        assert_eq!(h[2], iv(1.0, 5.0));
        let h = compute_horizons(&parse("x > 0 U[1,2] y > 0").unwrap());
        assert_eq!(h[1], iv(0.0, 2.0));
        assert_eq!(h[2], iv(1.0, 2.0));
    }

    #[test]
    fn last_examples() {
        assert_eq!(compute_last(&parse("G(x > 0)").unwrap()), f64::INFINITY);
        assert_eq!(compute_last(&parse("x > 0").unwrap()), 0.0);
        assert_eq!(compute_last(&parse("x > 0 U[1,2] G[0,3] y > 0").unwrap()), 5.0);
    }

    #[test]
    fn last_is_supremum_of_horizons() {
        for src in [
            "G[0,1](x > 0) and F[2,4](G[1,1](y > 0))",
            "not (x > 0 U[0.5,1.5] F[0,2] y > 0)",
        ] {
            let f = parse(src).unwrap();
            let sup = compute_horizons(&f).iter().map(|h| h.hi()).fold(0.0, f64::max);
            assert_eq!(compute_last(&f), sup);
        }
    }

    #[test]
    fn classes() {
        let c = untimed_class(&parse("G(x>0)").unwrap()).unwrap();
        assert_eq!(c.kind, UntimedKind::G);
        let c = untimed_class(&parse("F(x>0 and F(y>0))").unwrap()).unwrap();
        assert_eq!(c.kind, UntimedKind::FAndF);
        assert_eq!(c.phi, parse("x > 0").unwrap());
        assert_eq!(c.psi, Some(parse("y > 0").unwrap()));
        let c = untimed_class(&parse("G(F(x>0) or y>0)").unwrap()).unwrap();
        assert_eq!(c.kind, UntimedKind::GOrF);
        assert_eq!(c.phi, parse("y > 0").unwrap());
        assert_eq!(c.psi, Some(parse("x > 0").unwrap()));
        let kinds = [
            ("F(x>0)", UntimedKind::F),
            ("x>0 U y>0", UntimedKind::U),
            ("G F x>0", UntimedKind::GF),
            ("F G x>0", UntimedKind::FG),
            ("F(G(y>0) and x>0)", UntimedKind::FAndG),
            ("G(x>0 or G(y>0))", UntimedKind::GOrG),
            ("G(F[0,2](x>0) or y>0)", UntimedKind::G),
        ];
        for (src, kind) in kinds {
            assert_eq!(untimed_class(&parse(src).unwrap()).unwrap().kind, kind, "{src}");
        }
    }

    #[test]
    fn unsupported_classes() {
        for src in ["x > 0", "G(G(x>0))", "G(x>0) and F(y>0)", "F(x>0 U y>0)", "G(F(x>0) or F(y>0))"] {
            assert_eq!(untimed_class(&parse(src).unwrap()), None, "{src}");
        }
    }

    #[test]
    fn k_examples() {
        let f = parse("G(F[0,10](x > 0))").unwrap();
        assert_eq!(compute_k(&f, 0.5).unwrap(), 20);
        assert_eq!(compute_k(&f, 3.0).unwrap(), 4);
        assert_eq!(compute_k(&parse("x > 0 U y > 0").unwrap(), 1.0).unwrap(), 0);
        assert!(compute_k(&f, 0.0).is_err());
        assert!(compute_k(&parse("G(G(x > 0))").unwrap(), 1.0).is_err());
    }

    #[test]
    fn operand_window_takes_the_largest_operand() {
        let f = parse("G(G[0,2](x > 0) or F(F[1,4](y > 0)))").unwrap();
        assert_eq!(operand_window(&f).unwrap(), 4.0);
    }
}
