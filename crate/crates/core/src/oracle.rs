//! Naive reference semantics, for differential testing.
//!
//! [`offline_rosi`] evaluates the recursive RoSI definition directly at real
//! time points. Every subformula value is piecewise constant with
//! breakpoints in a finite set, so infima and suprema over a window are
//! taken over the window ends, the breakpoints inside it and one point
//! strictly between each pair of consecutive ones.

use std::collections::HashMap;

use crate::formula::{BoundPredicate, Formula, UntimedKind};
use crate::interval::Interval;
use crate::signal::PartialSignal;

/// RoSI together with the number of node evaluations it took.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub rosi: Interval,
    pub evaluations: u64,
}

/// RoSI of the bounded formula `f` over the partial signal `sig` at `tau`.
///
/// Panics if `f` has an untimed operator or a variable missing from the
/// signal's schema.
pub fn offline_rosi(f: &Formula, sig: &PartialSignal, tau: f64) -> Interval {
    offline_rosi_counted(f, sig, tau).rosi
}

pub fn offline_rosi_counted(f: &Formula, sig: &PartialSignal, tau: f64) -> OracleResult {
    assert!(f.is_bounded(), "the oracle evaluates bounded formulas only");
    let mut o = Oracle::new(f, sig);
    let rosi = o.eval(0, tau);
    OracleResult {
        rosi,
        evaluations: o.evaluations,
    }
}

enum Op {
    Pred(BoundPredicate),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Always(f64, f64, usize),
    Eventually(f64, f64, usize),
    Until(f64, f64, usize, usize),
}

struct Oracle<'a> {
    sig: &'a PartialSignal,
    ops: Vec<Op>,
    /// Sorted times where each node's value may change.
    breaks: Vec<Vec<f64>>,
    memo: HashMap<(usize, u64), Interval>,
    evaluations: u64,
}

impl<'a> Oracle<'a> {
    fn new(f: &Formula, sig: &'a PartialSignal) -> Self {
        let mut o = Oracle {
            sig,
            ops: Vec::new(),
            breaks: Vec::new(),
            memo: HashMap::new(),
            evaluations: 0,
        };
        o.add(f);
        o
    }

    fn add(&mut self, f: &Formula) -> usize {
        let id = self.ops.len();
        self.ops.push(Op::Not(usize::MAX));
        self.breaks.push(Vec::new());
        let (op, mut br) = match f {
            Formula::Pred(p) => {
                let bound = p.bind(self.sig.schema()).expect("predicate variables in schema");
                let times = self.sig.samples().iter().map(|s| s.time).collect();
                (Op::Pred(bound), times)
            }
            Formula::Not(x) => {
                let c = self.add(x);
                (Op::Not(c), self.breaks[c].clone())
            }
            Formula::And(x, y) | Formula::Or(x, y) => {
                let (l, r) = (self.add(x), self.add(y));
                let br = [&self.breaks[l][..], &self.breaks[r][..]].concat();
                let op = if matches!(f, Formula::And(..)) {
                    Op::And(l, r)
                } else {
                    Op::Or(l, r)
                };
                (op, br)
            }
            Formula::Always(w, x) | Formula::Eventually(w, x) => {
                let c = self.add(x);
                let (a, b) = (w.lo(), w.hi());
                let br = self.breaks[c].iter().flat_map(|&s| [s - a, s - b]).collect();
                let op = if matches!(f, Formula::Always(..)) {
                    Op::Always(a, b, c)
                } else {
                    Op::Eventually(a, b, c)
                };
                (op, br)
            }
            Formula::Until(w, x, y) => {
                let (l, r) = (self.add(x), self.add(y));
                let (a, b) = (w.lo(), w.hi());
                let both = [&self.breaks[l][..], &self.breaks[r][..]].concat();
                let br = both.iter().flat_map(|&s| [s, s - a, s - b]).collect();
                (Op::Until(a, b, l, r), br)
            }
            _ => unreachable!("bounded formula"),
        };
        br.sort_by(|x: &f64, y| x.partial_cmp(y).unwrap());
        br.dedup();
        self.ops[id] = op;
        self.breaks[id] = br;
        id
    }

    fn eval(&mut self, id: usize, tau: f64) -> Interval {
        if let Some(&v) = self.memo.get(&(id, tau.to_bits())) {
            return v;
        }
        self.evaluations += 1;
        let v = match self.ops[id] {
            Op::Pred(ref p) => match self.sig.value_at(tau) {
                Ok(Some(values)) => Interval::point(p.eval(values)),
                _ => p.bounds(),
            },
            Op::Not(c) => self.eval(c, tau).neg(),
            Op::And(l, r) => self.eval(l, tau).min(self.eval(r, tau)),
            Op::Or(l, r) => self.eval(l, tau).max(self.eval(r, tau)),
            Op::Always(a, b, c) => {
                let pts = closed_points(&self.breaks[c], tau + a, tau + b);
                pts.into_iter()
                    .fold(Interval::TOP, |acc, t| acc.min(self.eval(c, t)))
            }
            Op::Eventually(a, b, c) => {
                let pts = closed_points(&self.breaks[c], tau + a, tau + b);
                pts.into_iter()
                    .fold(Interval::BOTTOM, |acc, t| acc.max(self.eval(c, t)))
            }
            Op::Until(a, b, l, r) => {
                let mut both = [&self.breaks[l][..], &self.breaks[r][..]].concat();
                both.sort_by(|x, y| x.partial_cmp(y).unwrap());
                both.dedup();
                let mut best = Interval::BOTTOM;
                for t2 in closed_points(&both, tau + a, tau + b) {
                    let inner = open_points(&self.breaks[l], tau, t2)
                        .into_iter()
                        .fold(Interval::TOP, |acc, t1| acc.min(self.eval(l, t1)));
                    best = best.max(self.eval(r, t2).min(inner));
                }
                best
            }
        };
        self.memo.insert((id, tau.to_bits()), v);
        v
    }
}

/// Representative points of `[lo, hi]` for a signal changing only at `breaks`.
fn closed_points(breaks: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut marks = vec![lo];
    marks.extend(breaks.iter().copied().filter(|&s| lo < s && s < hi));
    if hi > lo {
        marks.push(hi);
    }
    with_midpoints(&marks)
}

/// Representative points of the open interval `(lo, hi)`; empty if `lo >= hi`.
fn open_points(breaks: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    if lo >= hi {
        return Vec::new();
    }
    let mut marks = vec![lo];
    marks.extend(breaks.iter().copied().filter(|&s| lo < s && s < hi));
    marks.push(hi);
    let all = with_midpoints(&marks);
    all[1..all.len() - 1].to_vec()
}

fn with_midpoints(marks: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * marks.len());
    for (k, &t) in marks.iter().enumerate() {
        out.push(t);
        if let Some(&next) = marks.get(k + 1) {
            out.push(t + (next - t) / 2.0);
        }
    }
    out
}

/// The defining min/max expression of an untimed class over the operand
/// sequences `p` and `q`, expanded literally. `q` is unused by unary classes.
///
/// Panics if `p` is empty, or if `q` is shorter than `p` for a binary class.
pub fn brute_untimed(kind: UntimedKind, p: &[Interval], q: &[Interval]) -> Interval {
    use UntimedKind::*;
    assert!(!p.is_empty(), "operand sequence is empty");
    if kind.binary() {
        assert!(q.len() >= p.len(), "operand sequences differ in length");
    }
    let n = p.len();
    let min_of = |it: &mut dyn Iterator<Item = Interval>| it.fold(Interval::TOP, Interval::min);
    let max_of = |it: &mut dyn Iterator<Item = Interval>| it.fold(Interval::BOTTOM, Interval::max);
    match kind {
        G => min_of(&mut p.iter().copied()),
        F => max_of(&mut p.iter().copied()),
        U => max_of(&mut (0..n).map(|i| q[i].min(min_of(&mut (0..=i).map(|j| p[j]))))),
        GOrF => min_of(&mut (0..n).map(|i| p[i].max(max_of(&mut (i..n).map(|j| q[j]))))),
        FAndG => max_of(&mut (0..n).map(|i| p[i].min(min_of(&mut (i..n).map(|j| q[j]))))),
        FAndF => max_of(&mut (0..n).map(|i| p[i].min(max_of(&mut (i..n).map(|j| q[j]))))),
        GOrG => min_of(&mut (0..n).map(|i| p[i].max(min_of(&mut (i..n).map(|j| q[j]))))),
        GF => min_of(&mut (0..n).map(|i| max_of(&mut (i..n).map(|j| p[j])))),
        FG => max_of(&mut (0..n).map(|i| min_of(&mut (i..n).map(|j| p[j])))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::signal::{Sample, Schema};

    fn pt(v: f64) -> Interval {
        Interval::point(v)
    }

    fn pts(v: &[f64]) -> Vec<Interval> {
        v.iter().map(|&x| pt(x)).collect()
    }

    #[test]
    fn predicate_base_case() {
        let mut sig = PartialSignal::new(Schema::new(["x"]).unwrap());
        sig.append(Sample::new(0.0, vec![3.0])).unwrap();
        assert_eq!(offline_rosi(&parse("x > 0").unwrap(), &sig, 0.0), pt(3.0));
    }

    #[test]
    fn unknown_future_uses_bounds() {
        let schema = Schema::new(["x"]).unwrap().with_bounds("x", -5.0, 5.0).unwrap();
        let mut sig = PartialSignal::new(schema);
        sig.append(Sample::new(0.0, vec![2.0])).unwrap();
        let r = offline_rosi(&parse("G[0,1](x > 0)").unwrap(), &sig, 0.0);
        assert_eq!(r, Interval::new(-5.0, 2.0).unwrap());
    }

    #[test]
    fn complete_signal_gives_a_point() {
        let mut sig = PartialSignal::new(Schema::new(["x"]).unwrap());
        for (t, x) in [(0.0, 1.0), (1.0, -2.0), (2.0, 4.0), (3.0, 0.5)] {
            sig.append(Sample::new(t, vec![x])).unwrap();
        }
        let f = parse("F[0,1] (x > 0 U[0.5,1] x > 1)").unwrap();
        let r = offline_rosi(&f, &sig, 0.0);
        assert!(r.is_singular());
        // t = 1: sup over t2 in [1.5, 2] of min(x(t2) - 1, inf of x on (1, t2))
        let g = parse("x > 0 U[0.5,1] x > 1").unwrap();
        assert_eq!(offline_rosi(&g, &sig, 1.0), pt(-2.0));
        assert_eq!(offline_rosi(&g, &sig, 0.0), pt(0.0));
    }

    #[test]
    fn until_inner_range_is_open() {
        let mut sig = PartialSignal::new(Schema::new(["x", "y"]).unwrap());
        sig.append(Sample::new(0.0, vec![-5.0, 3.0])).unwrap();
        sig.append(Sample::new(1.0, vec![5.0, 3.0])).unwrap();
        let f = parse("x > 0 U[0,0] y > 0").unwrap();
        assert_eq!(offline_rosi(&f, &sig, 0.0), pt(3.0));
    }

    #[test]
    fn brute_expansions() {
        use UntimedKind::*;
        let p = pts(&[1.0, 2.0, 0.5]);
        let q = pts(&[-1.0, 3.0, -2.0]);
        assert_eq!(brute_untimed(U, &p, &q), pt(1.0));
        assert_eq!(brute_untimed(G, &pts(&[5.0]), &[]), pt(5.0));
        assert_eq!(brute_untimed(GF, &pts(&[1.0, 2.0, 3.0]), &[]), pt(3.0));
        assert_eq!(brute_untimed(GOrF, &pts(&[-1.0, 2.0]), &pts(&[1.0, -3.0])), pt(1.0));
        assert_eq!(brute_untimed(FAndF, &pts(&[1.0, -1.0]), &pts(&[-2.0, 3.0])), pt(1.0));
    }

    #[test]
    fn evaluations_are_counted() {
        let mut sig = PartialSignal::new(Schema::new(["x"]).unwrap());
        for t in 0..4 {
            sig.append(Sample::new(t as f64, vec![1.0])).unwrap();
        }
        let r = offline_rosi_counted(&parse("G[0,2](x > 0)").unwrap(), &sig, 0.0);
        assert_eq!(r.rosi, pt(1.0));
        // root plus x at 0, 0.5, 1, 1.5, 2
        assert_eq!(r.evaluations, 6);
    }
}
