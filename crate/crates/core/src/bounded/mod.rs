//! Online RoSI monitor for bounded-horizon formulas.
//!
//! Every syntax-tree node keeps a worklist of `(moment, RoSI)` entries over
//! its domain `t0 + hor(v)` and a frontier: values strictly before the
//! frontier are final. A new sample only rewrites each node's worklist from
//! its previous frontier on, bottom-up. Temporal nodes keep a persistent
//! sliding filter over the final part of their child and replay only the
//! child's volatile suffix on a copy of it.

mod sliding;
mod until;
pub mod worklist;

use std::fmt;

use thiserror::Error;

use crate::formula::{compute_horizons, BoundPredicate, Formula};
use crate::interval::Interval;
use crate::signal::{Sample, Schema, SignalError};

pub use sliding::{sliding_max, sliding_min, WorklistEntry};
use sliding::Filter;
use worklist::{index_at, pieces, push_coalesced, truncate_from, value_at, Entries, Moment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Satisfied,
    Falsified,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Falsified => "falsified",
            Verdict::Unknown => "unknown",
        }
    }

    pub fn is_decided(self) -> bool {
        self != Verdict::Unknown
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `Falsified` iff `hi < 0`, `Satisfied` iff `lo >= 0`: zero robustness satisfies.
pub fn verdict_of(rosi: Interval) -> Verdict {
    if rosi.hi() < 0.0 {
        Verdict::Falsified
    } else if rosi.lo() >= 0.0 {
        Verdict::Satisfied
    } else {
        Verdict::Unknown
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonitorError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error("formula contains an untimed operator; the bounded monitor needs finite windows")]
    NotBounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    /// Keep sliding-filter state across samples instead of recomputing
    /// temporal nodes from scratch.
    pub sliding_optim: bool,
    /// Drop worklist entries no ancestor will read again.
    pub prune: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            sliding_optim: true,
            prune: true,
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Pred {
        p: BoundPredicate,
        prev: Option<Interval>,
    },
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Window {
        child: usize,
        max: bool,
        a: f64,
        b: f64,
        filter: Option<Filter>,
        /// Child input fed to `filter` so far.
        consumed: Moment,
    },
    Until {
        left: usize,
        right: usize,
        a: f64,
        b: f64,
    },
}

#[derive(Debug, Clone)]
struct Node {
    kind: Kind,
    hor: Interval,
    start: Moment,
    end: Moment,
    entries: Entries,
    frontier: Moment,
}

/// Result of one monitoring step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutput {
    pub rosi: Interval,
    pub verdict: Verdict,
}

/// Incremental RoSI monitor for a bounded formula at the signal origin.
#[derive(Debug, Clone)]
pub struct BoundedMonitor {
    schema: Schema,
    nodes: Vec<Node>,
    opts: Options,
    /// Root domain reaches `+inf` when embedded in an untimed monitor.
    streaming: bool,
    origin: Option<f64>,
    last_time: Option<f64>,
    root_need: Option<Moment>,
    frozen: Option<StepOutput>,
    ops: u64,
}

impl BoundedMonitor {
    pub fn new(formula: &Formula, schema: &Schema) -> Result<Self, MonitorError> {
        Self::with_options(formula, schema, Options::default())
    }

    pub fn with_options(
        formula: &Formula,
        schema: &Schema,
        opts: Options,
    ) -> Result<Self, MonitorError> {
        Self::build(formula, schema, opts, false)
    }

    /// A monitor whose root covers `[t0, inf)`, so the RoSI of the formula
    /// is available at every time of the observed prefix.
    pub fn streaming(
        formula: &Formula,
        schema: &Schema,
        opts: Options,
    ) -> Result<Self, MonitorError> {
        Self::build(formula, schema, opts, true)
    }

    fn build(
        formula: &Formula,
        schema: &Schema,
        opts: Options,
        streaming: bool,
    ) -> Result<Self, MonitorError> {
        if !formula.is_bounded() {
            return Err(MonitorError::NotBounded);
        }
        let hors = compute_horizons(formula);
        let order = formula.preorder();
        // pre-order ids: children of node `i` follow it, the right child
        // after the whole left subtree
        let mut sizes = vec![1usize; order.len()];
        for i in (0..order.len()).rev() {
            let kids = child_ids(&order, &sizes, i);
            sizes[i] = 1 + kids.iter().map(|&c| sizes[c]).sum::<usize>();
        }
        let mut nodes = Vec::with_capacity(order.len());
        for (i, f) in order.iter().enumerate() {
            let kids = child_ids(&order, &sizes, i);
            let kind = match f {
                Formula::Pred(p) => Kind::Pred {
                    p: p.bind(schema)?,
                    prev: None,
                },
                Formula::Not(_) => Kind::Not(kids[0]),
                Formula::And(..) => Kind::And(kids[0], kids[1]),
                Formula::Or(..) => Kind::Or(kids[0], kids[1]),
                Formula::Always(w, _) | Formula::Eventually(w, _) => Kind::Window {
                    child: kids[0],
                    max: matches!(f, Formula::Eventually(..)),
                    a: w.lo(),
                    b: w.hi(),
                    filter: None,
                    consumed: Moment::at(f64::NEG_INFINITY),
                },
                Formula::Until(w, ..) => Kind::Until {
                    left: kids[0],
                    right: kids[1],
                    a: w.lo(),
                    b: w.hi(),
                },
                _ => unreachable!("bounded formula"),
            };
            nodes.push(Node {
                kind,
                hor: hors[i],
                start: Moment::at(f64::NEG_INFINITY),
                end: Moment::after(f64::INFINITY),
                entries: Entries::new(),
                frontier: Moment::at(f64::NEG_INFINITY),
            });
        }
        Ok(BoundedMonitor {
            schema: schema.clone(),
            nodes,
            opts,
            streaming,
            origin: None,
            last_time: None,
            root_need: None,
            frozen: None,
            ops: 0,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn origin(&self) -> Option<f64> {
        self.origin
    }

    pub fn last_time(&self) -> Option<f64> {
        self.last_time
    }

    /// Elementary operations performed so far.
    pub fn ops(&self) -> u64 {
        self.ops
    }

    /// RoSI of the formula at the origin; `None` before the first sample or
    /// once the origin has been released.
    pub fn rosi(&self) -> Option<Interval> {
        self.node_value(0, self.origin?)
    }

    pub fn verdict(&self) -> Verdict {
        self.rosi().map_or(Verdict::Unknown, verdict_of)
    }

    /// RoSI of node `id` (pre-order) at time `t`, if `t` is in its domain and
    /// has not been pruned.
    pub fn node_value(&self, id: usize, t: f64) -> Option<Interval> {
        let n = &self.nodes[id];
        let m = Moment::at(t);
        if self.origin.is_none() || m < n.start || m >= n.end {
            return None;
        }
        let first = n.entries.front()?;
        (first.0 <= m).then(|| value_at(&n.entries, m))
    }

    /// Domain of node `id`, once the origin is known.
    pub fn node_domain(&self, id: usize) -> Option<Interval> {
        let o = self.origin?;
        let h = self.nodes[id].hor;
        let hi = if self.streaming { f64::INFINITY } else { o + h.hi() };
        Some(Interval::new(o + h.lo(), hi).unwrap())
    }

    /// Current worklist of node `id` as `(time, after, rosi)` triples, where
    /// `after` marks a value holding just after `time`.
    pub fn worklist(&self, id: usize) -> Vec<(f64, bool, Interval)> {
        self.nodes[id]
            .entries
            .iter()
            .map(|(m, v)| (m.t, m.after, *v))
            .collect()
    }

    /// Whether the RoSI at `t` can no longer change.
    pub fn is_final_at(&self, t: f64) -> bool {
        Moment::at(t) < self.nodes[0].frontier
    }

    /// Lets the root forget values before `t`.
    pub fn release_before(&mut self, t: f64) {
        self.root_need = Some(Moment::at(t));
    }

    /// Feeds one sample. Once the verdict is decided, later calls are no-ops
    /// returning the decided result.
    pub fn step(&mut self, sample: &Sample) -> Result<StepOutput, MonitorError> {
        if let Some(out) = self.frozen {
            return Ok(out);
        }
        let rosi = self.advance(sample)?;
        let out = StepOutput {
            rosi,
            verdict: verdict_of(rosi),
        };
        if out.verdict.is_decided() {
            self.frozen = Some(out);
        }
        Ok(out)
    }

    /// Feeds one sample and returns the root RoSI, regardless of the verdict.
    ///
    /// Panics if the origin was released with [`release_before`](Self::release_before).
    pub fn advance(&mut self, sample: &Sample) -> Result<Interval, MonitorError> {
        self.feed(sample)?;
        Ok(self.rosi().expect("origin is retained"))
    }

    /// Feeds one sample without reading the result.
    pub fn feed(&mut self, sample: &Sample) -> Result<(), MonitorError> {
        self.schema.validate(sample)?;
        if let Some(last) = self.last_time {
            if sample.time <= last {
                return Err(SignalError::NonIncreasingTime {
                    time: sample.time,
                    last,
                }
                .into());
            }
        }
        if self.origin.is_none() {
            self.init(sample.time);
        }
        self.last_time = Some(sample.time);
        for i in (0..self.nodes.len()).rev() {
            self.update(i, sample);
        }
        if self.opts.prune {
            let need = self.root_need.unwrap_or(self.nodes[0].start);
            self.prune(0, need);
        }
        Ok(())
    }

    fn init(&mut self, t0: f64) {
        self.origin = Some(t0);
        for n in &mut self.nodes {
            n.start = Moment::at(t0 + n.hor.lo());
            let hi = if self.streaming {
                f64::INFINITY
            } else {
                t0 + n.hor.hi()
            };
            n.end = Moment::after(hi);
            n.frontier = n.start;
        }
        for i in 0..self.nodes.len() {
            if let Kind::Window { child, a, b, max, .. } = self.nodes[i].kind {
                let start = self.nodes[i].start;
                let cstart = self.nodes[child].start;
                if let Kind::Window {
                    filter, consumed, ..
                } = &mut self.nodes[i].kind
                {
                    *filter = Some(Filter::new(max, a, b, start));
                    *consumed = cstart;
                }
            }
        }
    }

    fn update(&mut self, i: usize, sample: &Sample) {
        let (head, tail) = self.nodes.split_at_mut(i + 1);
        let node = &mut head[i];
        let tail: &[Node] = tail;
        // children have larger ids
        let child = move |j: usize| &tail[j - i - 1];
        let is_and = matches!(node.kind, Kind::And(..));
        let old = node.frontier;
        if old >= node.end {
            return;
        }
        let mut ops = 0u64;
        match &mut node.kind {
            Kind::Pred { p, prev } => {
                let t = sample.time;
                let v = Interval::point(p.eval(&sample.values));
                let bounds = p.bounds();
                truncate_from(&mut node.entries, old);
                // moments in [old, t) lie after the previous sample
                if let Some(pv) = *prev {
                    if old < Moment::at(t) {
                        push_coalesced(&mut node.entries, old, pv);
                    }
                }
                if Moment::at(t) >= old && Moment::at(t) < node.end {
                    push_coalesced(&mut node.entries, Moment::at(t), v);
                }
                let after = Moment::after(t).max(old);
                if after < node.end {
                    push_coalesced(&mut node.entries, after, bounds);
                }
                *prev = Some(v);
                ops += 3;
                node.frontier = Moment::after(t).max(node.start).min(node.end);
            }
            Kind::Not(c) => {
                let c = child(*c);
                truncate_from(&mut node.entries, old);
                for (m, v) in pieces(&c.entries, old, node.end) {
                    push_coalesced(&mut node.entries, m, v.neg());
                    ops += 1;
                }
                node.frontier = c.frontier.max(node.start).min(node.end);
            }
            Kind::And(l, r) | Kind::Or(l, r) => {
                let (l, r) = (child(*l), child(*r));
                truncate_from(&mut node.entries, old);
                let combine = |x: Interval, y: Interval| if is_and { x.min(y) } else { x.max(y) };
                let mut li = pieces(&l.entries, old, node.end).peekable();
                let mut ri = pieces(&r.entries, old, node.end).peekable();
                let (mut lv, mut rv) = (Interval::EMPTY, Interval::EMPTY);
                loop {
                    let m = match (li.peek(), ri.peek()) {
                        (None, None) => break,
                        (Some(a), None) => a.0,
                        (None, Some(b)) => b.0,
                        (Some(a), Some(b)) => a.0.min(b.0),
                    };
                    if li.peek().is_some_and(|x| x.0 == m) {
                        lv = li.next().unwrap().1;
                    }
                    if ri.peek().is_some_and(|x| x.0 == m) {
                        rv = ri.next().unwrap().1;
                    }
                    push_coalesced(&mut node.entries, m, combine(lv, rv));
                    ops += 1;
                }
                node.frontier = l.frontier.min(r.frontier).max(node.start).min(node.end);
            }
            Kind::Window {
                child: c,
                max,
                a,
                b,
                filter,
                consumed,
            } => {
                let c = child(*c);
                let (max, a, b) = (*max, *a, *b);
                let limit = c.frontier.shift(-b).max(node.start).min(node.end);
                let filter = filter.as_mut().expect("initialised");
                truncate_from(&mut node.entries, old);
                if self.opts.sliding_optim {
                    if c.frontier > *consumed {
                        for (m, v) in pieces(&c.entries, *consumed, c.frontier) {
                            filter.feed(m, v);
                            ops += 1;
                        }
                        filter.close(c.frontier);
                        *consumed = c.frontier;
                    }
                    let entries = &mut node.entries;
                    filter.emit_until(limit, |m, v| push_coalesced(entries, m, v));
                    if limit < node.end {
                        let mut vol = filter.clone();
                        ops += vol.size() as u64;
                        if c.frontier < c.end {
                            for (m, v) in pieces(&c.entries, c.frontier, c.end) {
                                vol.feed(m, v);
                                ops += 1;
                            }
                        }
                        vol.close(Moment::after(f64::INFINITY));
                        vol.emit_until(node.end, |m, v| push_coalesced(entries, m, v));
                        ops += vol.ops - filter.ops;
                    }
                } else {
                    node.entries.clear();
                    let mut fresh = Filter::new(max, a, b, node.start);
                    for (m, v) in pieces(&c.entries, c.start, c.end) {
                        fresh.feed(m, v);
                        ops += 1;
                    }
                    fresh.close(Moment::after(f64::INFINITY));
                    let entries = &mut node.entries;
                    fresh.emit_until(node.end, |m, v| push_coalesced(entries, m, v));
                    ops += fresh.ops;
                }
                node.frontier = limit;
            }
            Kind::Until { left, right, a, b } => {
                let (l, r) = (child(*left), child(*right));
                let (a, b) = (*a, *b);
                truncate_from(&mut node.entries, old);
                let cands = until::candidates(&l.entries, &r.entries, old, node.end, a, b);
                for (k, &m) in cands.iter().enumerate() {
                    let next_t = cands[k + 1..]
                        .iter()
                        .map(|n| n.t)
                        .find(|&t| t > m.t)
                        .or_else(|| node.end.t.is_finite().then_some(node.end.t));
                    let tau = until::representative(m, next_t);
                    let (v, n) = until::until_at(&l.entries, &r.entries, tau, a, b);
                    push_coalesced(&mut node.entries, m, v);
                    ops += n;
                }
                node.frontier = l
                    .frontier
                    .min(r.frontier)
                    .shift(-b)
                    .max(node.start)
                    .min(node.end);
            }
        }
        if let Kind::Window { filter: Some(f), .. } = &node.kind {
            ops += f.ops;
        }
        self.ops += ops;
        if let Kind::Window { filter: Some(f), .. } = &mut node.kind {
            f.ops = 0;
        }
        debug_assert!(node.frontier >= old, "frontier moved backwards");
        debug_assert!(node.entries.front().is_some_and(|e| e.0 <= node.start.max(old)));
    }

    /// Drops entries before `need` (or before the node's own frontier, if
    /// earlier) and propagates the children's requirements.
    fn prune(&mut self, i: usize, need: Moment) {
        let node = &mut self.nodes[i];
        let cut = need.min(node.frontier);
        if !node.entries.is_empty() {
            let k = index_at(&node.entries, cut.max(node.entries[0].0));
            node.entries.drain(..k);
        }
        let f = node.frontier;
        match node.kind {
            Kind::Pred { .. } => {}
            Kind::Not(c) => self.prune(c, f),
            Kind::And(l, r) | Kind::Or(l, r) => {
                self.prune(l, f);
                self.prune(r, f);
            }
            Kind::Window {
                child, consumed, ..
            } => {
                let need = if self.opts.sliding_optim {
                    consumed
                } else {
                    self.nodes[child].start
                };
                self.prune(child, need);
            }
            Kind::Until { left, right, a, .. } => {
                self.prune(left, f);
                self.prune(right, f.shift(a));
            }
        }
    }
}

fn child_ids(order: &[&Formula], sizes: &[usize], i: usize) -> Vec<usize> {
    let n = order[i].children().len();
    let mut out = Vec::with_capacity(n);
    let mut next = i + 1;
    for _ in 0..n {
        out.push(next);
        next += sizes[next];
    }
    out
}

/// Feeds every sample of `samples` and returns the root RoSI after each.
pub fn run_prefixes(
    formula: &Formula,
    schema: &Schema,
    samples: &[Sample],
    opts: Options,
) -> Result<Vec<Interval>, MonitorError> {
    let mut m = BoundedMonitor::with_options(formula, schema, opts)?;
    samples.iter().map(|s| m.advance(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    const INF: f64 = f64::INFINITY;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn verdict_rule() {
        assert_eq!(verdict_of(iv(-2.0, -2.0)), Verdict::Falsified);
        assert_eq!(verdict_of(iv(0.5, 3.0)), Verdict::Satisfied);
        assert_eq!(verdict_of(iv(-1.0, 2.0)), Verdict::Unknown);
        assert_eq!(verdict_of(iv(0.0, 0.0)), Verdict::Satisfied);
        assert_eq!(verdict_of(iv(-1.0, 0.0)), Verdict::Unknown);
    }

    fn xy() -> Schema {
        Schema::new(["x", "y"]).unwrap()
    }

    #[test]
    fn predicate_at_origin() {
        let f = parse("x > 0").unwrap();
        let mut m = BoundedMonitor::new(&f, &xy()).unwrap();
        let out = m.step(&Sample::new(0.0, vec![3.0, 0.0])).unwrap();
        assert_eq!(out.rosi, Interval::point(3.0));
        assert_eq!(out.verdict, Verdict::Satisfied);
    }

    #[test]
    fn unknown_future_uses_variable_bounds() {
        let schema = Schema::new(["x"]).unwrap().with_bounds("x", -5.0, 5.0).unwrap();
        let f = parse("G[0,1](x > 0)").unwrap();
        let mut m = BoundedMonitor::new(&f, &schema).unwrap();
        let r = m.advance(&Sample::new(0.0, vec![2.0])).unwrap();
        assert_eq!(r, iv(-5.0, 2.0));
        let r = m.advance(&Sample::new(1.0, vec![3.0])).unwrap();
        assert_eq!(r, iv(2.0, 2.0));
    }

    #[test]
    fn running_example() {
        let f = parse("G[0,1.25](not(y > 0) or F[2.5,3.5](x > 0))").unwrap();
        let mut m = BoundedMonitor::with_options(
            &f,
            &xy(),
            Options {
                sliding_optim: true,
                prune: false,
            },
        )
        .unwrap();
        let samples = [
            (0.0, 1.0, -1.0),
            (1.0, 2.0, 2.0),
            (2.0, -1.0, -1.0),
            (3.25, -2.0, 2.0),
            (4.6, 2.0, 2.0),
            (5.0, -1.0, 2.0),
        ];
        let mut roots = Vec::new();
        for (k, &(t, x, y)) in samples.iter().enumerate() {
            roots.push(m.advance(&Sample::new(t, vec![x, y])).unwrap());
            if k == 3 {
                assert_eq!(m.node_value(4, 0.0), Some(iv(-1.0, INF)));
            }
        }
        assert_eq!(roots[2], iv(-2.0, INF));
        assert_eq!(roots[3], iv(-2.0, INF));
        assert_eq!(roots[4], iv(-2.0, -2.0));
        assert_eq!(roots[5], iv(-2.0, -2.0));
    }

    #[test]
    fn step_freezes_after_decision() {
        let f = parse("G[0,1](x > 0)").unwrap();
        let s = Schema::new(["x"]).unwrap();
        let mut m = BoundedMonitor::new(&f, &s).unwrap();
        let a = m.step(&Sample::new(0.0, vec![-1.0])).unwrap();
        assert_eq!(a.verdict, Verdict::Falsified);
        let b = m.step(&Sample::new(0.5, vec![9.0])).unwrap();
        assert_eq!(a, b);
        assert_eq!(m.last_time(), Some(0.0));
    }

    #[test]
    fn rejects_bad_samples() {
        let f = parse("x > 0").unwrap();
        let s = Schema::new(["x"]).unwrap();
        let mut m = BoundedMonitor::new(&f, &s).unwrap();
        m.advance(&Sample::new(1.0, vec![1.0])).unwrap();
        assert!(m.advance(&Sample::new(1.0, vec![1.0])).is_err());
        assert!(m.advance(&Sample::new(2.0, vec![1.0, 2.0])).is_err());
        assert!(BoundedMonitor::new(&parse("G(x > 0)").unwrap(), &s).is_err());
    }

    #[test]
    fn optimised_and_batch_filters_agree() {
        let f = parse("F[0.5,2](G[0,1](x > 0) and x > 0 U[0.25,1] y > 1)").unwrap();
        let samples: Vec<Sample> = (0..24)
            .map(|k| {
                let t = k as f64 * 0.25;
                Sample::new(t, vec![((k * 7) % 5) as f64 - 2.0, ((k * 3) % 4) as f64])
            })
            .collect();
        let fast = run_prefixes(&f, &xy(), &samples, Options::default()).unwrap();
        let slow = run_prefixes(
            &f,
            &xy(),
            &samples,
            Options {
                sliding_optim: false,
                prune: false,
            },
        )
        .unwrap();
        assert_eq!(fast, slow);
    }
}
