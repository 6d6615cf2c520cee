#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rosi::bounded::WorklistEntry;
use rosi::formula::Predicate;
use rosi::{Formula, Interval, PartialSignal, Sample, Schema};

pub const BOUND: f64 = 8.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Variables `x` and `y`, both bounded by `[-BOUND, BOUND]`.
pub fn schema_xy() -> Schema {
    Schema::new(["x", "y"])
        .unwrap()
        .with_bounds("x", -BOUND, BOUND)
        .unwrap()
        .with_bounds("y", -BOUND, BOUND)
        .unwrap()
}

/// A multiple of 1/4 in `[0, max]`.
pub fn quarter(rng: &mut impl Rng, max: f64) -> f64 {
    rng.gen_range(0..=(max * 4.0) as u32) as f64 / 4.0
}

pub fn random_predicate(rng: &mut impl Rng) -> Formula {
    let var = if rng.gen_bool(0.5) { "x" } else { "y" };
    let c = rng.gen_range(-3..=3) as f64;
    let p = match rng.gen_range(0..3) {
        0 => Predicate::gt(var, c),
        1 => Predicate::lt(var, c),
        _ => Predicate::new(vec![("x".into(), 1.0), ("y".into(), -0.5)], c),
    };
    Formula::pred(p)
}

fn window(rng: &mut impl Rng) -> (f64, f64) {
    let a = quarter(rng, 1.5);
    let b = a + quarter(rng, 2.0);
    (a, b)
}

/// A bounded formula over `x`, `y` of depth at most `depth`.
pub fn random_formula(rng: &mut impl Rng, depth: usize) -> Formula {
    if depth <= 1 || rng.gen_bool(0.2) {
        return random_predicate(rng);
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => Formula::not(random_formula(rng, d)),
        1 => Formula::and(random_formula(rng, d), random_formula(rng, d)),
        2 => Formula::or(random_formula(rng, d), random_formula(rng, d)),
        3 => {
            let (a, b) = window(rng);
            Formula::always(a, b, random_formula(rng, d))
        }
        4 => {
            let (a, b) = window(rng);
            Formula::eventually(a, b, random_formula(rng, d))
        }
        _ => {
            let (a, b) = window(rng);
            Formula::until(a, b, random_formula(rng, d), random_formula(rng, d))
        }
    }
}

/// `n` samples of `x`, `y` with integer values in `[-4, 4]` and gaps that
/// are multiples of 1/4 between `min_gap` and `min_gap + 1.25`.
pub fn random_trace(rng: &mut impl Rng, n: usize, min_gap: f64) -> Vec<Sample> {
    let mut t = quarter(rng, 1.0);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let x = rng.gen_range(-4..=4) as f64;
        let y = rng.gen_range(-4..=4) as f64;
        out.push(Sample::new(t, vec![x, y]));
        t += min_gap + quarter(rng, 1.25);
    }
    out
}

pub fn signal(schema: &Schema, samples: &[Sample]) -> PartialSignal {
    let mut s = PartialSignal::new(schema.clone());
    for x in samples {
        s.append(x.clone()).unwrap();
    }
    s
}

/// A random interval with endpoints in `{-inf, -3, ..., 3, inf}`.
pub fn random_interval(rng: &mut impl Rng) -> Interval {
    let pick = |rng: &mut dyn rand::RngCore| match rng.gen_range(0..9) {
        0 => f64::NEG_INFINITY,
        8 => f64::INFINITY,
        k => (k - 4) as f64,
    };
    let (a, b) = (pick(rng), pick(rng));
    Interval::new(a.min(b), a.max(b)).unwrap()
}

/// Extremum of the piecewise-constant `entries` over `[t + a, t + b]`,
/// checking every input piece directly.
pub fn brute_window(entries: &[WorklistEntry], a: f64, b: f64, max: bool, t: f64) -> Interval {
    let (lo, hi) = (t + a, t + b);
    let mut acc: Option<Interval> = None;
    for (k, e) in entries.iter().enumerate() {
        let end = entries.get(k + 1).map_or(f64::INFINITY, |n| n.time);
        if e.time <= hi && end > lo {
            acc = Some(match acc {
                None => e.rosi,
                Some(v) if max => v.max(e.rosi),
                Some(v) => v.min(e.rosi),
            });
        }
    }
    acc.expect("window meets the input")
}

/// Value of a piecewise-constant output at `t`.
pub fn value_at(entries: &[WorklistEntry], t: f64) -> Interval {
    entries.iter().rev().find(|e| e.time <= t).expect("t after first entry").rosi
}

/// Query times exercising every breakpoint of a window `[a, b]` over
/// `entries` within `[first, last]`, plus midpoints.
pub fn window_queries(entries: &[WorklistEntry], a: f64, b: f64) -> Vec<f64> {
    let (first, last) = (entries[0].time, entries[entries.len() - 1].time);
    let mut ts: Vec<f64> = entries
        .iter()
        .flat_map(|e| [e.time, e.time - a, e.time - b])
        .chain([first, last])
        .filter(|&t| first <= t && t <= last)
        .collect();
    ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ts.dedup();
    let mids: Vec<f64> = ts.windows(2).map(|w| w[0] + (w[1] - w[0]) / 2.0).collect();
    ts.extend(mids);
    ts
}
