//! STL abstract syntax, concrete syntax and static analyses.

mod analysis;
mod parser;

use std::fmt;

use crate::interval::Interval;
use crate::signal::{Schema, SignalError};

pub use analysis::{
    compute_horizons, compute_k, compute_last, operand_window, untimed_class, FormulaError,
    UntimedClass, UntimedKind,
};
pub use parser::{parse, ParseError};

/// A linear predicate `c1*x1 + ... + cn*xn + constant > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Predicate {
    pub terms: Vec<(String, f64)>,
    pub constant: f64,
}

impl Predicate {
    pub fn new(terms: Vec<(String, f64)>, constant: f64) -> Self {
        Predicate { terms, constant }
    }

    /// `var > c`.
    pub fn gt(var: &str, c: f64) -> Self {
        Predicate::new(vec![(var.to_string(), 1.0)], -c)
    }

    /// `var < c`.
    pub fn lt(var: &str, c: f64) -> Self {
        Predicate::new(vec![(var.to_string(), -1.0)], c)
    }

    /// Resolves variable names against `schema` and precomputes `[f_inf, f_sup]`.
    pub fn bind(&self, schema: &Schema) -> Result<BoundPredicate, SignalError> {
        let terms = self
            .terms
            .iter()
            .map(|(name, c)| {
                schema
                    .index_of(name)
                    .map(|i| (i, *c))
                    .ok_or_else(|| SignalError::UnknownVariable(name.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut lo = 0.0;
        let mut hi = 0.0;
        for &(i, c) in &terms {
            // zero coefficients would turn infinite bounds into NaN
            if c == 0.0 {
                continue;
            }
            let b = schema.bounds()[i];
            let (l, h) = if c > 0.0 {
                (c * b.lo(), c * b.hi())
            } else {
                (c * b.hi(), c * b.lo())
            };
            lo += l;
            hi += h;
        }
        lo += self.constant;
        hi += self.constant;
        Ok(BoundPredicate {
            terms,
            constant: self.constant,
            bounds: Interval::new(lo, hi).expect("predicate bounds are ordered"),
        })
    }
}

/// A predicate resolved against a schema.
///
/// `eval` accumulates terms in the same order as the bound computation, so
/// every in-bounds sample evaluates inside `bounds` under rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundPredicate {
    terms: Vec<(usize, f64)>,
    constant: f64,
    bounds: Interval,
}

impl BoundPredicate {
    pub fn eval(&self, values: &[f64]) -> f64 {
        let mut acc = 0.0;
        for &(i, c) in &self.terms {
            if c == 0.0 {
                continue;
            }
            acc += c * values[i];
        }
        acc + self.constant
    }

    /// `[f_inf, f_sup]`, the value range over the declared variable bounds.
    pub fn bounds(&self) -> Interval {
        self.bounds
    }
}

/// STL formula.
///
/// Bounded temporal operators carry a finite window `[lo, hi]` with
/// `0 <= lo <= hi`; the untimed variants range over `[0, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Pred(Predicate),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Always(Interval, Box<Formula>),
    Eventually(Interval, Box<Formula>),
    Until(Interval, Box<Formula>, Box<Formula>),
    AlwaysUntimed(Box<Formula>),
    EventuallyUntimed(Box<Formula>),
    UntilUntimed(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn pred(p: Predicate) -> Self {
        Formula::Pred(p)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// Panics on a window that is not finite with `0 <= lo <= hi`.
    pub fn always(lo: f64, hi: f64, f: Formula) -> Self {
        Formula::Always(bounded_window(lo, hi), Box::new(f))
    }

    pub fn eventually(lo: f64, hi: f64, f: Formula) -> Self {
        Formula::Eventually(bounded_window(lo, hi), Box::new(f))
    }

    pub fn until(lo: f64, hi: f64, a: Formula, b: Formula) -> Self {
        Formula::Until(bounded_window(lo, hi), Box::new(a), Box::new(b))
    }

    pub fn always_untimed(f: Formula) -> Self {
        Formula::AlwaysUntimed(Box::new(f))
    }

    pub fn eventually_untimed(f: Formula) -> Self {
        Formula::EventuallyUntimed(Box::new(f))
    }

    pub fn until_untimed(a: Formula, b: Formula) -> Self {
        Formula::UntilUntimed(Box::new(a), Box::new(b))
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Pred(_) => vec![],
            Formula::Not(f)
            | Formula::Always(_, f)
            | Formula::Eventually(_, f)
            | Formula::AlwaysUntimed(f)
            | Formula::EventuallyUntimed(f) => vec![f],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Until(_, a, b)
            | Formula::UntilUntimed(a, b) => vec![a, b],
        }
    }

    /// Nodes in pre-order; node ids used throughout the crate index this list.
    pub fn preorder(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            out.push(f);
            for c in f.children().into_iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// True when no untimed operator occurs anywhere in the tree.
    pub fn is_bounded(&self) -> bool {
        !matches!(
            self,
            Formula::AlwaysUntimed(_) | Formula::EventuallyUntimed(_) | Formula::UntilUntimed(..)
        ) && self.children().iter().all(|c| c.is_bounded())
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for f in self.preorder() {
            if let Formula::Pred(p) = f {
                for (v, _) in &p.terms {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            }
        }
        out
    }
}

fn bounded_window(lo: f64, hi: f64) -> Interval {
    assert!(
        lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi,
        "invalid window [{lo}, {hi}]"
    );
    Interval::new(lo, hi).unwrap()
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            // not produced by the parser; rendered as an equivalent comparison
            return write!(f, "0*_ > {}", -self.constant);
        }
        for (k, (name, c)) in self.terms.iter().enumerate() {
            let neg = c.is_sign_negative();
            match (k, neg) {
                (0, false) => write!(f, "{c}*{name}")?,
                (0, true) => write!(f, "-{}*{name}", -c)?,
                (_, false) => write!(f, " + {c}*{name}")?,
                (_, true) => write!(f, " - {}*{name}", -c)?,
            }
        }
        write!(f, " > {}", -self.constant)
    }
}

fn window(f: &mut fmt::Formatter<'_>, w: &Interval) -> fmt::Result {
    write!(f, "[{}, {}]", w.lo(), w.hi())
}

impl fmt::Display for Formula {
    /// Fully parenthesised; `parse` inverts it.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Pred(p) => write!(f, "{p}"),
            Formula::Not(a) => write!(f, "not ({a})"),
            Formula::And(a, b) => write!(f, "({a}) and ({b})"),
            Formula::Or(a, b) => write!(f, "({a}) or ({b})"),
            Formula::Always(w, a) => {
                f.write_str("G")?;
                window(f, w)?;
                write!(f, " ({a})")
            }
            Formula::Eventually(w, a) => {
                f.write_str("F")?;
                window(f, w)?;
                write!(f, " ({a})")
            }
            Formula::Until(w, a, b) => {
                write!(f, "(({a}) U")?;
                window(f, w)?;
                write!(f, " ({b}))")
            }
            Formula::AlwaysUntimed(a) => write!(f, "G ({a})"),
            Formula::EventuallyUntimed(a) => write!(f, "F ({a})"),
            Formula::UntilUntimed(a, b) => write!(f, "(({a}) U ({b}))"),
        }
    }
}
