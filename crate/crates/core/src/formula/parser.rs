//! Recursive-descent parser for the textual formula syntax.
//!
//! ```text
//! formula  := implies
//! implies  := disj ("implies" implies)?
//! disj     := conj ("or" conj)*
//! conj     := until ("and" until)*
//! until    := unary (("U" | "until") window? unary)*
//! unary    := "not" unary | ("G" | "alw" | "F" | "ev") window? unary
//!           | "(" formula ")" | atom
//! window   := "[" number "," number "]"
//! atom     := linexpr ("<" | ">" | "<=" | ">=") number
//! linexpr  := ("-")? term (("+" | "-") term)*
//! term     := number "*"? ident | ident | number "*"? "abs" "(" ident ")" | "abs" "(" ident ")"
//! ```

use thiserror::Error;

use super::{Formula, Predicate};
use crate::interval::Interval;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Plus,
    Minus,
    Star,
    Lt,
    Gt,
    Le,
    Ge,
    Eof,
}

const KEYWORDS: &[&str] = &[
    "not", "and", "or", "implies", "G", "F", "U", "alw", "ev", "until", "abs", "inf",
];

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'[' => Some(Tok::LBrack),
            b']' => Some(Tok::RBrack),
            b',' => Some(Tok::Comma),
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            _ => None,
        };
        if let Some(t) = single {
            out.push((start, t));
            i += 1;
            continue;
        }
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'<' | b'>' => {
                let eq = bytes.get(i + 1) == Some(&b'=');
                let t = match (c, eq) {
                    (b'<', false) => Tok::Lt,
                    (b'<', true) => Tok::Le,
                    (_, false) => Tok::Gt,
                    (_, true) => Tok::Ge,
                };
                i += if eq { 2 } else { 1 };
                out.push((start, t));
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent only when followed by digits, so `2ex` lexes as `2`, `ex`
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| ParseError {
                    pos: start,
                    msg: format!("malformed number `{text}`"),
                })?;
                out.push((start, Tok::Num(v)));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
            }
            _ => {
                let ch = src[i..].chars().next().unwrap();
                return Err(ParseError {
                    pos: start,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        }
    }
    out.push((src.len(), Tok::Eof));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

/// Parses and normalises a formula.
///
/// Comparisons become `f(x) > 0` predicates, `abs` terms become a
/// disjunction or conjunction of two predicates, and `a implies b` becomes
/// `not a or b`.
pub fn parse(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        at: 0,
    };
    let f = p.implies()?;
    match p.peek() {
        Tok::Eof => Ok(f),
        t => Err(p.error(format!("unexpected {}", describe(t)))),
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number `{v}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Eof => "end of input".to_string(),
        other => format!("{other:?}"),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, msg: String) -> ParseError {
        ParseError {
            pos: self.pos(),
            msg,
        }
    }

    fn is_kw(&self, kws: &[&str]) -> bool {
        matches!(self.peek(), Tok::Ident(s) if kws.contains(&s.as_str()))
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                describe(&t),
                describe(self.peek())
            )))
        }
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        if self.is_kw(&["implies"]) {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::or(Formula::not(lhs), rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conj()?;
        while self.is_kw(&["or"]) {
            self.bump();
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.until()?;
        while self.is_kw(&["and"]) {
            self.bump();
            f = Formula::and(f, self.until()?);
        }
        Ok(f)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.is_kw(&["U", "until"]) {
            self.bump();
            let w = self.window()?;
            let rhs = self.unary()?;
            f = match w {
                Some(w) => Formula::Until(w, Box::new(f), Box::new(rhs)),
                None => Formula::until_untimed(f, rhs),
            };
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.is_kw(&["not"]) {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        if self.is_kw(&["G", "alw", "F", "ev"]) {
            let always = self.is_kw(&["G", "alw"]);
            self.bump();
            let w = self.window()?;
            let body = self.unary()?;
            return Ok(match (always, w) {
                (true, Some(w)) => Formula::Always(w, Box::new(body)),
                (false, Some(w)) => Formula::Eventually(w, Box::new(body)),
                (true, None) => Formula::always_untimed(body),
                (false, None) => Formula::eventually_untimed(body),
            });
        }
        if *self.peek() == Tok::LParen {
            self.bump();
            let f = self.implies()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        self.atom()
    }

    fn window(&mut self) -> Result<Option<Interval>, ParseError> {
        if *self.peek() != Tok::LBrack {
            return Ok(None);
        }
        let start = self.pos();
        self.bump();
        let lo = self.window_bound()?;
        self.expect(Tok::Comma)?;
        let hi = self.window_bound()?;
        self.expect(Tok::RBrack)?;
        let bad = |msg: String| ParseError { pos: start, msg };
        if lo < 0.0 {
            return Err(bad(format!("window lower bound {lo} is negative")));
        }
        if lo > hi {
            return Err(bad(format!("window [{lo}, {hi}] has lower bound above upper bound")));
        }
        Ok(Some(Interval::new(lo, hi).unwrap()))
    }

    fn window_bound(&mut self) -> Result<f64, ParseError> {
        if self.is_kw(&["inf"]) {
            return Err(self.error(
                "unbounded window; omit the window for an untimed operator".to_string(),
            ));
        }
        self.signed_number()
    }

    fn signed_number(&mut self) -> Result<f64, ParseError> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match *self.peek() {
            Tok::Num(v) => {
                self.bump();
                Ok(if neg { -v } else { v })
            }
            ref t => Err(self.error(format!("expected number, found {}", describe(t)))),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            t => Err(self.error(format!("expected variable, found {}", describe(&t)))),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let start = self.pos();
        let mut terms: Vec<(String, f64)> = Vec::new();
        let mut abs: Option<(String, f64)> = None;
        let mut sign = if *self.peek() == Tok::Minus {
            self.bump();
            -1.0
        } else {
            1.0
        };
        loop {
            let coeff = match self.peek() {
                Tok::Num(v) => {
                    let v = *v;
                    self.bump();
                    if *self.peek() == Tok::Star {
                        self.bump();
                    }
                    sign * v
                }
                _ => sign,
            };
            if self.is_kw(&["abs"]) {
                let at = self.pos();
                self.bump();
                self.expect(Tok::LParen)?;
                let v = self.ident()?;
                self.expect(Tok::RParen)?;
                if abs.is_some() {
                    return Err(ParseError {
                        pos: at,
                        msg: "at most one abs term per comparison".to_string(),
                    });
                }
                abs = Some((v, coeff));
            } else {
                let v = self.ident()?;
                match terms.iter_mut().find(|(n, _)| *n == v) {
                    Some((_, c)) => *c += coeff,
                    None => terms.push((v, coeff)),
                }
            }
            sign = match self.peek() {
                Tok::Plus => 1.0,
                Tok::Minus => -1.0,
                _ => break,
            };
            self.bump();
        }
        let greater = match self.peek() {
            Tok::Gt | Tok::Ge => true,
            Tok::Lt | Tok::Le => false,
            t => return Err(self.error(format!("expected comparison, found {}", describe(t)))),
        };
        self.bump();
        let rhs = self.signed_number()?;
        // lhs > rhs  ->  lhs - rhs > 0;  lhs < rhs  ->  rhs - lhs > 0
        let (flip, constant) = if greater { (1.0, -rhs) } else { (-1.0, rhs) };
        let terms: Vec<(String, f64)> = terms.into_iter().map(|(n, c)| (n, flip * c)).collect();
        let Some((z, k)) = abs else {
            return Ok(Formula::pred(Predicate::new(terms, constant)));
        };
        let k = flip * k;
        if k == 0.0 {
            return Err(ParseError {
                pos: start,
                msg: "abs term with zero coefficient".to_string(),
            });
        }
        // k|z| = max(kz, -kz) for k > 0 and min(kz, -kz) for k < 0
        let with = |c: f64| {
            let mut t = terms.clone();
            match t.iter_mut().find(|(n, _)| *n == z) {
                Some((_, d)) => *d += c,
                None => t.push((z.clone(), c)),
            }
            Formula::pred(Predicate::new(t, constant))
        };
        Ok(if k > 0.0 {
            Formula::or(with(k), with(-k))
        } else {
            Formula::and(with(k), with(-k))
        })
    }
}
