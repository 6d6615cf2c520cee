//! Command-line front end: streams CSV samples through a monitor and writes
//! one JSON line per sample followed by a summary line.
//!
//! Exit status: 0 satisfied, 1 falsified, 2 unknown at end of input,
//! 64 usage or formula error, 65 malformed or invalid data, 66 unreadable
//! input, 74 output error.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::PathBuf;

use clap::Parser;

use crate::bounded::{verdict_of, BoundedMonitor, Options, Verdict};
use crate::formula::{parse, untimed_class, Formula};
use crate::interval::Interval;
use crate::signal::{CsvSamples, Sample};
use crate::untimed::{absorbing, UntimedError, UntimedMonitor};

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_IO: i32 = 74;

/// Online STL monitor computing robust satisfaction intervals.
#[derive(Debug, Parser)]
#[command(name = "rosi", version)]
pub struct Cli {
    /// Formula text.
    #[arg(short = 'f', long, required_unless_present = "formula_file", conflicts_with = "formula_file")]
    pub formula: Option<String>,
    /// File holding the formula text.
    #[arg(long, value_name = "PATH")]
    pub formula_file: Option<PathBuf>,
    /// CSV input with header `time,<var>,...`; standard input if omitted or `-`.
    #[arg(short = 'i', long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Value bounds of a variable, e.g. `x=-10,10`; repeatable.
    #[arg(long = "bound", value_name = "VAR=LO,HI", value_parser = parse_bound)]
    pub bounds: Vec<(String, Interval)>,
    /// Minimum time between consecutive samples.
    #[arg(long, value_name = "SECONDS")]
    pub delta: Option<f64>,
    /// Keep reading after the verdict is decided.
    #[arg(long)]
    pub no_early_stop: bool,
    /// Print only the last sample record and the summary.
    #[arg(long)]
    pub final_only: bool,
    /// Recompute temporal operators from scratch on every sample.
    #[arg(long)]
    pub no_sliding_optim: bool,
}

fn parse_bound(s: &str) -> Result<(String, Interval), String> {
    let (var, range) = s.split_once('=').ok_or("expected VAR=LO,HI")?;
    let (lo, hi) = range.split_once(',').ok_or("expected VAR=LO,HI")?;
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{x}` is not a number"))
    };
    let (lo, hi) = (num(lo)?, num(hi)?);
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(format!("bounds [{lo}, {hi}] are not ordered"));
    }
    Ok((var.trim().to_string(), Interval::new(lo, hi).map_err(|e| e.to_string())?))
}

#[derive(Debug, Clone)]
pub enum FormulaSource {
    Text(String),
    File(PathBuf),
}

/// Validated settings of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub formula: FormulaSource,
    /// `None` reads standard input.
    pub input: Option<PathBuf>,
    pub bounds: Vec<(String, Interval)>,
    pub delta: Option<f64>,
    pub early_stop: bool,
    pub final_only: bool,
    pub sliding_optim: bool,
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        let formula = match (c.formula, c.formula_file) {
            (Some(text), _) => FormulaSource::Text(text),
            (None, Some(path)) => FormulaSource::File(path),
            (None, None) => FormulaSource::Text(String::new()),
        };
        RunConfig {
            formula,
            input: c.input.filter(|p| p.as_os_str() != "-"),
            bounds: c.bounds,
            delta: c.delta,
            early_stop: !c.no_early_stop,
            final_only: c.final_only,
            sliding_optim: !c.no_sliding_optim,
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    NoInput(String),
    Io(io::Error),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::NoInput(_) => EXIT_NO_INPUT,
            Failure::Io(_) => EXIT_IO,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

enum Monitor {
    Bounded(BoundedMonitor),
    Untimed(Box<UntimedMonitor>),
}

/// Parses `args` (including the program name) and runs. Returns the exit status.
pub fn main_with<I, T>(args: I, stdin: impl Read, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli.into(), stdin, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            code
        }
    }
}

/// Runs the monitor over the configured input. Returns the exit status.
pub fn run(cfg: &RunConfig, stdin: impl Read, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let result = match &cfg.input {
        Some(path) => match File::open(path) {
            Ok(f) => run_on(cfg, f, out, err),
            Err(e) => Err(Failure::NoInput(format!("cannot open {}: {e}", path.display()))),
        },
        None => run_on(cfg, stdin, out, err),
    };
    match result {
        Ok(v) => match v {
            Verdict::Satisfied => 0,
            Verdict::Falsified => 1,
            Verdict::Unknown => 2,
        },
        Err(f) => {
            let msg = match &f {
                Failure::Usage(m) | Failure::Data(m) | Failure::NoInput(m) => m.clone(),
                Failure::Io(e) => format!("output error: {e}"),
            };
            let _ = writeln!(err, "rosi: {msg}");
            f.code()
        }
    }
}

fn load_formula(src: &FormulaSource) -> Result<Formula, Failure> {
    let text = match src {
        FormulaSource::Text(t) => t.clone(),
        FormulaSource::File(p) => std::fs::read_to_string(p)
            .map_err(|e| Failure::NoInput(format!("cannot read {}: {e}", p.display())))?,
    };
    parse(&text).map_err(|e| Failure::Usage(format!("formula: {e}")))
}

fn num(x: f64) -> String {
    if x == f64::INFINITY {
        "\"inf\"".into()
    } else if x == f64::NEG_INFINITY {
        "\"-inf\"".into()
    } else {
        serde_json::Value::from(x).to_string()
    }
}

fn record(time: f64, rosi: Interval, verdict: Verdict) -> String {
    format!(
        "{{\"time\":{},\"rosi\":[{},{}],\"verdict\":\"{}\"}}",
        num(time),
        num(rosi.lo()),
        num(rosi.hi()),
        verdict
    )
}

fn run_on(cfg: &RunConfig, input: impl Read, out: &mut impl Write, err: &mut impl Write) -> Result<Verdict, Failure> {
    let formula = load_formula(&cfg.formula)?;
    if let Some(d) = cfg.delta {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Failure::Usage(format!("delta must be positive and finite, got {d}")));
        }
    }
    let mut reader = BufReader::new(input);
    if reader
        .fill_buf()
        .map_err(|e| Failure::NoInput(format!("cannot read input: {e}")))?
        .is_empty()
    {
        return Err(Failure::Usage("input is empty".into()));
    }
    let mut rows = CsvSamples::new(reader).map_err(|e| Failure::Data(e.to_string()))?;
    let mut schema = rows.schema().clone();
    for (var, b) in &cfg.bounds {
        schema
            .set_bounds(var, *b)
            .map_err(|e| Failure::Usage(format!("--bound: {e}")))?;
    }
    for v in formula.variables() {
        if schema.index_of(&v).is_none() {
            return Err(Failure::Usage(format!("formula variable `{v}` is not an input column")));
        }
    }
    let opts = Options {
        sliding_optim: cfg.sliding_optim,
        ..Options::default()
    };
    let mut monitor = if formula.is_bounded() {
        Monitor::Bounded(BoundedMonitor::with_options(&formula, &schema, opts).map_err(|e| Failure::Usage(e.to_string()))?)
    } else {
        if untimed_class(&formula).is_none() {
            return Err(Failure::Usage(format!(
                "unsupported untimed formula `{formula}`: untimed operators are supported in the forms \
                 G p, F p, p U q, G F p, F G p, G (p or F q), F (p and G q), F (p and F q), G (p or G q) \
                 with bounded p and q"
            )));
        }
        let m = UntimedMonitor::new(&formula, &schema, cfg.delta, opts).map_err(|e| Failure::Usage(e.to_string()))?;
        writeln!(err, "rosi: note: untimed operators report prefix robustness over the samples observed so far")?;
        Monitor::Untimed(Box::new(m))
    };

    let mut consumed = 0u64;
    let mut last_time: Option<f64> = None;
    let mut last_record: Option<String> = None;
    let mut decided = Verdict::Unknown;
    for row in rows.by_ref() {
        let (line, sample) = row.map_err(|e| Failure::Data(e.to_string()))?;
        let at_line = |msg: String| Failure::Data(format!("line {line}: {msg}"));
        check_gap(cfg.delta, last_time, &sample).map_err(at_line)?;
        let (rosi, verdict) = match &mut monitor {
            Monitor::Bounded(m) => {
                let r = m.advance(&sample).map_err(|e| at_line(e.to_string()))?;
                (r, verdict_of(r))
            }
            Monitor::Untimed(m) => {
                let r = m.advance(&sample).map_err(|e| match e {
                    UntimedError::Monitor(e) => at_line(e.to_string()),
                    other => at_line(other.to_string()),
                })?;
                if !decided.is_decided() && absorbing(m.kind()) == Some(verdict_of(r)) {
                    decided = verdict_of(r);
                }
                (r, decided)
            }
        };
        consumed += 1;
        last_time = Some(sample.time);
        let rec = record(sample.time, rosi, verdict);
        if cfg.final_only {
            last_record = Some(rec);
        } else {
            writeln!(out, "{rec}")?;
        }
        if let Monitor::Bounded(_) = monitor {
            decided = verdict;
        }
        if cfg.early_stop && verdict.is_decided() {
            break;
        }
    }
    if consumed == 0 {
        return Err(Failure::Usage("input has no samples".into()));
    }
    // the rest of the input is counted, not validated
    let available = consumed + rows.count() as u64;
    let verdict = match &monitor {
        Monitor::Bounded(m) => m.verdict(),
        Monitor::Untimed(m) => match decided {
            Verdict::Unknown => m.rosi().map_or(Verdict::Unknown, verdict_of),
            v => v,
        },
    };
    if let Some(rec) = last_record {
        writeln!(out, "{rec}")?;
    }
    writeln!(
        out,
        "{{\"consumed\":{consumed},\"available\":{available},\"verdict\":\"{verdict}\"}}"
    )?;
    out.flush()?;
    Ok(verdict)
}

fn check_gap(delta: Option<f64>, last: Option<f64>, sample: &Sample) -> Result<(), String> {
    if let (Some(d), Some(last)) = (delta, last) {
        let gap = sample.time - last;
        if gap > 0.0 && gap < d {
            return Err(format!(
                "sample at {} is {gap} after the previous one, less than delta = {d}",
                sample.time
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str], input: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["rosi"];
        argv.extend_from_slice(args);
        let code = main_with(argv, input.as_bytes(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bound_syntax() {
        assert_eq!(parse_bound("x=-1,2").unwrap(), ("x".into(), Interval::new(-1.0, 2.0).unwrap()));
        assert_eq!(parse_bound("x=-inf,inf").unwrap().1, Interval::UNBOUNDED);
        assert!(parse_bound("x=2,1").is_err());
        assert!(parse_bound("x:1,2").is_err());
    }

    #[test]
    fn infinite_endpoints_are_strings() {
        let r = record(1.5, Interval::new(f64::NEG_INFINITY, 2.0).unwrap(), Verdict::Unknown);
        assert_eq!(r, r#"{"time":1.5,"rosi":["-inf",2.0],"verdict":"unknown"}"#);
    }

    #[test]
    fn satisfied_trace() {
        let (code, out, _) = go(&["-f", "G[0,1](x > 0)"], "time,x\n0,1\n0.5,2\n1,3\n2,1\n");
        assert_eq!(code, 0);
        let last = out.lines().last().unwrap();
        assert_eq!(last, r#"{"consumed":3,"available":4,"verdict":"satisfied"}"#);
    }

    #[test]
    fn empty_input_is_a_usage_error() {
        let (code, _, err) = go(&["-f", "x > 0"], "");
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("empty"));
    }

    #[test]
    fn malformed_row_reports_line() {
        let (code, _, err) = go(&["-f", "G[0,5](x > 0)"], "time,x\n0,1\n1,abc\n");
        assert_eq!(code, EXIT_DATA);
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn missing_formula_is_usage() {
        let (code, _, _) = go(&[], "time,x\n0,1\n");
        assert_eq!(code, EXIT_USAGE);
    }
}
