//! Timed multi-variable samples with piecewise-constant reconstruction.

use std::collections::HashMap;
use std::io::Read;

use thiserror::Error;

use crate::interval::Interval;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignalError {
    #[error("sample time {time} is not after the previous sample time {last}")]
    NonIncreasingTime { time: f64, last: f64 },
    #[error("sample time {0} is negative or not finite")]
    BadTime(f64),
    #[error("sample has {got} values but the signal declares {expected} variables")]
    Arity { expected: usize, got: usize },
    #[error("value {value} of variable `{var}` is not a finite number")]
    BadValue { var: String, value: f64 },
    #[error("value {value} of variable `{var}` lies outside its declared bounds {bounds}")]
    OutOfBounds {
        var: String,
        value: f64,
        bounds: Interval,
    },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("missing value for variable `{0}`")]
    MissingVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("query time {t} precedes the signal origin {origin}")]
    BeforeOrigin { t: f64, origin: f64 },
    #[error("signal has no samples")]
    Empty,
    #[error("line {line}: {msg}")]
    Csv { line: u64, msg: String },
}

/// Ordered variable names and their value bounds `[f_inf, f_sup]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    names: Vec<String>,
    bounds: Vec<Interval>,
}

impl Schema {
    /// Every variable starts with bounds `(-inf, +inf)`.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, SignalError> {
        let mut out: Vec<String> = Vec::new();
        for n in names {
            let n = n.into();
            if out.contains(&n) {
                return Err(SignalError::DuplicateVariable(n));
            }
            out.push(n);
        }
        let bounds = vec![Interval::UNBOUNDED; out.len()];
        Ok(Schema { names: out, bounds })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn bounds(&self) -> &[Interval] {
        &self.bounds
    }

    pub fn set_bounds(&mut self, name: &str, bounds: Interval) -> Result<(), SignalError> {
        let i = self
            .index_of(name)
            .ok_or_else(|| SignalError::UnknownVariable(name.to_string()))?;
        self.bounds[i] = bounds;
        Ok(())
    }

    pub fn with_bounds(mut self, name: &str, lo: f64, hi: f64) -> Result<Self, SignalError> {
        let b = Interval::new(lo, hi).map_err(|_| SignalError::BadValue {
            var: name.to_string(),
            value: lo,
        })?;
        self.set_bounds(name, b)?;
        Ok(self)
    }

    /// Checks arity, finiteness and declared bounds of a sample.
    pub fn validate(&self, sample: &Sample) -> Result<(), SignalError> {
        if !(sample.time.is_finite() && sample.time >= 0.0) {
            return Err(SignalError::BadTime(sample.time));
        }
        if sample.values.len() != self.names.len() {
            return Err(SignalError::Arity {
                expected: self.names.len(),
                got: sample.values.len(),
            });
        }
        for ((name, &v), b) in self.names.iter().zip(&sample.values).zip(&self.bounds) {
            if !v.is_finite() {
                return Err(SignalError::BadValue {
                    var: name.clone(),
                    value: v,
                });
            }
            if !b.contains(v) {
                return Err(SignalError::OutOfBounds {
                    var: name.clone(),
                    value: v,
                    bounds: *b,
                });
            }
        }
        Ok(())
    }
}

/// One observation: a time stamp and the value of every variable, in schema order.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub time: f64,
    pub values: Vec<f64>,
}

impl Sample {
    pub fn new(time: f64, values: Vec<f64>) -> Self {
        Sample { time, values }
    }

    /// Builds a sample from `name -> value` pairs, ordered by `schema`.
    pub fn from_map(
        schema: &Schema,
        time: f64,
        values: &HashMap<String, f64>,
    ) -> Result<Self, SignalError> {
        for k in values.keys() {
            if schema.index_of(k).is_none() {
                return Err(SignalError::UnknownVariable(k.clone()));
            }
        }
        let values = schema
            .names()
            .iter()
            .map(|n| {
                values
                    .get(n)
                    .copied()
                    .ok_or_else(|| SignalError::MissingVariable(n.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Sample { time, values })
    }
}

/// A prefix of a sampled signal, reconstructed by constant interpolation:
/// `x(t) = x_i` for `t` in `[t_i, t_{i+1})` and `x(t_n) = x_n`.
///
/// The origin `t0` is the time of the first sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSignal {
    schema: Schema,
    samples: Vec<Sample>,
}

impl PartialSignal {
    pub fn new(schema: Schema) -> Self {
        PartialSignal {
            schema,
            samples: Vec::new(),
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn origin(&self) -> Option<f64> {
        self.samples.first().map(|s| s.time)
    }

    pub fn last_time(&self) -> Option<f64> {
        self.samples.last().map(|s| s.time)
    }

    pub fn append(&mut self, sample: Sample) -> Result<(), SignalError> {
        self.schema.validate(&sample)?;
        if let Some(last) = self.last_time() {
            if sample.time <= last {
                return Err(SignalError::NonIncreasingTime {
                    time: sample.time,
                    last,
                });
            }
        }
        self.samples.push(sample);
        Ok(())
    }

    /// The prefix made of the first `n` samples.
    pub fn prefix(&self, n: usize) -> PartialSignal {
        PartialSignal {
            schema: self.schema.clone(),
            samples: self.samples[..n.min(self.samples.len())].to_vec(),
        }
    }

    /// Interpolated values at `t`; `Ok(None)` when `t` lies past the last sample.
    pub fn value_at(&self, t: f64) -> Result<Option<&[f64]>, SignalError> {
        let origin = self.origin().ok_or(SignalError::Empty)?;
        if t < origin {
            return Err(SignalError::BeforeOrigin { t, origin });
        }
        // index of the last sample with time <= t
        let idx = self.samples.partition_point(|s| s.time <= t) - 1;
        if idx + 1 == self.samples.len() && t > self.samples[idx].time {
            return Ok(None);
        }
        Ok(Some(&self.samples[idx].values))
    }

    /// Reads a CSV stream with header `time,<var1>,<var2>,...`.
    pub fn from_csv<R: Read>(reader: R, mut schema_hook: impl FnMut(&mut Schema)) -> Result<Self, SignalError> {
        let mut rows = CsvSamples::new(reader)?;
        let mut schema = rows.schema().clone();
        schema_hook(&mut schema);
        let mut sig = PartialSignal::new(schema);
        for row in &mut rows {
            let (line, sample) = row?;
            sig.append(sample).map_err(|e| SignalError::Csv {
                line,
                msg: e.to_string(),
            })?;
        }
        Ok(sig)
    }
}

/// Streaming CSV reader yielding `(line number, sample)` pairs.
///
/// Only the shape of each row is checked here; time ordering and bounds are
/// left to the consumer.
pub struct CsvSamples<R: Read> {
    records: csv::StringRecordsIntoIter<R>,
    schema: Schema,
}

impl<R: Read> CsvSamples<R> {
    pub fn new(reader: R) -> Result<Self, SignalError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers().map_err(|e| SignalError::Csv {
            line: 1,
            msg: e.to_string(),
        })?;
        let mut cols = headers.iter();
        match cols.next() {
            Some("time") => {}
            other => {
                return Err(SignalError::Csv {
                    line: 1,
                    msg: format!("first column must be `time`, found {other:?}"),
                })
            }
        }
        let schema = Schema::new(cols.map(str::to_string)).map_err(|e| SignalError::Csv {
            line: 1,
            msg: e.to_string(),
        })?;
        Ok(CsvSamples {
            records: rdr.into_records(),
            schema,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }
}

impl<R: Read> Iterator for CsvSamples<R> {
    type Item = Result<(u64, Sample), SignalError>;

    fn next(&mut self) -> Option<Self::Item> {
        let rec = self.records.next()?;
        Some(rec.map_err(|e| SignalError::Csv {
            line: e.position().map_or(0, |p| p.line()),
            msg: e.to_string(),
        }).and_then(|rec| {
            let line = rec.position().map_or(0, |p| p.line());
            let bad = |msg: String| SignalError::Csv { line, msg };
            if rec.len() != self.schema.len() + 1 {
                return Err(bad(format!(
                    "expected {} fields, found {}",
                    self.schema.len() + 1,
                    rec.len()
                )));
            }
            let mut fields = rec.iter().map(|f| {
                f.parse::<f64>()
                    .map_err(|_| bad(format!("`{f}` is not a decimal number")))
            });
            let time = fields.next().unwrap()?;
            let values = fields.collect::<Result<Vec<_>, _>>()?;
            Ok((line, Sample::new(time, values)))
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xsig() -> PartialSignal {
        PartialSignal::new(Schema::new(["x"]).unwrap())
    }

    #[test]
    fn append_grows_signal() {
        let mut s = xsig();
        s.append(Sample::new(0.0, vec![1.0])).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn append_rejects_non_increasing_time() {
        let mut s = xsig();
        s.append(Sample::new(0.0, vec![1.0])).unwrap();
        assert_eq!(
            s.append(Sample::new(0.0, vec![2.0])),
            Err(SignalError::NonIncreasingTime {
                time: 0.0,
                last: 0.0
            })
        );
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn constant_interpolation() {
        let mut s = xsig();
        s.append(Sample::new(0.0, vec![1.0])).unwrap();
        s.append(Sample::new(0.5, vec![3.0])).unwrap();
        assert_eq!(s.value_at(0.25).unwrap(), Some(&[1.0][..]));
        assert_eq!(s.value_at(0.0).unwrap(), Some(&[1.0][..]));
        // x(t_n) = x_n
        assert_eq!(s.value_at(0.5).unwrap(), Some(&[3.0][..]));
        assert_eq!(s.value_at(0.75).unwrap(), None);
        assert!(matches!(
            s.value_at(-1.0),
            Err(SignalError::BeforeOrigin { .. })
        ));
    }

    #[test]
    fn value_at_on_samples_one_apart() {
        let mut s = xsig();
        s.append(Sample::new(0.0, vec![7.0])).unwrap();
        s.append(Sample::new(1.0, vec![9.0])).unwrap();
        assert_eq!(s.value_at(0.5).unwrap(), Some(&[7.0][..]));
        assert_eq!(s.value_at(0.999).unwrap(), Some(&[7.0][..]));
    }

    #[test]
    fn bounds_are_enforced() {
        let schema = Schema::new(["x"]).unwrap().with_bounds("x", -1.0, 1.0).unwrap();
        let mut s = PartialSignal::new(schema);
        assert!(matches!(
            s.append(Sample::new(0.0, vec![2.0])),
            Err(SignalError::OutOfBounds { .. })
        ));
    }

    #[test]
    fn sample_from_map() {
        let schema = Schema::new(["x", "y"]).unwrap();
        let m: HashMap<String, f64> = [("y".to_string(), 2.0), ("x".to_string(), 1.0)].into();
        assert_eq!(Sample::from_map(&schema, 0.0, &m).unwrap().values, vec![1.0, 2.0]);
        let partial: HashMap<String, f64> = [("x".to_string(), 1.0)].into();
        assert_eq!(
            Sample::from_map(&schema, 0.0, &partial),
            Err(SignalError::MissingVariable("y".into()))
        );
    }

    #[test]
    fn csv_ingestion() {
        let text = "time,x,y\n0,1,-1\n0.5,2,2.5\n";
        let sig = PartialSignal::from_csv(text.as_bytes(), |_| {}).unwrap();
        assert_eq!(sig.schema().names(), &["x".to_string(), "y".to_string()]);
        assert_eq!(sig.samples()[1], Sample::new(0.5, vec![2.0, 2.5]));
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let text = "time,x\n0,1\n1,oops\n";
        match PartialSignal::from_csv(text.as_bytes(), |_| {}) {
            Err(SignalError::Csv { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let text = "time,x\n0,1\n0,2\n";
        match PartialSignal::from_csv(text.as_bytes(), |_| {}) {
            Err(SignalError::Csv { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(PartialSignal::from_csv("t,x\n".as_bytes(), |_| {}).is_err());
    }
}
