//! Tables and reports as CSV or JSON lines, numbers at 12 significant digits.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use kthprice_core::BigRational;
use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::config::Format;
use crate::CliError;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `v` with 12 significant digits, plain decimal for exponents in
/// `[-5, 12)` and scientific otherwise (like C's `%.12g`).
pub fn fmt_sig(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `v` rounded to 12 significant digits.
pub fn round_sig(v: f64) -> f64 {
    fmt_sig(v).parse().unwrap_or(v)
}

/// Exact rational as `"p/q"`.
pub fn fmt_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_sig(*v),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => number(*v),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

fn number(v: f64) -> Value {
    Number::from_f64(round_sig(v)).map_or(Value::Null, Value::Number)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Self {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.headers)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv))?;
                }
                w.flush()?;
            }
            Format::Json => {
                for row in &self.rows {
                    let obj: Map<String, Value> =
                        self.headers.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect();
                    writeln!(out, "{}", Value::Object(obj))?;
                }
            }
        }
        Ok(())
    }
}

/// Rounds every non-integer number in `v` to 12 significant digits.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => *v = number(n.as_f64().expect("f64 number")),
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// One JSON line for `value`, numbers rounded.
pub fn write_json_line<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<(), CliError> {
    let mut v = serde_json::to_value(value).map_err(|e| CliError::Config(format!("serialization: {e}")))?;
    round_json(&mut v);
    writeln!(out, "{v}")?;
    Ok(())
}

/// The `--output` file, or stdout.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Config(format!("invalid --output: {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig(35.0 / 24.0), "1.45833333333");
        assert_eq!(fmt_sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(-3.0), "-3");
        assert_eq!(fmt_sig(1.6104272727272721e-6), "1.61042727273e-6");
        assert_eq!(fmt_sig(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_sig(9.9999999999999e-1), "1");
        assert_eq!(fmt_sig(0.0), "0");
    }

    #[test]
    fn rounding_survives_round_trip() {
        for v in [1.0 / 3.0, 2.5e-9, 12345.678901234, -7.0 / 11.0] {
            assert_eq!(fmt_sig(round_sig(v)), fmt_sig(v));
        }
    }

    #[test]
    fn rationals_always_show_denominator() {
        let q = BigRational::new(35.into(), 24.into());
        assert_eq!(fmt_rational(&q), "35/24");
        assert_eq!(fmt_rational(&BigRational::from_integer(1.into())), "1/1");
    }

    #[test]
    fn csv_and_json_rows() {
        let mut t = Table::new(&["x", "label", "ok", "missing"]);
        t.push(vec![0.25.into(), "a,b".into(), true.into(), Cell::Empty]);
        let mut csv_out = Vec::new();
        t.write(Format::Csv, &mut csv_out).unwrap();
        assert_eq!(String::from_utf8(csv_out).unwrap(), "x,label,ok,missing\n0.25,\"a,b\",true,\n");
        let mut json_out = Vec::new();
        t.write(Format::Json, &mut json_out).unwrap();
        assert_eq!(
            String::from_utf8(json_out).unwrap(),
            "{\"x\":0.25,\"label\":\"a,b\",\"ok\":true,\"missing\":null}\n"
        );
    }

    #[test]
    fn json_rounding_leaves_integers() {
        let mut v = serde_json::json!({"seed": 18446744073709551615u64, "e": [0.1 + 0.2]});
        round_json(&mut v);
        assert_eq!(v.to_string(), "{\"seed\":18446744073709551615,\"e\":[0.3]}");
    }
}
