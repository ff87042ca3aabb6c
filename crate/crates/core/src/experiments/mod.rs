//! Reproducible experiment pipelines and their machine-readable output.
//!
//! Every pipeline produces [`SweepRow`]s; [`emit`] writes them as CSV or JSON
//! with a fixed column order, fixed row order, and 12-significant-digit
//! number rendering, so equal inputs give byte-identical files.

mod sweeps;
mod table1;

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::error::Error;
use crate::protocols::Protocol;

pub use sweeps::{
    default_noise_grid, sweep_c0, sweep_noise, ClaimCheck, Fig3Report, Fig4Report, NoiseSweep, NoiseSweepConfig,
    OracleCheck, FIG3_T_VALUES,
};
pub use table1::{gen_table1, CellReport, Table1Report, TableSection, EXPECTED_TABLE};

pub const CSV_HEADER: &str = "protocol,M,N,t,B,c,trials,seed,value,stderr";

/// One output record; only the fields relevant to the experiment are set.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub protocol: Protocol,
    pub m: usize,
    pub n: Option<usize>,
    pub t: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub value: f64,
    pub stderr: Option<f64>,
}

impl SweepRow {
    pub fn new(protocol: Protocol, m: usize, value: f64) -> Self {
        Self {
            protocol,
            m,
            n: None,
            t: None,
            b: None,
            c: None,
            trials: None,
            seed: None,
            value,
            stderr: None,
        }
    }

    fn sort_key_cmp(&self, other: &Self) -> Ordering {
        fn opt(a: Option<f64>, b: Option<f64>) -> Ordering {
            match (a, b) {
                (Some(x), Some(y)) => x.total_cmp(&y),
                (a, b) => a.is_some().cmp(&b.is_some()),
            }
        }
        self.protocol
            .cmp(&other.protocol)
            .then(self.m.cmp(&other.m))
            .then(self.n.cmp(&other.n))
            .then(opt(self.t, other.t))
            .then(opt(self.b, other.b))
            // exact-oracle rows (no trials) ahead of sampled rows at equal keys
            .then(self.trials.cmp(&other.trials))
            .then(opt(self.c, other.c))
            .then(self.seed.cmp(&other.seed))
    }
}

/// Sorts rows by `(protocol, M, N, t, B)` with deterministic tie-breaks.
pub fn sort_rows(rows: &mut [SweepRow]) {
    rows.sort_by(SweepRow::sort_key_cmp);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

/// Renders `x` with 12 significant digits in plain decimal notation,
/// trimming trailing zeros.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific rendering");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(digits);
    } else {
        let int_len = exp as usize + 1;
        if digits.len() <= int_len {
            out.push_str(digits);
            out.extend(std::iter::repeat_n('0', int_len - digits.len()));
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    }
    out
}

fn csv_field<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

/// CSV text with header, LF line endings.
pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.protocol,
            r.m,
            csv_field(r.n, |v| v.to_string()),
            csv_field(r.t, format_number),
            csv_field(r.b, format_number),
            csv_field(r.c, format_number),
            csv_field(r.trials, |v| v.to_string()),
            csv_field(r.seed, |v| v.to_string()),
            format_number(r.value),
            csv_field(r.stderr, format_number),
        );
    }
    out
}

fn json_number(x: f64) -> Value {
    let rounded: f64 = format_number(x).parse().expect("rendered number parses");
    serde_json::Number::from_f64(rounded)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// JSON array of row objects; absent fields are omitted.
pub fn to_json(rows: &[SweepRow]) -> String {
    let array: Vec<Value> = rows
        .iter()
        .map(|r| {
            let mut obj = Map::new();
            obj.insert("protocol".into(), Value::String(r.protocol.to_string()));
            obj.insert("M".into(), r.m.into());
            if let Some(n) = r.n {
                obj.insert("N".into(), n.into());
            }
            for (key, v) in [("t", r.t), ("B", r.b), ("c", r.c)] {
                if let Some(v) = v {
                    obj.insert(key.into(), json_number(v));
                }
            }
            if let Some(trials) = r.trials {
                obj.insert("trials".into(), trials.into());
            }
            if let Some(seed) = r.seed {
                obj.insert("seed".into(), seed.into());
            }
            obj.insert("value".into(), json_number(r.value));
            if let Some(se) = r.stderr {
                obj.insert("stderr".into(), json_number(se));
            }
            Value::Object(obj)
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&Value::Array(array)).expect("json serialization");
    text.push('\n');
    text
}

/// Sorts `rows` and renders them in `format`.
pub fn render(rows: &[SweepRow], format: Format) -> String {
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    match format {
        Format::Csv => to_csv(&sorted),
        Format::Json => to_json(&sorted),
    }
}

/// Writes `rows` to `path`.
pub fn emit(rows: &[SweepRow], format: Format, path: &Path) -> io::Result<()> {
    fs::write(path, render(rows, format))
}
