//! CSV and JSON serialisation of sweep results. Floats are written with 17
//! significant digits so every value round-trips exactly.

use super::config::Format;
use super::sweep::{SweepRecord, SweepResult};
use super::HarnessError;
use serde::Serialize;
use std::io::Write;

pub const COLUMNS: [&str; 23] = [
    "index",
    "series",
    "x",
    "t",
    "m_gamma",
    "lambda",
    "sigma",
    "sigma_b_nm",
    "j_z_mean",
    "mismatch",
    "variance",
    "std",
    "i_m1",
    "i_0",
    "i_p1",
    "channel_error",
    "pair_conserving",
    "captured_mass",
    "off_line_mass",
    "witness",
    "warnings",
    "error",
    "wall_time_s",
];

#[derive(Debug, Clone, Copy, Default)]
pub struct EmitOptions {
    /// Keep per-point wall times. Off by default so output is reproducible byte for byte.
    pub timing: bool,
}

fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn row(r: &SweepRecord) -> Vec<String> {
    vec![
        r.index.to_string(),
        fmt_opt(r.series),
        fmt_f64(r.x),
        fmt_f64(r.t),
        r.m_gamma.to_string(),
        r.lambda.to_string(),
        fmt_f64(r.sigma),
        fmt_f64(r.sigma_b_nm),
        fmt_opt(r.j_z_mean),
        fmt_opt(r.mismatch),
        fmt_opt(r.variance),
        fmt_opt(r.std),
        fmt_opt(r.i_m1),
        fmt_opt(r.i_0),
        fmt_opt(r.i_p1),
        fmt_opt(r.channel_error),
        fmt_opt(r.pair_conserving),
        fmt_opt(r.captured_mass),
        fmt_opt(r.off_line_mass),
        fmt_opt(r.witness),
        r.warnings.join("; "),
        r.error.clone().unwrap_or_default(),
        fmt_f64(r.wall_time_s),
    ]
}

fn prepared(result: &SweepResult, opts: EmitOptions) -> SweepResult {
    if opts.timing {
        result.clone()
    } else {
        result.without_timing()
    }
}

pub fn to_csv(result: &SweepResult, opts: EmitOptions) -> String {
    let result = prepared(result, opts);
    let mut out = String::new();
    out.push_str(&format!("# config_hash: {}\n", result.config_hash));
    out.push_str(&format!("# preset: {}\n", result.preset));
    out.push_str(&format!("# version: {}\n", result.version));
    out.push_str(&format!("# axis: {}\n", result.axis));
    out.push_str(&format!("# series: {}\n", result.series.as_deref().unwrap_or("")));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS).expect("in-memory write");
    for r in &result.records {
        w.write_record(row(r)).expect("in-memory write");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
    out
}

fn parse_err(m: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(format!("malformed CSV: {m}"))
}

pub fn from_csv(text: &str) -> Result<SweepResult, HarnessError> {
    let mut meta = std::collections::BTreeMap::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        if let Some((k, v)) = line[1..].split_once(':') {
            meta.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    let get = |k: &str| meta.get(k).cloned().ok_or_else(|| parse_err(format!("missing header `{k}`")));
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(parse_err)?;
        let f = |i: usize| -> Result<f64, HarnessError> { rec[i].parse().map_err(parse_err) };
        let o = |i: usize| -> Result<Option<f64>, HarnessError> {
            if rec[i].is_empty() {
                Ok(None)
            } else {
                rec[i].parse().map(Some).map_err(parse_err)
            }
        };
        records.push(SweepRecord {
            index: rec[0].parse().map_err(parse_err)?,
            series: o(1)?,
            x: f(2)?,
            t: f(3)?,
            m_gamma: rec[4].parse().map_err(parse_err)?,
            lambda: rec[5].parse().map_err(parse_err)?,
            sigma: f(6)?,
            sigma_b_nm: f(7)?,
            j_z_mean: o(8)?,
            mismatch: o(9)?,
            variance: o(10)?,
            std: o(11)?,
            i_m1: o(12)?,
            i_0: o(13)?,
            i_p1: o(14)?,
            channel_error: o(15)?,
            pair_conserving: o(16)?,
            captured_mass: o(17)?,
            off_line_mass: o(18)?,
            witness: o(19)?,
            warnings: if rec[20].is_empty() { Vec::new() } else { rec[20].split("; ").map(String::from).collect() },
            error: if rec[21].is_empty() { None } else { Some(rec[21].to_string()) },
            wall_time_s: f(22)?,
        });
    }
    let series = get("series")?;
    Ok(SweepResult {
        config_hash: get("config_hash")?,
        preset: get("preset")?,
        version: get("version")?,
        axis: get("axis")?,
        series: if series.is_empty() { None } else { Some(series) },
        records,
    })
}

/// JSON formatter writing every float with 17 significant digits.
struct SeventeenDigits;

impl serde_json::ser::Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

pub fn to_json(result: &SweepResult, opts: EmitOptions) -> String {
    let result = prepared(result, opts);
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits);
    result.serialize(&mut ser).expect("in-memory write");
    buf.push(b'\n');
    String::from_utf8(buf).expect("utf-8")
}

pub fn render(result: &SweepResult, format: Format, opts: EmitOptions) -> String {
    match format {
        Format::Csv => to_csv(result, opts),
        Format::Json => to_json(result, opts),
    }
}

/// Writes to `path`, or standard output when `path` is `None`.
pub fn emit(result: &SweepResult, format: Format, path: Option<&std::path::Path>, opts: EmitOptions) -> Result<(), HarnessError> {
    let text = render(result, format, opts);
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| HarnessError::Io { path: p.display().to_string(), source: e }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| HarnessError::Io { path: "<stdout>".into(), source: e }),
    }
}
