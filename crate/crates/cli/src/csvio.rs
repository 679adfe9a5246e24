//! CSV workloads and outputs.
//!
//! Samples are sign-magnitude: `sign` is `+`/`-` (also `1`/`-1`) and the
//! magnitude is unsigned. Rows are numbered by `k` from 0 with no gaps.
//!
//! * FIR samples: `k,sign,magnitude`
//! * FFT inputs and bins: `k,re_sign,re_mag,im_sign,im_mag`, four rows per
//!   vector
//! * operand steps: `a0,b0[,a1,b1]`, one row per step
//! * voltage drive: any header with a `v` column

use std::path::Path;
use std::str::FromStr;

use csv::StringRecord;
use mcmul::apps::{ComplexSample, FixedSample, DATAPATH_BITS};

use crate::CliError;

struct Table {
    path: String,
    headers: StringRecord,
    rows: Vec<(u64, StringRecord)>,
}

impl Table {
    fn read(path: &Path) -> Result<Self, CliError> {
        let shown = path.display().to_string();
        let bad = |e: csv::Error| CliError::Validation(format!("{shown}: {e}"));
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(bad)?;
        let headers = rdr.headers().map_err(bad)?.clone();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(bad)?;
            let line = rec.position().map_or(0, |p| p.line());
            rows.push((line, rec));
        }
        Ok(Table {
            path: shown,
            headers,
            rows,
        })
    }

    fn column(&self, name: &str) -> Result<usize, CliError> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Validation(format!("{}: missing column `{name}`", self.path)))
    }

    fn expect_columns(&self, names: &[&str]) -> Result<Vec<usize>, CliError> {
        names.iter().map(|n| self.column(n)).collect()
    }

    fn err(&self, line: u64, msg: impl std::fmt::Display) -> CliError {
        CliError::Validation(format!("{}:{line}: {msg}", self.path))
    }

    fn field<T: FromStr>(&self, line: u64, rec: &StringRecord, col: usize) -> Result<T, CliError> {
        let text = rec.get(col).unwrap_or("");
        text.parse()
            .map_err(|_| self.err(line, format_args!("column `{}`: cannot parse `{text}`", &self.headers[col])))
    }

    fn sign(&self, line: u64, rec: &StringRecord, col: usize) -> Result<bool, CliError> {
        match rec.get(col).unwrap_or("") {
            "+" | "1" | "+1" => Ok(false),
            "-" | "-1" => Ok(true),
            other => Err(self.err(
                line,
                format_args!("column `{}`: sign must be + or -, got `{other}`", &self.headers[col]),
            )),
        }
    }

    fn sample(&self, line: u64, rec: &StringRecord, sign: usize, mag: usize) -> Result<FixedSample, CliError> {
        let s = FixedSample::new(self.sign(line, rec, sign)?, self.field(line, rec, mag)?);
        s.check_width(DATAPATH_BITS as u32)
            .map_err(|e| self.err(line, format_args!("{}: {e}", e.name())))
    }

    fn check_index(&self, line: u64, rec: &StringRecord, col: usize, expected: usize) -> Result<(), CliError> {
        let k: usize = self.field(line, rec, col)?;
        if k == expected {
            Ok(())
        } else {
            Err(self.err(line, format_args!("expected k = {expected}, got {k}")))
        }
    }
}

pub fn read_fir_samples(path: &Path) -> Result<Vec<FixedSample>, CliError> {
    let t = Table::read(path)?;
    let c = t.expect_columns(&["k", "sign", "magnitude"])?;
    let mut out = Vec::with_capacity(t.rows.len());
    for (idx, (line, rec)) in t.rows.iter().enumerate() {
        t.check_index(*line, rec, c[0], idx)?;
        out.push(t.sample(*line, rec, c[1], c[2])?);
    }
    Ok(out)
}

pub fn read_fft_vectors(path: &Path) -> Result<Vec<[ComplexSample; 4]>, CliError> {
    let t = Table::read(path)?;
    let c = t.expect_columns(&["k", "re_sign", "re_mag", "im_sign", "im_mag"])?;
    if t.rows.len() % 4 != 0 {
        return Err(CliError::Validation(format!(
            "{}: {} rows is not a whole number of 4-point vectors",
            t.path,
            t.rows.len()
        )));
    }
    let mut points = Vec::with_capacity(t.rows.len());
    for (idx, (line, rec)) in t.rows.iter().enumerate() {
        t.check_index(*line, rec, c[0], idx)?;
        points.push(ComplexSample {
            re: t.sample(*line, rec, c[1], c[2])?,
            im: t.sample(*line, rec, c[3], c[4])?,
        });
    }
    Ok(points.chunks(4).map(|v| [v[0], v[1], v[2], v[3]]).collect())
}

pub fn read_operand_steps(path: &Path, segments: usize) -> Result<Vec<Vec<(u64, u64)>>, CliError> {
    let t = Table::read(path)?;
    let names: Vec<String> = (0..segments).flat_map(|s| [format!("a{s}"), format!("b{s}")]).collect();
    let cols = t.expect_columns(&names.iter().map(String::as_str).collect::<Vec<_>>())?;
    if t.headers.len() != cols.len() {
        return Err(CliError::Validation(format!(
            "{}: expected columns {}, got {}",
            t.path,
            names.join(","),
            t.headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut steps = Vec::with_capacity(t.rows.len());
    for (line, rec) in &t.rows {
        let mut pairs = Vec::with_capacity(segments);
        for pair in cols.chunks(2) {
            pairs.push((t.field(*line, rec, pair[0])?, t.field(*line, rec, pair[1])?));
        }
        steps.push(pairs);
    }
    Ok(steps)
}

pub fn read_waveform(path: &Path) -> Result<Vec<f64>, CliError> {
    let t = Table::read(path)?;
    let c = t.column("v")?;
    let mut out = Vec::with_capacity(t.rows.len());
    for (line, rec) in &t.rows {
        let v: f64 = t.field(*line, rec, c)?;
        if !v.is_finite() {
            return Err(t.err(*line, "voltage must be finite"));
        }
        out.push(v);
    }
    Ok(out)
}

fn sign(s: FixedSample) -> &'static str {
    if s.negative {
        "-"
    } else {
        "+"
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, CliError> {
    w.into_inner().map_err(|e| CliError::Internal(format!("csv: {e}")))
}

fn internal(e: csv::Error) -> CliError {
    CliError::Internal(format!("csv: {e}"))
}

pub fn write_fir_samples(samples: &[FixedSample]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "sign", "magnitude"]).map_err(internal)?;
    for (k, s) in samples.iter().enumerate() {
        w.write_record([k.to_string(), sign(*s).into(), s.magnitude.to_string()])
            .map_err(internal)?;
    }
    finish(w)
}

pub fn write_fft_vectors(vectors: &[[ComplexSample; 4]]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "re_sign", "re_mag", "im_sign", "im_mag"]).map_err(internal)?;
    for (k, c) in vectors.iter().flatten().enumerate() {
        w.write_record([
            k.to_string(),
            sign(c.re).into(),
            c.re.magnitude.to_string(),
            sign(c.im).into(),
            c.im.magnitude.to_string(),
        ])
        .map_err(internal)?;
    }
    finish(w)
}

/// Rows of plain strings under `header`.
pub fn write_rows(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(internal)?;
    for r in rows {
        w.write_record(r).map_err(internal)?;
    }
    finish(w)
}
