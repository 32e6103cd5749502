//! CSV formats written and read by the CLI.
//!
//! | file    | header                                 |
//! |---------|----------------------------------------|
//! | samples | `index,re,im`                          |
//! | matrix  | `row,col,re,im` (row-major order)      |
//! | report  | `check_name,value,tolerance,pass`      |
//! | ber     | `system,snr_db,bits,errors,ber,seed`   |
//!
//! Floats are written in scientific notation with 17 significant digits,
//! which round-trips every `f64`. Negative zero is written as zero so that
//! equal values always produce equal bytes.

use std::io::{Read, Write};

use mcwave_core::linksim::BerResult;
use mcwave_core::spectral::Check;
use mcwave_core::{Complex64, ComplexMatrix};
use serde::Deserialize;

#[derive(Debug)]
pub enum FormatError {
    Csv(csv::Error),
    Invalid(String),
}

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormatError::Csv(e) => write!(f, "{e}"),
            FormatError::Invalid(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for FormatError {}

impl From<csv::Error> for FormatError {
    fn from(e: csv::Error) -> Self {
        FormatError::Csv(e)
    }
}

pub fn format_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn check_header<R: Read>(reader: &mut csv::Reader<R>, expected: &[&str]) -> Result<(), FormatError> {
    let header = reader.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(FormatError::Invalid(format!(
            "expected header `{}`, found `{}`",
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

pub fn write_samples<W: Write>(out: W, samples: &[Complex64]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "re", "im"])?;
    for (i, z) in samples.iter().enumerate() {
        w.write_record([i.to_string(), format_float(z.re), format_float(z.im)])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_samples<R: Read>(input: R) -> Result<Vec<Complex64>, FormatError> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &["index", "re", "im"])?;
    let mut out = Vec::new();
    for (expected, row) in r.deserialize::<(usize, f64, f64)>().enumerate() {
        let (index, re, im) = row?;
        if index != expected {
            return Err(FormatError::Invalid(format!(
                "sample rows must be in order: expected index {expected}, found {index}"
            )));
        }
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

pub fn write_matrix<W: Write>(out: W, m: &ComplexMatrix) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["row", "col", "re", "im"])?;
    for r in 0..m.rows() {
        for (c, z) in m.row(r).iter().enumerate() {
            w.write_record([r.to_string(), c.to_string(), format_float(z.re), format_float(z.im)])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_matrix<R: Read>(input: R) -> Result<ComplexMatrix, FormatError> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &["row", "col", "re", "im"])?;
    let mut entries = Vec::new();
    let (mut rows, mut cols) = (0usize, 0usize);
    for row in r.deserialize::<(usize, usize, f64, f64)>() {
        let (i, j, re, im) = row?;
        rows = rows.max(i + 1);
        cols = cols.max(j + 1);
        entries.push((i, j, Complex64::new(re, im)));
    }
    if entries.len() != rows * cols {
        return Err(FormatError::Invalid(format!(
            "{} entries do not fill a {rows}x{cols} matrix",
            entries.len()
        )));
    }
    let mut data = vec![Complex64::new(0.0, 0.0); rows * cols];
    for (i, j, z) in entries {
        data[i * cols + j] = z;
    }
    ComplexMatrix::new(rows, cols, data).map_err(|e| FormatError::Invalid(e.to_string()))
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ReportRow {
    pub check_name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn write_report<W: Write>(out: W, checks: &[Check]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["check_name", "value", "tolerance", "pass"])?;
    for c in checks {
        w.write_record([
            c.name.to_string(),
            format_float(c.value),
            format_float(c.limit),
            c.passes().to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_report<R: Read>(input: R) -> Result<Vec<ReportRow>, FormatError> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &["check_name", "value", "tolerance", "pass"])?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct BerRow {
    pub system: String,
    pub snr_db: f64,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    pub seed: u64,
}

pub fn write_ber<W: Write>(out: W, results: &[BerResult]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["system", "snr_db", "bits", "errors", "ber", "seed"])?;
    for r in results {
        w.write_record([
            r.system.to_string(),
            format_float(r.snr_db),
            r.bits_sent.to_string(),
            r.bit_errors.to_string(),
            format_float(r.ber),
            r.seed.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_ber<R: Read>(input: R) -> Result<Vec<BerRow>, FormatError> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &["system", "snr_db", "bits", "errors", "ber", "seed"])?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}
