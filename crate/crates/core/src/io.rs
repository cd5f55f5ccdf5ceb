//! Text formats for matrices and weight vectors.
//!
//! Matrix CSV holds one row per line with entries written `re`, `re+imi` or
//! `re-imi`. Matrix JSON is `{"rows": r, "cols": c, "data": [[re, im], …]}`
//! in row-major order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::CMatrix;
use crate::dynamics::MixtureWeights;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let data = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| (i, j))).map(|(i, j)| [m[(i, j)].re, m[(i, j)].im]).collect();
        MatrixJson { rows: m.nrows(), cols: m.ncols(), data }
    }
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.data.len() != j.rows * j.cols {
            return Err(Error::LengthMismatch { expected: j.rows * j.cols, got: j.data.len() });
        }
        Ok(CMatrix::from_row_iterator(j.rows, j.cols, j.data.iter().map(|&[re, im]| Complex64::new(re, im))))
    }
}

pub fn matrix_to_json(m: &CMatrix) -> String {
    serde_json::to_string(&MatrixJson::from(m)).expect("plain numbers serialize")
}

pub fn matrix_from_json(s: &str) -> Result<CMatrix> {
    let j: MatrixJson = serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("matrix JSON: {e}")))?;
    j.try_into()
}

pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses `a`, `bi`, `a+bi` or `a-bi`, including exponents such as `1e-3-2e-4i`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse `{s}` as a complex number"));
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // The split is the last sign that does not follow an exponent marker.
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (body[..k].parse::<f64>().map_err(|_| bad())?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

pub fn matrix_to_csv(m: &CMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_complex(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Blank lines and lines starting with `#` are skipped.
pub fn matrix_from_csv(s: &str) -> Result<CMatrix> {
    let rows: Vec<Vec<Complex64>> = s
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').map(parse_complex).collect())
        .collect::<Result<_>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if let Some(r) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::LengthMismatch { expected: cols, got: r.len() });
    }
    Ok(CMatrix::from_row_iterator(rows.len(), cols, rows.into_iter().flatten()))
}

/// Comma-separated reals, e.g. `0,1.5,2`.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("cannot parse `{x}` as a number"))))
        .collect()
}

/// Accepts a JSON array or a comma-separated list.
pub fn parse_weights(s: &str) -> Result<MixtureWeights> {
    let s = s.trim();
    let v = if s.starts_with('[') {
        serde_json::from_str(s).map_err(|e| Error::InvalidWeights(format!("weights JSON: {e}")))?
    } else {
        parse_list(s)?
    };
    MixtureWeights::new(v)
}
