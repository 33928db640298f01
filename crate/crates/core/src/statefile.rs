//! Sparse text format for pure states.
//!
//! ```text
//! # comments and blank lines are ignored
//! d 2 n 3
//! 0 7.0710678118654746e-1 0.0000000000000000e0
//! 7 7.0710678118654746e-1 0.0000000000000000e0
//! ```
//!
//! The header gives the local dimension and site count; every further line
//! is `index re im` for one nonzero amplitude, indices strictly increasing.
//! Values are written with 17 significant digits, which round-trips `f64`
//! exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{PmeError, Result};
use crate::matrix::{ComplexMatrix, ZERO};
use crate::statevec::{register_len, PureState};

/// Files may be hand-authored, so normalization is only checked this loosely.
pub const FILE_NORM_TOL: f64 = 1e-8;

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(PmeError::Parse {
        line,
        message: message.into(),
    })
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_num<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    match tok.map(str::parse) {
        Some(Ok(v)) => Ok(v),
        Some(Err(_)) => parse_err(line, format!("cannot parse {what} {:?}", tok.unwrap())),
        None => parse_err(line, format!("missing {what}")),
    }
}

pub fn format_state(s: &PureState) -> String {
    let mut out = String::new();
    writeln!(out, "d {} n {}", s.local_dim(), s.num_sites()).unwrap();
    for (k, z) in s.amplitudes().iter().enumerate() {
        if *z != ZERO {
            writeln!(out, "{k} {:.16e} {:.16e}", z.re, z.im).unwrap();
        }
    }
    out
}

pub fn parse_state(text: &str) -> Result<PureState> {
    let mut lines = content_lines(text);
    let Some((hline, header)) = lines.next() else {
        return parse_err(1, "empty state file");
    };
    let tok: Vec<&str> = header.split_whitespace().collect();
    if tok.len() != 4 || tok[0] != "d" || tok[2] != "n" {
        return parse_err(hline, "header must read `d <dim> n <sites>`");
    }
    let d: usize = parse_num(hline, Some(tok[1]), "dimension")?;
    let n: usize = parse_num(hline, Some(tok[3]), "site count")?;
    if d < 2 || n == 0 {
        return parse_err(hline, format!("invalid register d={d} n={n}"));
    }
    let len = register_len(n, d).or_else(|e| parse_err(hline, e.to_string()))?;

    let mut amps = vec![ZERO; len];
    let mut last: Option<usize> = None;
    for (ln, line) in lines {
        let mut it = line.split_whitespace();
        let index: usize = parse_num(ln, it.next(), "index")?;
        let re: f64 = parse_num(ln, it.next(), "real part")?;
        let im: f64 = parse_num(ln, it.next(), "imaginary part")?;
        if it.next().is_some() {
            return parse_err(ln, "trailing fields");
        }
        if index >= len {
            return parse_err(ln, format!("index {index} out of range (d^n = {len})"));
        }
        if last.is_some_and(|prev| index <= prev) {
            return parse_err(ln, format!("index {index} is not strictly increasing"));
        }
        if !re.is_finite() || !im.is_finite() {
            return parse_err(ln, "non-finite amplitude");
        }
        last = Some(index);
        amps[index] = Complex64::new(re, im);
    }
    let state = PureState::new(n, d, amps)?;
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > FILE_NORM_TOL {
        return parse_err(hline, format!("state is not normalized (norm² = {norm})"));
    }
    Ok(state)
}

pub fn read_state_file(path: impl AsRef<Path>) -> Result<PureState> {
    parse_state(&fs::read_to_string(path)?)
}

pub fn write_state_file(path: impl AsRef<Path>, s: &PureState) -> Result<()> {
    fs::write(path, format_state(s))?;
    Ok(())
}

/// Reads square complex matrices: one row per line, entries `re,im`
/// separated by whitespace, matrices separated by blank lines.
pub fn parse_matrices(text: &str) -> Result<Vec<ComplexMatrix>> {
    let mut out = Vec::new();
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    let mut first_line = 1;
    let mut flush = |rows: &mut Vec<Vec<Complex64>>, at: usize| -> Result<()> {
        if rows.is_empty() {
            return Ok(());
        }
        let m = ComplexMatrix::from_rows(rows).or_else(|e| parse_err(at, e.to_string()))?;
        if !m.is_square() {
            return parse_err(at, "matrix is not square");
        }
        out.push(m);
        rows.clear();
        Ok(())
    };
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            flush(&mut rows, first_line)?;
            continue;
        }
        if rows.is_empty() {
            first_line = ln;
        }
        let row = line
            .split_whitespace()
            .map(|entry| {
                let mut parts = entry.split(',');
                let re: f64 = parse_num(ln, parts.next(), "real part")?;
                let im: f64 = parse_num(ln, parts.next(), "imaginary part")?;
                Ok(Complex64::new(re, im))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    flush(&mut rows, first_line)?;
    Ok(out)
}
