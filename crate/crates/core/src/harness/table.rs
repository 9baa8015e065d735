use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use super::sweep::SweepRecord;
use crate::{Error, Result};

pub const SWEEP_HEADER: &str =
    "eps,k2_re,k2_im,lambda_pred_re,lambda_pred_im,lambda_num_re,lambda_num_im,rel_err,remainder_ratio,verdict,converged";

/// 17 significant digits in scientific notation; `-0` prints as `0`.
pub fn fmt_f64(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// A CSV table with a fixed header, written with LF endings and a trailing newline.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// One cell of a [`Table`] row.
#[derive(Debug, Clone, Copy)]
pub enum Cell<'a> {
    Real(f64),
    Complex(Complex64),
    OptReal(Option<f64>),
    OptComplex(Option<Complex64>),
    Int(usize),
    Text(&'a str),
    Bool(bool),
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row; complex cells expand into two columns.
    pub fn push(&mut self, cells: &[Cell<'_>]) {
        let mut row = Vec::with_capacity(self.header.len());
        for cell in cells {
            match *cell {
                Cell::Real(x) | Cell::OptReal(Some(x)) => row.push(fmt_f64(x)),
                Cell::OptReal(None) => row.push(String::new()),
                Cell::Complex(z) | Cell::OptComplex(Some(z)) => {
                    row.push(fmt_f64(z.re));
                    row.push(fmt_f64(z.im));
                }
                Cell::OptComplex(None) => {
                    row.push(String::new());
                    row.push(String::new());
                }
                Cell::Int(i) => row.push(i.to_string()),
                Cell::Text(s) => row.push(s.to_string()),
                Cell::Bool(b) => row.push(b.to_string()),
            }
        }
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

pub fn sweep_table(records: &[SweepRecord]) -> Table {
    let mut t = Table::new(&SWEEP_HEADER.split(',').collect::<Vec<_>>());
    for r in records {
        let verdict = r.verdict.to_string();
        t.push(&[
            Cell::Real(r.eps),
            Cell::Complex(r.k2),
            Cell::Complex(r.lambda_pred),
            Cell::OptComplex(r.lambda_num),
            Cell::OptReal(r.rel_err),
            Cell::OptReal(r.remainder_ratio),
            Cell::Text(&verdict),
            Cell::Bool(r.converged),
        ]);
    }
    t
}

/// Where command output goes.
#[derive(Debug, Clone, Copy)]
pub enum Destination<'a> {
    Stdout,
    File(&'a Path),
}

/// Writes `bytes` to `dest`; I/O failures name the destination.
pub fn write_output(bytes: &[u8], dest: Destination<'_>) -> Result<()> {
    match dest {
        Destination::Stdout => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })
        }
        Destination::File(path) => std::fs::write(path, bytes).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

/// Sweep rows as CSV, written to `dest`.
pub fn emit_csv(records: &[SweepRecord], dest: Destination<'_>) -> Result<()> {
    write_output(sweep_table(records).render().as_bytes(), dest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::Existence;

    fn absent_record() -> SweepRecord {
        SweepRecord {
            eps: 0.1,
            k2: Complex64::new(-0.1, 0.0),
            lambda_pred: Complex64::new(-1e-6, 0.0),
            lambda_num: None,
            rel_err: None,
            remainder_ratio: None,
            verdict: Existence::Absent,
            converged: true,
            diagnostics: String::new(),
        }
    }

    #[test]
    fn empty_is_header_only() {
        assert_eq!(sweep_table(&[]).render(), format!("{SWEEP_HEADER}\n"));
    }

    #[test]
    fn absent_row_has_empty_fields() {
        let s = sweep_table(&[absent_record()]).render();
        let row = s.lines().nth(1).unwrap();
        assert_eq!(
            row,
            "1.0000000000000001e-1,-1.0000000000000001e-1,0.0000000000000000e0,\
             -9.9999999999999995e-7,0.0000000000000000e0,,,,,Absent,true"
        );
        assert!(s.ends_with('\n') && !s.contains('\r'));
        assert_eq!(row.split(',').count(), SWEEP_HEADER.split(',').count());
    }

    #[test]
    fn file_errors_name_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("missing").join("out.csv");
        let err = emit_csv(&[], Destination::File(&bad)).unwrap_err();
        assert!(err.to_string().contains("missing"));
    }
}
