//! Plain integer-grid text format: a `rows cols` header line followed by the
//! entries in row-major order, whitespace separated. A file may hold several
//! grids back to back.

use std::fmt::Write as _;

use super::matrix::{Int, IntMatrix};
use crate::error::{Error, Result};

pub fn write_grid(m: &IntMatrix) -> String {
    let mut out = format!("{} {}\n", m.nrows(), m.ncols());
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    out
}

pub fn write_grids(ms: &[IntMatrix]) -> String {
    ms.iter().map(write_grid).collect()
}

pub fn parse_grids(text: &str) -> Result<Vec<IntMatrix>> {
    let mut tokens = text.split_whitespace().peekable();
    let mut out = Vec::new();
    let err = |msg: String| Error::Parse { input: "<grid>".into(), position: 0, message: msg };
    while tokens.peek().is_some() {
        let mut dim = || -> Result<usize> {
            let t = tokens.next().ok_or_else(|| err("truncated header".into()))?;
            t.parse().map_err(|_| err(format!("bad dimension {t:?}")))
        };
        let (r, c) = (dim()?, dim()?);
        let mut rows = Vec::with_capacity(r);
        for i in 0..r {
            let mut row = Vec::with_capacity(c);
            for j in 0..c {
                let t = tokens.next().ok_or_else(|| err(format!("missing entry ({i}, {j})")))?;
                row.push(t.parse::<Int>().map_err(|_| err(format!("bad entry {t:?} at ({i}, {j})")))?);
            }
            rows.push(row);
        }
        out.push(IntMatrix::from_rows(c, rows));
    }
    Ok(out)
}

pub fn parse_grid(text: &str) -> Result<IntMatrix> {
    let mut v = parse_grids(text)?;
    match v.len() {
        1 => Ok(v.pop().unwrap()),
        n => Err(Error::Parse { input: "<grid>".into(), position: 0, message: format!("expected one grid, found {n}") }),
    }
}
