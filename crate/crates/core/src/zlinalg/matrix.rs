use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;

/// Dense matrix of arbitrary-precision integers, stored row by row.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    nrows: usize,
    ncols: usize,
    pub(crate) data: Vec<Vec<Int>>,
}

impl IntMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        IntMatrix { nrows, ncols, data: vec![vec![Int::zero(); ncols]; nrows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Int::one();
        }
        m
    }

    pub fn from_rows(ncols: usize, rows: Vec<Vec<Int>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        IntMatrix { nrows: rows.len(), ncols, data: rows }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(ncols, rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect())
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(nrows: usize, cols: &[Vec<Int>]) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), nrows, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m.data[i][j] = x.clone();
            }
        }
        m
    }

    pub fn from_i64_columns(nrows: usize, cols: &[Vec<i64>]) -> Self {
        let cols: Vec<Vec<Int>> = cols.iter().map(|c| c.iter().map(|&x| Int::from(x)).collect()).collect();
        Self::from_columns(nrows, &cols)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i]
    }

    pub fn rows(&self) -> &[Vec<Int>] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Int> {
        self.data.iter().map(|r| r[j].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Int>> {
        (0..self.ncols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t.data[j][i] = self.data[i][j].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(Zero::is_zero))
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut out = Self::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for (k, a) in self.data[i].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in other.data[k].iter().enumerate() {
                    if !b.is_zero() {
                        out.data[i][j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(v.len(), self.ncols);
        self.data
            .iter()
            .map(|r| {
                r.iter().zip(v).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.shape(), other.shape());
        let mut out = self.clone();
        for (r, o) in out.data.iter_mut().zip(&other.data) {
            for (x, y) in r.iter_mut().zip(o) {
                *x -= y;
            }
        }
        out
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.nrows, other.nrows);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.iter().chain(b).cloned().collect())
            .collect();
        IntMatrix { nrows: self.nrows, ncols: self.ncols + other.ncols, data }
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.ncols, other.ncols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix { nrows: self.nrows + other.nrows, ncols: self.ncols, data }
    }

    pub fn select_columns(&self, cols: &[usize]) -> IntMatrix {
        let data = self.data.iter().map(|r| cols.iter().map(|&j| r[j].clone()).collect()).collect();
        IntMatrix { nrows: self.nrows, ncols: cols.len(), data }
    }

    pub fn select_rows(&self, rows: &[usize]) -> IntMatrix {
        IntMatrix { nrows: rows.len(), ncols: self.ncols, data: rows.iter().map(|&i| self.data[i].clone()).collect() }
    }

    /// Kronecker product.
    pub fn kron(&self, other: &IntMatrix) -> IntMatrix {
        let (r1, c1) = self.shape();
        let (r2, c2) = other.shape();
        let mut out = Self::zeros(r1 * r2, c1 * c2);
        for i in 0..r1 {
            for j in 0..c1 {
                let a = &self.data[i][j];
                if a.is_zero() {
                    continue;
                }
                for k in 0..r2 {
                    for l in 0..c2 {
                        let b = &other.data[k][l];
                        if !b.is_zero() {
                            out.data[i * r2 + k][j * c2 + l] = a * b;
                        }
                    }
                }
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<Int> {
        if self.nrows != self.ncols {
            return Err(Error::Dimension(format!("determinant of non-square {}x{}", self.nrows, self.ncols)));
        }
        let n = self.nrows;
        if n == 0 {
            return Ok(Int::one());
        }
        let mut a = self.data.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return Ok(Int::zero());
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = Int::zero();
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    pub fn is_unimodular(&self) -> bool {
        self.nrows == self.ncols && self.determinant().map(|d| d.abs().is_one()).unwrap_or(false)
    }

    /// Sum of `(i+1)*(j+1)*entry` reduced mod 2^61-1; a cheap fingerprint for CLI output.
    pub fn checksum(&self) -> u64 {
        const P: i128 = (1i128 << 61) - 1;
        let mut acc: i128 = 0;
        for (i, r) in self.data.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let xm: BigInt = x % BigInt::from(P);
                let xm: i128 = i128::try_from(&xm).unwrap_or(0);
                let w = ((i as i128 + 1) * (j as i128 + 1)) % P;
                acc = (acc + (xm.rem_euclid(P) * w) % P) % P;
            }
        }
        acc as u64
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = Int;

    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i][j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i][j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.nrows, self.ncols)?;
        for r in &self.data {
            let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

pub fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}
