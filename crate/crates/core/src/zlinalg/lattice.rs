//! Sublattices of `Z^n` held as reduced Hermite bases.

use num_integer::Integer;
use num_traits::Zero;

use super::invariants::AbelianGroupInvariants;
use super::matrix::{Int, IntMatrix};
use super::normal_form::{echelon, invariant_factors, row_axpy};
use crate::error::{Error, Result};

/// Columns of the result form a basis of `{ v : M v = 0 }`.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let n = m.ncols();
    let e = echelon(&m.transpose(), true);
    let u = e.transform.expect("transform requested");
    let rows: Vec<Vec<Int>> = u.rows()[e.pivots.len()..].to_vec();
    let k = Lattice::from_rows(n, rows);
    k.basis().transpose()
}

/// A subgroup of `Z^dim`, stored as the nonzero rows of its reduced row HNF.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    basis: IntMatrix,
    pivots: Vec<usize>,
}

impl Lattice {
    pub fn zero(dim: usize) -> Self {
        Lattice { dim, basis: IntMatrix::zeros(0, dim), pivots: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        Lattice { dim, basis: IntMatrix::identity(dim), pivots: (0..dim).collect() }
    }

    /// Lattice spanned by the given row vectors.
    pub fn from_rows(dim: usize, rows: Vec<Vec<Int>>) -> Self {
        let e = echelon(&IntMatrix::from_rows(dim, rows), false);
        Lattice { dim, basis: e.hnf, pivots: e.pivots }
    }

    /// Lattice spanned by the columns of `m`.
    pub fn from_columns(m: &IntMatrix) -> Self {
        Self::from_rows(m.nrows(), m.transpose().rows().to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Basis vectors as rows, in reduced HNF.
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    /// Coordinates of `v` with respect to the HNF basis, or `None` if `v` is not in the lattice.
    pub fn coordinates(&self, v: &[Int]) -> Option<Vec<Int>> {
        assert_eq!(v.len(), self.dim, "vector length");
        let mut r = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for (i, &p) in self.pivots.iter().enumerate() {
            // Everything left of the pivot must already vanish.
            let row = self.basis.row(i);
            let (q, rem) = r[p].div_rem(&row[p]);
            if !rem.is_zero() {
                return None;
            }
            row_axpy(&mut r, row, &q, p);
            coords.push(q);
        }
        r.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.rows().iter().all(|r| self.contains(r))
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.dim, other.dim);
        let mut rows = self.basis.rows().to_vec();
        rows.extend(other.basis.rows().iter().cloned());
        Lattice::from_rows(self.dim, rows)
    }

    pub fn intersection(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.dim, other.dim);
        if self.is_zero() || other.is_zero() {
            return Lattice::zero(self.dim);
        }
        // x A = y B  <=>  (x, -y) lies in the left kernel of [A; B].
        let stacked = self.basis.vstack(&other.basis);
        let e = echelon(&stacked, true);
        let u = e.transform.expect("transform requested");
        let r = self.rank();
        let rows: Vec<Vec<Int>> = u.rows()[e.pivots.len()..]
            .iter()
            .map(|row| combine(&row[..r], &self.basis))
            .collect();
        Lattice::from_rows(self.dim, rows)
    }

    /// `(L ⊗ Q) ∩ Z^dim`.
    pub fn saturation(&self) -> Lattice {
        if self.is_zero() {
            return self.clone();
        }
        let orth = kernel_basis(&self.basis);
        if orth.ncols() == 0 {
            return Lattice::full(self.dim);
        }
        Lattice::from_columns(&kernel_basis(&orth.transpose()))
    }

    pub fn is_saturated(&self) -> bool {
        invariant_factors(&self.basis).iter().all(|d| d == &Int::from(1))
    }

    /// Invariants of `self / sub`.
    pub fn quotient_invariants(&self, sub: &Lattice) -> Result<AbelianGroupInvariants> {
        let mut coords = Vec::with_capacity(sub.rank());
        for (i, v) in sub.basis.rows().iter().enumerate() {
            match self.coordinates(v) {
                Some(c) => coords.push(c),
                None => {
                    return Err(Error::Containment(format!("generator {i} of the sublattice is not in the lattice")))
                }
            }
        }
        let m = IntMatrix::from_rows(self.rank(), coords);
        Ok(AbelianGroupInvariants::from_invariant_factors(self.rank(), &invariant_factors(&m)))
    }

    /// Image under the linear map `f` (acting on column vectors).
    pub fn image(&self, f: &IntMatrix) -> Lattice {
        assert_eq!(f.ncols(), self.dim);
        let rows = self.basis.rows().iter().map(|r| f.mul_vec(r)).collect();
        Lattice::from_rows(f.nrows(), rows)
    }

    /// `{ v in self : f v in target }`, with `f` acting on column vectors.
    pub fn preimage_within(&self, f: &IntMatrix, target: &Lattice) -> Lattice {
        assert_eq!(f.ncols(), self.dim);
        assert_eq!(f.nrows(), target.dim);
        if self.is_zero() {
            return self.clone();
        }
        // Rows x of self.basis mapped by f: solve x (B F^T) = y T.
        let images: Vec<Vec<Int>> = self.basis.rows().iter().map(|r| f.mul_vec(r)).collect();
        let img = IntMatrix::from_rows(target.dim, images);
        let stacked = img.vstack(&target.basis);
        let e = echelon(&stacked, true);
        let u = e.transform.expect("transform requested");
        let r = self.rank();
        let rows: Vec<Vec<Int>> = u.rows()[e.pivots.len()..]
            .iter()
            .map(|row| combine(&row[..r], &self.basis))
            .collect();
        Lattice::from_rows(self.dim, rows)
    }

    /// `{ v : f v in target }`.
    pub fn preimage(f: &IntMatrix, target: &Lattice) -> Lattice {
        Lattice::full(f.ncols()).preimage_within(f, target)
    }
}

/// `Σ x_i · basis_i`.
pub fn combine(x: &[Int], basis: &IntMatrix) -> Vec<Int> {
    let mut v = vec![Int::zero(); basis.ncols()];
    for (xi, b) in x.iter().zip(basis.rows()) {
        if xi.is_zero() {
            continue;
        }
        for (vj, bj) in v.iter_mut().zip(b) {
            if !bj.is_zero() {
                *vj += xi * bj;
            }
        }
    }
    v
}

/// Column span of `[a | b]`, as a column matrix in HNF.
pub fn image_sum(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    Lattice::from_columns(&a.hstack(b)).basis().transpose()
}

/// Intersection of the column spans of `a` and `b`.
pub fn intersection(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    Lattice::from_columns(a).intersection(&Lattice::from_columns(b)).basis().transpose()
}

/// Saturation of the column span of `a`.
pub fn saturation(a: &IntMatrix) -> IntMatrix {
    Lattice::from_columns(a).saturation().basis().transpose()
}

/// Invariants of `span(sup) / span(sub)`; fails if `sub` is not contained in `sup`.
pub fn quotient_invariants(sub: &IntMatrix, sup: &IntMatrix) -> Result<AbelianGroupInvariants> {
    if sub.nrows() != sup.nrows() {
        return Err(Error::Dimension(format!("ambient dimensions {} and {} differ", sub.nrows(), sup.nrows())));
    }
    Lattice::from_columns(sup).quotient_invariants(&Lattice::from_columns(sub))
}
