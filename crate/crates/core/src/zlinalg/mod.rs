//! Exact integer linear algebra.

mod grid;
mod invariants;
mod lattice;
mod matrix;
mod normal_form;

pub use grid::{parse_grid, parse_grids, write_grid, write_grids};
pub use invariants::{cokernel_invariants, AbelianGroupInvariants};
pub use lattice::{combine, image_sum, intersection, kernel_basis, quotient_invariants, saturation, Lattice};
pub use matrix::{ints, Int, IntMatrix};
pub use normal_form::{echelon, invariant_factors, rank, smith_normal_form, Echelon, Smith};
