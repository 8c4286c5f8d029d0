//! Low-dimensional homology of finitely presented groups and of the fiber
//! product `F ×_Q F ≅ R ⋊ F`.
//!
//! Everything is reduced to integer lattices. `R_ab` carries the basis of the
//! Schreier generators, `D = [A_1 − I | ... | A_n − I]` is the boundary whose
//! cokernel is the coinvariant module `(R_ab)_F = R/[F,R]`, and `B` is the
//! exponent-sum map `R_ab → F_ab`.

use std::collections::{HashMap, HashSet};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::presentations::FinitePresentation;
use crate::schreier::SchreierData;
use crate::zlinalg::{cokernel_invariants, kernel_basis, AbelianGroupInvariants, Int, IntMatrix, Lattice};

/// A free abelian group with a linear action of a free group, one matrix per
/// generator.
#[derive(Clone, Debug)]
pub struct CoefficientModule {
    pub dimension: usize,
    pub action: Vec<IntMatrix>,
}

impl CoefficientModule {
    pub fn new(dimension: usize, action: Vec<IntMatrix>) -> Result<Self> {
        for (i, a) in action.iter().enumerate() {
            if a.shape() != (dimension, dimension) {
                return Err(Error::Dimension(format!("action matrix {i} is {:?}, expected {dimension}-square", a.shape())));
            }
        }
        Ok(CoefficientModule { dimension, action })
    }

    pub fn trivial(rank: usize, dimension: usize) -> Self {
        CoefficientModule { dimension, action: vec![IntMatrix::identity(dimension); rank] }
    }

    pub fn relation_module(sd: &SchreierData) -> Self {
        CoefficientModule { dimension: sd.basis_count(), action: sd.action_on_rab() }
    }

    /// `[A_1 − I | ... | A_n − I]`.
    pub fn boundary(&self) -> IntMatrix {
        let id = IntMatrix::identity(self.dimension);
        let mut out = IntMatrix::zeros(self.dimension, 0);
        for a in &self.action {
            out = out.hstack(&a.sub(&id));
        }
        out
    }

    /// `H_0(F; M)`.
    pub fn coinvariants(&self) -> AbelianGroupInvariants {
        cokernel_invariants(&self.boundary())
    }
}

/// `H_1` of the presented group.
pub fn h1(p: &FinitePresentation) -> AbelianGroupInvariants {
    cokernel_invariants(&p.exponent_matrix())
}

/// `H_2(Q)` for the finite quotient realized by `sd`, as the kernel of
/// `(R_ab)_F → F_ab`, i.e. `ker B / im D`.
pub fn schur_multiplier_finite(sd: &SchreierData) -> Result<AbelianGroupInvariants> {
    let b = sd.inclusion_to_fab();
    let d = CoefficientModule::relation_module(sd).boundary();
    let ker_b = Lattice::from_columns(&kernel_basis(&b));
    ker_b.quotient_invariants(&Lattice::from_columns(&d))
}

pub fn is_superperfect(p: &FinitePresentation, sd: &SchreierData) -> Result<bool> {
    Ok(h1(p).is_trivial() && schur_multiplier_finite(sd)?.is_trivial())
}

/// `H_1(F; M)` for `F` free of the given rank: the kernel of
/// `M^rank → M, (m_i) ↦ Σ (A_i − I) m_i`. Returns the kernel basis (as
/// columns) and its invariants.
pub fn h1_free_with_coefficients(rank: usize, m: &CoefficientModule) -> Result<(IntMatrix, AbelianGroupInvariants)> {
    if m.action.len() != rank {
        return Err(Error::Dimension(format!("{} action matrices for a free group of rank {rank}", m.action.len())));
    }
    let k = kernel_basis(&m.boundary());
    let inv = AbelianGroupInvariants::free(k.ncols());
    Ok((k, inv))
}

/// `H_2(F ×_Q F) = H_1(F; R_ab)`.
#[derive(Clone, Debug)]
pub struct H2Fiber {
    /// Columns are a basis, in coordinates `(i, m) ↦ i·B + m`.
    pub kernel_basis: IntMatrix,
    pub invariants: AbelianGroupInvariants,
}

pub fn h2_fiber_product(sd: &SchreierData) -> Result<H2Fiber> {
    let (k, inv) = h1_free_with_coefficients(sd.base_rank(), &CoefficientModule::relation_module(sd))?;
    Ok(H2Fiber { kernel_basis: k, invariants: inv })
}

/// Exactness data for
/// `0 → H_2(Q) → H_1(F ×_Q F) → H_1(F × F) → H_1(Q) → 0`.
#[derive(Clone, Debug, Serialize)]
pub struct FiveTermReport {
    pub h2_q: AbelianGroupInvariants,
    pub h1_fqf: AbelianGroupInvariants,
    pub h1_ff: AbelianGroupInvariants,
    pub h1_q: AbelianGroupInvariants,
    /// Cokernel of `H_1(F ×_Q F) → H_1(F × F)`.
    pub cokernel: AbelianGroupInvariants,
    /// The arrows `H_2(Q) → H_1(F×_Q F)`, `H_1(F×_Q F) → H_1(F×F)`, `H_1(F×F) → H_1(Q)`
    /// on the ambient free modules.
    #[serde(skip)]
    pub maps: Vec<IntMatrix>,
    /// Exactness at `H_2(Q)`, `H_1(F×_Q F)`, `H_1(F×F)`, `H_1(Q)`.
    pub exact: [bool; 4],
    /// Each arrow sends relations to relations.
    pub well_defined: bool,
}

impl FiveTermReport {
    pub fn is_exact(&self) -> bool {
        self.well_defined && self.exact.iter().all(|&e| e)
    }
}

/// Builds the sequence on explicit lattices and checks every junction.
///
/// `H_1(F ×_Q F)` is `(R_ab)_F ⊕ F_ab` on `Z^{B+n}` with relations `im D ⊕ 0`;
/// `H_1(F × F)` is `Z^{2n}`; `H_1(Q)` is `Z^n` modulo the exponent sums of
/// the relators of `Q`, taken from the presentation rather than from `B`.
pub fn five_term_check(sd: &SchreierData) -> Result<FiveTermReport> {
    let n = sd.base_rank();
    let nb = sd.basis_count();
    let b = sd.inclusion_to_fab();
    let d = CoefficientModule::relation_module(sd).boundary();

    let im_d = Lattice::from_columns(&d);
    let ker_b = Lattice::from_columns(&kernel_basis(&b));
    let h2_q = ker_b.quotient_invariants(&im_d)?;

    // Relations of H_1(F ×_Q F) inside Z^{B+n}.
    let pad = |m: &IntMatrix, extra: usize| m.vstack(&IntMatrix::zeros(extra, m.ncols()));
    let rel1 = Lattice::from_columns(&pad(&d, n));
    let h1_fqf = cokernel_invariants(&pad(&d, n));

    // (c, v) ↦ (B c + v, v)
    let mut middle = IntMatrix::zeros(2 * n, nb + n);
    for i in 0..n {
        for m in 0..nb {
            middle[(i, m)] = b[(i, m)].clone();
        }
        middle[(i, nb + i)] = Int::one();
        middle[(n + i, nb + i)] = Int::one();
    }
    let h1_ff = AbelianGroupInvariants::free(2 * n);

    // (u, v) ↦ u − v
    let mut last = IntMatrix::zeros(n, 2 * n);
    for i in 0..n {
        last[(i, i)] = Int::one();
        last[(i, n + i)] = -Int::one();
    }
    let relq = Lattice::from_columns(&sd.table().presentation().exponent_matrix());
    let h1_q = Lattice::full(n).quotient_invariants(&relq)?;

    // H_2(Q) sits in Z^{B+n} as ker B ⊕ 0.
    let first = pad(&IntMatrix::identity(nb), n);
    let h2_in = ker_b.image(&first);

    // H_1(F × F) has no relations, so only the first two arrows need checking.
    let well_defined = ker_b.contains_lattice(&im_d) && rel1.image(&middle).is_zero();

    // Injectivity at H_2(Q): the preimage of rel1 inside ker B ⊕ 0 is exactly im D ⊕ 0.
    let exact0 = {
        let back = ker_b.preimage_within(&first, &rel1);
        back == im_d
    };
    // Exactness at H_1(F ×_Q F): image of H_2(Q) plus relations equals the kernel of `middle`.
    let exact1 = {
        let img = h2_in.sum(&rel1);
        let ker = Lattice::preimage(&middle, &Lattice::zero(2 * n)).sum(&rel1);
        img == ker
    };
    // Exactness at H_1(F × F): image of `middle` equals the preimage of relq under `last`.
    let im_middle = Lattice::full(nb + n).image(&middle);
    let exact2 = im_middle == Lattice::preimage(&last, &relq);
    // Surjectivity onto H_1(Q).
    let exact3 = Lattice::full(2 * n).image(&last).sum(&relq) == Lattice::full(n);

    let cokernel = Lattice::full(2 * n).quotient_invariants(&im_middle)?;

    let map0 = first;
    Ok(FiveTermReport {
        h2_q,
        h1_fqf,
        h1_ff,
        h1_q,
        cokernel,
        maps: vec![map0, middle, last],
        exact: [exact0, exact1, exact2, exact3],
        well_defined,
    })
}

/// The map `H_2(F ×_Q F) → H_2(F × F) = F_ab ⊗ F_ab` and its kernel.
#[derive(Clone, Debug)]
pub struct InducedH2Kernel {
    pub h2: AbelianGroupInvariants,
    /// Kernel of the induced map; free since `H_2(F ×_Q F)` is.
    pub kernel: AbelianGroupInvariants,
    /// Kernel basis columns in `H_1(F; R_ab)` coordinates `(i, m) ↦ i·B + m`.
    pub kernel_basis: IntMatrix,
    pub image: AbelianGroupInvariants,
    pub surjective: bool,
    /// Matrix of the induced map on the ambient modules (`n² × nB`).
    pub map: IntMatrix,
}

/// `(v_1, ..., v_n) ↦ (B v_1, ..., B v_n)`, the coefficient map `R_ab → F_ab`
/// applied blockwise.
pub fn induced_coefficient_map(sd: &SchreierData) -> IntMatrix {
    let n = sd.base_rank();
    let nb = sd.basis_count();
    let b = sd.inclusion_to_fab();
    let mut f = IntMatrix::zeros(n * n, n * nb);
    for i in 0..n {
        for r in 0..n {
            for m in 0..nb {
                f[(i * n + r, i * nb + m)] = b[(r, m)].clone();
            }
        }
    }
    f
}

pub fn induced_h2_kernel(sd: &SchreierData) -> Result<InducedH2Kernel> {
    let n = sd.base_rank();
    let h2 = h2_fiber_product(sd)?;
    let f = induced_coefficient_map(sd);
    // H_2(F × F) as the kernel for the trivial action on F_ab: all of Z^{n²}.
    let (target, _) = h1_free_with_coefficients(n, &CoefficientModule::trivial(n, n))?;
    let target = Lattice::from_columns(&target);
    let restricted = f.mul(&h2.kernel_basis)?;
    let image = Lattice::from_columns(&restricted);
    if !target.contains_lattice(&image) {
        return Err(Error::Containment("induced map leaves H_2(F × F)".into()));
    }
    let k_coords = kernel_basis(&restricted);
    let kernel_basis = h2.kernel_basis.mul(&k_coords)?;
    Ok(InducedH2Kernel {
        h2: h2.invariants,
        kernel: AbelianGroupInvariants::free(k_coords.ncols()),
        kernel_basis,
        surjective: image == target,
        image: AbelianGroupInvariants::free(image.rank()),
        map: f,
    })
}

/// `H_0(Q; R_ab ⊗ R_ab)` with the diagonal action.
#[derive(Clone, Debug, Serialize)]
pub struct TensorSquareCoinvariants {
    pub invariants: AbelianGroupInvariants,
    /// The induced map onto `F_ab ⊗ F_ab` is onto.
    pub surjects_onto_fab_square: bool,
}

/// Ten minutes and about 2 GiB of stored integer entries (at a rough 64
/// bytes per entry).
pub fn default_tensor_square_budget() -> Budget {
    Budget::seconds(600.0).with_max_entries((2usize << 30) / 64)
}

/// Cokernel of the stacked `A_i ⊗ A_i − I` on `Z^{B²}`.
///
/// The relations are sparse, so unit pivots are eliminated first on sparse
/// rows; only the leftover block goes through a dense normal form.
pub fn coinvariants_tensor_square(sd: &SchreierData, budget: &Budget) -> Result<TensorSquareCoinvariants> {
    let dim = sd.basis_count();
    let n2 = dim * dim;
    budget.check_entries("tensor-square coinvariants", n2)?;
    let mut rows: Vec<SparseRow> = Vec::new();
    for a in sd.action_on_rab() {
        let cols: Vec<Vec<(usize, Int)>> = (0..dim)
            .map(|j| (0..dim).filter(|&i| !a[(i, j)].is_zero()).map(|i| (i, a[(i, j)].clone())).collect())
            .collect();
        for j1 in 0..dim {
            for j2 in 0..dim {
                // (A ⊗ A − I) e_{j1,j2}
                let mut row: HashMap<usize, Int> = HashMap::new();
                for (i1, x1) in &cols[j1] {
                    for (i2, x2) in &cols[j2] {
                        *row.entry(i1 * dim + i2).or_insert_with(Int::zero) += x1 * x2;
                    }
                }
                *row.entry(j1 * dim + j2).or_insert_with(Int::zero) -= 1;
                row.retain(|_, v| !v.is_zero());
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
        budget.check("tensor-square coinvariants")?;
    }
    let invariants = sparse_cokernel(n2, rows, budget)?;

    // F_ab ⊗ F_ab is reached iff B ⊗ B has full column lattice.
    let b = sd.inclusion_to_fab();
    let bb = b.kron(&b);
    let surjects_onto_fab_square = Lattice::from_columns(&bb) == Lattice::full(bb.nrows());
    Ok(TensorSquareCoinvariants { invariants, surjects_onto_fab_square })
}

type SparseRow = HashMap<usize, Int>;

/// Invariants of `Z^n / span(rows)`.
pub fn sparse_cokernel(n: usize, mut rows: Vec<SparseRow>, budget: &Budget) -> Result<AbelianGroupInvariants> {
    let mut col_rows: HashMap<usize, HashSet<usize>> = HashMap::new();
    for (r, row) in rows.iter().enumerate() {
        for &c in row.keys() {
            col_rows.entry(c).or_default().insert(r);
        }
    }
    let mut alive: Vec<bool> = vec![true; rows.len()];
    let mut eliminated = 0usize;
    let mut progress = true;
    while progress {
        progress = false;
        for r in 0..rows.len() {
            if !alive[r] {
                continue;
            }
            // Unit entry in the sparsest column.
            let pivot = rows[r]
                .iter()
                .filter(|(_, v)| v.abs().is_one())
                .map(|(&c, v)| (col_rows[&c].len(), c, v.clone()))
                .min_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
            let Some((_, c, v)) = pivot else { continue };
            let pivot_row = rows[r].clone();
            let others: Vec<usize> = col_rows[&c].iter().copied().filter(|&k| k != r).collect();
            for k in others {
                let q = &rows[k][&c] * &v; // v = ±1, so q/v = q*v
                for (&cc, x) in &pivot_row {
                    let e = rows[k].entry(cc).or_insert_with(Int::zero);
                    *e -= &q * x;
                    if e.is_zero() {
                        rows[k].remove(&cc);
                        col_rows.get_mut(&cc).unwrap().remove(&k);
                    } else {
                        col_rows.entry(cc).or_default().insert(k);
                    }
                }
                if rows[k].is_empty() {
                    alive[k] = false;
                }
            }
            for &cc in pivot_row.keys() {
                col_rows.get_mut(&cc).unwrap().remove(&r);
            }
            alive[r] = false;
            rows[r].clear();
            eliminated += 1;
            progress = true;
            if eliminated % 256 == 0 {
                budget.check("sparse elimination")?;
            }
        }
    }
    // Dense leftover on the surviving columns.
    let mut cols: Vec<usize> = col_rows.iter().filter(|(_, rs)| !rs.is_empty()).map(|(&c, _)| c).collect();
    cols.sort_unstable();
    let index: HashMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let left: Vec<Vec<Int>> = rows
        .iter()
        .zip(&alive)
        .filter(|(row, &a)| a && !row.is_empty())
        .map(|(row, _)| {
            let mut v = vec![Int::zero(); cols.len()];
            for (c, x) in row {
                v[index[c]] = x.clone();
            }
            v
        })
        .collect();
    budget.check_entries("dense leftover", left.len() * cols.len())?;
    let untouched = n - eliminated - cols.len();
    let dense = IntMatrix::from_rows(cols.len(), left).transpose();
    let part = cokernel_invariants(&dense);
    Ok(part.direct_sum(&AbelianGroupInvariants::free(untouched)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset_enum::todd_coxeter;
    use crate::schreier::schreier_data;

    fn sd(gens: &[&str], rels: &[&str]) -> SchreierData {
        let p = FinitePresentation::parse(gens, rels).unwrap();
        schreier_data(&todd_coxeter(&p, 10_000).unwrap()).unwrap()
    }

    #[test]
    fn h1_examples() {
        assert_eq!(h1(&FinitePresentation::free(1)).to_string(), "Z");
        let a5 = FinitePresentation::parse(&["a", "b"], &["a^2", "b^3", "(ab)^5"]).unwrap();
        assert!(h1(&a5).is_trivial());
    }

    #[test]
    fn coefficient_examples() {
        let (_, inv) = h1_free_with_coefficients(2, &CoefficientModule::trivial(2, 2)).unwrap();
        assert_eq!(inv.to_string(), "Z^4");
        let m = CoefficientModule::new(1, vec![IntMatrix::from_i64_rows(&[vec![-1]])]).unwrap();
        assert!(h1_free_with_coefficients(1, &m).unwrap().1.is_trivial());
    }

    #[test]
    fn z2_five_term() {
        let s = sd(&["a"], &["a^2"]);
        let r = five_term_check(&s).unwrap();
        assert!(r.is_exact(), "{r:?}");
        assert!(r.h2_q.is_trivial());
        assert_eq!(r.h1_fqf.to_string(), "Z^2");
        assert_eq!(r.cokernel.to_string(), "Z/2");
        assert_eq!(r.h1_q.to_string(), "Z/2");
    }

    #[test]
    fn trivial_quotient() {
        let s = sd(&["x"], &["x"]);
        let r = five_term_check(&s).unwrap();
        assert!(r.is_exact());
        assert!(r.cokernel.is_trivial());
        let k = induced_h2_kernel(&s).unwrap();
        assert!(k.kernel.is_trivial());
        assert!(k.surjective);
        assert!(schur_multiplier_finite(&s).unwrap().is_trivial());
    }

    #[test]
    fn s3_multiplier_and_tensor_square() {
        let s = sd(&["a", "b"], &["a^2", "b^2", "(ab)^3"]);
        assert!(schur_multiplier_finite(&s).unwrap().is_trivial());
        assert!(five_term_check(&s).unwrap().is_exact());
        let t = coinvariants_tensor_square(&sd(&["x"], &["x"]), &Budget::unlimited()).unwrap();
        assert_eq!(t.invariants.to_string(), "Z");
    }

    #[test]
    fn sparse_matches_dense() {
        let rows_dense = IntMatrix::from_i64_rows(&[vec![1, 2, 0, 3], vec![0, 2, 4, 0], vec![2, 0, 6, 1]]);
        let sparse: Vec<SparseRow> = rows_dense
            .rows()
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect())
            .collect();
        let a = sparse_cokernel(4, sparse, &Budget::unlimited()).unwrap();
        assert_eq!(a, cokernel_invariants(&rows_dense.transpose()));
    }
}
