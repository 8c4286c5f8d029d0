//! Reidemeister–Schreier data for the kernel `R` of `F ↠ Q`.

use crate::coset_enum::CosetTable;
use crate::error::{Error, Result};
use crate::words::{Letter, Word};
use crate::zlinalg::{Int, IntMatrix};

/// A Schreier transversal of a complete coset table and the resulting free
/// basis `a_1, ..., a_B` of `R`.
///
/// The basis element for the non-tree edge `(c, g)` is
/// `t(c) · g · t(c·g)⁻¹`, where `t` is the transversal.
#[derive(Clone, Debug)]
pub struct SchreierData {
    table: CosetTable,
    transversal: Vec<Word>,
    basis: Vec<(usize, usize)>,
    /// `basis_index[c][g]` is the basis element of the edge `(c, g)`, if any.
    basis_index: Vec<Vec<Option<usize>>>,
}

pub fn schreier_data(table: &CosetTable) -> Result<SchreierData> {
    if !table.is_complete() {
        return Err(Error::IncompleteTable);
    }
    let n = table.coset_count();
    let rank = table.rank();
    let mut transversal: Vec<Option<Word>> = vec![None; n];
    // tree[c][col]: the edge (c, col) belongs to the spanning tree.
    let mut tree = vec![vec![false; 2 * rank]; n];
    transversal[0] = Some(Word::identity());
    let mut queue = vec![0usize];
    let mut i = 0;
    while i < queue.len() {
        let c = queue[i];
        i += 1;
        for col in 0..2 * rank {
            let l = Letter::from_column(col);
            let d = table.act(c, l);
            if transversal[d].is_none() {
                transversal[d] = Some(transversal[c].as_ref().unwrap().multiply(&Word::from_letters([l])));
                tree[c][col] = true;
                tree[d][l.inv().column()] = true;
                queue.push(d);
            }
        }
    }
    let transversal: Vec<Word> = transversal.into_iter().map(|t| t.expect("table is connected")).collect();
    let mut basis = Vec::new();
    let mut basis_index = vec![vec![None; rank]; n];
    for c in 0..n {
        for g in 0..rank {
            if !tree[c][2 * g] {
                basis_index[c][g] = Some(basis.len());
                basis.push((c, g));
            }
        }
    }
    Ok(SchreierData { table: table.clone(), transversal, basis, basis_index })
}

impl SchreierData {
    pub fn table(&self) -> &CosetTable {
        &self.table
    }

    pub fn transversal(&self) -> &[Word] {
        &self.transversal
    }

    /// Basis elements as `(coset, generator)` edges.
    pub fn basis(&self) -> &[(usize, usize)] {
        &self.basis
    }

    pub fn basis_count(&self) -> usize {
        self.basis.len()
    }

    pub fn base_rank(&self) -> usize {
        self.table.rank()
    }

    pub fn index(&self) -> usize {
        self.table.coset_count()
    }

    /// The basis element `a_m` as a word of `F`.
    pub fn expand_basis(&self, m: usize) -> Word {
        let (c, g) = self.basis[m];
        let d = self.table.act(c, Letter::pos(g));
        self.transversal[c].multiply(&Word::generator(g)).multiply(&self.transversal[d].invert())
    }

    /// Expands a word over the basis alphabet back into `F`.
    pub fn expand(&self, w: &Word) -> Word {
        let images: Vec<Word> = (0..self.basis_count()).map(|m| self.expand_basis(m)).collect();
        w.substitute(&images)
    }

    /// Rewrites `w ∈ R` as a word in the basis `a_1, ..., a_B`.
    pub fn rewrite_in_r(&self, w: &Word) -> Result<Word> {
        let mut c = 0usize;
        let mut out = Vec::new();
        for &l in w.letters() {
            let d = self.table.act(c, l);
            if l.inverse {
                if let Some(m) = self.basis_index[d][l.gen] {
                    out.push(Letter::neg(m));
                }
            } else if let Some(m) = self.basis_index[c][l.gen] {
                out.push(Letter::pos(m));
            }
            c = d;
        }
        if c != 0 {
            return Err(Error::NotInSubgroup { end: c });
        }
        Ok(Word::from_letters(out))
    }

    /// Abelianized rewrite: exponent sums over the basis of `R_ab`.
    pub fn rewrite_abelian(&self, w: &Word) -> Result<Vec<i64>> {
        let mut c = 0usize;
        let mut v = vec![0i64; self.basis_count()];
        for &l in w.letters() {
            let d = self.table.act(c, l);
            if l.inverse {
                if let Some(m) = self.basis_index[d][l.gen] {
                    v[m] -= 1;
                }
            } else if let Some(m) = self.basis_index[c][l.gen] {
                v[m] += 1;
            }
            c = d;
        }
        if c != 0 {
            return Err(Error::NotInSubgroup { end: c });
        }
        Ok(v)
    }

    fn conjugation_matrix(&self, x: &Word) -> IntMatrix {
        let cols: Vec<Vec<Int>> = (0..self.basis_count())
            .map(|m| {
                let w = self.expand_basis(m).conjugate(x);
                self.rewrite_abelian(&w).expect("R is normal").into_iter().map(Int::from).collect()
            })
            .collect();
        IntMatrix::from_columns(self.basis_count(), &cols)
    }

    /// For each generator `x` of `F`, the matrix sending `a_m` to the class of
    /// `x⁻¹ a_m x` in `R_ab`.
    pub fn action_on_rab(&self) -> Vec<IntMatrix> {
        (0..self.base_rank()).map(|g| self.conjugation_matrix(&Word::generator(g))).collect()
    }

    /// Matrices of the inverse generators.
    pub fn inverse_action_on_rab(&self) -> Vec<IntMatrix> {
        (0..self.base_rank()).map(|g| self.conjugation_matrix(&Word::generator(g).invert())).collect()
    }

    /// The action of an arbitrary word: `A_w = A_{y_L} ··· A_{y_1}` for `w = y_1 ··· y_L`.
    pub fn word_action(&self, action: &[IntMatrix], inverse: &[IntMatrix], w: &Word) -> IntMatrix {
        let mut acc = IntMatrix::identity(self.basis_count());
        for l in w.letters() {
            let a = if l.inverse { &inverse[l.gen] } else { &action[l.gen] };
            acc = a.mul(&acc).expect("square matrices");
        }
        acc
    }

    /// `rank(F) × B` matrix whose column `m` is the exponent-sum vector of `a_m`.
    pub fn inclusion_to_fab(&self) -> IntMatrix {
        let rank = self.base_rank();
        let cols: Vec<Vec<Int>> = (0..self.basis_count())
            .map(|m| self.expand_basis(m).exponent_sums(rank).unwrap().into_iter().map(Int::from).collect())
            .collect();
        IntMatrix::from_columns(rank, &cols)
    }
}

pub fn action_on_rab(sd: &SchreierData) -> Vec<IntMatrix> {
    sd.action_on_rab()
}

pub fn inclusion_to_fab(sd: &SchreierData) -> IntMatrix {
    sd.inclusion_to_fab()
}

pub fn rewrite_in_r(sd: &SchreierData, w: &Word) -> Result<Word> {
    sd.rewrite_in_r(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset_enum::todd_coxeter;
    use crate::presentations::FinitePresentation;

    fn sd(gens: &[&str], rels: &[&str]) -> SchreierData {
        let p = FinitePresentation::parse(gens, rels).unwrap();
        schreier_data(&todd_coxeter(&p, 10_000).unwrap()).unwrap()
    }

    #[test]
    fn trivial_quotient_basis_is_generators() {
        let s = sd(&["x"], &["x"]);
        assert_eq!(s.basis_count(), 1);
        assert_eq!(s.expand_basis(0), Word::generator(0));
        assert_eq!(s.action_on_rab(), vec![IntMatrix::identity(1)]);
        assert_eq!(s.inclusion_to_fab(), IntMatrix::identity(1));
    }

    #[test]
    fn z2_single_basis_letter() {
        let s = sd(&["a"], &["a^2"]);
        assert_eq!(s.basis_count(), 1);
        let w = s.rewrite_in_r(&Word::generator(0).pow(2)).unwrap();
        assert_eq!(w, Word::generator(0));
        assert_eq!(s.rewrite_in_r(&Word::identity()).unwrap(), Word::identity());
        assert!(matches!(s.rewrite_in_r(&Word::generator(0)), Err(Error::NotInSubgroup { end: 1 })));
        assert_eq!(s.inclusion_to_fab(), IntMatrix::from_i64_rows(&[vec![2]]));
        assert_eq!(s.action_on_rab(), vec![IntMatrix::identity(1)]);
    }

    #[test]
    fn s3_basis_count_and_roundtrip() {
        let s = sd(&["a", "b"], &["a^2", "b^2", "(ab)^3"]);
        assert_eq!(s.basis_count(), 7);
        let r = FinitePresentation::parse(&["a", "b"], &["(ab)^3"]).unwrap().relators()[0].clone();
        let u = Word::from_signed(&[1, 2, -1, 2, 2]);
        let w = r.conjugate(&u);
        let rw = s.rewrite_in_r(&w).unwrap();
        assert_eq!(s.expand(&rw), w);
    }

    #[test]
    fn transversal_is_prefix_closed() {
        let s = sd(&["a", "b"], &["a^2", "b^3", "(ab)^5"]);
        let ts: std::collections::HashSet<&Word> = s.transversal().iter().collect();
        for t in s.transversal() {
            if !t.is_empty() {
                let prefix = Word::from_letters(t.letters()[..t.len() - 1].iter().copied());
                assert!(ts.contains(&prefix));
            }
        }
    }
}
