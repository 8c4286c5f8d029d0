//! The Dwyer filtration `φ_{k+1}(G) = ker(H₂(G) → H₂(G/γ_k G))`.
//!
//! With `G = F/R` and `W = F/[F,R]`, the relator classes generate the central
//! subgroup `R/[F,R]` of `W`, and `φ_{k+1}(G) = R/[F,R] ∩ γ_{k+1}(W)`. The
//! relator classes are pushed into the class-`k` quotient of `W` and the
//! lattice of coefficient vectors that die there is cut out one section at a
//! time. Relations among the relator classes themselves (identities) are
//! divided out at the end.

use serde::Serialize;

use super::pc::{to_sparse, Elem, PcPresentation};
use super::quotient::{nilpotent_quotient_with, NqOptions};
use crate::error::{Error, Result};
use crate::homology::CoefficientModule;
use crate::presentations::{free_central_extension, FinitePresentation};
use crate::schreier::SchreierData;
use crate::words::Word;
use crate::zlinalg::{AbelianGroupInvariants, Int, IntMatrix, Lattice};

/// Relations among the relator classes in `R/[F,R]`.
#[derive(Clone, Debug)]
pub enum Identities {
    /// Computed exactly, as a lattice in relator coordinates.
    Computed(Lattice),
    /// Taken to be zero, which holds for aspherical presentations.
    Aspherical,
}

impl Identities {
    /// For a finite group: the relator vectors whose Schreier rewrites lie in
    /// the image of the boundary, i.e. vanish in `(R_ab)_F`.
    pub fn from_schreier(p: &FinitePresentation, sd: &SchreierData) -> Result<Self> {
        let cols: Vec<Vec<i64>> = p.relators().iter().map(|r| sd.rewrite_abelian(r)).collect::<Result<_>>()?;
        let rho = IntMatrix::from_i64_columns(sd.basis_count(), &cols);
        let boundary = CoefficientModule::relation_module(sd).boundary();
        Ok(Identities::Computed(Lattice::preimage(&rho, &Lattice::from_columns(&boundary))))
    }

    fn lattice(&self, m: usize) -> Lattice {
        match self {
            Identities::Computed(l) => l.clone(),
            Identities::Aspherical => Lattice::zero(m),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DwyerLayer {
    pub k: usize,
    /// `φ_{k+1}(G)`.
    pub phi: AbelianGroupInvariants,
    /// Coefficient vectors over the relators whose product lies in `γ_{k+1}(W)`.
    #[serde(skip)]
    pub lattice: Lattice,
}

#[derive(Clone, Debug, Serialize)]
pub struct DwyerFiltration {
    pub relator_count: usize,
    /// The identities were assumed zero rather than computed.
    pub identities_assumed: bool,
    pub layers: Vec<DwyerLayer>,
    /// The class-`k` quotient of `F/[F,R]`.
    #[serde(skip)]
    pub extension_quotient: PcPresentation,
    #[serde(skip)]
    relator_images: Vec<Elem>,
}

impl DwyerFiltration {
    pub fn max_k(&self) -> usize {
        self.layers.len()
    }

    /// `φ_{k+1}` for `1 ≤ k ≤ max_k`.
    pub fn phi(&self, k: usize) -> &AbelianGroupInvariants {
        &self.layers[k - 1].phi
    }

    /// For each word, assumed to represent an element of `R/[F,R]`, the
    /// largest `k` with the word in `γ_k(W)`; `None` means `γ_{max_k+1}`.
    pub fn weights(&self, words: &[Word]) -> Result<Vec<Option<usize>>> {
        let q = &self.extension_quotient;
        Ok(q.evaluate_all(words)?.iter().map(|e| q.element_weight(e)).collect())
    }

    /// Images in the class-`max_k` quotient of `W` of words representing
    /// elements of `R/[F,R]`.
    pub fn class_images(&self, words: &[Word]) -> Result<Vec<Elem>> {
        self.extension_quotient.evaluate_all(words)
    }

    /// Whether `Π z_j^{c_j}` lies in `γ_{k+1}(W)`, for central images `z_j`.
    pub fn combination_in(&self, images: &[Elem], coeffs: &[Int], k: usize) -> Result<bool> {
        let e = product(&self.extension_quotient, images, coeffs)?;
        Ok(self.extension_quotient.element_weight(&e).is_none_or(|w| w > k))
    }

    /// Whether `Π r_j^{c_j}` over the relators lies in `γ_{k+1}(W)`.
    pub fn relator_product_in(&self, coeffs: &[Int], k: usize) -> Result<bool> {
        self.combination_in(&self.relator_images, coeffs, k)
    }
}

/// `Π z_j^{c_j}`; the `z_j` are central so the order does not matter.
pub(crate) fn product(q: &PcPresentation, z: &[Elem], coeffs: &[Int]) -> Result<Elem> {
    let col = q.collector();
    let mut x = q.identity();
    for (zj, c) in z.iter().zip(coeffs) {
        let c: i128 = i128::try_from(c).map_err(|_| Error::Overflow)?;
        if c != 0 {
            col.mul_elem(&mut x, &col.pow(zj, c)?)?;
        }
    }
    Ok(to_sparse(&x))
}

/// `φ_2 ⊇ φ_3 ⊇ ... ⊇ φ_{max_k+1}` of the presented group.
pub fn dwyer_filtration(
    p: &FinitePresentation,
    max_k: usize,
    identities: &Identities,
    opts: &NqOptions,
) -> Result<DwyerFiltration> {
    let m = p.relator_count();
    let w = free_central_extension(p);
    let q = nilpotent_quotient_with(&w, max_k, opts)?;
    let z = q.evaluate_all(p.relators())?;
    let k0 = identities.lattice(m);
    let mut current = Lattice::full(m);
    let mut layers = Vec::with_capacity(max_k);
    for k in 1..=max_k {
        opts.budget.check("Dwyer filtration")?;
        let layer = q.layer(k);
        let mut cols = Vec::with_capacity(current.rank());
        for b in current.basis().rows() {
            let e = product(&q, &z, b)?;
            if q.element_weight(&e).is_some_and(|wt| wt < k) {
                return Err(Error::Inconsistent(format!("relator combination escaped weight {k}")));
            }
            cols.push(q.layer_coordinates(&e, k));
        }
        let map = IntMatrix::from_columns(layer.len(), &cols);
        let rel = Lattice::from_rows(layer.len(), q.layer_relations(k).rows().to_vec());
        let coords = Lattice::preimage(&map, &rel);
        let rows = coords.basis().rows().iter().map(|x| crate::zlinalg::combine(x, current.basis())).collect();
        current = Lattice::from_rows(m, rows);
        let phi = current.quotient_invariants(&k0)?;
        layers.push(DwyerLayer { k, phi, lattice: current.clone() });
    }
    Ok(DwyerFiltration {
        relator_count: m,
        identities_assumed: matches!(identities, Identities::Aspherical),
        layers,
        extension_quotient: q,
        relator_images: z,
    })
}

/// `φ_{k+1}(G)`.
pub fn dwyer_phi(p: &FinitePresentation, k: usize, identities: &Identities) -> Result<AbelianGroupInvariants> {
    let f = dwyer_filtration(p, k, identities, &NqOptions::default())?;
    Ok(f.phi(k).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset_enum::todd_coxeter;
    use crate::schreier::schreier_data;

    #[test]
    fn cyclic_group_has_no_multiplier() {
        let p = FinitePresentation::parse(&["a"], &["a^2"]).unwrap();
        let sd = schreier_data(&todd_coxeter(&p, 100).unwrap()).unwrap();
        let ids = Identities::from_schreier(&p, &sd).unwrap();
        let f = dwyer_filtration(&p, 3, &ids, &NqOptions::default()).unwrap();
        assert!(f.layers.iter().all(|l| l.phi.is_trivial()));
    }

    #[test]
    fn klein_four_multiplier_is_seen_by_abelianization() {
        // H₂(Z/2 × Z/2) = Z/2 maps isomorphically to H₂ of the abelianization.
        let p = FinitePresentation::parse(&["a", "b"], &["a^2", "b^2", "[a,b]"]).unwrap();
        let sd = schreier_data(&todd_coxeter(&p, 100).unwrap()).unwrap();
        let ids = Identities::from_schreier(&p, &sd).unwrap();
        let f = dwyer_filtration(&p, 2, &ids, &NqOptions::default()).unwrap();
        assert_eq!(f.phi(1).to_string(), "Z/2");
        assert!(f.phi(2).is_trivial());
    }

    #[test]
    fn free_abelian_rank_two() {
        // H₂(Z²) = Z, detected in H₂ of the abelianization.
        let p = FinitePresentation::parse(&["a", "b"], &["[a,b]"]).unwrap();
        let f = dwyer_filtration(&p, 3, &Identities::Aspherical, &NqOptions::default()).unwrap();
        assert_eq!(f.phi(1).to_string(), "Z");
        assert!(f.phi(2).is_trivial());
        assert!(f.phi(3).is_trivial());
    }
}
