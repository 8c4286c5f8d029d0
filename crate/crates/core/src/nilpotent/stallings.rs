//! Comparing lower central quotients along a homomorphism.

use serde::Serialize;

use super::pc::{Definition, Elem, PcPresentation};
use super::quotient::nilpotent_quotient;
use crate::error::{Error, Result};
use crate::presentations::PresentationMorphism;
use crate::zlinalg::{AbelianGroupInvariants, IntMatrix, Lattice};

#[derive(Clone, Debug, Serialize)]
pub struct LayerComparison {
    pub weight: usize,
    pub source: AbelianGroupInvariants,
    pub target: AbelianGroupInvariants,
    pub injective: bool,
    pub surjective: bool,
}

impl LayerComparison {
    pub fn is_isomorphism(&self) -> bool {
        self.injective && self.surjective
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StallingsReport {
    pub class: usize,
    /// Every source relator maps to the identity of the target quotient.
    pub certified: bool,
    pub layers: Vec<LayerComparison>,
}

impl StallingsReport {
    /// Isomorphism on every section, hence on the class-`c` quotients.
    pub fn is_isomorphism(&self) -> bool {
        self.certified && self.layers.iter().all(LayerComparison::is_isomorphism)
    }
}

/// Computes both class-`class` quotients and compares them section by section
/// along `f`.
pub fn stallings_compare(f: &PresentationMorphism, class: usize) -> Result<StallingsReport> {
    let qa = nilpotent_quotient(&f.source, class)?;
    let qb = nilpotent_quotient(&f.target, class)?;
    compare_quotients(f, &qa, &qb)
}

/// Same as [`stallings_compare`] with the quotients supplied.
pub fn compare_quotients(f: &PresentationMorphism, qa: &PcPresentation, qb: &PcPresentation) -> Result<StallingsReport> {
    let class = qa.class().min(qb.class());
    for (k, r) in f.relator_images().iter().enumerate() {
        if !qb.is_trivial(r)? {
            return Err(Error::Uncertified(format!(
                "source relator {k} does not map to the identity of the class-{class} target quotient"
            )));
        }
    }
    let images = generator_images(f, qa, qb)?;
    let mut layers = Vec::new();
    for k in 1..=class {
        let la = qa.layer(k);
        let lb = qb.layer(k);
        let mut cols = Vec::with_capacity(la.len());
        for t in la.clone() {
            let img = &images[t];
            if qb.element_weight(img).is_some_and(|w| w < k) {
                return Err(Error::Inconsistent(format!("image of weight-{k} generator g{} has lower weight", t + 1)));
            }
            cols.push(qb.layer_coordinates(img, k));
        }
        let map = IntMatrix::from_columns(lb.len(), &cols);
        let rel_a = Lattice::from_rows(la.len(), qa.layer_relations(k).rows().to_vec());
        let rel_b = Lattice::from_rows(lb.len(), qb.layer_relations(k).rows().to_vec());
        if !rel_b.contains_lattice(&rel_a.image(&map)) {
            return Err(Error::Inconsistent(format!("induced map on section {k} is not well defined")));
        }
        let spanned = rel_b.sum(&Lattice::from_columns(&map));
        let surjective = Lattice::full(lb.len()).quotient_invariants(&spanned)?.is_trivial();
        let injective = rel_a.contains_lattice(&Lattice::preimage(&map, &rel_b));
        layers.push(LayerComparison {
            weight: k,
            source: qa.sections()[k - 1].clone(),
            target: qb.sections()[k - 1].clone(),
            injective,
            surjective,
        });
    }
    Ok(StallingsReport { class, certified: true, layers })
}

/// Image in `qb` of every pc generator of `qa`, following the definitions.
fn generator_images(f: &PresentationMorphism, qa: &PcPresentation, qb: &PcPresentation) -> Result<Vec<Elem>> {
    let col = qb.collector();
    let mut images: Vec<Elem> = Vec::with_capacity(qa.ngens());
    let image_of = |images: &Vec<Elem>, e: &Elem| -> Result<Elem> {
        let mut x = qb.identity();
        for &(g, k) in e {
            col.mul_elem(&mut x, &col.pow(&images[g], k)?)?;
        }
        Ok(super::pc::to_sparse(&x))
    };
    for t in 0..qa.ngens() {
        let (lhs, rhs) = match qa.definitions()[t] {
            Definition::Image(x) => {
                images.push(qb.evaluate(&f.apply(&crate::words::Word::generator(x)))?);
                continue;
            }
            Definition::Commutator(j, i) => (
                col.commutator(&images[j], &images[i])?,
                qa.commutator_rhs(j, i).cloned().unwrap_or_default(),
            ),
            Definition::Power(i) => {
                let d = qa.relative_order(i).expect("power definition");
                (col.pow(&images[i], d)?, qa.power_rhs(i).cloned().unwrap_or_default())
            }
        };
        // lhs = u · g_t with u in earlier generators.
        let pos = rhs.iter().position(|&(g, _)| g == t);
        match pos {
            Some(p) if rhs[p].1 == 1 && p + 1 == rhs.len() => {}
            _ => return Err(Error::Inconsistent(format!("definition of g{} is not of the form u·g", t + 1))),
        }
        let u = image_of(&images, &rhs[..rhs.len() - 1].to_vec())?;
        images.push(col.multiply(&col.inverse(&u)?, &lhs)?);
    }
    Ok(images)
}
