//! Nilpotent quotients `G/γ_{c+1}(G)` as consistent power-commutator
//! presentations, maps between them, and the Dwyer filtration of `H₂`.

mod dwyer;
mod pc;
mod quotient;
mod stallings;

pub use dwyer::{dwyer_filtration, dwyer_phi, DwyerFiltration, DwyerLayer, Identities};
pub use pc::{Collector, Definition, Elem, Exp, PcPresentation};
pub use quotient::{nilpotent_quotient, nilpotent_quotient_with, NqOptions, DEFAULT_CLASS, MAX_WORD_LENGTH};
pub use stallings::{compare_quotients, stallings_compare, LayerComparison, StallingsReport};

use crate::error::Result;
use crate::words::Word;
use crate::zlinalg::Int;

impl PcPresentation {
    /// Normal form of a word in the input generators.
    pub fn evaluate(&self, w: &Word) -> Result<Elem> {
        let col = self.collector();
        let inverses: Vec<Elem> = self.images.iter().map(|e| col.inverse(e)).collect::<Result<_>>()?;
        Ok(pc::to_sparse(&quotient::evaluate_with(&col, &self.images, &inverses, w)?))
    }

    /// Normal forms of many words, sharing one collector.
    pub fn evaluate_all(&self, words: &[Word]) -> Result<Vec<Elem>> {
        let col = self.collector();
        let inverses: Vec<Elem> = self.images.iter().map(|e| col.inverse(e)).collect::<Result<_>>()?;
        words
            .iter()
            .map(|w| quotient::evaluate_with(&col, &self.images, &inverses, w).map(|x| pc::to_sparse(&x)))
            .collect()
    }

    pub fn is_trivial(&self, w: &Word) -> Result<bool> {
        Ok(self.evaluate(w)?.is_empty())
    }

    /// Largest `k ≤ class` with `w ∈ γ_k`, or `None` when `w` is trivial in
    /// this quotient (that is, `w ∈ γ_{class+1}`).
    pub fn weight_of(&self, w: &Word) -> Result<Option<usize>> {
        Ok(self.element_weight(&self.evaluate(w)?))
    }

    pub fn element_weight(&self, e: &Elem) -> Option<usize> {
        e.first().map(|&(g, _)| self.weights[g])
    }

    /// Coordinates of `e` on the weight-`k` layer.
    pub fn layer_coordinates(&self, e: &Elem, k: usize) -> Vec<Int> {
        let layer = self.layer(k);
        let mut v = vec![Int::from(0); layer.len()];
        for &(g, x) in e {
            if layer.contains(&g) {
                v[g - layer.start] = Int::from(x);
            }
        }
        v
    }

    /// Human-readable relations, one per line, using `g1, g2, ...`.
    pub fn render(&self) -> String {
        let word = |e: &Elem| {
            if e.is_empty() {
                return "1".to_string();
            }
            e.iter()
                .map(|&(g, x)| if x == 1 { format!("g{}", g + 1) } else { format!("g{}^{}", g + 1, x) })
                .collect::<Vec<_>>()
                .join("*")
        };
        let mut out = String::new();
        for g in 0..self.ngens() {
            out.push_str(&format!("g{} weight {} {:?}\n", g + 1, self.weights[g], self.definitions[g]));
        }
        for g in 0..self.ngens() {
            if let Some((d, w)) = &self.powers[g] {
                out.push_str(&format!("g{}^{} = {}\n", g + 1, d, word(w)));
            }
        }
        for j in 0..self.ngens() {
            for i in 0..j {
                if let Some(c) = &self.comms[j][i] {
                    out.push_str(&format!("[g{}, g{}] = {}\n", j + 1, i + 1, word(c)));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::FinitePresentation;
    use crate::zlinalg::AbelianGroupInvariants;

    fn sections(p: &FinitePresentation, c: usize) -> Vec<String> {
        let q = nilpotent_quotient(p, c).unwrap();
        assert!(q.is_consistent().unwrap());
        q.sections().iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn free_group_class_four() {
        let q = nilpotent_quotient(&FinitePresentation::free(2), 4).unwrap();
        let ranks: Vec<usize> = q.sections().iter().map(|s| s.free_rank).collect();
        assert_eq!(ranks, vec![2, 1, 2, 3]);
        assert!(q.is_consistent().unwrap());
    }

    #[test]
    fn cyclic_and_heisenberg() {
        let z2 = FinitePresentation::parse(&["a"], &["a^2"]).unwrap();
        assert_eq!(sections(&z2, 3), vec!["Z/2", "0", "0"]);
        let h = FinitePresentation::parse(&["a", "b"], &["[a,[a,b]]", "[b,[a,b]]"]).unwrap();
        assert_eq!(sections(&h, 3), vec!["Z^2", "Z", "0"]);
    }

    #[test]
    fn dihedral_of_order_eight() {
        let d8 = FinitePresentation::parse(&["a", "b"], &["a^4", "b^2", "(ab)^2"]).unwrap();
        let q = nilpotent_quotient(&d8, 3).unwrap();
        let secs: Vec<String> = q.sections().iter().map(|s| s.to_string()).collect();
        assert_eq!(secs, vec!["Z/2 + Z/2", "Z/2", "0"]);
        assert!(q.is_consistent().unwrap());
        assert!(q.is_trivial(&d8.parse_word("a^4").unwrap()).unwrap());
        assert_eq!(q.weight_of(&d8.parse_word("a^2").unwrap()).unwrap(), Some(2));
        assert_eq!(q.weight_of(&d8.parse_word("a").unwrap()).unwrap(), Some(1));
    }

    #[test]
    fn perfect_group_has_trivial_quotients() {
        let bi = FinitePresentation::parse(&["a", "b"], &["a^5 = b^3", "b^3 = (ba)^2"]).unwrap();
        let q = nilpotent_quotient(&bi, 3).unwrap();
        assert_eq!(q.ngens(), 0);
        assert!(q.sections().iter().all(AbelianGroupInvariants::is_trivial));
    }
}
