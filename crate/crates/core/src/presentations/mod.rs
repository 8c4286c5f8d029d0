//! Finite presentations and constructors on them.

mod tietze;

pub use tietze::{tietze_eliminate, TietzeResult, DEFAULT_LENGTH_BUDGET};

use std::fmt;

use log::warn;

use crate::coset_enum::CosetTable;
use crate::error::{Error, Result};
use crate::schreier::{schreier_data, SchreierData};
use crate::words::{parse_relator, parse_word, Word};
use crate::zlinalg::{Int, IntMatrix};

/// `⟨generators | relators⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePresentation {
    names: Vec<String>,
    relators: Vec<Word>,
}

/// Generator names `a, b, c, ...` for ranks up to 26, else `x1, x2, ...`.
pub fn default_names(rank: usize) -> Vec<String> {
    if rank <= 26 {
        (0..rank).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        (1..=rank).map(|i| format!("x{i}")).collect()
    }
}

impl FinitePresentation {
    /// Builds a presentation, dropping relators that reduce to the identity.
    pub fn new(names: Vec<String>, relators: Vec<Word>) -> Result<Self> {
        let rank = names.len();
        let mut kept = Vec::with_capacity(relators.len());
        for (i, r) in relators.into_iter().enumerate() {
            if let Some(l) = r.letters().iter().find(|l| l.gen >= rank) {
                return Err(Error::GeneratorOutOfRange { gen: l.gen, rank });
            }
            if r.is_identity() {
                warn!("dropping trivial relator #{i}");
                continue;
            }
            kept.push(r);
        }
        Ok(FinitePresentation { names, relators: kept })
    }

    pub fn with_rank(rank: usize, relators: Vec<Word>) -> Result<Self> {
        Self::new(default_names(rank), relators)
    }

    pub fn free(rank: usize) -> Self {
        FinitePresentation { names: default_names(rank), relators: Vec::new() }
    }

    /// Parses relators (or relations `u = v`) in the text word syntax.
    pub fn parse<S: AsRef<str>, T: AsRef<str>>(generators: &[S], relators: &[T]) -> Result<Self> {
        let names: Vec<String> = generators.iter().map(|s| s.as_ref().trim().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            let ok = n.len() == 1 && n.chars().all(|c| c.is_ascii_lowercase());
            if !ok {
                return Err(Error::Invalid(format!("generator name {n:?} must be a single lowercase letter")));
            }
            if names[..i].contains(n) {
                return Err(Error::Invalid(format!("duplicate generator name {n:?}")));
            }
        }
        let rels = relators.iter().map(|r| parse_relator(r.as_ref(), &names)).collect::<Result<Vec<_>>>()?;
        Self::new(names, rels)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        parse_word(text, &self.names)
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }

    /// As many relators as generators.
    pub fn is_balanced(&self) -> bool {
        self.relators.len() == self.rank()
    }

    pub fn total_length(&self) -> usize {
        self.relators.iter().map(Word::len).sum()
    }

    /// `rank × relators` matrix whose column `j` is the exponent-sum vector of relator `j`.
    pub fn exponent_matrix(&self) -> IntMatrix {
        let cols: Vec<Vec<Int>> = self
            .relators
            .iter()
            .map(|r| r.exponent_sums(self.rank()).expect("relators validated").into_iter().map(Int::from).collect())
            .collect();
        IntMatrix::from_columns(self.rank(), &cols)
    }

    pub fn render_word(&self, w: &Word) -> String {
        w.render(&self.names)
    }
}

impl fmt::Display for FinitePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| self.render_word(r)).collect();
        write!(f, "< {} | {} >", self.names.join(", "), rels.join(", "))
    }
}

/// A homomorphism given by generator images; relator images are not checked here.
#[derive(Clone, Debug)]
pub struct PresentationMorphism {
    pub source: FinitePresentation,
    pub target: FinitePresentation,
    pub images: Vec<Word>,
}

impl PresentationMorphism {
    pub fn new(source: FinitePresentation, target: FinitePresentation, images: Vec<Word>) -> Result<Self> {
        if images.len() != source.rank() {
            return Err(Error::Dimension(format!(
                "{} images given for {} source generators",
                images.len(),
                source.rank()
            )));
        }
        for w in &images {
            if let Some(l) = w.letters().iter().find(|l| l.gen >= target.rank()) {
                return Err(Error::GeneratorOutOfRange { gen: l.gen, rank: target.rank() });
            }
        }
        Ok(PresentationMorphism { source, target, images })
    }

    pub fn identity(p: &FinitePresentation) -> Self {
        let images = (0..p.rank()).map(Word::generator).collect();
        PresentationMorphism { source: p.clone(), target: p.clone(), images }
    }

    /// Reads one target word per line (blank lines and `#` comments skipped).
    pub fn parse_map(source: FinitePresentation, target: FinitePresentation, text: &str) -> Result<Self> {
        let images = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| target.parse_word(l))
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, images)
    }

    pub fn apply(&self, w: &Word) -> Word {
        w.substitute(&self.images)
    }

    pub fn relator_images(&self) -> Vec<Word> {
        self.source.relators().iter().map(|r| self.apply(r)).collect()
    }
}

/// `⟨X | [x, r] for x in X, r in R⟩`, presenting `F/[F,R]`. Relators are
/// ordered by relator first, then generator.
pub fn free_central_extension(p: &FinitePresentation) -> FinitePresentation {
    let mut rels = Vec::with_capacity(p.rank() * p.relator_count());
    for r in p.relators() {
        for j in 0..p.rank() {
            rels.push(Word::generator(j).commutator(r));
        }
    }
    FinitePresentation::new(p.names.clone(), rels).expect("same generators")
}

/// Generators of `p1` followed by those of `p2`, both relator sets, and all
/// cross commutators `[g1, g2]`.
pub fn direct_product(p1: &FinitePresentation, p2: &FinitePresentation) -> FinitePresentation {
    let (n1, n2) = (p1.rank(), p2.rank());
    let shift: Vec<Word> = (0..n2).map(|j| Word::generator(n1 + j)).collect();
    let mut rels: Vec<Word> = p1.relators.clone();
    rels.extend(p2.relators.iter().map(|r| r.substitute(&shift)));
    for i in 0..n1 {
        for j in 0..n2 {
            rels.push(Word::generator(i).commutator(&Word::generator(n1 + j)));
        }
    }
    FinitePresentation::with_rank(n1 + n2, rels).expect("indices in range")
}

/// A presentation of an iterated fiber product `F ×_Q ... ×_Q F` as a split
/// extension `R ⋊ F_{n-1}`.
///
/// Generators are the Schreier basis `a_1..a_B` of `R` followed by the
/// generators of `F_{n-1}` (for `n = 2`, the generators of `F`). Relator
/// `i·B + m` reads `y_i⁻¹ a_m y_i = w_{i,m}` where `w_{i,m}` rewrites the
/// conjugate of `a_m` by the image of `y_i` in the last factor.
#[derive(Clone, Debug)]
pub struct FiberProduct {
    pub presentation: FinitePresentation,
    /// Number of Schreier generators `B` at the front of each layer.
    pub basis_count: usize,
    /// Rank of the base free group `F`.
    pub base_rank: usize,
    pub factors: usize,
    /// Image of every generator in the last factor, as a word of `F`.
    pub projection: Vec<Word>,
}

impl FiberProduct {
    pub fn build(sd: &SchreierData, factors: usize) -> Result<Self> {
        if factors < 2 {
            return Err(Error::Invalid(format!("fiber product needs at least 2 factors, got {factors}")));
        }
        let n = sd.base_rank();
        let b = sd.basis_count();
        let expansions: Vec<Word> = (0..b).map(|m| sd.expand_basis(m)).collect();
        // F_1 = F: free on its generators, projection the identity.
        let mut rels: Vec<Word> = Vec::new();
        let mut projection: Vec<Word> = (0..n).map(Word::generator).collect();
        for _ in 1..factors {
            let prev_rank = projection.len();
            let shift: Vec<Word> = (0..prev_rank).map(|j| Word::generator(b + j)).collect();
            let mut new_rels: Vec<Word> = Vec::with_capacity(rels.len() + prev_rank * b);
            for (i, y) in projection.iter().enumerate() {
                let yi = Word::generator(b + i);
                for (m, e) in expansions.iter().enumerate() {
                    let conj = sd.rewrite_in_r(&e.conjugate(y))?;
                    let lhs = Word::generator(m).conjugate(&yi);
                    new_rels.push(lhs.multiply(&conj.invert()));
                }
            }
            // Relators of F_{n-1} follow the new conjugation relators.
            new_rels.extend(rels.iter().map(|r| r.substitute(&shift)));
            rels = new_rels;
            let mut proj = expansions.clone();
            proj.extend(projection);
            projection = proj;
        }
        let presentation = FinitePresentation::with_rank(projection.len(), rels)?;
        Ok(FiberProduct { presentation, basis_count: b, base_rank: n, factors, projection })
    }

    /// Generator index of `x_i` (the base generators sit after every basis layer).
    pub fn base_generator(&self, i: usize) -> usize {
        self.presentation.rank() - self.base_rank + i
    }
}

/// `R ⋊ F ≅ F ×_Q F` from a complete coset table of `F ↠ Q`.
pub fn semidirect_product_rf(table: &CosetTable) -> Result<FinitePresentation> {
    let sd = schreier_data(table)?;
    Ok(FiberProduct::build(&sd, 2)?.presentation)
}

/// The `n`-fold fiber product `F ×_Q ... ×_Q F`.
pub fn higher_fiber_product(table: &CosetTable, n: usize) -> Result<FinitePresentation> {
    if n < 2 {
        return Err(Error::Invalid(format!("fiber product needs at least 2 factors, got {n}")));
    }
    let sd = schreier_data(table)?;
    Ok(FiberProduct::build(&sd, n)?.presentation)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced() {
        let bi = FinitePresentation::parse(&["a", "b"], &["a^5 = b^3", "b^3 = (ba)^2"]).unwrap();
        assert!(bi.is_balanced());
        assert!(!FinitePresentation::free(1).is_balanced());
        let a5 = FinitePresentation::parse(&["a", "b"], &["a^2", "b^3", "(ab)^5"]).unwrap();
        assert!(!a5.is_balanced());
    }

    #[test]
    fn central_extension_counts() {
        let p = FinitePresentation::parse(&["x"], &["x"]).unwrap();
        let w = free_central_extension(&p);
        assert_eq!(w.relator_count(), 0);
        let p = FinitePresentation::parse(&["a", "b"], &["ab^2", "a^3b"]).unwrap();
        let w = free_central_extension(&p);
        assert_eq!(w.relator_count(), 4);
        assert_eq!(w.relators()[1], Word::generator(1).commutator(&p.relators()[0]));
    }

    #[test]
    fn direct_product_of_free() {
        let d = direct_product(&FinitePresentation::free(2), &FinitePresentation::free(2));
        assert_eq!(d.rank(), 4);
        assert_eq!(d.relator_count(), 4);
    }

    #[test]
    fn trivial_relators_dropped() {
        let p = FinitePresentation::parse(&["a"], &["aA", "a^2"]).unwrap();
        assert_eq!(p.relator_count(), 1);
    }

    #[test]
    fn bad_generator_names() {
        assert!(FinitePresentation::parse(&["a", "a"], &[] as &[&str]).is_err());
        assert!(FinitePresentation::parse(&["ab"], &[] as &[&str]).is_err());
    }
}
