//! Tietze elimination of generators that occur once in some relator.

use log::debug;

use super::FinitePresentation;
use crate::words::{Letter, Word};

/// Longest relator the elimination may create.
pub const DEFAULT_LENGTH_BUDGET: usize = 20_000;

#[derive(Clone, Debug)]
pub struct TietzeResult {
    pub presentation: FinitePresentation,
    /// Original generators of the input that survive, in order; new generator
    /// `j` is the input generator `kept[j]`.
    pub kept: Vec<usize>,
    /// Each input generator written in the surviving generators.
    pub substitution: Vec<Word>,
    /// Eliminations that were possible but skipped because a relator would have
    /// outgrown the budget.
    pub budget_exhausted: bool,
}

impl TietzeResult {
    /// Rewrites a word over the input generators into the output generators.
    pub fn map_word(&self, w: &Word) -> Word {
        w.substitute(&self.substitution)
    }
}

/// Repeatedly solves a relator `u·g^±1·v` for a generator `g` that occurs in
/// it exactly once and substitutes the solution everywhere else.
///
/// Among all candidates the one that grows the total relator length least is
/// taken (ties: lowest generator, then lowest relator index). Candidates that
/// would create a relator longer than `budget` are skipped.
pub fn tietze_eliminate(p: &FinitePresentation, budget: usize) -> TietzeResult {
    let n = p.rank();
    // Working state over the original indices; eliminated generators disappear
    // from every relator and from the substitution map.
    let mut alive = vec![true; n];
    let mut rels: Vec<Word> = Vec::new();
    push_canonical(&mut rels, p.relators().iter().cloned());
    let mut subst: Vec<Word> = (0..n).map(Word::generator).collect();
    let budget_exhausted;

    loop {
        // occ[g][r] = occurrences of g in relator r.
        let mut occ = vec![vec![0usize; rels.len()]; n];
        for (ri, r) in rels.iter().enumerate() {
            for l in r.letters() {
                occ[l.gen][ri] += 1;
            }
        }
        let mut best: Option<(i64, usize, usize)> = None;
        let mut skipped = false;
        for g in (0..n).filter(|&g| alive[g]) {
            for ri in 0..rels.len() {
                if occ[g][ri] != 1 {
                    continue;
                }
                let solved_len = rels[ri].len() as i64 - 1;
                let mut growth = -(rels[ri].len() as i64);
                let mut longest = 0usize;
                for (rj, &k) in occ[g].iter().enumerate() {
                    if rj == ri || k == 0 {
                        continue;
                    }
                    growth += k as i64 * (solved_len - 1);
                    longest = longest.max(rels[rj].len() + k * solved_len as usize);
                }
                if longest > budget {
                    skipped = true;
                    continue;
                }
                let cand = (growth, g, ri);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
        }
        let Some((_, g, ri)) = best else {
            budget_exhausted = skipped;
            break;
        };
        let value = solve_for(&rels[ri], g);
        let mut images: Vec<Word> = (0..n).map(Word::generator).collect();
        images[g] = value;
        let old = std::mem::take(&mut rels);
        push_canonical(&mut rels, old.into_iter().enumerate().filter(|&(j, _)| j != ri).map(|(_, r)| r.substitute(&images)));
        for s in subst.iter_mut() {
            *s = s.substitute(&images);
        }
        alive[g] = false;
        debug!(
            "eliminated generator {g}: {} generators, {} relators, total length {}",
            alive.iter().filter(|&&a| a).count(),
            rels.len(),
            rels.iter().map(Word::len).sum::<usize>()
        );
    }

    let kept: Vec<usize> = (0..n).filter(|&g| alive[g]).collect();
    let mut renumber: Vec<Word> = vec![Word::identity(); n];
    for (j, &g) in kept.iter().enumerate() {
        renumber[g] = Word::generator(j);
    }
    let names: Vec<String> = if kept.len() == n {
        p.names().to_vec()
    } else if p.names().iter().all(|s| s.len() == 1) {
        kept.iter().map(|&g| p.names()[g].clone()).collect()
    } else {
        super::default_names(kept.len())
    };
    let relators: Vec<Word> = rels.iter().map(|r| r.substitute(&renumber)).collect();
    let substitution = subst.iter().map(|s| s.substitute(&renumber)).collect();
    TietzeResult {
        presentation: FinitePresentation::new(names, relators).expect("renumbered within range"),
        kept,
        substitution,
        budget_exhausted,
    }
}

/// Given `r = u·g^e·v` with a single occurrence of `g`, returns the word `g` equals.
fn solve_for(r: &Word, g: usize) -> Word {
    let letters = r.letters();
    let pos = letters.iter().position(|l| l.gen == g).expect("generator occurs");
    let u = Word::from_letters(letters[..pos].iter().copied());
    let v = Word::from_letters(letters[pos + 1..].iter().copied());
    // u g v = 1  =>  g = u⁻¹ v⁻¹;   u g⁻¹ v = 1  =>  g = v u
    if letters[pos].inverse {
        v.multiply(&u)
    } else {
        u.invert().multiply(&v.invert())
    }
}

/// Appends cyclically reduced, nontrivial relators, skipping repeats (up to
/// rotation and inversion).
fn push_canonical(out: &mut Vec<Word>, rels: impl IntoIterator<Item = Word>) {
    let mut seen: std::collections::HashSet<Vec<Letter>> = out.iter().map(cyclic_key).collect();
    for r in rels {
        let r = r.cyclically_reduce();
        if r.is_empty() {
            continue;
        }
        if seen.insert(cyclic_key(&r)) {
            out.push(r);
        }
    }
}

fn cyclic_key(r: &Word) -> Vec<Letter> {
    let mut best: Option<Vec<Letter>> = None;
    for w in [r.clone(), r.invert()] {
        let s = w.letters();
        for k in 0..s.len() {
            let rot: Vec<Letter> = s[k..].iter().chain(&s[..k]).copied().collect();
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}
