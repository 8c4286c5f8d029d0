//! Lower-central-series quotients by the tails method.
//!
//! Class `c` is obtained from class `c − 1` by giving every non-defining
//! relation of the current pc presentation a new central "tail" generator,
//! collecting the consistency test words and the input relators, and reading
//! the new layer off the Hermite normal form of the resulting relations among
//! the tails.

use log::debug;
use num_traits::{One, ToPrimitive, Zero};

use super::pc::{for_each_consistency_pair, to_sparse, Definition, Elem, Exp, PcPresentation};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::presentations::FinitePresentation;
use crate::words::Word;
use crate::zlinalg::{cokernel_invariants, echelon, AbelianGroupInvariants, Int, IntMatrix};

pub const DEFAULT_CLASS: usize = 4;

/// Longest input word the collector accepts.
pub const MAX_WORD_LENGTH: usize = 1_000_000;

#[derive(Clone, Debug, Default)]
pub struct NqOptions {
    /// Run every associativity test word instead of only those of total
    /// weight at most the class being built.
    pub full_consistency: bool,
    pub budget: Budget,
}

pub fn nilpotent_quotient(p: &FinitePresentation, class: usize) -> Result<PcPresentation> {
    nilpotent_quotient_with(p, class, &NqOptions::default())
}

pub fn nilpotent_quotient_with(p: &FinitePresentation, class: usize, opts: &NqOptions) -> Result<PcPresentation> {
    let mut pc = PcPresentation::trivial(p.rank());
    let mut settled = false;
    for c in 1..=class {
        if settled {
            pc.class = c;
            pc.sections.push(AbelianGroupInvariants::trivial());
            continue;
        }
        opts.budget.check("nilpotent quotient")?;
        pc = next_class(&pc, p.relators(), c, opts)?;
        debug!("class {c}: {} generators, section {}", pc.ngens(), pc.sections[c - 1]);
        // γ_c = γ_{c+1} forces every later section to vanish.
        settled = pc.layer(c).is_empty();
    }
    Ok(pc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Image(usize),
    Power(usize),
    Commutator(usize, usize),
}

impl Slot {
    fn definition(self) -> Definition {
        match self {
            Slot::Image(x) => Definition::Image(x),
            Slot::Power(i) => Definition::Power(i),
            Slot::Commutator(j, i) => Definition::Commutator(j, i),
        }
    }
}

fn tail_slots(pc: &PcPresentation, c: usize) -> Vec<Slot> {
    let defs = pc.definitions();
    let n = pc.ngens();
    let mut slots: Vec<Slot> = (0..pc.images.len())
        .filter(|&x| !defs.contains(&Definition::Image(x)))
        .map(Slot::Image)
        .collect();
    slots.extend((0..n).filter(|&i| pc.powers[i].is_some() && !defs.contains(&Definition::Power(i))).map(Slot::Power));
    // Commutators [weight c−1, weight 1] go last so that the echelon form
    // eliminates the other tails first and new generators get commutator
    // definitions whenever possible.
    let mut preferred = Vec::new();
    for j in 0..n {
        for i in 0..j {
            let (wj, wi) = (pc.weight(j), pc.weight(i));
            if wj + wi > c || defs.contains(&Definition::Commutator(j, i)) {
                continue;
            }
            if wj == c - 1 && wi == 1 {
                preferred.push(Slot::Commutator(j, i));
            } else {
                slots.push(Slot::Commutator(j, i));
            }
        }
    }
    slots.extend(preferred);
    slots
}

fn with_tail(base: &Elem, tail: usize) -> Elem {
    let mut e = base.clone();
    e.push((tail, 1));
    e
}

/// The presentation with one central tail generator per slot, placed after
/// all existing generators.
fn extend_with_tails(pc: &PcPresentation, slots: &[Slot], c: usize) -> PcPresentation {
    let n = pc.ngens();
    let total = n + slots.len();
    let mut weights = pc.weights.clone();
    weights.resize(total, c);
    let mut powers = pc.powers.clone();
    powers.resize(total, None);
    let mut comms = pc.comms.clone();
    for t in n..total {
        comms.push(vec![None; t]);
    }
    let mut images = pc.images.clone();
    let mut definitions = pc.definitions.clone();
    for (k, &slot) in slots.iter().enumerate() {
        let tail = n + k;
        definitions.push(slot.definition());
        match slot {
            Slot::Image(x) => images[x] = with_tail(&images[x], tail),
            Slot::Power(i) => {
                let (d, w) = powers[i].clone().expect("power slot");
                powers[i] = Some((d, with_tail(&w, tail)));
            }
            Slot::Commutator(j, i) => {
                let base = comms[j][i].clone().unwrap_or_default();
                comms[j][i] = Some(with_tail(&base, tail));
            }
        }
    }
    PcPresentation::new(weights, powers, comms, definitions, images, c)
}

/// Normal form of a word in the input generators.
pub(crate) fn evaluate_with(col: &super::pc::Collector<'_>, images: &[Elem], inverses: &[Elem], w: &Word) -> Result<Vec<Exp>> {
    if w.len() > MAX_WORD_LENGTH {
        return Err(Error::Budget { what: "collection", detail: format!("word of length {} exceeds {MAX_WORD_LENGTH}", w.len()) });
    }
    let mut x = col.presentation().identity();
    for l in w.letters() {
        if l.gen >= images.len() {
            return Err(Error::GeneratorOutOfRange { gen: l.gen, rank: images.len() });
        }
        col.mul_elem(&mut x, if l.inverse { &inverses[l.gen] } else { &images[l.gen] })?;
    }
    Ok(x)
}

/// Keeps a growing set of relation rows small by periodic echelon reduction.
struct RelationRows {
    width: usize,
    rows: Vec<Vec<Int>>,
}

impl RelationRows {
    fn push(&mut self, row: Vec<Int>) {
        if row.iter().all(Zero::is_zero) {
            return;
        }
        self.rows.push(row);
        if self.rows.len() > 2 * self.width + 16 {
            self.reduce();
        }
    }

    fn reduce(&mut self) {
        let m = IntMatrix::from_rows(self.width, std::mem::take(&mut self.rows));
        self.rows = echelon(&m, false).hnf.rows().to_vec();
    }
}

fn tail_row(lhs: &[Exp], rhs: &[Exp], n: usize, what: &dyn std::fmt::Display) -> Result<Vec<Int>> {
    if lhs[..n] != rhs[..n] {
        return Err(Error::Inconsistent(format!("{what} disagrees below the new layer")));
    }
    Ok(lhs[n..].iter().zip(&rhs[n..]).map(|(a, b)| Int::from(*a) - Int::from(*b)).collect())
}

fn to_exp(v: &Int) -> Result<Exp> {
    v.to_i128().ok_or(Error::Overflow)
}

fn next_class(pc: &PcPresentation, relators: &[Word], c: usize, opts: &NqOptions) -> Result<PcPresentation> {
    let n = pc.ngens();
    let slots = tail_slots(pc, c);
    let ext = extend_with_tails(pc, &slots, c);
    let t = slots.len();
    let mut rel = RelationRows { width: t, rows: Vec::new() };
    {
        let col = ext.collector();
        for_each_consistency_pair(&col, c, opts.full_consistency, n, |word, lhs, rhs| {
            rel.push(tail_row(lhs, rhs, n, &word)?);
            Ok(())
        })?;
        opts.budget.check("nilpotent quotient")?;
        let inverses: Vec<Elem> = ext.images.iter().map(|e| col.inverse(e)).collect::<Result<_>>()?;
        for (k, r) in relators.iter().enumerate() {
            let x = evaluate_with(&col, &ext.images, &inverses, r)?;
            rel.push(tail_row(&x, &ext.identity(), n, &format!("relator {k}"))?);
            if k % 64 == 0 {
                opts.budget.check("nilpotent quotient")?;
            }
        }
    }
    rel.reduce();
    let hnf = IntMatrix::from_rows(t, rel.rows);
    let ech = echelon(&hnf, false);
    let pivot_row: Vec<Option<usize>> = {
        let mut v = vec![None; t];
        for (r, &p) in ech.pivots.iter().enumerate() {
            v[p] = Some(r);
        }
        v
    };
    // A slot survives as a generator unless its pivot is 1.
    let survives: Vec<bool> = (0..t).map(|s| pivot_row[s].is_none_or(|r| !ech.hnf[(r, s)].is_one())).collect();
    let mut new_index = vec![usize::MAX; t];
    let mut count = 0;
    for s in 0..t {
        if survives[s] {
            new_index[s] = n + count;
            count += 1;
        }
    }
    let total = n + count;
    // Each tail written in the surviving generators (unnormalized).
    let mut expr: Vec<Vec<(usize, Exp)>> = Vec::with_capacity(t);
    for s in 0..t {
        if survives[s] {
            expr.push(vec![(new_index[s], 1)]);
            continue;
        }
        let r = pivot_row[s].expect("eliminated slot has a pivot");
        let mut e = Vec::new();
        for q in s + 1..t {
            let h = &ech.hnf[(r, q)];
            if !h.is_zero() {
                debug_assert!(survives[q]);
                e.push((new_index[q], -to_exp(h)?));
            }
        }
        expr.push(e);
    }
    let mut layer_powers: Vec<Option<(Exp, Elem)>> = vec![None; count];
    for s in 0..t {
        let Some(r) = pivot_row[s] else { continue };
        let d = to_exp(&ech.hnf[(r, s)])?;
        if d == 1 {
            continue;
        }
        let mut w = Vec::new();
        for q in s + 1..t {
            let h = &ech.hnf[(r, q)];
            if !h.is_zero() {
                w.push((new_index[q], -to_exp(h)?));
            }
        }
        layer_powers[new_index[s] - n] = Some((d, w));
    }
    // Normalize the layer's own power relations, last generator first.
    for g in (0..count).rev() {
        if let Some((d, w)) = layer_powers[g].take() {
            let w = normalize_layer(&w, &layer_powers, n, count)?;
            layer_powers[g] = Some((d, w));
        }
    }
    let tail_part = |s: usize| normalize_layer(&expr[s], &layer_powers, n, count);

    let mut weights = pc.weights.clone();
    weights.resize(total, c);
    let mut powers = pc.powers.clone();
    let mut comms = pc.comms.clone();
    let mut images = pc.images.clone();
    let mut definitions = pc.definitions.clone();
    for (s, &slot) in slots.iter().enumerate() {
        if survives[s] {
            definitions.push(slot.definition());
        }
        let tail = tail_part(s)?;
        if tail.is_empty() {
            continue;
        }
        match slot {
            Slot::Image(x) => images[x].extend(tail),
            Slot::Power(i) => {
                if let Some((_, w)) = powers[i].as_mut() {
                    w.extend(tail);
                }
            }
            Slot::Commutator(j, i) => comms[j][i].get_or_insert_with(Vec::new).extend(tail),
        }
    }
    for p in layer_powers {
        powers.push(p);
    }
    for g in n..total {
        comms.push(vec![None; g]);
    }
    let mut next = PcPresentation::new(weights, powers, comms, definitions, images, c);
    next.sections = pc.sections.clone();
    next.sections.push(cokernel_invariants(&next.layer_relations(c).transpose()));
    Ok(next)
}

/// Normal form of a product of central layer generators.
fn normalize_layer(
    v: &[(usize, Exp)],
    powers: &[Option<(Exp, Elem)>],
    offset: usize,
    count: usize,
) -> Result<Elem> {
    let mut x: Vec<Exp> = vec![0; count];
    for &(g, e) in v {
        x[g - offset] = super::pc::checked_add(x[g - offset], e)?;
    }
    for g in 0..count {
        if let Some((d, w)) = &powers[g] {
            let q = x[g].div_euclid(*d);
            x[g] = x[g].rem_euclid(*d);
            if q != 0 {
                for &(h, e) in w {
                    let k = h - offset;
                    x[k] = super::pc::checked_add(x[k], super::pc::checked_mul(q, e)?)?;
                }
            }
        }
    }
    Ok(to_sparse(&x).into_iter().map(|(g, e)| (g + offset, e)).collect())
}
