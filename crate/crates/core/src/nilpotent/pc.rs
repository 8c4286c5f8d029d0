//! Weighted power-commutator presentations and collection.
//!
//! Elements are normal words `g_1^{e_1} ··· g_n^{e_n}` stored as exponent
//! vectors. Relations are `g_i^{d_i} = w_i` (when `g_i` has a power
//! relation) and `[g_j, g_i] = c_{ji}` for `j > i`, with `w_i` and `c_{ji}`
//! normal words in generators of larger index. The commutator convention is
//! `[a, b] = a⁻¹b⁻¹ab`, so `g_i⁻¹ g_j g_i = g_j c_{ji}`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::zlinalg::{AbelianGroupInvariants, Int, IntMatrix};

pub type Exp = i128;

/// Sparse normal word: `(generator, exponent)` pairs, increasing generators,
/// no zero exponents.
pub type Elem = Vec<(usize, Exp)>;

/// How a pc generator was introduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Definition {
    /// Image of an input generator.
    Image(usize),
    /// Tail of the relation `[g_j, g_i] = ...`.
    Commutator(usize, usize),
    /// Tail of the power relation of `g_i`.
    Power(usize),
}

type InvTable = HashMap<(usize, usize), Elem>;

#[derive(Debug)]
pub struct PcPresentation {
    pub(crate) weights: Vec<usize>,
    pub(crate) powers: Vec<Option<(Exp, Elem)>>,
    /// `comms[j][i]` for `i < j`; `None` when the generators commute.
    pub(crate) comms: Vec<Vec<Option<Elem>>>,
    pub(crate) definitions: Vec<Definition>,
    /// Images of the input generators.
    pub(crate) images: Vec<Elem>,
    pub(crate) class: usize,
    pub(crate) sections: Vec<AbelianGroupInvariants>,
    inv_cache: OnceLock<InvTable>,
}

impl Clone for PcPresentation {
    fn clone(&self) -> Self {
        PcPresentation {
            weights: self.weights.clone(),
            powers: self.powers.clone(),
            comms: self.comms.clone(),
            definitions: self.definitions.clone(),
            images: self.images.clone(),
            class: self.class,
            sections: self.sections.clone(),
            inv_cache: OnceLock::new(),
        }
    }
}

pub(crate) fn checked_add(a: Exp, b: Exp) -> Result<Exp> {
    a.checked_add(b).ok_or(Error::Overflow)
}

pub(crate) fn checked_mul(a: Exp, b: Exp) -> Result<Exp> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

pub(crate) fn to_sparse(x: &[Exp]) -> Elem {
    x.iter().enumerate().filter(|(_, &e)| e != 0).map(|(i, &e)| (i, e)).collect()
}

impl PcPresentation {
    pub(crate) fn new(
        weights: Vec<usize>,
        powers: Vec<Option<(Exp, Elem)>>,
        comms: Vec<Vec<Option<Elem>>>,
        definitions: Vec<Definition>,
        images: Vec<Elem>,
        class: usize,
    ) -> Self {
        PcPresentation {
            weights,
            powers,
            comms,
            definitions,
            images,
            class,
            sections: Vec::new(),
            inv_cache: OnceLock::new(),
        }
    }

    /// The presentation of the trivial group receiving `rank` input generators.
    pub(crate) fn trivial(rank: usize) -> Self {
        Self::new(Vec::new(), Vec::new(), Vec::new(), Vec::new(), vec![Vec::new(); rank], 0)
    }

    pub fn ngens(&self) -> usize {
        self.weights.len()
    }

    pub fn class(&self) -> usize {
        self.class
    }

    pub fn weights(&self) -> &[usize] {
        &self.weights
    }

    pub fn weight(&self, g: usize) -> usize {
        self.weights[g]
    }

    pub fn definitions(&self) -> &[Definition] {
        &self.definitions
    }

    /// Relative order of `g`, if it has a power relation.
    pub fn relative_order(&self, g: usize) -> Option<Exp> {
        self.powers[g].as_ref().map(|(d, _)| *d)
    }

    pub fn power_rhs(&self, g: usize) -> Option<&Elem> {
        self.powers[g].as_ref().map(|(_, w)| w)
    }

    /// `[g_j, g_i]` for `j > i`, `None` if trivial.
    pub fn commutator_rhs(&self, j: usize, i: usize) -> Option<&Elem> {
        self.comms[j][i].as_ref()
    }

    pub fn images(&self) -> &[Elem] {
        &self.images
    }

    /// Invariants of `γ_k/γ_{k+1}` for `k = 1..=class`.
    pub fn sections(&self) -> &[AbelianGroupInvariants] {
        &self.sections
    }

    /// Indices of the generators of weight `k`.
    pub fn layer(&self, k: usize) -> std::ops::Range<usize> {
        let start = self.weights.iter().position(|&w| w >= k).unwrap_or(self.ngens());
        let end = self.weights.iter().position(|&w| w > k).unwrap_or(self.ngens());
        start..end.max(start)
    }

    /// Relations of the weight-`k` section on its generators: one row
    /// `d·e_p − (weight-k part of w_p)` per power relation in the layer.
    pub fn layer_relations(&self, k: usize) -> IntMatrix {
        let layer = self.layer(k);
        let n = layer.len();
        let mut rows = Vec::new();
        for p in layer.clone() {
            if let Some((d, w)) = &self.powers[p] {
                let mut row = vec![Int::from(0); n];
                row[p - layer.start] = Int::from(*d);
                for &(t, e) in w {
                    if layer.contains(&t) {
                        row[t - layer.start] -= Int::from(e);
                    }
                }
                rows.push(row);
            }
        }
        IntMatrix::from_rows(n, rows)
    }

    pub fn collector(&self) -> Collector<'_> {
        Collector::new(self)
    }

    pub fn identity(&self) -> Vec<Exp> {
        vec![0; self.ngens()]
    }

    /// Runs the standard consistency test words and returns the ones whose two
    /// collections disagree. With `full` unset, associativity triples are
    /// limited to total weight at most the class.
    pub fn consistency_failures(&self, full: bool) -> Result<Vec<String>> {
        let col = self.collector();
        let mut failures = Vec::new();
        for_each_consistency_pair(&col, self.class, full, self.ngens(), |word, lhs, rhs| {
            if lhs != rhs {
                failures.push(word.to_string());
            }
            Ok(())
        })?;
        Ok(failures)
    }

    pub fn is_consistent(&self) -> Result<bool> {
        Ok(self.consistency_failures(true)?.is_empty())
    }
}

/// A consistency test word, named by its first bracketing.
#[derive(Clone, Copy, Debug)]
pub(crate) enum TestWord {
    Triple(usize, usize, usize),
    PowerLeft(usize, Exp, usize),
    PowerSelf(usize, Exp),
    PowerRight(usize, usize, Exp),
    Inverse(usize, usize),
}

impl std::fmt::Display for TestWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            TestWord::Triple(k, j, i) => write!(f, "(g{k} g{j}) g{i}"),
            TestWord::PowerLeft(j, d, i) => write!(f, "(g{j}^{d}) g{i}"),
            TestWord::PowerSelf(j, d) => write!(f, "g{j} (g{j}^{d})"),
            TestWord::PowerRight(j, i, d) => write!(f, "g{j} (g{i}^{d})"),
            TestWord::Inverse(j, i) => write!(f, "(g{j} g{i}^-1) g{i}"),
        }
    }
}

/// Collects both sides of every consistency test word for the first `upto`
/// generators and hands them to `f`. Generators past `upto` are assumed
/// central.
pub(crate) fn for_each_consistency_pair(
    col: &Collector<'_>,
    class: usize,
    full: bool,
    upto: usize,
    mut f: impl FnMut(TestWord, &[Exp], &[Exp]) -> Result<()>,
) -> Result<()> {
    let pc = col.pc;
    let n = pc.ngens();
    let w = &pc.weights;
    let unit = |g: usize| {
        let mut x = vec![0; n];
        x[g] = 1;
        x
    };
    // (g_k g_j) g_i = g_k (g_j g_i)
    for k in 0..upto {
        for j in 0..k {
            for i in 0..j {
                if !full && w[i] + w[j] + w[k] > class {
                    continue;
                }
                let mut lhs = unit(k);
                col.mul_gen_pow(&mut lhs, j, 1)?;
                col.mul_gen_pow(&mut lhs, i, 1)?;
                let mut ji = unit(j);
                col.mul_gen_pow(&mut ji, i, 1)?;
                let mut rhs = unit(k);
                col.mul_elem(&mut rhs, &to_sparse(&ji))?;
                f(TestWord::Triple(k, j, i), &lhs, &rhs)?;
            }
        }
    }
    for j in 0..upto {
        if let Some((d, wj)) = &pc.powers[j] {
            // (g_j^d) g_i = g_j^{d-1} (g_j g_i)
            for i in 0..j {
                let mut lhs = vec![0; n];
                col.mul_elem(&mut lhs, wj)?;
                col.mul_gen_pow(&mut lhs, i, 1)?;
                let mut ji = unit(j);
                col.mul_gen_pow(&mut ji, i, 1)?;
                let mut rhs = vec![0; n];
                col.mul_gen_pow(&mut rhs, j, d - 1)?;
                col.mul_elem(&mut rhs, &to_sparse(&ji))?;
                f(TestWord::PowerLeft(j, *d, i), &lhs, &rhs)?;
            }
            // g_j (g_j^d) = (g_j^d) g_j
            let mut lhs = unit(j);
            col.mul_elem(&mut lhs, wj)?;
            let mut rhs = vec![0; n];
            col.mul_elem(&mut rhs, wj)?;
            col.mul_gen_pow(&mut rhs, j, 1)?;
            f(TestWord::PowerSelf(j, *d), &lhs, &rhs)?;
        }
    }
    for i in 0..upto {
        for j in i + 1..upto {
            match &pc.powers[i] {
                // g_j (g_i^d) = (g_j g_i) g_i^{d-1}
                Some((d, wi)) => {
                    let mut lhs = unit(j);
                    col.mul_elem(&mut lhs, wi)?;
                    let mut rhs = unit(j);
                    col.mul_gen_pow(&mut rhs, i, 1)?;
                    col.mul_gen_pow(&mut rhs, i, d - 1)?;
                    f(TestWord::PowerRight(j, i, *d), &lhs, &rhs)?;
                }
                // g_j = (g_j g_i⁻¹) g_i
                None => {
                    let mut lhs = unit(j);
                    col.mul_gen_pow(&mut lhs, i, -1)?;
                    col.mul_gen_pow(&mut lhs, i, 1)?;
                    f(TestWord::Inverse(j, i), &lhs, &unit(j))?;
                }
            }
        }
    }
    Ok(())
}

/// Collection from the left, with memoized conjugates.
pub struct Collector<'a> {
    pc: &'a PcPresentation,
    inv: Option<&'a InvTable>,
    building: RefCell<InvTable>,
    cache: RefCell<HashMap<(usize, usize, Exp), Elem>>,
}

impl<'a> Collector<'a> {
    fn new(pc: &'a PcPresentation) -> Self {
        if let Some(t) = pc.inv_cache.get() {
            return Collector { pc, inv: Some(t), building: RefCell::default(), cache: RefCell::default() };
        }
        let col = Collector { pc, inv: None, building: RefCell::default(), cache: RefCell::default() };
        // g_j g_l g_j⁻¹, computed for j from the top down so that every
        // product involved only needs conjugates by later generators.
        let n = pc.ngens();
        for j in (0..n).rev() {
            for l in (j + 1..n).rev() {
                let Some(c) = &pc.comms[l][j] else { continue };
                let value = col.inverse_conjugate(l, j, c).expect("collection of inverse conjugates overflowed");
                col.building.borrow_mut().insert((l, j), value);
            }
        }
        let table = col.building.into_inner();
        let _ = pc.inv_cache.set(table);
        Collector { pc, inv: pc.inv_cache.get(), building: RefCell::default(), cache: RefCell::default() }
    }

    /// `ψ(g_l) = g_l · ψ(c)⁻¹` where `ψ` is conjugation by `g_j⁻¹` and `c = [g_l, g_j]`.
    fn inverse_conjugate(&self, l: usize, j: usize, c: &Elem) -> Result<Elem> {
        let n = self.pc.ngens();
        let mut psi_c = vec![0; n];
        for &(t, e) in c {
            let p = self.conj_gen_pow(t, j, -1)?;
            let pe = self.pow(&p, e)?;
            self.mul_elem(&mut psi_c, &pe)?;
        }
        let inv = self.inverse(&to_sparse(&psi_c))?;
        let mut x = vec![0; n];
        x[l] = 1;
        self.mul_elem(&mut x, &inv)?;
        Ok(to_sparse(&x))
    }

    pub fn presentation(&self) -> &PcPresentation {
        self.pc
    }

    /// `x ← x · g_j^m`.
    pub fn mul_gen_pow(&self, x: &mut [Exp], j: usize, m: Exp) -> Result<()> {
        if m == 0 {
            return Ok(());
        }
        let n = x.len();
        let mut suffix: Elem = Vec::new();
        for (t, xt) in x.iter_mut().enumerate().skip(j + 1) {
            if *xt != 0 {
                suffix.push((t, *xt));
                *xt = 0;
            }
        }
        let e = checked_add(x[j], m)?;
        match &self.pc.powers[j] {
            Some((d, w)) => {
                let (q, r) = (e.div_euclid(*d), e.rem_euclid(*d));
                x[j] = r;
                if q != 0 {
                    // x has nothing past j yet, so appending is multiplication.
                    for (t, v) in self.pow(w, q)? {
                        x[t] = v;
                    }
                }
            }
            None => x[j] = e,
        }
        debug_assert_eq!(x.len(), n);
        if suffix.is_empty() {
            return Ok(());
        }
        let commutes = suffix.iter().all(|&(l, _)| self.pc.comms[l][j].is_none());
        let moved = if commutes { suffix } else { self.conj_elem(&suffix, j, m)? };
        self.mul_elem(x, &moved)
    }

    /// `x ← x · y`.
    pub fn mul_elem(&self, x: &mut [Exp], y: &Elem) -> Result<()> {
        for &(t, e) in y {
            self.mul_gen_pow(x, t, e)?;
        }
        Ok(())
    }

    pub fn multiply(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        let mut x = self.dense(a);
        self.mul_elem(&mut x, b)?;
        Ok(to_sparse(&x))
    }

    pub fn dense(&self, a: &Elem) -> Vec<Exp> {
        let mut x = vec![0; self.pc.ngens()];
        for &(t, e) in a {
            x[t] = e;
        }
        x
    }

    pub fn inverse(&self, y: &Elem) -> Result<Elem> {
        let mut x = vec![0; self.pc.ngens()];
        for &(t, e) in y.iter().rev() {
            self.mul_gen_pow(&mut x, t, e.checked_neg().ok_or(Error::Overflow)?)?;
        }
        Ok(to_sparse(&x))
    }

    pub fn pow(&self, y: &Elem, q: Exp) -> Result<Elem> {
        if q == 0 || y.is_empty() {
            return Ok(Vec::new());
        }
        if q == 1 {
            return Ok(y.clone());
        }
        let (base, mut q) = if q < 0 { (self.inverse(y)?, q.checked_neg().ok_or(Error::Overflow)?) } else { (y.clone(), q) };
        if base.len() == 1 {
            let (t, e) = base[0];
            let mut x = vec![0; self.pc.ngens()];
            self.mul_gen_pow(&mut x, t, checked_mul(e, q)?)?;
            return Ok(to_sparse(&x));
        }
        let mut result = vec![0; self.pc.ngens()];
        let mut base = base;
        loop {
            if q & 1 == 1 {
                self.mul_elem(&mut result, &base)?;
            }
            q >>= 1;
            if q == 0 {
                break;
            }
            base = self.multiply(&base, &base)?;
        }
        Ok(to_sparse(&result))
    }

    /// `g_j^{-m} · s · g_j^m` for `s` in generators after `j`.
    fn conj_elem(&self, s: &Elem, j: usize, m: Exp) -> Result<Elem> {
        let mut x = vec![0; self.pc.ngens()];
        for &(l, e) in s {
            let c = self.conj_gen_pow(l, j, m)?;
            if e == 1 {
                self.mul_elem(&mut x, &c)?;
            } else {
                let ce = self.pow(&c, e)?;
                self.mul_elem(&mut x, &ce)?;
            }
        }
        Ok(to_sparse(&x))
    }

    /// `g_j^{-m} · g_l · g_j^m` for `l > j`.
    fn conj_gen_pow(&self, l: usize, j: usize, m: Exp) -> Result<Elem> {
        let Some(c) = &self.pc.comms[l][j] else {
            return Ok(vec![(l, 1)]);
        };
        match m {
            0 => return Ok(vec![(l, 1)]),
            1 => {
                let mut out = Vec::with_capacity(c.len() + 1);
                out.push((l, 1));
                out.extend_from_slice(c);
                return Ok(out);
            }
            -1 => {
                let found = match self.inv {
                    Some(t) => t.get(&(l, j)).cloned(),
                    None => self.building.borrow().get(&(l, j)).cloned(),
                };
                return found.ok_or_else(|| Error::Inconsistent(format!("missing inverse conjugate ({l}, {j})")));
            }
            _ => {}
        }
        if let Some(v) = self.cache.borrow().get(&(l, j, m)) {
            return Ok(v.clone());
        }
        let a = m / 2;
        let b = m - a;
        let inner = self.conj_gen_pow(l, j, b)?;
        let v = self.conj_elem(&inner, j, a)?;
        self.cache.borrow_mut().insert((l, j, m), v.clone());
        Ok(v)
    }

    /// `[a, b] = a⁻¹ b⁻¹ a b`.
    pub fn commutator(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        let mut x = self.dense(&self.inverse(a)?);
        self.mul_elem(&mut x, &self.inverse(b)?)?;
        self.mul_elem(&mut x, a)?;
        self.mul_elem(&mut x, b)?;
        Ok(to_sparse(&x))
    }
}
