//! Todd–Coxeter enumeration of the cosets of the trivial subgroup.

use std::str::FromStr;

use log::debug;

use crate::error::{Error, Result};
use crate::presentations::FinitePresentation;
use crate::words::{Letter, Word};

pub const DEFAULT_MAX_COSETS: usize = 1_000_000;

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Relator tracing with immediate coincidence processing.
    #[default]
    Hlt,
    /// Define the first empty entry and push deductions through every relator.
    Felsch,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hlt" => Ok(Strategy::Hlt),
            "felsch" => Ok(Strategy::Felsch),
            other => Err(Error::Invalid(format!("unknown strategy {other:?} (expected hlt or felsch)"))),
        }
    }
}

/// A coset table for the action of the presented group on itself.
///
/// Columns are indexed by [`Letter::column`]. Coset 0 is the identity and the
/// remaining cosets are numbered in breadth-first order.
#[derive(Clone, Debug)]
pub struct CosetTable {
    presentation: FinitePresentation,
    rows: Vec<Vec<usize>>,
    complete: bool,
}

impl CosetTable {
    pub fn presentation(&self) -> &FinitePresentation {
        &self.presentation
    }

    pub fn coset_count(&self) -> usize {
        self.rows.len()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn rank(&self) -> usize {
        self.presentation.rank()
    }

    /// `c · l`.
    pub fn act(&self, c: usize, l: Letter) -> usize {
        self.rows[c][l.column()]
    }

    pub fn trace(&self, c: usize, w: &Word) -> usize {
        w.letters().iter().fold(c, |c, &l| self.act(c, l))
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// The image of each coset under each generator.
    pub fn permutation_action(&self) -> Result<Vec<Vec<usize>>> {
        if !self.complete {
            return Err(Error::IncompleteTable);
        }
        Ok((0..self.rank()).map(|g| self.rows.iter().map(|r| r[2 * g]).collect()).collect())
    }

    pub fn group_order(&self) -> Result<usize> {
        if !self.complete {
            return Err(Error::IncompleteTable);
        }
        Ok(self.rows.len())
    }
}

pub fn todd_coxeter(p: &FinitePresentation, max_cosets: usize) -> Result<CosetTable> {
    todd_coxeter_with(p, max_cosets, Strategy::Hlt)
}

pub fn todd_coxeter_with(p: &FinitePresentation, max_cosets: usize, strategy: Strategy) -> Result<CosetTable> {
    let relators: Vec<Vec<Letter>> = p
        .relators()
        .iter()
        .map(|r| r.cyclically_reduce().letters().to_vec())
        .filter(|r| !r.is_empty())
        .collect();
    let mut e = Enumerator::new(2 * p.rank(), max_cosets);
    match strategy {
        Strategy::Hlt => e.run_hlt(&relators)?,
        Strategy::Felsch => e.run_felsch(&relators)?,
    }
    let rows = e.standardize();
    debug!("enumeration finished: {} cosets, {} defined in total", rows.len(), e.parent.len());
    let table = CosetTable { presentation: p.clone(), rows, complete: true };
    for c in 0..table.coset_count() {
        for r in p.relators() {
            if table.trace(c, r) != c {
                return Err(Error::Inconsistent(format!("relator does not close at coset {c}")));
            }
        }
    }
    Ok(table)
}

struct Enumerator {
    ncols: usize,
    table: Vec<Vec<usize>>,
    parent: Vec<usize>,
    live: usize,
    max_live: usize,
    max_total: usize,
    /// Entries set since the last deduction pass (Felsch only).
    deductions: Vec<(usize, usize)>,
    record: bool,
}

fn inv_col(x: usize) -> usize {
    x ^ 1
}

impl Enumerator {
    fn new(ncols: usize, max_cosets: usize) -> Self {
        Enumerator {
            ncols,
            table: vec![vec![NONE; ncols]],
            parent: vec![0],
            live: 1,
            max_live: max_cosets.max(1),
            max_total: max_cosets.max(1).saturating_mul(16),
            deductions: Vec::new(),
            record: false,
        }
    }

    fn is_live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = c;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    fn set(&mut self, c: usize, x: usize, d: usize) {
        self.table[c][x] = d;
        self.table[d][inv_col(x)] = c;
        if self.record {
            self.deductions.push((c, x));
        }
    }

    fn define(&mut self, c: usize, x: usize) -> Result<usize> {
        if self.live >= self.max_live || self.table.len() >= self.max_total {
            return Err(Error::CosetLimit { limit: self.max_live });
        }
        let d = self.table.len();
        self.table.push(vec![NONE; self.ncols]);
        self.parent.push(d);
        self.live += 1;
        self.set(c, x, d);
        Ok(d)
    }

    fn merge(&mut self, a: usize, b: usize, queue: &mut Vec<usize>) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi] = lo;
        self.live -= 1;
        queue.push(hi);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for x in 0..self.ncols {
                let f = self.table[e][x];
                if f == NONE {
                    continue;
                }
                if self.table[f][inv_col(x)] == e {
                    self.table[f][inv_col(x)] = NONE;
                }
                let (e1, f1) = (self.rep(e), self.rep(f));
                let ex = self.table[e1][x];
                let fx = self.table[f1][inv_col(x)];
                if ex != NONE {
                    self.merge(f1, ex, &mut queue);
                } else if fx != NONE {
                    self.merge(e1, fx, &mut queue);
                } else {
                    self.set(e1, x, f1);
                }
            }
        }
    }

    /// Traces `w` from `c` from both ends, defining new cosets when `fill` is
    /// set, and records the resulting deduction or coincidence.
    fn scan(&mut self, c: usize, w: &[Letter], fill: bool) -> Result<()> {
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, w.len());
        loop {
            while i < j && self.table[f][w[i].column()] != NONE {
                f = self.table[f][w[i].column()];
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i && self.table[b][w[j - 1].inv().column()] != NONE {
                b = self.table[b][w[j - 1].inv().column()];
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i + 1 {
                self.set(f, w[i].column(), b);
                return Ok(());
            }
            if !fill {
                return Ok(());
            }
            self.define(f, w[i].column())?;
        }
    }

    fn run_hlt(&mut self, relators: &[Vec<Letter>]) -> Result<()> {
        let mut c = 0;
        while c < self.table.len() {
            for r in relators {
                if !self.is_live(c) {
                    break;
                }
                self.scan(c, r, true)?;
            }
            // Fill the rest of the row so the final table is complete.
            for x in 0..self.ncols {
                if !self.is_live(c) {
                    break;
                }
                if self.table[c][x] == NONE {
                    self.define(c, x)?;
                }
            }
            c += 1;
        }
        Ok(())
    }

    fn run_felsch(&mut self, relators: &[Vec<Letter>]) -> Result<()> {
        // Every cyclic rotation of every relator and its inverse, bucketed by first letter.
        let mut by_first: Vec<Vec<Vec<Letter>>> = vec![Vec::new(); self.ncols];
        for r in relators {
            let w = Word::from_letters(r.iter().copied());
            for base in [w.clone(), w.invert()] {
                for k in 0..base.len() {
                    let rot = base.rotate(k).letters().to_vec();
                    let bucket = &mut by_first[rot[0].column()];
                    if !bucket.contains(&rot) {
                        bucket.push(rot);
                    }
                }
            }
        }
        self.record = true;
        for r in relators {
            self.scan(0, r, true)?;
        }
        self.process_deductions(&by_first)?;
        let mut c = 0;
        while c < self.table.len() {
            let mut x = 0;
            while x < self.ncols && self.is_live(c) {
                if self.table[c][x] == NONE {
                    self.define(c, x)?;
                    self.process_deductions(&by_first)?;
                }
                x += 1;
            }
            c += 1;
        }
        self.record = false;
        Ok(())
    }

    fn process_deductions(&mut self, by_first: &[Vec<Vec<Letter>>]) -> Result<()> {
        while let Some((c, x)) = self.deductions.pop() {
            if !self.is_live(c) {
                continue;
            }
            let d = self.table[c][x];
            if d == NONE {
                continue;
            }
            for w in &by_first[x] {
                if !self.is_live(c) {
                    break;
                }
                self.scan(c, w, false)?;
            }
            let d = self.rep(d);
            for w in &by_first[inv_col(x)] {
                if !self.is_live(d) {
                    break;
                }
                self.scan(d, w, false)?;
            }
        }
        Ok(())
    }

    /// Renumbers the live cosets in breadth-first order from coset 0.
    fn standardize(&self) -> Vec<Vec<usize>> {
        let mut order = vec![0usize];
        let mut index = vec![NONE; self.table.len()];
        index[0] = 0;
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            i += 1;
            for x in 0..self.ncols {
                let d = self.table[c][x];
                debug_assert!(d != NONE && self.is_live(d));
                if index[d] == NONE {
                    index[d] = order.len();
                    order.push(d);
                }
            }
        }
        order.iter().map(|&c| self.table[c].iter().map(|&d| index[d]).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(gens: &[&str], rels: &[&str]) -> FinitePresentation {
        FinitePresentation::parse(gens, rels).unwrap()
    }

    #[test]
    fn small_orders() {
        for strategy in [Strategy::Hlt, Strategy::Felsch] {
            let t = |q: &FinitePresentation| todd_coxeter_with(q, 1000, strategy).unwrap().coset_count();
            assert_eq!(t(&p(&["x"], &["x"])), 1);
            assert_eq!(t(&p(&["a"], &["a^2"])), 2);
            assert_eq!(t(&p(&["a", "b"], &["a^2", "b^2", "(ab)^3"])), 6);
            assert_eq!(t(&p(&["a", "b"], &["a^2", "b^3", "(ab)^5"])), 60);
            assert_eq!(t(&p(&["a", "b"], &["a^5 = b^3", "b^3 = (ba)^2"])), 120);
        }
    }

    #[test]
    fn z2_action_is_transposition() {
        let t = todd_coxeter(&p(&["a"], &["a^2"]), 10).unwrap();
        assert_eq!(t.permutation_action().unwrap(), vec![vec![1, 0]]);
    }

    #[test]
    fn infinite_group_hits_limit() {
        let err = todd_coxeter(&p(&["a", "b"], &["[a,b]"]), 500).unwrap_err();
        assert!(matches!(err, Error::CosetLimit { limit: 500 }));
    }

    #[test]
    fn strategy_parse() {
        assert_eq!("Felsch".parse::<Strategy>().unwrap(), Strategy::Felsch);
        assert!("coxeter".parse::<Strategy>().is_err());
    }
}
