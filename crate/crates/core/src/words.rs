//! Free-group words over indexed generators.
//!
//! A [`Word`] is always kept freely reduced. Generator names live on the
//! presentation; words only carry indices.

use std::fmt;

use crate::error::{Error, Result};

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub const fn new(gen: usize, inverse: bool) -> Self {
        Letter { gen, inverse }
    }

    pub const fn pos(gen: usize) -> Self {
        Letter { gen, inverse: false }
    }

    pub const fn neg(gen: usize) -> Self {
        Letter { gen, inverse: true }
    }

    pub fn inv(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    /// Column index used by coset tables: `2*gen` for the generator, `2*gen+1`
    /// for its inverse.
    pub fn column(self) -> usize {
        2 * self.gen + self.inverse as usize
    }

    pub fn from_column(col: usize) -> Self {
        Letter { gen: col / 2, inverse: col % 2 == 1 }
    }

    fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }
}

/// A freely reduced word in a free group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(gen: usize) -> Self {
        Word(vec![Letter::pos(gen)])
    }

    /// Builds a word from arbitrary letters, reducing on the way in.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    /// Convenience constructor from signed 1-based indices: `3` is the third
    /// generator, `-3` its inverse. Zero is ignored.
    pub fn from_signed(letters: &[i64]) -> Self {
        Word::from_letters(letters.iter().filter(|&&s| s != 0).map(|&s| {
            Letter::new(s.unsigned_abs() as usize - 1, s < 0)
        }))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest generator index used, plus one.
    pub fn rank_bound(&self) -> usize {
        self.0.iter().map(|l| l.gen + 1).max().unwrap_or(0)
    }

    pub fn multiply(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    pub fn invert(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// `g⁻¹ · self · g`.
    pub fn conjugate(&self, g: &Word) -> Word {
        g.invert().multiply(self).multiply(g)
    }

    /// `self⁻¹ · k⁻¹ · self · k`.
    pub fn commutator(&self, k: &Word) -> Word {
        commutator(self, k)
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.invert() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.multiply(&base);
        }
        out
    }

    /// Exponent-sum vector of length `rank`.
    pub fn exponent_sums(&self, rank: usize) -> Result<Vec<i64>> {
        exponent_sums(self, rank)
    }

    /// Number of occurrences of `gen` (either sign).
    pub fn occurrences(&self, gen: usize) -> usize {
        self.0.iter().filter(|l| l.gen == gen).count()
    }

    /// Cyclically reduced conjugate.
    pub fn cyclically_reduce(&self) -> Word {
        let s = &self.0;
        let (mut i, mut j) = (0usize, s.len());
        while j > i + 1 && s[i].cancels(s[j - 1]) {
            i += 1;
            j -= 1;
        }
        Word(s[i..j].to_vec())
    }

    /// Rotates the word so that it starts at position `k`.
    pub fn rotate(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return self.clone();
        }
        let k = k % self.0.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word::from_letters(v)
    }

    /// Replaces every generator `g` by `images[g]`.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for l in &self.0 {
            let img = &images[l.gen];
            if l.inverse {
                for &m in img.0.iter().rev() {
                    push_reduced(&mut out, m.inv());
                }
            } else {
                for &m in &img.0 {
                    push_reduced(&mut out, m);
                }
            }
        }
        Word(out)
    }

    /// Renders with single-letter names when all names are single lowercase
    /// letters, else with `x1 x2^-1` indexed syntax.
    pub fn render(&self, names: &[String]) -> String {
        let letter_names = names.len() <= 26
            && names.iter().all(|n| n.len() == 1 && n.chars().all(|c| c.is_ascii_lowercase()));
        if self.0.is_empty() {
            return "1".to_string();
        }
        if letter_names {
            self.0
                .iter()
                .map(|l| {
                    let c = names[l.gen].chars().next().unwrap();
                    if l.inverse {
                        c.to_ascii_uppercase()
                    } else {
                        c
                    }
                })
                .collect()
        } else {
            // Group runs of the same letter into powers.
            let mut parts = Vec::new();
            let mut i = 0;
            while i < self.0.len() {
                let l = self.0[i];
                let mut j = i;
                while j < self.0.len() && self.0[j] == l {
                    j += 1;
                }
                let e = (j - i) as i64 * l.sign();
                if e == 1 {
                    parts.push(format!("x{}", l.gen + 1));
                } else {
                    parts.push(format!("x{}^{}", l.gen + 1, e));
                }
                i = j;
            }
            parts.join(" ")
        }
    }
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if let Some(&last) = out.last() {
        if last.cancels(l) {
            out.pop();
            return;
        }
    }
    out.push(l);
}

/// Free reduction of an arbitrary letter sequence.
pub fn reduce(letters: &[Letter]) -> Word {
    Word::from_letters(letters.iter().copied())
}

pub fn multiply(u: &Word, v: &Word) -> Word {
    u.multiply(v)
}

pub fn invert(w: &Word) -> Word {
    w.invert()
}

pub fn conjugate(w: &Word, g: &Word) -> Word {
    w.conjugate(g)
}

pub fn commutator(h: &Word, k: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(2 * (h.len() + k.len()));
    for part in [h.invert(), k.invert(), h.clone(), k.clone()] {
        for l in part.0 {
            push_reduced(&mut out, l);
        }
    }
    Word(out)
}

pub fn exponent_sums(w: &Word, rank: usize) -> Result<Vec<i64>> {
    let mut v = vec![0i64; rank];
    for l in &w.0 {
        if l.gen >= rank {
            return Err(Error::GeneratorOutOfRange { gen: l.gen, rank });
        }
        v[l.gen] += l.sign();
    }
    Ok(v)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.rank_bound())
            .map(|i| {
                if self.rank_bound() <= 26 {
                    ((b'a' + i as u8) as char).to_string()
                } else {
                    format!("x{}", i + 1)
                }
            })
            .collect();
        f.write_str(&self.render(&names))
    }
}

// ---------------------------------------------------------------------------
// Text syntax
// ---------------------------------------------------------------------------

/// Parses a word. Lowercase letters name generators (looked up in `names`),
/// uppercase letters their inverses; `x12` is the 12th generator (1-based).
/// Also accepts `^n` exponents, parentheses, `[u,v]` commutators and `*`.
pub fn parse_word(text: &str, names: &[String]) -> Result<Word> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0, names, text };
    let w = p.product(None)?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected '{}'", p.chars[p.pos])));
    }
    Ok(w)
}

/// Parses either a relator `w` or a relation `u = v` (returned as `u·v⁻¹`).
pub fn parse_relator(text: &str, names: &[String]) -> Result<Word> {
    let parts: Vec<&str> = text.split('=').collect();
    match parts.len() {
        1 => parse_word(text, names),
        2 => {
            let u = parse_word(parts[0], names)?;
            let v = parse_word(parts[1], names).map_err(|e| match e {
                Error::Parse { input: _, position, message } => Error::Parse {
                    input: text.to_string(),
                    position: position + parts[0].chars().count() + 1,
                    message,
                },
                other => other,
            })?;
            Ok(u.multiply(&v.invert()))
        }
        _ => Err(Error::Parse {
            input: text.to_string(),
            position: parts[0].chars().count() + parts[1].chars().count() + 1,
            message: "more than one '=' in relation".into(),
        }),
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    names: &'a [String],
    text: &'a str,
}

impl Parser<'_> {
    fn error(&self, message: String) -> Error {
        Error::Parse { input: self.text.to_string(), position: self.pos, message }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && (self.chars[self.pos].is_whitespace() || self.chars[self.pos] == '*')
        {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn product(&mut self, close: Option<char>) -> Result<Word> {
        let mut acc = Word::identity();
        loop {
            self.skip_ws();
            match self.peek() {
                None => {
                    if let Some(c) = close {
                        return Err(self.error(format!("expected '{c}'")));
                    }
                    return Ok(acc);
                }
                Some(c) if Some(c) == close || c == ',' || c == ')' || c == ']' => {
                    if close.is_none() {
                        return Err(self.error(format!("unexpected '{c}'")));
                    }
                    return Ok(acc);
                }
                Some(_) => {
                    let atom = self.atom()?;
                    let atom = self.exponent(atom)?;
                    acc = acc.multiply(&atom);
                }
            }
        }
    }

    fn atom(&mut self) -> Result<Word> {
        let c = self.peek().unwrap();
        match c {
            '(' => {
                self.pos += 1;
                let w = self.product(Some(')'))?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'".into()));
                }
                self.pos += 1;
                Ok(w)
            }
            '[' => {
                self.pos += 1;
                let u = self.product(Some(','))?;
                if self.peek() != Some(',') {
                    return Err(self.error("expected ',' in commutator".into()));
                }
                self.pos += 1;
                let v = self.product(Some(']'))?;
                if self.peek() != Some(']') {
                    return Err(self.error("expected ']'".into()));
                }
                self.pos += 1;
                Ok(commutator(&u, &v))
            }
            '1' => {
                self.pos += 1;
                Ok(Word::identity())
            }
            c if (c == 'x' || c == 'X')
                && self.chars.get(self.pos + 1).is_some_and(|d| d.is_ascii_digit()) =>
            {
                let start = self.pos;
                self.pos += 1;
                let mut n = 0usize;
                while let Some(d) = self.peek().and_then(|d| d.to_digit(10)) {
                    n = n * 10 + d as usize;
                    self.pos += 1;
                }
                if n == 0 || n > self.names.len() {
                    self.pos = start;
                    return Err(self.error(format!("generator index {n} out of range 1..={}", self.names.len())));
                }
                Ok(Word::from_letters([Letter::new(n - 1, c == 'X')]))
            }
            c if c.is_ascii_alphabetic() => {
                let lower = c.to_ascii_lowercase().to_string();
                let Some(idx) = self.names.iter().position(|n| *n == lower) else {
                    return Err(self.error(format!("unknown generator '{c}'")));
                };
                self.pos += 1;
                Ok(Word::from_letters([Letter::new(idx, c.is_ascii_uppercase())]))
            }
            other => Err(self.error(format!("unexpected '{other}'"))),
        }
    }

    fn exponent(&mut self, w: Word) -> Result<Word> {
        if self.peek() != Some('^') {
            return Ok(w);
        }
        self.pos += 1;
        let neg = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let start = self.pos;
        let mut n: i64 = 0;
        while let Some(d) = self.peek().and_then(|d| d.to_digit(10)) {
            n = n.checked_mul(10).and_then(|n| n.checked_add(d as i64)).ok_or_else(|| self.error("exponent too large".into()))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected exponent".into()));
        }
        Ok(w.pow(if neg { -n } else { n }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(s: &str) -> Vec<String> {
        s.chars().map(|c| c.to_string()).collect()
    }

    const A: Letter = Letter::pos(0);
    const AI: Letter = Letter::neg(0);
    const B: Letter = Letter::pos(1);
    const BI: Letter = Letter::neg(1);

    #[test]
    fn reduce_examples() {
        assert!(reduce(&[A, AI]).is_empty());
        assert!(reduce(&[A, B, BI, AI]).is_empty());
        assert_eq!(reduce(&[A, B, AI, A]).letters(), &[A, B]);
    }

    #[test]
    fn multiply_invert_conjugate() {
        let a = Word::generator(0);
        let b = Word::generator(1);
        assert!(multiply(&a, &a.invert()).is_empty());
        assert_eq!(invert(&Word::from_letters([A, B])).letters(), &[BI, AI]);
        assert_eq!(conjugate(&a, &b).letters(), &[BI, A, B]);
    }

    #[test]
    fn commutator_examples() {
        let a = Word::generator(0);
        let b = Word::generator(1);
        assert!(commutator(&a, &a).is_empty());
        assert_eq!(commutator(&a, &b).letters(), &[AI, BI, A, B]);
        // (ab)⁻¹ a⁻¹ (ab) a = b⁻¹a⁻¹a⁻¹aba = b⁻¹a⁻¹ba
        let ab = Word::from_letters([A, B]);
        assert_eq!(commutator(&ab, &a).letters(), &[BI, AI, B, A]);
    }

    #[test]
    fn exponent_sum_examples() {
        let w = Word::from_letters([A, A, B, AI]);
        assert_eq!(exponent_sums(&w, 2).unwrap(), vec![1, 1]);
        assert_eq!(exponent_sums(&Word::identity(), 3).unwrap(), vec![0, 0, 0]);
        assert!(matches!(
            exponent_sums(&w, 1),
            Err(Error::GeneratorOutOfRange { gen: 1, rank: 1 })
        ));
    }

    #[test]
    fn parse_letter_syntax() {
        let n = names("ab");
        assert_eq!(parse_word("abAB", &n).unwrap().letters(), &[A, B, AI, BI]);
        assert_eq!(parse_word("a^5", &n).unwrap().len(), 5);
        assert_eq!(parse_word("(ba)^-2", &n).unwrap(), Word::from_letters([AI, BI, AI, BI]));
        assert_eq!(parse_word("[a,b]", &n).unwrap().letters(), &[AI, BI, A, B]);
        let r = parse_relator("a^5 = b^3", &n).unwrap();
        assert_eq!(r.exponent_sums(2).unwrap(), vec![5, -3]);
        assert!(parse_word("1", &n).unwrap().is_empty());
    }

    #[test]
    fn parse_indexed_syntax() {
        let n: Vec<String> = (1..=30).map(|i| format!("x{i}")).collect();
        let w = parse_word("x1 x30^-1 x2", &n).unwrap();
        assert_eq!(w.letters(), &[Letter::pos(0), Letter::neg(29), Letter::pos(1)]);
        assert_eq!(parse_word(&w.render(&n), &n).unwrap(), w);
    }

    #[test]
    fn parse_errors_carry_position() {
        let n = names("ab");
        match parse_word("ab(", &n) {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(parse_word("abc", &n), Err(Error::Parse { position: 2, .. })));
        assert!(parse_word("a^", &n).is_err());
        assert!(parse_relator("a = b = a", &n).is_err());
    }

    #[test]
    fn cyclic_reduction() {
        let w = Word::from_letters([BI, A, B]);
        assert_eq!(w.cyclically_reduce().letters(), &[A]);
    }

    #[test]
    fn substitution_respects_inverses() {
        let w = Word::from_letters([A, BI]);
        let images = vec![Word::from_letters([B, B]), Word::from_letters([A, B])];
        // a b⁻¹ ↦ bb (ab)⁻¹ = b b b⁻¹ a⁻¹ = b a⁻¹
        assert_eq!(w.substitute(&images).letters(), &[B, AI]);
    }
}
