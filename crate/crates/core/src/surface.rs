//! Free presentations of punctured-surface groups and words in them.
//!
//! For genus `g` and `m >= 1` punctures the fundamental group is free on
//! `a1, b1, ..., ag, bg, c1, ..., c(m-1)` (in that order, rank `2g + m - 1`).
//! The boundary loops are `C_j = c_j` for `j < m` and
//! `C_m = (prod [a_i, b_i] c_1 ... c_(m-1))^-1`, so that
//! `prod [a_i, b_i] C_1 ... C_m = 1` holds in the free group.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfacePresentation {
    genus: usize,
    punctures: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Self { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Self { generator: self.generator, inverse: !self.inverse }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl SurfacePresentation {
    pub fn new(genus: usize, punctures: usize) -> Result<Self> {
        if punctures == 0 {
            return Err(Error::NoPunctures(punctures));
        }
        Ok(Self { genus, punctures })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn punctures(&self) -> usize {
        self.punctures
    }

    pub fn boundary_count(&self) -> usize {
        self.punctures
    }

    /// Rank `n = 2g + m - 1` of the free group.
    pub fn rank(&self) -> usize {
        2 * self.genus + self.punctures - 1
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.punctures as i64
    }

    pub fn a(&self, i: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.genus);
        2 * (i - 1)
    }

    pub fn b(&self, i: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.genus);
        2 * (i - 1) + 1
    }

    pub fn c(&self, j: usize) -> usize {
        debug_assert!(j >= 1 && j < self.punctures);
        2 * self.genus + j - 1
    }

    pub fn generator_name(&self, index: usize) -> String {
        if index < 2 * self.genus {
            let kind = if index % 2 == 0 { 'a' } else { 'b' };
            format!("{kind}{}", index / 2 + 1)
        } else {
            format!("c{}", index - 2 * self.genus + 1)
        }
    }

    pub fn generator_names(&self) -> Vec<String> {
        (0..self.rank()).map(|k| self.generator_name(k)).collect()
    }

    pub fn generator_word(&self, index: usize) -> Word {
        Word(vec![Letter::new(index, false)])
    }

    /// `prod_i [a_i, b_i]` with `[a, b] = a b a^-1 b^-1`.
    pub fn commutator_product(&self) -> Word {
        let mut w = Word::empty();
        for i in 1..=self.genus {
            let (a, b) = (self.a(i), self.b(i));
            w.0.extend([
                Letter::new(a, false),
                Letter::new(b, false),
                Letter::new(a, true),
                Letter::new(b, true),
            ]);
        }
        w
    }

    /// Local monodromy word `C_j` around puncture `j` (1-based).
    pub fn boundary_word(&self, j: usize) -> Result<Word> {
        if j == 0 || j > self.punctures {
            return Err(Error::BoundaryIndex { index: j, punctures: self.punctures });
        }
        if j < self.punctures {
            return Ok(self.generator_word(self.c(j)));
        }
        let mut w = self.commutator_product();
        for k in 1..self.punctures {
            w.0.push(Letter::new(self.c(k), false));
        }
        Ok(w.inverse().reduced())
    }

    pub fn boundary_words(&self) -> Vec<Word> {
        (1..=self.punctures)
            .map(|j| self.boundary_word(j).expect("index in range"))
            .collect()
    }

    /// `prod_i [a_i, b_i] * C_1 ... C_m`; reduces to the empty word.
    pub fn surface_relator(&self) -> Word {
        let mut w = self.commutator_product();
        for c in self.boundary_words() {
            w = w.concat(&c);
        }
        w
    }

    /// The boundary loop of puncture `j` seen from the polygon vertex where
    /// its side group starts: `w C_j w^-1` with
    /// `w = prod [a_i, b_i] * C_1 ... C_(j-1)`.
    pub fn peripheral_word(&self, j: usize) -> Result<Word> {
        let c = self.boundary_word(j)?;
        let mut prefix = self.commutator_product();
        for k in 1..j {
            prefix = prefix.concat(&self.boundary_word(k)?);
        }
        Ok(prefix.concat(&c).concat(&prefix.inverse()).reduced())
    }

    /// Parses whitespace-separated tokens `a1`, `b2`, `c1^-1`, ... into a
    /// freely reduced word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            let (symbol, inverse) = match token.split_once('^') {
                None => (token, false),
                Some((s, "-1")) => (s, true),
                Some((s, "1")) => (s, false),
                Some(_) => return Err(Error::MalformedExponent(token.to_string())),
            };
            let generator = self
                .generator_index(symbol)
                .ok_or_else(|| Error::UnknownGenerator(symbol.to_string()))?;
            letters.push(Letter::new(generator, inverse));
        }
        Ok(Word(letters).reduced())
    }

    fn generator_index(&self, symbol: &str) -> Option<usize> {
        let mut chars = symbol.chars();
        let kind = chars.next()?;
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return None;
        }
        let k: usize = digits.parse().ok()?;
        match kind {
            'a' if k <= self.genus => Some(self.a(k)),
            'b' if k <= self.genus => Some(self.b(k)),
            'c' if k < self.punctures => Some(self.c(k)),
            _ => None,
        }
    }

    pub fn format_word(&self, w: &Word) -> String {
        w.0.iter()
            .map(|l| {
                let name = self.generator_name(l.generator);
                if l.inverse { format!("{name}^-1") } else { name }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl Word {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Self(letters)
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

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// Concatenation followed by free reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters).reduced()
    }

    pub fn reduced(&self) -> Word {
        free_reduce(self)
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[0] != p[1].inv())
    }
}

/// Stack-based free reduction; idempotent.
pub fn free_reduce(w: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(w.0.len());
    for &l in &w.0 {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| format!("x{}{}", l.generator, if l.inverse { "^-1" } else { "" }))
            .collect();
        f.write_str(&parts.join(" "))
    }
}
