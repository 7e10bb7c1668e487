//! Reduced words in the free group on `a`, `b` and their integral group ring.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sl2::KnotParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gen {
    A,
    B,
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gen::A => "a",
            Gen::B => "b",
        })
    }
}

/// A freely reduced word stored as syllables `(generator, exponent)`.
///
/// Adjacent syllables have different generators and no exponent is zero.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<(Gen, i64)>);

impl Word {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn gen(g: Gen) -> Self {
        Self(vec![(g, 1)])
    }

    pub fn a() -> Self {
        Self::gen(Gen::A)
    }

    pub fn b() -> Self {
        Self::gen(Gen::B)
    }

    /// Reduce an arbitrary syllable list.
    pub fn from_syllables<I: IntoIterator<Item = (Gen, i64)>>(syllables: I) -> Self {
        let mut out: Vec<(Gen, i64)> = Vec::new();
        for (g, e) in syllables {
            push_syllable(&mut out, g, e);
        }
        Self(out)
    }

    pub fn syllables(&self) -> &[(Gen, i64)] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Letters `g^{+-1}` in reading order.
    pub fn letters(&self) -> impl Iterator<Item = (Gen, i64)> + '_ {
        self.0
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat_n((g, e.signum()), e.unsigned_abs() as usize))
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Image in the abelianization where both generators map to `t`.
    pub fn exponent_sum(&self) -> i64 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &(g, e) in &other.0 {
            push_syllable(&mut out, g, e);
        }
        Word(out)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(Word::identity(), |acc, _| acc.concat(&base))
    }
}

fn push_syllable(out: &mut Vec<(Gen, i64)>, g: Gen, e: i64) {
    if e == 0 {
        return;
    }
    match out.last_mut() {
        Some((lg, le)) if *lg == g => {
            *le += e;
            if *le == 0 {
                out.pop();
            }
        }
        _ => out.push((g, e)),
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, (g, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if *e == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Integer combination of reduced words; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct GroupRingElt(BTreeMap<Word, i64>);

impl GroupRingElt {
    pub fn zero() -> Self {
        Self(BTreeMap::new())
    }

    pub fn one() -> Self {
        Self::word(Word::identity())
    }

    pub fn word(w: Word) -> Self {
        Self::term(w, 1)
    }

    pub fn term(w: Word, coeff: i64) -> Self {
        let mut out = Self::zero();
        out.add_term(w, coeff);
        out
    }

    pub fn add_term(&mut self, w: Word, coeff: i64) {
        if coeff == 0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.0.entry(w) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.0.iter().map(|(w, &c)| (w, c))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.0.len()
    }

    /// Sum of coefficients (the augmentation).
    pub fn augmentation(&self) -> i64 {
        self.0.values().sum()
    }

    pub fn mul_word_left(&self, w: &Word) -> Self {
        let mut out = Self::zero();
        for (u, c) in self.terms() {
            out.add_term(w.concat(u), c);
        }
        out
    }
}

impl fmt::Display for GroupRingElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms().enumerate() {
            let sign = if c < 0 { "-" } else if i > 0 { "+" } else { "" };
            if i > 0 {
                f.write_str(" ")?;
            }
            match c.abs() {
                1 => write!(f, "{sign}{w}")?,
                k => write!(f, "{sign}{k}*{w}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GroupRingElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupRingElt({self})")
    }
}

impl Add for &GroupRingElt {
    type Output = GroupRingElt;
    fn add(self, rhs: &GroupRingElt) -> GroupRingElt {
        let mut out = self.clone();
        for (w, c) in rhs.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }
}

impl Sub for &GroupRingElt {
    type Output = GroupRingElt;
    fn sub(self, rhs: &GroupRingElt) -> GroupRingElt {
        self + &(-rhs)
    }
}

impl Neg for &GroupRingElt {
    type Output = GroupRingElt;
    fn neg(self) -> GroupRingElt {
        GroupRingElt(self.0.iter().map(|(w, &c)| (w.clone(), -c)).collect())
    }
}

impl Mul for &GroupRingElt {
    type Output = GroupRingElt;
    fn mul(self, rhs: &GroupRingElt) -> GroupRingElt {
        let mut out = GroupRingElt::zero();
        for (u, cu) in self.terms() {
            for (v, cv) in rhs.terms() {
                out.add_term(u.concat(v), cu * cv);
            }
        }
        out
    }
}

/// `w = (b a^-1)^m (b^-1 a)^m`.
pub fn build_w(m: i64) -> Result<Word> {
    if m == 0 {
        return Err(Error::InvalidParam("m must be nonzero".into()));
    }
    let left = Word::from_syllables([(Gen::B, 1), (Gen::A, -1)]).pow(m);
    let right = Word::from_syllables([(Gen::B, -1), (Gen::A, 1)]).pow(m);
    Ok(left.concat(&right))
}

/// `r = w^n a w^-n b^-1`, the relator of `w^n a = b w^n`.
pub fn build_relator(params: KnotParams) -> Result<Word> {
    let wn = build_w(params.m)?.pow(params.n);
    Ok(wn
        .concat(&Word::a())
        .concat(&wn.inverse())
        .concat(&Word::b().inverse()))
}
