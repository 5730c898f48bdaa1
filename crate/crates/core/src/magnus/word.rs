//! Words in the free group on `a, b`.
//!
//! A word is kept as an expression (products, integer powers, commutators)
//! rather than a flat letter string: basic commutators of weight ten or more
//! have thousands of letters once expanded. [`GroupWord::letters`] gives the
//! freely reduced letter sequence, which is the canonical form.
//!
//! Text syntax: `a`, `A` (= a⁻¹), `b`, `B`; juxtaposition for products;
//! `(w)` for grouping; `w^n` for integer powers and `w^v` (v a letter or a
//! bracketed word) for the conjugate `v⁻¹wv`; `[u,v]` for the commutator
//! `u⁻¹v⁻¹uv` with `[u,v,w] = [[u,v],w]`; `[u,_n v]` for the Engel commutator;
//! `1` for the empty word.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupWord {
    Letter(Letter),
    /// Never nested, never containing the identity; empty means the identity.
    Product(Vec<GroupWord>),
    /// Exponent is never 0 or 1.
    Power(Box<GroupWord>, BigInt),
    Commutator(Box<GroupWord>, Box<GroupWord>),
}

impl Default for GroupWord {
    fn default() -> Self {
        GroupWord::identity()
    }
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord::Product(Vec::new())
    }

    pub fn a() -> Self {
        GroupWord::Letter(Letter::A)
    }

    pub fn b() -> Self {
        GroupWord::Letter(Letter::B)
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, GroupWord::Product(v) if v.is_empty())
    }

    pub fn product<I: IntoIterator<Item = GroupWord>>(items: I) -> Self {
        let mut out = Vec::new();
        for w in items {
            match w {
                GroupWord::Product(inner) => out.extend(inner),
                w => out.push(w),
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            GroupWord::Product(out)
        }
    }

    pub fn times(&self, other: &GroupWord) -> Self {
        GroupWord::product([self.clone(), other.clone()])
    }

    pub fn pow(&self, n: impl Into<BigInt>) -> Self {
        let n: BigInt = n.into();
        if n.is_zero() || self.is_identity() {
            return GroupWord::identity();
        }
        if n.is_one() {
            return self.clone();
        }
        match self {
            GroupWord::Power(base, m) => base.pow(m * n),
            GroupWord::Letter(l) if n == BigInt::from(-1) => GroupWord::Letter(l.inverse()),
            w => GroupWord::Power(Box::new(w.clone()), n),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            GroupWord::Letter(l) => GroupWord::Letter(l.inverse()),
            GroupWord::Product(items) => GroupWord::product(items.iter().rev().map(GroupWord::inverse)),
            GroupWord::Power(base, n) => base.pow(-n),
            GroupWord::Commutator(..) => GroupWord::Power(Box::new(self.clone()), BigInt::from(-1)),
        }
    }

    /// `u⁻¹ v⁻¹ u v`
    pub fn commutator(u: &GroupWord, v: &GroupWord) -> Self {
        GroupWord::Commutator(Box::new(u.clone()), Box::new(v.clone()))
    }

    /// `[w_1, ..., w_n] = [[w_1, ..., w_{n-1}], w_n]`
    pub fn left_normed(items: &[GroupWord]) -> Self {
        let mut it = items.iter();
        let first = it.next().cloned().unwrap_or_default();
        it.fold(first, |acc, w| GroupWord::commutator(&acc, w))
    }

    /// `[u,_n v]`
    pub fn engel_of(u: &GroupWord, v: &GroupWord, n: usize) -> Self {
        (0..n).fold(u.clone(), |acc, _| GroupWord::commutator(&acc, v))
    }

    /// `[a,_n b]`
    pub fn engel(n: usize) -> Self {
        GroupWord::engel_of(&GroupWord::a(), &GroupWord::b(), n)
    }

    /// `v⁻¹ w v`
    pub fn conjugate(&self, by: &GroupWord) -> Self {
        GroupWord::product([by.inverse(), self.clone(), by.clone()])
    }

    /// `∏_{i=0}^{n-1} [[a,_{2n-1-i} b], [a,_i b]]^{(-1)^i}`
    pub fn alternating_engel_product(n: usize) -> Self {
        assert!(n >= 1);
        GroupWord::product((0..n).map(|i| {
            let c = GroupWord::commutator(&GroupWord::engel(2 * n - 1 - i), &GroupWord::engel(i));
            if i % 2 == 0 {
                c
            } else {
                c.inverse()
            }
        }))
    }

    /// Freely reduced letter sequence. Fails if it would exceed `limit` letters
    /// at any point of the expansion.
    pub fn letters_bounded(&self, limit: usize) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        self.push_letters(&mut out, limit)?;
        Ok(out)
    }

    pub fn letters(&self) -> Vec<Letter> {
        self.letters_bounded(usize::MAX).expect("unbounded")
    }

    fn push_letters(&self, out: &mut Vec<Letter>, limit: usize) -> Result<()> {
        match self {
            GroupWord::Letter(l) => {
                if out.last() == Some(&l.inverse()) {
                    out.pop();
                } else {
                    if out.len() >= limit {
                        return Err(Error::Resource(format!("word longer than {limit} letters")));
                    }
                    out.push(*l);
                }
            }
            GroupWord::Product(items) => {
                for w in items {
                    w.push_letters(out, limit)?;
                }
            }
            GroupWord::Power(base, n) => {
                let b = match (&**base, n.is_negative()) {
                    (_, false) => (**base).clone(),
                    // (u⁻¹v⁻¹uv)⁻¹ = v⁻¹u⁻¹vu
                    (GroupWord::Commutator(u, v), true) => GroupWord::Commutator(v.clone(), u.clone()),
                    (_, true) => base.inverse(),
                };
                let count = n
                    .abs()
                    .to_usize()
                    .ok_or_else(|| Error::Resource(format!("exponent {n} too large to expand")))?;
                for _ in 0..count {
                    b.push_letters(out, limit)?;
                }
            }
            GroupWord::Commutator(u, v) => {
                u.inverse().push_letters(out, limit)?;
                v.inverse().push_letters(out, limit)?;
                u.push_letters(out, limit)?;
                v.push_letters(out, limit)?;
            }
        }
        Ok(())
    }

    /// Word spelled by a reduced letter sequence.
    pub fn from_letters(letters: &[Letter]) -> Self {
        GroupWord::product(letters.iter().map(|&l| GroupWord::Letter(l)))
    }

    /// Positions of the top-level factors that carry an exponent: powers, and
    /// bare commutators (exponent 1). Either the whole word or the factors of a
    /// top-level product.
    pub fn power_sites(&self) -> Vec<usize> {
        match self {
            GroupWord::Power(..) | GroupWord::Commutator(..) => vec![0],
            GroupWord::Product(items) => items
                .iter()
                .enumerate()
                .filter(|(_, w)| matches!(w, GroupWord::Power(..) | GroupWord::Commutator(..)))
                .map(|(i, _)| i)
                .collect(),
            _ => Vec::new(),
        }
    }

    fn site(&self, site: usize) -> Option<&GroupWord> {
        match (self, site) {
            (GroupWord::Power(..) | GroupWord::Commutator(..), 0) => Some(self),
            (GroupWord::Product(items), i) => items.get(i),
            _ => None,
        }
    }

    pub fn power_exponent(&self, site: usize) -> Option<BigInt> {
        match self.site(site)? {
            GroupWord::Power(_, n) => Some(n.clone()),
            GroupWord::Commutator(..) => Some(BigInt::one()),
            _ => None,
        }
    }

    /// Copy with the exponent at `site` (see [`power_sites`](Self::power_sites))
    /// replaced. The result is kept as written, even for exponents 0 and 1.
    pub fn with_exponent(&self, site: usize, exponent: BigInt) -> Option<GroupWord> {
        let replaced = match self.site(site)? {
            GroupWord::Power(base, _) => GroupWord::Power(base.clone(), exponent),
            c @ GroupWord::Commutator(..) => GroupWord::Power(Box::new(c.clone()), exponent),
            _ => return None,
        };
        match self {
            GroupWord::Product(items) => {
                let mut items = items.clone();
                items[site] = replaced;
                Some(GroupWord::Product(items))
            }
            _ => Some(replaced),
        }
    }

    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupWord::Product(items) if items.len() > 1 => write!(f, "({self})"),
            GroupWord::Power(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupWord::Letter(l) => write!(f, "{}", l.as_char()),
            GroupWord::Product(items) if items.is_empty() => write!(f, "1"),
            GroupWord::Product(items) => {
                for w in items {
                    match w {
                        GroupWord::Product(_) => w.fmt_atom(f)?,
                        _ => write!(f, "{w}")?,
                    }
                }
                Ok(())
            }
            GroupWord::Power(base, n) => {
                base.fmt_atom(f)?;
                write!(f, "^{n}")
            }
            GroupWord::Commutator(..) => {
                let mut chain = Vec::new();
                let mut cur = self;
                while let GroupWord::Commutator(u, v) = cur {
                    chain.push(&**v);
                    cur = u;
                }
                chain.push(cur);
                write!(f, "[")?;
                for (i, w) in chain.iter().rev().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{w}")?;
                }
                write!(f, "]")
            }
        }
    }
}

impl FromStr for GroupWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<GroupWord> {
        let mut p = WordParser {
            src: s.as_bytes(),
            pos: 0,
        };
        let w = p.word()?;
        if p.peek().is_some() {
            return p.err("unexpected trailing input");
        }
        Ok(w)
    }
}

impl serde::Serialize for GroupWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for GroupWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

struct WordParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl WordParser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn word(&mut self) -> Result<GroupWord> {
        let mut items = Vec::new();
        while let Some(c) = self.peek() {
            if matches!(c, b',' | b']' | b')' | b'}') {
                break;
            }
            items.push(self.factor()?);
        }
        Ok(GroupWord::product(items))
    }

    fn factor(&mut self) -> Result<GroupWord> {
        let mut w = self.atom()?;
        while self.eat(b'^') {
            match self.peek() {
                Some(c) if c == b'-' || c == b'+' || c.is_ascii_digit() => {
                    let n = self.integer()?;
                    w = w.pow(n);
                }
                Some(_) => {
                    let by = self.atom_with_power()?;
                    w = w.conjugate(&by);
                }
                None => return self.err("expected exponent"),
            }
        }
        Ok(w)
    }

    /// Conjugator in `x^{b^i}`: an atom, optionally with integer powers.
    fn atom_with_power(&mut self) -> Result<GroupWord> {
        let mut w = self.atom()?;
        while self.peek() == Some(b'^') {
            let save = self.pos;
            self.pos += 1;
            match self.peek() {
                Some(c) if c == b'-' || c == b'+' || c.is_ascii_digit() => w = w.pow(self.integer()?),
                _ => {
                    self.pos = save;
                    break;
                }
            }
        }
        Ok(w)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.peek();
        let start = self.pos;
        if matches!(self.src.get(self.pos), Some(b'-' | b'+')) {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits {
            return self.err("expected an integer");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .unwrap())
    }

    fn atom(&mut self) -> Result<GroupWord> {
        let Some(c) = self.peek() else {
            return self.err("unexpected end of input");
        };
        self.pos += 1;
        match c {
            b'a' => Ok(GroupWord::Letter(Letter::A)),
            b'A' => Ok(GroupWord::Letter(Letter::AInv)),
            b'b' => Ok(GroupWord::Letter(Letter::B)),
            b'B' => Ok(GroupWord::Letter(Letter::BInv)),
            b'1' => Ok(GroupWord::identity()),
            b'(' => {
                let w = self.word()?;
                self.expect(b')')?;
                Ok(w)
            }
            b'{' => {
                let w = self.word()?;
                self.expect(b'}')?;
                Ok(w)
            }
            b'[' => {
                let first = self.word()?;
                self.expect(b',')?;
                if self.eat(b'_') {
                    let n = self.integer()?;
                    let n = n.to_usize().ok_or_else(|| Error::Parse {
                        pos: self.pos,
                        msg: "bad Engel index".into(),
                    })?;
                    let v = self.word()?;
                    self.expect(b']')?;
                    return Ok(GroupWord::engel_of(&first, &v, n));
                }
                let mut items = vec![first, self.word()?];
                while self.eat(b',') {
                    items.push(self.word()?);
                }
                self.expect(b']')?;
                Ok(GroupWord::left_normed(&items))
            }
            _ => {
                self.pos -= 1;
                self.err(format!("unexpected character '{}'", c as char))
            }
        }
    }
}
