//! Homogeneous noncommutative polynomials over Z in two letters.
//!
//! A monomial of degree `d` is a `u32` whose `d` low bits spell the word,
//! most significant bit first, with `0 = A` and `1 = B`. For words of equal
//! length numeric order is lexicographic order with `A < B`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub const MAX_DEGREE: usize = 30;

pub fn word_string(code: u32, degree: usize, letters: [char; 2]) -> String {
    (0..degree).rev().map(|i| letters[((code >> i) & 1) as usize]).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Homogeneous {
    degree: usize,
    terms: BTreeMap<u32, BigInt>,
}

impl Homogeneous {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= MAX_DEGREE);
        Homogeneous {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(degree: usize, code: u32, coeff: BigInt) -> Self {
        let mut h = Homogeneous::zero(degree);
        h.add_term(code, coeff);
        h
    }

    /// The letter `letter` (0 or 1) as a degree-one polynomial.
    pub fn letter(letter: u32) -> Self {
        Homogeneous::monomial(1, letter, BigInt::one())
    }

    pub(crate) fn from_dense(degree: usize, dense: Vec<BigInt>) -> Self {
        let terms = dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as u32, c))
            .collect();
        Homogeneous { degree, terms }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero terms.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigInt)> {
        self.terms.iter().map(|(&k, v)| (k, v))
    }

    pub fn coeff(&self, code: u32) -> BigInt {
        self.terms.get(&code).cloned().unwrap_or_default()
    }

    /// Lexicographically smallest monomial in the support.
    pub fn min_term(&self) -> Option<(u32, &BigInt)> {
        self.terms.iter().next().map(|(&k, v)| (k, v))
    }

    pub fn add_term(&mut self, code: u32, coeff: BigInt) {
        debug_assert!((code as u64) < (1u64 << self.degree));
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(code) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c · other`
    pub fn add_scaled(&mut self, c: &BigInt, other: &Homogeneous) {
        assert_eq!(self.degree, other.degree);
        if c.is_zero() {
            return;
        }
        for (&k, v) in &other.terms {
            self.add_term(k, c * v);
        }
    }

    pub fn scaled(&self, c: &BigInt) -> Homogeneous {
        if c.is_zero() {
            return Homogeneous::zero(self.degree);
        }
        Homogeneous {
            degree: self.degree,
            terms: self.terms.iter().map(|(&k, v)| (k, v * c)).collect(),
        }
    }

    pub fn neg(&self) -> Homogeneous {
        Homogeneous {
            degree: self.degree,
            terms: self.terms.iter().map(|(&k, v)| (k, -v)).collect(),
        }
    }

    /// Concatenation product, a polynomial of degree `deg(self) + deg(other)`.
    pub fn mul(&self, other: &Homogeneous) -> Homogeneous {
        let degree = self.degree + other.degree;
        let mut acc = Accumulator::new(degree);
        acc.add_product(self, other);
        acc.finish()
    }

    /// `self·other − other·self`
    pub fn commutator(&self, other: &Homogeneous) -> Homogeneous {
        let degree = self.degree + other.degree;
        let mut acc = Accumulator::new(degree);
        acc.add_product(self, other);
        acc.sub_product(other, self);
        acc.finish()
    }
}

impl fmt::Display for Homogeneous {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (&k, v)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*{}", v, word_string(k, self.degree, ['A', 'B']))?;
        }
        Ok(())
    }
}

/// Scratch space for sums of products landing in one degree. Starts as a
/// sparse map and switches to a dense `2^d` buffer once it fills up.
pub(crate) struct Accumulator {
    degree: usize,
    sparse: BTreeMap<u32, BigInt>,
    dense: Option<Vec<BigInt>>,
}

impl Accumulator {
    pub(crate) fn new(degree: usize) -> Self {
        assert!(degree <= MAX_DEGREE, "degree {degree} too large");
        Accumulator {
            degree,
            sparse: BTreeMap::new(),
            dense: None,
        }
    }

    fn densify_if_needed(&mut self, incoming: usize) {
        if self.dense.is_none() && (self.sparse.len() + incoming) * 8 > (1usize << self.degree) {
            let mut buf = vec![BigInt::zero(); 1usize << self.degree];
            for (k, v) in std::mem::take(&mut self.sparse) {
                buf[k as usize] = v;
            }
            self.dense = Some(buf);
        }
    }

    #[inline]
    fn slot(&mut self, k: u32) -> &mut BigInt {
        match self.dense.as_mut() {
            Some(buf) => &mut buf[k as usize],
            None => self.sparse.entry(k).or_default(),
        }
    }

    pub(crate) fn add(&mut self, h: &Homogeneous) {
        debug_assert_eq!(h.degree, self.degree);
        self.densify_if_needed(h.len());
        for (&k, v) in &h.terms {
            *self.slot(k) += v;
        }
    }

    pub(crate) fn sub(&mut self, h: &Homogeneous) {
        debug_assert_eq!(h.degree, self.degree);
        self.densify_if_needed(h.len());
        for (&k, v) in &h.terms {
            *self.slot(k) -= v;
        }
    }

    pub(crate) fn add_product(&mut self, x: &Homogeneous, y: &Homogeneous) {
        self.product(x, y, false)
    }

    pub(crate) fn sub_product(&mut self, x: &Homogeneous, y: &Homogeneous) {
        self.product(x, y, true)
    }

    fn product(&mut self, x: &Homogeneous, y: &Homogeneous, negate: bool) {
        debug_assert_eq!(x.degree + y.degree, self.degree);
        if x.is_zero() || y.is_zero() {
            return;
        }
        self.densify_if_needed(x.len().saturating_mul(y.len()));
        let shift = y.degree;
        for (&u, cu) in &x.terms {
            let base = u << shift;
            for (&v, cv) in &y.terms {
                let slot = self.slot(base | v);
                if negate {
                    *slot -= cu * cv;
                } else {
                    *slot += cu * cv;
                }
            }
        }
    }

    pub(crate) fn finish(self) -> Homogeneous {
        match self.dense {
            Some(buf) => Homogeneous::from_dense(self.degree, buf),
            None => {
                let mut terms = self.sparse;
                terms.retain(|_, v| !v.is_zero());
                Homogeneous {
                    degree: self.degree,
                    terms,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutator_of_letters() {
        let a = Homogeneous::letter(0);
        let b = Homogeneous::letter(1);
        let ab = a.commutator(&b);
        assert_eq!(ab.to_string(), "1*AB + -1*BA");
        assert!(a.commutator(&a).is_zero());
    }

    #[test]
    fn lexicographic_codes() {
        assert_eq!(word_string(0b011, 3, ['a', 'b']), "abb");
        assert_eq!(word_string(0b0011, 4, ['a', 'b']), "aabb");
    }

    #[test]
    fn add_term_drops_zeros() {
        let mut h = Homogeneous::zero(2);
        h.add_term(1, BigInt::from(3));
        h.add_term(1, BigInt::from(-3));
        assert!(h.is_zero());
    }
}
