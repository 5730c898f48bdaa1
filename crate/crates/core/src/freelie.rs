//! The free Lie ring over Z on two generators `a < b`.
//!
//! Elements are integer combinations of basic commutators of the Lyndon
//! basis. Brackets are computed by expanding into the free associative ring
//! (`[u, v] = uv − vu`) and reading the result back in the basis: for a
//! Lyndon word `w` the expansion of its standard bracketing is `w` plus
//! lexicographically larger words, so peeling off the smallest monomial is a
//! triangular solve.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Range;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{usage, Error, Result};
use crate::linalg::ColumnHnf;
use crate::monomial::{word_string, Accumulator, Homogeneous};

/// Largest weight a [`HallBasis`] may be built for.
pub const MAX_HALL_WEIGHT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    A,
    B,
}

impl Generator {
    pub fn code(self) -> u32 {
        match self {
            Generator::A => 0,
            Generator::B => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasicShape {
    Generator(Generator),
    /// Standard factorization `w = uv`: indices of the basic commutators of `u` and `v`.
    Bracket(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicCommutator {
    pub weight: usize,
    /// The Lyndon word, encoded as in [`crate::monomial`].
    pub word: u32,
    pub shape: BasicShape,
}

impl BasicCommutator {
    pub fn word_string(&self) -> String {
        word_string(self.word, self.weight, ['a', 'b'])
    }
}

/// Lyndon words over {0, 1} of length `1..=n`, in Duval order.
fn lyndon_words(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut w: Vec<i8> = vec![-1];
    while !w.is_empty() {
        *w.last_mut().unwrap() += 1;
        out.push(w.iter().map(|&x| x as u8).collect());
        let m = w.len();
        while w.len() < n {
            w.push(w[w.len() - m]);
        }
        while w.last() == Some(&1) {
            w.pop();
        }
    }
    out
}

fn is_lyndon(w: &[u8]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

fn encode(w: &[u8]) -> u32 {
    w.iter().fold(0u32, |acc, &x| (acc << 1) | x as u32)
}

/// Dimension of the weight-`w` part of the free Lie ring on two generators.
pub fn witt_number(w: usize) -> u64 {
    assert!(w >= 1);
    let mut sum: i128 = 0;
    for d in 1..=w {
        if w.is_multiple_of(d) {
            sum += mobius(d) as i128 * (1i128 << (w / d));
        }
    }
    (sum / w as i128) as u64
}

fn mobius(mut n: usize) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Integer combination of basic commutators, keyed by basis index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FreeLieElement {
    terms: BTreeMap<usize, BigInt>,
}

impl FreeLieElement {
    pub fn zero() -> Self {
        FreeLieElement::default()
    }

    pub fn basis(index: usize) -> Self {
        FreeLieElement::term(index, BigInt::one())
    }

    pub fn term(index: usize, coeff: BigInt) -> Self {
        let mut e = FreeLieElement::zero();
        e.add_term(index, coeff);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.terms.iter().map(|(&i, c)| (i, c))
    }

    pub fn coeff(&self, index: usize) -> BigInt {
        self.terms.get(&index).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, index: usize, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(index).or_default();
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&index);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, c) in other.terms() {
            out.add_term(i, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&BigInt::from(-1))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return FreeLieElement::zero();
        }
        FreeLieElement {
            terms: self.terms.iter().map(|(&i, x)| (i, x * c)).collect(),
        }
    }
}

/// Result of a bracket that may have produced terms above the basis weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket {
    pub value: FreeLieElement,
    /// Some product landed above `max_weight` and was dropped.
    pub truncated: bool,
}

/// The Lyndon basis of the free Lie ring in weights `1..=max_weight`,
/// ordered by weight and then lexicographically.
///
/// The basis for a smaller weight is a prefix of the basis for a larger one,
/// so indices are stable across truncations.
#[derive(Debug)]
pub struct HallBasis {
    max_weight: usize,
    elements: Vec<BasicCommutator>,
    index: HashMap<(usize, u32), usize>,
    by_weight: Vec<Range<usize>>,
    expansions: Vec<OnceLock<Homogeneous>>,
    solvers: Vec<OnceLock<ColumnHnf>>,
}

impl HallBasis {
    pub fn new(max_weight: usize) -> Result<Self> {
        if max_weight == 0 {
            return usage("max_weight must be at least 1");
        }
        if max_weight > MAX_HALL_WEIGHT {
            return Err(Error::Resource(format!(
                "Hall basis weight {max_weight} exceeds the supported maximum {MAX_HALL_WEIGHT}"
            )));
        }
        let mut words = lyndon_words(max_weight);
        words.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));

        let mut elements = Vec::with_capacity(words.len());
        let mut index = HashMap::with_capacity(words.len());
        let mut by_weight = vec![0..0; max_weight + 1];
        for w in &words {
            let weight = w.len();
            let shape = if weight == 1 {
                BasicShape::Generator(if w[0] == 0 { Generator::A } else { Generator::B })
            } else {
                // longest proper suffix that is Lyndon
                let split = (1..weight).find(|&i| is_lyndon(&w[i..])).unwrap();
                let left = index[&(split, encode(&w[..split]))];
                let right = index[&(weight - split, encode(&w[split..]))];
                BasicShape::Bracket(left, right)
            };
            let i = elements.len();
            index.insert((weight, encode(w)), i);
            if by_weight[weight].is_empty() {
                by_weight[weight] = i..i;
            }
            by_weight[weight].end = i + 1;
            elements.push(BasicCommutator {
                weight,
                word: encode(w),
                shape,
            });
        }
        let expansions = (0..elements.len()).map(|_| OnceLock::new()).collect();
        let solvers = (0..=max_weight).map(|_| OnceLock::new()).collect();
        Ok(HallBasis {
            max_weight,
            elements,
            index,
            by_weight,
            expansions,
            solvers,
        })
    }

    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[BasicCommutator] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &BasicCommutator {
        &self.elements[i]
    }

    pub fn weight_range(&self, w: usize) -> Range<usize> {
        if w == 0 || w > self.max_weight {
            return 0..0;
        }
        self.by_weight[w].clone()
    }

    pub fn count(&self, w: usize) -> usize {
        self.weight_range(w).len()
    }

    pub fn weight(&self, i: usize) -> usize {
        self.elements[i].weight
    }

    pub fn index_of_word(&self, weight: usize, word: u32) -> Option<usize> {
        self.index.get(&(weight, word)).copied()
    }

    pub fn generator(&self, g: Generator) -> FreeLieElement {
        FreeLieElement::basis(self.index[&(1, g.code())])
    }

    /// Expansion of basic commutator `i` in the free associative ring.
    pub fn expansion(&self, i: usize) -> &Homogeneous {
        self.expansions[i].get_or_init(|| match self.elements[i].shape {
            BasicShape::Generator(g) => Homogeneous::letter(g.code()),
            BasicShape::Bracket(l, r) => self.expansion(l).commutator(self.expansion(r)),
        })
    }

    /// Weights occurring in `e`, with the homogeneous parts.
    pub fn components(&self, e: &FreeLieElement) -> BTreeMap<usize, FreeLieElement> {
        let mut out: BTreeMap<usize, FreeLieElement> = BTreeMap::new();
        for (i, c) in e.terms() {
            out.entry(self.weight(i)).or_default().add_term(i, c.clone());
        }
        out
    }

    /// The single weight of a nonzero homogeneous element.
    pub fn homogeneous_weight(&self, e: &FreeLieElement) -> Option<usize> {
        let mut ws = e.terms().map(|(i, _)| self.weight(i));
        let first = ws.next()?;
        ws.all(|w| w == first).then_some(first)
    }

    /// Associative image of a homogeneous element of weight `w`.
    pub fn to_associative(&self, e: &FreeLieElement, w: usize) -> Homogeneous {
        let mut acc = Accumulator::new(w);
        for (i, c) in e.terms() {
            assert_eq!(self.weight(i), w, "element is not homogeneous of weight {w}");
            acc.add(&self.expansion(i).scaled(c));
        }
        acc.finish()
    }

    /// Writes a homogeneous associative polynomial in the Lyndon basis;
    /// fails if it is not a Lie element.
    pub fn decompose(&self, p: &Homogeneous) -> Result<FreeLieElement> {
        let d = p.degree();
        if d == 0 || d > self.max_weight {
            return if p.is_zero() {
                Ok(FreeLieElement::zero())
            } else {
                Err(Error::Truncation {
                    weight: d,
                    max_weight: self.max_weight,
                })
            };
        }
        let mut rest = p.clone();
        let mut out = FreeLieElement::zero();
        while let Some((code, c)) = rest.min_term() {
            let Some(i) = self.index_of_word(d, code) else {
                return Err(Error::NonLie { degree: d });
            };
            let c = c.clone();
            debug_assert_eq!(
                self.expansion(i).min_term().map(|(k, v)| (k, v.clone())),
                Some((code, BigInt::one()))
            );
            rest.add_scaled(&-&c, self.expansion(i));
            out.add_term(i, c);
        }
        Ok(out)
    }

    /// Lie bracket; products above `max_weight` are dropped and flagged.
    pub fn bracket(&self, u: &FreeLieElement, v: &FreeLieElement) -> Bracket {
        let us = self.components(u);
        let vs = self.components(v);
        let mut truncated = false;
        let mut acc: BTreeMap<usize, Accumulator> = BTreeMap::new();
        let assoc_u: Vec<(usize, Homogeneous)> = us.iter().map(|(&w, e)| (w, self.to_associative(e, w))).collect();
        let assoc_v: Vec<(usize, Homogeneous)> = vs.iter().map(|(&w, e)| (w, self.to_associative(e, w))).collect();
        for (wu, pu) in &assoc_u {
            for (wv, pv) in &assoc_v {
                let w = wu + wv;
                if w > self.max_weight {
                    truncated = true;
                    continue;
                }
                let a = acc.entry(w).or_insert_with(|| Accumulator::new(w));
                a.add_product(pu, pv);
                a.sub_product(pv, pu);
            }
        }
        let mut value = FreeLieElement::zero();
        for (_, a) in acc {
            let part = self
                .decompose(&a.finish())
                .expect("bracket of Lie elements is a Lie element");
            value = value.add(&part);
        }
        Bracket { value, truncated }
    }

    /// Lie bracket that refuses to drop terms.
    pub fn bracket_exact(&self, u: &FreeLieElement, v: &FreeLieElement) -> Result<FreeLieElement> {
        let b = self.bracket(u, v);
        if b.truncated {
            let w = self.components(u).keys().next_back().copied().unwrap_or(0)
                + self.components(v).keys().next_back().copied().unwrap_or(0);
            return Err(Error::Truncation {
                weight: w,
                max_weight: self.max_weight,
            });
        }
        Ok(b.value)
    }

    /// The Engel commutator `[a,_n b]`.
    pub fn engel(&self, n: usize) -> Result<FreeLieElement> {
        if n + 1 > self.max_weight {
            return Err(Error::Truncation {
                weight: n + 1,
                max_weight: self.max_weight,
            });
        }
        let b = self.generator(Generator::B);
        let mut e = self.generator(Generator::A);
        for _ in 0..n {
            e = self.bracket_exact(&e, &b)?;
        }
        Ok(e)
    }

    /// `[[a,_{2n} b], a] = [Σ_{i<n} (−1)^i [[a,_{2n−1−i} b], [a,_i b]], b]`
    pub fn check_identity(&self, n: usize) -> Result<bool> {
        if n == 0 {
            return usage("check_identity needs n >= 1");
        }
        if 2 * n + 2 > self.max_weight {
            return Err(Error::Truncation {
                weight: 2 * n + 2,
                max_weight: self.max_weight,
            });
        }
        let a = self.generator(Generator::A);
        let b = self.generator(Generator::B);
        let lhs = self.bracket_exact(&self.engel(2 * n)?, &a)?;
        let mut inner = FreeLieElement::zero();
        for i in 0..n {
            let term = self.bracket_exact(&self.engel(2 * n - 1 - i)?, &self.engel(i)?)?;
            inner = if i % 2 == 0 { inner.add(&term) } else { inner.sub(&term) };
        }
        let rhs = self.bracket_exact(&inner, &b)?;
        Ok(lhs == rhs)
    }

    fn solver(&self, w: usize) -> &ColumnHnf {
        self.solvers[w].get_or_init(|| {
            let target = self.weight_range(w);
            let gens = [self.generator(Generator::A), self.generator(Generator::B)];
            let mut cols = Vec::with_capacity(2 * self.count(w - 1));
            for g in &gens {
                for h in self.weight_range(w - 1) {
                    let br = self
                        .bracket_exact(&FreeLieElement::basis(h), g)
                        .expect("weight within basis");
                    let mut col = vec![BigInt::zero(); target.len()];
                    for (i, c) in br.terms() {
                        col[i - target.start] = c.clone();
                    }
                    cols.push(col);
                }
            }
            ColumnHnf::new(cols, target.len(), true)
        })
    }

    /// Solves `[α, a] + [β, b] = t` for α, β of weight `w − 1`, where `t` is
    /// homogeneous of weight `w ≥ 2`.
    pub fn present_with_generators(&self, t: &FreeLieElement) -> Result<(FreeLieElement, FreeLieElement)> {
        if t.is_zero() {
            return Ok((FreeLieElement::zero(), FreeLieElement::zero()));
        }
        let Some(w) = self.homogeneous_weight(t) else {
            return usage("present_with_generators needs a homogeneous element");
        };
        if w < 2 {
            return usage("present_with_generators needs weight >= 2");
        }
        let target = self.weight_range(w);
        let rhs: Vec<BigInt> = target.clone().map(|i| t.coeff(i)).collect();
        let y = self.solver(w).solve(&rhs).ok_or(Error::Unsolvable { weight: w })?;
        let lower = self.weight_range(w - 1);
        let n = lower.len();
        let mut alpha = FreeLieElement::zero();
        let mut beta = FreeLieElement::zero();
        for (j, h) in lower.enumerate() {
            alpha.add_term(h, y[j].clone());
            beta.add_term(h, y[n + j].clone());
        }
        let a = self.generator(Generator::A);
        let b = self.generator(Generator::B);
        let check = self.bracket_exact(&alpha, &a)?.add(&self.bracket_exact(&beta, &b)?);
        if &check != t {
            return Err(Error::Unsolvable { weight: w });
        }
        Ok((alpha, beta))
    }

    /// Nested bracket string of a basic commutator, e.g. `[[a,b],b]`.
    pub fn format_basic(&self, i: usize) -> String {
        match self.elements[i].shape {
            BasicShape::Generator(Generator::A) => "a".into(),
            BasicShape::Generator(Generator::B) => "b".into(),
            BasicShape::Bracket(l, r) => format!("[{},{}]", self.format_basic(l), self.format_basic(r)),
        }
    }

    /// `coeff*commutator` terms, e.g. `2*[[a,b],b] - 1*[a,[a,b]]`; zero is `0`.
    pub fn format_element(&self, e: &FreeLieElement) -> String {
        if e.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (n, (i, c)) in e.terms().enumerate() {
            match (n, c.is_negative()) {
                (0, false) => s.push_str(&format!("{}*{}", c, self.format_basic(i))),
                (0, true) => s.push_str(&format!("-{}*{}", -c, self.format_basic(i))),
                (_, false) => s.push_str(&format!(" + {}*{}", c, self.format_basic(i))),
                (_, true) => s.push_str(&format!(" - {}*{}", -c, self.format_basic(i))),
            }
        }
        s
    }

    /// Parses the text form produced by [`format_element`](Self::format_element).
    /// Bracket expressions need not be basic: `[a,b,b,a]` (left-normed) and
    /// `[b,a]` are normalised into the basis.
    pub fn parse_element(&self, s: &str) -> Result<FreeLieElement> {
        LieParser {
            src: s.as_bytes(),
            pos: 0,
            basis: self,
        }
        .parse_sum()
    }

    pub fn display<'a>(&'a self, e: &'a FreeLieElement) -> impl fmt::Display + 'a {
        struct D<'a>(&'a HallBasis, &'a FreeLieElement);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.format_element(self.1))
            }
        }
        D(self, e)
    }
}

struct LieParser<'a> {
    src: &'a [u8],
    pos: usize,
    basis: &'a HallBasis,
}

impl LieParser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn parse_sum(&mut self) -> Result<FreeLieElement> {
        let mut total = FreeLieElement::zero();
        let mut first = true;
        loop {
            let mut sign = BigInt::one();
            match self.peek() {
                None if !first => break,
                None => return self.err("empty expression"),
                Some(b'+') if !first => self.pos += 1,
                Some(b'-') => {
                    self.pos += 1;
                    sign = -sign;
                }
                Some(_) if !first => return self.err("expected '+' or '-'"),
                Some(_) => {}
            }
            first = false;
            let term = self.parse_term()?;
            total = total.add(&term.scale(&sign));
        }
        Ok(total)
    }

    fn parse_term(&mut self) -> Result<FreeLieElement> {
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let n: BigInt = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .unwrap();
            if self.peek() != Some(b'*') {
                // a bare integer is only meaningful as the zero element
                return if n.is_zero() {
                    Ok(FreeLieElement::zero())
                } else {
                    self.err("expected '*'")
                };
            }
            self.pos += 1;
            Ok(self.parse_lie()?.scale(&n))
        } else {
            self.parse_lie()
        }
    }

    fn parse_lie(&mut self) -> Result<FreeLieElement> {
        match self.peek() {
            Some(b'a') => {
                self.pos += 1;
                Ok(self.basis.generator(Generator::A))
            }
            Some(b'b') => {
                self.pos += 1;
                Ok(self.basis.generator(Generator::B))
            }
            Some(b'[') => {
                self.pos += 1;
                let mut acc = self.parse_lie()?;
                self.expect(b',')?;
                loop {
                    let next = self.parse_lie()?;
                    acc = self.basis.bracket_exact(&acc, &next)?;
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b']') => {
                            self.pos += 1;
                            return Ok(acc);
                        }
                        _ => return self.err("expected ',' or ']'"),
                    }
                }
            }
            _ => self.err("expected a, b or '['"),
        }
    }
}
