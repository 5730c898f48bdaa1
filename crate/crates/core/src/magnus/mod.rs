//! The free group on `a, b` modulo `γ_{K+1}`, through the Magnus embedding
//! `a ↦ 1 + A`, `b ↦ 1 + B` into noncommutative power series truncated above
//! degree `K`.

mod word;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freelie::{FreeLieElement, HallBasis};
use crate::monomial::{Accumulator, Homogeneous, MAX_DEGREE};
use crate::par::{map_indexed, Execution};

pub use word::{GroupWord, Letter};

/// Position in the lower central series: `g ∈ γ_k` exactly for `k ≤ weight`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GammaWeight {
    Finite(usize),
    /// Trivial at the truncation in use.
    Infinite,
}

impl GammaWeight {
    pub fn is_at_least(self, k: usize) -> bool {
        self >= GammaWeight::Finite(k)
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            GammaWeight::Finite(k) => Some(k),
            GammaWeight::Infinite => None,
        }
    }
}

impl fmt::Display for GammaWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaWeight::Finite(k) => write!(f, "{k}"),
            GammaWeight::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for GammaWeight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GammaWeight::Finite(k) => s.serialize_u64(*k as u64),
            GammaWeight::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for GammaWeight {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(usize),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(k) => Ok(GammaWeight::Finite(k)),
            Raw::S(s) if s == "inf" => Ok(GammaWeight::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad weight {s:?}"))),
        }
    }
}

/// `1 + Σ_{d=1}^{K} parts[d-1]`, with `parts[d-1]` homogeneous of degree `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MagnusElement {
    trunc: usize,
    parts: Vec<Homogeneous>,
}

/// Parts of `(1+h)⁻¹ − 1` up to degree `m`.
fn inverse_parts(h: &[Homogeneous], m: usize) -> Vec<Homogeneous> {
    let mut y: Vec<Homogeneous> = Vec::with_capacity(m);
    for d in 1..=m {
        let mut acc = Accumulator::new(d);
        acc.sub(&h[d - 1]);
        for i in 1..d {
            acc.sub_product(&h[i - 1], &y[d - i - 1]);
        }
        y.push(acc.finish());
    }
    y
}

fn check_trunc(trunc: usize) -> Result<()> {
    if trunc == 0 {
        return Err(Error::Usage("truncation weight must be at least 1".into()));
    }
    if trunc > MAX_DEGREE {
        return Err(Error::Resource(format!(
            "truncation weight {trunc} exceeds the supported maximum {MAX_DEGREE}"
        )));
    }
    Ok(())
}

impl MagnusElement {
    pub fn one(trunc: usize) -> Result<Self> {
        check_trunc(trunc)?;
        Ok(MagnusElement {
            trunc,
            parts: (1..=trunc).map(Homogeneous::zero).collect(),
        })
    }

    /// Image of a letter: `a = 1 + A`, `a⁻¹ = Σ (−A)^n`, likewise for `b`.
    pub fn letter(l: Letter, trunc: usize) -> Result<Self> {
        let mut g = MagnusElement::one(trunc)?;
        let (code, inverse) = match l {
            Letter::A => (0u32, false),
            Letter::AInv => (0, true),
            Letter::B => (1, false),
            Letter::BInv => (1, true),
        };
        for d in 1..=trunc {
            if d > 1 && !inverse {
                break;
            }
            // the word x^d: all bits equal to `code`
            let word = if code == 0 { 0 } else { (1u32 << d) - 1 };
            let c = if inverse && d % 2 == 1 {
                -BigInt::one()
            } else {
                BigInt::one()
            };
            g.parts[d - 1] = Homogeneous::monomial(d, word, c);
        }
        Ok(g)
    }

    pub fn trunc_weight(&self) -> usize {
        self.trunc
    }

    /// Degree-`d` component of `g − 1`.
    pub fn component(&self, d: usize) -> &Homogeneous {
        &self.parts[d - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.parts.iter().all(Homogeneous::is_zero)
    }

    pub fn coeff(&self, degree: usize, word: u32) -> BigInt {
        if degree == 0 {
            return BigInt::one();
        }
        self.parts.get(degree - 1).map(|h| h.coeff(word)).unwrap_or_default()
    }

    /// Number of stored nonzero coefficients, the constant term excluded.
    pub fn support_size(&self) -> usize {
        self.parts.iter().map(Homogeneous::len).sum()
    }

    fn same_trunc(&self, other: &Self) -> Result<()> {
        if self.trunc != other.trunc {
            return Err(Error::TruncationMismatch {
                left: self.trunc,
                right: other.trunc,
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_with(other, Execution::default())
    }

    /// `(1+P)(1+Q)`, degree `d`: `p_d + q_d + Σ_{i+j=d} p_i q_j`. Output degrees
    /// are independent and computed in parallel under [`Execution::Parallel`].
    pub fn mul_with(&self, other: &Self, exec: Execution) -> Result<Self> {
        self.same_trunc(other)?;
        let parts = map_indexed(self.trunc, exec, |k| {
            let d = k + 1;
            let mut acc = Accumulator::new(d);
            acc.add(&self.parts[k]);
            acc.add(&other.parts[k]);
            for i in 1..d {
                acc.add_product(&self.parts[i - 1], &other.parts[d - i - 1]);
            }
            acc.finish()
        });
        Ok(MagnusElement {
            trunc: self.trunc,
            parts,
        })
    }

    /// Geometric-series inverse, by the recursion
    /// `y_d = −h_d − Σ_{i=1}^{d−1} h_i y_{d−i}` for `(1+h)(1+y) = 1`.
    pub fn inv(&self) -> Self {
        MagnusElement {
            trunc: self.trunc,
            parts: inverse_parts(&self.parts, self.trunc),
        }
    }

    /// `g⁻¹h⁻¹gh`. With `g = 1+G ∈ γ_p`, `h = 1+H ∈ γ_q` this equals
    /// `1 + (hg)⁻¹(GH − HG)`, and since `GH − HG` starts in degree `p+q` only
    /// the first `K−p−q` degrees of `(hg)⁻¹` are needed.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.commutator_with(other, Execution::default())
    }

    pub fn commutator_with(&self, other: &Self, exec: Execution) -> Result<Self> {
        self.same_trunc(other)?;
        let t = self.trunc;
        let (Some(p), Some(q)) = (self.gamma_weight().finite(), other.gamma_weight().finite()) else {
            return MagnusElement::one(t);
        };
        if p + q > t {
            return MagnusElement::one(t);
        }
        let (g, h) = (&self.parts, &other.parts);
        // X = GH − HG, nonzero from degree p + q
        let x = map_indexed(t, exec, |k| {
            let d = k + 1;
            let mut acc = Accumulator::new(d);
            for i in p..d.saturating_sub(q - 1) {
                acc.add_product(&g[i - 1], &h[d - i - 1]);
            }
            for i in q..d.saturating_sub(p - 1) {
                acc.sub_product(&h[i - 1], &g[d - i - 1]);
            }
            acc.finish()
        });
        let m = t - p - q;
        if m == 0 {
            return Ok(MagnusElement { trunc: t, parts: x });
        }
        // hg up to degree m, then its inverse
        let hg: Vec<Homogeneous> = (1..=m)
            .map(|d| {
                let mut acc = Accumulator::new(d);
                acc.add(&g[d - 1]);
                acc.add(&h[d - 1]);
                for i in 1..d {
                    acc.add_product(&h[i - 1], &g[d - i - 1]);
                }
                acc.finish()
            })
            .collect();
        let y = inverse_parts(&hg, m);
        let p0 = p + q;
        let parts = map_indexed(t, exec, |k| {
            let d = k + 1;
            let mut acc = Accumulator::new(d);
            acc.add(&x[k]);
            for j in p0..d {
                acc.add_product(&y[d - j - 1], &x[j - 1]);
            }
            acc.finish()
        });
        Ok(MagnusElement { trunc: t, parts })
    }

    pub fn pow(&self, n: &BigInt) -> Self {
        self.pow_with(n, Execution::default())
    }

    /// `(1+G)^n = Σ_j binom(n, j) G^j`, a finite sum since `G^j` starts in
    /// degree `j·p` for `g ∈ γ_p`; valid for negative `n` too.
    pub fn pow_with(&self, n: &BigInt, exec: Execution) -> Self {
        let t = self.trunc;
        let mut acc = MagnusElement::one(t).expect("valid truncation");
        let Some(p) = self.gamma_weight().finite() else {
            return acc;
        };
        if n.is_zero() {
            return acc;
        }
        let mut gj = self.clone(); // holds G^j in its parts
        let mut binom = BigInt::one();
        for j in 1..=t / p {
            binom = binom * (n - BigInt::from(j - 1)) / BigInt::from(j);
            if binom.is_zero() {
                break;
            }
            for (a, b) in acc.parts.iter_mut().zip(&gj.parts) {
                a.add_scaled(&binom, b);
            }
            if j < t / p {
                gj.parts = map_indexed(t, exec, |k| {
                    let d = k + 1;
                    let mut s = Accumulator::new(d);
                    for i in p..d {
                        s.add_product(&gj.parts[i - 1], &self.parts[d - i - 1]);
                    }
                    s.finish()
                });
            }
        }
        acc
    }

    pub fn eval_word(w: &GroupWord, trunc: usize) -> Result<Self> {
        MagnusElement::eval_word_with(w, trunc, Execution::default())
    }

    pub fn eval_word_with(w: &GroupWord, trunc: usize, exec: Execution) -> Result<Self> {
        check_trunc(trunc)?;
        Ok(eval_rec(w, trunc, exec, &mut HashMap::new()))
    }

    /// Evaluates several words sharing one memo of commutator subwords.
    pub fn eval_words_with(words: &[GroupWord], trunc: usize, exec: Execution) -> Result<Vec<Self>> {
        check_trunc(trunc)?;
        let mut memo = HashMap::new();
        Ok(words.iter().map(|w| eval_rec(w, trunc, exec, &mut memo)).collect())
    }

    pub fn gamma_weight(&self) -> GammaWeight {
        match self.parts.iter().position(|h| !h.is_zero()) {
            Some(i) => GammaWeight::Finite(i + 1),
            None => GammaWeight::Infinite,
        }
    }

    /// The lowest nonzero component of `g − 1`, written in the Hall basis.
    pub fn leading_lie(&self, basis: &HallBasis) -> Result<FreeLieElement> {
        let GammaWeight::Finite(k) = self.gamma_weight() else {
            return Err(Error::Usage("the identity has no leading Lie term".into()));
        };
        if k > basis.max_weight() {
            return Err(Error::Truncation {
                weight: k,
                max_weight: basis.max_weight(),
            });
        }
        basis.decompose(&self.parts[k - 1])
    }
}

/// Evaluation with commutator subwords memoized: bracket words of basic
/// commutators share most of their subtrees.
fn eval_rec(
    w: &GroupWord,
    trunc: usize,
    exec: Execution,
    memo: &mut HashMap<GroupWord, MagnusElement>,
) -> MagnusElement {
    match w {
        GroupWord::Letter(l) => MagnusElement::letter(*l, trunc).expect("checked truncation"),
        GroupWord::Product(items) => {
            let mut acc = MagnusElement::one(trunc).expect("checked truncation");
            for x in items {
                let y = eval_rec(x, trunc, exec, memo);
                acc = acc.mul_with(&y, exec).expect("same truncation");
            }
            acc
        }
        GroupWord::Power(base, n) => eval_rec(base, trunc, exec, memo).pow_with(n, exec),
        GroupWord::Commutator(u, v) => {
            if let Some(g) = memo.get(w) {
                return g.clone();
            }
            let g = eval_rec(u, trunc, exec, memo)
                .commutator_with(&eval_rec(v, trunc, exec, memo), exec)
                .expect("same truncation");
            memo.insert(w.clone(), g.clone());
            g
        }
    }
}

impl fmt::Display for MagnusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1")?;
        for h in &self.parts {
            if !h.is_zero() {
                write!(f, " + ({h})")?;
            }
        }
        write!(f, " + O({})", self.trunc + 1)
    }
}

/// Checks `[[a,_{2n} b], a] ≡ [∏_{i<n} [[a,_{2n−1−i} b],[a,_i b]]^{(−1)^i}, b]`
/// modulo `γ_{2n+3}`, at truncation weight `2n + 3`.
pub fn verify_corollary_42(n: usize) -> Result<bool> {
    verify_corollary_42_at(n, 2 * n + 3)
}

/// Same check at an explicit truncation weight (at least `2n + 3`).
pub fn verify_corollary_42_at(n: usize, trunc: usize) -> Result<bool> {
    if n == 0 {
        return Err(Error::Usage("n must be at least 1".into()));
    }
    if trunc < 2 * n + 3 {
        return Err(Error::Usage(format!(
            "truncation weight {trunc} is below 2n+3 = {}",
            2 * n + 3
        )));
    }
    let (lhs, rhs) = corollary_42_sides(n);
    let l = MagnusElement::eval_word(&lhs, trunc)?;
    let r = MagnusElement::eval_word(&rhs, trunc)?;
    let q = l.inv().mul(&r)?;
    Ok(q.gamma_weight().is_at_least(2 * n + 3))
}

pub fn corollary_42_sides(n: usize) -> (GroupWord, GroupWord) {
    let lhs = GroupWord::commutator(&GroupWord::engel(2 * n), &GroupWord::a());
    let rhs = GroupWord::commutator(&GroupWord::alternating_engel_product(n), &GroupWord::b());
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, k: usize) -> MagnusElement {
        MagnusElement::eval_word(&s.parse().unwrap(), k).unwrap()
    }

    #[test]
    fn small_words() {
        assert!(ev("aA", 5).is_identity());
        let ab = ev("ab", 4);
        assert_eq!(ab.to_string(), "1 + (1*A + 1*B) + (1*AB) + O(5)");
        let c = ev("[a,b]", 4);
        assert_eq!(c.component(1).to_string(), "0");
        assert_eq!(c.component(2).to_string(), "1*AB + -1*BA");
    }

    #[test]
    fn inverse_letters() {
        let g = ev("A", 4);
        assert_eq!(g.coeff(3, 0), BigInt::from(-1));
        assert_eq!(g.coeff(4, 0), BigInt::from(1));
        assert!(ev("a", 4).mul(&g).unwrap().is_identity());
    }

    #[test]
    fn gamma_weights() {
        assert_eq!(MagnusElement::one(3).unwrap().gamma_weight(), GammaWeight::Infinite);
        assert_eq!(ev("[a,b]", 6).gamma_weight(), GammaWeight::Finite(2));
        assert_eq!(ev("[a,_5 b]", 8).gamma_weight(), GammaWeight::Finite(6));
        assert_eq!(ev("[a,_5 b]", 5).gamma_weight(), GammaWeight::Infinite);
        assert!(GammaWeight::Infinite.is_at_least(100));
    }

    #[test]
    fn mismatched_truncations() {
        let e = ev("a", 3).mul(&ev("b", 4)).unwrap_err();
        assert!(matches!(e, Error::TruncationMismatch { left: 3, right: 4 }));
        assert!(MagnusElement::one(0).is_err());
    }

    #[test]
    fn element_and_word_commutators_agree() {
        let a = ev("a", 6);
        let b = ev("b", 6);
        assert_eq!(a.commutator(&b).unwrap(), ev("[a,b]", 6));
        assert!(a.commutator(&a).unwrap().is_identity());
    }

    #[test]
    fn powers() {
        let g = ev("ab", 6);
        let n = BigInt::from(-3);
        assert_eq!(g.pow(&n), ev("(ab)^-3", 6));
        assert_eq!(g.pow(&n), ev("BABABA", 6));
        assert!(g.pow(&BigInt::zero()).is_identity());
    }

    #[test]
    fn leading_lie_terms() {
        let basis = HallBasis::new(6).unwrap();
        let l = ev("[a,b,b]", 6).leading_lie(&basis).unwrap();
        assert_eq!(basis.format_element(&l), "1*[[a,b],b]");
        let l = ev("[a,b,b][a,b,a]^2", 6).leading_lie(&basis).unwrap();
        assert_eq!(l, basis.parse_element("[a,b,b] + 2*[a,b,a]").unwrap());
        assert!(MagnusElement::one(3).unwrap().leading_lie(&basis).is_err());
    }

    #[test]
    fn corollary_small_cases() {
        for n in 1..=3 {
            assert!(verify_corollary_42(n).unwrap(), "n = {n}");
        }
        // the two sides differ, just not below weight 2n+3
        let (l, r) = corollary_42_sides(1);
        assert_ne!(ev(&l.to_string(), 5), ev(&r.to_string(), 5));
        let q = ev(&l.to_string(), 5).inv().mul(&ev(&r.to_string(), 5)).unwrap();
        assert!(q.gamma_weight().is_at_least(5));
        assert!(verify_corollary_42_at(1, 4).is_err());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let g = ev("[a,b,b]ab^2", 8);
        let h = ev("[a,b,a]^-1Ba", 8);
        assert_eq!(
            g.mul_with(&h, Execution::Sequential).unwrap(),
            g.mul_with(&h, Execution::Parallel).unwrap()
        );
    }
}
