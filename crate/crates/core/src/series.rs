//! Commutative power series `R[x]/x^K`, the group ring `R[C]` of the infinite
//! cyclic group `C = ⟨t⟩` as Laurent polynomials, the maps `t ↦ 1 + x` and
//! `t^r ↦ (1+x)^r`, and the involutions induced by `t ↦ t⁻¹`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::linalg::{ColumnHnf, Echelon};
use crate::ring::{coeff_to_string, Coeff, Ring};

/// Exponent of an element of `C ⊗ Q`. `BigRational` is always kept in lowest
/// terms with a positive denominator.
pub type RationalExponent = Coeff;

/// `r (r−1) ⋯ (r−k+1) / k!` for any rational `r`.
pub fn binomial(r: &Coeff, k: usize) -> Coeff {
    let mut c = Coeff::one();
    for j in 0..k {
        c = c * (r - Coeff::from_integer(j.into())) / Coeff::from_integer((j + 1).into());
    }
    c
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    ring: Ring,
    coeffs: Vec<Coeff>,
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return usage("truncation must be at least 1");
    }
    Ok(())
}

impl TruncatedSeries {
    pub fn zero(ring: Ring, k: usize) -> Self {
        TruncatedSeries {
            ring,
            coeffs: vec![Coeff::zero(); k],
        }
    }

    pub fn one(ring: Ring, k: usize) -> Self {
        TruncatedSeries::monomial(ring, k, 0, Coeff::one())
    }

    /// `c x^i`, zero if `i ≥ K`.
    pub fn monomial(ring: Ring, k: usize, i: usize, c: Coeff) -> Self {
        let mut s = TruncatedSeries::zero(ring, k);
        if i < k {
            s.coeffs[i] = ring.reduce(c);
        }
        s
    }

    pub fn x(ring: Ring, k: usize) -> Self {
        TruncatedSeries::monomial(ring, k, 1, Coeff::one())
    }

    /// Coefficients `c_0, …, c_{K−1}`, each coerced into the ring.
    pub fn from_coeffs(ring: Ring, coeffs: Vec<Coeff>) -> Result<Self> {
        check_k(coeffs.len())?;
        let coeffs = coeffs.iter().map(|c| ring.coerce(c)).collect::<Result<_>>()?;
        Ok(TruncatedSeries { ring, coeffs })
    }

    pub fn from_ints(ring: Ring, coeffs: &[i64]) -> Result<Self> {
        TruncatedSeries::from_coeffs(ring, coeffs.iter().map(|&c| Coeff::from_integer(c.into())).collect())
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Coeff {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Index of the first nonzero coefficient; `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Same coefficients viewed in another ring (e.g. `Z → Q`).
    pub fn coerce_into(&self, ring: Ring) -> Result<Self> {
        TruncatedSeries::from_coeffs(ring, self.coeffs.clone())
    }

    /// Drops coefficients from `x^k` on.
    pub fn truncate(&self, k: usize) -> Self {
        assert!(k >= 1 && k <= self.trunc());
        TruncatedSeries {
            ring: self.ring,
            coeffs: self.coeffs[..k].to_vec(),
        }
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::VariantMismatch(format!(
                "series over {} and {}",
                self.ring, other.ring
            )));
        }
        if self.trunc() != other.trunc() {
            return Err(Error::TruncationMismatch {
                left: self.trunc(),
                right: other.trunc(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.zip(other, |a, b| self.ring.add(a, b)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.zip(other, |a, b| self.ring.sub(a, b)))
    }

    fn zip(&self, other: &Self, f: impl Fn(&Coeff, &Coeff) -> Coeff) -> Self {
        TruncatedSeries {
            ring: self.ring,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|c| self.ring.neg(c)).collect(),
        }
    }

    /// Multiplication by a scalar already in the ring.
    pub fn scale(&self, c: &Coeff) -> Self {
        TruncatedSeries {
            ring: self.ring,
            coeffs: self.coeffs.iter().map(|a| self.ring.mul(a, c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let k = self.trunc();
        let mut out = vec![Coeff::zero(); k];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..k - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        TruncatedSeries {
            ring: self.ring,
            coeffs: out.into_iter().map(|c| self.ring.reduce(c)).collect(),
        }
    }

    /// Multiplicative inverse; needs a unit constant term.
    pub fn inv(&self) -> Result<Self> {
        let Some(c0inv) = self.ring.inv(&self.coeffs[0]) else {
            return usage(format!(
                "constant term {} is not a unit in {}",
                self.coeffs[0], self.ring
            ));
        };
        let k = self.trunc();
        let mut y = vec![Coeff::zero(); k];
        y[0] = c0inv.clone();
        for d in 1..k {
            let mut s = Coeff::zero();
            for i in 1..=d {
                s += &self.coeffs[i] * &y[d - i];
            }
            y[d] = self.ring.reduce(-s * &c0inv);
        }
        Ok(TruncatedSeries {
            ring: self.ring,
            coeffs: y,
        })
    }

    /// Integer power; negative exponents need a unit constant term.
    pub fn pow(&self, n: &BigInt) -> Result<Self> {
        let mut base = if n.is_negative() { self.inv()? } else { self.clone() };
        let mut e = n.abs();
        let mut acc = TruncatedSeries::one(self.ring, self.trunc());
        while !e.is_zero() {
            if e.bit(0) {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if !e.is_zero() {
                base = base.mul_unchecked(&base);
            }
        }
        Ok(acc)
    }

    /// `f(g)` for `g` without constant term.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        self.compatible(g)?;
        if !g.coeffs[0].is_zero() {
            return usage("inner series of a substitution must vanish at 0");
        }
        let mut acc = TruncatedSeries::zero(self.ring, self.trunc());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_unchecked(g);
            acc.coeffs[0] = self.ring.add(&acc.coeffs[0], c);
        }
        Ok(acc)
    }

    /// `(1+x)^n` for an integer `n`, from the binomial series.
    pub fn one_plus_x_pow(ring: Ring, k: usize, n: &BigInt) -> Self {
        let r = Coeff::from_integer(n.clone());
        TruncatedSeries {
            ring,
            coeffs: (0..k).map(|i| ring.reduce(binomial(&r, i))).collect(),
        }
    }

    /// `f^r = Σ_n binom(r, n) (f − 1)^n`, over the rationals with `f(0) = 1`.
    pub fn rat_pow(&self, r: &RationalExponent) -> Result<Self> {
        if self.ring != Ring::Rationals {
            return usage(format!("rational powers need rational coefficients, not {}", self.ring));
        }
        if !self.coeffs[0].is_one() {
            return usage("rational powers need constant term 1");
        }
        let k = self.trunc();
        let mut h = self.clone();
        h.coeffs[0] = Coeff::zero();
        let mut acc = TruncatedSeries::one(self.ring, k);
        let mut hn = TruncatedSeries::one(self.ring, k);
        for n in 1..k {
            hn = hn.mul_unchecked(&h);
            if hn.is_zero() {
                break;
            }
            let b = binomial(r, n);
            for (a, c) in acc.coeffs.iter_mut().zip(&hn.coeffs) {
                *a += &b * c;
            }
        }
        Ok(acc)
    }

    /// The involution induced by `t ↦ t⁻¹`: substitution `x ↦ (1+x)⁻¹ − 1`.
    pub fn sigma_tilde(&self) -> Self {
        let k = self.trunc();
        let mut s = TruncatedSeries::one_plus_x_pow(self.ring, k, &BigInt::from(-1));
        s.coeffs[0] = Coeff::zero();
        self.compose(&s).expect("same ring and truncation")
    }

    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(coeff_to_string).collect()
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                _ => write!(f, "{c}*x^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(x^{})", self.trunc())
    }
}

/// `t^r ↦ (1+x)^r` for rational `r`, as the unique series `g` with `g(0) = 1`
/// and `(1+x) g' = r g` (coefficient recursion `(k+1) g_{k+1} = (r − k) g_k`).
pub fn tau_q(r: &RationalExponent, k: usize) -> Result<TruncatedSeries> {
    check_k(k)?;
    let mut g = vec![Coeff::one(); k];
    for i in 1..k {
        g[i] = &g[i - 1] * (r - Coeff::from_integer((i - 1).into())) / Coeff::from_integer(i.into());
    }
    Ok(TruncatedSeries {
        ring: Ring::Rationals,
        coeffs: g,
    })
}

/// Element of `R[C]`: finitely many `c_i t^i`, no zero coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    ring: Ring,
    terms: BTreeMap<i64, Coeff>,
}

impl LaurentPoly {
    pub fn zero(ring: Ring) -> Self {
        LaurentPoly {
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: Ring) -> Self {
        LaurentPoly::t_pow(ring, 0)
    }

    pub fn t_pow(ring: Ring, i: i64) -> Self {
        LaurentPoly::monomial(ring, i, Coeff::one())
    }

    pub fn monomial(ring: Ring, i: i64, c: Coeff) -> Self {
        let mut p = LaurentPoly::zero(ring);
        p.add_term(i, c);
        p
    }

    /// `t − 1`, the generator of the augmentation ideal.
    pub fn t_minus_one(ring: Ring) -> Self {
        LaurentPoly::t_pow(ring, 1).sub(&LaurentPoly::one(ring))
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Coeff)>>(ring: Ring, terms: I) -> Result<Self> {
        let mut p = LaurentPoly::zero(ring);
        for (i, c) in terms {
            p.add_term(i, ring.coerce(&c)?);
        }
        Ok(p)
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Coeff)> {
        self.terms.iter().map(|(&i, c)| (i, c))
    }

    pub fn coeff(&self, i: i64) -> Coeff {
        self.terms.get(&i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, i: i64, c: Coeff) {
        let ring = self.ring;
        let e = self.terms.entry(i).or_default();
        *e = ring.add(e, &c);
        if e.is_zero() {
            self.terms.remove(&i);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.ring, other.ring);
        let mut p = self.clone();
        for (&i, c) in &other.terms {
            p.add_term(i, c.clone());
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            ring: self.ring,
            terms: self.terms.iter().map(|(&i, c)| (i, self.ring.neg(c))).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ring, other.ring);
        let mut p = LaurentPoly::zero(self.ring);
        for (&i, a) in &self.terms {
            for (&j, b) in &other.terms {
                p.add_term(i + j, self.ring.mul(a, b));
            }
        }
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(LaurentPoly::one(self.ring), |acc, _| acc.mul(self))
    }

    /// Sum of coefficients: the augmentation `R[C] → R`.
    pub fn augmentation(&self) -> Coeff {
        let s: Coeff = self.terms.values().sum();
        self.ring.reduce(s)
    }

    /// `Σ c_i t^i ↦ Σ c_i t^{−i}`
    pub fn antipode(&self) -> Self {
        LaurentPoly {
            ring: self.ring,
            terms: self.terms.iter().map(|(&i, c)| (-i, c.clone())).collect(),
        }
    }

    /// The ring map `t ↦ 1 + x` into `R[x]/x^K`; coefficient of `x^k` is
    /// `Σ_i c_i binom(i, k)` with the generalized binomial for negative `i`.
    pub fn tau(&self, k: usize) -> Result<TruncatedSeries> {
        check_k(k)?;
        let coeffs = (0..k)
            .map(|d| {
                let s: Coeff = self
                    .terms
                    .iter()
                    .map(|(&i, c)| c * binomial(&Coeff::from_integer(i.into()), d))
                    .sum();
                self.ring.reduce(s)
            })
            .collect();
        Ok(TruncatedSeries {
            ring: self.ring,
            coeffs,
        })
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (i, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*t^{i}")?;
        }
        Ok(())
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<String, String> = self
            .terms
            .iter()
            .map(|(i, c)| (i.to_string(), coeff_to_string(c)))
            .collect();
        m.serialize(s)
    }
}

/// Outcome of the finite check that `t ↦ 1 + x` induces `R[C]/I^n ≅ R[x]/x^n`,
/// using the spanning set `t^{−N}, …, t^N` of a finite piece of `R[C]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma21Certificate {
    pub ring: Ring,
    pub n: usize,
    pub span_radius: usize,
    /// Rank of the image of the spanning set in `R[x]/x^n`.
    pub image_rank: usize,
    /// Image is all of `R^n` (over Z: unit Hermite pivots).
    pub surjective: bool,
    /// Every `(t−1)^n t^j` in the window maps to zero mod `x^n`.
    pub kernel_contained: bool,
    /// Rank of those generators; must equal `2N + 1 − n`.
    pub kernel_rank: usize,
    /// The generators span the whole kernel, not a finite-index sublattice.
    pub kernel_saturated: bool,
    /// Ranks at `N + 1` agree with the prediction from `N`.
    pub stable: bool,
    pub passed: bool,
}

struct WindowCheck {
    image_rank: usize,
    surjective: bool,
    kernel_contained: bool,
    kernel_rank: usize,
    kernel_saturated: bool,
}

fn window_check(ring: Ring, n: usize, radius: usize) -> Result<WindowCheck> {
    let big_n = radius as i64;
    let width = 2 * radius + 1;
    // columns: images of t^j in R^n
    let cols: Vec<Vec<Coeff>> = (-big_n..=big_n)
        .map(|j| LaurentPoly::t_pow(ring, j).tau(n).map(|s| s.coeffs))
        .collect::<Result<_>>()?;
    let (image_rank, surjective) = if ring.is_field() {
        let mut e = Echelon::new(ring, width);
        for i in 0..n {
            e.insert(cols.iter().map(|c| c[i].clone()).collect());
        }
        (e.rank(), e.rank() == n)
    } else {
        let h = ColumnHnf::new(cols.iter().map(|c| to_ints(c)).collect(), n, false);
        (h.rank(), h.spans_everything())
    };

    // generators of I^n inside the window, as coefficient vectors over t^{−N..N}
    let base = LaurentPoly::t_minus_one(ring).pow(n as u32);
    let gens: Vec<LaurentPoly> = (-big_n..=big_n - n as i64)
        .map(|j| base.mul(&LaurentPoly::t_pow(ring, j)))
        .collect();
    let mut kernel_contained = true;
    for g in &gens {
        if !g.tau(n)?.is_zero() {
            kernel_contained = false;
        }
    }
    let vecs: Vec<Vec<Coeff>> = gens
        .iter()
        .map(|g| (-big_n..=big_n).map(|j| g.coeff(j)).collect())
        .collect();
    let (kernel_rank, kernel_saturated) = if ring.is_field() {
        (Echelon::from_rows(ring, width, vecs).rank(), true)
    } else {
        let h = ColumnHnf::new(vecs.iter().map(|v| to_ints(v)).collect(), width, false);
        (h.rank(), h.is_saturated())
    };
    Ok(WindowCheck {
        image_rank,
        surjective,
        kernel_contained,
        kernel_rank,
        kernel_saturated,
    })
}

fn to_ints(v: &[Coeff]) -> Vec<BigInt> {
    v.iter()
        .map(|c| {
            debug_assert!(c.is_integer());
            c.to_integer()
        })
        .collect()
}

/// Certificate that `R[C]/I^n → R[x]/x^n` is bijective on the window
/// `t^{−N..N}` (`N = n + 2`): the map is onto, the kernel contains the window
/// part of `I^n`, and by rank count (plus saturation over Z) equals it. The
/// check is repeated at `N + 1` to confirm the ranks do not move.
pub fn check_lemma21(ring: Ring, n: usize) -> Result<Lemma21Certificate> {
    if n == 0 {
        return usage("n must be at least 1");
    }
    let radius = n + 2;
    let w = window_check(ring, n, radius)?;
    let w2 = window_check(ring, n, radius + 1)?;
    let expected_kernel = |r: usize| 2 * r + 1 - n;
    let ok = |w: &WindowCheck, r: usize| {
        w.surjective
            && w.kernel_contained
            && w.kernel_saturated
            && w.kernel_rank == expected_kernel(r)
            && w.image_rank == n
    };
    let stable = w2.image_rank == w.image_rank && w2.kernel_rank == w.kernel_rank + 2;
    let passed = ok(&w, radius) && ok(&w2, radius + 1) && stable;
    Ok(Lemma21Certificate {
        ring,
        n,
        span_radius: radius,
        image_rank: w.image_rank,
        surjective: w.surjective,
        kernel_contained: w.kernel_contained,
        kernel_rank: w.kernel_rank,
        kernel_saturated: w.kernel_saturated,
        stable,
        passed,
    })
}

/// Exponent as an `i64` when it is an integer of modest size.
pub fn small_integer(r: &RationalExponent) -> Option<i64> {
    if r.is_integer() {
        r.to_integer().to_i64()
    } else {
        None
    }
}
