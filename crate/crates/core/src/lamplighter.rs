//! Completed lamplighter groups `R[[x]] ⋊ C` (R = Z or Z/p) and
//! `Q[[x]] ⋊ (C ⊗ Q)` at truncation `x^K`, and the map `φ` from the free group
//! sending `a ↦ (1, 0)` and `b ↦ (0, 1)`.
//!
//! Group law: `(f, m)(g, n) = (f·(1+x)^n + g, m + n)`. With `[u,v] = u⁻¹v⁻¹uv`
//! this gives `[a,_k b] = (x^k, 0)`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::magnus::{GammaWeight, GroupWord, Letter};
use crate::ring::{coeff_to_string, parse_coeff, Coeff, OddPrime, Ring};
use crate::series::{tau_q, RationalExponent, TruncatedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LampVariant {
    /// `Z[[x]] ⋊ C`
    Z,
    /// `Q[[x]] ⋊ (C ⊗ Q)`
    Q,
    /// `Z/p[[x]] ⋊ C`
    Zp(OddPrime),
}

impl LampVariant {
    pub fn ring(self) -> Ring {
        match self {
            LampVariant::Z => Ring::Integers,
            LampVariant::Q => Ring::Rationals,
            LampVariant::Zp(p) => Ring::ModP(p),
        }
    }

    pub fn from_ring(ring: Ring) -> Self {
        match ring {
            Ring::Integers => LampVariant::Z,
            Ring::Rationals => LampVariant::Q,
            Ring::ModP(p) => LampVariant::Zp(p),
        }
    }

    pub fn rational_exponents(self) -> bool {
        self == LampVariant::Q
    }
}

impl fmt::Display for LampVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ring())
    }
}

impl FromStr for LampVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse().map(LampVariant::from_ring)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LampElement {
    f: TruncatedSeries,
    e: RationalExponent,
}

impl LampElement {
    pub fn new(f: TruncatedSeries, e: RationalExponent) -> Result<Self> {
        if !e.is_integer() && f.ring() != Ring::Rationals {
            return usage(format!("exponent {e} must be an integer over {}", f.ring()));
        }
        Ok(LampElement { f, e })
    }

    pub fn identity(variant: LampVariant, k: usize) -> Self {
        LampElement {
            f: TruncatedSeries::zero(variant.ring(), k),
            e: Coeff::zero(),
        }
    }

    pub fn generator_a(variant: LampVariant, k: usize) -> Self {
        LampElement {
            f: TruncatedSeries::one(variant.ring(), k),
            e: Coeff::zero(),
        }
    }

    pub fn generator_b(variant: LampVariant, k: usize) -> Self {
        LampElement {
            f: TruncatedSeries::zero(variant.ring(), k),
            e: Coeff::one(),
        }
    }

    pub fn f(&self) -> &TruncatedSeries {
        &self.f
    }

    pub fn e(&self) -> &RationalExponent {
        &self.e
    }

    pub fn variant(&self) -> LampVariant {
        LampVariant::from_ring(self.f.ring())
    }

    pub fn trunc(&self) -> usize {
        self.f.trunc()
    }

    pub fn is_identity(&self) -> bool {
        self.e.is_zero() && self.f.is_zero()
    }

    /// `(1+x)^e` in the coefficient ring.
    fn action(&self, e: &RationalExponent) -> TruncatedSeries {
        let ring = self.f.ring();
        if e.is_integer() {
            TruncatedSeries::one_plus_x_pow(ring, self.trunc(), &e.to_integer())
        } else {
            tau_q(e, self.trunc()).expect("positive truncation")
        }
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.variant() != other.variant() {
            return Err(Error::VariantMismatch(format!(
                "lamplighter elements over {} and {}",
                self.variant(),
                other.variant()
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

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let f = if other.e.is_zero() {
            self.f.add(&other.f)?
        } else {
            self.f.mul(&self.action(&other.e))?.add(&other.f)?
        };
        Ok(LampElement {
            f,
            e: &self.e + &other.e,
        })
    }

    /// `(f, m)⁻¹ = (−f·(1+x)^{−m}, −m)`
    pub fn inv(&self) -> Self {
        let e = -&self.e;
        if e.is_zero() {
            return LampElement { f: self.f.neg(), e };
        }
        let f = self.f.mul(&self.action(&e)).expect("same ring").neg();
        LampElement { f, e }
    }

    /// `u⁻¹v⁻¹uv`
    pub fn comm(&self, other: &Self) -> Result<Self> {
        if self.e.is_zero() && other.e.is_zero() {
            self.compatible(other)?;
            return Ok(LampElement::identity(self.variant(), self.trunc()));
        }
        self.inv().mul(&other.inv())?.mul(self)?.mul(other)
    }

    pub fn pow(&self, n: &BigInt) -> Self {
        if self.e.is_zero() {
            let c = Coeff::from_integer(n.clone());
            let c = self.f.ring().coerce(&c).expect("integers map into every ring");
            return LampElement {
                f: self.f.scale(&c),
                e: Coeff::zero(),
            };
        }
        let mut base = if n.is_negative() { self.inv() } else { self.clone() };
        let mut e = n.abs();
        let mut acc = LampElement::identity(self.variant(), self.trunc());
        while !e.is_zero() {
            if e.bit(0) {
                acc = acc.mul(&base).expect("same variant");
            }
            e >>= 1;
            if !e.is_zero() {
                base = base.mul(&base).expect("same variant");
            }
        }
        acc
    }

    /// Lower-central weight: 1 off the base group, `v(f) + 1` on it.
    pub fn gamma_weight(&self) -> GammaWeight {
        if !self.e.is_zero() {
            return GammaWeight::Finite(1);
        }
        match self.f.valuation() {
            Some(v) => GammaWeight::Finite(v + 1),
            None => GammaWeight::Infinite,
        }
    }

    pub fn to_json(&self) -> LampJson {
        LampJson {
            f: self.f.coeff_strings(),
            e: coeff_to_string(&self.e),
        }
    }

    pub fn from_json(j: &LampJson, variant: LampVariant) -> Result<Self> {
        let coeffs = j.f.iter().map(|s| parse_coeff(s)).collect::<Result<Vec<_>>>()?;
        let f = TruncatedSeries::from_coeffs(variant.ring(), coeffs)?;
        LampElement::new(f, parse_coeff(&j.e)?)
    }
}

impl fmt::Display for LampElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.f, self.e)
    }
}

pub fn lamp_mul(u: &LampElement, v: &LampElement) -> Result<LampElement> {
    u.mul(v)
}

pub fn lamp_inv(u: &LampElement) -> LampElement {
    u.inv()
}

pub fn lamp_comm(u: &LampElement, v: &LampElement) -> Result<LampElement> {
    u.comm(v)
}

pub fn gamma_weight_lamp(u: &LampElement) -> GammaWeight {
    u.gamma_weight()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LampJson {
    pub f: Vec<String>,
    pub e: String,
}

pub fn phi_word(w: &GroupWord, variant: LampVariant, k: usize) -> Result<LampElement> {
    if k == 0 {
        return usage("truncation must be at least 1");
    }
    Ok(phi_rec(w, variant, k, &mut HashMap::new()))
}

fn phi_rec(w: &GroupWord, variant: LampVariant, k: usize, memo: &mut HashMap<GroupWord, LampElement>) -> LampElement {
    match w {
        GroupWord::Letter(l) => match l {
            Letter::A => LampElement::generator_a(variant, k),
            Letter::AInv => LampElement::generator_a(variant, k).inv(),
            Letter::B => LampElement::generator_b(variant, k),
            Letter::BInv => LampElement::generator_b(variant, k).inv(),
        },
        GroupWord::Product(items) => {
            let mut acc = LampElement::identity(variant, k);
            for x in items {
                let y = phi_rec(x, variant, k, memo);
                acc = acc.mul(&y).expect("same variant");
            }
            acc
        }
        GroupWord::Power(base, n) => phi_rec(base, variant, k, memo).pow(n),
        GroupWord::Commutator(u, v) => {
            if let Some(g) = memo.get(w) {
                return g.clone();
            }
            let g = phi_rec(u, variant, k, memo)
                .comm(&phi_rec(v, variant, k, memo))
                .expect("same variant");
            memo.insert(w.clone(), g.clone());
            g
        }
    }
}
