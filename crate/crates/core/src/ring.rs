//! Coefficient rings: the integers, the rationals and Z/p for an odd prime p.
//!
//! Every coefficient is carried as an exact [`BigRational`]; the ring tag
//! decides how results are reduced. Residues mod p are kept in `0..p`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};

pub type Coeff = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OddPrime(u64);

impl OddPrime {
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 {
            return usage("p = 2 is not allowed: the mod-p ring needs an odd prime");
        }
        if p < 3 || !is_prime(p) {
            return usage(format!("{p} is not an odd prime"));
        }
        Ok(OddPrime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Integers,
    Rationals,
    ModP(OddPrime),
}

impl Ring {
    pub fn mod_p(p: u64) -> Result<Ring> {
        OddPrime::new(p).map(Ring::ModP)
    }

    pub fn is_field(self) -> bool {
        !matches!(self, Ring::Integers)
    }

    /// Maps an exact rational into the ring. Integers reject fractions; mod p
    /// rejects denominators divisible by p.
    pub fn coerce(self, c: &Coeff) -> Result<Coeff> {
        match self {
            Ring::Rationals => Ok(c.clone()),
            Ring::Integers => {
                if c.is_integer() {
                    Ok(c.clone())
                } else {
                    usage(format!("{c} is not an integer"))
                }
            }
            Ring::ModP(p) => {
                let p = BigInt::from(p.get());
                let den = c.denom().mod_floor(&p);
                if den.is_zero() {
                    return usage(format!("denominator of {c} is divisible by {p}"));
                }
                let inv = mod_inverse(&den, &p);
                let v = (c.numer().mod_floor(&p) * inv).mod_floor(&p);
                Ok(Coeff::from_integer(v))
            }
        }
    }

    /// Reduction for values already known to be integral (the result of ring
    /// operations on ring elements).
    #[inline]
    pub fn reduce(self, c: Coeff) -> Coeff {
        match self {
            Ring::ModP(p) => {
                debug_assert!(c.is_integer());
                Coeff::from_integer(c.numer().mod_floor(&BigInt::from(p.get())))
            }
            _ => c,
        }
    }

    #[inline]
    pub fn add(self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce(a + b)
    }

    #[inline]
    pub fn sub(self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce(a - b)
    }

    #[inline]
    pub fn mul(self, a: &Coeff, b: &Coeff) -> Coeff {
        self.reduce(a * b)
    }

    #[inline]
    pub fn neg(self, a: &Coeff) -> Coeff {
        self.reduce(-a)
    }

    /// Multiplicative inverse, if it exists in the ring.
    pub fn inv(self, a: &Coeff) -> Option<Coeff> {
        if a.is_zero() {
            return None;
        }
        match self {
            Ring::Rationals => Some(a.recip()),
            Ring::Integers => {
                if a.abs().is_one() {
                    Some(a.clone())
                } else {
                    None
                }
            }
            Ring::ModP(p) => {
                let p = BigInt::from(p.get());
                Some(Coeff::from_integer(mod_inverse(&a.numer().mod_floor(&p), &p)))
            }
        }
    }

    /// The field in which ranks of matrices over this ring are measured.
    pub fn fraction_field(self) -> Ring {
        match self {
            Ring::Integers => Ring::Rationals,
            r => r,
        }
    }
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> BigInt {
    let e = a.extended_gcd(p);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(p)
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::Rationals => write!(f, "Q"),
            Ring::ModP(p) => write!(f, "Zp:{}", p.get()),
        }
    }
}

impl FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Ring> {
        let s = s.trim();
        match s {
            "Z" => return Ok(Ring::Integers),
            "Q" => return Ok(Ring::Rationals),
            _ => {}
        }
        let p = s
            .strip_prefix("Zp:")
            .or_else(|| s.strip_prefix("Z/"))
            .ok_or_else(|| Error::Usage(format!("unknown ring {s:?}; expected Z, Q or Zp:<p>")))?;
        let p: u64 = p.parse().map_err(|_| Error::Usage(format!("bad modulus in {s:?}")))?;
        Ring::mod_p(p)
    }
}

impl Serialize for Ring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ring {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `num/den` with an explicit denominator, the serialized form of every coefficient.
pub fn coeff_to_string(c: &Coeff) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

pub fn parse_coeff(s: &str) -> Result<Coeff> {
    let s = s.trim();
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("bad rational {s:?}"),
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Coeff::new(n, d))
        }
        None => Ok(Coeff::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Coeff {
        Coeff::new(n.into(), d.into())
    }

    #[test]
    fn rejects_two_and_composites() {
        assert!(Ring::mod_p(2).is_err());
        assert!(Ring::mod_p(9).is_err());
        assert!(Ring::mod_p(1).is_err());
        assert!(Ring::mod_p(5).is_ok());
        assert!("Zp:2".parse::<Ring>().is_err());
    }

    #[test]
    fn mod_p_coercion_of_fractions() {
        let r = Ring::mod_p(5).unwrap();
        // 1/2 = 3 mod 5
        assert_eq!(r.coerce(&q(1, 2)).unwrap(), q(3, 1));
        assert_eq!(r.coerce(&q(-1, 1)).unwrap(), q(4, 1));
        assert!(r.coerce(&q(1, 5)).is_err());
        assert_eq!(r.inv(&q(2, 1)).unwrap(), q(3, 1));
    }

    #[test]
    fn ring_text_round_trip() {
        for s in ["Z", "Q", "Zp:3", "Zp:7"] {
            assert_eq!(s.parse::<Ring>().unwrap().to_string(), s);
        }
        assert_eq!("Z/5".parse::<Ring>().unwrap().to_string(), "Zp:5");
    }

    #[test]
    fn coeff_text() {
        assert_eq!(coeff_to_string(&q(-6, 4)), "-3/2");
        assert_eq!(coeff_to_string(&q(3, 1)), "3/1");
        assert_eq!(parse_coeff("7").unwrap(), q(7, 1));
        assert_eq!(parse_coeff(" -3/2 ").unwrap(), q(-3, 2));
        assert!(parse_coeff("1/0").is_err());
    }
}
