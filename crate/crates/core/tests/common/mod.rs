//! Oracles shared by the integration tests. Nothing here calls into the
//! library's own linear algebra.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use pronil_core::magnus::{GroupWord, Letter};
use proptest::prelude::*;

/// Rank over Q by fraction-free (Bareiss) elimination, pivoting from the last column.
pub fn bareiss_rank(rows: &[Vec<BigRational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            r.iter().map(|c| c.numer() * (&l / c.denom())).collect()
        })
        .collect();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in (0..ncols).rev() {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for i in rank + 1..m.len() {
            for j in 0..ncols {
                if j == col {
                    continue;
                }
                let v = (&m[rank][col] * &m[i][j] - &m[i][col] * &m[rank][j]) / &prev;
                m[i][j] = v;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Rank over F_p by plain Gaussian elimination on machine integers.
pub fn rank_mod_p(rows: &[Vec<BigRational>], p: u64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let pb = BigInt::from(p);
    let to_fp = |c: &BigRational| -> u64 {
        let n = c.numer().mod_floor(&pb);
        let d = c.denom().mod_floor(&pb);
        let d_inv = d.modpow(&BigInt::from(p - 2), &pb);
        let v: BigInt = (n * d_inv) % &pb;
        v.try_into().unwrap()
    };
    let ncols = rows[0].len();
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(to_fp).collect()).collect();
    let inv = |x: u64| -> u64 {
        let mut r = 1u64;
        let (mut b, mut e) = (x % p, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    for col in (0..ncols).rev() {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let s = inv(m[rank][col]);
        for x in m[rank].iter_mut() {
            *x = *x * s % p;
        }
        let pivot_row = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && row[col] != 0 {
                let f = row[col];
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mobius(n: u64) -> i64 {
    let (mut n, mut mu, mut d) = (n, 1i64, 2u64);
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Necklace count `(1/w) Σ_{d|w} μ(d) 2^{w/d}`.
pub fn necklace_count(w: u64) -> u64 {
    let s: i64 = (1..=w)
        .filter(|d| w.is_multiple_of(*d))
        .map(|d| mobius(d) * (1i64 << (w / d)))
        .sum();
    (s / w as i64) as u64
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn is_nonneg(c: &BigRational) -> bool {
    !c.is_negative()
}

pub fn letter(i: u8) -> Letter {
    [Letter::A, Letter::AInv, Letter::B, Letter::BInv][i as usize % 4]
}

/// Flat words of up to `max_len` letters.
pub fn flat_word(max_len: usize) -> impl Strategy<Value = GroupWord> {
    prop::collection::vec(0u8..4, 0..=max_len)
        .prop_map(|v| GroupWord::from_letters(&v.into_iter().map(letter).collect::<Vec<_>>()))
}

/// Expression words: products, small powers and commutators of letters.
pub fn tree_word() -> impl Strategy<Value = GroupWord> {
    let leaf = (0u8..4).prop_map(|i| GroupWord::Letter(letter(i)));
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(u, v)| GroupWord::commutator(&u, &v)),
            prop::collection::vec(inner.clone(), 1..3).prop_map(GroupWord::product),
            (inner, -2i64..=2).prop_map(|(u, n)| u.pow(n)),
        ]
    })
}
