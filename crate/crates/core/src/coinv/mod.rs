//! Coinvariants of `Λ²(R[x]/x^K)` under the diagonal action of `C` (or of
//! `C ⊗ Q`), where `t^r` acts by multiplication with `(1+x)^r`, and the map
//! `θ(f) = f ∧ 1` into them. `R` is the rationals or `Z/p`.

mod lemma23;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::linalg::Echelon;
use crate::ring::{coeff_to_string, Coeff, Ring};
use crate::series::{tau_q, RationalExponent, TruncatedSeries};

pub use lemma23::{lemma23_instances, lemma23_test, InvolutiveField, Lemma23Report, QuadElem};

/// `Λ²` of `R^K` with basis `e_i ∧ e_j`, `i < j`, ordered lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lambda2 {
    k: usize,
}

impl Lambda2 {
    pub fn new(k: usize) -> Self {
        Lambda2 { k }
    }

    pub fn dim(&self) -> usize {
        self.k * (self.k - 1) / 2
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.k);
        i * (2 * self.k - i - 1) / 2 + (j - i - 1)
    }

    /// Coordinates of `v ∧ w`: `v_i w_j − v_j w_i` at `e_i ∧ e_j`.
    pub fn wedge(&self, ring: Ring, v: &[Coeff], w: &[Coeff]) -> Vec<Coeff> {
        let mut out = vec![Coeff::zero(); self.dim()];
        for i in 0..self.k {
            for j in i + 1..self.k {
                let c = &v[i] * &w[j] - &v[j] * &w[i];
                out[self.index(i, j)] = ring.reduce(c);
            }
        }
        out
    }
}

/// The group elements used as relation generators: multiplication by `(1+x)^r`.
pub fn action_series(ring: Ring, k: usize, r: &RationalExponent) -> Result<TruncatedSeries> {
    if r.is_integer() {
        Ok(TruncatedSeries::one_plus_x_pow(ring, k, &r.to_integer()))
    } else if ring == Ring::Rationals {
        tau_q(r, k)
    } else {
        usage(format!(
            "exponent {r} is not an integer; only the rationals admit rational powers"
        ))
    }
}

/// Default generators: `t` for `C`, and `t^1, …, t^K` for `C ⊗ Q`.
pub fn default_action(ring: Ring, k: usize) -> Vec<RationalExponent> {
    match ring {
        Ring::Rationals => (1..=k).map(|r| Coeff::from_integer(r.into())).collect(),
        _ => vec![Coeff::one()],
    }
}

#[derive(Clone, Debug)]
pub struct CoinvariantSpace {
    ring: Ring,
    k: usize,
    acting: Vec<RationalExponent>,
    lambda2: Lambda2,
    relations: Echelon,
}

impl CoinvariantSpace {
    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn trunc(&self) -> usize {
        self.k
    }

    pub fn acting(&self) -> &[RationalExponent] {
        &self.acting
    }

    pub fn lambda2(&self) -> Lambda2 {
        self.lambda2
    }

    pub fn lambda2_dim(&self) -> usize {
        self.lambda2.dim()
    }

    pub fn relation_rank(&self) -> usize {
        self.relations.rank()
    }

    /// Dimension of the coinvariant space.
    pub fn rank(&self) -> usize {
        self.lambda2_dim() - self.relation_rank()
    }

    /// Adds the relations `(g e_i) ∧ (g e_j) − e_i ∧ e_j` for `g = (1+x)^r`;
    /// returns whether the relation space grew.
    pub fn add_action(&mut self, r: &RationalExponent) -> Result<bool> {
        let g = action_series(self.ring, self.k, r)?;
        let k = self.k;
        // images g·x^i
        let images: Vec<Vec<Coeff>> = (0..k)
            .map(|i| {
                let mut v = vec![Coeff::zero(); k];
                v[i..].clone_from_slice(&g.coeffs()[..k - i]);
                v
            })
            .collect();
        let mut grew = false;
        for i in 0..k {
            for j in i + 1..k {
                let mut rel = self.lambda2.wedge(self.ring, &images[i], &images[j]);
                let idx = self.lambda2.index(i, j);
                rel[idx] = self.ring.sub(&rel[idx], &Coeff::one());
                grew |= self.relations.insert(rel);
            }
        }
        self.acting.push(r.clone());
        Ok(grew)
    }

    /// Canonical representative of the class of a `Λ²` vector.
    pub fn class_of(&self, v: &[Coeff]) -> Vec<Coeff> {
        self.relations.reduce(v)
    }

    /// Series with the ring and truncation of this space: coefficients are
    /// coerced, dropped past `x^{K−1}`, or padded with zeros.
    pub fn adapt(&self, f: &TruncatedSeries) -> Result<Vec<Coeff>> {
        (0..self.k).map(|i| self.ring.coerce(&f.coeff(i))).collect()
    }

    /// Class of `f ∧ 1`.
    pub fn theta(&self, f: &TruncatedSeries) -> Result<Vec<Coeff>> {
        let v = self.adapt(f)?;
        let mut one = vec![Coeff::zero(); self.k];
        one[0] = Coeff::one();
        Ok(self.class_of(&self.lambda2.wedge(self.ring, &v, &one)))
    }
}

pub fn build_coinvariants(ring: Ring, k: usize, acting: &[RationalExponent]) -> Result<CoinvariantSpace> {
    if !ring.is_field() {
        return usage(format!("coinvariants are computed over Q or Zp:<p>, not {ring}"));
    }
    if k < 2 {
        return usage("coinvariants need K >= 2");
    }
    let lambda2 = Lambda2::new(k);
    let mut space = CoinvariantSpace {
        ring,
        k,
        acting: Vec::new(),
        lambda2,
        relations: Echelon::new(ring, lambda2.dim()),
    };
    for r in acting {
        space.add_action(r)?;
    }
    Ok(space)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoinvReport {
    pub schema_version: u32,
    #[serde(rename = "K")]
    pub k: usize,
    pub ring: Ring,
    pub acting: Vec<String>,
    pub lambda2_dim: usize,
    pub relation_rank: usize,
    /// Dimension of the coinvariant space.
    pub rank: usize,
    pub theta_classes: BTreeMap<String, Vec<String>>,
    /// Dimension of the span of the reported θ classes.
    pub theta_rank: usize,
    /// Labels whose θ classes coincide.
    pub equal_pairs: Vec<(String, String)>,
}

/// Report for `space` and labelled series, with their θ classes compared pairwise.
pub fn coinv_report(space: &CoinvariantSpace, inputs: &[(String, TruncatedSeries)]) -> Result<CoinvReport> {
    let mut classes = Vec::new();
    for (label, f) in inputs {
        classes.push((label.clone(), space.theta(f)?));
    }
    let mut span = Echelon::new(space.ring, space.lambda2_dim());
    for (_, c) in &classes {
        span.insert(c.clone());
    }
    let mut equal_pairs = Vec::new();
    for (i, (l1, c1)) in classes.iter().enumerate() {
        for (l2, c2) in &classes[i + 1..] {
            if c1 == c2 {
                equal_pairs.push((l1.clone(), l2.clone()));
            }
        }
    }
    Ok(CoinvReport {
        schema_version: crate::witness::SCHEMA_VERSION,
        k: space.k,
        ring: space.ring,
        acting: space.acting.iter().map(coeff_to_string).collect(),
        lambda2_dim: space.lambda2_dim(),
        relation_rank: space.relation_rank(),
        rank: space.rank(),
        theta_classes: classes
            .into_iter()
            .map(|(l, c)| (l, c.iter().map(coeff_to_string).collect()))
            .collect(),
        theta_rank: span.rank(),
        equal_pairs,
    })
}
