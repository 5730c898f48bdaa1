//! Witness pairs: for an integer sequence `q` and a weight `K`, words
//! `r^{(3)}, …, r^{(K)}` and `s^{(3)}, …, s^{(K)}` with `r^{(k)}, s^{(k)} ∈ γ_k`,
//! such that
//!
//! * (1) `[r^{(3)}⋯r^{(k)}, a]·[s^{(3)}⋯s^{(k)}, b] ∈ γ_{k+2}` for every `k`,
//! * (2) every `s^{(k)}` maps to 1 in the lamplighter group,
//! * (3) `r^{(3)}⋯r^{(K)}` maps to `(Σ n_i x^{i−1}, 0)` with `n_{2i+1} = q_i`.
//!
//! Construction is inductive. The defect `D_k = [R_k, a][S_k, b]` lies in
//! `γ_{k+2}`; its leading Lie term `t` is written as `[α, a] + [β, b]`, and the
//! next factors are `A⁻¹`, `B⁻¹` for lifts `A`, `B` of `α`, `β`. When the next
//! index is odd, `[a,_k b]^m` (paired with `z^{−m}` on the `s` side) is appended
//! so that the lamplighter coefficient `n_{k+1}` comes out as `q_{k/2}`.
//!
//! `q` is read as a zero-padded infinite sequence: entries past its end are 0.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::freelie::{BasicShape, FreeLieElement, Generator, HallBasis};
use crate::lamplighter::{phi_word, LampElement, LampVariant};
use crate::magnus::{GammaWeight, GroupWord, MagnusElement};
use crate::par::{map_indexed, map_slice, Execution};
use crate::ring::{Coeff, Ring};
use crate::series::TruncatedSeries;

pub const SCHEMA_VERSION: u32 = 1;

/// `z_n = ∏_{i=0}^{n−1} [[a,_{2n−1−i} b], [a,_i b]]^{(−1)^i}`
pub fn z_word(n: usize) -> Result<GroupWord> {
    if n == 0 {
        return usage("z_n needs n >= 1");
    }
    Ok(GroupWord::alternating_engel_product(n))
}

/// Longest `q` a witness of weight `K` realises: `n_{2i+1} = q_i` needs `2i+1 ≤ K`.
pub fn max_q_len(k: usize) -> usize {
    k.saturating_sub(1) / 2
}

fn q_at(q: &[i64], i: usize) -> i64 {
    q.get(i - 1).copied().unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectFailure {
    /// `k` in `[R_k, a][S_k, b]`.
    pub step: usize,
    /// Its actual lower-central weight (required: at least `k + 2`).
    pub weight: GammaWeight,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub p0: bool,
    pub p1: bool,
    pub p2: bool,
    pub p3: bool,
    /// Index `k` of the first factor outside `γ_k`.
    pub p0_first_failure: Option<usize>,
    pub p1_first_failure: Option<DefectFailure>,
    /// Index `k` of the first `s`-factor with nontrivial lamplighter image.
    pub p2_first_failure: Option<usize>,
    pub p3_first_failure: Option<String>,
    /// Weight of `[R_k, a][S_k, b]` for `k = 3..=K`.
    pub defect_weights: Vec<GammaWeight>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.p0 && self.p1 && self.p2 && self.p3
    }

    fn vacuous() -> Self {
        Report {
            p0: true,
            p1: true,
            p2: true,
            p3: true,
            p0_first_failure: None,
            p1_first_failure: None,
            p2_first_failure: None,
            p3_first_failure: None,
            defect_weights: Vec::new(),
        }
    }

    fn malformed(msg: String) -> Self {
        Report {
            p0: false,
            p1: false,
            p2: false,
            p3: false,
            p0_first_failure: None,
            p1_first_failure: None,
            p2_first_failure: None,
            p3_first_failure: Some(msg),
            defect_weights: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub schema_version: u32,
    pub q: Vec<i64>,
    #[serde(rename = "K")]
    pub k: usize,
    /// `r^{(3)}, …, r^{(K)}`
    pub r_factors: Vec<GroupWord>,
    pub s_factors: Vec<GroupWord>,
    /// `n_3, …, n_K`
    #[serde(with = "serde_bigint_vec")]
    pub n: Vec<BigInt>,
    pub report: Option<Report>,
}

impl WitnessPair {
    pub fn r_word(&self) -> GroupWord {
        GroupWord::product(self.r_factors.iter().cloned())
    }

    pub fn s_word(&self) -> GroupWord {
        GroupWord::product(self.s_factors.iter().cloned())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let w: WitnessPair = serde_json::from_str(s).map_err(|e| Error::Parse {
            pos: e.column(),
            msg: e.to_string(),
        })?;
        if w.schema_version != SCHEMA_VERSION {
            return usage(format!("unsupported witness schema_version {}", w.schema_version));
        }
        Ok(w)
    }
}

/// Integers as JSON numbers when they fit in an `i64`, as strings otherwise.
mod serde_bigint_vec {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Num {
        Small(i64),
        Big(String),
    }

    pub fn serialize<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Num> = v
            .iter()
            .map(|x| x.to_i64().map(Num::Small).unwrap_or_else(|| Num::Big(x.to_string())))
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigInt>, D::Error> {
        Vec::<Num>::deserialize(d)?
            .into_iter()
            .map(|n| match n {
                Num::Small(x) => Ok(BigInt::from(x)),
                Num::Big(s) => s.parse().map_err(serde::de::Error::custom),
            })
            .collect()
    }
}

/// Builds witnesses of a fixed weight `K`; holds the Hall basis up to `K + 1`
/// and Magnus images of its elements, shared across builds.
pub struct WitnessEngine {
    k: usize,
    basis: HallBasis,
    images: Vec<OnceLock<MagnusElement>>,
}

impl WitnessEngine {
    pub fn new(k: usize) -> Result<Self> {
        if k < 3 {
            return usage(format!("witness weight K must be at least 3, got {k}"));
        }
        let basis = HallBasis::new(k + 1)?;
        let images = (0..basis.len()).map(|_| OnceLock::new()).collect();
        Ok(WitnessEngine { k, basis, images })
    }

    pub fn weight(&self) -> usize {
        self.k
    }

    pub fn basis(&self) -> &HallBasis {
        &self.basis
    }

    fn trunc(&self) -> usize {
        self.k + 1
    }

    /// The basic commutator as a bracket word.
    pub fn basic_word(&self, i: usize) -> GroupWord {
        match self.basis.get(i).shape {
            BasicShape::Generator(Generator::A) => GroupWord::a(),
            BasicShape::Generator(Generator::B) => GroupWord::b(),
            BasicShape::Bracket(l, r) => GroupWord::commutator(&self.basic_word(l), &self.basic_word(r)),
        }
    }

    fn basic_image(&self, i: usize) -> &MagnusElement {
        self.images[i].get_or_init(|| match self.basis.get(i).shape {
            BasicShape::Generator(g) => {
                let w = if g == Generator::A {
                    GroupWord::a()
                } else {
                    GroupWord::b()
                };
                MagnusElement::eval_word(&w, self.trunc()).expect("valid truncation")
            }
            BasicShape::Bracket(l, r) => self
                .basic_image(l)
                .commutator_with(self.basic_image(r), Execution::Sequential)
                .expect("same truncation"),
        })
    }

    /// `∏ e_i^{c_i}` over the terms of `x`, in Hall order, with its Magnus image.
    fn lift(&self, x: &FreeLieElement, exec: Execution) -> (GroupWord, MagnusElement) {
        let mut word = Vec::new();
        let mut img = MagnusElement::one(self.trunc()).expect("valid truncation");
        for (i, c) in x.terms() {
            word.push(self.basic_word(i).pow(c.clone()));
            img = img
                .mul_with(&self.basic_image(i).pow_with(c, exec), exec)
                .expect("same truncation");
        }
        (GroupWord::product(word), img)
    }

    pub fn build(&self, q: &[i64]) -> Result<WitnessPair> {
        self.build_with(q, Execution::default())
    }

    pub fn build_with(&self, q: &[i64], exec: Execution) -> Result<WitnessPair> {
        let mut w = self.build_unverified(q, exec)?;
        w.report = Some(verify_witness_with(&w, exec));
        Ok(w)
    }

    /// The construction alone, without the final independent verification.
    pub fn build_unverified(&self, q: &[i64], exec: Execution) -> Result<WitnessPair> {
        let k_max = self.k;
        if q.len() > max_q_len(k_max) {
            return usage(format!(
                "q has {} entries but weight K = {k_max} realises only {} (q_i sits at index 2i+1 <= K)",
                q.len(),
                max_q_len(k_max)
            ));
        }
        let t = self.trunc();
        let variant = LampVariant::Z;
        let eval = |w: &GroupWord| MagnusElement::eval_word_with(w, t, exec);
        let phi = |w: &GroupWord| phi_word(w, variant, k_max);
        let a = eval(&GroupWord::a())?;
        let b = eval(&GroupWord::b())?;

        let q1 = BigInt::from(q_at(q, 1));
        let r3 = GroupWord::engel(2).pow(q1.clone());
        let s3 = GroupWord::left_normed(&[GroupWord::a(), GroupWord::b(), GroupWord::a()]).pow(-q1);
        let mut big_r = eval(&r3)?;
        let mut big_s = eval(&s3)?;
        let mut phi_r = phi(&r3)?;
        let mut n = vec![x_coeff(&phi_r, 2)];
        let mut r_factors = vec![r3];
        let mut s_factors = vec![s3];

        for k in 3..k_max {
            let d = big_r
                .commutator_with(&a, exec)?
                .mul_with(&big_s.commutator_with(&b, exec)?, exec)?;
            let lie = match d.gamma_weight() {
                GammaWeight::Finite(w) if w < k + 2 => return Err(Error::Unsolvable { weight: w }),
                GammaWeight::Finite(w) if w == k + 2 => d.leading_lie(&self.basis)?,
                _ => FreeLieElement::zero(),
            };
            let (alpha, beta) = self.basis.present_with_generators(&lie)?;
            let (aw, ai) = self.lift(&alpha, exec);
            let (bw, bi) = self.lift(&beta, exec);
            let (mut r, mut s) = (aw.inverse(), bw.inverse());
            let (mut ri, mut si) = (ai.inv(), bi.inv());
            if k % 2 == 0 {
                let kp = k / 2;
                let partial = phi_r.mul(&phi(&r)?)?;
                let m = BigInt::from(q_at(q, kp)) - x_coeff(&partial, k);
                if !m.is_zero() {
                    let e = GroupWord::engel(k).pow(m.clone());
                    let z = z_word(kp)?.pow(-m);
                    ri = ri.mul_with(&eval(&e)?, exec)?;
                    si = si.mul_with(&eval(&z)?, exec)?;
                    r = GroupWord::product([r, e]);
                    s = GroupWord::product([s, z]);
                }
            }
            big_r = big_r.mul_with(&ri, exec)?;
            big_s = big_s.mul_with(&si, exec)?;
            phi_r = phi_r.mul(&phi(&r)?)?;
            n.push(x_coeff(&phi_r, k));
            r_factors.push(r);
            s_factors.push(s);
        }
        Ok(WitnessPair {
            schema_version: SCHEMA_VERSION,
            q: q.to_vec(),
            k: k_max,
            r_factors,
            s_factors,
            n,
            report: None,
        })
    }

    /// Independent builds, run concurrently under [`Execution::Parallel`].
    pub fn build_batch(&self, qs: &[Vec<i64>], exec: Execution) -> Vec<Result<WitnessPair>> {
        map_slice(qs, exec, |q| self.build_with(q, Execution::Sequential))
    }
}

pub fn build_witness(q: &[i64], k: usize) -> Result<WitnessPair> {
    WitnessEngine::new(k)?.build(q)
}

fn x_coeff(u: &LampElement, i: usize) -> BigInt {
    u.f().coeff(i).to_integer()
}

pub fn verify_witness(w: &WitnessPair) -> Report {
    verify_witness_with(w, Execution::default())
}

/// Recomputes everything from the words alone: Magnus images at truncation
/// `K + 1` for properties (0) and (1), lamplighter images mod `x^K` for (2)
/// and (3).
pub fn verify_witness_with(w: &WitnessPair, exec: Execution) -> Report {
    let k_max = w.k;
    let count = k_max.saturating_sub(2);
    if w.r_factors.len() != count || w.s_factors.len() != count || w.n.len() != count {
        return Report::malformed(format!(
            "expected {count} factors and exponents for K = {k_max}, found r: {}, s: {}, n: {}",
            w.r_factors.len(),
            w.s_factors.len(),
            w.n.len()
        ));
    }
    if count == 0 {
        return if w.q.iter().all(|&x| x == 0) {
            Report::vacuous()
        } else {
            Report::malformed("nonzero q with no factors".into())
        };
    }
    let t = k_max + 1;
    let variant = LampVariant::Z;

    // the two sides are independent; within a side, factors share subwords
    let mut sides = map_indexed(2, exec, |side| {
        let words = if side == 0 { &w.r_factors } else { &w.s_factors };
        let magnus = MagnusElement::eval_words_with(words, t, Execution::Sequential).expect("valid truncation");
        let lamp: Vec<_> = words.iter().map(|x| phi_word(x, variant, k_max)).collect();
        (magnus, lamp)
    });
    let (s_magnus, s_lamp) = sides.pop().expect("two sides");
    let (r_magnus, r_lamp) = sides.pop().expect("two sides");
    let images = r_magnus
        .into_iter()
        .zip(s_magnus)
        .zip(r_lamp.into_iter().zip(s_lamp))
        .map(|((r, s), (pr, ps))| (r, s, pr, ps));
    let mut report = Report::vacuous();
    let mut big_r = MagnusElement::one(t).expect("valid truncation");
    let mut big_s = big_r.clone();
    let mut phi_r = LampElement::identity(variant, k_max);
    let a = MagnusElement::eval_word(&GroupWord::a(), t).expect("valid truncation");
    let b = MagnusElement::eval_word(&GroupWord::b(), t).expect("valid truncation");
    for (j, img) in images.enumerate() {
        let k = j + 3;
        let (ri, si, Ok(pr), Ok(ps)) = img else {
            return Report::malformed(format!("factor {k} could not be evaluated"));
        };
        if report.p0 && !(ri.gamma_weight().is_at_least(k) && si.gamma_weight().is_at_least(k)) {
            report.p0 = false;
            report.p0_first_failure = Some(k);
        }
        if report.p2 && !ps.is_identity() {
            report.p2 = false;
            report.p2_first_failure = Some(k);
        }
        big_r = big_r.mul_with(&ri, exec).expect("same truncation");
        big_s = big_s.mul_with(&si, exec).expect("same truncation");
        phi_r = phi_r.mul(&pr).expect("same variant");
        let d = big_r
            .commutator_with(&a, exec)
            .and_then(|x| x.mul_with(&big_s.commutator_with(&b, exec)?, exec))
            .expect("same truncation");
        let weight = d.gamma_weight();
        report.defect_weights.push(weight);
        if report.p1 && !weight.is_at_least(k + 2) {
            report.p1 = false;
            report.p1_first_failure = Some(DefectFailure { step: k, weight });
        }
    }
    if let Err(msg) = check_series(w, &phi_r) {
        report.p3 = false;
        report.p3_first_failure = Some(msg);
    }
    report
}

fn check_series(w: &WitnessPair, phi_r: &LampElement) -> std::result::Result<(), String> {
    let k_max = w.k;
    if !phi_r.e().is_zero() {
        return Err(format!("image of r has nonzero exponent {}", phi_r.e()));
    }
    if w.q.len() > max_q_len(k_max) {
        return Err(format!("q longer than K = {k_max} can realise"));
    }
    let f = phi_r.f();
    for d in 0..2 {
        if !f.coeff(d).is_zero() {
            return Err(format!("coefficient of x^{d} is {}, expected 0", f.coeff(d)));
        }
    }
    for i in 3..=k_max {
        let c = f.coeff(i - 1);
        let n = &w.n[i - 3];
        if c != Coeff::from_integer(n.clone()) {
            return Err(format!("coefficient of x^{} is {c}, recorded n_{i} = {n}", i - 1));
        }
        if i % 2 == 1 {
            let qi = q_at(&w.q, (i - 1) / 2);
            if *n != BigInt::from(qi) {
                return Err(format!("n_{i} = {n} but q_{} = {qi}", (i - 1) / 2));
            }
        }
    }
    Ok(())
}

/// `f_q = Σ_{i=3}^{K} n_i x^{i−1}` over the integers, mod `x^K`.
pub fn f_q_series(w: &WitnessPair) -> Result<TruncatedSeries> {
    let mut c = vec![Coeff::zero(); w.k.max(1)];
    for (j, n) in w.n.iter().enumerate() {
        if j + 2 < c.len() {
            c[j + 2] = Coeff::from_integer(n.clone());
        }
    }
    TruncatedSeries::from_coeffs(Ring::Integers, c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    R,
    S,
}

/// One exponent in a witness: factor `k` on side `side`, exponent site `site`
/// of that factor word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TamperSite {
    pub side: Side,
    pub factor: usize,
    pub site: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tamper {
    Negate,
    Increment,
}

pub fn tamper_sites(w: &WitnessPair) -> Vec<TamperSite> {
    let mut out = Vec::new();
    for (side, factors) in [(Side::R, &w.r_factors), (Side::S, &w.s_factors)] {
        for (j, f) in factors.iter().enumerate() {
            for site in f.power_sites() {
                out.push(TamperSite {
                    side,
                    factor: j + 3,
                    site,
                });
            }
        }
    }
    out
}

/// Copy of `w` with one exponent changed and the report cleared.
pub fn tamper(w: &WitnessPair, at: TamperSite, how: Tamper) -> Option<WitnessPair> {
    let mut out = w.clone();
    let factors = match at.side {
        Side::R => &mut out.r_factors,
        Side::S => &mut out.s_factors,
    };
    let word = factors.get_mut(at.factor.checked_sub(3)?)?;
    let e = word.power_exponent(at.site)?;
    let e = match how {
        Tamper::Negate => -e,
        Tamper::Increment => e + 1,
    };
    *word = word.with_exponent(at.site, e)?;
    out.report = None;
    Some(out)
}
