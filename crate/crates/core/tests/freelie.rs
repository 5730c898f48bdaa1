mod common;

use std::collections::HashMap;
use std::sync::LazyLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use pronil_core::freelie::{FreeLieElement, Generator, HallBasis};
use proptest::prelude::*;

static BASIS: LazyLock<HallBasis> = LazyLock::new(|| HallBasis::new(12).unwrap());

const WITT: [usize; 12] = [2, 1, 2, 3, 6, 9, 18, 30, 56, 99, 186, 335];

#[test]
fn weight_counts_match_witt_numbers() {
    for w in 1..=12 {
        assert_eq!(BASIS.count(w), WITT[w - 1], "weight {w}");
        assert_eq!(BASIS.count(w) as u64, common::necklace_count(w as u64));
    }
}

/// Left-normed brackets of all words of length `w`, expanded as polynomials in
/// noncommuting `a, b` with a hand-rolled string representation.
fn left_normed_span(w: usize) -> Vec<Vec<BigRational>> {
    fn bracket(u: &HashMap<String, i64>, v: &HashMap<String, i64>) -> HashMap<String, i64> {
        let mut out = HashMap::new();
        for (x, c) in u {
            for (y, d) in v {
                *out.entry(format!("{x}{y}")).or_insert(0) += c * d;
                *out.entry(format!("{y}{x}")).or_insert(0) -= c * d;
            }
        }
        out
    }
    let gen = |ch: char| HashMap::from([(ch.to_string(), 1i64)]);
    let monomials: Vec<String> = (0..1u32 << w)
        .map(|m| {
            (0..w)
                .map(|i| if m >> (w - 1 - i) & 1 == 1 { 'b' } else { 'a' })
                .collect()
        })
        .collect();
    monomials
        .iter()
        .map(|word| {
            let mut chars = word.chars();
            let mut p = gen(chars.next().unwrap());
            for ch in chars {
                p = bracket(&p, &gen(ch));
            }
            monomials
                .iter()
                .map(|m| BigRational::from_integer(p.get(m).copied().unwrap_or(0).into()))
                .collect()
        })
        .collect()
}

#[test]
fn weight_counts_match_brute_force_rank() {
    for w in 1..=6 {
        assert_eq!(common::bareiss_rank(&left_normed_span(w)), BASIS.count(w), "weight {w}");
    }
}

#[test]
fn small_examples() {
    let b2 = HallBasis::new(2).unwrap();
    assert_eq!(b2.count(2), 1);
    assert_eq!(b2.format_basic(b2.weight_range(2).start), "[a,b]");
    let e0 = BASIS.engel(0).unwrap();
    assert_eq!(e0, BASIS.generator(Generator::A));
    let lhs = BASIS.parse_element("[a,b,b,a]").unwrap();
    let rhs = BASIS.parse_element("[a,b,a,b]").unwrap();
    assert_eq!(lhs, rhs);
    assert!(!lhs.is_zero());
}

#[test]
fn identities_hold_for_small_n() {
    for n in 1..=4 {
        assert!(BASIS.check_identity(n).unwrap(), "n = {n}");
    }
    assert!(BASIS.check_identity(0).is_err());
    assert!(HallBasis::new(6).unwrap().check_identity(3).is_err());
}

#[test]
fn text_form_round_trips() {
    let e = BASIS.parse_element("2*[[a,b],b] - 3*[a,[a,b]] + [a,b,b,b,a]").unwrap();
    assert_eq!(BASIS.parse_element(&BASIS.format_element(&e)).unwrap(), e);
}

fn element(max_w: usize) -> impl Strategy<Value = FreeLieElement> {
    let n = BASIS.weight_range(max_w).end;
    prop::collection::vec((0..n, -3i64..=3), 1..4).prop_map(|terms| {
        let mut e = FreeLieElement::zero();
        for (i, c) in terms {
            e.add_term(i, BigInt::from(c));
        }
        e
    })
}

fn homogeneous(w: usize) -> impl Strategy<Value = FreeLieElement> {
    let r = BASIS.weight_range(w);
    prop::collection::vec((r, -4i64..=4), 1..5).prop_map(|terms| {
        let mut e = FreeLieElement::zero();
        for (i, c) in terms {
            e.add_term(i, BigInt::from(c));
        }
        e
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bracket_is_antisymmetric_and_satisfies_jacobi(u in element(4), v in element(4), w in element(4)) {
        let br = |x: &FreeLieElement, y: &FreeLieElement| BASIS.bracket_exact(x, y).unwrap();
        prop_assert_eq!(br(&u, &v), br(&v, &u).neg());
        let cyc = br(&u, &br(&v, &w)).add(&br(&v, &br(&w, &u))).add(&br(&w, &br(&u, &v)));
        prop_assert!(cyc.is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn presentation_substitutes_back(t in (2usize..=8).prop_flat_map(homogeneous)) {
        prop_assume!(!t.is_zero());
        let (alpha, beta) = BASIS.present_with_generators(&t).unwrap();
        let a = BASIS.generator(Generator::A);
        let b = BASIS.generator(Generator::B);
        let back = BASIS.bracket_exact(&alpha, &a).unwrap().add(&BASIS.bracket_exact(&beta, &b).unwrap());
        prop_assert_eq!(back, t);
    }
}

#[test]
fn bracket_flags_truncation() {
    let b4 = HallBasis::new(4).unwrap();
    let e3 = b4.engel(3).unwrap();
    let a = b4.generator(Generator::A);
    assert!(b4.bracket(&e3, &a).truncated);
    assert!(b4.bracket_exact(&e3, &a).is_err());
}
