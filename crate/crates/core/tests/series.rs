mod common;

use num_bigint::BigInt;
use pronil_core::ring::{Coeff, Ring};
use pronil_core::series::{binomial, check_lemma21, tau_q, LaurentPoly, TruncatedSeries};
use proptest::prelude::*;

use common::q;

fn laurent(ring: Ring) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-4i64..=4, -5i64..=5), 0..5).prop_map(move |terms| {
        LaurentPoly::from_terms(ring, terms.into_iter().map(|(i, c)| (i, Coeff::from_integer(c.into())))).unwrap()
    })
}

fn ring() -> impl Strategy<Value = Ring> {
    prop_oneof![
        Just(Ring::Integers),
        Just(Ring::Rationals),
        Just(Ring::mod_p(5).unwrap()),
        Just(Ring::mod_p(7).unwrap()),
    ]
}

/// `1 + Σ c_i x^i` with small rational coefficients.
fn unit_series(k: usize) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec((-3i64..=3, 1i64..=3), k - 1).prop_map(move |cs| {
        let mut v = vec![Coeff::from_integer(1.into())];
        v.extend(cs.into_iter().map(|(n, d)| q(n, d)));
        TruncatedSeries::from_coeffs(Ring::Rationals, v).unwrap()
    })
}

fn rational() -> impl Strategy<Value = Coeff> {
    (-12i64..=12, 1i64..=7).prop_map(|(n, d)| q(n, d))
}

#[test]
fn tau_of_generators() {
    let k = 8;
    let t = LaurentPoly::t_pow(Ring::Integers, 1).tau(k).unwrap();
    assert_eq!(
        t,
        TruncatedSeries::from_ints(Ring::Integers, &[1, 1, 0, 0, 0, 0, 0, 0]).unwrap()
    );
    let t_inv = LaurentPoly::t_pow(Ring::Integers, -1).tau(k).unwrap();
    assert_eq!(
        t_inv,
        TruncatedSeries::from_ints(Ring::Integers, &[1, -1, 1, -1, 1, -1, 1, -1]).unwrap()
    );
    assert!(t.mul(&t_inv).unwrap().is_one());
}

#[test]
fn antipode_inverts_t() {
    let p = LaurentPoly::t_pow(Ring::Integers, 1);
    assert_eq!(p.antipode(), LaurentPoly::t_pow(Ring::Integers, -1));
    let x = LaurentPoly::t_minus_one(Ring::Integers)
        .pow(3)
        .mul(&LaurentPoly::t_pow(Ring::Integers, 2));
    assert_eq!(x.antipode().antipode(), x);
}

#[test]
fn sigma_tilde_of_x() {
    let k = 10;
    let x = TruncatedSeries::x(Ring::Integers, k);
    let expected: Vec<i64> = (0..k as i64)
        .map(|i| {
            if i == 0 {
                0
            } else if i % 2 == 1 {
                -1
            } else {
                1
            }
        })
        .collect();
    assert_eq!(
        x.sigma_tilde(),
        TruncatedSeries::from_ints(Ring::Integers, &expected).unwrap()
    );
}

#[test]
fn sigma_tilde_is_an_involution_at_32() {
    let k = 32;
    for ring in [Ring::Integers, Ring::Rationals, Ring::mod_p(3).unwrap()] {
        for i in 0..k {
            let m = TruncatedSeries::monomial(ring, k, i, Coeff::from_integer(1.into()));
            assert_eq!(m.sigma_tilde().sigma_tilde(), m, "x^{i} over {ring}");
        }
    }
}

#[test]
fn sigma_tilde_matches_antipode_under_tau() {
    let k = 9;
    let p = LaurentPoly::from_terms(Ring::Integers, [(-2, q(3, 1)), (1, q(-1, 1)), (4, q(2, 1))]).unwrap();
    assert_eq!(p.antipode().tau(k).unwrap(), p.tau(k).unwrap().sigma_tilde());
}

#[test]
fn tau_q_agrees_with_rat_pow_on_fifty_rationals() {
    let k = 12;
    let one_plus_x = TruncatedSeries::from_ints(Ring::Rationals, &[1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]).unwrap();
    let mut checked = 0;
    for d in 1..=7i64 {
        for n in -6..=6i64 {
            let r = q(n, d);
            if checked == 50 {
                break;
            }
            assert_eq!(tau_q(&r, k).unwrap(), one_plus_x.rat_pow(&r).unwrap(), "r = {r}");
            checked += 1;
        }
    }
    assert_eq!(checked, 50);
}

#[test]
fn tau_q_on_integers_is_the_binomial_series() {
    for n in -5..=5i64 {
        assert_eq!(
            tau_q(&q(n, 1), 10).unwrap(),
            TruncatedSeries::one_plus_x_pow(Ring::Rationals, 10, &BigInt::from(n))
        );
    }
    assert_eq!(binomial(&q(1, 2), 2), q(-1, 8));
}

#[test]
fn rat_pow_rejects_bad_input() {
    let f = TruncatedSeries::from_ints(Ring::Rationals, &[2, 1, 0]).unwrap();
    assert!(f.rat_pow(&q(1, 2)).is_err());
    let g = TruncatedSeries::from_ints(Ring::Integers, &[1, 1, 0]).unwrap();
    assert!(g.rat_pow(&q(1, 2)).is_err());
}

#[test]
fn lemma21_certificates() {
    assert!(check_lemma21(Ring::Integers, 3).unwrap().passed);
    assert!(check_lemma21(Ring::mod_p(5).unwrap(), 6).unwrap().passed);
    for ring in [Ring::Integers, Ring::Rationals, Ring::mod_p(5).unwrap()] {
        for n in 1..=8 {
            let c = check_lemma21(ring, n).unwrap();
            assert!(c.passed && c.stable && c.surjective && c.kernel_saturated, "{c:?}");
            assert_eq!(c.image_rank, n);
            assert_eq!(c.kernel_rank, 2 * c.span_radius + 1 - n);
        }
    }
}

#[test]
fn even_prime_is_rejected() {
    assert!(Ring::mod_p(2).is_err());
    assert!(Ring::mod_p(9).is_err());
}

fn laurent_pair() -> impl Strategy<Value = (LaurentPoly, LaurentPoly)> {
    ring().prop_flat_map(|r| (laurent(r), laurent(r)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tau_is_a_ring_homomorphism((p, p2) in laurent_pair()) {
        let k = 9;
        prop_assert_eq!(p.mul(&p2).tau(k).unwrap(), p.tau(k).unwrap().mul(&p2.tau(k).unwrap()).unwrap());
        prop_assert_eq!(p.add(&p2).tau(k).unwrap(), p.tau(k).unwrap().add(&p2.tau(k).unwrap()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn powers_of_the_augmentation_ideal_have_high_valuation(
        (p, _) in laurent_pair(),
        n in 1u32..=8,
    ) {
        let k = 12;
        let x = LaurentPoly::t_minus_one(p.ring()).pow(n).mul(&p);
        prop_assert!(x.augmentation() == Coeff::from_integer(0.into()));
        let s = x.tau(k).unwrap();
        prop_assert!(s.valuation().is_none_or(|v| v >= n as usize));
    }

    #[test]
    fn rational_power_laws(f in unit_series(8), r1 in rational(), r2 in rational()) {
        let sum = &r1 + &r2;
        let prod = &r1 * &r2;
        prop_assert_eq!(f.rat_pow(&sum).unwrap(), f.rat_pow(&r1).unwrap().mul(&f.rat_pow(&r2).unwrap()).unwrap());
        prop_assert_eq!(f.rat_pow(&prod).unwrap(), f.rat_pow(&r1).unwrap().rat_pow(&r2).unwrap());
    }

    #[test]
    fn square_root_squares_back(f in unit_series(10)) {
        let h = f.rat_pow(&q(1, 2)).unwrap();
        prop_assert_eq!(h.mul(&h).unwrap(), f);
    }

    #[test]
    fn integer_rational_powers_match_repeated_products(f in unit_series(8), n in -4i64..=4) {
        prop_assert_eq!(f.rat_pow(&q(n, 1)).unwrap(), f.pow(&BigInt::from(n)).unwrap());
    }
}
