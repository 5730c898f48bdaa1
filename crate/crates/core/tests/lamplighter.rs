mod common;

use pronil_core::lamplighter::{gamma_weight_lamp, lamp_comm, lamp_inv, lamp_mul, phi_word, LampElement, LampVariant};
use pronil_core::magnus::{GammaWeight, GroupWord, Letter, MagnusElement};
use pronil_core::ring::{Coeff, Ring};
use pronil_core::series::TruncatedSeries;
use proptest::prelude::*;

use common::{flat_word, q, tree_word};

fn xk(ring: Ring, k: usize, trunc: usize) -> LampElement {
    LampElement::new(
        TruncatedSeries::monomial(ring, trunc, k, Coeff::from_integer(1.into())),
        q(0, 1),
    )
    .unwrap()
}

fn variants() -> [LampVariant; 3] {
    [LampVariant::Z, LampVariant::Q, "Zp:3".parse().unwrap()]
}

#[test]
fn engel_anchor() {
    let k = 11;
    for v in variants() {
        for n in 1..k {
            assert_eq!(
                phi_word(&GroupWord::engel(n), v, k).unwrap(),
                xk(v.ring(), n, k),
                "n = {n} over {v}"
            );
        }
        assert!(phi_word(&GroupWord::engel(k), v, k).unwrap().is_identity());
    }
}

#[test]
fn generator_images() {
    let k = 6;
    let a = LampElement::generator_a(LampVariant::Z, k);
    let b = LampElement::generator_b(LampVariant::Z, k);
    assert_eq!(phi_word(&"a".parse().unwrap(), LampVariant::Z, k).unwrap(), a);
    assert_eq!(lamp_comm(&a, &b).unwrap(), xk(Ring::Integers, 1, k));
    assert!(phi_word(&"[a,a^b]".parse().unwrap(), LampVariant::Z, k)
        .unwrap()
        .is_identity());
    assert!(lamp_mul(&a, &lamp_inv(&a)).unwrap().is_identity());
    assert_eq!(gamma_weight_lamp(&xk(Ring::Integers, 3, k)), GammaWeight::Finite(4));
    assert_eq!(gamma_weight_lamp(&b), GammaWeight::Finite(1));
}

#[test]
fn variants_do_not_mix() {
    let a = LampElement::generator_a(LampVariant::Z, 4);
    let b = LampElement::generator_b(LampVariant::Q, 4);
    assert!(lamp_mul(&a, &b).is_err());
    assert!(LampElement::new(TruncatedSeries::zero(Ring::Integers, 4), q(1, 2)).is_err());
}

#[test]
fn json_round_trip() {
    let g = phi_word(&"[a,b]^3 b^-2 a".parse().unwrap(), LampVariant::Q, 6).unwrap();
    let j = g.to_json();
    assert_eq!(LampElement::from_json(&j, LampVariant::Q).unwrap(), g);
    assert_eq!(j.e, "-2/1");
}

/// Oracle: `(f, m) ↦ [[(1+x)^m, 0], [f, 1]]`, multiplied as 2×2 matrices of
/// truncated integer series, letter by letter.
fn matrix_phi(letters: &[Letter], k: usize) -> (Vec<i128>, i64) {
    let mul = |p: &[i128], r: &[i128]| -> Vec<i128> {
        let mut out = vec![0i128; k];
        for (i, x) in p.iter().enumerate() {
            for (j, y) in r.iter().enumerate().take(k - i) {
                out[i + j] += x * y;
            }
        }
        out
    };
    let one_plus_x = {
        let mut v = vec![0i128; k];
        v[0] = 1;
        if k > 1 {
            v[1] = 1;
        }
        v
    };
    let mut inv = vec![0i128; k];
    for (i, c) in inv.iter_mut().enumerate() {
        *c = if i % 2 == 0 { 1 } else { -1 };
    }
    // state: top-left u^m (tracked by m), bottom-left f
    let mut f = vec![0i128; k];
    let mut m = 0i64;
    for l in letters {
        // right-multiply by the letter's matrix [[u^n, 0], [g, 1]]: f ↦ f u^n + g
        let (g, n): (Vec<i128>, i64) = match l {
            Letter::A => {
                let mut g = vec![0; k];
                g[0] = 1;
                (g, 0)
            }
            Letter::AInv => {
                let mut g = vec![0; k];
                g[0] = -1;
                (g, 0)
            }
            Letter::B => (vec![0; k], 1),
            Letter::BInv => (vec![0; k], -1),
        };
        let un = match n {
            1 => one_plus_x.clone(),
            -1 => inv.clone(),
            _ => {
                let mut e = vec![0; k];
                e[0] = 1;
                e
            }
        };
        f = mul(&f, &un).iter().zip(&g).map(|(x, y)| x + y).collect();
        m += n;
    }
    (f, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn phi_is_a_homomorphism(u in tree_word(), v in tree_word()) {
        for var in variants() {
            let k = 8;
            let lhs = phi_word(&u.times(&v), var, k).unwrap();
            let rhs = phi_word(&u, var, k).unwrap().mul(&phi_word(&v, var, k).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn phi_matches_matrix_oracle(w in flat_word(14)) {
        let k = 9;
        let (f, m) = matrix_phi(&w.letters(), k);
        let g = phi_word(&w, LampVariant::Z, k).unwrap();
        let expected = TruncatedSeries::from_coeffs(
            Ring::Integers,
            f.iter().map(|&c| Coeff::from_integer(c.into())).collect(),
        ).unwrap();
        prop_assert_eq!(g.f(), &expected);
        prop_assert_eq!(g.e(), &q(m, 1));
    }

    #[test]
    fn q_variant_is_the_coerced_z_image(w in tree_word()) {
        let k = 8;
        let z = phi_word(&w, LampVariant::Z, k).unwrap();
        let qv = phi_word(&w, LampVariant::Q, k).unwrap();
        prop_assert_eq!(qv.f(), &z.f().coerce_into(Ring::Rationals).unwrap());
        prop_assert_eq!(qv.e(), z.e());
    }

    #[test]
    fn rational_exponents_form_a_group(
        e1 in (-6i64..=6, 1i64..=4), e2 in (-6i64..=6, 1i64..=4), e3 in (-6i64..=6, 1i64..=4),
        c in prop::collection::vec(-3i64..=3, 6),
    ) {
        let f = TruncatedSeries::from_ints(Ring::Rationals, &c).unwrap();
        let g = LampElement::new(f.clone(), q(e1.0, e1.1)).unwrap();
        let h = LampElement::new(f.sigma_tilde(), q(e2.0, e2.1)).unwrap();
        let j = LampElement::new(f.scale(&q(1, 3)), q(e3.0, e3.1)).unwrap();
        prop_assert_eq!(g.mul(&h).unwrap().mul(&j).unwrap(), g.mul(&h.mul(&j).unwrap()).unwrap());
        prop_assert!(g.mul(&g.inv()).unwrap().is_identity());
        prop_assert!(g.inv().mul(&g).unwrap().is_identity());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn phi_does_not_lower_weight(w in tree_word()) {
        let k = 8;
        let mag = MagnusElement::eval_word(&w, k).unwrap().gamma_weight();
        let lamp = phi_word(&w, LampVariant::Z, k).unwrap().gamma_weight();
        prop_assert!(lamp >= mag, "{} vs {}", lamp, mag);
    }
}
