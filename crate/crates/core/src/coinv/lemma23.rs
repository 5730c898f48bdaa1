//! Brute-force test of the exactness of `K → V → (V ⊗_K V)/D`,
//! `α ↦ α v₀`, `v ↦ v ⊗ v₀ + D`, with `D = span_K{v ⊗ σ(v)}`, on explicit
//! instances: `K = Q(√d)` with conjugation, `V = K^n` with `σ_V(v) = P·v̄` for a
//! rational involution matrix `P`, and a fixed rational vector `v₀`.
//!
//! Everything is computed over Q: an element `a + b√d` has coordinates `(a, b)`.

use num_integer::Roots;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::linalg::Echelon;
use crate::ring::{Coeff, Ring};

/// `a + b√d`
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QuadElem {
    pub a: Coeff,
    pub b: Coeff,
}

impl QuadElem {
    pub fn rational(a: Coeff) -> Self {
        QuadElem { a, b: Coeff::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

/// The data of one instance: `K = Q(√d)`, `V = K^dim`, `σ_V = P ∘ conj`, `v₀`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvolutiveField {
    pub name: String,
    pub d: i64,
    pub dim: usize,
    pub p: Vec<Vec<i64>>,
    pub v0: Vec<i64>,
}

fn is_square(d: i64) -> bool {
    d >= 0 && {
        let r = (d as u64).sqrt();
        r * r == d as u64
    }
}

impl InvolutiveField {
    pub fn new(name: &str, d: i64, p: Vec<Vec<i64>>, v0: Vec<i64>) -> Result<Self> {
        if is_square(d) {
            return usage(format!("d = {d} is a square: Q(sqrt d) has no nontrivial involution"));
        }
        let dim = v0.len();
        if dim == 0 || v0.iter().all(|&x| x == 0) {
            return usage("v0 must be nonzero");
        }
        if p.len() != dim || p.iter().any(|r| r.len() != dim) {
            return usage("P must be a square matrix matching v0");
        }
        for i in 0..dim {
            for j in 0..dim {
                let pp: i64 = (0..dim).map(|k| p[i][k] * p[k][j]).sum();
                if pp != i64::from(i == j) {
                    return usage("P must satisfy P^2 = I so that sigma_V is an involution");
                }
            }
            let pv: i64 = (0..dim).map(|k| p[i][k] * v0[k]).sum();
            if pv != v0[i] {
                return usage("v0 must be fixed by sigma_V");
            }
        }
        Ok(InvolutiveField {
            name: name.into(),
            d,
            dim,
            p,
            v0,
        })
    }

    fn dq(&self) -> Coeff {
        Coeff::from_integer(self.d.into())
    }

    pub fn mul(&self, x: &QuadElem, y: &QuadElem) -> QuadElem {
        QuadElem {
            a: &x.a * &y.a + self.dq() * &x.b * &y.b,
            b: &x.a * &y.b + &x.b * &y.a,
        }
    }

    pub fn conj(&self, x: &QuadElem) -> QuadElem {
        QuadElem {
            a: x.a.clone(),
            b: -&x.b,
        }
    }

    pub fn sqrt_d(&self) -> QuadElem {
        QuadElem {
            a: Coeff::zero(),
            b: Coeff::one(),
        }
    }

    pub fn scale(&self, c: &QuadElem, v: &[QuadElem]) -> Vec<QuadElem> {
        v.iter().map(|x| self.mul(c, x)).collect()
    }

    pub fn sigma_v(&self, v: &[QuadElem]) -> Vec<QuadElem> {
        (0..self.dim)
            .map(|i| {
                let mut s = QuadElem::default();
                for (k, x) in v.iter().enumerate() {
                    let c = Coeff::from_integer(self.p[i][k].into());
                    let x = self.conj(x);
                    s.a += &c * x.a;
                    s.b += &c * x.b;
                }
                s
            })
            .collect()
    }

    pub fn v0(&self) -> Vec<QuadElem> {
        self.v0
            .iter()
            .map(|&x| QuadElem::rational(Coeff::from_integer(x.into())))
            .collect()
    }

    /// `(v ± σ_V v) / 2`
    pub fn plus_minus(&self, v: &[QuadElem]) -> (Vec<QuadElem>, Vec<QuadElem>) {
        let s = self.sigma_v(v);
        let half = Coeff::new(1.into(), 2.into());
        let plus = v
            .iter()
            .zip(&s)
            .map(|(x, y)| QuadElem {
                a: (&x.a + &y.a) * &half,
                b: (&x.b + &y.b) * &half,
            })
            .collect();
        let minus = v
            .iter()
            .zip(&s)
            .map(|(x, y)| QuadElem {
                a: (&x.a - &y.a) * &half,
                b: (&x.b - &y.b) * &half,
            })
            .collect();
        (plus, minus)
    }

    /// Q-coordinates of `x ⊗ y` in `V ⊗_K V ≅ K^{n²}`.
    pub fn tensor(&self, x: &[QuadElem], y: &[QuadElem]) -> Vec<Coeff> {
        let mut out = Vec::with_capacity(2 * self.dim * self.dim);
        for xi in x {
            for yj in y {
                let c = self.mul(xi, yj);
                out.push(c.a);
                out.push(c.b);
            }
        }
        out
    }

    /// Q-coordinates of `x ∧ y` in `Λ²_K V ≅ K^{n(n−1)/2}`.
    pub fn wedge(&self, x: &[QuadElem], y: &[QuadElem]) -> Vec<Coeff> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let p = self.mul(&x[i], &y[j]);
                let q = self.mul(&x[j], &y[i]);
                out.push(p.a - q.a);
                out.push(p.b - q.b);
            }
        }
        out
    }

    /// `ψ''(x ⊗ y) = x⁺ ∧ y⁺ + x⁻ ∧ y⁻`
    pub fn psi(&self, x: &[QuadElem], y: &[QuadElem]) -> Vec<Coeff> {
        let (xp, xm) = self.plus_minus(x);
        let (yp, ym) = self.plus_minus(y);
        self.wedge(&xp, &yp)
            .into_iter()
            .zip(self.wedge(&xm, &ym))
            .map(|(a, b)| a + b)
            .collect()
    }

    /// The Q-basis `e_i, √d e_i` of `V`.
    fn q_basis(&self) -> Vec<Vec<QuadElem>> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for unit in [QuadElem::rational(Coeff::one()), self.sqrt_d()] {
                let mut v = vec![QuadElem::default(); self.dim];
                v[i] = unit;
                out.push(v);
            }
        }
        out
    }

    /// `D` as a Q-subspace: the Q-span of `v ⊗ σv` is spanned by the
    /// polarizations `u_p ⊗ σu_q + u_q ⊗ σu_p`; the K-span adds their `√d` multiples.
    pub fn d_subspace(&self) -> Echelon {
        let basis = self.q_basis();
        let sig: Vec<_> = basis.iter().map(|u| self.sigma_v(u)).collect();
        let mut e = Echelon::new(Ring::Rationals, 2 * self.dim * self.dim);
        for p in 0..basis.len() {
            for q in p..basis.len() {
                for lambda in [QuadElem::rational(Coeff::one()), self.sqrt_d()] {
                    let x = self.tensor(&self.scale(&lambda, &basis[p]), &sig[q]);
                    let y = self.tensor(&self.scale(&lambda, &basis[q]), &sig[p]);
                    e.insert(x.into_iter().zip(y).map(|(a, b)| a + b).collect());
                }
            }
        }
        e
    }

    fn random_elem(&self, rng: &mut ChaCha8Rng) -> QuadElem {
        QuadElem {
            a: Coeff::from_integer(rng.gen_range(-4i64..=4).into()),
            b: Coeff::from_integer(rng.gen_range(-4i64..=4).into()),
        }
    }

    fn random_vec(&self, rng: &mut ChaCha8Rng) -> Vec<QuadElem> {
        (0..self.dim).map(|_| self.random_elem(rng)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma23Report {
    pub name: String,
    pub d: i64,
    pub dim: usize,
    /// Q-dimension of `V ⊗_K V`.
    pub tensor_qdim: usize,
    /// Q-dimension of `D`.
    pub d_qdim: usize,
    /// `α v₀ ⊗ v₀ ∈ D` for every sampled `α`.
    pub membership: bool,
    /// Q-dimension of the kernel of `v ↦ v ⊗ v₀ + D`.
    pub kernel_qdim: usize,
    /// Q-dimension of `K·v₀`.
    pub expected_kernel_qdim: usize,
    /// Kernel equals `K·v₀`.
    pub kernel_exact: bool,
    pub psi_samples: usize,
    /// Sampled elements of `D` that `ψ` sends to zero.
    pub psi_killed: usize,
    /// The same samples restricted to rational scalars.
    pub psi_rational_killed: usize,
    pub plus_minus: bool,
    /// Exactness: `membership && kernel_exact`.
    pub exact: bool,
    pub psi_kills_d: bool,
}

/// Runs the exactness test and the `ψ` spot check with `trials` random samples.
pub fn lemma23_test(field: &InvolutiveField, trials: usize, seed: u64) -> Result<Lemma23Report> {
    let field = InvolutiveField::new(&field.name, field.d, field.p.clone(), field.v0.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d_space = field.d_subspace();
    let v0 = field.v0();

    let membership = (0..trials).all(|_| {
        let alpha = field.random_elem(&mut rng);
        d_space.contains(&field.tensor(&field.scale(&alpha, &v0), &v0))
    });

    // kernel of the Q-linear map Q^{2n} → (V ⊗ V)/D
    let basis = field.q_basis();
    let images: Vec<Vec<Coeff>> = basis.iter().map(|u| d_space.reduce(&field.tensor(u, &v0))).collect();
    let ncoords = 2 * field.dim * field.dim;
    let rows: Vec<Vec<Coeff>> = (0..ncoords)
        .map(|c| images.iter().map(|img| img[c].clone()).collect())
        .collect();
    let kernel_qdim = Echelon::from_rows(Ring::Rationals, basis.len(), rows)
        .null_space()
        .len();
    let kv0 = [v0.clone(), field.scale(&field.sqrt_d(), &v0)];
    let kv0_in_kernel = kv0.iter().all(|v| d_space.contains(&field.tensor(v, &v0)));
    let kernel_exact = kv0_in_kernel && kernel_qdim == 2;

    // ψ on sampled elements of D, each a K-combination of generators v ⊗ σv;
    // alongside, the same sample with the scalars' √d parts dropped
    let mut psi_killed = 0;
    let mut psi_rational_killed = 0;
    let wedge_len = field.dim * field.dim.saturating_sub(1);
    for _ in 0..trials {
        let mut total = vec![Coeff::zero(); wedge_len];
        let mut rational = vec![Coeff::zero(); wedge_len];
        let mut tensor = vec![Coeff::zero(); ncoords];
        for _ in 0..3 {
            let lambda = field.random_elem(&mut rng);
            let v = field.random_vec(&mut rng);
            let y = field.sigma_v(&v);
            let x = field.scale(&lambda, &v);
            for (t, s) in total.iter_mut().zip(field.psi(&x, &y)) {
                *t += s;
            }
            for (t, s) in tensor.iter_mut().zip(field.tensor(&x, &y)) {
                *t += s;
            }
            let xr = field.scale(&QuadElem::rational(lambda.a.clone()), &v);
            for (t, s) in rational.iter_mut().zip(field.psi(&xr, &y)) {
                *t += s;
            }
        }
        debug_assert!(d_space.contains(&tensor));
        if total.iter().all(Zero::is_zero) {
            psi_killed += 1;
        }
        if rational.iter().all(Zero::is_zero) {
            psi_rational_killed += 1;
        }
    }

    let plus_minus = (0..trials).all(|_| {
        let v = field.random_vec(&mut rng);
        let (p, m) = field.plus_minus(&v);
        let sum: Vec<QuadElem> = p
            .iter()
            .zip(&m)
            .map(|(x, y)| QuadElem {
                a: &x.a + &y.a,
                b: &x.b + &y.b,
            })
            .collect();
        let neg_m: Vec<QuadElem> = m.iter().map(|x| QuadElem { a: -&x.a, b: -&x.b }).collect();
        sum == v && field.sigma_v(&p) == p && field.sigma_v(&m) == neg_m
    });

    Ok(Lemma23Report {
        name: field.name.clone(),
        d: field.d,
        dim: field.dim,
        tensor_qdim: ncoords,
        d_qdim: d_space.rank(),
        membership,
        kernel_qdim,
        expected_kernel_qdim: 2,
        kernel_exact,
        psi_samples: trials,
        psi_killed,
        psi_rational_killed,
        plus_minus,
        exact: membership && kernel_exact,
        psi_kills_d: psi_killed == trials,
    })
}

/// The three required instances, then a one-dimensional control.
pub fn lemma23_instances() -> Vec<InvolutiveField> {
    let id = |n: usize| -> Vec<Vec<i64>> { (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect() };
    vec![
        InvolutiveField::new("Q(sqrt -1), V = K^2, coordinatewise", -1, id(2), vec![1, 0]).unwrap(),
        InvolutiveField::new("Q(sqrt 2), V = K^2, swap", 2, vec![vec![0, 1], vec![1, 0]], vec![1, 1]).unwrap(),
        InvolutiveField::new("Q(sqrt -3), V = K^3, coordinatewise", -3, id(3), vec![0, 0, 1]).unwrap(),
        InvolutiveField::new("Q(sqrt 5), V = K", 5, id(1), vec![1]).unwrap(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_inputs() {
        assert!(InvolutiveField::new("x", 4, vec![vec![1]], vec![1]).is_err());
        assert!(InvolutiveField::new("x", 2, vec![vec![1]], vec![0]).is_err());
        assert!(InvolutiveField::new("x", 2, vec![vec![0, 1], vec![1, 0]], vec![1, 0]).is_err());
        assert!(InvolutiveField::new("x", 2, vec![vec![2, 0], vec![0, 1]], vec![0, 1]).is_err());
    }

    #[test]
    fn one_dimensional_instance_is_exact() {
        let f = lemma23_instances().pop().unwrap();
        let r = lemma23_test(&f, 20, 7).unwrap();
        assert!(r.exact && r.psi_kills_d && r.plus_minus, "{r:?}");
        assert_eq!(r.kernel_qdim, 2);
    }

    #[test]
    fn higher_dimensional_instances() {
        // D is the whole tensor square once dim V >= 2
        for f in &lemma23_instances()[..3] {
            let r = lemma23_test(f, 10, 1).unwrap();
            assert!(r.membership && r.plus_minus);
            assert_eq!(r.d_qdim, r.tensor_qdim, "{}", r.name);
            assert_eq!(r.kernel_qdim, 2 * r.dim);
        }
    }
}
