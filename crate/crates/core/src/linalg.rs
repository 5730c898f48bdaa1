//! Exact linear algebra: incremental row reduction over a field and
//! column Hermite reduction over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::ring::{Coeff, Ring};

/// A subspace of `ring^ncols` kept in reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Echelon {
    ring: Ring,
    ncols: usize,
    rows: Vec<Vec<Coeff>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(ring: Ring, ncols: usize) -> Self {
        assert!(ring.is_field(), "row reduction needs a field, got {ring}");
        Echelon {
            ring,
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_rows<I: IntoIterator<Item = Vec<Coeff>>>(ring: Ring, ncols: usize, rows: I) -> Self {
        let mut e = Echelon::new(ring, ncols);
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> &[Vec<Coeff>] {
        &self.rows
    }

    /// Canonical representative of `v` modulo the row space: zero in every pivot column.
    pub fn reduce(&self, v: &[Coeff]) -> Vec<Coeff> {
        assert_eq!(v.len(), self.ncols);
        let ring = self.ring;
        let mut v: Vec<Coeff> = v.iter().map(|c| ring.reduce(c.clone())).collect();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let c = v[p].clone();
            for (x, r) in v.iter_mut().zip(row).skip(p) {
                if !r.is_zero() {
                    *x = ring.sub(x, &ring.mul(&c, r));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Coeff]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v` to the spanning set; returns whether the rank grew.
    pub fn insert(&mut self, v: Vec<Coeff>) -> bool {
        let ring = self.ring;
        let mut v = self.reduce(&v);
        let Some(p) = v.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let inv = ring.inv(&v[p]).expect("nonzero field element");
        for x in v.iter_mut().skip(p) {
            if !x.is_zero() {
                *x = ring.mul(x, &inv);
            }
        }
        for row in &mut self.rows {
            if row[p].is_zero() {
                continue;
            }
            let c = row[p].clone();
            for (x, y) in row.iter_mut().zip(&v).skip(p) {
                if !y.is_zero() {
                    *x = ring.sub(x, &ring.mul(&c, y));
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, v);
        true
    }

    /// Columns without a pivot, i.e. coordinates of the quotient space.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut it = self.pivots.iter().peekable();
        (0..self.ncols)
            .filter(|c| {
                if it.peek() == Some(&c) {
                    it.next();
                    false
                } else {
                    true
                }
            })
            .collect()
    }

    /// Basis of `{ y : rows · y = 0 }`.
    pub fn null_space(&self) -> Vec<Vec<Coeff>> {
        let ring = self.ring;
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut y = vec![Coeff::zero(); self.ncols];
                y[f] = Coeff::one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    if !row[f].is_zero() {
                        y[p] = ring.neg(&row[f]);
                    }
                }
                y
            })
            .collect()
    }
}

pub fn rank(ring: Ring, ncols: usize, rows: &[Vec<Coeff>]) -> usize {
    Echelon::from_rows(ring.fraction_field(), ncols, rows.iter().cloned()).rank()
}

/// Column-style Hermite reduction `H = M·U` of an integer matrix, `U` unimodular.
///
/// `H` is lower echelon: column `p` has its pivot at row `pivots[p].0`, is zero
/// above it, and the pivot entry is positive. Columns past the last pivot are zero.
#[derive(Clone, Debug)]
pub struct ColumnHnf {
    nrows: usize,
    h: Vec<Vec<BigInt>>,
    u: Option<Vec<Vec<BigInt>>>,
    pivots: Vec<(usize, usize)>,
}

impl ColumnHnf {
    /// `cols[j]` is column `j` of the matrix, each of length `nrows`.
    pub fn new(cols: Vec<Vec<BigInt>>, nrows: usize, track_transform: bool) -> Self {
        let ncols = cols.len();
        for c in &cols {
            assert_eq!(c.len(), nrows);
        }
        let mut h = cols;
        let mut u = track_transform.then(|| {
            (0..ncols)
                .map(|j| {
                    let mut e = vec![BigInt::zero(); ncols];
                    e[j] = BigInt::one();
                    e
                })
                .collect::<Vec<_>>()
        });
        let mut pivots = Vec::new();
        let mut p = 0;
        for i in 0..nrows {
            if p == ncols {
                break;
            }
            loop {
                // smallest nonzero entry of row i among columns p.. becomes the pivot candidate
                let best = (p..ncols)
                    .filter(|&c| !h[c][i].is_zero())
                    .min_by(|&x, &y| h[x][i].abs().cmp(&h[y][i].abs()));
                let Some(best) = best else { break };
                h.swap(p, best);
                if let Some(u) = u.as_mut() {
                    u.swap(p, best);
                }
                let mut done = true;
                for c in p + 1..ncols {
                    if h[c][i].is_zero() {
                        continue;
                    }
                    let q = h[c][i].div_floor(&h[p][i]);
                    let (hp, hc) = pair_mut(&mut h, p, c);
                    axpy(hc, &q, hp);
                    if let Some(u) = u.as_mut() {
                        let (up, uc) = pair_mut(u, p, c);
                        axpy(uc, &q, up);
                    }
                    if !h[c][i].is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if p < ncols && !h[p][i].is_zero() {
                if h[p][i].is_negative() {
                    h[p].iter_mut().for_each(|x| *x = -&*x);
                    if let Some(u) = u.as_mut() {
                        u[p].iter_mut().for_each(|x| *x = -&*x);
                    }
                }
                pivots.push((i, p));
                p += 1;
            }
        }
        ColumnHnf { nrows, h, u, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_values(&self) -> impl Iterator<Item = &BigInt> {
        self.pivots.iter().map(move |&(i, p)| &self.h[p][i])
    }

    /// Column lattice equals `Z^nrows`.
    pub fn spans_everything(&self) -> bool {
        self.rank() == self.nrows && self.pivot_values().all(One::is_one)
    }

    /// Column lattice equals its rational span intersected with `Z^nrows`.
    pub fn is_saturated(&self) -> bool {
        self.pivot_values().all(One::is_one)
    }

    /// Some integer `y` with `M·y = t`, or `None` if no integral solution exists.
    /// Requires the transform to have been tracked.
    pub fn solve(&self, t: &[BigInt]) -> Option<Vec<BigInt>> {
        let u = self.u.as_ref().expect("solve needs the tracked transform");
        assert_eq!(t.len(), self.nrows);
        let mut r = t.to_vec();
        let mut y = vec![BigInt::zero(); u.len()];
        for &(i, p) in &self.pivots {
            if r[i].is_zero() {
                continue;
            }
            let (z, rem) = r[i].div_rem(&self.h[p][i]);
            if !rem.is_zero() {
                return None;
            }
            axpy(&mut r, &z, &self.h[p]);
            axpy(&mut y, &-z, &u[p]);
        }
        if r.iter().all(Zero::is_zero) {
            Some(y)
        } else {
            None
        }
    }
}

fn pair_mut<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    assert!(a < b);
    let (lo, hi) = v.split_at_mut(b);
    (&mut lo[a], &mut hi[0])
}

/// `dst -= q · src`
fn axpy(dst: &mut [BigInt], q: &BigInt, src: &[BigInt]) {
    if q.is_zero() {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qv(v: &[i64]) -> Vec<Coeff> {
        v.iter().map(|&x| Coeff::from_integer(x.into())).collect()
    }

    fn iv(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn echelon_rank_and_reduce() {
        let mut e = Echelon::new(Ring::Rationals, 3);
        assert!(e.insert(qv(&[1, 2, 3])));
        assert!(e.insert(qv(&[2, 4, 7])));
        assert!(!e.insert(qv(&[3, 6, 10])));
        assert_eq!(e.rank(), 2);
        assert_eq!(e.free_columns(), vec![1]);
        assert!(e.contains(&qv(&[0, 0, 5])));
        let ns = e.null_space();
        assert_eq!(ns.len(), 1);
        for row in e.rows() {
            let dot: Coeff = row.iter().zip(&ns[0]).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn echelon_mod_p() {
        let r = Ring::mod_p(3).unwrap();
        let mut e = Echelon::new(r, 2);
        e.insert(qv(&[1, 1]));
        // (2, 2) is dependent, (1, 4) = (1, 1) mod 3
        assert!(!e.insert(qv(&[2, 2])));
        assert!(!e.insert(qv(&[1, 4])));
        assert!(e.insert(qv(&[1, 2])));
    }

    #[test]
    fn hnf_solves_integer_systems() {
        // columns (2, 0), (3, 1): solve for t = (1, 1) -> y = (-1, 1)
        let h = ColumnHnf::new(vec![iv(&[2, 0]), iv(&[3, 1])], 2, true);
        let y = h.solve(&iv(&[1, 1])).unwrap();
        assert_eq!(BigInt::from(2) * &y[0] + BigInt::from(3) * &y[1], BigInt::from(1));
        assert_eq!(y[1], BigInt::from(1));
        // det 2: not the whole lattice
        assert!(!h.spans_everything());
        let h = ColumnHnf::new(vec![iv(&[2, 1]), iv(&[3, 2])], 2, false);
        assert!(h.spans_everything());
    }

    #[test]
    fn hnf_detects_non_integral_targets() {
        let h = ColumnHnf::new(vec![iv(&[2, 0]), iv(&[0, 2])], 2, true);
        assert!(h.solve(&iv(&[1, 0])).is_none());
        assert!(h.solve(&iv(&[4, -2])).is_some());
        assert!(!h.spans_everything());
        assert!(!h.is_saturated());
        // rank-deficient: target outside the column span
        let h = ColumnHnf::new(vec![iv(&[1, 1]), iv(&[2, 2])], 2, true);
        assert_eq!(h.rank(), 1);
        assert!(h.solve(&iv(&[1, 0])).is_none());
        assert!(h.is_saturated());
    }
}
