//! Primal simplex for `max Σ x_j  s.t.  A x ≤ b, x ≥ 0` with a 0/1 matrix `A`
//! and `b ≥ 0`, generic over the coefficient field and the right-hand side.
//!
//! The right-hand side lives in a vector space over the coefficient field.
//! Exact mode uses rationals acting on [`LogValue`], so `b = ln m` stays
//! symbolic while every pivot is exact. Entering and leaving variables follow
//! Bland's rule.

use std::cmp::Ordering;

use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::LogValue;

pub(crate) const FLOAT_EPS: f64 = 1e-12;
pub(crate) const MAX_PIVOTS: usize = 20_000;

pub(crate) trait Coef: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn positive(&self) -> bool;
    fn is_zero(&self) -> bool;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
}

pub(crate) trait Rhs<K>: Clone {
    fn zero() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn scale(&self, k: &K) -> Self;
    fn compare(&self, o: &Self) -> Ordering;
}

impl Coef for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn positive(&self) -> bool {
        self.is_positive()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

impl Rhs<BigRational> for LogValue {
    fn zero() -> Self {
        LogValue::zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn scale(&self, k: &BigRational) -> Self {
        self.scaled(k)
    }
    fn compare(&self, o: &Self) -> Ordering {
        self.cmp(o)
    }
}

impl Coef for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn positive(&self) -> bool {
        *self > FLOAT_EPS
    }
    fn is_zero(&self) -> bool {
        self.abs() <= FLOAT_EPS
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

impl Rhs<f64> for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn scale(&self, k: &f64) -> Self {
        self * k
    }
    fn compare(&self, o: &Self) -> Ordering {
        self.total_cmp(o)
    }
}

pub(crate) struct Outcome<K, V> {
    /// Optimal primal point.
    pub x: Vec<V>,
    /// Optimal dual, one entry per constraint row.
    pub y: Vec<K>,
    pub objective: V,
    pub pivots: usize,
}

/// Solves the packing program whose row `i` is the 0/1 indicator `rows[i]`
/// over `vars` variables with bound `b[i] ≥ 0`.
pub(crate) fn solve_packing<K: Coef, V: Rhs<K>>(vars: usize, rows: &[Vec<usize>], b: &[V]) -> Result<Outcome<K, V>> {
    let m = rows.len();
    let width = vars + m;
    let mut a = vec![vec![K::zero(); width]; m];
    for (i, row) in rows.iter().enumerate() {
        for &j in row {
            a[i][j] = K::one();
        }
        a[i][vars + i] = K::one();
    }
    let mut rhs = b.to_vec();
    let mut basis: Vec<usize> = (vars..width).collect();
    let mut reduced: Vec<K> = (0..width).map(|j| if j < vars { K::one() } else { K::zero() }).collect();
    let mut objective = V::zero();
    let mut pivots = 0;

    while let Some(e) = (0..width).find(|&j| reduced[j].positive()) {
        if pivots == MAX_PIVOTS {
            return Err(Error::NonconvergentFloat(MAX_PIVOTS));
        }
        let mut leave: Option<(usize, V)> = None;
        for i in 0..m {
            if !a[i][e].positive() {
                continue;
            }
            let ratio = rhs[i].scale(&K::one().div(&a[i][e]));
            let better = match &leave {
                None => true,
                Some((r, best)) => match ratio.compare(best) {
                    Ordering::Less => true,
                    Ordering::Equal => basis[i] < basis[*r],
                    Ordering::Greater => false,
                },
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // x = 0 is feasible and every column is covered by a slack row, so
        // the program is bounded and a leaving row always exists.
        let (r, _) = leave.expect("bounded packing program");
        let inv = K::one().div(&a[r][e]);
        for v in a[r].iter_mut() {
            *v = v.mul(&inv);
        }
        rhs[r] = rhs[r].scale(&inv);
        let pivot_row = a[r].clone();
        for i in 0..m {
            if i == r || a[i][e].is_zero() {
                continue;
            }
            let f = a[i][e].clone();
            for (v, p) in a[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v = v.sub(&f.mul(p));
                }
            }
            a[i][e] = K::zero();
            rhs[i] = rhs[i].sub(&rhs[r].scale(&f));
        }
        let f = reduced[e].clone();
        for (v, p) in reduced.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *v = v.sub(&f.mul(p));
            }
        }
        reduced[e] = K::zero();
        objective = objective.add(&rhs[r].scale(&f));
        basis[r] = e;
        pivots += 1;
    }

    let mut x = vec![V::zero(); vars];
    for (i, &j) in basis.iter().enumerate() {
        if j < vars {
            x[j] = rhs[i].clone();
        }
    }
    let y = (0..m).map(|i| K::zero().sub(&reduced[vars + i])).collect();
    Ok(Outcome { x, y, objective, pivots })
}
