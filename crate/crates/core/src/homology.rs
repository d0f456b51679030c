//! Simplicial homology with field coefficients, Morse-inequality slacks and
//! free faces.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiVector {
    pub betti: Vec<u64>,
    pub field_char: u32,
}

impl BettiVector {
    pub fn get(&self, j: usize) -> u64 {
        self.betti.get(j).copied().unwrap_or(0)
    }

    pub fn euler(&self) -> i64 {
        alternating(&self.betti)
    }
}

fn alternating(v: &[u64]) -> i64 {
    v.iter().enumerate().map(|(j, &b)| if j % 2 == 0 { b as i64 } else { -(b as i64) }).sum()
}

pub fn euler_characteristic(k: &SimplicialComplex) -> i64 {
    alternating(k.simplex_counts().as_slice())
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn face_index(faces: &[Simplex]) -> HashMap<&[usize], usize> {
    faces.iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect()
}

/// Rank of `∂_j` over GF(2): columns are packed bit vectors over the
/// `(j-1)`-faces, reduced left to right against the column owning each
/// lowest set bit.
fn rank_gf2(k: &SimplicialComplex, j: usize) -> usize {
    let rows = face_index(k.faces(j - 1));
    let words = rows.len().div_ceil(64);
    let mut owner: Vec<Option<Vec<u64>>> = vec![None; rows.len()];
    let mut rank = 0;
    let mut col = vec![0u64; words];
    for face in k.faces(j) {
        col.iter_mut().for_each(|w| *w = 0);
        for skip in 0..face.len() {
            let b: Simplex = face.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            let r = rows[b.as_slice()];
            col[r / 64] ^= 1 << (r % 64);
        }
        loop {
            let Some(low) = highest_bit(&col) else { break };
            match &owner[low] {
                Some(other) => col.iter_mut().zip(other).for_each(|(a, b)| *a ^= b),
                None => {
                    owner[low] = Some(col.clone());
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn highest_bit(col: &[u64]) -> Option<usize> {
    col.iter().enumerate().rev().find(|(_, &w)| w != 0).map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
}

/// Rank of `∂_j` over GF(p), `p` an odd prime, with sparse columns.
fn rank_mod_p(k: &SimplicialComplex, j: usize, p: u64) -> usize {
    let rows = face_index(k.faces(j - 1));
    let mut owner: Vec<Option<Vec<(usize, u64)>>> = vec![None; rows.len()];
    let inv = |a: u64| pow_mod(a, p - 2, p);
    let mut rank = 0;
    for face in k.faces(j) {
        let mut col: Vec<(usize, u64)> = (0..face.len())
            .map(|skip| {
                let b: Simplex = face.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                (rows[b.as_slice()], if skip % 2 == 0 { 1 } else { p - 1 })
            })
            .collect();
        col.sort_unstable();
        while let Some(&(low, c)) = col.last() {
            match &owner[low] {
                Some(other) => {
                    // other is normalised to 1 at `low`
                    col = axpy(&col, other, (p - c) % p, p);
                }
                None => {
                    let s = inv(c);
                    owner[low] = Some(col.iter().map(|&(r, v)| (r, v * s % p)).collect());
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

/// `a + f·b` over GF(p), both sorted by row.
fn axpy(a: &[(usize, u64)], b: &[(usize, u64)], f: u64, p: u64) -> Vec<(usize, u64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (r, v) = match (a.get(i), b.get(j)) {
            (Some(&(ra, va)), Some(&(rb, vb))) if ra == rb => {
                i += 1;
                j += 1;
                (ra, (va + f * vb) % p)
            }
            (Some(&(ra, va)), Some(&(rb, _))) if ra < rb => {
                i += 1;
                (ra, va)
            }
            (Some(&(ra, va)), None) => {
                i += 1;
                (ra, va)
            }
            (_, Some(&(rb, vb))) => {
                j += 1;
                (rb, f * vb % p)
            }
            (None, None) => unreachable!(),
        };
        if v != 0 {
            out.push((r, v));
        }
    }
    out
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

/// Unreduced Betti numbers `β_j = s_j − rank ∂_j − rank ∂_{j+1}`.
pub fn betti_vector(k: &SimplicialComplex, field_char: u32) -> Result<BettiVector> {
    if !is_prime(field_char) {
        return Err(Error::InvalidField(field_char));
    }
    let Some(dim) = k.dimension() else {
        return Ok(BettiVector { betti: Vec::new(), field_char });
    };
    let ranks: Vec<usize> = (1..=dim)
        .into_par_iter()
        .map(|j| if field_char == 2 { rank_gf2(k, j) } else { rank_mod_p(k, j, field_char as u64) })
        .collect();
    let rank = |j: usize| if j == 0 || j > dim { 0 } else { ranks[j - 1] };
    let betti = (0..=dim).map(|j| (k.faces(j).len() - rank(j) - rank(j + 1)) as u64).collect();
    Ok(BettiVector { betti, field_char })
}

/// Slacks `(β_j − (s_j − s_{j−1} − s_{j+1}), s_j − β_j)` of the Morse
/// inequalities at dimension `j`, given the Betti numbers.
pub fn morse_slacks(k: &SimplicialComplex, betti: &BettiVector, j: usize) -> (i64, i64) {
    let s = k.simplex_counts();
    let s_at = |i: Option<usize>| i.map_or(0, |i| s.get(i) as i64);
    let b = betti.get(j) as i64;
    let lower = b - (s_at(Some(j)) - s_at(j.checked_sub(1)) - s_at(Some(j + 1)));
    (lower, s_at(Some(j)) - b)
}

pub fn morse_gap(k: &SimplicialComplex, j: usize) -> (i64, i64) {
    let betti = betti_vector(k, 2).expect("2 is prime");
    morse_slacks(k, &betti, j)
}

/// Number of `j`-faces lying in no `(j+1)`-face.
pub fn free_count(k: &SimplicialComplex, j: usize) -> u64 {
    let covered: HashSet<Simplex> = k.faces(j + 1).iter().flat_map(|f| crate::complex::boundary_faces(f)).collect();
    k.faces(j).iter().filter(|f| !covered.contains(*f)).count() as u64
}
