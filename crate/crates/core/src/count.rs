//! Copy counts of a pattern in a host, their expectations under the random
//! model, and the subcomplexes of a pattern up to isomorphism.

use std::collections::{BTreeMap, HashMap};

use num::rational::BigRational;
use num::{BigInt, One, Zero};

use crate::complex::{Simplex, SimplexCounts, SimplicialComplex};
use crate::embed;
use crate::error::{Error, Result};
use crate::model::{ExactLn, ModelParams};
use crate::numeric::{binomial, ln_falling_factorial, LogValue, NeumaierSum};

/// A pattern with its automorphism count and face counts cached.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternStats {
    pub pattern: SimplicialComplex,
    pub aut: u64,
    pub s: SimplexCounts,
}

impl PatternStats {
    pub fn new(pattern: SimplicialComplex) -> Self {
        let aut = pattern.automorphism_count();
        let s = pattern.simplex_counts();
        Self { pattern, aut, s }
    }
}

pub fn count_ordered(host: &SimplicialComplex, pattern: &SimplicialComplex) -> u64 {
    embed::count_embeddings(pattern, host)
}

pub fn count_unordered(host: &SimplicialComplex, pattern: &SimplicialComplex) -> u64 {
    count_ordered(host, pattern) / pattern.automorphism_count()
}

/// `Σ_i s_i ln p_i`, or `-∞` when some `p_i = 0` with `s_i > 0`.
fn ln_prob_weight(params: &ModelParams, s: &SimplexCounts) -> f64 {
    let mut acc = NeumaierSum::default();
    for i in 1..s.len() {
        if s.get(i) == 0 {
            continue;
        }
        let lp = params.ln_prob(i);
        if lp == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        acc.add(s.get(i) as f64 * lp);
    }
    acc.value()
}

/// `ln μ_o = ln (n)_{s_0} + Σ s_i ln p_i`.
pub fn ln_expected_ordered(params: &ModelParams, pattern: &SimplicialComplex) -> f64 {
    let s = pattern.simplex_counts();
    match ln_falling_factorial(params.n() as u64, pattern.vertex_count() as u64) {
        Some(lf) => lf + ln_prob_weight(params, &s),
        None => f64::NEG_INFINITY,
    }
}

/// `μ_o(G) = (n)_{s_0(G)} Π p_i^{s_i(G)}`.
pub fn expected_ordered(params: &ModelParams, pattern: &SimplicialComplex) -> f64 {
    ln_expected_ordered(params, pattern).exp()
}

pub fn expected_unordered(params: &ModelParams, pattern: &SimplicialComplex) -> f64 {
    expected_ordered(params, pattern) / pattern.automorphism_count() as f64
}

/// Exact `μ_o(G)` when the model was built from rational probabilities.
pub fn expected_ordered_exact(params: &ModelParams, pattern: &SimplicialComplex) -> Option<BigRational> {
    let probs = params.exact_probs()?;
    let n = params.n() as u64;
    let s0 = pattern.vertex_count() as u64;
    if s0 > n {
        return Some(BigRational::zero());
    }
    let mut acc = BigRational::one();
    for j in 0..s0 {
        acc *= BigRational::from_integer(BigInt::from(n - j));
    }
    let s = pattern.simplex_counts();
    for i in 1..s.len() {
        let p = probs.get(i - 1).cloned().unwrap_or_else(BigRational::zero);
        acc *= num::pow(p, s.get(i) as usize);
    }
    Some(acc)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Psi {
    pub value: f64,
    pub ln_value: f64,
}

/// `Ψ_{G,n} = n^{s_0(G)} Π p_i^{s_i(G)}`.
pub fn psi(params: &ModelParams, pattern: &SimplicialComplex) -> Psi {
    let s = pattern.simplex_counts();
    let ln_value = pattern.vertex_count() as f64 * (params.n() as f64).ln() + ln_prob_weight(params, &s);
    Psi { value: ln_value.exp(), ln_value }
}

/// Exact `ln Ψ_{G,n}` when the parameters are exact.
pub fn ln_psi_exact(params: &ModelParams, pattern: &SimplicialComplex) -> Option<ExactLn> {
    let s = pattern.simplex_counts();
    let mut acc = LogValue::ln_u64(params.n() as u64).scaled(&BigRational::from_integer(pattern.vertex_count().into()));
    for i in 1..s.len() {
        if s.get(i) == 0 {
            continue;
        }
        match params.ln_prob_exact(i)? {
            ExactLn::NegInfinity => return Some(ExactLn::NegInfinity),
            ExactLn::Value(v) => acc = acc + v.scaled(&BigRational::from_integer(s.get(i).into())),
        }
    }
    Some(ExactLn::Value(acc))
}

/// Isomorphism class of subcomplexes of a pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct Subcomplex {
    /// Representative relabelled onto `0..s_0(H)`.
    pub complex: SimplicialComplex,
    /// Pattern labels of the representative's vertices, in relabelled order.
    pub vertices: Vec<usize>,
    /// Number of labelled subcomplexes of the pattern in this class.
    pub labeled_count: u64,
}

pub const MAX_PATTERN_VERTICES: usize = 10;
const LABELED_BUDGET: u64 = 2_000_000;

type ClassKey = (usize, Vec<u64>, Vec<Vec<u32>>);

fn class_key(k: &SimplicialComplex) -> ClassKey {
    let mut deg = k.vertex_degrees();
    deg.sort();
    (k.vertex_count(), k.simplex_counts().0, deg)
}

struct Enumerator<'a> {
    faces: &'a [Simplex],
    /// Indices (into `faces`) of the positive-dimensional boundary faces.
    boundary: Vec<Vec<usize>>,
    chosen: Vec<bool>,
    visited: u64,
}

impl Enumerator<'_> {
    fn run(&mut self, i: usize, emit: &mut dyn FnMut(&[bool]) -> Result<()>) -> Result<()> {
        if i == self.faces.len() {
            self.visited += 1;
            if self.visited > LABELED_BUDGET {
                return Err(Error::PatternTooLarge { vertices: 0, limit: MAX_PATTERN_VERTICES });
            }
            if self.chosen.iter().any(|&c| c) {
                emit(&self.chosen)?;
            }
            return Ok(());
        }
        self.run(i + 1, emit)?;
        if self.boundary[i].iter().all(|&b| self.chosen[b]) {
            self.chosen[i] = true;
            self.run(i + 1, emit)?;
            self.chosen[i] = false;
        }
        Ok(())
    }
}

/// Non-empty subcomplexes of `pattern` with at least one face of positive
/// dimension, up to isomorphism. Vertices not covered by a positive-dimensional
/// face are dropped unless `include_isolated` is set, in which case every
/// padding by isolated pattern vertices is a separate class.
pub fn enumerate_subcomplexes(pattern: &SimplicialComplex, include_isolated: bool) -> Result<Vec<Subcomplex>> {
    let n = pattern.vertex_count();
    let too_large = Error::PatternTooLarge { vertices: n, limit: MAX_PATTERN_VERTICES };
    if n > MAX_PATTERN_VERTICES {
        return Err(too_large);
    }
    let faces: Vec<Simplex> = pattern.levels().skip(1).flat_map(|(_, l)| l.iter().cloned()).collect();
    let index: BTreeMap<&[usize], usize> = faces.iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect();
    let boundary = faces
        .iter()
        .map(|f| {
            if f.len() <= 2 {
                return Vec::new();
            }
            crate::complex::boundary_faces(f).map(|b| index[b.as_slice()]).collect()
        })
        .collect();
    let mut en = Enumerator { faces: &faces, boundary, chosen: vec![false; faces.len()], visited: 0 };

    en.run(0, &mut |_: &[bool]| Ok(())).map_err(|_| too_large.clone())?;
    en.visited = 0;

    let mut classes: Vec<Subcomplex> = Vec::new();
    let mut buckets: HashMap<ClassKey, Vec<usize>> = HashMap::new();
    let mut emit = |chosen: &[bool]| -> Result<()> {
        let mut vertices: Vec<usize> = Vec::new();
        let picked: Vec<&Simplex> = faces.iter().zip(chosen).filter(|(_, &c)| c).map(|(f, _)| f).collect();
        for f in &picked {
            vertices.extend_from_slice(f);
        }
        vertices.sort_unstable();
        vertices.dedup();
        let mut relabel = vec![usize::MAX; n];
        for (new, &old) in vertices.iter().enumerate() {
            relabel[old] = new;
        }
        let mapped: Vec<Simplex> = picked.iter().map(|f| f.iter().map(|&v| relabel[v]).collect()).collect();
        let base = SimplicialComplex::from_faces(vertices.len(), &mapped).expect("enumerated family is closed");
        let spare = n - vertices.len();
        let paddings = if include_isolated { 0..=spare } else { 0..=0 };
        for t in paddings {
            let complex = if t == 0 {
                base.clone()
            } else {
                SimplicialComplex::from_faces(vertices.len() + t, &mapped).expect("closed")
            };
            let weight = binomial(spare as u64, t as u64) as u64;
            let key = class_key(&complex);
            let bucket = buckets.entry(key).or_default();
            match bucket.iter().find(|&&i| classes[i].complex.is_isomorphic(&complex)) {
                Some(&i) => classes[i].labeled_count += weight,
                None => {
                    let mut verts = vertices.clone();
                    verts.extend((0..n).filter(|v| relabel[*v] == usize::MAX).take(t));
                    bucket.push(classes.len());
                    classes.push(Subcomplex { complex, vertices: verts, labeled_count: weight });
                }
            }
        }
        Ok(())
    };
    en.run(0, &mut emit).map_err(|_| too_large)?;
    let mut out = classes;
    out.sort_by(|a, b| {
        (a.complex.face_count(), a.complex.simplex_counts().0, a.complex.facet_label())
            .cmp(&(b.complex.face_count(), b.complex.simplex_counts().0, b.complex.facet_label()))
    });
    Ok(out)
}
