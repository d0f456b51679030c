//! The vertex-weight program bounding the extremal parameter
//! `N(m_0, …, m_k; G)`, its dual, the block blow-up that realises the lower
//! bound, and an exhaustive oracle for `N` on tiny instances.

use std::collections::BTreeSet;

use num::rational::BigRational;
use num::{BigInt, One, Signed};
use rayon::prelude::*;
use serde_json::json;

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::lp::{self, Outcome};
use crate::numeric::{binomial, parse_rational, rational_to_f64, LogValue};

/// An upper bound `m_i ≥ 1` on the number of `i`-faces.
#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    Integer(u64),
    /// `base^exponent`, kept symbolic.
    Power { base: u64, exponent: BigRational },
    Real(f64),
}

impl Bound {
    /// Parses a CLI bound. With `base`, the text is the exponent `β` of
    /// `m = base^β`; otherwise integers stay exact and anything else is real.
    pub fn parse(text: &str, base: Option<u64>) -> Result<Self> {
        let text = text.trim();
        if let Some(base) = base {
            return Ok(Bound::Power { base, exponent: parse_rational(text)? });
        }
        if let Ok(m) = text.parse::<u64>() {
            return Ok(Bound::Integer(m));
        }
        text.parse::<f64>().map(Bound::Real).map_err(|_| Error::InvalidNumber(text.into()))
    }

    pub fn ln(&self) -> f64 {
        match self {
            Bound::Integer(m) => (*m as f64).ln(),
            Bound::Power { base, exponent } => rational_to_f64(exponent) * (*base as f64).ln(),
            Bound::Real(x) => x.ln(),
        }
    }

    pub fn value(&self) -> f64 {
        self.ln().exp()
    }

    pub fn ln_exact(&self) -> Option<LogValue> {
        match self {
            Bound::Integer(m) => Some(LogValue::ln_u64(*m)),
            Bound::Power { base, exponent } => Some(LogValue::ln_power(*base, exponent)),
            Bound::Real(_) => None,
        }
    }

    /// `m ≥ s`.
    pub fn admits(&self, s: u128) -> bool {
        if s == 0 {
            return true;
        }
        match self {
            Bound::Integer(m) => *m as u128 >= s,
            Bound::Power { .. } => match u64::try_from(s) {
                Ok(s) => self.ln_exact().expect("exact") >= LogValue::ln_u64(s),
                Err(_) => self.ln() >= (s as f64).ln(),
            },
            Bound::Real(x) => *x >= s as f64,
        }
    }

    fn valid(&self) -> bool {
        match self {
            Bound::Integer(m) => *m >= 1,
            Bound::Power { base, exponent } => *base >= 1 && !exponent.is_negative(),
            Bound::Real(x) => x.is_finite() && *x >= 1.0,
        }
    }
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bound::Integer(m) => write!(f, "{m}"),
            Bound::Power { base, exponent } => write!(f, "{base}^({exponent})"),
            Bound::Real(x) => write!(f, "{x}"),
        }
    }
}

/// A pattern `G` with face budgets `(m_0, …, m_k)`, `k = dim G`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalQuery {
    pub pattern: SimplicialComplex,
    pub bounds: Vec<Bound>,
}

impl ExtremalQuery {
    pub fn new(pattern: SimplicialComplex, bounds: Vec<Bound>) -> Result<Self> {
        let dim = pattern.dimension().ok_or_else(|| Error::InvalidQuery("empty pattern".into()))?;
        if bounds.len() != dim + 1 {
            return Err(Error::InvalidQuery(format!(
                "{} bounds given for a pattern of dimension {dim}",
                bounds.len()
            )));
        }
        if let Some(b) = bounds.iter().find(|b| !b.valid()) {
            return Err(Error::InvalidQuery(format!("bound {b} is below 1")));
        }
        Ok(Self { pattern, bounds })
    }

    pub fn integers(pattern: SimplicialComplex, bounds: &[u64]) -> Result<Self> {
        Self::new(pattern, bounds.iter().map(|&m| Bound::Integer(m)).collect())
    }

    pub fn is_exact(&self) -> bool {
        self.bounds.iter().all(|b| !matches!(b, Bound::Real(_)))
    }

    /// Whether `s_i(G) ≤ m_i` for every `i`.
    pub fn counts_admissible(&self) -> bool {
        let s = self.pattern.simplex_counts();
        self.bounds.iter().enumerate().all(|(i, b)| b.admits(s.get(i) as u128))
    }

    fn rows(&self) -> (Vec<Simplex>, Vec<usize>) {
        let mut faces = Vec::new();
        let mut dims = Vec::new();
        for (d, level) in self.pattern.levels() {
            for f in level {
                faces.push(f.clone());
                dims.push(d);
            }
        }
        (faces, dims)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpMode {
    Exact,
    Float,
}

/// Exact optimum: values in [`LogValue`], dual weights rational.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactCertificate {
    pub gamma: LogValue,
    pub primal: Vec<LogValue>,
    pub dual_vertices: Vec<BigRational>,
    pub dual_faces: Vec<(Simplex, BigRational)>,
    pub dual_value: LogValue,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub mode: LpMode,
    pub gamma: f64,
    pub primal: Vec<f64>,
    /// `y_v` for each vertex.
    pub dual_vertices: Vec<f64>,
    /// `z_σ` for each face of positive dimension.
    pub dual_faces: Vec<(Simplex, f64)>,
    pub dual_value: f64,
    pub pivots: usize,
    pub exact: Option<ExactCertificate>,
}

pub const FLOAT_GAP_TOLERANCE: f64 = 1e-9;

impl LpSolution {
    pub fn duality_gap(&self) -> f64 {
        (self.gamma - self.dual_value).abs()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "mode": self.mode,
            "gamma": self.gamma,
            "primal": self.primal,
            "dual_vertices": self.dual_vertices,
            "dual_faces": self.dual_faces.iter().map(|(f, z)| json!({"face": f, "z": z})).collect::<Vec<_>>(),
            "dual_value": self.dual_value,
            "pivots": self.pivots,
        });
        if let Some(e) = &self.exact {
            v["exact"] = json!({
                "gamma": e.gamma.to_string(),
                "primal": e.primal.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "dual_vertices": e.dual_vertices.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "dual_faces": e.dual_faces.iter().map(|(f, z)| json!({"face": f, "z": z.to_string()})).collect::<Vec<_>>(),
                "strong_duality": e.gamma == e.dual_value,
            });
        }
        v
    }
}

fn split_dual<T: Clone>(y: &[T], faces: &[Simplex], dims: &[usize]) -> (Vec<T>, Vec<(Simplex, T)>) {
    let mut verts = Vec::new();
    let mut rest = Vec::new();
    for ((f, &d), y) in faces.iter().zip(dims).zip(y) {
        if d == 0 {
            verts.push(y.clone());
        } else {
            rest.push((f.clone(), y.clone()));
        }
    }
    (verts, rest)
}

/// `γ(m_0, …, m_k; G)` with its dual certificate. Exact whenever every bound
/// is an integer or a symbolic power.
pub fn solve_gamma(query: &ExtremalQuery) -> Result<LpSolution> {
    if query.is_exact() {
        solve_exact(query)
    } else {
        solve_float(query)
    }
}

/// Double-precision solve regardless of the bound kinds.
pub fn solve_float(query: &ExtremalQuery) -> Result<LpSolution> {
    let (faces, dims) = query.rows();
    let b: Vec<f64> = dims.iter().map(|&d| query.bounds[d].ln()).collect();
    let out: Outcome<f64, f64> = lp::solve_packing(query.pattern.vertex_count(), &faces, &b)?;
    let dual_value: f64 = out.y.iter().zip(&b).map(|(y, b)| y * b).sum();
    if (out.objective - dual_value).abs() > FLOAT_GAP_TOLERANCE * (1.0 + out.objective.abs()) {
        return Err(Error::NonconvergentFloat(out.pivots));
    }
    let (dual_vertices, dual_faces) = split_dual(&out.y, &faces, &dims);
    Ok(LpSolution {
        mode: LpMode::Float,
        gamma: out.objective,
        primal: out.x.iter().map(|x| x.max(0.0)).collect(),
        dual_vertices: dual_vertices.into_iter().map(|y| y.max(0.0)).collect(),
        dual_faces: dual_faces.into_iter().map(|(f, z)| (f, z.max(0.0))).collect(),
        dual_value,
        pivots: out.pivots,
        exact: None,
    })
}

fn solve_exact(query: &ExtremalQuery) -> Result<LpSolution> {
    let (faces, dims) = query.rows();
    let ln_bounds: Vec<LogValue> = query.bounds.iter().map(|b| b.ln_exact().expect("exact bound")).collect();
    let b: Vec<LogValue> = dims.iter().map(|&d| ln_bounds[d].clone()).collect();
    let out: Outcome<BigRational, LogValue> = lp::solve_packing(query.pattern.vertex_count(), &faces, &b)?;
    let dual_value = out.y.iter().zip(&b).fold(LogValue::zero(), |acc, (y, b)| acc + b.scaled(y));
    let (dual_vertices, dual_faces) = split_dual(&out.y, &faces, &dims);
    let cert = ExactCertificate {
        gamma: out.objective.clone(),
        primal: out.x.clone(),
        dual_vertices,
        dual_faces,
        dual_value,
    };
    Ok(LpSolution {
        mode: LpMode::Exact,
        gamma: cert.gamma.to_f64(),
        primal: cert.primal.iter().map(LogValue::to_f64).collect(),
        dual_vertices: cert.dual_vertices.iter().map(rational_to_f64).collect(),
        dual_faces: cert.dual_faces.iter().map(|(f, z)| (f.clone(), rational_to_f64(z))).collect(),
        dual_value: cert.dual_value.to_f64(),
        pivots: out.pivots,
        exact: Some(cert),
    })
}

const C_DENOMINATOR_BITS: u32 = 30;

/// Largest multiple of `2^-30` not exceeding `x`, for `x > 0`.
fn dyadic_below(x: f64) -> BigRational {
    let scale = (1u64 << C_DENOMINATOR_BITS) as f64;
    let num = (x * scale).floor().max(1.0) as i64;
    BigRational::new(BigInt::from(num), BigInt::from(1u64 << C_DENOMINATOR_BITS))
}

/// The block constant `c` of the blow-up: the minimum over dimensions `j` of
/// `1/(s_0(1+s_0))` (`j = 0`, `s_0 < m_0`), the largest `c` with
/// `(1+c)^{j+1} ≤ 1 + 1/(s_j(1+s_j))` (`j ≥ 1`, `s_j < m_j`), and `1/s_j`
/// (`s_j = m_j`). Irrational roots are replaced by a dyadic rational below them.
pub fn witness_constant(query: &ExtremalQuery) -> BigRational {
    let s = query.pattern.simplex_counts();
    let mut c: Option<BigRational> = None;
    for (j, bound) in query.bounds.iter().enumerate() {
        let sj = s.get(j);
        let strict = bound.admits(sj as u128 + 1) || matches!(bound, Bound::Real(x) if *x > sj as f64);
        let cj = if !strict {
            BigRational::new(BigInt::one(), BigInt::from(sj))
        } else if j == 0 {
            BigRational::new(BigInt::one(), BigInt::from(sj * (1 + sj)))
        } else {
            let target = BigRational::one() + BigRational::new(BigInt::one(), BigInt::from(sj * (1 + sj)));
            let approx = (1.0 + 1.0 / (sj as f64 * (1.0 + sj as f64))).powf(1.0 / (j as f64 + 1.0)) - 1.0;
            let step = BigRational::new(BigInt::one(), BigInt::from(1u64 << C_DENOMINATOR_BITS));
            let mut cj = dyadic_below(approx);
            while num::pow(BigRational::one() + &cj, j + 1) > target && cj > step {
                cj -= &step;
            }
            cj
        };
        c = Some(match c {
            Some(c) if c <= cj => c,
            _ => cj,
        });
    }
    c.expect("pattern has a vertex")
}

/// Proof-explicit bounds `c^{s_0}/#Aut · e^γ ≤ N ≤ s_0^{s_0} e^γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sandwich {
    /// False when some `s_i(G) > m_i`, in which case `N = 0` and all bounds are zero.
    pub admissible: bool,
    pub constant: BigRational,
    pub aut: u64,
    pub lower: f64,
    /// Ordered-copy bound `s_0^{s_0} e^γ`.
    pub upper: f64,
    /// `s_0^{s_0} e^γ / #Aut`, bounding unordered copies.
    pub upper_unordered: f64,
    pub ln_lower: f64,
    pub ln_upper: f64,
    pub ln_lower_exact: Option<LogValue>,
    pub ln_upper_exact: Option<LogValue>,
}

impl Sandwich {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "admissible": self.admissible,
            "c": self.constant.to_string(),
            "aut": self.aut,
            "lower": self.lower,
            "upper": self.upper,
            "upper_unordered": self.upper_unordered,
            "ln_lower": finite_or_null(self.ln_lower),
            "ln_upper": finite_or_null(self.ln_upper),
        })
    }
}

pub(crate) fn finite_or_null(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn n_hat_bounds(query: &ExtremalQuery, solution: &LpSolution) -> Sandwich {
    let g = &query.pattern;
    let s0 = g.vertex_count() as u64;
    let aut = g.automorphism_count();
    let constant = witness_constant(query);
    if !query.counts_admissible() {
        return Sandwich {
            admissible: false,
            constant,
            aut,
            lower: 0.0,
            upper: 0.0,
            upper_unordered: 0.0,
            ln_lower: f64::NEG_INFINITY,
            ln_upper: f64::NEG_INFINITY,
            ln_lower_exact: None,
            ln_upper_exact: None,
        };
    }
    let s0r = BigRational::from_integer(BigInt::from(s0));
    let ln_c = LogValue::ln_rational(&constant).expect("positive dyadic constant");
    let exact = solution.exact.as_ref().map(|e| {
        let lower = ln_c.scaled(&s0r) - LogValue::ln_u64(aut) + e.gamma.clone();
        let upper = LogValue::ln_u64(s0).scaled(&s0r) + e.gamma.clone();
        (lower, upper)
    });
    let ln_lower = s0 as f64 * rational_to_f64(&constant).ln() - (aut as f64).ln() + solution.gamma;
    let ln_upper = s0 as f64 * (s0 as f64).ln() + solution.gamma;
    Sandwich {
        admissible: true,
        constant,
        aut,
        lower: ln_lower.exp(),
        upper: ln_upper.exp(),
        upper_unordered: ln_upper.exp() / aut as f64,
        ln_lower,
        ln_upper,
        ln_lower_exact: exact.as_ref().map(|e| e.0.clone()),
        ln_upper_exact: exact.map(|e| e.1),
    }
}

/// The blow-up complex and its block sizes `n_v = ⌈c e^{x_v}⌉`.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub complex: SimplicialComplex,
    pub block_sizes: Vec<u64>,
}

const WITNESS_FACE_LIMIT: u128 = 5_000_000;

/// Smallest integer `t ≥ 1` with `ln t ≥ value`.
fn ceil_exp_exact(value: &LogValue) -> u64 {
    if value.signum().is_le() {
        return 1;
    }
    let mut t = value.to_f64().exp().ceil().max(1.0) as u64;
    while t > 1 && LogValue::ln_u64(t - 1) >= *value {
        t -= 1;
    }
    while LogValue::ln_u64(t) < *value {
        t += 1;
    }
    t
}

/// Block sizes from an exact primal point.
pub fn block_sizes_exact(primal: &[LogValue], c: &BigRational) -> Result<Vec<u64>> {
    if !c.is_positive() {
        return Err(Error::InvalidQuery(format!("block constant {c} must be positive")));
    }
    let ln_c = LogValue::ln_rational(c)?;
    Ok(primal.iter().map(|x| ceil_exp_exact(&(&ln_c + x))).collect())
}

pub fn block_sizes_float(primal: &[f64], c: f64) -> Result<Vec<u64>> {
    if c.is_nan() || c <= 0.0 {
        return Err(Error::InvalidQuery(format!("block constant {c} must be positive")));
    }
    Ok(primal.iter().map(|x| (c * x.exp() * (1.0 - 1e-12)).ceil().max(1.0) as u64).collect())
}

/// Builds the blow-up for the solution's primal point. The constant `c` is
/// admissible when the result respects every face budget; otherwise the first
/// violated dimension is reported.
pub fn blowup_witness(query: &ExtremalQuery, solution: &LpSolution, c: &BigRational) -> Result<Witness> {
    let sizes = match &solution.exact {
        Some(e) => block_sizes_exact(&e.primal, c)?,
        None => block_sizes_float(&solution.primal, rational_to_f64(c))?,
    };
    witness_from_blocks(query, &sizes)
}

pub fn witness_from_blocks(query: &ExtremalQuery, sizes: &[u64]) -> Result<Witness> {
    let g = &query.pattern;
    assert_eq!(sizes.len(), g.vertex_count(), "one block per pattern vertex");
    let mut total = 0u128;
    for (j, level) in g.levels() {
        let sj: u128 = level.iter().map(|f| f.iter().map(|&v| sizes[v] as u128).product::<u128>()).sum();
        if !query.bounds[j].admits(sj) {
            return Err(Error::WitnessBoundViolated { dimension: j });
        }
        total += sj;
    }
    if total > WITNESS_FACE_LIMIT {
        return Err(Error::OracleTooLarge(format!("witness would have {total} faces")));
    }
    let mut offset = vec![0usize; sizes.len() + 1];
    for (v, &n) in sizes.iter().enumerate() {
        offset[v + 1] = offset[v] + n as usize;
    }
    let mut upper: Vec<Vec<Simplex>> = Vec::new();
    for (j, level) in g.levels().skip(1) {
        let mut faces = Vec::new();
        for f in level {
            let mut tuple: Simplex = f.iter().map(|&v| offset[v]).collect();
            loop {
                faces.push(tuple.clone());
                // odometer over the product of blocks
                let mut pos = f.len();
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    let v = f[pos];
                    if tuple[pos] + 1 < offset[v + 1] {
                        tuple[pos] += 1;
                        break;
                    }
                    tuple[pos] = offset[v];
                    if pos == 0 {
                        pos = usize::MAX;
                        break;
                    }
                }
                if pos == usize::MAX {
                    break;
                }
            }
        }
        faces.sort();
        debug_assert_eq!(upper.len() + 1, j);
        upper.push(faces);
    }
    let complex = SimplicialComplex::from_upper_levels(offset[sizes.len()], upper);
    Ok(Witness { complex, block_sizes: sizes.to_vec() })
}

pub const ORACLE_MAX_VERTICES: u64 = 6;
const ORACLE_MAX_COMPLEXES: u128 = 5_000_000;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn rec(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(k + 1, p, out);
            p.swap(k, i);
        }
    }
    rec(0, &mut p, &mut out);
    out
}

/// Edge sets of size `e` on `v` vertices, one per isomorphism class.
fn graph_classes(v: usize, e: usize) -> Vec<Vec<[usize; 2]>> {
    let pairs: Vec<[usize; 2]> = (0..v).flat_map(|a| (a + 1..v).map(move |b| [a, b])).collect();
    let index = |a: usize, b: usize| pairs.iter().position(|p| *p == [a.min(b), a.max(b)]).expect("pair");
    let maps: Vec<Vec<usize>> = permutations(v)
        .iter()
        .map(|perm| pairs.iter().map(|&[a, b]| index(perm[a], perm[b])).collect())
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let total = pairs.len();
    // iterate masks with exactly e bits set
    let mut combo: Vec<usize> = (0..e).collect();
    loop {
        let mask: u32 = combo.iter().map(|&i| 1u32 << i).sum();
        let canon = maps
            .iter()
            .map(|m| combo.iter().map(|&i| 1u32 << m[i]).sum::<u32>())
            .min()
            .unwrap_or(mask);
        if seen.insert(canon) {
            out.push(combo.iter().map(|&i| pairs[i]).collect());
        }
        if !next_combination(&mut combo, total) {
            break;
        }
    }
    out
}

/// Advances `combo` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    for i in (0..k).rev() {
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exact `N(m_0, …, m_k; G)` by exhaustive search, for `m_0 ≤ 6` and
/// `dim G ≤ 2`. Copy counts only grow with faces, so the maximum is attained
/// on exactly `m_0` vertices with as many edges and triangles as allowed;
/// graphs are taken up to isomorphism.
pub fn brute_force_n(pattern: &SimplicialComplex, bounds: &[u64]) -> Result<u64> {
    let query = ExtremalQuery::integers(pattern.clone(), bounds)?;
    let dim = pattern.dimension().expect("validated");
    let m0 = bounds[0];
    if m0 > ORACLE_MAX_VERTICES || dim > 2 {
        return Err(Error::OracleTooLarge(format!("m0 = {m0}, dim = {dim}; limits are m0 ≤ 6 and dim ≤ 2")));
    }
    if !query.counts_admissible() {
        return Ok(0);
    }
    let v = m0 as usize;
    let pairs = binomial(m0, 2) as u64;
    let e = if dim >= 1 { bounds[1].min(pairs) as usize } else { 0 };
    let graphs = graph_classes(v, e);
    let aut = pattern.automorphism_count();
    let count = |f: &SimplicialComplex| crate::embed::count_embeddings(pattern, f) / aut;

    if dim < 2 {
        return Ok(graphs
            .par_iter()
            .map(|edges| count(&SimplicialComplex::from_facets(v, edges).expect("valid graph")))
            .max()
            .unwrap_or(0));
    }
    let m2 = bounds[2];
    let jobs: Vec<(Vec<[usize; 2]>, Vec<Simplex>)> = graphs
        .into_iter()
        .map(|edges| {
            let graph = SimplicialComplex::from_facets(v, &edges).expect("valid graph");
            let triangles: Vec<Simplex> = (0..v)
                .flat_map(|a| (a + 1..v).flat_map(move |b| (b + 1..v).map(move |c| vec![a, b, c])))
                .filter(|t| graph.contains(&t[..2]) && graph.contains(&[t[0], t[2]]) && graph.contains(&t[1..]))
                .collect();
            (edges, triangles)
        })
        .collect();
    let work: u128 =
        jobs.iter().map(|(_, t)| binomial(t.len() as u64, m2.min(t.len() as u64))).sum();
    if work > ORACLE_MAX_COMPLEXES {
        return Err(Error::OracleTooLarge(format!("{work} candidate complexes")));
    }
    Ok(jobs
        .par_iter()
        .map(|(edges, triangles)| {
            let t = (m2 as usize).min(triangles.len());
            let mut combo: Vec<usize> = (0..t).collect();
            let mut best = 0;
            loop {
                let mut facets: Vec<Simplex> = edges.iter().map(|e| e.to_vec()).collect();
                facets.extend(combo.iter().map(|&i| triangles[i].clone()));
                let f = SimplicialComplex::from_facets(v, &facets).expect("valid complex");
                best = best.max(count(&f));
                if !next_combination(&mut combo, triangles.len()) {
                    break;
                }
            }
            best
        })
        .max()
        .unwrap_or(0))
}

/// `γ_2 − γ_1 − ln(m_2/m_1)/(k+1)` where `γ_j` is the optimum for `H` under
/// budgets `(m_0, m_j s_1(G), …, m_j s_k(G))`.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaGap {
    pub gap: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub exact: Option<LogValue>,
}

fn lemma_checks(g: &SimplicialComplex, h: &SimplicialComplex) -> Result<usize> {
    let k = g.dimension().ok_or_else(|| Error::InvalidSubcomplex("empty pattern".into()))?;
    if h.dimension() != Some(k) {
        return Err(Error::InvalidSubcomplex(format!("H must have dimension {k} with at least one top face")));
    }
    if crate::embed::count_embeddings(h, g) == 0 {
        return Err(Error::InvalidSubcomplex("H does not embed in G".into()));
    }
    Ok(k)
}

pub fn compare_lemma_gap(g: &SimplicialComplex, h: &SimplicialComplex, m0: u64, m1: u64, m2: u64) -> Result<LemmaGap> {
    let k = lemma_checks(g, h)?;
    let s = g.simplex_counts();
    if m1 < 1 || m1 > m2 {
        return Err(Error::InvalidRange(format!("need 0 < m1 ≤ m2, got m1 = {m1}, m2 = {m2}")));
    }
    let cap = BigInt::from(m0).pow(k as u32 + 1);
    if BigInt::from(m2) * BigInt::from(s.get(k)) > cap {
        return Err(Error::InvalidRange(format!("m2 = {m2} exceeds m0^(k+1)/s_k(G)")));
    }
    let bounds = |m: u64| -> Result<Vec<Bound>> {
        let mut b = vec![Bound::Integer(m0)];
        for i in 1..=k {
            let v = (m as u128) * s.get(i) as u128;
            let v = u64::try_from(v).map_err(|_| Error::InvalidRange("budget overflows u64".into()))?;
            b.push(Bound::Integer(v));
        }
        Ok(b)
    };
    let sol1 = solve_gamma(&ExtremalQuery::new(h.clone(), bounds(m1)?)?)?;
    let sol2 = solve_gamma(&ExtremalQuery::new(h.clone(), bounds(m2)?)?)?;
    let shift = (LogValue::ln_u64(m2) - LogValue::ln_u64(m1)).scaled(&BigRational::new(BigInt::one(), BigInt::from(k + 1)));
    let exact = sol2.exact.as_ref().expect("exact").gamma.clone() - sol1.exact.as_ref().expect("exact").gamma.clone() - shift;
    Ok(LemmaGap { gap: exact.to_f64(), gamma1: sol1.gamma, gamma2: sol2.gamma, exact: Some(exact) })
}

pub fn compare_lemma_gap_real(g: &SimplicialComplex, h: &SimplicialComplex, m0: f64, m1: f64, m2: f64) -> Result<LemmaGap> {
    let k = lemma_checks(g, h)?;
    let s = g.simplex_counts();
    if !(m1 > 0.0 && m1 <= m2) {
        return Err(Error::InvalidRange(format!("need 0 < m1 ≤ m2, got m1 = {m1}, m2 = {m2}")));
    }
    if m2 * s.get(k) as f64 > m0.powi(k as i32 + 1) {
        return Err(Error::InvalidRange(format!("m2 = {m2} exceeds m0^(k+1)/s_k(G)")));
    }
    let bounds = |m: f64| -> Vec<Bound> {
        std::iter::once(Bound::Real(m0)).chain((1..=k).map(|i| Bound::Real(m * s.get(i) as f64))).collect()
    };
    let sol1 = solve_float(&ExtremalQuery::new(h.clone(), bounds(m1))?)?;
    let sol2 = solve_float(&ExtremalQuery::new(h.clone(), bounds(m2))?)?;
    let gap = sol2.gamma - sol1.gamma - (m2 / m1).ln() / (k as f64 + 1.0);
    Ok(LemmaGap { gap, gamma1: sol1.gamma, gamma2: sol2.gamma, exact: None })
}

/// Exact `γ` as a multiple of `ln base`, when it is one.
pub fn gamma_in_base(solution: &LpSolution, base: u64) -> Option<BigRational> {
    solution.exact.as_ref()?.gamma.as_multiple_of(base)
}
