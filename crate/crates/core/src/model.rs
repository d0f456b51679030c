//! The multi-parameter random complex `K(n; p_1, …, p_kmax)` and the
//! exponent diagnostics of the power-law regime `p_i = n^{-α_i}`.

use std::collections::HashSet;

use num::rational::BigRational;
use num::{BigInt, One, Zero};
use serde_json::json;

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::numeric::{binomial, factorial, rational_to_f64, Exponent, LogValue};

/// `ln p_i` in exact form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactLn {
    Value(LogValue),
    NegInfinity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    n: usize,
    /// `probs[i - 1] = p_i`.
    probs: Vec<f64>,
    alphas: Option<Vec<Exponent>>,
    exact_probs: Option<Vec<BigRational>>,
}

impl ModelParams {
    pub fn from_probs(n: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidParams("k_max must be at least 1".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidParams(format!("probability {p} outside [0, 1]")));
        }
        Ok(Self { n, probs, alphas: None, exact_probs: None })
    }

    /// Probabilities given as exact rationals; enables exact means.
    pub fn from_rational_probs(n: usize, probs: Vec<BigRational>) -> Result<Self> {
        let floats = probs.iter().map(rational_to_f64).collect();
        let mut params = Self::from_probs(n, floats)?;
        params.exact_probs = Some(probs);
        Ok(params)
    }

    /// `p_i = n^{-α_i}`, padding with `α_i = 0` up to `k_max`.
    pub fn from_alphas(n: usize, mut alphas: Vec<Exponent>, k_max: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::InvalidParams("k_max must be at least 1".into()));
        }
        if alphas.len() > k_max {
            return Err(Error::InvalidParams(format!("{} exponents given for k_max = {k_max}", alphas.len())));
        }
        alphas.resize(k_max, Exponent::zero());
        let probs = alphas
            .iter()
            .map(|a| match a {
                Exponent::Infinite => 0.0,
                Exponent::Finite(r) if r.is_zero() || n <= 1 => 1.0,
                Exponent::Finite(r) => (n as f64).powf(-rational_to_f64(r)),
            })
            .collect();
        Ok(Self { n, probs, alphas: Some(alphas), exact_probs: None })
    }

    /// The same model restricted to dimensions `≤ k`. Lower levels of a
    /// sample are unchanged because draws are keyed by face.
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.clamp(1, self.k_max());
        Self {
            n: self.n,
            probs: self.probs[..k].to_vec(),
            alphas: self.alphas.as_ref().map(|a| a[..k].to_vec()),
            exact_probs: self.exact_probs.as_ref().map(|p| p[..k].to_vec()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_max(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `p_i` for `i ≥ 1`; dimensions above `k_max` are never populated.
    pub fn prob(&self, i: usize) -> f64 {
        assert!(i >= 1, "p_i is indexed from 1");
        self.probs.get(i - 1).copied().unwrap_or(0.0)
    }

    pub fn alphas(&self) -> Option<&[Exponent]> {
        self.alphas.as_deref()
    }

    pub fn exact_probs(&self) -> Option<&[BigRational]> {
        self.exact_probs.as_deref()
    }

    pub fn ln_prob(&self, i: usize) -> f64 {
        match &self.alphas {
            Some(a) if i <= a.len() => match &a[i - 1] {
                Exponent::Infinite => f64::NEG_INFINITY,
                Exponent::Finite(r) => -rational_to_f64(r) * (self.n as f64).ln(),
            },
            _ => self.prob(i).ln(),
        }
    }

    /// Exact `ln p_i`, when the parameters were given as rational exponents
    /// or rational probabilities.
    pub fn ln_prob_exact(&self, i: usize) -> Option<ExactLn> {
        if i > self.k_max() {
            return Some(ExactLn::NegInfinity);
        }
        if let Some(a) = &self.alphas {
            return Some(match &a[i - 1] {
                Exponent::Infinite => ExactLn::NegInfinity,
                Exponent::Finite(_) if self.n <= 1 => ExactLn::Value(LogValue::zero()),
                Exponent::Finite(r) => ExactLn::Value(-LogValue::ln_power(self.n as u64, r)),
            });
        }
        let p = &self.exact_probs.as_ref()?[i - 1];
        if p.is_zero() {
            return Some(ExactLn::NegInfinity);
        }
        LogValue::ln_rational(p).ok().map(ExactLn::Value)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform `[0, 1)` draw keyed by `(seed, dimension, face)`, so inclusion
/// decisions do not depend on enumeration order.
pub fn face_uniform(seed: u64, dim: usize, face: &[usize]) -> f64 {
    let mut h = splitmix64(seed ^ splitmix64(dim as u64));
    for &v in face {
        h = splitmix64(h ^ (v as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93));
    }
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Injective derivation of per-trial seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 is a bijection and the affine map is injective in `index`
    splitmix64(seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Draws `K(n; p)`: all `n` vertices, then for `i = 1..=k_max` every
/// `(i+1)`-set whose whole boundary is present joins independently with
/// probability `p_i`.
pub fn sample(params: &ModelParams, seed: u64) -> SimplicialComplex {
    let n = params.n();
    let mut upper: Vec<Vec<Simplex>> = Vec::new();
    let mut prev: Vec<Simplex> = (0..n).map(|v| vec![v]).collect();
    let mut up_adj: Vec<Vec<usize>> = Vec::new();
    for dim in 1..=params.k_max() {
        let p = params.prob(dim);
        if p <= 0.0 || prev.is_empty() {
            break;
        }
        let prev_set: HashSet<&[usize]> = prev.iter().map(Vec::as_slice).collect();
        let mut level = Vec::new();
        let mut cand = Vec::with_capacity(dim + 1);
        let mut bface = Vec::with_capacity(dim);
        for sigma in &prev {
            let last = *sigma.last().expect("non-empty face");
            let extensions: Box<dyn Iterator<Item = usize>> = if dim == 1 {
                Box::new(last + 1..n)
            } else {
                Box::new(up_adj[sigma[0]].iter().copied().filter(move |&w| w > last))
            };
            for w in extensions {
                cand.clear();
                cand.extend_from_slice(sigma);
                cand.push(w);
                let closed = dim == 1
                    || (0..dim).all(|skip| {
                        bface.clear();
                        bface.extend(cand.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
                        prev_set.contains(bface.as_slice())
                    });
                if closed && face_uniform(seed, dim, &cand) < p {
                    level.push(cand.clone());
                }
            }
        }
        if dim == 1 {
            up_adj = vec![Vec::new(); n];
            for e in &level {
                up_adj[e[0]].push(e[1]);
            }
        }
        if level.is_empty() {
            break;
        }
        upper.push(level.clone());
        prev = level;
    }
    SimplicialComplex::from_upper_levels(n, upper)
}

/// `τ_j` or `-∞` when an infinite exponent enters it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tau {
    Finite(BigRational),
    NegInfinity,
}

impl Tau {
    pub fn to_f64(&self) -> f64 {
        match self {
            Tau::Finite(r) => rational_to_f64(r),
            Tau::NegInfinity => f64::NEG_INFINITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalProfile {
    /// Smallest `i ≥ 1` with `α_i > 0`.
    pub q: usize,
    /// `tau[j - 1] = τ_j` for `j = 1..=k_max`.
    pub tau: Vec<Tau>,
    /// Dimension satisfying both strict criticality inequalities.
    pub k_star: Option<usize>,
    /// A boundary equality in the criticality condition blocked `k_star`.
    pub degenerate: bool,
    /// The first dimension where the sum exceeds 1 lies above `k_max`.
    pub beyond_k_max: bool,
    /// `subcritical[k - 1]`: `Σ_{i≤k} C(k,i) α_i < 1` and `q ≤ k`.
    pub subcritical: Vec<bool>,
    /// `new_cond[k - 1]`: the extra simplex-count condition, vacuous when `q ≥ k`.
    pub new_cond: Vec<bool>,
    /// The extra Betti condition at `k_star`.
    pub new_cond2: Option<bool>,
}

fn int(v: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `Σ_{i ∈ range} coef(i) α_i`, `None` meaning `+∞`.
fn weighted_sum(alphas: &[Exponent], range: impl Iterator<Item = usize>, coef: impl Fn(usize) -> u128) -> Option<BigRational> {
    let mut acc = BigRational::zero();
    for i in range {
        let c = coef(i);
        if c == 0 {
            continue;
        }
        match alphas.get(i - 1) {
            Some(Exponent::Infinite) => return None,
            Some(Exponent::Finite(a)) => acc += int(c) * a,
            None => {}
        }
    }
    Some(acc)
}

fn lt(a: &Option<BigRational>, b: &BigRational) -> bool {
    a.as_ref().is_some_and(|a| a < b)
}

pub fn critical_profile(alphas: &[Exponent], k_max: usize) -> Result<CriticalProfile> {
    let q = alphas.iter().position(Exponent::is_positive).map(|i| i + 1).ok_or(Error::NoPositiveExponent)?;
    let one = BigRational::one();
    let b = |n: usize, k: usize| binomial(n as u64, k as u64);
    // S(k) = Σ_{i=1}^{k} C(k,i) α_i
    let s = |k: usize| weighted_sum(alphas, 1..=k, |i| b(k, i));

    let tau = (1..=k_max)
        .map(|j| match weighted_sum(alphas, 1..=j, |i| b(j + 1, i + 1)) {
            Some(sum) => Tau::Finite(int(j as u128 + 1) - sum),
            None => Tau::NegInfinity,
        })
        .collect();

    let mut k_star = None;
    let mut degenerate = false;
    for k in q.max(1)..=k_max {
        let (lo, hi) = (s(k), s(k + 1));
        let hi_above = hi.as_ref().is_none_or(|h| h > &one);
        if lt(&lo, &one) && hi_above {
            k_star = Some(k);
            break;
        }
        let lo_at_most = lo.as_ref().is_some_and(|l| l <= &one);
        let hi_at_least = hi.as_ref().is_none_or(|h| h >= &one);
        if lo_at_most && hi_at_least {
            degenerate = true;
        }
    }
    let beyond_k_max = k_star.is_none() && !degenerate && lt(&s(k_max + 1), &one);

    let subcritical = (1..=k_max).map(|k| q <= k && lt(&s(k), &one)).collect();

    let alpha_q = alphas[q - 1].finite().cloned();
    let new_cond = (1..=k_max)
        .map(|k| {
            if q >= k {
                return true;
            }
            let Some(aq) = &alpha_q else { return false };
            let lead = int(k as u128 - q as u128) / int(k as u128 + 1) * int(b(k + 1, q + 1)) * aq;
            (q + 1..=k).all(|k0| match weighted_sum(alphas, q + 1..=k0, |j| b(k + 1, j + 1)) {
                Some(rest) => &lead + rest < int((k0 - q) as u128),
                None => false,
            })
        })
        .collect();

    let new_cond2 = k_star.map(|ks| {
        let Some(aq) = &alpha_q else { return false };
        let Some(lhs) = weighted_sum(alphas, q..=ks + 1, |i| b(ks + 1, i)) else { return true };
        let coef = int(q as u128 * factorial(ks as u64 + 2))
            / int(factorial(q as u64 + 1) * factorial((ks + 1 - q) as u64) * (ks as u128 + 1));
        lhs - &one >= coef * aq
    });

    Ok(CriticalProfile { q, tau, k_star, degenerate, beyond_k_max, subcritical, new_cond, new_cond2 })
}

impl CriticalProfile {
    pub fn tau_f64(&self) -> Vec<f64> {
        self.tau.iter().map(Tau::to_f64).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let tau_exact: Vec<String> = self
            .tau
            .iter()
            .map(|t| match t {
                Tau::Finite(r) => r.to_string(),
                Tau::NegInfinity => "-inf".into(),
            })
            .collect();
        let tau: Vec<Option<f64>> = self.tau_f64().into_iter().map(|t| t.is_finite().then_some(t)).collect();
        json!({
            "q": self.q,
            "tau": tau,
            "tau_exact": tau_exact,
            "k_star": self.k_star,
            "degenerate": self.degenerate,
            "beyond_k_max": self.beyond_k_max,
            "subcritical": self.subcritical,
            "new_cond": self.new_cond,
            "new_cond2": self.new_cond2,
        })
    }
}

/// Whether every exponent in `alphas` is zero or non-positive.
pub fn all_zero(alphas: &[Exponent]) -> bool {
    alphas.iter().all(|a| !a.is_positive())
}
