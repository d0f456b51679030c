//! The threshold `M*_{G,n}`: the minimum over subcomplexes `H` of `G` of the
//! largest `m` for which the extremal count of `H` under budgets
//! `(n, m s_1(G), …, m s_k(G))` stays below `Ψ_{H,n}`.

use std::io::Write;

use num::rational::BigRational;
use num::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::complex::SimplicialComplex;
use crate::count::{enumerate_subcomplexes, ln_psi_exact, psi, Subcomplex};
use crate::embed::count_embeddings;
use crate::error::{Error, Result};
use crate::extremal::{brute_force_n, solve_float, solve_gamma, Bound, ExtremalQuery, ORACLE_MAX_VERTICES};
use crate::model::{critical_profile, ExactLn, ModelParams};
use crate::numeric::{binomial, Exponent, LogValue};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MStarMode {
    #[default]
    LpSurrogate,
    OracleExact,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MStarOptions {
    pub mode: MStarMode,
    /// Also minimise over subcomplexes padded with isolated vertices.
    pub include_isolated: bool,
}

/// `⌊C(n, k+1) / s_k(G)⌋`.
pub fn threshold_cap(n: usize, pattern: &SimplicialComplex) -> u64 {
    let k = pattern.dimension().unwrap_or(0);
    let sk = pattern.simplex_counts().get(k).max(1) as u128;
    u64::try_from(binomial(n as u64, k as u64 + 1) / sk).unwrap_or(u64::MAX)
}

/// Relative margin below which the float comparison defers to exact arithmetic.
const TIE_MARGIN: f64 = 1e-7;

struct Predicate<'a> {
    params: &'a ModelParams,
    h: &'a SimplicialComplex,
    g_counts: Vec<u64>,
    ln_psi: f64,
    ln_psi_exact: Option<ExactLn>,
    mode: MStarMode,
}

impl Predicate<'_> {
    fn bounds(&self, m: u64) -> Vec<Bound> {
        let dim = self.h.dimension().unwrap_or(0);
        std::iter::once(Bound::Integer(self.params.n() as u64))
            .chain((1..=dim).map(|i| Bound::Integer(m.saturating_mul(self.g_counts[i]))))
            .collect()
    }

    /// Whether the extremal count at `m` is at most `Ψ_{H,n}`.
    fn holds(&self, m: u64) -> Result<bool> {
        if self.ln_psi == f64::NEG_INFINITY {
            return Ok(false);
        }
        let bounds = self.bounds(m);
        if self.mode == MStarMode::OracleExact {
            let ints: Vec<u64> = bounds
                .iter()
                .map(|b| match b {
                    Bound::Integer(v) => *v,
                    _ => unreachable!("integer budgets"),
                })
                .collect();
            let count = brute_force_n(self.h, &ints)?;
            if count == 0 {
                return Ok(true);
            }
            return Ok(match &self.ln_psi_exact {
                Some(ExactLn::Value(v)) => LogValue::ln_u64(count) <= *v,
                Some(ExactLn::NegInfinity) => false,
                None => (count as f64).ln() <= self.ln_psi + TIE_MARGIN * (1.0 + self.ln_psi.abs()),
            });
        }
        let query = ExtremalQuery::new(self.h.clone(), bounds)?;
        let gamma = solve_float(&query)?.gamma;
        let diff = gamma - self.ln_psi;
        if diff.abs() > TIE_MARGIN * (1.0 + self.ln_psi.abs()) {
            return Ok(diff < 0.0);
        }
        match &self.ln_psi_exact {
            Some(ExactLn::Value(v)) => {
                let exact = solve_gamma(&query)?.exact.expect("integer budgets are exact");
                Ok(exact.gamma <= *v)
            }
            _ => Ok(true),
        }
    }
}

fn check_subcomplex(g: &SimplicialComplex, h: &SimplicialComplex) -> Result<()> {
    if h.vertex_count() == 0 {
        return Err(Error::InvalidSubcomplex("H is empty".into()));
    }
    if count_embeddings(h, g) == 0 {
        return Err(Error::InvalidSubcomplex(format!("{} does not embed in the pattern", h.facet_label())));
    }
    Ok(())
}

/// `K_H`: the largest `m ∈ [1, cap]` passing the threshold test, found by
/// bisection, or 0 when even `m = 1` fails.
pub fn k_h_threshold(params: &ModelParams, g: &SimplicialComplex, h: &SimplicialComplex, mode: MStarMode) -> Result<u64> {
    check_subcomplex(g, h)?;
    if mode == MStarMode::OracleExact && params.n() as u64 > ORACLE_MAX_VERTICES {
        return Err(Error::OracleTooLarge(format!("oracle thresholds need n ≤ {ORACLE_MAX_VERTICES}")));
    }
    let p = psi(params, h);
    let pred = Predicate {
        params,
        h,
        g_counts: g.simplex_counts().0,
        ln_psi: p.ln_value,
        ln_psi_exact: ln_psi_exact(params, h),
        mode,
    };
    let cap = threshold_cap(params.n(), g);
    if cap == 0 || !pred.holds(1)? {
        return Ok(0);
    }
    if pred.holds(cap)? {
        return Ok(cap);
    }
    let (mut lo, mut hi) = (1u64, cap);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred.holds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HThreshold {
    pub subcomplex: Subcomplex,
    pub k_h: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MStarResult {
    pub value: u64,
    pub cap: u64,
    pub mode: MStarMode,
    pub per_h: Vec<HThreshold>,
    /// Indices into `per_h` attaining the minimum.
    pub minimizers: Vec<usize>,
    /// The minimiser with the most faces.
    pub argmin: usize,
    pub warnings: Vec<String>,
}

impl MStarResult {
    pub fn argmin_subcomplex(&self) -> &Subcomplex {
        &self.per_h[self.argmin].subcomplex
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "value": self.value,
            "cap": self.cap,
            "mode": self.mode,
            "argmin_subcomplex": self.argmin_subcomplex().complex.to_file(),
            "argmin_label": self.argmin_subcomplex().complex.facet_label(),
            "minimizers": self.minimizers.iter().map(|&i| self.per_h[i].subcomplex.complex.facet_label()).collect::<Vec<_>>(),
            "per_h": self.per_h.iter().map(|t| json!({
                "subcomplex": t.subcomplex.complex.facet_label(),
                "n_vertices": t.subcomplex.complex.vertex_count(),
                "s": t.subcomplex.complex.simplex_counts(),
                "labeled_count": t.subcomplex.labeled_count,
                "k_h": t.k_h,
            })).collect::<Vec<_>>(),
            "warnings": self.warnings,
        })
    }
}

fn no_positive_exponent(params: &ModelParams, k: usize) -> bool {
    match params.alphas() {
        Some(a) => a.iter().take(k).all(|a| !a.is_positive()),
        None => (1..=k).all(|i| params.prob(i) >= 1.0),
    }
}

pub fn mstar(params: &ModelParams, g: &SimplicialComplex, opts: MStarOptions) -> Result<MStarResult> {
    let k = g.dimension().filter(|&k| k >= 1).ok_or_else(|| Error::InvalidQuery("pattern needs a face of positive dimension".into()))?;
    if k > params.k_max() {
        return Err(Error::InvalidParams(format!("pattern dimension {k} exceeds k_max = {}", params.k_max())));
    }
    let classes = enumerate_subcomplexes(g, opts.include_isolated)?;
    let per_h: Vec<HThreshold> = classes
        .into_par_iter()
        .map(|sub| {
            let k_h = k_h_threshold(params, g, &sub.complex, opts.mode)?;
            Ok(HThreshold { subcomplex: sub, k_h })
        })
        .collect::<Result<_>>()?;
    let value = per_h.iter().map(|t| t.k_h).min().expect("at least one subcomplex");
    let minimizers: Vec<usize> = (0..per_h.len()).filter(|&i| per_h[i].k_h == value).collect();
    let argmin = *minimizers
        .iter()
        .max_by_key(|&&i| (per_h[i].subcomplex.complex.face_count(), std::cmp::Reverse(i)))
        .expect("non-empty");
    let mut warnings = Vec::new();
    if no_positive_exponent(params, k) {
        warnings.push("no positive exponent up to the pattern dimension: q is undefined and M* is the cap".into());
    }
    if value == 0 {
        warnings.push("some subcomplex fails the threshold already at m = 1".into());
    }
    Ok(MStarResult { value, cap: threshold_cap(params.n(), g), mode: opts.mode, per_h, minimizers, argmin, warnings })
}

/// `q + 1 − C(k, q) α_q`.
pub fn predicted_exponent(k: usize, q: usize, alpha_q: f64) -> f64 {
    (q + 1) as f64 - binomial(k as u64, q as u64) as f64 * alpha_q
}

pub fn predicted_exponent_exact(k: usize, q: usize, alpha_q: &BigRational) -> BigRational {
    BigRational::from_integer(BigInt::from(q + 1)) - BigRational::from_integer(BigInt::from(binomial(k as u64, q as u64))) * alpha_q
}

/// Exponent predicted for `G` of dimension `k` from the first positive `α_q`,
/// when `q ≤ k` and `α_q` is finite.
pub fn predicted_for(k: usize, alphas: &[Exponent]) -> Option<(usize, f64)> {
    let q = alphas.iter().position(Exponent::is_positive)? + 1;
    let a = alphas[q - 1].finite()?;
    (q <= k).then(|| (q, crate::numeric::rational_to_f64(&predicted_exponent_exact(k, q, a))))
}

pub const SWEEP_SCHEMA: &str = "simplicial-ld/sweep/v1";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub mstar: u64,
    pub ln_n: f64,
    pub ln_mstar: Option<f64>,
    pub predicted_exponent: Option<f64>,
    #[serde(rename = "argmin_H")]
    pub argmin_h: String,
}

/// `M*` across `n_grid` for `p_i = n^{-α_i}`, in grid order.
pub fn sweep(g: &SimplicialComplex, alphas: &[Exponent], n_grid: &[usize], opts: MStarOptions) -> Result<Vec<SweepRow>> {
    let k = g.dimension().unwrap_or(0);
    let k_max = k.max(alphas.len()).max(1);
    let predicted = predicted_for(k, alphas).map(|(_, e)| e);
    n_grid
        .par_iter()
        .map(|&n| {
            let params = ModelParams::from_alphas(n, alphas.to_vec(), k_max)?;
            let res = mstar(&params, g, opts)?;
            Ok(SweepRow {
                n,
                mstar: res.value,
                ln_n: (n as f64).ln(),
                ln_mstar: (res.value > 0).then(|| (res.value as f64).ln()),
                predicted_exponent: predicted,
                argmin_h: res.argmin_subcomplex().complex.facet_label(),
            })
        })
        .collect()
}

/// Writes a sweep as CSV preceded by a `#schema=` line.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "#schema={SWEEP_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "mstar", "ln_n", "ln_mstar", "predicted_exponent", "argmin_H"])?;
    for r in rows {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.12}")).unwrap_or_default();
        w.write_record([
            r.n.to_string(),
            r.mstar.to_string(),
            format!("{:.12}", r.ln_n),
            opt(r.ln_mstar),
            opt(r.predicted_exponent),
            r.argmin_h.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the regression.
    pub residual: f64,
    pub q: Option<usize>,
    pub predicted: Option<f64>,
    pub deviation: Option<f64>,
    /// Subcriticality, plus the extra condition when `q < k`.
    pub conditions_hold: bool,
    pub flags: Vec<String>,
    pub rows: Vec<SweepRow>,
}

/// Ordinary least squares `y ≈ a + b x`; returns `(b, a, rms residual)`.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Fits the slope of `ln M*` against `ln n`. Violated conditions are flagged;
/// the fit is computed regardless.
pub fn exponent_fit(g: &SimplicialComplex, alphas: &[Exponent], n_grid: &[usize], opts: MStarOptions) -> Result<ExponentFit> {
    if n_grid.len() < 2 {
        return Err(Error::InvalidParams("the n grid needs at least two points".into()));
    }
    let k = g.dimension().unwrap_or(0);
    let mut flags = Vec::new();
    if n_grid.len() < 4 {
        flags.push("fewer than four grid points".to_string());
    }
    let rows = sweep(g, alphas, n_grid, opts)?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows.iter().filter_map(|r| r.ln_mstar.map(|y| (r.ln_n, y))).unzip();
    if xs.len() < rows.len() {
        flags.push("M* = 0 at some grid points; they are left out of the fit".into());
    }
    if xs.len() < 2 {
        return Err(Error::InvalidParams("fewer than two grid points with positive M*".into()));
    }
    let (slope, intercept, residual) = least_squares(&xs, &ys);
    let predicted = predicted_for(k, alphas);
    let conditions_hold = match (predicted, critical_profile(alphas, k.max(1))) {
        (Some((q, _)), Ok(prof)) => {
            let sub = prof.subcritical[k - 1];
            let extra = q >= k || prof.new_cond[k - 1];
            if !sub {
                flags.push("subcriticality fails at the pattern dimension".into());
            }
            if !extra {
                flags.push("extra condition fails: unverified regime".into());
            }
            sub && extra
        }
        _ => {
            flags.push("no positive exponent at or below the pattern dimension".into());
            false
        }
    };
    Ok(ExponentFit {
        slope,
        intercept,
        residual,
        q: predicted.map(|p| p.0),
        predicted: predicted.map(|p| p.1),
        deviation: predicted.map(|p| slope - p.1),
        conditions_hold,
        flags,
        rows,
    })
}
