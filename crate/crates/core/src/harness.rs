//! Seeded Monte Carlo experiments on the upper tail of copy counts, mean
//! checks, and prediction tables for the tail exponents.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ContinuousCDF, DiscreteCDF, Normal};

use crate::complex::{ComplexFile, SimplicialComplex};
use crate::count::{count_ordered, expected_ordered, psi};
use crate::error::{Error, Result};
use crate::homology::betti_vector;
use crate::model::{critical_profile, derive_seed, sample, ModelParams};
use crate::mstar::{mstar, predicted_exponent, MStarOptions};
use crate::numeric::{binomial, factorial, parse_rational, Exponent};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// Ordered copies of the pattern, against `μ_o`.
    #[default]
    OrderedCount,
    /// `s_j`, against `E s_j`.
    SimplexCount,
    /// `β_j` over GF(2), against `n^{τ_j}/(j+1)!`.
    Betti,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailExperimentConfig {
    pub params: ModelParams,
    pub pattern: SimplicialComplex,
    pub epsilon: f64,
    pub trials: u64,
    pub seed: u64,
    pub target: Target,
    /// Dimension `j` for the simplex-count and Betti targets; defaults to
    /// `dim G`, or to the critical dimension for Betti numbers.
    pub dimension: Option<usize>,
}

/// Pattern given inline or as a path to a complex file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PatternSource {
    Path(PathBuf),
    Inline(ComplexFile),
}

/// JSON experiment file: `p` or `alpha` (numbers or strings such as "inf").
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailConfigFile {
    pub n: usize,
    #[serde(default)]
    pub p: Option<Vec<f64>>,
    #[serde(default)]
    pub alpha: Option<Vec<serde_json::Value>>,
    #[serde(default)]
    pub k_max: Option<usize>,
    pub pattern: PatternSource,
    pub epsilon: f64,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub target: Target,
    #[serde(default)]
    pub dimension: Option<usize>,
}

fn parse_alpha(v: &serde_json::Value) -> Result<Exponent> {
    match v {
        serde_json::Value::String(s) => s.parse(),
        serde_json::Value::Number(x) => x.to_string().parse(),
        other => Err(Error::InvalidConfig(format!("exponent {other} is neither a number nor a string"))),
    }
}

impl TailConfigFile {
    /// Resolves the pattern (relative paths against `base_dir`) and validates.
    pub fn resolve(&self, base_dir: &Path) -> Result<TailExperimentConfig> {
        let pattern = match &self.pattern {
            PatternSource::Inline(f) => SimplicialComplex::from_file(f)?,
            PatternSource::Path(p) => SimplicialComplex::read_json(base_dir.join(p))?,
        };
        let dim = pattern.dimension().unwrap_or(0).max(1);
        let params = match (&self.p, &self.alpha) {
            (Some(p), None) => ModelParams::from_probs(self.n, p.clone())?,
            (None, Some(a)) => {
                let alphas = a.iter().map(parse_alpha).collect::<Result<Vec<_>>>()?;
                let k_max = self.k_max.unwrap_or(alphas.len().max(dim));
                ModelParams::from_alphas(self.n, alphas, k_max)?
            }
            _ => return Err(Error::InvalidConfig("give exactly one of \"p\" and \"alpha\"".into())),
        };
        TailExperimentConfig::new(params, pattern, self.epsilon, self.trials, self.seed, self.target, self.dimension)
    }
}

impl TailExperimentConfig {
    pub fn new(
        params: ModelParams,
        pattern: SimplicialComplex,
        epsilon: f64,
        trials: u64,
        seed: u64,
        target: Target,
        dimension: Option<usize>,
    ) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
        }
        if trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        Ok(Self { params, pattern, epsilon, trials, seed, target, dimension })
    }

    fn target_dimension(&self) -> Result<usize> {
        if let Some(j) = self.dimension {
            return Ok(j);
        }
        match self.target {
            Target::Betti => {
                let alphas = self.params.alphas().ok_or_else(|| {
                    Error::InvalidConfig("Betti target needs a dimension or exponent parameters".into())
                })?;
                critical_profile(alphas, self.params.k_max())?
                    .k_star
                    .ok_or_else(|| Error::InvalidConfig("no critical dimension; give one explicitly".into()))
            }
            _ => Ok(self.pattern.dimension().unwrap_or(0)),
        }
    }
}

/// `(1+ε)` times this is the tail threshold.
fn reference_mean(config: &TailExperimentConfig, j: usize) -> f64 {
    let p = &config.params;
    match config.target {
        Target::OrderedCount => expected_ordered(p, &config.pattern),
        Target::SimplexCount => expected_ordered(p, &SimplicialComplex::simplex(j)) / factorial(j as u64 + 1) as f64,
        Target::Betti => psi(p, &SimplicialComplex::simplex(j)).value / factorial(j as u64 + 1) as f64,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub trial_seed: u64,
    pub count: u64,
    pub exceeds: bool,
}

/// Counts and sums only, so merging is associative and commutative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Accumulator {
    pub trials: u64,
    pub exceed: u64,
    pub sum: u128,
    pub sum_sq: u128,
}

impl Accumulator {
    pub fn push(&mut self, count: u64, exceeds: bool) {
        self.trials += 1;
        self.exceed += exceeds as u64;
        self.sum += count as u128;
        self.sum_sq += (count as u128) * (count as u128);
    }

    pub fn merge(self, o: Self) -> Self {
        Self {
            trials: self.trials + o.trials,
            exceed: self.exceed + o.exceed,
            sum: self.sum + o.sum,
            sum_sq: self.sum_sq + o.sum_sq,
        }
    }

    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.trials as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.trials < 2 {
            return 0.0;
        }
        let t = self.trials as f64;
        let mean = self.sum as f64 / t;
        ((self.sum_sq as f64 - t * mean * mean) / (t - 1.0)).max(0.0)
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.trials as f64).sqrt()
    }
}

fn z95() -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(0.975)
}

/// Wilson score interval for a proportion `p` observed over `trials`.
pub fn wilson_interval_p(p: f64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let z = z95();
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // the endpoints are exact at p = 0 and p = 1
    let lo = if p <= 0.0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if p >= 1.0 { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    wilson_interval_p(successes as f64 / trials as f64, trials)
}

/// `P(2·Bin(C(n,2), p) ≥ threshold)`, the exact edge-copy tail.
pub fn edge_binomial_tail(n: usize, p: f64, threshold: f64) -> f64 {
    let pairs = binomial(n as u64, 2) as u64;
    let mut k = (threshold / 2.0).ceil().max(0.0) as u64;
    while k > 0 && 2.0 * (k - 1) as f64 >= threshold {
        k -= 1;
    }
    while ((2 * k) as f64) < threshold {
        k += 1;
    }
    if k == 0 {
        return 1.0;
    }
    if k > pairs {
        return 0.0;
    }
    Binomial::new(p, pairs).expect("valid binomial").sf(k - 1)
}

/// Log-probability scales `n^e` and `n^e ln n` bracketing the tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PredictionWindow {
    pub exponent: f64,
    pub n_pow_e: f64,
    pub n_pow_e_ln_n: f64,
}

impl PredictionWindow {
    pub fn new(n: usize, exponent: f64) -> Self {
        let ne = (n as f64).powf(exponent);
        Self { exponent, n_pow_e: ne, n_pow_e_ln_n: ne * (n as f64).ln() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailSummary {
    pub trials: u64,
    pub exceed_count: u64,
    pub reference_mean: f64,
    pub threshold: f64,
    pub empirical_mean: f64,
    pub std_error: f64,
    pub frequency: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub ln_frequency: Option<f64>,
    pub exact_tail: Option<f64>,
    pub prediction: Option<PredictionWindow>,
}

impl TailSummary {
    /// Summary of an arbitrary collection of counts; independent of order.
    pub fn from_counts(counts: &[u64], reference_mean: f64, epsilon: f64) -> Self {
        let threshold = (1.0 + epsilon) * reference_mean;
        let acc = counts
            .par_iter()
            .fold(Accumulator::default, |mut a, &c| {
                a.push(c, c as f64 >= threshold);
                a
            })
            .reduce(Accumulator::default, Accumulator::merge);
        Self::from_accumulator(&acc, reference_mean, threshold)
    }

    fn from_accumulator(acc: &Accumulator, reference_mean: f64, threshold: f64) -> Self {
        let frequency = acc.exceed as f64 / acc.trials as f64;
        let (lo, hi) = wilson_interval(acc.exceed, acc.trials);
        Self {
            trials: acc.trials,
            exceed_count: acc.exceed,
            reference_mean,
            threshold,
            empirical_mean: acc.mean(),
            std_error: acc.std_error(),
            frequency,
            wilson_low: lo,
            wilson_high: hi,
            ln_frequency: (acc.exceed > 0).then(|| frequency.ln()),
            exact_tail: None,
            prediction: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub rows: Vec<TrialRow>,
    pub summary: TailSummary,
}

fn is_single_edge(g: &SimplicialComplex) -> bool {
    g.vertex_count() == 2 && g.simplex_counts().0 == vec![2, 1]
}

pub fn tail_estimate(config: &TailExperimentConfig) -> Result<ExperimentRecord> {
    let j = config.target_dimension()?;
    let mean = reference_mean(config, j);
    if !(mean > 0.0) {
        return Err(Error::DegenerateMean);
    }
    let threshold = (1.0 + config.epsilon) * mean;
    let levels = match config.target {
        Target::OrderedCount => config.pattern.dimension().unwrap_or(0),
        Target::SimplexCount => j,
        Target::Betti => j + 1,
    };
    let params = config.params.truncated(levels.max(1));
    let rows: Vec<TrialRow> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = derive_seed(config.seed, trial);
            let k = sample(&params, trial_seed);
            let count = match config.target {
                Target::OrderedCount => count_ordered(&k, &config.pattern),
                Target::SimplexCount => k.faces(j).len() as u64,
                Target::Betti => betti_vector(&k, 2).expect("2 is prime").get(j),
            };
            TrialRow { trial, trial_seed, count, exceeds: count as f64 >= threshold }
        })
        .collect();
    let acc = rows.iter().fold(Accumulator::default(), |mut a, r| {
        a.push(r.count, r.exceeds);
        a
    });
    let mut summary = TailSummary::from_accumulator(&acc, mean, threshold);
    if config.target == Target::OrderedCount && is_single_edge(&config.pattern) {
        summary.exact_tail = Some(edge_binomial_tail(params.n(), params.prob(1), threshold));
    }
    summary.prediction = predicted_window(config, j);
    Ok(ExperimentRecord { rows, summary })
}

fn predicted_window(config: &TailExperimentConfig, j: usize) -> Option<PredictionWindow> {
    let alphas = config.params.alphas()?;
    let q = alphas.iter().position(Exponent::is_positive)? + 1;
    let aq = alphas[q - 1].finite()?;
    let k = match config.target {
        Target::OrderedCount => config.pattern.dimension()?,
        _ => j,
    };
    (q <= k).then(|| PredictionWindow::new(config.params.n(), predicted_exponent(k, q, crate::numeric::rational_to_f64(aq))))
}

pub const TAIL_SCHEMA: &str = "simplicial-ld/tail/v1";

/// CSV with a schema line, one row per trial, then `#key=value` summary lines.
pub fn write_tail_csv<W: Write>(record: &ExperimentRecord, mut out: W) -> Result<()> {
    writeln!(out, "#schema={TAIL_SCHEMA}")?;
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(["trial", "trial_seed", "count", "exceeds"])?;
        for r in &record.rows {
            w.write_record([r.trial.to_string(), r.trial_seed.to_string(), r.count.to_string(), (r.exceeds as u8).to_string()])?;
        }
        w.flush()?;
    }
    let s = &record.summary;
    let opt = |x: Option<f64>| x.map_or_else(|| "NA".to_string(), |v| v.to_string());
    let lines = [
        ("trials", s.trials.to_string()),
        ("exceed_count", s.exceed_count.to_string()),
        ("reference_mean", s.reference_mean.to_string()),
        ("threshold", s.threshold.to_string()),
        ("empirical_mean", s.empirical_mean.to_string()),
        ("std_error", s.std_error.to_string()),
        ("frequency", s.frequency.to_string()),
        ("wilson_low", s.wilson_low.to_string()),
        ("wilson_high", s.wilson_high.to_string()),
        ("ln_frequency", opt(s.ln_frequency)),
        ("exact_tail", opt(s.exact_tail)),
        ("predicted_exponent", opt(s.prediction.map(|p| p.exponent))),
    ];
    for (k, v) in lines {
        writeln!(out, "#{k}={v}")?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanReport {
    pub trials: u64,
    pub expected: f64,
    pub empirical: f64,
    pub std_error: f64,
    /// `(empirical − expected)/std_error`; zero when both agree with no variance.
    pub z_score: f64,
    /// For `G ≅ σ_j`: `n^{τ_j}/(j+1)!`.
    pub simplex_scale: Option<f64>,
    /// Empirical mean of `s_j` over `simplex_scale`.
    pub ratio: Option<f64>,
}

pub fn mean_check(params: &ModelParams, pattern: &SimplicialComplex, trials: u64, seed: u64) -> Result<MeanReport> {
    if trials < 100 {
        return Err(Error::InvalidConfig(format!("mean checks need at least 100 trials, got {trials}")));
    }
    let dim = pattern.dimension().unwrap_or(0);
    let truncated = params.truncated(dim.max(1));
    let acc = (0..trials)
        .into_par_iter()
        .fold(Accumulator::default, |mut a, t| {
            a.push(count_ordered(&sample(&truncated, derive_seed(seed, t)), pattern), false);
            a
        })
        .reduce(Accumulator::default, Accumulator::merge);
    let expected = expected_ordered(params, pattern);
    let empirical = acc.mean();
    let se = acc.std_error();
    let diff = empirical - expected;
    let z_score = if se > 0.0 {
        diff / se
    } else if diff.abs() <= 1e-9 * (1.0 + expected.abs()) {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    };
    let simplex = pattern.is_isomorphic(&SimplicialComplex::simplex(dim));
    let fact = factorial(dim as u64 + 1) as f64;
    let simplex_scale = simplex.then(|| psi(params, pattern).value / fact);
    let ratio = simplex_scale.map(|s| empirical / fact / s);
    Ok(MeanReport { trials, expected, empirical, std_error: se, z_score, simplex_scale, ratio })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportMode {
    #[default]
    Copies,
    Betti,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub n: usize,
    pub mstar: u64,
    /// `−M*`: the upper bound on the log-probability is `−C(ε, G)` times this scale.
    pub upper_log_scale: f64,
    /// `M* ln Π p_j`: the lower bound is `ln(1/4) + B(ε, G)` times this scale.
    pub lower_log_scale: f64,
    pub window: Option<PredictionWindow>,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentReport {
    pub mode: ReportMode,
    pub epsilon: f64,
    /// Dimension of the pattern, or the critical dimension in Betti mode.
    pub k: usize,
    pub q: Option<usize>,
    pub exponent: Option<f64>,
    pub rows: Vec<ReportRow>,
}

/// Prediction table of tail exponents; nothing is simulated.
pub fn exponent_report(
    pattern: &SimplicialComplex,
    alphas: &[Exponent],
    n_grid: &[usize],
    epsilon: f64,
    mode: ReportMode,
) -> Result<ExponentReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
    }
    let dim = pattern.dimension().unwrap_or(0);
    let k_max = dim.max(alphas.len()).max(1);
    let profile = critical_profile(alphas, k_max + 1)?;
    let q = profile.q;
    let mut flags = Vec::new();
    let (k, g) = match mode {
        ReportMode::Copies => {
            if !profile.subcritical.get(dim.wrapping_sub(1)).copied().unwrap_or(false) {
                flags.push("subcriticality fails: unverified regime".to_string());
            }
            if q < dim && !profile.new_cond[dim - 1] {
                flags.push("extra condition fails: unverified regime".to_string());
            }
            (dim, pattern.clone())
        }
        ReportMode::Betti => {
            let ks = profile.k_star.ok_or_else(|| Error::InvalidConfig("no critical dimension for these exponents".into()))?;
            if profile.new_cond2 != Some(true) {
                flags.push("extra Betti condition fails: unverified regime".to_string());
            }
            if !profile.subcritical[ks - 1] || (q < ks && !profile.new_cond[ks - 1]) {
                flags.push("conditions at the critical dimension fail: unverified regime".to_string());
            }
            (ks, SimplicialComplex::simplex(ks))
        }
    };
    let exponent = (q <= k)
        .then(|| alphas[q - 1].finite().map(|a| predicted_exponent(k, q, crate::numeric::rational_to_f64(a))))
        .flatten();
    let k_model = k_max.max(k);
    let rows = n_grid
        .par_iter()
        .map(|&n| {
            let params = ModelParams::from_alphas(n, alphas.to_vec(), k_model)?;
            let m = mstar(&params, &g, MStarOptions::default())?;
            let ln_prod: f64 = (1..=k).map(|j| params.ln_prob(j)).sum();
            Ok(ReportRow {
                n,
                mstar: m.value,
                upper_log_scale: -(m.value as f64),
                lower_log_scale: m.value as f64 * ln_prod,
                window: exponent.map(|e| PredictionWindow::new(n, e)),
                flags: flags.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExponentReport { mode, epsilon, k, q: Some(q), exponent, rows })
}

pub const REPORT_SCHEMA: &str = "simplicial-ld/exponent-report/v1";

pub fn write_report_csv<W: Write>(report: &ExponentReport, mut out: W) -> Result<()> {
    writeln!(out, "#schema={REPORT_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "mstar", "upper_log_scale", "lower_log_scale", "exponent", "n_pow_e", "n_pow_e_ln_n", "flags"])?;
    for r in &report.rows {
        let win = |f: fn(&PredictionWindow) -> f64| r.window.as_ref().map_or_else(String::new, |w| f(w).to_string());
        w.write_record([
            r.n.to_string(),
            r.mstar.to_string(),
            r.upper_log_scale.to_string(),
            r.lower_log_scale.to_string(),
            win(|w| w.exponent),
            win(|w| w.n_pow_e),
            win(|w| w.n_pow_e_ln_n),
            r.flags.join("; "),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parses comma-separated exponents such as `0.3,0,inf`.
pub fn parse_alphas(text: &str) -> Result<Vec<Exponent>> {
    text.split(',').map(|s| s.trim().parse()).collect()
}

/// Parses comma-separated probabilities, keeping exact rationals when possible.
pub fn parse_probs(n: usize, text: &str) -> Result<ModelParams> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>() {
        Ok(r) => ModelParams::from_rational_probs(n, r),
        Err(_) => {
            let p = parts.iter().map(|s| s.parse::<f64>().map_err(|_| Error::InvalidNumber(s.to_string()))).collect::<Result<Vec<_>>>()?;
            ModelParams::from_probs(n, p)
        }
    }
}
