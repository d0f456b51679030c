//! Exact and compensated arithmetic shared by the LP, threshold and model code.
//!
//! The central type is [`LogValue`], an exact element of the rational span of
//! `{ln 2, ln 3, ln 5, ...}`. Logarithms of distinct primes are linearly
//! independent over the rationals, so the representation is canonical and the
//! sign of any such value can be decided exactly by comparing two products of
//! prime powers.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num::bigint::{BigInt, BigUint, Sign};
use num::integer::Integer;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses `"3"`, `"-0.25"`, `"1e-3"`, `"7/20"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::InvalidNumber(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_rational(num)?;
        let den = parse_rational(den)?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(num / den);
    }
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().map_err(|_| bad())?
    };
    let scale = exp10 - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        let Some(next) = acc.checked_mul((n - i) as u128) else {
            return u128::MAX;
        };
        acc = next / (i as u128 + 1);
    }
    acc
}

pub fn binomial_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

/// `ln (n)_k = ln n(n-1)...(n-k+1)`; `None` when the falling factorial is zero.
pub fn ln_falling_factorial(n: u64, k: u64) -> Option<f64> {
    if k > n {
        return None;
    }
    let mut sum = NeumaierSum::default();
    for i in 0..k {
        sum.add(((n - i) as f64).ln());
    }
    Some(sum.value())
}

/// Kahan–Babuška–Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Trial-division factorisation; fine for the bounds this crate produces.
pub fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// An exact real number of the form `Σ r_p ln p` over primes `p`, with
/// rational `r_p`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LogValue {
    terms: BTreeMap<u64, BigRational>,
}

impl LogValue {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `ln m` for a positive integer `m`.
    pub fn ln_u64(m: u64) -> Self {
        assert!(m >= 1, "logarithm of zero");
        let mut v = Self::zero();
        for (p, e) in factorize(m) {
            v.add_term(p, BigRational::from_integer(BigInt::from(e)));
        }
        v
    }

    /// `ln r` for a positive rational whose numerator and denominator fit in `u64`.
    pub fn ln_rational(r: &BigRational) -> Result<Self> {
        let bad = || Error::InvalidNumber(r.to_string());
        if !r.is_positive() {
            return Err(bad());
        }
        let num = r.numer().to_u64().ok_or_else(bad)?;
        let den = r.denom().to_u64().ok_or_else(bad)?;
        Ok(Self::ln_u64(num) - Self::ln_u64(den))
    }

    /// `ln(base^exponent) = exponent · ln base`.
    pub fn ln_power(base: u64, exponent: &BigRational) -> Self {
        Self::ln_u64(base).scaled(exponent)
    }

    fn add_term(&mut self, p: u64, r: BigRational) {
        if r.is_zero() {
            return;
        }
        let slot = self.terms.entry(p).or_insert_with(BigRational::zero);
        *slot += r;
        if slot.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn scaled(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(p, r)| (*p, r * k)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.terms.iter().map(|(p, r)| (*p, r))
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(p, r)| rational_to_f64(r) * (*p as f64).ln())
            .collect::<NeumaierSum>()
            .value()
    }

    /// If the value is a rational multiple of `ln base`, return that multiple.
    pub fn as_multiple_of(&self, base: u64) -> Option<BigRational> {
        if base < 2 {
            return None;
        }
        let unit = Self::ln_u64(base);
        let (p, r0) = unit.terms.iter().next()?;
        let ratio = self.terms.get(p).cloned().unwrap_or_else(BigRational::zero) / r0;
        (unit.scaled(&ratio) == *self).then_some(ratio)
    }

    /// Exact sign. A float estimate settles almost every case; near-ties fall
    /// back to comparing `Π p^{e_p}` for `e_p > 0` against `e_p < 0` in big
    /// integers.
    pub fn signum(&self) -> Ordering {
        if self.terms.is_empty() {
            return Ordering::Equal;
        }
        let mut approx = NeumaierSum::default();
        let mut magnitude = 0.0;
        for (p, r) in &self.terms {
            let t = rational_to_f64(r) * (*p as f64).ln();
            approx.add(t);
            magnitude += t.abs();
        }
        let approx = approx.value();
        if approx.abs() > 1e-9 * (1.0 + magnitude) {
            return approx.partial_cmp(&0.0).unwrap_or(Ordering::Equal);
        }
        self.exact_signum()
    }

    fn exact_signum(&self) -> Ordering {
        let lcm = self.terms.values().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let mut positive = BigUint::one();
        let mut negative = BigUint::one();
        for (p, r) in &self.terms {
            let e = r.numer() * (&lcm / r.denom());
            let exp = e.magnitude().to_u32().expect("prime exponent too large for exact comparison");
            let factor = BigUint::from(*p).pow(exp);
            match e.sign() {
                Sign::Plus => positive *= factor,
                Sign::Minus => negative *= factor,
                Sign::NoSign => {}
            }
        }
        positive.cmp(&negative)
    }

    pub fn exp_f64(&self) -> f64 {
        self.to_f64().exp()
    }
}

impl Add for &LogValue {
    type Output = LogValue;
    fn add(self, rhs: &LogValue) -> LogValue {
        let mut out = self.clone();
        for (p, r) in &rhs.terms {
            out.add_term(*p, r.clone());
        }
        out
    }
}

impl Add for LogValue {
    type Output = LogValue;
    fn add(self, rhs: LogValue) -> LogValue {
        &self + &rhs
    }
}

impl Sub for &LogValue {
    type Output = LogValue;
    fn sub(self, rhs: &LogValue) -> LogValue {
        let mut out = self.clone();
        for (p, r) in &rhs.terms {
            out.add_term(*p, -r.clone());
        }
        out
    }
}

impl Sub for LogValue {
    type Output = LogValue;
    fn sub(self, rhs: LogValue) -> LogValue {
        &self - &rhs
    }
}

impl Neg for LogValue {
    type Output = LogValue;
    fn neg(self) -> LogValue {
        Self { terms: self.terms.into_iter().map(|(p, r)| (p, -r)).collect() }
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogValue {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, r)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({r})*ln({p})")?;
        }
        Ok(())
    }
}

/// An exponent `α ∈ [0, ∞]` in `p = n^{-α}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(BigRational),
    Infinite,
}

impl Exponent {
    pub fn zero() -> Self {
        Exponent::Finite(BigRational::zero())
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Exponent::Finite(r) => r.is_positive(),
            Exponent::Infinite => true,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite(r) => rational_to_f64(r),
            Exponent::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Exponent::Finite(r) => Some(r),
            Exponent::Infinite => None,
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "+inf") {
            return Ok(Exponent::Infinite);
        }
        let r = parse_rational(t)?;
        if r.is_negative() {
            return Err(Error::InvalidNumber(s.to_string()));
        }
        Ok(Exponent::Finite(r))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(r) => write!(f, "{r}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
