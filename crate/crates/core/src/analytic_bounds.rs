//! Closed-form analytic bounds: heights, the Mertens-type product estimate,
//! Lambert W, the effective surjectivity inequality and the adelic bounds.
//!
//! Everything real-valued is evaluated with [`Interval`] at [`PREC`] bits and
//! then collapsed to one endpoint, so a bound reported as rounded up really is
//! an upper bound for the exact formula value.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gl2_ring::is_prime;
use crate::interval::{Interval, PREC};
use crate::matgroups::prime_factors;

pub type BigRational = Rational;

/// Significant digits in the decimal rendering of a [`RealBound`].
pub const DISPLAY_DIGITS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    Up,
    Down,
    Nearest,
}

impl Rounding {
    fn mpfr(self) -> Round {
        match self {
            Rounding::Up => Round::Up,
            Rounding::Down => Round::Down,
            Rounding::Nearest => Round::Nearest,
        }
    }
}

/// A high-precision real with the direction it was rounded in.
#[derive(Clone, Debug, PartialEq)]
pub struct RealBound {
    value: Float,
    rounding: Rounding,
}

impl RealBound {
    pub fn new(value: Float, rounding: Rounding) -> Self {
        RealBound { value, rounding }
    }

    pub fn upper(iv: &Interval) -> Self {
        RealBound { value: iv.hi.clone(), rounding: Rounding::Up }
    }

    pub fn lower(iv: &Interval) -> Self {
        RealBound { value: iv.lo.clone(), rounding: Rounding::Down }
    }

    pub fn nearest(value: Float) -> Self {
        RealBound { value, rounding: Rounding::Nearest }
    }

    fn from_interval(iv: &Interval, rounding: Rounding) -> Self {
        match rounding {
            Rounding::Up => Self::upper(iv),
            Rounding::Down => Self::lower(iv),
            Rounding::Nearest => {
                Self::nearest(Float::with_val(PREC, &iv.lo + &iv.hi) / 2u32)
            }
        }
    }

    pub fn value(&self) -> &Float {
        &self.value
    }

    pub fn rounding(&self) -> Rounding {
        self.rounding
    }

    /// f64 rounded in the same direction as the bound.
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64_round(self.rounding.mpfr())
    }

    pub fn decimal(&self) -> String {
        self.value.to_string_radix_round(10, Some(DISPLAY_DIGITS), self.rounding.mpfr())
    }

    /// The point interval at this value.
    pub fn as_interval(&self) -> Interval {
        Interval { lo: self.value.clone(), hi: self.value.clone() }
    }
}

impl fmt::Display for RealBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.decimal())
    }
}

impl Serialize for RealBound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RealBound", 3)?;
        st.serialize_field("value", &self.decimal())?;
        st.serialize_field("value_f64", &self.to_f64())?;
        st.serialize_field("rounding", &self.rounding)?;
        st.end()
    }
}

/// Registered formulas. The id is the `formula_id` of a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaId {
    WeilHeight,
    BOfJ,
    FaltingsInterval,
    FaltingsFromTau,
    MertensRatio,
    LambertW,
    LwUpper,
    CartanPowerGeneral,
    CartanPowerCoprimeRamification,
    CartanPowerQ,
    LambdaNonintegral,
    LambdaNonintegralQ,
    EffisoMaxLambda,
    Delta,
    LambdaHeight,
    LambdaHeightRefined,
    AdelicHeight,
    AdelicHeightRefined,
    AdelicConductor,
    PrimeNonzeroTrace,
    LargePrimeProduct,
    CaseA,
    CaseAAbsorbed,
    CaseB,
    PipelineHeight,
}

impl FormulaId {
    pub const ALL: [FormulaId; 25] = [
        FormulaId::WeilHeight,
        FormulaId::BOfJ,
        FormulaId::FaltingsInterval,
        FormulaId::FaltingsFromTau,
        FormulaId::MertensRatio,
        FormulaId::LambertW,
        FormulaId::LwUpper,
        FormulaId::CartanPowerGeneral,
        FormulaId::CartanPowerCoprimeRamification,
        FormulaId::CartanPowerQ,
        FormulaId::LambdaNonintegral,
        FormulaId::LambdaNonintegralQ,
        FormulaId::EffisoMaxLambda,
        FormulaId::Delta,
        FormulaId::LambdaHeight,
        FormulaId::LambdaHeightRefined,
        FormulaId::AdelicHeight,
        FormulaId::AdelicHeightRefined,
        FormulaId::AdelicConductor,
        FormulaId::PrimeNonzeroTrace,
        FormulaId::LargePrimeProduct,
        FormulaId::CaseA,
        FormulaId::CaseAAbsorbed,
        FormulaId::CaseB,
        FormulaId::PipelineHeight,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FormulaId::WeilHeight => "weil_height",
            FormulaId::BOfJ => "b_of_j",
            FormulaId::FaltingsInterval => "faltings_interval",
            FormulaId::FaltingsFromTau => "faltings_from_tau",
            FormulaId::MertensRatio => "mertens_ratio",
            FormulaId::LambertW => "lambert_w",
            FormulaId::LwUpper => "lw_upper",
            FormulaId::CartanPowerGeneral => "cartan_power_general",
            FormulaId::CartanPowerCoprimeRamification => "cartan_power_coprime_ramification",
            FormulaId::CartanPowerQ => "cartan_power_q",
            FormulaId::LambdaNonintegral => "lambda_nonintegral",
            FormulaId::LambdaNonintegralQ => "lambda_nonintegral_q",
            FormulaId::EffisoMaxLambda => "effiso_max_lambda",
            FormulaId::Delta => "delta",
            FormulaId::LambdaHeight => "lambda_height",
            FormulaId::LambdaHeightRefined => "lambda_height_refined",
            FormulaId::AdelicHeight => "adelic_height",
            FormulaId::AdelicHeightRefined => "adelic_height_refined",
            FormulaId::AdelicConductor => "adelic_conductor",
            FormulaId::PrimeNonzeroTrace => "prime_nonzero_trace",
            FormulaId::LargePrimeProduct => "large_prime_product",
            FormulaId::CaseA => "case_a",
            FormulaId::CaseAAbsorbed => "case_a_absorbed",
            FormulaId::CaseB => "case_b",
            FormulaId::PipelineHeight => "pipeline_height",
        }
    }

    /// Name of the statement the formula comes from.
    pub fn anchor(self) -> &'static str {
        match self {
            FormulaId::WeilHeight => "Weil height of a rational number",
            FormulaId::BOfJ => "denominator part of the height of j",
            FormulaId::FaltingsInterval => "Faltings height versus h(j)/12",
            FormulaId::FaltingsFromTau => "Faltings height from the period q-expansion",
            FormulaId::MertensRatio => "effective Mertens product over the primes dividing N",
            FormulaId::LambertW => "principal branch of Lambert W",
            FormulaId::LwUpper => "lower bound log x - log log x for W(x)",
            FormulaId::CartanPowerGeneral => "Cartan prime power bound from the denominator of j",
            FormulaId::CartanPowerCoprimeRamification => {
                "Cartan prime power bound, ramification prime to the level"
            }
            FormulaId::CartanPowerQ => "Cartan prime power bound over Q in terms of b(j)",
            FormulaId::LambdaNonintegral => "product of Cartan prime powers, non-integral j",
            FormulaId::LambdaNonintegralQ => "product of Cartan prime powers over Q, non-integral j",
            FormulaId::EffisoMaxLambda => "effective surjectivity inequality",
            FormulaId::Delta => "slowly decaying exponent delta",
            FormulaId::LambdaHeight => "product of Cartan prime powers in terms of the Faltings height",
            FormulaId::LambdaHeightRefined => "refined product bound in terms of the Faltings height",
            FormulaId::AdelicHeight => "adelic index bound in terms of the Faltings height",
            FormulaId::AdelicHeightRefined => "refined adelic index bound in terms of the Faltings height",
            FormulaId::AdelicConductor => "adelic index bound in terms of the conductor",
            FormulaId::PrimeNonzeroTrace => "small prime of bad reduction with nonzero trace",
            FormulaId::LargePrimeProduct => "product of the large Cartan primes in terms of the conductor",
            FormulaId::CaseA => "index bound when no large prime has full normaliser image",
            FormulaId::CaseAAbsorbed => "index bound with the mod 7 factor absorbed",
            FormulaId::CaseB => "index bound when some large prime has full normaliser image",
            FormulaId::PipelineHeight => "case bound composed with the height bound on the Cartan product",
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormulaId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FormulaId::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown formula id {s}")))
    }
}

/// A formula value together with its inputs, for JSON output.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub formula_id: FormulaId,
    pub inputs: BTreeMap<String, String>,
    #[serde(flatten)]
    pub result: RealBound,
    pub paper_anchor: &'static str,
}

impl BoundReport {
    pub fn new(formula_id: FormulaId, inputs: &[(&str, String)], result: RealBound) -> Self {
        BoundReport {
            formula_id,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            result,
            paper_anchor: formula_id.anchor(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.result.to_f64()
    }
}

fn parse_factor_product(s: &str) -> Result<Integer> {
    let mut acc = Integer::from(1);
    for factor in s.split('*') {
        let factor = factor.trim();
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => (b.trim(), e.trim().parse::<u32>().map_err(|e| Error::Parse(e.to_string()))?),
            None => (factor, 1),
        };
        let b = Integer::from_str(base).map_err(|e| Error::Parse(format!("{base}: {e}")))?;
        acc *= b.pow(exp);
    }
    Ok(acc)
}

/// Parses `a/b`, a plain integer, or products of powers such as `-2^15*7^5/3^13`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (num, den) = match body.split_once('/') {
        Some((a, b)) => (parse_factor_product(a)?, parse_factor_product(b)?),
        None => (parse_factor_product(body)?, Integer::from(1)),
    };
    if den == 0 {
        return Err(Error::Parse("zero denominator".into()));
    }
    let r = Rational::from((num, den));
    Ok(if neg { -r } else { r })
}

fn log_integer(x: &Integer) -> Interval {
    Interval::from_integer(x).ln()
}

fn height_interval(j: &Rational) -> Interval {
    let a = j.numer().clone().abs();
    let b = j.denom();
    let m = if a > *b { a } else { b.clone() };
    log_integer(&m)
}

/// h(a/b) = log max(|a|, |b|).
pub fn weil_height(j: &Rational, rounding: Rounding) -> RealBound {
    RealBound::from_interval(&height_interval(j), rounding)
}

/// b(j) = h(j) - log max(1, |j|), which is log of the reduced denominator.
pub fn b_of_j(j: &Rational, rounding: Rounding) -> RealBound {
    RealBound::from_interval(&log_integer(j.denom()), rounding)
}

/// Enclosure of h(j)/12 plus the correction for the applicable |j| regime.
pub fn faltings_enclosure(j: &Rational) -> Interval {
    let h12 = height_interval(j).div(&Interval::from_int(12));
    if j.clone().abs() > 3500 {
        let log_abs = log_integer(&j.numer().clone().abs()).sub(&log_integer(j.denom()));
        let centre = h12.sub(&log_abs.ln().div(&Interval::from_int(2)));
        Interval {
            lo: centre.add(&Interval::ratio(-406, 1000)).lo,
            hi: centre.add(&Interval::ratio(159, 1000)).hi,
        }
    } else {
        Interval {
            lo: h12.add(&Interval::ratio(-1429, 1000)).lo,
            hi: h12.add(&Interval::ratio(-135, 1000)).hi,
        }
    }
}

/// Two-sided estimate for the stable Faltings height: (lower rounded down, upper rounded up).
pub fn faltings_interval(j: &Rational) -> (RealBound, RealBound) {
    let iv = faltings_enclosure(j);
    (RealBound::lower(&iv), RealBound::upper(&iv))
}

/// Faltings height from tau in the fundamental domain and j = j(tau), q-series
/// truncated once |q|^n drops below 1e-30.
pub fn faltings_from_tau(tau_re: f64, tau_im: f64, j: &Rational) -> Result<RealBound> {
    faltings_from_tau_with_cutoff(tau_re, tau_im, j, 1e-30)
}

pub fn faltings_from_tau_with_cutoff(tau_re: f64, tau_im: f64, j: &Rational, cutoff: f64) -> Result<RealBound> {
    const SLACK: f64 = 1e-12;
    if !(tau_im > 0.0 && tau_re.abs() <= 0.5 + SLACK && tau_re * tau_re + tau_im * tau_im >= 1.0 - SLACK) {
        return Err(Error::DomainError(format!("tau = {tau_re} + {tau_im}i is outside the fundamental domain")));
    }
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(Error::DomainError("cutoff must lie in (0, 1)".into()));
    }
    let f = |x: f64| Float::with_val(PREC, x);
    let two_pi = Float::with_val(PREC, rug::float::Constant::Pi) * 2u32;
    // -log|q|
    let minus_log_q = Float::with_val(PREC, &two_pi * f(tau_im));
    let r = Float::with_val(PREC, (-minus_log_q.clone()).exp_ref());
    let mut sum = f(0.0);
    let mut rn = r.clone();
    let mut n = 1u32;
    while rn >= cutoff {
        let angle = Float::with_val(PREC, &two_pi * f(tau_re)) * n;
        let term = Float::with_val(PREC, 1) - Float::with_val(PREC, &rn * angle.cos()) * 2u32
            + Float::with_val(PREC, rn.square_ref());
        sum += term.ln() / 2u32;
        rn *= &r;
        n += 1;
    }
    let log_den = Float::with_val(PREC, Float::with_val(PREC, j.denom()).ln_ref());
    let twelve_f = log_den + &minus_log_q - Float::with_val(PREC, rug::float::Constant::Log2) * 6u32
        - Float::with_val(PREC, minus_log_q.ln_ref()) * 6u32
        - sum * 24u32;
    Ok(RealBound::nearest(twelve_f / 12u32))
}

/// 6 e^gamma / pi^2.
pub fn mertens_constant() -> Interval {
    let pi = Interval::pi();
    Interval::from_int(6).mul(&Interval::euler().exp()).div(&pi.mul(&pi))
}

fn mertens_lhs(primes: &[u64]) -> Rational {
    let mut num = Integer::from(1);
    let mut den = Integer::from(1);
    for &p in primes {
        num *= p + 1;
        den *= p;
    }
    Rational::from((num, den))
}

fn mertens_rhs(log_n: &Interval) -> Interval {
    mertens_constant().mul(&Interval::from_int(1).add(&log_n.ln()))
}

fn mertens_guard(n: u64) -> Result<()> {
    if n <= 6 {
        return Err(Error::DomainGuard(format!("N = {n} must exceed 6")));
    }
    Ok(())
}

/// Certified check of prod_{p | N} (1 + 1/p) < 6 e^gamma/pi^2 (1 + log log N):
/// exact left side against the right side rounded down.
pub fn mertens_check(n: u64) -> Result<bool> {
    mertens_guard(n)?;
    let lhs = mertens_lhs(&prime_factors(n));
    let rhs = mertens_rhs(&Interval::from_int(n as i64).ln());
    Ok(rhs.lo > lhs)
}

/// prod_{p | N} (1 + 1/p) / (1 + log log N), rounded up.
pub fn mertens_ratio(n: u64) -> Result<RealBound> {
    mertens_guard(n)?;
    let lhs = Interval::from_rational(&mertens_lhs(&prime_factors(n)));
    let denom = Interval::from_int(1).add(&Interval::from_int(n as i64).ln().ln());
    Ok(RealBound::upper(&lhs.div(&denom)))
}

fn smallest_prime_factor_sieve(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut k = i;
            while k <= limit {
                if spf[k] == 0 {
                    spf[k] = i as u32;
                }
                k += i;
            }
        }
    }
    spf
}

/// First N in [lo, hi] where the certified check fails, if any.
pub fn mertens_scan_range(lo: u64, hi: u64) -> Result<Option<u64>> {
    mertens_guard(lo)?;
    if hi < lo {
        return Ok(None);
    }
    let spf = smallest_prime_factor_sieve(hi as usize);
    let constant = mertens_constant();
    let failure = (lo..=hi).into_par_iter().filter(|&n| {
        let mut primes = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = spf[m] as usize;
            primes.push(p as u64);
            while m % p == 0 {
                m /= p;
            }
        }
        let lhs = mertens_lhs(&primes);
        let rhs = constant.mul(&Interval::from_int(1).add(&Interval::from_int(n as i64).ln().ln()));
        !(rhs.lo > lhs)
    });
    Ok(failure.min())
}

/// The first `k` primes.
pub fn first_primes(k: usize) -> Vec<u64> {
    let mut limit = 32usize;
    loop {
        let spf = smallest_prime_factor_sieve(limit);
        let primes: Vec<u64> = (2..=limit).filter(|&i| spf[i] as usize == i).map(|i| i as u64).take(k).collect();
        if primes.len() == k {
            return primes;
        }
        limit *= 2;
    }
}

/// First k in 3..=k_max for which the check fails at the primorial N_k.
pub fn mertens_primorial_scan(k_max: usize) -> Option<usize> {
    let primes = first_primes(k_max.max(3));
    let mut log_n = Interval::from_int(0);
    let mut lhs = Rational::from(1);
    for (i, &p) in primes.iter().enumerate() {
        log_n = log_n.add(&Interval::from_int(p as i64).ln());
        lhs *= Rational::from((p + 1, p));
        let k = i + 1;
        if k >= 3 && k <= k_max && !(mertens_rhs(&log_n).lo > lhs) {
            return Some(k);
        }
    }
    None
}

/// Principal branch W0(x) by Halley iteration.
pub fn lambert_w(x: f64) -> Result<RealBound> {
    let xf = Float::with_val(PREC, x);
    let e = Float::with_val(PREC, 1).exp();
    // e x + 1 >= 0
    let ex1 = Float::with_val(PREC, &e * &xf) + 1u32;
    if ex1 < 0 {
        return Err(Error::DomainError(format!("W({x}) is undefined below -1/e")));
    }
    if ex1 < 1e-30 {
        return Ok(RealBound::nearest(Float::with_val(PREC, -1)));
    }
    let mut w = if x < 0.0 {
        let p = Float::with_val(PREC, ex1 * 2u32).sqrt();
        Float::with_val(PREC, -1) + &p - Float::with_val(PREC, p.square_ref()) / 3u32
    } else if x < 3.0 {
        Float::with_val(PREC, &xf + 1u32).ln() * 0.75f64
    } else {
        let l = Float::with_val(PREC, xf.ln_ref());
        let ll = Float::with_val(PREC, l.ln_ref());
        l - ll
    };
    for _ in 0..200 {
        let ew = Float::with_val(PREC, w.exp_ref());
        let f = Float::with_val(PREC, &w * &ew) - &xf;
        let wp1 = Float::with_val(PREC, &w + 1u32);
        if wp1 == 0 {
            break;
        }
        let denom = Float::with_val(PREC, &ew * &wp1)
            - Float::with_val(PREC, &w + 2u32) * &f / (Float::with_val(PREC, &wp1 * 2u32));
        let step = f / denom;
        w -= &step;
        let scale = Float::with_val(PREC, w.abs_ref()) + 1u32;
        if Float::with_val(PREC, step.abs_ref()) <= scale * 1e-40f64 {
            break;
        }
    }
    Ok(RealBound::nearest(w))
}

fn require_above_e(x: &Interval, what: &str) -> Result<()> {
    if !(x.lo > Interval::from_int(1).exp().hi) {
        return Err(Error::DomainGuard(format!("{what} must exceed e")));
    }
    Ok(())
}

/// y / (log y - log log y), valid for y > e.
fn lw_shape(y: &Interval) -> Interval {
    let l = y.ln();
    y.div(&l.sub(&l.ln()))
}

/// x / (log x - log log x), an upper bound for x / W(x) when x >= e.
pub fn lw_upper(x: f64) -> Result<RealBound> {
    let xi = Interval::point(x);
    if x < std::f64::consts::E {
        return Err(Error::DomainError(format!("x = {x} is below e")));
    }
    Ok(RealBound::upper(&lw_shape(&xi)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CartanPowerVariant {
    General,
    CoprimeRamification,
    QForm,
}

impl FromStr for CartanPowerVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Self::General),
            "coprime_ramification" => Ok(Self::CoprimeRamification),
            "q_form" | "Q_form" => Ok(Self::QForm),
            _ => Err(Error::Parse(format!("unknown variant {s}"))),
        }
    }
}

/// Upper bound for a prime power p^n with Cartan image when j is non-integral.
/// For the Q form `hj` is b(j) and `d`, `n` are ignored.
pub fn cartan_power_bound(d: u64, n: u32, hj: f64, variant: CartanPowerVariant) -> Result<RealBound> {
    let h = Interval::point(hj);
    let dh = h.mul_int(d as i64);
    match variant {
        CartanPowerVariant::General | CartanPowerVariant::CoprimeRamification => {
            if !(dh.lo > 2) {
                return Err(Error::DomainGuard("d h(j) must exceed 2".into()));
            }
        }
        CartanPowerVariant::QForm => {
            if !(hj > 10.0) {
                return Err(Error::DomainGuard("b(j) must exceed 10".into()));
            }
        }
    }
    let v = match variant {
        CartanPowerVariant::General => {
            let x = dh.mul_int(n as i64).mul(&Interval::ratio(16, 10));
            lw_shape(&x)
        }
        CartanPowerVariant::CoprimeRamification => lw_shape(&dh.add(&Interval::ratio(1116, 1000))),
        CartanPowerVariant::QForm => {
            let num = h.add(&Interval::ratio(527, 1000));
            let y = h.mul_int(2).add(&Interval::ratio(1054, 1000));
            require_above_e(&y, "2 b(j) + 1.054")?;
            let l = y.ln();
            num.div(&l.sub(&l.ln()))
        }
    };
    Ok(RealBound::upper(&v))
}

/// d h(j) / log 2.
pub fn lambda_bound_nonintegral(d: u64, hj: f64) -> RealBound {
    RealBound::upper(&Interval::point(hj).mul_int(d as i64).div(&Interval::log2()))
}

/// min(b(j)/log 2, 12 F/log 2 + 25).
pub fn lambda_bound_nonintegral_q(bj: f64, f: f64) -> RealBound {
    let l2 = Interval::log2();
    let by_b = Interval::point(bj).div(&l2);
    let by_f = Interval::point(f).mul_int(12).div(&l2).add(&Interval::from_int(25));
    RealBound::upper(&by_b.min(&by_f))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffisoVariant {
    /// Lambda < K 2^|C| d (F + 7/2 log(F+2.72) + 4 log Lambda + 5).
    NfGeneral,
    /// Lambda < K 2^|C| d (F + 3/2 log(F+2.72) + 2 log Lambda + 2.6).
    NfCartanOnly,
    /// Lambda < K 2^|C| (F + 2 log Lambda + 3/2 max(0, log Im tau) + 1.38).
    QCartanOnly,
    /// As `QCartanOnly` with 2^|C| < 2^0.627 Lambda^(log_19 2) moved to the left.
    QCartanAbsorbed,
    /// Lambda^(1 - log_19 2) < 1984 (F + (2/alpha) log Lambda + 8), alpha = 1.0144.
    Intermediate,
}

impl FromStr for EffisoVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nf_general" => Ok(Self::NfGeneral),
            "nf_cartan_only" => Ok(Self::NfCartanOnly),
            "q_cartan_only" | "Q_cartan_only" => Ok(Self::QCartanOnly),
            "q_cartan_absorbed" | "Q_cartan_absorbed" => Ok(Self::QCartanAbsorbed),
            "intermediate" => Ok(Self::Intermediate),
            _ => Err(Error::Parse(format!("unknown variant {s}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffisoParams {
    pub degree: u64,
    pub f: f64,
    pub c: u32,
    pub tau_im: f64,
    /// Use 1266.4 instead of 1454 (all Im tau >= 15/pi).
    pub refined_constant: bool,
}

impl Default for EffisoParams {
    fn default() -> Self {
        EffisoParams { degree: 1, f: 0.0, c: 0, tau_im: 1.0, refined_constant: false }
    }
}

fn log19_2() -> Interval {
    Interval::log2().div(&Interval::from_int(19).ln())
}

/// (left side, right side) of the selected inequality at Lambda.
fn effiso_sides(variant: EffisoVariant, p: &EffisoParams, lambda: &Interval) -> (Interval, Interval) {
    let k = if p.refined_constant { Interval::ratio(12664, 10) } else { Interval::from_int(1454) };
    let f = Interval::point(p.f);
    let log_l = lambda.ln();
    let two_c = Interval::from_int(2).pow(&Interval::from_int(p.c as i64));
    let log_f272 = || f.add(&Interval::ratio(272, 100)).ln();
    let tau_term = || Interval::point(p.tau_im).ln().max(&Interval::from_int(0)).mul(&Interval::ratio(3, 2));
    let absorbed_lhs = || lambda.pow(&Interval::from_int(1).sub(&log19_2()));
    match variant {
        EffisoVariant::NfGeneral => {
            let inner = f
                .add(&log_f272().mul(&Interval::ratio(7, 2)))
                .add(&log_l.mul_int(4))
                .add(&Interval::from_int(5));
            (lambda.clone(), k.mul(&two_c).mul_int(p.degree as i64).mul(&inner))
        }
        EffisoVariant::NfCartanOnly => {
            let inner = f
                .add(&log_f272().mul(&Interval::ratio(3, 2)))
                .add(&log_l.mul_int(2))
                .add(&Interval::ratio(26, 10));
            (lambda.clone(), k.mul(&two_c).mul_int(p.degree as i64).mul(&inner))
        }
        EffisoVariant::QCartanOnly => {
            let inner = f.add(&log_l.mul_int(2)).add(&tau_term()).add(&Interval::ratio(138, 100));
            (lambda.clone(), k.mul(&two_c).mul(&inner))
        }
        EffisoVariant::QCartanAbsorbed => {
            let inner = f.add(&log_l.mul_int(2)).add(&tau_term()).add(&Interval::ratio(138, 100));
            let c = Interval::from_int(2).pow(&Interval::ratio(627, 1000));
            (absorbed_lhs(), k.mul(&c).mul(&inner))
        }
        EffisoVariant::Intermediate => {
            let alpha = Interval::ratio(10144, 10000);
            let inner = f.add(&log_l.mul_int(2).div(&alpha)).add(&Interval::from_int(8));
            (absorbed_lhs(), Interval::from_int(1984).mul(&inner))
        }
    }
}

/// The selected inequality certainly fails at Lambda.
fn effiso_fails(variant: EffisoVariant, p: &EffisoParams, lambda: f64) -> bool {
    let (lhs, rhs) = effiso_sides(variant, p, &Interval::point(lambda));
    rhs.certainly_lt(&lhs)
}

/// Smallest certified Lambda at which the selected inequality fails; every
/// Lambda satisfying it lies below the returned value.
pub fn effiso_max_lambda(variant: EffisoVariant, params: &EffisoParams) -> Result<RealBound> {
    if !(params.f > -0.75) {
        return Err(Error::DomainGuard(format!("F = {} must exceed -0.75", params.f)));
    }
    if params.degree == 0 || !(params.tau_im > 0.0) {
        return Err(Error::DomainGuard("degree and Im tau must be positive".into()));
    }
    let (lhs1, rhs1) = effiso_sides(variant, params, &Interval::from_int(1));
    if !lhs1.certainly_lt(&rhs1) {
        return Err(Error::DomainGuard("right side does not exceed the left side at Lambda = 1".into()));
    }
    let mut lo = 1.0f64;
    let mut hi = 2.0f64;
    while !effiso_fails(variant, params, hi) {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::SearchExhausted);
        }
    }
    while (hi - lo) / hi > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if effiso_fails(variant, params, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(RealBound::new(Float::with_val(PREC, hi), Rounding::Up))
}

fn require_f(f: f64) -> Result<()> {
    if !(f > -0.75) {
        return Err(Error::DomainGuard(format!("F = {f} must exceed -0.75")));
    }
    Ok(())
}

/// delta(x) = 1 / (log(log(x + 40) + 7.6) - 0.903).
pub fn delta_interval(x: f64) -> Result<Interval> {
    require_f(x)?;
    let inner = Interval::point(x).add(&Interval::from_int(40)).ln().add(&Interval::ratio(76, 10)).ln();
    Ok(Interval::from_int(1).div(&inner.sub(&Interval::ratio(903, 1000))))
}

pub fn delta(x: f64) -> Result<RealBound> {
    Ok(RealBound::upper(&delta_interval(x)?))
}

fn lambda_height_iv(f: f64) -> Interval {
    Interval::from_int(21000).mul(&Interval::point(f).add(&Interval::from_int(40)).pow(&Interval::ratio(1308, 1000)))
}

/// 21000 (F + 40)^1.308.
pub fn lambda_bound_height(f: f64) -> Result<RealBound> {
    require_f(f)?;
    Ok(RealBound::upper(&lambda_height_iv(f)))
}

/// 14400 (F + 40)^(0.907 delta(F)) (F + 22.5).
pub fn lambda_bound_height_refined(f: f64) -> Result<RealBound> {
    let d = delta_interval(f)?;
    let fi = Interval::point(f);
    let v = Interval::from_int(14400)
        .mul(&fi.add(&Interval::from_int(40)).pow(&d.mul(&Interval::ratio(907, 1000))))
        .mul(&fi.add(&Interval::ratio(225, 10)));
    Ok(RealBound::upper(&v))
}

pub(crate) fn adelic_height_iv(f: f64) -> Interval {
    Interval::ratio(95, 1)
        .mul(&Interval::from_int(10).pow(&Interval::from_int(19)))
        .mul(&Interval::point(f).add(&Interval::from_int(40)).pow(&Interval::ratio(442, 100)))
}

/// 9.5e20 (F + 40)^4.42.
pub fn adelic_bound_height(f: f64) -> Result<BoundReport> {
    require_f(f)?;
    Ok(BoundReport::new(FormulaId::AdelicHeight, &[("F", f.to_string())], RealBound::upper(&adelic_height_iv(f))))
}

/// 3.4e20 (F + 22.5)^(3 + 4.158 delta(F)).
pub fn adelic_bound_height_refined(f: f64) -> Result<BoundReport> {
    let d = delta_interval(f)?;
    let e = Interval::from_int(3).add(&d.mul(&Interval::ratio(4158, 1000)));
    let v = Interval::ratio(34, 1)
        .mul(&Interval::from_int(10).pow(&Interval::from_int(19)))
        .mul(&Interval::point(f).add(&Interval::ratio(225, 10)).pow(&e));
    Ok(BoundReport::new(FormulaId::AdelicHeightRefined, &[("F", f.to_string())], RealBound::upper(&v)))
}

fn conductor_guard(n: u64) -> Result<Vec<u64>> {
    if n <= 6 {
        return Err(Error::DomainGuard(format!("N = {n} must exceed 6")));
    }
    let ps = prime_factors(n);
    if ps.iter().product::<u64>() != n {
        return Err(Error::NotSquarefree(n));
    }
    Ok(ps)
}

/// sqrt(1 + log log N).
fn loglog_root(n: u64) -> Interval {
    Interval::from_int(1).add(&Interval::from_int(n as i64).ln().ln()).sqrt()
}

/// 2488320 (51 N (1 + log log N)^(1/2))^(3 omega(N)).
pub fn adelic_bound_conductor(n: u64) -> Result<BoundReport> {
    let omega = conductor_guard(n)?.len() as i64;
    let base = Interval::from_int(51 * n as i64).mul(&loglog_root(n));
    let v = Interval::from_int(2488320).mul(&base.pow(&Interval::from_int(3 * omega)));
    Ok(BoundReport::new(
        FormulaId::AdelicConductor,
        &[("N", n.to_string()), ("omega", omega.to_string())],
        RealBound::upper(&v),
    ))
}

/// Bound on a prime of bad reduction with nonzero trace: N(N+1)/6 for prime N,
/// else 312 N^2 (1 + log log N).
pub fn prime_with_nonzero_trace_bound(n: u64) -> Result<RealBound> {
    conductor_guard(n)?;
    let v = if is_prime(n) {
        Interval::from_rational(&Rational::from((n * (n + 1), 6u64)))
    } else {
        let ni = Interval::from_int(n as i64);
        Interval::from_int(312).mul(&ni).mul(&ni).mul(&Interval::from_int(1).add(&ni.ln().ln()))
    };
    Ok(RealBound::upper(&v))
}

/// Bound on the product of the large Cartan primes. Integral j: sqrt(2N(N+1)/3)
/// for prime N, else (35.33 N (1 + log log N)^(1/2))^omega(N). Non-integral j: N^2/4 - 1.
pub fn large_prime_product_bound(n: u64, j_integral: bool) -> Result<RealBound> {
    let omega = conductor_guard(n)?.len() as i64;
    let v = if !j_integral {
        Interval::from_rational(&(Rational::from((n * n, 4u64)) - 1u32))
    } else if is_prime(n) {
        Interval::from_rational(&Rational::from((2 * n * (n + 1), 3u64))).sqrt()
    } else {
        let base = Interval::ratio(3533, 100).mul_int(n as i64).mul(&loglog_root(n));
        base.pow(&Interval::from_int(omega))
    };
    Ok(RealBound::upper(&v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_products() {
        assert_eq!(parse_rational("2^15*7^5").unwrap(), Rational::from(32768 * 16807));
        assert_eq!(parse_rational("-17^2*101^3/2").unwrap(), Rational::from((-289i64 * 1030301, 2)));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn formula_ids_round_trip() {
        for id in FormulaId::ALL {
            assert_eq!(id.as_str().parse::<FormulaId>().unwrap(), id);
            assert!(!id.anchor().is_empty());
        }
    }

    #[test]
    fn bisection_brackets_the_crossing() {
        let p = EffisoParams { f: 1.0, ..Default::default() };
        let l = effiso_max_lambda(EffisoVariant::QCartanOnly, &p).unwrap().to_f64();
        assert!(effiso_fails(EffisoVariant::QCartanOnly, &p, l));
        assert!(!effiso_fails(EffisoVariant::QCartanOnly, &p, l * (1.0 - 1e-6)));
    }
}
