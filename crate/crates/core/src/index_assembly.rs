//! Assembly of local indices and bounds on the product of Cartan prime powers
//! into adelic index bounds, and the tables of known j-invariants.

use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::analytic_bounds::{
    adelic_height_iv, lambda_bound_height, parse_rational, BoundReport, FormulaId, RealBound,
};
use crate::error::{Error, Result};
use crate::gl2_ring::is_prime;
use crate::interval::Interval;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PAdicIndexFact {
    pub p: u64,
    pub n: u32,
    pub index_candidates: Vec<u64>,
    pub upper: u64,
    /// At p = 3 the candidates assume the mod 3 image is the whole normaliser.
    pub requires_full_normaliser: bool,
}

/// Possible indices [GL2(Z_p) : Im] when n is the largest level with image in
/// the non-split Cartan normaliser, and the upper bound (p-1)/(2p) p^(3n).
pub fn padic_index(p: u64, n: u32) -> Result<PAdicIndexFact> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    let pow = |e: u32| {
        p.checked_pow(e).ok_or_else(|| Error::DomainGuard(format!("{p}^{e} overflows")))
    };
    let index_candidates = if n == 1 {
        let mut c = vec![(p * p - p) / 2, (pow(3)? - p * p) / 2];
        if p == 5 {
            c.push(30);
        }
        c
    } else {
        vec![(p - 1) * pow(2 * n - 1)? / 2]
    };
    let upper = (p - 1) * pow(3 * n - 1)? / 2;
    Ok(PAdicIndexFact { p, n, index_candidates, upper, requires_full_normaliser: p == 3 })
}

/// The 2-adic index divides this without a rational 2-isogeny.
pub fn two_adic_upper() -> u64 {
    32
}

/// 3-adic index bound when the mod 3 representation is surjective.
pub fn three_adic_surjective_upper() -> u64 {
    27
}

/// Index of the exceptional image at 5.
pub fn five_exceptional() -> u64 {
    5
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Delta7 {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "8/3")]
    EightThirds,
    #[serde(rename = "8")]
    Eight,
}

impl Delta7 {
    pub fn value(self) -> Rational {
        match self {
            Delta7::One => Rational::from(1),
            Delta7::EightThirds => Rational::from((8, 3)),
            Delta7::Eight => Rational::from(8),
        }
    }

    /// min(Delta7, 8/3).
    pub fn absorbed(self) -> Delta7 {
        self.min(Delta7::EightThirds)
    }
}

impl fmt::Display for Delta7 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Delta7::One => "1",
            Delta7::EightThirds => "8/3",
            Delta7::Eight => "8",
        })
    }
}

impl FromStr for Delta7 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Delta7::One),
            "8/3" => Ok(Delta7::EightThirds),
            "8" => Ok(Delta7::Eight),
            _ => Err(Error::Parse(format!("delta7 must be 1, 8/3 or 8, got {s}"))),
        }
    }
}

pub const CASE_A_CONSTANT: u64 = 2_488_320;

fn case_a_exact(lambda: &Integer, three_exp: u32, delta7: Delta7) -> Rational {
    let base = Integer::from(CASE_A_CONSTANT) * Integer::from(3).pow(three_exp) * lambda.clone().pow(3);
    delta7.value() * base
}

fn require_lambda(lambda: &Integer) -> Result<()> {
    if *lambda < 1 {
        return Err(Error::DomainGuard("Lambda must be at least 1".into()));
    }
    Ok(())
}

/// 2488320 Delta7 3^beta Lambda^3, exact.
pub fn compose_case_a(lambda: &Integer, beta: u32, delta7: Delta7) -> Result<BoundReport> {
    require_lambda(lambda)?;
    let v = case_a_exact(lambda, beta, delta7);
    Ok(BoundReport::new(
        FormulaId::CaseA,
        &[("lambda", lambda.to_string()), ("beta", beta.to_string()), ("delta7", delta7.to_string())],
        RealBound::upper(&Interval::from_rational(&v)),
    ))
}

/// 2488320 min(Delta7, 8/3) 3^|C_ns| Lambda^3, exact.
pub fn compose_case_a_absorbed(lambda: &Integer, c_ns: u32, delta7: Delta7) -> Result<BoundReport> {
    require_lambda(lambda)?;
    let v = case_a_exact(lambda, c_ns, delta7.absorbed());
    Ok(BoundReport::new(
        FormulaId::CaseAAbsorbed,
        &[("lambda", lambda.to_string()), ("c_ns", c_ns.to_string()), ("delta7", delta7.to_string())],
        RealBound::upper(&Interval::from_rational(&v)),
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseAComparison {
    pub lemma: BoundReport,
    pub absorbed: BoundReport,
    /// The absorbed form is smaller than the lemma form for these parameters.
    pub disagree: bool,
}

/// Both case A parameterizations side by side.
pub fn compare_case_a(lambda: &Integer, beta: u32, c_ns: u32, delta7: Delta7) -> Result<CaseAComparison> {
    let lemma = compose_case_a(lambda, beta, delta7)?;
    let absorbed = compose_case_a_absorbed(lambda, c_ns, delta7)?;
    let disagree = case_a_exact(lambda, c_ns, delta7.absorbed()) < case_a_exact(lambda, beta, delta7);
    Ok(CaseAComparison { lemma, absorbed, disagree })
}

fn case_b_iv(lambda: &Interval) -> Interval {
    Interval::ratio(43, 10)
        .mul(&Interval::from_int(10).pow(&Interval::from_int(12)))
        .mul(&lambda.mul(lambda))
}

/// 4.3e12 Lambda^2, rounded up.
pub fn compose_case_b(lambda: &Integer) -> Result<BoundReport> {
    require_lambda(lambda)?;
    Ok(BoundReport::new(
        FormulaId::CaseB,
        &[("lambda", lambda.to_string())],
        RealBound::upper(&case_b_iv(&Interval::from_integer(lambda))),
    ))
}

/// 1536 6^alpha.
pub fn entanglement_ratio_bound(alpha: u32) -> Integer {
    Integer::from(1536) * Integer::from(6).pow(alpha)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexRelation {
    Equal,
    AtMost,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KnownPoint {
    /// Factored form, parseable by `parse_rational`.
    pub j: &'static str,
    pub adelic_index: u64,
    pub relation: IndexRelation,
    pub source: &'static str,
}

impl KnownPoint {
    pub fn j_value(&self) -> Rational {
        parse_rational(self.j).expect("table entries parse")
    }
}

const CARTAN7: &str = "integral points on the non-split Cartan curve of level 7";
const CARTAN9: &str = "integral points on the non-split Cartan curve of level 9";
const S4_13: &str = "exceptional S4 image mod 13";
const EXCEPTIONAL_LIST: &str = "j-invariants excluded from the image classification";
const TWO_ADIC: &str = "exceptional 2-adic images without a rational 2-isogeny";

pub const TABLE_VERSION: u32 = 1;

pub static KNOWN_POINTS: &[KnownPoint] = &[
    KnownPoint { j: "2^3*5^3*7^5", adelic_index: 84, relation: IndexRelation::Equal, source: CARTAN7 },
    KnownPoint { j: "2^15*7^5", adelic_index: 84, relation: IndexRelation::Equal, source: CARTAN7 },
    KnownPoint { j: "2^9*17^6*19^3*29^3*149^3", adelic_index: 504, relation: IndexRelation::Equal, source: CARTAN7 },
    KnownPoint { j: "2^6*11^3*23^3*149^3*269^3", adelic_index: 504, relation: IndexRelation::Equal, source: CARTAN7 },
    KnownPoint { j: "3^3*41^3*61^3*149^3", adelic_index: 108, relation: IndexRelation::Equal, source: CARTAN9 },
    KnownPoint { j: "2^4*5*13^4*17^3/3^13", adelic_index: 182, relation: IndexRelation::Equal, source: S4_13 },
    KnownPoint { j: "-2^12*5^3*11*13^4/3^13", adelic_index: 182, relation: IndexRelation::Equal, source: S4_13 },
    KnownPoint {
        j: "2^18*3^3*13^4*127^3*139^3*157^3*283^3*929/5^13*61^13",
        adelic_index: 182,
        relation: IndexRelation::Equal,
        source: S4_13,
    },
    KnownPoint { j: "-11*131^3", adelic_index: 2736, relation: IndexRelation::AtMost, source: EXCEPTIONAL_LIST },
    KnownPoint { j: "-11^2", adelic_index: 2736, relation: IndexRelation::AtMost, source: EXCEPTIONAL_LIST },
    KnownPoint { j: "-17^2*101^3/2", adelic_index: 2736, relation: IndexRelation::AtMost, source: EXCEPTIONAL_LIST },
    KnownPoint { j: "-17*373^3/2^17", adelic_index: 2736, relation: IndexRelation::AtMost, source: EXCEPTIONAL_LIST },
    KnownPoint { j: "-7*11^3", adelic_index: 2736, relation: IndexRelation::AtMost, source: EXCEPTIONAL_LIST },
    KnownPoint { j: "-7*137^3*2083^3", adelic_index: 2736, relation: IndexRelation::AtMost, source: EXCEPTIONAL_LIST },
    KnownPoint { j: "-3*18249920^3/17^16", adelic_index: 128, relation: IndexRelation::Equal, source: TWO_ADIC },
    KnownPoint { j: "-7*1723187806080^3/79^16", adelic_index: 128, relation: IndexRelation::Equal, source: TWO_ADIC },
];

/// Indices stated without their j-invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KnownIndex {
    pub adelic_index: u64,
    pub source: &'static str,
}

pub static KNOWN_INDICES_WITHOUT_J: &[KnownIndex] = &[
    KnownIndex { adelic_index: 224, source: "exceptional 7-adic points" },
    KnownIndex { adelic_index: 200, source: "exceptional 5-adic points" },
    KnownIndex { adelic_index: 300, source: "exceptional 5-adic points" },
];

pub fn known_point_lookup(j: &Rational) -> Option<&'static KnownPoint> {
    KNOWN_POINTS.iter().find(|k| k.j_value() == *j)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Scenario {
    /// `None` means the worst case: 3^beta with beta <= log_19 Lambda, and Delta7 = 8/3.
    CaseA { beta: Option<u32>, delta7: Option<Delta7> },
    CaseB,
}

impl Scenario {
    /// Parameters behind the constant curve 9.5e20 (F+40)^4.42: integral j,
    /// so Delta7 = 1 and |C_ns| <= log_19 Lambda.
    pub fn paper_case_a() -> Self {
        Scenario::CaseA { beta: None, delta7: Some(Delta7::One) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    #[serde(flatten)]
    pub report: BoundReport,
    pub lambda_bound: RealBound,
    pub theorem_bound: RealBound,
    /// Certified: the composed value is at most theorem_bound (1 + 1e-9).
    pub dominated: bool,
}

/// Case bound evaluated at the height bound on Lambda, compared with 9.5e20 (F+40)^4.42.
pub fn full_pipeline_height(f: f64, scenario: Scenario) -> Result<PipelineReport> {
    let lambda = lambda_bound_height(f)?;
    let li = lambda.as_interval();
    let value = match scenario {
        Scenario::CaseB => case_b_iv(&li),
        Scenario::CaseA { beta, delta7 } => {
            let d7 = Interval::from_rational(&delta7.unwrap_or(Delta7::EightThirds).value());
            let three_part = match beta {
                Some(b) => Interval::from_int(3).pow(&Interval::from_int(b as i64)),
                None => li.pow(&Interval::from_int(3).ln().div(&Interval::from_int(19).ln())),
            };
            Interval::from_int(CASE_A_CONSTANT as i64).mul(&d7).mul(&three_part).mul(&li.mul(&li).mul(&li))
        }
    };
    let theorem = adelic_height_iv(f);
    let slack = theorem.mul(&Interval::from_int(1).add(&Interval::ratio(1, 1_000_000_000)));
    let dominated = value.hi <= slack.lo;
    let mut inputs = vec![("F", f.to_string())];
    match scenario {
        Scenario::CaseB => inputs.push(("case", "B".into())),
        Scenario::CaseA { beta, delta7 } => {
            inputs.push(("case", "A".into()));
            inputs.push(("beta", beta.map_or("log_19(lambda)".into(), |b| b.to_string())));
            inputs.push(("delta7", delta7.unwrap_or(Delta7::EightThirds).to_string()));
        }
    }
    Ok(PipelineReport {
        report: BoundReport::new(FormulaId::PipelineHeight, &inputs, RealBound::upper(&value)),
        lambda_bound: lambda,
        theorem_bound: RealBound::lower(&theorem),
        dominated,
    })
}
