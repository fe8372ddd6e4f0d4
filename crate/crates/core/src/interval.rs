//! Closed intervals of MPFR floats with outward rounding.

use std::cmp::Ordering;

use rug::float::{Constant, Round};
use rug::{Float, Integer, Rational};

/// Working precision in bits (about 77 significant decimal digits).
pub const PREC: u32 = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: Float,
    pub hi: Float,
}

fn down<T>(v: T) -> Float
where
    Float: rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(PREC, v, Round::Down).0
}

fn up<T>(v: T) -> Float
where
    Float: rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(PREC, v, Round::Up).0
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval { lo: Float::with_val(PREC, x), hi: Float::with_val(PREC, x) }
    }

    pub fn from_int(x: i64) -> Self {
        Interval { lo: down(x), hi: up(x) }
    }

    pub fn from_integer(x: &Integer) -> Self {
        Interval { lo: down(x), hi: up(x) }
    }

    pub fn from_rational(x: &Rational) -> Self {
        Interval { lo: down(x), hi: up(x) }
    }

    /// num / den, e.g. `ratio(406, 1000)` for 0.406.
    pub fn ratio(num: i64, den: u64) -> Self {
        Self::from_rational(&Rational::from((num, den)))
    }

    pub fn pi() -> Self {
        Interval { lo: down(Constant::Pi), hi: up(Constant::Pi) }
    }

    pub fn euler() -> Self {
        Interval { lo: down(Constant::Euler), hi: up(Constant::Euler) }
    }

    pub fn log2() -> Self {
        Interval { lo: down(Constant::Log2), hi: up(Constant::Log2) }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: down(&self.lo + &o.lo), hi: up(&self.hi + &o.hi) }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval { lo: down(&self.lo - &o.hi), hi: up(&self.hi - &o.lo) }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: Float::with_val(PREC, -&self.hi), hi: Float::with_val(PREC, -&self.lo) }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let cands = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (a, b) in cands {
            let l = down(a * b);
            let h = up(a * b);
            if lo.as_ref().map_or(true, |x| l < *x) {
                lo = Some(l);
            }
            if hi.as_ref().map_or(true, |x| h > *x) {
                hi = Some(h);
            }
        }
        Interval { lo: lo.unwrap(), hi: hi.unwrap() }
    }

    /// Panics if `o` contains zero.
    pub fn div(&self, o: &Interval) -> Interval {
        assert!(o.lo > 0 || o.hi < 0, "division by an interval containing zero");
        let recip = Interval { lo: down(1 / &o.hi), hi: up(1 / &o.lo) };
        self.mul(&recip)
    }

    pub fn mul_int(&self, k: i64) -> Interval {
        self.mul(&Interval::from_int(k))
    }

    /// Panics unless the interval is positive.
    pub fn ln(&self) -> Interval {
        assert!(self.lo > 0, "log of a non-positive interval");
        Interval { lo: down(self.lo.ln_ref()), hi: up(self.hi.ln_ref()) }
    }

    pub fn exp(&self) -> Interval {
        Interval { lo: down(self.lo.exp_ref()), hi: up(self.hi.exp_ref()) }
    }

    pub fn sqrt(&self) -> Interval {
        assert!(self.lo >= 0, "sqrt of a negative interval");
        Interval { lo: down(self.lo.sqrt_ref()), hi: up(self.hi.sqrt_ref()) }
    }

    /// self^e for a positive base.
    pub fn pow(&self, e: &Interval) -> Interval {
        self.ln().mul(e).exp()
    }

    pub fn max(&self, o: &Interval) -> Interval {
        Interval {
            lo: if self.lo > o.lo { self.lo.clone() } else { o.lo.clone() },
            hi: if self.hi > o.hi { self.hi.clone() } else { o.hi.clone() },
        }
    }

    pub fn min(&self, o: &Interval) -> Interval {
        Interval {
            lo: if self.lo < o.lo { self.lo.clone() } else { o.lo.clone() },
            hi: if self.hi < o.hi { self.hi.clone() } else { o.hi.clone() },
        }
    }

    /// Every point of self is below every point of o.
    pub fn certainly_lt(&self, o: &Interval) -> bool {
        self.hi < o.lo
    }

    pub fn width(&self) -> Float {
        up(&self.hi - &self.lo)
    }

    pub fn mid_f64(&self) -> f64 {
        Float::with_val(PREC, &self.lo + &self.hi).to_f64() / 2.0
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.lo <= x && self.hi >= x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enclosures_are_ordered() {
        let x = Interval::ratio(1, 3);
        assert!(x.lo < x.hi);
        let l = x.ln();
        assert!(l.lo < l.hi);
        assert!((l.mid_f64() - (1.0f64 / 3.0).ln()).abs() < 1e-15);
        let p = Interval::pi();
        assert!(p.width() < 1e-70);
        assert!((p.mid_f64() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn mul_handles_signs() {
        let a = Interval { lo: Float::with_val(PREC, -2), hi: Float::with_val(PREC, 3) };
        let b = Interval { lo: Float::with_val(PREC, -5), hi: Float::with_val(PREC, 1) };
        let c = a.mul(&b);
        assert_eq!(c.lo, -15);
        assert_eq!(c.hi, 10);
    }
}
