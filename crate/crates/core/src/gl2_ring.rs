//! Residues mod p^n, 2x2 matrices over Z/p^n and the unramified quadratic
//! extension (Z/p^n)[sqrt(eps)].

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MAX_MODULUS: u32 = 1 << 16;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// The ring Z/p^n with p prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimePower {
    p: u32,
    n: u32,
    modulus: u32,
}

impl PrimePower {
    pub fn new(p: u32, n: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if n == 0 {
            return Err(Error::ZeroLevel);
        }
        let m = (p as u128).checked_pow(n).unwrap_or(u128::MAX);
        if m > MAX_MODULUS as u128 {
            return Err(Error::ModulusTooLarge(m));
        }
        Ok(PrimePower { p, n, modulus: m as u32 })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Same prime, level `m`.
    pub fn at_level(&self, m: u32) -> Result<Self> {
        PrimePower::new(self.p, m)
    }

    pub fn reduce(&self, x: i64) -> u32 {
        x.rem_euclid(self.modulus as i64) as u32
    }

    pub fn add(&self, x: u32, y: u32) -> u32 {
        ((x as u64 + y as u64) % self.modulus as u64) as u32
    }

    pub fn sub(&self, x: u32, y: u32) -> u32 {
        ((x as u64 + self.modulus as u64 - y as u64) % self.modulus as u64) as u32
    }

    pub fn neg(&self, x: u32) -> u32 {
        self.sub(0, x)
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        ((x as u64 * y as u64) % self.modulus as u64) as u32
    }

    pub fn pow(&self, x: u32, mut e: u64) -> u32 {
        let mut base = x % self.modulus;
        let mut acc = 1 % self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn is_unit(&self, x: u32) -> bool {
        x % self.p != 0
    }

    /// Inverse by extended Euclid.
    pub fn inv(&self, x: u32) -> Result<u32> {
        let m = self.modulus as i64;
        let (mut r0, mut r1) = (m, (x as i64).rem_euclid(m));
        let (mut s0, mut s1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        if r0 != 1 {
            return Err(Error::NonUnit(format!("{x} mod {m}")));
        }
        Ok(s0.rem_euclid(m) as u32)
    }

    /// Number of units, p^(n-1)(p-1).
    pub fn unit_count(&self) -> u64 {
        (self.modulus / self.p) as u64 * (self.p as u64 - 1)
    }

    /// |GL2(Z/p^n)| = p^(4(n-1)) (p^2-1)(p^2-p).
    pub fn gl2_order(&self) -> u64 {
        let p = self.p as u64;
        p.pow(4 * (self.n - 1)) * (p * p - 1) * (p * p - p)
    }

    /// Least positive quadratic non-residue mod p.
    pub fn eps(&self) -> Result<u32> {
        least_nonresidue(self.p)
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.n)
    }
}

impl FromStr for PrimePower {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected p^n, got {s:?}"));
        let (p, n) = match s.trim().split_once('^') {
            Some((p, n)) => (p.trim(), n.trim()),
            None => (s.trim(), "1"),
        };
        PrimePower::new(p.parse().map_err(|_| bad())?, n.parse().map_err(|_| bad())?)
    }
}

pub fn least_nonresidue(p: u32) -> Result<u32> {
    if p == 2 || !is_prime(p as u64) {
        return Err(Error::Unsupported(format!("least non-residue needs an odd prime, got {p}")));
    }
    let p64 = p as u64;
    let squares: std::collections::HashSet<u64> = (1..p64).map(|x| x * x % p64).collect();
    Ok((2..p).find(|k| !squares.contains(&(*k as u64))).expect("odd prime has a non-residue"))
}

/// A 2x2 matrix (a, b; c, d) over Z/p^n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    ctx: PrimePower,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl Mat2 {
    pub fn new(ctx: PrimePower, a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2 { ctx, a: ctx.reduce(a), b: ctx.reduce(b), c: ctx.reduce(c), d: ctx.reduce(d) }
    }

    pub fn identity(ctx: PrimePower) -> Self {
        Mat2::scalar(ctx, 1)
    }

    pub fn scalar(ctx: PrimePower, s: i64) -> Self {
        Mat2::new(ctx, s, 0, 0, s)
    }

    pub fn ctx(&self) -> PrimePower {
        self.ctx
    }

    pub fn entries(&self) -> [u32; 4] {
        [self.a, self.b, self.c, self.d]
    }

    fn check(&self, other: &Mat2) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch(self.ctx.to_string(), other.ctx.to_string()));
        }
        Ok(())
    }

    pub fn mul(&self, y: &Mat2) -> Result<Mat2> {
        self.check(y)?;
        Ok(self.mul_unchecked(y))
    }

    /// Product for callers that already know the contexts agree.
    pub fn mul_unchecked(&self, y: &Mat2) -> Mat2 {
        let m = self.ctx.modulus as u64;
        let (a, b, c, d) = (self.a as u64, self.b as u64, self.c as u64, self.d as u64);
        let (e, f, g, h) = (y.a as u64, y.b as u64, y.c as u64, y.d as u64);
        Mat2 {
            ctx: self.ctx,
            a: ((a * e + b * g) % m) as u32,
            b: ((a * f + b * h) % m) as u32,
            c: ((c * e + d * g) % m) as u32,
            d: ((c * f + d * h) % m) as u32,
        }
    }

    pub fn add(&self, y: &Mat2) -> Result<Mat2> {
        self.check(y)?;
        let k = self.ctx;
        Ok(Mat2 { ctx: k, a: k.add(self.a, y.a), b: k.add(self.b, y.b), c: k.add(self.c, y.c), d: k.add(self.d, y.d) })
    }

    pub fn sub(&self, y: &Mat2) -> Result<Mat2> {
        self.check(y)?;
        let k = self.ctx;
        Ok(Mat2 { ctx: k, a: k.sub(self.a, y.a), b: k.sub(self.b, y.b), c: k.sub(self.c, y.c), d: k.sub(self.d, y.d) })
    }

    pub fn scale(&self, s: u32) -> Mat2 {
        let k = self.ctx;
        Mat2 { ctx: k, a: k.mul(self.a, s), b: k.mul(self.b, s), c: k.mul(self.c, s), d: k.mul(self.d, s) }
    }

    pub fn det(&self) -> u32 {
        let k = self.ctx;
        k.sub(k.mul(self.a, self.d), k.mul(self.b, self.c))
    }

    pub fn trace(&self) -> u32 {
        self.ctx.add(self.a, self.d)
    }

    /// (trace, det), so that X^2 - tr X + det is the characteristic polynomial.
    pub fn char_poly(&self) -> (u32, u32) {
        (self.trace(), self.det())
    }

    pub fn is_invertible(&self) -> bool {
        self.ctx.is_unit(self.det())
    }

    /// Adjugate times det^-1.
    pub fn inverse(&self) -> Result<Mat2> {
        let k = self.ctx;
        let di = k.inv(self.det()).map_err(|_| Error::NonUnit(format!("matrix {self} mod {}", k.modulus)))?;
        Ok(Mat2 {
            ctx: k,
            a: k.mul(self.d, di),
            b: k.mul(k.neg(self.b), di),
            c: k.mul(k.neg(self.c), di),
            d: k.mul(self.a, di),
        })
    }

    pub fn pow(&self, mut e: u64) -> Mat2 {
        let mut base = *self;
        let mut acc = Mat2::identity(self.ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    /// g^-1 x g.
    pub fn conjugate_by(&self, g: &Mat2) -> Result<Mat2> {
        Ok(g.inverse()?.mul(self)?.mul_unchecked(g))
    }

    pub fn reduce_level(&self, m: u32) -> Result<Mat2> {
        if m == 0 || m > self.ctx.n {
            return Err(Error::LevelOutOfRange { level: m, max: self.ctx.n });
        }
        let k = self.ctx.at_level(m)?;
        Ok(Mat2::new(k, self.a as i64, self.b as i64, self.c as i64, self.d as i64))
    }

    /// Same integer entries read in a context with the same prime (lifts or reduces).
    pub fn lift_to(&self, ctx: PrimePower) -> Result<Mat2> {
        if ctx.p != self.ctx.p {
            return Err(Error::ContextMismatch(self.ctx.to_string(), ctx.to_string()));
        }
        Ok(Mat2::new(ctx, self.a as i64, self.b as i64, self.c as i64, self.d as i64))
    }

    pub fn is_identity(&self) -> bool {
        self.a == 1 % self.ctx.modulus && self.d == self.a && self.b == 0 && self.c == 0
    }

    pub fn is_scalar(&self) -> bool {
        self.b == 0 && self.c == 0 && self.a == self.d
    }

    /// Four 16-bit lanes, a in the low lane.
    pub fn encode(&self) -> u64 {
        self.a as u64 | (self.b as u64) << 16 | (self.c as u64) << 32 | (self.d as u64) << 48
    }

    pub fn decode(ctx: PrimePower, code: u64) -> Mat2 {
        Mat2 {
            ctx,
            a: (code & 0xffff) as u32,
            b: (code >> 16 & 0xffff) as u32,
            c: (code >> 32 & 0xffff) as u32,
            d: (code >> 48 & 0xffff) as u32,
        }
    }

    /// Mixed-radix index in [0, modulus^4).
    pub fn dense_index(&self) -> usize {
        let m = self.ctx.modulus as usize;
        self.a as usize + m * (self.b as usize + m * (self.c as usize + m * self.d as usize))
    }

    pub fn parse(ctx: PrimePower, s: &str) -> Result<Mat2> {
        let bad = || Error::Parse(format!("expected \"a,b;c,d\", got {s:?}"));
        let rows: Vec<&str> = s.trim().split(';').collect();
        if rows.len() != 2 {
            return Err(bad());
        }
        let mut v = Vec::with_capacity(4);
        for r in rows {
            for x in r.split(',') {
                v.push(x.trim().parse::<i64>().map_err(|_| bad())?);
            }
        }
        if v.len() != 4 {
            return Err(bad());
        }
        Ok(Mat2::new(ctx, v[0], v[1], v[2], v[3]))
    }

    /// Every matrix over the context with unit determinant, in index order.
    pub fn all_invertible(ctx: PrimePower) -> impl Iterator<Item = Mat2> {
        let m = ctx.modulus as u64;
        (0..m.pow(4)).filter_map(move |i| {
            let x = Mat2::new(ctx, (i % m) as i64, (i / m % m) as i64, (i / m / m % m) as i64, (i / m / m / m) as i64);
            x.is_invertible().then_some(x)
        })
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{};{},{}", self.a, self.b, self.c, self.d)
    }
}

/// re + im*sqrt(eps) in (Z/p^n)[x]/(x^2 - eps), eps the least non-residue mod p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadResidue {
    ctx: PrimePower,
    eps: u32,
    pub re: u32,
    pub im: u32,
}

impl QuadResidue {
    pub fn new(ctx: PrimePower, re: i64, im: i64) -> Result<Self> {
        Ok(QuadResidue { ctx, eps: ctx.eps()?, re: ctx.reduce(re), im: ctx.reduce(im) })
    }

    pub fn ctx(&self) -> PrimePower {
        self.ctx
    }

    pub fn eps(&self) -> u32 {
        self.eps
    }

    fn with(&self, re: u32, im: u32) -> Self {
        QuadResidue { re, im, ..*self }
    }

    pub fn embed(&self, x: u32) -> Self {
        self.with(x % self.ctx.modulus, 0)
    }

    pub fn add(&self, y: &Self) -> Self {
        let k = self.ctx;
        self.with(k.add(self.re, y.re), k.add(self.im, y.im))
    }

    pub fn sub(&self, y: &Self) -> Self {
        let k = self.ctx;
        self.with(k.sub(self.re, y.re), k.sub(self.im, y.im))
    }

    pub fn mul(&self, y: &Self) -> Self {
        let k = self.ctx;
        let re = k.add(k.mul(self.re, y.re), k.mul(self.eps, k.mul(self.im, y.im)));
        let im = k.add(k.mul(self.re, y.im), k.mul(self.im, y.re));
        self.with(re, im)
    }

    pub fn conj(&self) -> Self {
        self.with(self.re, self.ctx.neg(self.im))
    }

    /// re^2 - eps im^2.
    pub fn norm(&self) -> u32 {
        let k = self.ctx;
        k.sub(k.mul(self.re, self.re), k.mul(self.eps, k.mul(self.im, self.im)))
    }

    pub fn inverse(&self) -> Result<Self> {
        let ni = self.ctx.inv(self.norm()).map_err(|_| Error::NonUnit(self.to_string()))?;
        let c = self.conj();
        let k = self.ctx;
        Ok(self.with(k.mul(c.re, ni), k.mul(c.im, ni)))
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn reduce_level(&self, m: u32) -> Result<Self> {
        if m == 0 || m > self.ctx.n {
            return Err(Error::LevelOutOfRange { level: m, max: self.ctx.n });
        }
        QuadResidue::new(self.ctx.at_level(m)?, self.re as i64, self.im as i64)
    }
}

impl PartialOrd for QuadResidue {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadResidue {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.ctx.modulus, self.re, self.im).cmp(&(other.ctx.modulus, other.re, other.im))
    }
}

impl fmt::Display for QuadResidue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.re, self.im, self.eps)
    }
}
