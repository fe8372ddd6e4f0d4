//! Finite subgroups of GL2(Z/p^n): closure, the Cartan families, orders,
//! indices and conjugacy search.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::gl2_ring::{Mat2, PrimePower};

pub const DEFAULT_BUDGET: u64 = 1 << 24;
pub const BUDGET_ENV: &str = "CARTAN_ADELIC_BUDGET";

/// Largest modulus for which exhaustive conjugacy search is attempted.
pub const CONJUGACY_MAX_MODULUS: u32 = 49;

const DENSE_LIMIT: u64 = 1 << 24;

/// Element cap for closures, overridable through `CARTAN_ADELIC_BUDGET`.
pub fn element_budget() -> u64 {
    std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

enum Seen {
    Dense(Vec<u64>),
    Sparse(FxHashSet<u64>),
}

impl Seen {
    fn new(ctx: PrimePower) -> Seen {
        let cells = (ctx.modulus() as u64).pow(4);
        if cells <= DENSE_LIMIT {
            Seen::Dense(vec![0; (cells as usize).div_ceil(64)])
        } else {
            Seen::Sparse(FxHashSet::default())
        }
    }

    /// Returns true if `x` was not present.
    fn insert(&mut self, x: &Mat2) -> bool {
        match self {
            Seen::Dense(bits) => {
                let i = x.dense_index();
                let (w, b) = (i / 64, 1u64 << (i % 64));
                let fresh = bits[w] & b == 0;
                bits[w] |= b;
                fresh
            }
            Seen::Sparse(set) => set.insert(x.encode()),
        }
    }
}

/// A finite subgroup of GL2(Z/p^n) with its full element list.
/// Equality compares element sets, not generators.
#[derive(Clone, Debug)]
pub struct MatGroup {
    ctx: PrimePower,
    generators: Vec<Mat2>,
    elements: Vec<u64>,
}

impl PartialEq for MatGroup {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.elements == other.elements
    }
}

impl Eq for MatGroup {}

impl MatGroup {
    pub fn ctx(&self) -> PrimePower {
        self.ctx
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    /// Sorted packed encodings.
    pub fn encodings(&self) -> &[u64] {
        &self.elements
    }

    pub fn elements(&self) -> impl Iterator<Item = Mat2> + '_ {
        let ctx = self.ctx;
        self.elements.iter().map(move |&e| Mat2::decode(ctx, e))
    }

    pub fn element(&self, i: usize) -> Mat2 {
        Mat2::decode(self.ctx, self.elements[i])
    }

    pub fn contains(&self, x: &Mat2) -> bool {
        x.ctx() == self.ctx && self.elements.binary_search(&x.encode()).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &MatGroup) -> bool {
        self.ctx == other.ctx && self.generators.iter().all(|g| other.contains(g))
    }

    /// [GL2(Z/p^n) : G], with the Lagrange divisibility check.
    pub fn index_in_gl2(&self) -> Result<u64> {
        let gl2 = self.ctx.gl2_order();
        let order = self.order();
        if order == 0 || gl2 % order != 0 {
            return Err(Error::LagrangeViolation { order, gl2 });
        }
        Ok(gl2 / order)
    }

    /// Elements of determinant one.
    pub fn sl2_part(&self) -> MatGroup {
        let ctx = self.ctx;
        let one = 1 % ctx.modulus();
        let elements: Vec<u64> = self.elements().filter(|x| x.det() == one).map(|x| x.encode()).collect();
        let generators = generating_set(ctx, &elements, 0);
        MatGroup { ctx, generators, elements }
    }

    /// Image under reduction mod p^m.
    pub fn reduce_level(&self, m: u32) -> Result<MatGroup> {
        let ctx = self.ctx.at_level(m)?;
        if m > self.ctx.n() {
            return Err(Error::LevelOutOfRange { level: m, max: self.ctx.n() });
        }
        let mut elements: Vec<u64> = self.elements().map(|x| x.lift_to(ctx).map(|y| y.encode())).collect::<Result<_>>()?;
        elements.sort_unstable();
        elements.dedup();
        let generators = self.generators.iter().map(|g| g.lift_to(ctx)).collect::<Result<_>>()?;
        Ok(MatGroup { ctx, generators, elements })
    }

    /// x^-1 G x.
    pub fn conjugate_by(&self, x: &Mat2) -> Result<MatGroup> {
        let xi = x.inverse()?;
        let mut elements: Vec<u64> = self.elements().map(|g| xi.mul_unchecked(&g).mul_unchecked(x).encode()).collect();
        elements.sort_unstable();
        let generators = self.generators.iter().map(|g| xi.mul_unchecked(g).mul_unchecked(x)).collect();
        Ok(MatGroup { ctx: self.ctx, generators, elements })
    }

    /// Subgroup cut out by a predicate that is known to define a subgroup.
    pub fn filter_subgroup(&self, keep: impl Fn(&Mat2) -> bool) -> MatGroup {
        let elements: Vec<u64> = self.elements().filter(|x| keep(x)).map(|x| x.encode()).collect();
        let generators = generating_set(self.ctx, &elements, 0);
        MatGroup { ctx: self.ctx, generators, elements }
    }

    /// Wraps a sorted, closed element list.
    pub fn from_elements(ctx: PrimePower, mut elements: Vec<u64>) -> MatGroup {
        elements.sort_unstable();
        elements.dedup();
        let generators = generating_set(ctx, &elements, 0);
        MatGroup { ctx, generators, elements }
    }
}

pub fn generate(ctx: PrimePower, gens: &[Mat2]) -> Result<MatGroup> {
    generate_with_budget(ctx, gens, element_budget())
}

/// Breadth-first closure under right multiplication by the generators.
pub fn generate_with_budget(ctx: PrimePower, gens: &[Mat2], budget: u64) -> Result<MatGroup> {
    for g in gens {
        if g.ctx() != ctx {
            return Err(Error::ContextMismatch(ctx.to_string(), g.ctx().to_string()));
        }
        if !g.is_invertible() {
            return Err(Error::NonUnit(format!("generator {g}")));
        }
    }
    let mut gens_dedup: Vec<Mat2> = Vec::new();
    for g in gens {
        if !g.is_identity() && !gens_dedup.contains(g) {
            gens_dedup.push(*g);
        }
    }
    let id = Mat2::identity(ctx);
    let mut seen = Seen::new(ctx);
    seen.insert(&id);
    let mut elements = vec![id.encode()];
    let mut head = 0;
    while head < elements.len() {
        let x = Mat2::decode(ctx, elements[head]);
        head += 1;
        for g in &gens_dedup {
            let y = x.mul_unchecked(g);
            if seen.insert(&y) {
                elements.push(y.encode());
                if elements.len() as u64 > budget {
                    return Err(Error::SizeCap(budget));
                }
            }
        }
    }
    elements.sort_unstable();
    Ok(MatGroup { ctx, generators: gens.to_vec(), elements })
}

/// A small generating set for a closed element list, picked by seeded greedy sampling.
pub fn generating_set(ctx: PrimePower, elements: &[u64], seed: u64) -> Vec<Mat2> {
    let mut order: Vec<u64> = elements.to_vec();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut gens: Vec<Mat2> = Vec::new();
    let mut current = generate_with_budget(ctx, &[], u64::MAX).expect("trivial group");
    for e in order {
        if current.order() == elements.len() as u64 {
            break;
        }
        let x = Mat2::decode(ctx, e);
        if !current.contains(&x) {
            gens.push(x);
            current = generate_with_budget(ctx, &gens, u64::MAX).expect("subgroup of a finite group");
        }
    }
    gens
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CartanKind {
    Nonsplit,
    NonsplitNormaliser,
    Split,
    SplitNormaliser,
    Borel,
}

impl CartanKind {
    pub const ALL: [CartanKind; 5] = [
        CartanKind::Nonsplit,
        CartanKind::NonsplitNormaliser,
        CartanKind::Split,
        CartanKind::SplitNormaliser,
        CartanKind::Borel,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CartanKind::Nonsplit => "nonsplit",
            CartanKind::NonsplitNormaliser => "nonsplit+",
            CartanKind::Split => "split",
            CartanKind::SplitNormaliser => "split+",
            CartanKind::Borel => "borel",
        }
    }

    /// The Cartan inside a normaliser kind.
    pub fn cartan(&self) -> CartanKind {
        match self {
            CartanKind::NonsplitNormaliser => CartanKind::Nonsplit,
            CartanKind::SplitNormaliser => CartanKind::Split,
            k => *k,
        }
    }

    pub fn normaliser(&self) -> CartanKind {
        match self {
            CartanKind::Nonsplit => CartanKind::NonsplitNormaliser,
            CartanKind::Split => CartanKind::SplitNormaliser,
            k => *k,
        }
    }
}

impl fmt::Display for CartanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CartanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CartanKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown Cartan kind {s:?}")))
    }
}

/// Membership test for the named families, without enumeration.
pub fn in_cartan(kind: CartanKind, x: &Mat2) -> Result<bool> {
    let ctx = x.ctx();
    let p = ctx.p();
    let unit = |v: u32| v % p != 0;
    Ok(match kind {
        CartanKind::Nonsplit => {
            let eps = ctx.eps()?;
            x.a == x.d && x.b == ctx.mul(eps, x.c) && (unit(x.a) || unit(x.c))
        }
        CartanKind::NonsplitNormaliser => {
            let eps = ctx.eps()?;
            let twisted = x.a == ctx.neg(x.d) && x.b == ctx.mul(eps, ctx.neg(x.c)) && (unit(x.a) || unit(x.c));
            in_cartan(CartanKind::Nonsplit, x)? || twisted
        }
        CartanKind::Split => x.b == 0 && x.c == 0 && unit(x.a) && unit(x.d),
        CartanKind::SplitNormaliser => {
            in_cartan(CartanKind::Split, x)? || (x.a == 0 && x.d == 0 && unit(x.b) && unit(x.c))
        }
        CartanKind::Borel => x.c == 0 && unit(x.a) && unit(x.d),
    })
}

/// The element sets of the named subgroups, enumerated from their parametrisations.
pub fn build_cartan(ctx: PrimePower, kind: CartanKind) -> Result<MatGroup> {
    if ctx.p() == 2 {
        return Err(Error::Unsupported("Cartan subgroups need p odd".into()));
    }
    let m = ctx.modulus() as i64;
    let p = ctx.p() as i64;
    let eps = ctx.eps()? as i64;
    let units = ctx.unit_count();
    let size = match kind {
        CartanKind::Nonsplit => ctx.modulus() as u64 * ctx.modulus() as u64 - (m / p).pow(2) as u64,
        CartanKind::NonsplitNormaliser => 2 * (ctx.modulus() as u64 * ctx.modulus() as u64 - (m / p).pow(2) as u64),
        CartanKind::Split => units * units,
        CartanKind::SplitNormaliser => 2 * units * units,
        CartanKind::Borel => units * units * m as u64,
    };
    if size > element_budget() {
        return Err(Error::SizeCap(element_budget()));
    }
    let mut elements = Vec::with_capacity(size as usize);
    match kind.cartan() {
        CartanKind::Nonsplit => {
            for a in 0..m {
                for b in 0..m {
                    if a % p == 0 && b % p == 0 {
                        continue;
                    }
                    elements.push(Mat2::new(ctx, a, eps * b, b, a).encode());
                    if kind == CartanKind::NonsplitNormaliser {
                        elements.push(Mat2::new(ctx, a, eps * b, -b, -a).encode());
                    }
                }
            }
        }
        CartanKind::Split => {
            for a in (0..m).filter(|a| a % p != 0) {
                for d in (0..m).filter(|d| d % p != 0) {
                    elements.push(Mat2::new(ctx, a, 0, 0, d).encode());
                    if kind == CartanKind::SplitNormaliser {
                        elements.push(Mat2::new(ctx, 0, a, d, 0).encode());
                    }
                }
            }
        }
        CartanKind::Borel => {
            for a in (0..m).filter(|a| a % p != 0) {
                for d in (0..m).filter(|d| d % p != 0) {
                    for b in 0..m {
                        elements.push(Mat2::new(ctx, a, b, 0, d).encode());
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(MatGroup::from_elements(ctx, elements))
}

fn unit_group_generators(ctx: PrimePower) -> Vec<u32> {
    let m = ctx.modulus();
    if ctx.p() == 2 {
        return [m - 1, 5 % m, 3 % m].into_iter().filter(|&u| u != 1 % m).collect();
    }
    let order = ctx.unit_count();
    let primitive = (2..m).find(|&g| {
        ctx.is_unit(g) && prime_factors(order).iter().all(|&q| ctx.pow(g, order / q) != 1)
    });
    primitive.into_iter().collect()
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Generators of GL2(Z/p^n): two elementary matrices and diag(u, 1) for unit generators u.
pub fn gl2_generators(ctx: PrimePower) -> Vec<Mat2> {
    let mut gens = vec![Mat2::new(ctx, 1, 1, 0, 1), Mat2::new(ctx, 1, 0, 1, 1)];
    for u in unit_group_generators(ctx) {
        gens.push(Mat2::new(ctx, u as i64, 0, 0, 1));
    }
    gens
}

pub fn full_gl2(ctx: PrimePower) -> Result<MatGroup> {
    generate(ctx, &gl2_generators(ctx))
}

/// Generators of the congruence kernel {g = I mod p^m} inside GL2(Z/p^n).
pub fn kernel_generators(ctx: PrimePower, m: u32) -> Vec<Mat2> {
    let p = ctx.p() as i64;
    let mut gens = Vec::new();
    for k in m..ctx.n() {
        let s = p.pow(k);
        gens.push(Mat2::new(ctx, 1 + s, 0, 0, 1));
        gens.push(Mat2::new(ctx, 1, s, 0, 1));
        gens.push(Mat2::new(ctx, 1, 0, s, 1));
        gens.push(Mat2::new(ctx, 1, 0, 0, 1 + s));
    }
    gens
}

/// Full preimage in GL2(Z/p^n) of a subgroup of GL2(Z/p^m).
pub fn preimage(low: &MatGroup, ctx: PrimePower) -> Result<MatGroup> {
    let m = low.ctx().n();
    if ctx.p() != low.ctx().p() || ctx.n() < m {
        return Err(Error::ContextMismatch(low.ctx().to_string(), ctx.to_string()));
    }
    let mut gens: Vec<Mat2> = low.generators().iter().map(|g| g.lift_to(ctx)).collect::<Result<_>>()?;
    gens.extend(kernel_generators(ctx, m));
    generate(ctx, &gens)
}

/// Some x with x^-1 g x in `target` for every generator g of `g_group`, searching `candidates`.
pub fn conjugate_into(
    g_group: &MatGroup,
    target: &MatGroup,
    candidates: impl IntoIterator<Item = Mat2>,
) -> Option<Mat2> {
    candidates.into_iter().find(|x| {
        let Ok(xi) = x.inverse() else { return false };
        g_group.generators().iter().all(|g| target.contains(&xi.mul_unchecked(g).mul_unchecked(x)))
    })
}

/// Brute-force search over GL2 for x with x^-1 G x = H.
pub fn is_conjugate_subgroup(g: &MatGroup, h: &MatGroup) -> Result<Option<Mat2>> {
    if g.ctx() != h.ctx() {
        return Err(Error::ContextMismatch(g.ctx().to_string(), h.ctx().to_string()));
    }
    if g.ctx().modulus() > CONJUGACY_MAX_MODULUS {
        return Err(Error::SizeCap(g.ctx().gl2_order()));
    }
    if g.order() != h.order() {
        return Ok(None);
    }
    if g == h || g.generators().iter().all(|x| h.contains(x)) {
        return Ok(Some(Mat2::identity(g.ctx())));
    }
    Ok(conjugate_into(g, h, Mat2::all_invertible(g.ctx())))
}
