//! The g_i filtration of a subgroup of GL2(Z/p^n), the V1 + V2 + V3 pieces of
//! gl2(F_p), and a finite-level verifier for the Cartan tower trichotomy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gl2_ring::{Mat2, PrimePower};
use crate::lifting::find_complement;
use crate::matgroups::{build_cartan, generate, in_cartan, CartanKind, MatGroup};

/// Coordinates (a, b, c, d) of a matrix in gl2(F_p).
pub type LieVector = [u32; 4];

/// Largest prime for which irreducibility is decided by exhaustive scan.
pub const IRREDUCIBILITY_MAX_P: u32 = 13;

/// An F_p-subspace of gl2(F_p) in reduced row-echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LieSubspace {
    p: u32,
    basis: Vec<LieVector>,
}

fn rref(p: u32, rows: &mut Vec<Vec<u32>>, width: usize) {
    let pp = p as u64;
    let mut r = 0;
    for col in 0..width {
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][col] % p != 0) else { continue };
        rows.swap(r, piv);
        let inv = PrimePower::new(p, 1).expect("prime").inv(rows[r][col]).expect("nonzero");
        for x in rows[r].iter_mut() {
            *x = (*x as u64 * inv as u64 % pp) as u32;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let f = rows[i][col] as u64;
                for j in 0..width {
                    rows[i][j] = ((rows[i][j] as u64 + pp * pp - f * rows[r][j] as u64) % pp) as u32;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
}

impl LieSubspace {
    pub fn span(p: u32, vectors: impl IntoIterator<Item = LieVector>) -> LieSubspace {
        let mut rows: Vec<Vec<u32>> = vectors.into_iter().map(|v| v.iter().map(|x| x % p).collect()).collect();
        rref(p, &mut rows, 4);
        LieSubspace { p, basis: rows.into_iter().map(|r| [r[0], r[1], r[2], r[3]]).collect() }
    }

    pub fn zero(p: u32) -> LieSubspace {
        LieSubspace { p, basis: Vec::new() }
    }

    pub fn gl2(p: u32) -> LieSubspace {
        LieSubspace::span(p, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    }

    pub fn sl2(p: u32) -> LieSubspace {
        LieSubspace::span(p, [[1, 0, 0, p - 1], [0, 1, 0, 0], [0, 0, 1, 0]])
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn basis(&self) -> &[LieVector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &LieVector) -> bool {
        self.sum(&LieSubspace::span(self.p, [*v])).dim() == self.dim()
    }

    pub fn is_subspace_of(&self, other: &LieSubspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &LieSubspace) -> LieSubspace {
        LieSubspace::span(self.p, self.basis.iter().chain(other.basis.iter()).copied())
    }

    /// Zassenhaus: reduce the rows [u | u] and [w | 0]; rows [0 | x] span the intersection.
    pub fn intersect(&self, other: &LieSubspace) -> LieSubspace {
        let mut rows: Vec<Vec<u32>> = Vec::new();
        for u in &self.basis {
            rows.push(u.iter().chain(u.iter()).copied().collect());
        }
        for w in &other.basis {
            rows.push(w.iter().copied().chain([0; 4]).collect());
        }
        rref(self.p, &mut rows, 8);
        let inter = rows.iter().filter(|r| r[..4].iter().all(|&x| x == 0)).map(|r| [r[4], r[5], r[6], r[7]]);
        LieSubspace::span(self.p, inter)
    }

    /// The trace-zero part.
    pub fn sl_part(&self) -> LieSubspace {
        self.intersect(&LieSubspace::sl2(self.p))
    }

    /// The trace map restricted to this subspace is onto F_p.
    pub fn trace_surjective(&self) -> bool {
        self.basis.iter().any(|v| (v[0] + v[3]) % self.p != 0)
    }

    /// Every vector, for small p.
    pub fn vectors(&self) -> Vec<LieVector> {
        let p = self.p;
        let mut out = vec![[0u32; 4]];
        for b in &self.basis {
            let mut next = Vec::with_capacity(out.len() * p as usize);
            for v in &out {
                for k in 0..p {
                    next.push(std::array::from_fn(|i| (v[i] + k * b[i]) % p));
                }
            }
            out = next;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum VPiece {
    V1,
    V2,
    V3,
}

/// Cartan flavour of the decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CartanCase {
    Split,
    Nonsplit,
}

impl CartanCase {
    pub fn from_kind(kind: CartanKind) -> CartanCase {
        match kind.cartan() {
            CartanKind::Split => CartanCase::Split,
            _ => CartanCase::Nonsplit,
        }
    }

    pub fn normaliser(&self) -> CartanKind {
        match self {
            CartanCase::Split => CartanKind::SplitNormaliser,
            CartanCase::Nonsplit => CartanKind::NonsplitNormaliser,
        }
    }

    pub fn cartan(&self) -> CartanKind {
        self.normaliser().cartan()
    }
}

pub fn build_v(p: u32, which: VPiece, case: CartanCase) -> Result<LieSubspace> {
    let k = PrimePower::new(p, 1)?;
    if p == 2 {
        return Err(Error::Unsupported("V decomposition needs p odd".into()));
    }
    let eps = k.eps()?;
    let m1 = p - 1;
    let vecs: Vec<LieVector> = match (which, case) {
        (VPiece::V1, _) => vec![[1, 0, 0, 1]],
        (VPiece::V2, CartanCase::Nonsplit) => vec![[0, eps, 1, 0]],
        (VPiece::V3, CartanCase::Nonsplit) => vec![[1, 0, 0, m1], [0, eps, m1, 0]],
        (VPiece::V2, CartanCase::Split) => vec![[1, 0, 0, m1]],
        (VPiece::V3, CartanCase::Split) => vec![[0, 1, 1, 0], [0, 1, m1, 0]],
    };
    Ok(LieSubspace::span(p, vecs))
}

fn as_matrix(k: PrimePower, v: &LieVector) -> Mat2 {
    Mat2::new(k, v[0] as i64, v[1] as i64, v[2] as i64, v[3] as i64)
}

fn as_vector(x: &Mat2) -> LieVector {
    x.entries()
}

/// Generators of G read mod p.
fn mod_p_generators(g: &MatGroup) -> Result<Vec<Mat2>> {
    g.generators().iter().map(|x| x.reduce_level(1)).collect()
}

/// Smallest subspace containing `start` and stable under conjugation by `gens` (level 1).
fn stable_closure(start: LieSubspace, gens: &[Mat2]) -> Result<LieSubspace> {
    let k = PrimePower::new(start.p, 1)?;
    let invs: Vec<Mat2> = gens.iter().map(|g| g.inverse()).collect::<Result<_>>()?;
    let mut v = start;
    loop {
        let mut images = v.basis.clone();
        for (g, gi) in gens.iter().zip(&invs) {
            for b in &v.basis {
                images.push(as_vector(&gi.mul_unchecked(&as_matrix(k, b)).mul_unchecked(g)));
            }
        }
        let next = LieSubspace::span(v.p, images);
        if next.dim() == v.dim() {
            return Ok(v);
        }
        v = next;
    }
}

/// V is closed under X -> g^-1 X g for every generator g of G, read mod p.
pub fn is_stable_under(v: &LieSubspace, g: &MatGroup) -> Result<bool> {
    let gens = mod_p_generators(g)?;
    Ok(stable_closure(v.clone(), &gens)?.dim() == v.dim())
}

/// V is stable, nonzero and contains no proper nonzero stable subspace.
pub fn is_irreducible_under(v: &LieSubspace, g: &MatGroup) -> Result<bool> {
    if v.p > IRREDUCIBILITY_MAX_P {
        return Err(Error::SizeCap(IRREDUCIBILITY_MAX_P as u64));
    }
    if v.dim() == 0 || !is_stable_under(v, g)? {
        return Ok(false);
    }
    Ok(proper_stable_line(v, g)?.is_none())
}

/// A nonzero vector of V whose stable closure is a proper subspace of V, if one exists.
pub fn proper_stable_line(v: &LieSubspace, g: &MatGroup) -> Result<Option<LieSubspace>> {
    if v.p > IRREDUCIBILITY_MAX_P {
        return Err(Error::SizeCap(IRREDUCIBILITY_MAX_P as u64));
    }
    let gens = mod_p_generators(g)?;
    for x in v.vectors() {
        // one representative per line: leading nonzero coordinate equal to 1
        match x.iter().find(|&&c| c != 0) {
            Some(1) => {}
            _ => continue,
        }
        let w = stable_closure(LieSubspace::span(v.p, [x]), &gens)?;
        if w.dim() < v.dim() {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// [X, Y] = XY - YX lies in V for all basis pairs.
pub fn bracket_closed(v: &LieSubspace) -> bool {
    let k = PrimePower::new(v.p, 1).expect("prime");
    v.basis.iter().all(|x| {
        v.basis.iter().all(|y| {
            let (mx, my) = (as_matrix(k, x), as_matrix(k, y));
            let br = mx.mul_unchecked(&my).sub(&my.mul_unchecked(&mx)).expect("same context");
            v.contains(&as_vector(&br))
        })
    })
}

fn check_level(g: &MatGroup, i: u32) -> Result<()> {
    if i == 0 || i >= g.ctx().n() {
        return Err(Error::LevelOutOfRange { level: i, max: g.ctx().n().saturating_sub(1) });
    }
    Ok(())
}

/// G_i = {g in G : g = I mod p^i}.
pub fn level_kernel(g: &MatGroup, i: u32) -> Result<MatGroup> {
    check_level(g, i)?;
    let s = g.ctx().p().pow(i);
    Ok(g.filter_subgroup(|x| x.a % s == 1 % s && x.d % s == 1 % s && x.b % s == 0 && x.c % s == 0))
}

/// g_i, the span of (g - I)/p^i mod p over g in G_i.
pub fn lie_image(g: &MatGroup, i: u32) -> Result<LieSubspace> {
    check_level(g, i)?;
    let ctx = g.ctx();
    let p = ctx.p();
    let s = p.pow(i);
    let digit = |x: u32, one: u32| ((x + ctx.modulus() - one) % ctx.modulus()) / s % p;
    let vecs = g
        .elements()
        .filter(|x| x.a % s == 1 % s && x.d % s == 1 % s && x.b % s == 0 && x.c % s == 0)
        .map(|x| [digit(x.a, 1), digit(x.b, 0), digit(x.c, 0), digit(x.d, 1)]);
    Ok(LieSubspace::span(p, vecs))
}

/// dim g_1, ..., dim g_{n-1}.
pub fn g_dims(g: &MatGroup) -> Result<Vec<usize>> {
    (1..g.ctx().n()).map(|i| lie_image(g, i).map(|v| v.dim())).collect()
}

/// Smallest k with x^k scalar.
pub fn projective_order(x: &Mat2) -> u64 {
    let mut y = *x;
    let mut k = 1;
    while !y.is_scalar() {
        y = y.mul_unchecked(x);
        k += 1;
    }
    k
}

/// How G(p) sits inside a Cartan normaliser: x^-1 G(p) x lies in the standard C+(p).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftWitness {
    pub case: CartanCase,
    pub conjugator: Mat2,
    /// Some element of x^-1 G(p) x in C(p) has projective order greater than 2.
    pub large_projective_order: bool,
}

/// The finite-level N-Cartan lift conditions, with the conjugation found.
pub fn ncartan_lift_witness(g: &MatGroup) -> Result<Option<LiftWitness>> {
    let ctx = g.ctx();
    if ctx.p() == 2 {
        return Err(Error::Unsupported("N-Cartan lifts need p odd".into()));
    }
    if ctx.n() < 2 {
        return Err(Error::LevelOutOfRange { level: ctx.n(), max: ctx.n() });
    }
    let mut dets: Vec<u32> = g.elements().map(|x| x.det()).collect();
    dets.sort_unstable();
    dets.dedup();
    if dets.len() as u64 != ctx.unit_count() {
        return Ok(None);
    }
    let gp = g.reduce_level(1)?;
    let k = gp.ctx();
    let elems: Vec<Mat2> = gp.elements().collect();
    let mut best: Option<LiftWitness> = None;
    for case in [CartanCase::Nonsplit, CartanCase::Split] {
        let (cart, norm) = (case.cartan(), case.normaliser());
        for x in Mat2::all_invertible(k) {
            let xi = x.inverse()?;
            let conj: Vec<Mat2> = elems.iter().map(|e| xi.mul_unchecked(e).mul_unchecked(&x)).collect();
            if !conj.iter().all(|e| in_cartan(norm, e).unwrap_or(false)) {
                continue;
            }
            let in_c: Vec<&Mat2> = conj.iter().filter(|e| in_cartan(cart, e).unwrap_or(false)).collect();
            if in_c.len() == conj.len() || in_c.iter().all(|e| e.is_scalar()) {
                continue;
            }
            let large = in_c.iter().any(|e| projective_order(e) > 2);
            let w = LiftWitness { case, conjugator: x, large_projective_order: large };
            if large {
                return Ok(Some(w));
            }
            best.get_or_insert(w);
        }
    }
    Ok(best)
}

pub fn is_ncartan_lift_finite(g: &MatGroup) -> Result<bool> {
    Ok(ncartan_lift_witness(g)?.is_some())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Classification {
    /// Every computed g_i is V1 + V2 and G(p^n) sits in C+(p^n) with the mod-p index.
    NormaliserCase,
    /// G contains I + p^level M2 and G(p^level) sits in C+(p^level) with the mod-p index.
    FullKernel { level: u32 },
    /// g_1 = V1 + V3 and G(p^2) is G(p) acting on V1 + V3.
    SemidirectV1V3Case,
    Violation { description: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct CartanLiftReport {
    pub label: String,
    pub level: u32,
    pub g_dims: Vec<usize>,
    pub case: CartanCase,
    pub classification: Classification,
}

impl CartanLiftReport {
    pub fn is_violation(&self) -> bool {
        matches!(self.classification, Classification::Violation { .. })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SamplerConfig {
    pub samples: usize,
    pub seed: u64,
    pub max_generators: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { samples: 500, seed: 0, max_generators: 3 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerCensus {
    pub p: u32,
    pub level: u32,
    pub examined: usize,
    pub qualifying: usize,
    pub reports: Vec<CartanLiftReport>,
}

impl TowerCensus {
    pub fn violations(&self) -> Vec<&CartanLiftReport> {
        self.reports.iter().filter(|r| r.is_violation()).collect()
    }

    pub fn count(&self, pred: impl Fn(&Classification) -> bool) -> usize {
        self.reports.iter().filter(|r| pred(&r.classification)).count()
    }
}

/// Classify G against the trichotomy. Returns None when G does not meet the hypotheses
/// (N-Cartan lift, dim g_1 > 1, a Cartan element of projective order > 2).
pub fn classify_cartan_lift(g: &MatGroup, label: &str) -> Result<Option<CartanLiftReport>> {
    let ctx = g.ctx();
    let Some(w) = ncartan_lift_witness(g)? else { return Ok(None) };
    if !w.large_projective_order {
        return Ok(None);
    }
    let xl = w.conjugator.lift_to(ctx)?;
    let g = g.conjugate_by(&xl)?;
    let n_max = ctx.n();
    let p = ctx.p();
    let subspaces: Vec<LieSubspace> = (1..n_max).map(|i| lie_image(&g, i)).collect::<Result<_>>()?;
    let dims: Vec<usize> = subspaces.iter().map(|s| s.dim()).collect();
    if dims[0] <= 1 {
        return Ok(None);
    }
    let v1 = build_v(p, VPiece::V1, w.case)?;
    let v2 = build_v(p, VPiece::V2, w.case)?;
    let v3 = build_v(p, VPiece::V3, w.case)?;
    let report = |classification| CartanLiftReport {
        label: label.to_string(),
        level: n_max,
        g_dims: dims.clone(),
        case: w.case,
        classification,
    };
    let violation = |d: String| Classification::Violation { description: d };
    let gp_order = g.reduce_level(1)?.order();
    let p64 = p as u64;

    if dims[0] == 3 {
        if subspaces[0] != v1.sum(&v3) {
            return Ok(Some(report(violation("dim g_1 = 3 but g_1 != V1 + V3".into()))));
        }
        if dims[1..].iter().any(|&d| d != 4) {
            return Ok(Some(report(violation(format!("dim g_1 = 3 but later dims {:?}", &dims[1..])))));
        }
        let g2 = g.reduce_level(2)?;
        if g2.order() != gp_order * p64.pow(3) {
            return Ok(Some(report(violation("|G(p^2)| != |G(p)| p^3".into()))));
        }
        let h = find_complement(&g2)?;
        if h.order() != gp_order {
            return Ok(Some(report(violation("complement of wrong order".into()))));
        }
        return Ok(Some(report(Classification::SemidirectV1V3Case)));
    }

    if dims.iter().any(|&d| d != 2 && d != 4) {
        return Ok(Some(report(violation(format!("dims {dims:?} outside {{2, 4}}")))));
    }
    let first_full = dims.iter().position(|&d| d == 4).map(|i| i as u32 + 1);
    if let Some(n) = first_full {
        if dims[n as usize - 1..].iter().any(|&d| d != 4) {
            return Ok(Some(report(violation(format!("dims {dims:?} drop after reaching 4")))));
        }
    }
    let cplus = v1.sum(&v2);
    if let Some(bad) = subspaces.iter().find(|s| s.dim() == 2 && **s != cplus) {
        return Ok(Some(report(violation(format!("dim-2 filtration piece {:?} != V1 + V2", bad.basis())))));
    }
    let n = first_full.unwrap_or(n_max);
    if n > 1 {
        let gn = g.reduce_level(n)?;
        if gn.order() != gp_order * p64.pow(2 * (n - 1)) {
            return Ok(Some(report(violation(format!("index not preserved at level {n}")))));
        }
        if conjugator_into_normaliser(&gn, w.case.normaliser())?.is_none() {
            return Ok(Some(report(violation(format!("G(p^{n}) not conjugate into C+(p^{n})")))));
        }
    }
    Ok(Some(report(match first_full {
        Some(level) => Classification::FullKernel { level },
        None => Classification::NormaliserCase,
    })))
}

/// Some x = I mod p with x^-1 G x inside the standard normaliser, for G already in it mod p.
/// Searched one level at a time: at level m only the factor I + p^(m-1) A is new.
fn conjugator_into_normaliser(g: &MatGroup, kind: CartanKind) -> Result<Option<Mat2>> {
    let ctx = g.ctx();
    let levels: Vec<MatGroup> = (1..=ctx.n()).map(|m| g.reduce_level(m)).collect::<Result<_>>()?;
    fn search(levels: &[MatGroup], kind: CartanKind, m: u32, x: Mat2) -> Result<Option<Mat2>> {
        let ctx = x.ctx();
        if m > ctx.n() {
            return Ok(Some(x));
        }
        let gm = &levels[m as usize - 1];
        let p = ctx.p() as u64;
        let s = (ctx.p() as i64).pow(m - 1);
        for i in 0..p.pow(4) {
            let d = |j: u32| (i / p.pow(j) % p) as i64 * s;
            let y = x.mul_unchecked(&Mat2::new(ctx, 1 + d(0), d(1), d(2), 1 + d(3)));
            let ym = y.reduce_level(m)?;
            let yi = ym.inverse()?;
            let fits = gm.generators().iter().all(|h| in_cartan(kind, &yi.mul_unchecked(h).mul_unchecked(&ym)).unwrap_or(false));
            if fits {
                if let Some(found) = search(levels, kind, m + 1, y)? {
                    return Ok(Some(found));
                }
            }
        }
        Ok(None)
    }
    search(&levels, kind, 2, Mat2::identity(ctx))
}

fn lift_vector(ctx: PrimePower, v: &LieVector, scale: i64) -> Mat2 {
    Mat2::new(ctx, 1 + scale * v[0] as i64, scale * v[1] as i64, scale * v[2] as i64, 1 + scale * v[3] as i64)
}

/// Handcrafted groups over C_ns+(p): Teichmueller lift of C_ns+(p), a level-1 kernel W
/// and the full kernel from level 2 on, plus (1+p)I.
pub fn kernel_battery(ctx: PrimePower) -> Result<Vec<(String, MatGroup)>> {
    let p = ctx.p();
    let cplus = build_cartan(ctx, CartanKind::NonsplitNormaliser)?;
    let teich = find_complement(&cplus)?;
    let scalar = Mat2::scalar(ctx, 1 + p as i64);
    let v1 = build_v(p, VPiece::V1, CartanCase::Nonsplit)?;
    let v2 = build_v(p, VPiece::V2, CartanCase::Nonsplit)?;
    let v3 = build_v(p, VPiece::V3, CartanCase::Nonsplit)?;
    let shapes = [
        ("V1", v1.clone()),
        ("V1+V2", v1.sum(&v2)),
        ("V1+V3", v1.sum(&v3)),
        ("gl2", LieSubspace::gl2(p)),
    ];
    let mut out = vec![(format!("C_ns+({})", ctx.modulus()), cplus.clone())];
    for (name, w) in shapes {
        let mut gens: Vec<Mat2> = teich.generators().to_vec();
        gens.extend(w.basis().iter().map(|v| lift_vector(ctx, v, p as i64)));
        gens.extend(crate::matgroups::kernel_generators(ctx, 2));
        gens.push(scalar);
        out.push((format!("kernel {name}"), generate(ctx, &gens)?));
    }
    Ok(out)
}

fn random_vector(rng: &mut ChaCha8Rng, w: &LieSubspace) -> LieVector {
    let p = w.p();
    let mut v = [0u32; 4];
    for b in w.basis() {
        let k = rng.gen_range(0..p);
        for i in 0..4 {
            v[i] = (v[i] + k * b[i]) % p;
        }
    }
    v
}

/// One seeded sample: up to `max_generators` elements c (I + pA) with c in C_ns+(p^n) and
/// A drawn from a random kernel shape, plus (1+p)I.
pub fn sample_cartan_preimage(ctx: PrimePower, cplus: &MatGroup, rng: &mut ChaCha8Rng, max_generators: usize) -> Result<MatGroup> {
    let p = ctx.p();
    let v1 = build_v(p, VPiece::V1, CartanCase::Nonsplit)?;
    let shapes = [
        v1.clone(),
        v1.sum(&build_v(p, VPiece::V2, CartanCase::Nonsplit)?),
        v1.sum(&build_v(p, VPiece::V3, CartanCase::Nonsplit)?),
        LieSubspace::gl2(p),
    ];
    let w = &shapes[rng.gen_range(0..shapes.len())];
    let count = rng.gen_range(1..=max_generators.max(1));
    let mut gens = vec![Mat2::scalar(ctx, 1 + p as i64)];
    for _ in 0..count {
        let c = cplus.element(rng.gen_range(0..cplus.order() as usize));
        let mut k = lift_vector(ctx, &random_vector(rng, w), p as i64);
        if ctx.n() > 2 && rng.gen_bool(0.5) {
            let high = p.pow(2) as i64;
            let r: [i64; 4] = std::array::from_fn(|_| rng.gen_range(0..ctx.modulus() as i64));
            k = k.add(&Mat2::new(ctx, high * r[0], high * r[1], high * r[2], high * r[3]))?;
        }
        gens.push(c.mul_unchecked(&k));
    }
    generate(ctx, &gens)
}

fn sample_seed(seed: u64, i: usize) -> u64 {
    seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Classify the kernel battery plus seeded samples over C_ns+(p) at level n_max.
pub fn verify_cartan_tower(p: u32, n_max: u32, config: SamplerConfig) -> Result<TowerCensus> {
    if !(2..=3).contains(&n_max) {
        return Err(Error::LevelOutOfRange { level: n_max, max: 3 });
    }
    let ctx = PrimePower::new(p, n_max)?;
    if p == 2 {
        return Err(Error::Unsupported("Cartan tower needs p odd".into()));
    }
    let cplus = build_cartan(ctx, CartanKind::NonsplitNormaliser)?;
    let mut groups = kernel_battery(ctx)?;
    let sampled: Vec<Result<(String, MatGroup)>> = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(config.seed, i));
            Ok((format!("sample {i}"), sample_cartan_preimage(ctx, &cplus, &mut rng, config.max_generators)?))
        })
        .collect();
    for s in sampled {
        groups.push(s?);
    }
    let examined = groups.len();
    let classified: Vec<Result<Option<CartanLiftReport>>> =
        groups.par_iter().map(|(label, g)| classify_cartan_lift(g, label)).collect();
    let mut reports = Vec::new();
    for r in classified {
        if let Some(rep) = r? {
            reports.push(rep);
        }
    }
    Ok(TowerCensus { p, level: n_max, examined, qualifying: reports.len(), reports })
}
