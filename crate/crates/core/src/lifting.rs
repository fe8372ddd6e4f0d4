//! Complements of the congruence kernel (finite Schur-Zassenhaus) and Hensel
//! lifting of eigenvalues.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gl2_ring::{Mat2, PrimePower, QuadResidue};
use crate::matgroups::{generate, generating_set, MatGroup};

/// Groups larger than this are not searched by backtracking.
pub const BACKTRACK_LIMIT: u64 = 100_000;

pub fn element_order(x: &Mat2) -> u64 {
    let mut y = *x;
    let mut k = 1;
    while !y.is_identity() {
        y = y.mul_unchecked(x);
        k += 1;
    }
    k
}

/// The p'-part of x: a power of x of order prime to p that agrees with x mod p.
pub fn p_prime_part(x: &Mat2) -> Mat2 {
    let p = x.ctx().p() as u64;
    let mut m = element_order(x);
    let mut pa = 1;
    while m % p == 0 {
        m /= p;
        pa *= p;
    }
    // pa * u = 1 mod m
    let u = (1..=m).find(|u| (pa * u) % m == 1 % m).unwrap_or(1);
    x.pow(pa * u)
}

/// |H| equals the order of its image mod p, i.e. H meets the kernel trivially.
fn injects_mod_p(h: &MatGroup) -> Result<bool> {
    Ok(h.order() == h.reduce_level(1)?.order())
}

fn check_hypothesis(g: &MatGroup) -> Result<MatGroup> {
    let gp = g.reduce_level(1)?;
    if gp.order() % g.ctx().p() as u64 == 0 {
        return Err(Error::NoComplementHypothesis);
    }
    Ok(gp)
}

pub fn find_complement(g: &MatGroup) -> Result<MatGroup> {
    find_complement_seeded(g, 0)
}

/// A subgroup H with H.N = G and H meeting N = {g = I mod p} trivially.
/// Seed 0 tries the p'-parts of the generators first; other seeds randomise the search.
pub fn find_complement_seeded(g: &MatGroup, seed: u64) -> Result<MatGroup> {
    let ctx = g.ctx();
    if ctx.n() == 1 {
        return Ok(g.clone());
    }
    let gp = check_hypothesis(g)?;
    let target = gp.order();
    if g.order() == target {
        return Ok(g.clone());
    }

    if seed == 0 {
        let parts: Vec<Mat2> = g.generators().iter().map(p_prime_part).collect();
        let h = generate(ctx, &parts)?;
        if h.order() == target && injects_mod_p(&h)? {
            return Ok(h);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..g.order() as usize).collect();
    order.shuffle(&mut rng);
    let mut gens: Vec<Mat2> = Vec::new();
    let mut h = generate(ctx, &[])?;
    for i in order {
        if h.order() == target {
            return Ok(h);
        }
        let t = p_prime_part(&g.element(i));
        if h.contains(&t) {
            continue;
        }
        gens.push(t);
        let next = generate(ctx, &gens)?;
        if next.order() % ctx.p() as u64 != 0 && injects_mod_p(&next)? {
            h = next;
        } else {
            gens.pop();
        }
    }
    if h.order() == target {
        return Ok(h);
    }
    backtrack_complement(g, &gp, &mut rng)
}

fn backtrack_complement(g: &MatGroup, gp: &MatGroup, rng: &mut ChaCha8Rng) -> Result<MatGroup> {
    if g.order() > BACKTRACK_LIMIT {
        return Err(Error::SearchExhausted);
    }
    let ctx = g.ctx();
    let bar_gens = generating_set(gp.ctx(), gp.encodings(), 0);
    let mut lifts: Vec<Vec<Mat2>> = Vec::new();
    for b in &bar_gens {
        let k = element_order(b);
        let mut l: Vec<Mat2> =
            g.elements().filter(|x| x.reduce_level(1).map(|y| y == *b).unwrap_or(false) && x.pow(k).is_identity()).collect();
        l.shuffle(rng);
        lifts.push(l);
    }
    let mut chosen = Vec::new();
    if let Some(h) = dfs(ctx, &lifts, &mut chosen, gp.order())? {
        return Ok(h);
    }
    Err(Error::SearchExhausted)
}

fn dfs(ctx: PrimePower, lifts: &[Vec<Mat2>], chosen: &mut Vec<Mat2>, target: u64) -> Result<Option<MatGroup>> {
    if chosen.len() == lifts.len() {
        let h = generate(ctx, chosen)?;
        return Ok((h.order() == target && injects_mod_p(&h)?).then_some(h));
    }
    for x in &lifts[chosen.len()] {
        chosen.push(*x);
        let partial = generate(ctx, chosen)?;
        if partial.order() <= target && injects_mod_p(&partial)? {
            if let Some(h) = dfs(ctx, lifts, chosen, target)? {
                return Ok(Some(h));
            }
        }
        chosen.pop();
    }
    Ok(None)
}

/// Some g in G with g^-1 H1 g = H2.
pub fn complements_conjugate(g: &MatGroup, h1: &MatGroup, h2: &MatGroup) -> Result<Mat2> {
    if h1.order() != h2.order() {
        return Err(Error::NotConjugate);
    }
    if h1 == h2 {
        return Ok(Mat2::identity(g.ctx()));
    }
    g.elements()
        .find(|x| {
            let xi = x.inverse().expect("group element");
            h1.generators().iter().all(|h| h2.contains(&xi.mul_unchecked(h).mul_unchecked(x)))
        })
        .ok_or(Error::NotConjugate)
}

fn eval_char_poly(lambda: &QuadResidue, tr: u32, det: u32) -> QuadResidue {
    lambda.mul(lambda).sub(&lambda.embed(tr).mul(lambda)).add(&lambda.embed(det))
}

/// The two roots of X^2 - tr X + det in Z/p^n or (Z/p^n)[sqrt(eps)], sorted.
pub fn hensel_eigenvalues(a: &Mat2) -> Result<[QuadResidue; 2]> {
    let ctx = a.ctx();
    let p = ctx.p();
    if p == 2 {
        return Err(Error::Unsupported("Hensel eigenvalues need p odd".into()));
    }
    let (tr, det) = a.char_poly();
    let disc = ctx.sub(ctx.mul(tr, tr), ctx.mul(4, det));
    if !ctx.is_unit(disc) {
        return Err(Error::RepeatedRoots);
    }
    let k1 = PrimePower::new(p, 1)?;
    let (tr1, det1) = (tr % p, det % p);
    let mut roots1 = Vec::new();
    for im in 0..p {
        for re in 0..p {
            let l = QuadResidue::new(k1, re as i64, im as i64)?;
            if eval_char_poly(&l, tr1, det1).is_zero() {
                roots1.push(l);
            }
        }
    }
    debug_assert_eq!(roots1.len(), 2);
    let iterations = 32 - (ctx.n().max(1) - 1).leading_zeros() + 1;
    let mut roots = [QuadResidue::new(ctx, 0, 0)?; 2];
    for (slot, r) in roots.iter_mut().zip(&roots1) {
        let mut l = QuadResidue::new(ctx, r.re as i64, r.im as i64)?;
        for _ in 0..iterations {
            let f = eval_char_poly(&l, tr, det);
            let df = l.add(&l).sub(&l.embed(tr));
            l = l.sub(&f.mul(&df.inverse()?));
        }
        *slot = l;
    }
    roots.sort();
    Ok(roots)
}
