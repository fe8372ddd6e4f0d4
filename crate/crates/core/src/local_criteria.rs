//! Local predicates at p and at auxiliary primes, inertia orders and the
//! entanglement arithmetic. Pure integer functions of (p, n, e, ell).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gl2_ring::{gcd, is_prime};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    Ordinary,
    Supersingular,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalContext {
    pub p: u64,
    pub n: u32,
    pub e: u64,
    pub reduction: Reduction,
}

impl LocalContext {
    pub fn new(p: u64, n: u32, e: u64, reduction: Reduction) -> Result<Self> {
        require_odd_prime(p)?;
        if n == 0 || e == 0 {
            return Err(Error::DomainGuard("n and e must be at least 1".into()));
        }
        Ok(LocalContext { p, n, e, reduction })
    }
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::DomainGuard(format!("p = {p} must be an odd prime")));
    }
    Ok(())
}

fn pow(p: u64, n: u32) -> Result<u64> {
    p.checked_pow(n).ok_or_else(|| Error::DomainGuard(format!("{p}^{n} overflows")))
}

/// ell mod p^n is not +-1, which forces potentially good reduction at ell.
pub fn potentially_good_forced_at_ell(ell: u64, p: u64, n: u32) -> Result<bool> {
    require_odd_prime(p)?;
    let q = pow(p, n)?;
    if q == 3 {
        return Err(Error::ExcludedCase("p^n = 3".into()));
    }
    if ell == p {
        return Err(Error::DomainGuard("ell must differ from p".into()));
    }
    let r = ell % q;
    Ok(r != 1 && r != q - 1)
}

/// p^(n-1)(p-1) does not divide 2e.
pub fn good_reduction_forced_at_p(p: u64, n: u32, e: u64) -> Result<bool> {
    require_odd_prime(p)?;
    let phi = pow(p, n - 1)? * (p - 1);
    Ok((2 * e) % phi != 0)
}

/// p > 6e+1 and p != 12e+1; with the supersingular flag, p >= 6e-1.
pub fn canonical_subgroup_excluded(p: u64, e: u64, supersingular: bool) -> Result<bool> {
    require_odd_prime(p)?;
    Ok(if supersingular { p + 1 >= 6 * e } else { p > 6 * e + 1 && p != 12 * e + 1 })
}

pub fn supersingular_forced(p: u64, e: u64) -> Result<bool> {
    require_odd_prime(p)?;
    Ok(p > 6 * e + 1 && p != 12 * e + 1)
}

/// Order of the inertia element: (p^n - p^(n-1))/gcd(., e) when ordinary,
/// (p^(n+1) - p^(n-1))/gcd(., e) when supersingular.
pub fn inertia_order(ctx: &LocalContext) -> Result<u64> {
    let base = match ctx.reduction {
        Reduction::Ordinary => pow(ctx.p, ctx.n)? - pow(ctx.p, ctx.n - 1)?,
        Reduction::Supersingular => pow(ctx.p, ctx.n + 1)? - pow(ctx.p, ctx.n - 1)?,
        Reduction::Unknown => return Err(Error::DomainGuard("reduction type unknown".into())),
    };
    Ok(base / gcd(base, ctx.e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EntanglementMultiples {
    pub full_mult: u64,
    pub cyclotomic_mult: u64,
    pub cyclic_order: u64,
}

fn check_eta(eta: u64) -> Result<()> {
    if !(1..=3).contains(&eta) {
        return Err(Error::DomainGuard(format!("eta = {eta} not in {{1, 2, 3}}")));
    }
    Ok(())
}

fn exact_div(num: u64, den: u64, what: &str) -> Result<u64> {
    if den == 0 || num % den != 0 {
        return Err(Error::NonIntegral(format!("{what}: {num}/{den}")));
    }
    Ok(num / den)
}

/// Number-field form: p^(2n-2)(p^2-1)/gcd(2 eta e, p^2-1), p^(n-1)(p+1)/gcd(eta e, p+1)
/// and the cyclic order p^(n-1)(p^2-1)/gcd(2 eta e, p^2-1).
pub fn entanglement_multiples(p: u64, n: u32, eta: u64, e: u64) -> Result<EntanglementMultiples> {
    require_odd_prime(p)?;
    check_eta(eta)?;
    let g2 = gcd(2 * eta * e, p * p - 1);
    let full = pow(p, 2 * n - 2)? * (p * p - 1);
    let cyc = pow(p, n - 1)? * (p * p - 1);
    let cyclo = pow(p, n - 1)? * (p + 1);
    Ok(EntanglementMultiples {
        full_mult: exact_div(full, g2, "full multiple")?,
        cyclotomic_mult: exact_div(cyclo, gcd(eta * e, p + 1), "cyclotomic multiple")?,
        cyclic_order: exact_div(cyc, g2, "cyclic order")?,
    })
}

/// Form over Q (e = 1, p > 7): (p^(2n) - p^(2n-2))/12 and p^(n-1)(p+1)/gcd(eta, p+1).
pub fn entanglement_multiples_q(p: u64, n: u32, eta: u64) -> Result<EntanglementMultiples> {
    require_odd_prime(p)?;
    check_eta(eta)?;
    if p <= 7 {
        return Err(Error::DomainGuard("the form over Q needs p > 7".into()));
    }
    let general = entanglement_multiples(p, n, eta, 1)?;
    let full = pow(p, 2 * n)? - pow(p, 2 * n - 2)?;
    Ok(EntanglementMultiples {
        full_mult: exact_div(full, 12, "full multiple over Q")?,
        cyclotomic_mult: exact_div(pow(p, n - 1)? * (p + 1), gcd(eta, p + 1), "cyclotomic multiple over Q")?,
        cyclic_order: general.cyclic_order,
    })
}

/// [GL2(Z_mn) : G_mn] = [GL2(Z_m) : G_m] [GL2(Z_n) : G_n] [entanglement degree].
pub fn goursat_total_index(idx_m: u64, idx_n: u64, ent_degree: u64) -> Result<u64> {
    if idx_m == 0 || idx_n == 0 || ent_degree == 0 {
        return Err(Error::DomainGuard("indices must be at least 1".into()));
    }
    idx_m
        .checked_mul(idx_n)
        .and_then(|x| x.checked_mul(ent_degree))
        .ok_or_else(|| Error::DomainGuard("index product overflows".into()))
}
