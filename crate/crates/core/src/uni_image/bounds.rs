//! Lower bound on `|U(n,q)^p|` from the canonical families, the structure of the image
//! relative to `U_{p-1}(n,q)`, and the one-third density statement.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::census::{u_image_census, CensusConfig, ImageCensus};
use super::closure::subgroup_closure;
use super::families::{CanonicalFamilySpec, FamilyKind};
use crate::error::{Error, Result};
use crate::gf::{prime_power, FieldTable};

fn characteristic_of(q: usize) -> Result<usize> {
    prime_power(q as u64)
        .map(|(p, _)| p as usize)
        .ok_or(Error::NotPrimePower(q as u64))
}

fn pow(base: usize, exp: usize) -> BigUint {
    BigUint::from(base).pow(exp as u32)
}

/// The displayed lower bound, term by term as printed (both parities of `n - p`).
pub fn lbound_value(n: usize, q: usize) -> Result<BigUint> {
    let p = characteristic_of(q)?;
    if n < p + 3 {
        return Err(Error::InvalidArgument(format!("the bound needs n >= p + 3, got n={n}, p={p}")));
    }
    let len = n - p;
    let base = len * (len - 1) / 2;
    let mut total = pow(q, base) * pow(q - 1, len);
    for m in 1..=len / 2 {
        total += pow(q, base - m * (m - 1) / 2) * 2u32 * pow(q - 1, len - m);
    }
    if len % 2 == 1 {
        let r = len / 2 + 1;
        total += pow(q, base - r * (r - 1) / 2) * 2u32 * pow(q - 1, len - r);
    }
    Ok(total)
}

#[derive(Debug, Clone, Serialize)]
pub struct LboundTerm {
    pub families: Vec<String>,
    /// Per-family class size times number of representatives, summed.
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub value: BigUint,
}

/// The bound rebuilt from family data: `A_0`, then `A_m` with `B_{L+1-m}` for
/// `1 <= m <= L/2`, then `A_r` with `B_r` when `L = n - p` is odd.
pub fn lbound_terms(n: usize, q: usize) -> Result<Vec<LboundTerm>> {
    let p = characteristic_of(q)?;
    if n < p + 3 {
        return Err(Error::InvalidArgument(format!("the bound needs n >= p + 3, got n={n}, p={p}")));
    }
    let l = p - 1;
    let len = n - p;
    let mut groups: Vec<Vec<CanonicalFamilySpec>> = vec![vec![CanonicalFamilySpec::new(n, q, l, FamilyKind::A, 0)?]];
    for m in 1..=len / 2 {
        groups.push(vec![
            CanonicalFamilySpec::new(n, q, l, FamilyKind::A, m)?,
            CanonicalFamilySpec::new(n, q, l, FamilyKind::B, len + 1 - m)?,
        ]);
    }
    if len % 2 == 1 {
        let r = len / 2 + 1;
        groups.push(vec![
            CanonicalFamilySpec::new(n, q, l, FamilyKind::A, r)?,
            CanonicalFamilySpec::new(n, q, l, FamilyKind::B, r)?,
        ]);
    }
    Ok(groups
        .into_iter()
        .map(|g| LboundTerm {
            families: g.iter().map(|s| s.to_string()).collect(),
            value: g.iter().map(|s| s.class_size() * s.representative_count()).sum(),
        })
        .collect())
}

/// Families of `(n, q, l)` sharing a member, found by comparing representatives.
pub fn family_collisions(field: &Arc<FieldTable>, n: usize, l: usize) -> Result<Vec<(String, String)>> {
    let specs = CanonicalFamilySpec::all(n, field.order(), l)?;
    let reps: Vec<_> = specs
        .iter()
        .map(|s| s.representatives(field))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for a in 0..specs.len() {
        for b in a + 1..specs.len() {
            if reps[a].iter().any(|x| reps[b].contains(x)) {
                out.push((specs[a].to_string(), specs[b].to_string()));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuBranch {
    /// `n <= p`: only the identity.
    Trivial,
    /// `n` is `p + 1` or `p + 2`: all of `U_{p-1}(n,q)`.
    Full,
    /// `n >= p + 3`: a proper subset generating `U_{p-1}(n,q)`.
    ProperGenerating,
}

#[derive(Debug, Clone, Serialize)]
pub struct BuReport {
    pub n: usize,
    pub q: usize,
    pub p: u32,
    pub branch: BuBranch,
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub image_count: BigUint,
    pub domain_size: u64,
    pub closure_size: u64,
    pub passed: bool,
}

pub fn expected_branch(n: usize, p: usize) -> BuBranch {
    if n <= p {
        BuBranch::Trivial
    } else if n <= p + 2 {
        BuBranch::Full
    } else {
        BuBranch::ProperGenerating
    }
}

/// Checks the branch that applies to a `p`-th power census carrying its bitmap.
pub fn bu_report(field: &FieldTable, census: &ImageCensus) -> Result<BuReport> {
    if census.m != census.p as u64 {
        return Err(Error::InvalidArgument("the trichotomy concerns the p-th power map".into()));
    }
    let bitmap = census
        .bitmap
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("census was run without its bitmap".into()))?;
    let branch = expected_branch(census.n, census.p as usize);
    let size = census.domain.size();
    let count = bitmap.count_ones();
    let closure = subgroup_closure(&census.domain, field, bitmap).count_ones();
    let passed = match branch {
        BuBranch::Trivial => count == 1 && bitmap.get(0) && size == 1,
        BuBranch::Full => count == size,
        BuBranch::ProperGenerating => count < size && closure == size,
    };
    Ok(BuReport {
        n: census.n,
        q: census.q,
        p: census.p,
        branch,
        image_count: census.count.clone(),
        domain_size: size,
        closure_size: closure,
        passed,
    })
}

pub fn bu_trichotomy_check(field: &Arc<FieldTable>, n: usize, config: &CensusConfig) -> Result<BuReport> {
    let config = CensusConfig {
        keep_bitmap: true,
        ..*config
    };
    let census = u_image_census(field, n, field.characteristic() as u64, &config)?;
    bu_report(field, &census)
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremAReport {
    pub n: usize,
    pub q: usize,
    pub p: u32,
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub count: BigUint,
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub domain_size: BigUint,
    #[serde(serialize_with = "crate::serde_big::rational")]
    pub ratio: BigRational,
    /// `q >= n - p - 1`.
    pub hypothesis: bool,
    pub above_third: bool,
    /// `(1 - 1/q)^(n-p-1) (1 + 1/q)`.
    #[serde(serialize_with = "crate::serde_big::rational")]
    pub analytic_bound: BigRational,
    pub analytic_above_third: bool,
    /// The statement is only asserted when the hypothesis holds.
    pub passed: bool,
}

pub fn theorem_a_report(census: &ImageCensus) -> Result<TheoremAReport> {
    let (n, q, p) = (census.n, census.q, census.p as usize);
    if census.m != p as u64 {
        return Err(Error::InvalidArgument("the density statement concerns the p-th power map".into()));
    }
    if n < p + 3 {
        return Err(Error::InvalidArgument(format!("needs n >= p + 3, got n={n}, p={p}")));
    }
    let domain_size = pow(q, (n - p + 1) * (n - p) / 2);
    if domain_size != census.domain_size() {
        return Err(Error::Postcondition("image domain disagrees with |U_{p-1}(n,q)|".into()));
    }
    let ratio = BigRational::new(BigInt::from(census.count.clone()), BigInt::from(domain_size.clone()));
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let qr = BigRational::from_integer(BigInt::from(q));
    let one = BigRational::one();
    let mut analytic = &one + qr.recip();
    let shrink = &one - qr.recip();
    for _ in 0..n - p - 1 {
        analytic = analytic * &shrink;
    }
    let hypothesis = q + 1 >= n - p;
    let above_third = ratio > third;
    let analytic_above_third = analytic > third;
    Ok(TheoremAReport {
        n,
        q,
        p: p as u32,
        count: census.count.clone(),
        domain_size,
        ratio,
        hypothesis,
        above_third,
        analytic_bound: analytic,
        analytic_above_third,
        passed: !hypothesis || (above_third && analytic_above_third),
    })
}

pub fn theorem_a_check(field: &Arc<FieldTable>, n: usize, config: &CensusConfig) -> Result<TheoremAReport> {
    let census = u_image_census(field, n, field.characteristic() as u64, config)?;
    theorem_a_report(&census)
}
