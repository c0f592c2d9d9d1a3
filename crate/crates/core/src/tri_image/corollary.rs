use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::prime_power;

#[derive(Debug, Clone, Serialize)]
pub struct CorollaryCReport {
    pub n: usize,
    pub q: usize,
    pub p: u32,
    /// `q > n - p - 1`.
    pub hypothesis: bool,
    /// `(p - 1)(n - p)`, negative when `n < p`.
    pub q_exponent: i64,
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub t_image: BigUint,
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub t_order: BigUint,
    #[serde(serialize_with = "crate::serde_big::rational")]
    pub ratio: BigRational,
    #[serde(serialize_with = "crate::serde_big::rational")]
    pub bound: BigRational,
    #[serde(serialize_with = "crate::serde_big::rational")]
    pub slack: BigRational,
    pub holds: bool,
    /// Only asserted under the hypothesis.
    pub passed: bool,
}

/// `|T| = (q-1)^n q^(n(n-1)/2)`.
pub fn triangular_order(n: usize, q: usize) -> BigUint {
    BigUint::from(q - 1).pow(n as u32) * BigUint::from(q).pow((n * n.saturating_sub(1) / 2) as u32)
}

fn int_pow_signed(base: usize, exp: i64) -> BigRational {
    let b = BigRational::from_integer(BigInt::from(base));
    let mag = num_traits::pow(b, exp.unsigned_abs() as usize);
    if exp < 0 {
        mag.recip()
    } else {
        mag
    }
}

/// Compares `|T^p| / |T|` with `2^(n-2) / (9 (q-1)^(n-2) q^((p-1)(n-p)))`, exactly.
pub fn corollary_c_check(n: usize, q: usize, t_image: &BigUint) -> Result<CorollaryCReport> {
    let (p, _) = prime_power(q as u64).ok_or(Error::NotPrimePower(q as u64))?;
    if n < 2 {
        return Err(Error::InvalidArgument(format!("needs n >= 2, got {n}")));
    }
    if q < 3 {
        return Err(Error::InvalidArgument("the bound concerns q > 2".into()));
    }
    let pu = p as usize;
    let hypothesis = q + 1 + pu > n;
    let q_exponent = (p as i64 - 1) * (n as i64 - p as i64);
    let t_order = triangular_order(n, q);
    let ratio = BigRational::new(BigInt::from(t_image.clone()), BigInt::from(t_order.clone()));
    let bound = int_pow_signed(2, n as i64 - 2)
        / (BigRational::from_integer(BigInt::from(9)) * int_pow_signed(q - 1, n as i64 - 2) * int_pow_signed(q, q_exponent));
    let slack = &ratio - &bound;
    let holds = !slack.is_negative();
    Ok(CorollaryCReport {
        n,
        q,
        p,
        hypothesis,
        q_exponent,
        t_image: t_image.clone(),
        t_order,
        ratio,
        bound,
        slack,
        holds,
        passed: !hypothesis || holds,
    })
}
