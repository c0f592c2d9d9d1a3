use num_integer::Integer;

use crate::error::{Error, Result};
use crate::trimat::TriMatrix;

fn multiplicative_order(g: &TriMatrix, value: crate::FieldElement) -> u64 {
    let f = g.field();
    let mut x = value;
    let mut k = 1;
    while x != crate::FieldElement::ONE {
        x = f.mul(x, value);
        k += 1;
    }
    k
}

/// Order of an invertible triangular matrix: the order of its diagonal times the
/// order of the unipotent power that remains.
pub fn element_order(g: &TriMatrix) -> Result<u64> {
    if !g.is_invertible() {
        return Err(Error::NotInvertible);
    }
    let semisimple = g
        .diag()
        .iter()
        .fold(1u64, |acc, &d| acc.lcm(&multiplicative_order(g, d)));
    let p = g.field().characteristic() as u64;
    let mut h = g.pow(semisimple);
    let mut order = semisimple;
    while !h.is_identity() {
        h = h.pow(p);
        order *= p;
    }
    Ok(order)
}

/// Splits `g` as `u d0` with `u` of p-power order and `d0` of order prime to p.
pub fn p_part_decompose(g: &TriMatrix) -> Result<(TriMatrix, TriMatrix)> {
    let order = element_order(g)?;
    let p = g.field().characteristic() as u64;
    let mut pk = 1u64;
    while order % (pk * p) == 0 {
        pk *= p;
    }
    let coprime = order / pk;
    // alpha * coprime + beta * pk = 1
    let e = (coprime as i128).extended_gcd(&(pk as i128));
    debug_assert_eq!(e.gcd, 1);
    let modulus = order as i128;
    let a = (e.x * coprime as i128).rem_euclid(modulus) as u64;
    let b = (e.y * pk as i128).rem_euclid(modulus) as u64;
    Ok((g.pow(a), g.pow(b)))
}
