use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use super::partition::Partition;
use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldTable};
use crate::trimat::{KeySpace, TriMatrix};

fn factorial(k: usize) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

fn choose2(a: usize) -> usize {
    a * a.saturating_sub(1) / 2
}

/// `|D_delta|`: `(q-1)(q-2)...(q-k) n! / prod (m_i! (i!)^m_i)`.
pub fn d_delta_count(delta: &Partition, q: usize) -> Result<BigUint> {
    let k = delta.len();
    if k >= q {
        return Err(Error::InvalidArgument(format!(
            "type {delta} has {k} parts, needs fewer than q = {q}"
        )));
    }
    let falling = (q - k..q).fold(BigUint::one(), |acc, x| acc * x);
    let denom = delta
        .mults()
        .iter()
        .enumerate()
        .fold(BigUint::one(), |acc, (i, &m)| acc * factorial(m) * factorial(i + 1).pow(m as u32));
    let num = falling * factorial(delta.n());
    if &num % &denom != BigUint::ZERO {
        return Err(Error::Postcondition(format!("type count for {delta} is not integral")));
    }
    Ok(num / denom)
}

/// `|C_U(d)|` for `d` of type `delta`.
pub fn centralizer_order(delta: &Partition, q: usize) -> BigUint {
    BigUint::from(q).pow(delta.parts().iter().map(|&a| choose2(a)).sum::<usize>() as u32)
}

/// `[U : C_U(d)]`.
pub fn class_index(delta: &Partition, q: usize) -> BigUint {
    let n = delta.n();
    BigUint::from(q).pow((choose2(n) - delta.parts().iter().map(|&a| choose2(a)).sum::<usize>()) as u32)
}

/// Sizes of the fibres of the diagonal, as a partition.
pub fn diagonal_type(d: &TriMatrix) -> Result<Partition> {
    diag_type_of(d.diag().iter().map(|x| x.index()))
}

pub(crate) fn diag_type_of(values: impl Iterator<Item = usize>) -> Result<Partition> {
    let mut fibres: BTreeMap<usize, usize> = BTreeMap::new();
    for v in values {
        if v == 0 {
            return Err(Error::NotInvertible);
        }
        *fibres.entry(v).or_default() += 1;
    }
    Partition::new(fibres.into_values().collect())
}

/// A diagonal matrix of type `delta` with equal values in consecutive blocks.
pub fn standard_form(field: &Arc<FieldTable>, delta: &Partition) -> Result<TriMatrix> {
    if delta.len() >= field.order() {
        return Err(Error::InvalidArgument(format!("no diagonal matrix of type {delta} over GF({})", field.order())));
    }
    let values: Vec<FieldElement> = field.nonzero().collect();
    let diag = delta
        .parts()
        .iter()
        .enumerate()
        .flat_map(|(b, &a)| std::iter::repeat(values[b]).take(a))
        .collect();
    Ok(TriMatrix::diagonal(field, diag))
}

/// Every element of `D(n,q)`.
pub fn diagonal_group(field: &Arc<FieldTable>, n: usize) -> Vec<TriMatrix> {
    let values: Vec<FieldElement> = field.nonzero().collect();
    let base = values.len();
    let total = base.pow(n as u32);
    (0..total)
        .map(|mut code| {
            let diag = (0..n)
                .map(|_| {
                    let v = values[code % base];
                    code /= base;
                    v
                })
                .collect();
            TriMatrix::diagonal(field, diag)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CentReport {
    pub diagonal: Vec<usize>,
    pub partition: String,
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub brute_order: BigUint,
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub formula_order: BigUint,
    /// Whether every centralizing element vanishes between different value blocks.
    pub block_shaped: bool,
    pub passed: bool,
}

/// Filters `U(n,q)` for elements commuting with the diagonal matrix `d`.
pub fn cent_structure_check(d: &TriMatrix, max_elements: u64) -> Result<CentReport> {
    if !d.is_diagonal() || !d.is_invertible() {
        return Err(Error::InvalidArgument("expected an invertible diagonal matrix".into()));
    }
    let (n, field) = (d.n(), d.field());
    let space = KeySpace::unitriangular(n, field.order())?;
    if space.size() > max_elements {
        return Err(Error::SizeGuard {
            what: format!("centralizer filter over U({n},{}) (elements)", field.order()),
            required: space.size() as u128,
            limit: max_elements as u128,
        });
    }
    let delta = diagonal_type(d)?;
    let mut count = 0u64;
    let mut block_shaped = true;
    for key in 0..space.size() {
        let u = space.decode(field, key)?;
        if u.mul(d)? == d.mul(&u)? {
            count += 1;
            for (i, j) in crate::trimat::sub_positions(n) {
                if d.get(i, i) != d.get(j, j) && !u.get(i, j).is_zero() {
                    block_shaped = false;
                }
            }
        }
    }
    let formula_order = centralizer_order(&delta, field.order());
    let brute_order = BigUint::from(count);
    Ok(CentReport {
        diagonal: d.diag().iter().map(|x| x.index()).collect(),
        partition: delta.to_string(),
        passed: brute_order == formula_order && block_shaped,
        brute_order,
        formula_order,
        block_shaped,
    })
}

/// Runs the centralizer check over all of `D(n,q)`.
pub fn cent_structure_sweep(field: &Arc<FieldTable>, n: usize, max_elements: u64) -> Result<Vec<CentReport>> {
    diagonal_group(field, n)
        .iter()
        .map(|d| cent_structure_check(d, max_elements))
        .collect()
}
