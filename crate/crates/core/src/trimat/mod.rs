//! Lower-triangular matrices over GF(q).
//!
//! Rows and columns are 1-based throughout, matching the usual `e_rs` notation.
//! Strictly-lower entries are stored in the column-major "index order":
//! `(n,n-1) < (n-1,n-2) < (n,n-2) < ... < (n-1,1) < (n,1)`, i.e. columns from
//! right to left and rows top to bottom inside a column.

pub mod dense;
pub mod packing;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldTable};

pub use dense::{Dense, MAX_DIM};
pub use packing::{DiagonalMode, KeySpace, PackedKey};

/// Position of the strictly-lower entry `(i, j)` in index order.
#[inline]
pub fn sub_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(1 <= j && j < i && i <= n);
    (n - j) * (n - j - 1) / 2 + (i - j - 1)
}

/// All strictly-lower positions `(i, j)` in index order.
pub fn sub_positions(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..n).rev().flat_map(move |j| (j + 1..=n).map(move |i| (i, j)))
}

pub fn sub_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// `C(m, k) mod p` by Lucas' theorem on top of a Pascal table mod `p`.
pub fn binomial_mod_p(m: u64, k: u64, p: u32) -> u32 {
    if k > m {
        return 0;
    }
    let p64 = p as u64;
    let pascal = pascal_mod(p);
    let (mut m, mut k) = (m, k);
    let mut acc = 1u32;
    while k > 0 || m > 0 {
        let (mi, ki) = ((m % p64) as usize, (k % p64) as usize);
        if ki > mi {
            return 0;
        }
        acc = acc * pascal[mi][ki] % p;
        m /= p64;
        k /= p64;
    }
    acc
}

fn pascal_mod(p: u32) -> Vec<Vec<u32>> {
    let p = p as usize;
    let mut rows = vec![vec![0u32; p]; p];
    for a in 0..p {
        rows[a][0] = 1;
        for b in 1..=a {
            rows[a][b] = (rows[a - 1][b - 1] + if b < a { rows[a - 1][b] } else { 0 }) % p as u32;
        }
    }
    rows
}

#[derive(Clone)]
pub struct TriMatrix {
    n: usize,
    field: Arc<FieldTable>,
    diag: Vec<FieldElement>,
    sub: Vec<FieldElement>,
}

impl PartialEq for TriMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.field.order() == other.field.order()
            && self.diag == other.diag
            && self.sub == other.sub
    }
}

impl Eq for TriMatrix {}

impl Hash for TriMatrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.field.order().hash(state);
        self.diag.hash(state);
        self.sub.hash(state);
    }
}

impl fmt::Debug for TriMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TriMatrix[GF({})]", self.field.order())?;
        for i in 1..=self.n {
            let row: Vec<String> = (1..=i).map(|j| self.get(i, j).to_string()).collect();
            write!(f, " [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl TriMatrix {
    pub fn identity(field: &Arc<FieldTable>, n: usize) -> Self {
        TriMatrix {
            n,
            field: Arc::clone(field),
            diag: vec![FieldElement::ONE; n],
            sub: vec![FieldElement::ZERO; sub_len(n)],
        }
    }

    pub fn zero(field: &Arc<FieldTable>, n: usize) -> Self {
        TriMatrix {
            n,
            field: Arc::clone(field),
            diag: vec![FieldElement::ZERO; n],
            sub: vec![FieldElement::ZERO; sub_len(n)],
        }
    }

    /// Builds a matrix entry by entry; `entry(i, j)` is called for `i >= j`.
    pub fn from_fn(
        field: &Arc<FieldTable>,
        n: usize,
        mut entry: impl FnMut(usize, usize) -> FieldElement,
    ) -> Self {
        let mut m = Self::zero(field, n);
        for i in 1..=n {
            m.diag[i - 1] = entry(i, i);
        }
        for (k, (i, j)) in sub_positions(n).enumerate() {
            m.sub[k] = entry(i, j);
        }
        m
    }

    /// Unitriangular matrix from strictly-lower entries in index order.
    pub fn unitriangular(field: &Arc<FieldTable>, n: usize, sub: Vec<FieldElement>) -> Result<Self> {
        if sub.len() != sub_len(n) {
            return Err(Error::InvalidArgument(format!(
                "expected {} strictly-lower entries, got {}",
                sub_len(n),
                sub.len()
            )));
        }
        for &x in &sub {
            field.element(x.index())?;
        }
        Ok(TriMatrix {
            n,
            field: Arc::clone(field),
            diag: vec![FieldElement::ONE; n],
            sub,
        })
    }

    /// `I + sum of value * e_rs` over the given entries.
    pub fn identity_plus(
        field: &Arc<FieldTable>,
        n: usize,
        entries: &[(usize, usize, FieldElement)],
    ) -> Self {
        let mut m = Self::identity(field, n);
        for &(r, s, v) in entries {
            let cur = m.get(r, s);
            m.set(r, s, field.add(cur, v));
        }
        m
    }

    pub fn diagonal(field: &Arc<FieldTable>, diag: Vec<FieldElement>) -> Self {
        let n = diag.len();
        TriMatrix {
            n,
            field: Arc::clone(field),
            diag,
            sub: vec![FieldElement::ZERO; sub_len(n)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Arc<FieldTable> {
        &self.field
    }

    pub fn diag(&self) -> &[FieldElement] {
        &self.diag
    }

    /// Strictly-lower entries in index order.
    pub fn sub(&self) -> &[FieldElement] {
        &self.sub
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        assert!(i >= 1 && j >= 1 && i <= self.n && j <= self.n, "({i},{j}) outside {0}x{0}", self.n);
        if i == j {
            self.diag[i - 1]
        } else if i > j {
            self.sub[sub_index(self.n, i, j)]
        } else {
            FieldElement::ZERO
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: FieldElement) {
        assert!(j <= i && i <= self.n && j >= 1, "({i},{j}) is not a lower-triangular position");
        if i == j {
            self.diag[i - 1] = value;
        } else {
            let k = sub_index(self.n, i, j);
            self.sub[k] = value;
        }
    }

    pub fn is_unitriangular(&self) -> bool {
        self.diag.iter().all(|&d| d == FieldElement::ONE)
    }

    pub fn is_invertible(&self) -> bool {
        self.diag.iter().all(|d| !d.is_zero())
    }

    pub fn is_diagonal(&self) -> bool {
        self.sub.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_unitriangular() && self.is_diagonal()
    }

    /// Membership in `U_l(n,q)`: unitriangular with the first `l` sub-diagonals zero.
    pub fn in_lower_central_term(&self, l: usize) -> bool {
        self.is_unitriangular()
            && sub_positions(self.n)
                .zip(&self.sub)
                .all(|((i, j), x)| i - j > l || x.is_zero())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.field.order() != other.field.order() {
            return Err(Error::FieldMismatch {
                left: self.field.order(),
                right: other.field.order(),
            });
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let f = &*self.field;
        TriMatrix::from_fn(&self.field, self.n, |i, j| {
            (j..=i).fold(FieldElement::ZERO, |acc, k| {
                f.add(acc, f.mul(self.get(i, k), other.get(k, j)))
            })
        })
    }

    /// `A^m` by square-and-multiply; `A^0 = I`.
    pub fn pow(&self, mut m: u64) -> Self {
        let mut acc = Self::identity(&self.field, self.n);
        let mut base = self.clone();
        while m > 0 {
            if m & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            m >>= 1;
            if m > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_invertible() {
            return Err(Error::NotInvertible);
        }
        let f = &*self.field;
        let n = self.n;
        let mut inv = Self::zero(&self.field, n);
        // column by column forward substitution on lower-triangular L X = I
        for j in 1..=n {
            let djj = f.inv(self.get(j, j))?;
            inv.set(j, j, djj);
            for i in j + 1..=n {
                let s = (j..i).fold(FieldElement::ZERO, |acc, k| {
                    f.add(acc, f.mul(self.get(i, k), inv.get(k, j)))
                });
                let dii = f.inv(self.get(i, i))?;
                inv.set(i, j, f.neg(f.mul(dii, s)));
            }
        }
        Ok(inv)
    }

    /// `B^-1 A B`.
    pub fn conjugate_by(&self, b: &Self) -> Result<Self> {
        self.check_compatible(b)?;
        Ok(b.inverse()?.mul_unchecked(&self.mul_unchecked(b)))
    }

    /// `A - I` for unitriangular `A`: the nilpotent strictly-lower part.
    pub fn strictly_lower(&self) -> Self {
        TriMatrix {
            n: self.n,
            field: Arc::clone(&self.field),
            diag: vec![FieldElement::ZERO; self.n],
            sub: self.sub.clone(),
        }
    }

    /// `A^m` from the binomial expansion `(I + N)^m = I + sum_k C(m,k) N^k`.
    ///
    /// The k-th term's `(i, j)` entry is the sum over increasing chains
    /// `j < r_1 < ... < r_{k-1} < i` of `a_{i,r_{k-1}} ... a_{r_1,j}`, which is
    /// exactly `(N^k)_{ij}`; binomials are reduced mod p.
    pub fn mth_power_closed_form(&self, m: u64) -> Result<Self> {
        if !self.is_unitriangular() {
            return Err(Error::NotUnitriangular);
        }
        let f = &*self.field;
        let p = f.characteristic();
        let nil = self.strictly_lower();
        let mut out = Self::identity(&self.field, self.n);
        let mut term = nil.clone();
        let kmax = m.min(self.n.saturating_sub(1) as u64);
        for k in 1..=kmax {
            if k > 1 {
                term = banded_mul(&term, &nil, k as usize - 1, 1);
            }
            let c = binomial_mod_p(m, k, p);
            if c == 0 {
                continue;
            }
            let c = f.from_int(c as i64);
            for (slot, &t) in out.sub.iter_mut().zip(&term.sub) {
                *slot = f.add(*slot, f.mul(c, t));
            }
        }
        Ok(out)
    }

    /// `A^p` where only the chain-sum term `N^p` survives in characteristic p.
    pub fn pth_power_closed_form(&self) -> Result<Self> {
        if !self.is_unitriangular() {
            return Err(Error::NotUnitriangular);
        }
        let p = self.field.characteristic() as usize;
        if self.n <= p {
            return Ok(Self::identity(&self.field, self.n));
        }
        let nil = self.strictly_lower();
        let mut acc = nil.clone();
        for k in 1..p {
            acc = banded_mul(&acc, &nil, k, 1);
        }
        let mut out = acc;
        out.diag = vec![FieldElement::ONE; self.n];
        Ok(out)
    }
}

/// Product of strictly-lower `a` (zero below gap `ka`) and `b` (zero below gap `kb`):
/// entries with `i - j < ka + kb` vanish and the inner sum is restricted accordingly.
fn banded_mul(a: &TriMatrix, b: &TriMatrix, ka: usize, kb: usize) -> TriMatrix {
    let f = &*a.field;
    let n = a.n;
    let mut out = TriMatrix::zero(&a.field, n);
    for (idx, (i, j)) in sub_positions(n).enumerate() {
        if i - j < ka + kb {
            continue;
        }
        let mut acc = FieldElement::ZERO;
        for k in j + kb..=i - ka {
            acc = f.add(acc, f.mul(a.get(i, k), b.get(k, j)));
        }
        out.sub[idx] = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> Arc<FieldTable> {
        FieldTable::for_order(q).unwrap()
    }

    fn e(f: &FieldTable, i: i64) -> FieldElement {
        f.from_int(i)
    }

    #[test]
    fn index_order_matches_enumeration() {
        for n in 2..=7 {
            for (k, (i, j)) in sub_positions(n).enumerate() {
                assert_eq!(sub_index(n, i, j), k);
            }
        }
        let v: Vec<_> = sub_positions(3).collect();
        assert_eq!(v, vec![(3, 2), (2, 1), (3, 1)]);
    }

    #[test]
    fn identity_products() {
        let f = gf(3);
        let a = TriMatrix::from_fn(&f, 3, |i, j| e(&f, (i + 2 * j) as i64 % 2 + 1));
        let id = TriMatrix::identity(&f, 3);
        assert_eq!(a.mul(&id).unwrap(), a);
        assert_eq!(id.mul(&a).unwrap(), a);
    }

    #[test]
    fn elementary_products_in_u32() {
        let f = gf(2);
        let one = FieldElement::ONE;
        let x = TriMatrix::identity_plus(&f, 3, &[(2, 1, one)]);
        let y = TriMatrix::identity_plus(&f, 3, &[(3, 2, one)]);
        assert_eq!(
            x.mul(&y).unwrap(),
            TriMatrix::identity_plus(&f, 3, &[(2, 1, one), (3, 2, one)])
        );
        assert_eq!(
            y.mul(&x).unwrap(),
            TriMatrix::identity_plus(&f, 3, &[(2, 1, one), (3, 2, one), (3, 1, one)])
        );
    }

    #[test]
    fn mismatched_operands() {
        let a = TriMatrix::identity(&gf(2), 3);
        let b = TriMatrix::identity(&gf(3), 3);
        let c = TriMatrix::identity(&gf(2), 4);
        assert!(matches!(a.mul(&b), Err(Error::FieldMismatch { .. })));
        assert!(matches!(a.mul(&c), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn small_powers() {
        let f = gf(5);
        let a = TriMatrix::identity_plus(&f, 3, &[(2, 1, e(&f, 2)), (3, 1, e(&f, 4))]);
        assert_eq!(a.pow(0), TriMatrix::identity(&f, 3));
        assert_eq!(a.pow(1), a);
        assert!(a.pow(5).is_identity());
    }

    #[test]
    fn square_of_generic_u3() {
        // (I+N)^2 = I + 2N + N^2, and N^2 only reaches (3,1) with a*c
        let f = gf(5);
        let (a, b, c) = (e(&f, 2), e(&f, 3), e(&f, 4));
        let m = TriMatrix::identity_plus(&f, 3, &[(2, 1, a), (3, 2, c), (3, 1, b)]);
        let sq = m.mth_power_closed_form(2).unwrap();
        let expected = f.add(f.mul(e(&f, 2), b), f.mul(a, c));
        assert_eq!(sq.get(3, 1), expected);
        assert_eq!(sq, m.pow(2));

        let f2 = gf(2);
        let one = FieldElement::ONE;
        let m2 = TriMatrix::identity_plus(&f2, 3, &[(2, 1, one), (3, 2, one), (3, 1, one)]);
        assert_eq!(m2.mth_power_closed_form(2).unwrap().get(3, 1), one);
    }

    #[test]
    fn closed_form_m1_is_identity_map() {
        let f = gf(4);
        let a = TriMatrix::unitriangular(&f, 4, (0..6).map(|i| FieldElement::from_raw(i % 4)).collect())
            .unwrap();
        assert_eq!(a.mth_power_closed_form(1).unwrap(), a);
    }

    #[test]
    fn pth_power_of_u3_over_gf2() {
        let f = gf(2);
        let one = FieldElement::ONE;
        let a = TriMatrix::identity_plus(&f, 3, &[(2, 1, one), (3, 2, one)]);
        let expected = TriMatrix::identity_plus(&f, 3, &[(3, 1, one)]);
        assert_eq!(a.pth_power_closed_form().unwrap(), expected);
        assert_eq!(a.mul(&a).unwrap(), expected);
    }

    #[test]
    fn closed_forms_reject_non_unitriangular() {
        let f = gf(3);
        let d = TriMatrix::diagonal(&f, vec![FieldElement::ONE, e(&f, 2)]);
        assert!(matches!(d.mth_power_closed_form(3), Err(Error::NotUnitriangular)));
        assert!(matches!(d.pth_power_closed_form(), Err(Error::NotUnitriangular)));
    }

    #[test]
    fn inverse_roundtrip() {
        let f = gf(7);
        let a = TriMatrix::from_fn(&f, 4, |i, j| e(&f, (3 * i + j) as i64 % 6 + 1));
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).unwrap().is_identity());
        let singular = TriMatrix::zero(&f, 2);
        assert!(matches!(singular.inverse(), Err(Error::NotInvertible)));
    }

    #[test]
    fn binomials_mod_p() {
        assert_eq!(binomial_mod_p(5, 2, 5), 0);
        assert_eq!(binomial_mod_p(5, 5, 5), 1);
        assert_eq!(binomial_mod_p(6, 2, 5), 0);
        assert_eq!(binomial_mod_p(7, 2, 3), 21 % 3);
        assert_eq!(binomial_mod_p(10, 4, 7), (210 % 7) as u32);
        assert_eq!(binomial_mod_p(3, 4, 2), 0);
        for m in 0..40u64 {
            for k in 0..=m {
                let exact = (0..k).fold(1u128, |acc, t| acc * (m - t) as u128 / (t + 1) as u128);
                for p in [2u32, 3, 5, 7] {
                    assert_eq!(binomial_mod_p(m, k, p) as u128, exact % p as u128);
                }
            }
        }
    }

    #[test]
    fn lower_central_terms() {
        let f = gf(2);
        let one = FieldElement::ONE;
        let a = TriMatrix::identity_plus(&f, 4, &[(3, 1, one), (4, 1, one)]);
        assert!(a.in_lower_central_term(1));
        assert!(!a.in_lower_central_term(2));
        assert!(TriMatrix::identity(&f, 4).in_lower_central_term(3));
    }
}
