//! The sub-diagonal matrices `A(a_1, ..., a_{n-l-1}) = I + sum a_i e_{l+1+i, i}` and the
//! two families of large conjugacy classes built from them, together with explicit p-th
//! roots supported on the first sub-diagonal.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldTable};
use crate::trimat::TriMatrix;

pub fn canonical_element(field: &Arc<FieldTable>, n: usize, l: usize, a: &[FieldElement]) -> Result<TriMatrix> {
    if n < 2 || l > n - 2 {
        return Err(Error::InvalidArgument(format!("need 0 <= l <= n-2, got n={n}, l={l}")));
    }
    if a.len() != n - l - 1 {
        return Err(Error::InvalidArgument(format!(
            "expected {} sub-diagonal values, got {}",
            n - l - 1,
            a.len()
        )));
    }
    let entries: Vec<_> = a
        .iter()
        .enumerate()
        .map(|(k, &v)| (l + 2 + k, k + 1, v))
        .collect();
    for &(_, _, v) in &entries {
        field.element(v.index())?;
    }
    Ok(TriMatrix::identity_plus(field, n, &entries))
}

/// Reads the parameters back off a matrix of the form `A(a_1, ..., a_{n-l-1})`.
pub fn canonical_parameters(a: &TriMatrix, l: usize) -> Option<Vec<FieldElement>> {
    let n = a.n();
    if n < 2 || l > n - 2 || !a.is_unitriangular() {
        return None;
    }
    for (i, j) in crate::trimat::sub_positions(n) {
        if i - j != l + 1 && !a.get(i, j).is_zero() {
            return None;
        }
    }
    Some((1..n - l).map(|k| a.get(l + 1 + k, k)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyKind {
    /// Leading zeros: `a_i = 0` for `i <= m`, nonzero after.
    A,
    /// Trailing zeros: `a_i` nonzero for `i < m`, zero from `m` on.
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CanonicalFamilySpec {
    pub n: usize,
    pub q: usize,
    pub l: usize,
    pub kind: FamilyKind,
    pub m: usize,
}

impl fmt::Display for CanonicalFamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            FamilyKind::A => "A",
            FamilyKind::B => "B",
        };
        write!(f, "{tag}_{} in U({},{}) (l={})", self.m, self.n, self.q, self.l)
    }
}

impl CanonicalFamilySpec {
    pub fn new(n: usize, q: usize, l: usize, kind: FamilyKind, m: usize) -> Result<Self> {
        if n < 2 || l > n - 2 {
            return Err(Error::InvalidArgument(format!("need 0 <= l <= n-2, got n={n}, l={l}")));
        }
        let len = n - l - 1;
        let ok = match kind {
            FamilyKind::A => m <= len / 2 + 1,
            FamilyKind::B => len / 2 < m && m <= len + 1,
        };
        if !ok {
            return Err(Error::InvalidArgument(format!("index m={m} out of range for {kind:?} with n-l-1={len}")));
        }
        Ok(CanonicalFamilySpec { n, q, l, kind, m })
    }

    /// Every admissible family for `(n, q, l)`, A-families first.
    pub fn all(n: usize, q: usize, l: usize) -> Result<Vec<Self>> {
        if n < 2 || l > n - 2 {
            return Err(Error::InvalidArgument(format!("need 0 <= l <= n-2, got n={n}, l={l}")));
        }
        let len = n - l - 1;
        let a = (0..=len / 2 + 1).map(|m| CanonicalFamilySpec { n, q, l, kind: FamilyKind::A, m });
        let b = (len / 2 + 1..=len + 1).map(|m| CanonicalFamilySpec { n, q, l, kind: FamilyKind::B, m });
        Ok(a.chain(b).collect())
    }

    pub fn param_len(&self) -> usize {
        self.n - self.l - 1
    }

    /// For each parameter slot, whether it ranges over nonzero values (else it is zero).
    pub fn nonzero_slots(&self) -> Vec<bool> {
        (1..=self.param_len())
            .map(|i| match self.kind {
                FamilyKind::A => i > self.m,
                FamilyKind::B => i < self.m,
            })
            .collect()
    }

    pub fn class_size_exponent(&self) -> usize {
        let len = self.param_len();
        let full = len * (len.saturating_sub(1)) / 2;
        let cut = match self.kind {
            FamilyKind::A => self.m * self.m.saturating_sub(1) / 2,
            FamilyKind::B => {
                let t = len + 1 - self.m;
                t * t.saturating_sub(1) / 2
            }
        };
        full - cut
    }

    pub fn class_size(&self) -> BigUint {
        BigUint::from(self.q).pow(self.class_size_exponent() as u32)
    }

    pub fn representative_count(&self) -> BigUint {
        let free = self.nonzero_slots().iter().filter(|&&b| b).count();
        BigUint::from(self.q - 1).pow(free as u32)
    }

    pub fn representatives(&self, field: &Arc<FieldTable>) -> Result<Vec<TriMatrix>> {
        if field.order() != self.q {
            return Err(Error::FieldMismatch {
                left: field.order(),
                right: self.q,
            });
        }
        let slots = self.nonzero_slots();
        let free = slots.iter().filter(|&&b| b).count();
        let base = self.q - 1;
        let total = base.pow(free as u32);
        let mut out = Vec::with_capacity(total);
        for mut code in 0..total {
            let params: Vec<FieldElement> = slots
                .iter()
                .map(|&nz| {
                    if nz {
                        let v = code % base + 1;
                        code /= base;
                        FieldElement::from_raw(v as u8)
                    } else {
                        FieldElement::ZERO
                    }
                })
                .collect();
            out.push(canonical_element(field, self.n, self.l, &params)?);
        }
        Ok(out)
    }

    pub fn contains(&self, a: &TriMatrix) -> bool {
        if a.n() != self.n || a.field().order() != self.q {
            return false;
        }
        match canonical_parameters(a, self.l) {
            Some(params) => params
                .iter()
                .zip(self.nonzero_slots())
                .all(|(v, nz)| v.is_zero() != nz),
            None => false,
        }
    }
}

/// A p-th root of a family member, supported on the first sub-diagonal.
///
/// With `c_i` the `(i, i-1)` entry of the root, `C^p` has `(i+p, i)` entry
/// `c_{i+1} ... c_{i+p}` and nothing else, so the entries are solved left to right:
/// `c_{p+i+1} = (c_{i+2} ... c_{p+i})^{-1} a_{i+1}`. For A-families the first `m` entries
/// are zero and the next `p - 1` are one; a zero parameter forces a zero entry.
pub fn pth_root_of_family(spec: &CanonicalFamilySpec, a: &TriMatrix) -> Result<TriMatrix> {
    let field = a.field();
    let p = field.characteristic() as usize;
    let n = spec.n;
    if spec.l + 1 != p {
        return Err(Error::InvalidArgument(format!("roots need l = p-1 = {}, got l={}", p - 1, spec.l)));
    }
    if n <= p {
        return Err(Error::InvalidArgument(format!("roots need n > p, got n={n}, p={p}")));
    }
    if !spec.contains(a) {
        return Err(Error::InvalidArgument(format!("matrix is not a member of {spec}")));
    }
    let params = canonical_parameters(a, spec.l).expect("membership checked");

    // c[i] holds the (i, i-1) entry, i in 2..=n
    let mut c = vec![FieldElement::ZERO; n + 1];
    let lead = match spec.kind {
        FamilyKind::A => spec.m,
        FamilyKind::B => 0,
    };
    for (i, slot) in c.iter_mut().enumerate().take(n + 1).skip(2) {
        *slot = if i <= lead + 1 {
            FieldElement::ZERO
        } else if i <= lead + p {
            FieldElement::ONE
        } else {
            FieldElement::ZERO
        };
    }
    for i in lead..n - p {
        let target = params[i];
        c[p + i + 1] = if target.is_zero() {
            FieldElement::ZERO
        } else {
            let prod = (i + 2..=p + i).fold(FieldElement::ONE, |acc, k| field.mul(acc, c[k]));
            field.mul(field.inv(prod)?, target)
        };
    }

    let entries: Vec<_> = (2..=n).map(|i| (i, i - 1, c[i])).collect();
    let root = TriMatrix::identity_plus(field, n, &entries);
    if root.pth_power_closed_form()? != *a {
        return Err(Error::Postcondition(format!("constructed root does not reach the {spec} member")));
    }
    Ok(root)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> Arc<FieldTable> {
        FieldTable::for_order(q).unwrap()
    }

    #[test]
    fn placement() {
        let f = gf(3);
        let one = FieldElement::ONE;
        assert_eq!(
            canonical_element(&f, 4, 1, &[one, one]).unwrap(),
            TriMatrix::identity_plus(&f, 4, &[(3, 1, one), (4, 2, one)])
        );
        let zero = FieldElement::ZERO;
        assert!(canonical_element(&f, 5, 2, &[zero, zero]).unwrap().is_identity());
        assert!(canonical_element(&f, 4, 1, &[one]).is_err());
        let m = canonical_element(&f, 5, 1, &[one, zero, f.from_int(2)]).unwrap();
        assert!(m.in_lower_central_term(1));
        assert_eq!(canonical_parameters(&m, 1).unwrap(), vec![one, zero, f.from_int(2)]);
    }

    #[test]
    fn root_of_a12_in_u43() {
        let f = gf(3);
        let a = canonical_element(&f, 4, 1, &[FieldElement::ONE, f.from_int(2)]).unwrap();
        let spec = CanonicalFamilySpec::new(4, 3, 1, FamilyKind::A, 0).unwrap();
        // l = 1 is not p - 1 for p = 3
        assert!(pth_root_of_family(&spec, &a).is_err());

        let f2 = gf(2);
        let spec2 = CanonicalFamilySpec::new(4, 2, 1, FamilyKind::A, 0).unwrap();
        let a2 = canonical_element(&f2, 4, 1, &[FieldElement::ONE, FieldElement::ONE]).unwrap();
        let c = pth_root_of_family(&spec2, &a2).unwrap();
        assert_eq!(c.mul(&c).unwrap(), a2);
    }

    #[test]
    fn root_over_gf9_with_square_map() {
        // p = 3, l = 2, n = 4 needs a single parameter
        let f = gf(9);
        for v in f.nonzero() {
            let a = canonical_element(&f, 4, 2, &[v]).unwrap();
            let spec = CanonicalFamilySpec::new(4, 9, 2, FamilyKind::A, 0).unwrap();
            let c = pth_root_of_family(&spec, &a).unwrap();
            assert_eq!(c.pow(3), a);
        }
    }

    #[test]
    fn b_family_roots_vanish_after_the_cut() {
        let f = gf(2);
        let n = 7;
        let spec = CanonicalFamilySpec::new(n, 2, 1, FamilyKind::B, 4).unwrap();
        for a in spec.representatives(&f).unwrap() {
            let c = pth_root_of_family(&spec, &a).unwrap();
            for i in 2 + spec.m..=n {
                assert!(c.get(i, i - 1).is_zero());
            }
            assert_eq!(c.pow(2), a);
        }
    }

    #[test]
    fn a_family_roots_have_the_stated_prefix() {
        let f = gf(3);
        let n = 7;
        let spec = CanonicalFamilySpec::new(n, 3, 2, FamilyKind::A, 1).unwrap();
        for a in spec.representatives(&f).unwrap() {
            let c = pth_root_of_family(&spec, &a).unwrap();
            for i in 2..=spec.m + 1 {
                assert!(c.get(i, i - 1).is_zero());
            }
            for i in spec.m + 2..=spec.m + 3 {
                assert_eq!(c.get(i, i - 1), FieldElement::ONE);
            }
            assert_eq!(c.pow(3), a);
        }
    }

    #[test]
    fn family_ranges() {
        // n - l - 1 = 3: A_0..A_2, B_2..B_4
        let all = CanonicalFamilySpec::all(5, 2, 1).unwrap();
        let a: Vec<_> = all.iter().filter(|s| s.kind == FamilyKind::A).map(|s| s.m).collect();
        let b: Vec<_> = all.iter().filter(|s| s.kind == FamilyKind::B).map(|s| s.m).collect();
        assert_eq!(a, vec![0, 1, 2]);
        assert_eq!(b, vec![2, 3, 4]);
        assert!(CanonicalFamilySpec::new(5, 2, 1, FamilyKind::A, 3).is_err());
        assert!(CanonicalFamilySpec::new(5, 2, 1, FamilyKind::B, 1).is_err());
    }

    #[test]
    fn class_exponents() {
        let s = CanonicalFamilySpec::new(5, 2, 1, FamilyKind::A, 0).unwrap();
        assert_eq!(s.class_size(), BigUint::from(8u32));
        let s = CanonicalFamilySpec::new(5, 2, 1, FamilyKind::A, 1).unwrap();
        assert_eq!(s.class_size(), BigUint::from(8u32));
        let s = CanonicalFamilySpec::new(5, 2, 1, FamilyKind::B, 4).unwrap();
        assert_eq!(s.class_size_exponent(), 3);
        assert_eq!(s.representative_count(), BigUint::from(1u32));
    }
}
