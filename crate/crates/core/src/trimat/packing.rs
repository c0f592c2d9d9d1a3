//! Mixed-radix packing of matrices into integer keys.
//!
//! A key space fixes which strictly-lower positions are free (those with `i - j > band`)
//! and whether the diagonal is free. Free strictly-lower entries are radix-q digits in
//! index order, least significant first; free diagonal entries follow as radix-(q-1)
//! digits holding `index - 1` of the nonzero diagonal value.

use std::sync::Arc;

use super::{sub_index, sub_positions, Dense, TriMatrix};
use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalMode {
    Unit,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PackedKey {
    pub digits: u64,
    pub bit_width: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySpace {
    n: usize,
    q: usize,
    band: usize,
    diag: DiagonalMode,
    /// Free strictly-lower positions (1-based) in index order.
    positions: Vec<(usize, usize)>,
    size: u64,
}

impl KeySpace {
    pub fn new(n: usize, q: usize, band: usize, diag: DiagonalMode) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidArgument(format!("field order {q}")));
        }
        let positions: Vec<_> = sub_positions(n).filter(|&(i, j)| i - j > band).collect();
        let mut size: u128 = (q as u128).checked_pow(positions.len() as u32).unwrap_or(u128::MAX);
        if diag == DiagonalMode::Free {
            size = size.saturating_mul(((q - 1) as u128).pow(n as u32));
        }
        if size > u64::MAX as u128 {
            return Err(Error::SizeGuard {
                what: format!("a packed key space for n={n}, q={q} (keys)"),
                required: size,
                limit: u64::MAX as u128,
            });
        }
        Ok(KeySpace {
            n,
            q,
            band,
            diag,
            positions,
            size: size as u64,
        })
    }

    /// Keys for `U(n,q)`.
    pub fn unitriangular(n: usize, q: usize) -> Result<Self> {
        Self::new(n, q, 0, DiagonalMode::Unit)
    }

    /// Keys for `U_l(n,q)`.
    pub fn lower_central(n: usize, q: usize, l: usize) -> Result<Self> {
        Self::new(n, q, l, DiagonalMode::Unit)
    }

    /// Keys for `T(n,q)`.
    pub fn triangular(n: usize, q: usize) -> Result<Self> {
        Self::new(n, q, 0, DiagonalMode::Free)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn diagonal_mode(&self) -> DiagonalMode {
        self.diag
    }

    pub fn positions(&self) -> &[(usize, usize)] {
        &self.positions
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn bit_width(&self) -> u32 {
        if self.size <= 1 {
            0
        } else {
            64 - (self.size - 1).leading_zeros()
        }
    }

    fn packed(&self, digits: u64) -> PackedKey {
        PackedKey {
            digits,
            bit_width: self.bit_width(),
        }
    }

    pub fn encode(&self, a: &TriMatrix) -> Result<PackedKey> {
        if a.n() != self.n {
            return Err(Error::DimensionMismatch {
                left: a.n(),
                right: self.n,
            });
        }
        if a.field().order() != self.q {
            return Err(Error::FieldMismatch {
                left: a.field().order(),
                right: self.q,
            });
        }
        for (i, j) in sub_positions(self.n) {
            if i - j <= self.band && !a.get(i, j).is_zero() {
                return Err(Error::OutsideKeySpace { row: i, col: j });
            }
        }
        let mut key = 0u64;
        let mut weight = 1u64;
        for &(i, j) in &self.positions {
            key += a.get(i, j).index() as u64 * weight;
            weight = weight.wrapping_mul(self.q as u64);
        }
        match self.diag {
            DiagonalMode::Unit => {
                if !a.is_unitriangular() {
                    return Err(Error::NotUnitriangular);
                }
            }
            DiagonalMode::Free => {
                if !a.is_invertible() {
                    return Err(Error::NotInvertible);
                }
                for &d in a.diag() {
                    key += (d.index() as u64 - 1) * weight;
                    weight = weight.wrapping_mul(self.q as u64 - 1);
                }
            }
        }
        Ok(self.packed(key))
    }

    pub fn decode(&self, field: &Arc<FieldTable>, key: u64) -> Result<TriMatrix> {
        if field.order() != self.q {
            return Err(Error::FieldMismatch {
                left: field.order(),
                right: self.q,
            });
        }
        if key >= self.size {
            return Err(Error::KeyOutOfRange { key, size: self.size });
        }
        let mut m = TriMatrix::identity(field, self.n);
        let mut rest = key;
        for &(i, j) in &self.positions {
            m.set(i, j, FieldElement::from_raw((rest % self.q as u64) as u8));
            rest /= self.q as u64;
        }
        if self.diag == DiagonalMode::Free {
            for i in 1..=self.n {
                m.set(i, i, FieldElement::from_raw((rest % (self.q as u64 - 1)) as u8 + 1));
                rest /= self.q as u64 - 1;
            }
        }
        Ok(m)
    }

    /// Fast encode for kernels; the caller guarantees membership.
    #[inline]
    pub fn encode_dense(&self, d: &Dense) -> u64 {
        let mut key = 0u64;
        let mut weight = 1u64;
        for &(i, j) in &self.positions {
            key += d.e[i - 1][j - 1] as u64 * weight;
            weight = weight.wrapping_mul(self.q as u64);
        }
        if self.diag == DiagonalMode::Free {
            for i in 0..self.n {
                key += (d.e[i][i] as u64 - 1) * weight;
                weight = weight.wrapping_mul(self.q as u64 - 1);
            }
        }
        key
    }

    pub fn decode_dense(&self, key: u64) -> Dense {
        debug_assert!(key < self.size);
        let mut d = Dense::identity(self.n);
        let mut rest = key;
        for &(i, j) in &self.positions {
            d.e[i - 1][j - 1] = (rest % self.q as u64) as u8;
            rest /= self.q as u64;
        }
        if self.diag == DiagonalMode::Free {
            for i in 0..self.n {
                d.e[i][i] = (rest % (self.q as u64 - 1)) as u8 + 1;
                rest /= self.q as u64 - 1;
            }
        }
        d
    }

    /// Position of `(i, j)` among the free digits, if free.
    pub fn digit_of(&self, i: usize, j: usize) -> Option<usize> {
        if i <= j || i - j <= self.band {
            return None;
        }
        // free positions keep index order, so the rank is the count of free positions before
        let target = sub_index(self.n, i, j);
        Some(
            self.positions
                .iter()
                .take_while(|&&(a, b)| sub_index(self.n, a, b) < target)
                .count(),
        )
    }
}
