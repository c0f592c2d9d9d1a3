//! Fixed-size lower-triangular matrices for the enumeration and orbit kernels.
//!
//! Indices here are 0-based: `e[i][j]` with `i >= j` is the entry in row `i + 1`,
//! column `j + 1`. Entries are raw field indices.

use std::sync::Arc;

use super::TriMatrix;
use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldTable};

pub const MAX_DIM: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Dense {
    pub n: usize,
    pub e: [[u8; MAX_DIM]; MAX_DIM],
}

impl Dense {
    pub fn identity(n: usize) -> Self {
        let mut e = [[0u8; MAX_DIM]; MAX_DIM];
        for (i, row) in e.iter_mut().enumerate().take(n) {
            row[i] = 1;
        }
        Dense { n, e }
    }

    pub fn from_tri(m: &TriMatrix) -> Result<Self> {
        if m.n() > MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "dense kernels support n <= {MAX_DIM}, got {}",
                m.n()
            )));
        }
        let mut d = Dense {
            n: m.n(),
            e: [[0u8; MAX_DIM]; MAX_DIM],
        };
        for i in 0..m.n() {
            for j in 0..=i {
                d.e[i][j] = m.get(i + 1, j + 1).index() as u8;
            }
        }
        Ok(d)
    }

    pub fn to_tri(&self, field: &Arc<FieldTable>) -> TriMatrix {
        TriMatrix::from_fn(field, self.n, |i, j| FieldElement::from_raw(self.e[i - 1][j - 1]))
    }

    pub fn mul(&self, other: &Dense, f: &FieldTable) -> Dense {
        let (add, mul, q) = (f.add_table(), f.mul_table(), f.order());
        let mut out = Dense {
            n: self.n,
            e: [[0u8; MAX_DIM]; MAX_DIM],
        };
        for i in 0..self.n {
            for j in 0..=i {
                let mut acc = 0u8;
                for k in j..=i {
                    let t = mul[self.e[i][k] as usize * q + other.e[k][j] as usize];
                    acc = add[acc as usize * q + t as usize];
                }
                out.e[i][j] = acc;
            }
        }
        out
    }

    /// In-place `g^-1 A g` with `g = I + lambda * e_{row+1,row}` (0-based `row`).
    pub fn conjugate_elementary(&mut self, row: usize, lambda: u8, f: &FieldTable) {
        let (add, mul, neg, q) = (f.add_table(), f.mul_table(), f.neg_table(), f.order());
        let n = self.n;
        // A g: column row += lambda * column row+1
        for x in row + 1..n {
            let t = mul[self.e[x][row + 1] as usize * q + lambda as usize];
            self.e[x][row] = add[self.e[x][row] as usize * q + t as usize];
        }
        // g^-1 (A g): row row+1 -= lambda * row row
        let nl = neg[lambda as usize] as usize;
        for y in 0..=row {
            let t = mul[self.e[row][y] as usize * q + nl];
            self.e[row + 1][y] = add[self.e[row + 1][y] as usize * q + t as usize];
        }
    }

    /// In-place `d^-1 A d` with `d` the diagonal matrix carrying `lambda` at `pos` (0-based).
    pub fn conjugate_diagonal(&mut self, pos: usize, lambda: u8, f: &FieldTable) {
        let (mul, inv, q) = (f.mul_table(), f.inv_table(), f.order());
        let li = inv[lambda as usize] as usize;
        for y in 0..pos {
            self.e[pos][y] = mul[self.e[pos][y] as usize * q + li];
        }
        for x in pos + 1..self.n {
            self.e[x][pos] = mul[self.e[x][pos] as usize * q + lambda as usize];
        }
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| self.e[i][i] == 1 && (0..i).all(|j| self.e[i][j] == 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugation_kernels_match_matrix_products() {
        let f = FieldTable::for_order(4).unwrap();
        let a = TriMatrix::from_fn(&f, 4, |i, j| {
            FieldElement::from_raw(if i == j { 1 + (i % 3) as u8 } else { ((i * 3 + j) % 4) as u8 })
        });
        for row in 0..3 {
            for lambda in 1..4u8 {
                let g = TriMatrix::identity_plus(&f, 4, &[(row + 2, row + 1, FieldElement::from_raw(lambda))]);
                let mut d = Dense::from_tri(&a).unwrap();
                d.conjugate_elementary(row, lambda, &f);
                assert_eq!(d.to_tri(&f), a.conjugate_by(&g).unwrap());
            }
        }
        for pos in 0..4 {
            for lambda in 1..4u8 {
                let mut diag = vec![FieldElement::ONE; 4];
                diag[pos] = FieldElement::from_raw(lambda);
                let g = TriMatrix::diagonal(&f, diag);
                let mut d = Dense::from_tri(&a).unwrap();
                d.conjugate_diagonal(pos, lambda, &f);
                assert_eq!(d.to_tri(&f), a.conjugate_by(&g).unwrap());
            }
        }
    }

    #[test]
    fn dense_product_matches() {
        let f = FieldTable::for_order(5).unwrap();
        let a = TriMatrix::from_fn(&f, 5, |i, j| f.from_int((i * i + 2 * j) as i64 % 4 + 1));
        let b = TriMatrix::from_fn(&f, 5, |i, j| f.from_int((i + 3 * j) as i64 % 4 + 1));
        let (da, db) = (Dense::from_tri(&a).unwrap(), Dense::from_tri(&b).unwrap());
        assert_eq!(da.mul(&db, &f).to_tri(&f), a.mul(&b).unwrap());
        assert!(Dense::identity(5).is_identity());
    }
}
