//! Table-driven arithmetic in GF(q) for q = p^e ≤ 64.
//!
//! An element is identified by its table index. Index `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`
//! stands for the residue class of `c_0 + c_1 x + ... + c_{e-1} x^{e-1}` modulo the stored
//! Conway polynomial, so indices `0..p` form the prime subfield in natural order.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: usize = 64;

/// Conway polynomials for the non-prime orders up to 64, coefficients from the
/// constant term upwards (monic).
const CONWAY: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 2, &[2, 4, 1]),
    (7, 2, &[3, 6, 1]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u8);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub(crate) const fn from_raw(index: u8) -> Self {
        FieldElement(index)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Splits `q` as `p^e`, if it is a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p as u32, e))
}

fn smallest_primitive_root(p: u32) -> u32 {
    if p == 2 {
        return 1;
    }
    let order = p - 1;
    let mut factors = Vec::new();
    let mut m = order;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            factors.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    let pow_mod = |mut b: u64, mut k: u64| {
        let mut acc = 1u64;
        b %= p as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * b % p as u64;
            }
            b = b * b % p as u64;
            k >>= 1;
        }
        acc
    };
    (2..p)
        .find(|&g| {
            factors
                .iter()
                .all(|&f| pow_mod(g as u64, (order / f) as u64) != 1)
        })
        .expect("every prime has a primitive root")
}

/// The Conway polynomial used to model GF(p^e).
pub fn conway_modulus(p: u32, e: u32) -> Option<Vec<u32>> {
    if e == 1 {
        let g = smallest_primitive_root(p);
        return Some(vec![(p - g) % p, 1]);
    }
    CONWAY
        .iter()
        .find(|&&(cp, ce, _)| cp == p && ce == e)
        .map(|&(_, _, c)| c.to_vec())
}

/// Immutable lookup tables for one finite field.
#[derive(Clone)]
pub struct FieldTable {
    p: u32,
    e: u32,
    q: usize,
    modulus: Vec<u32>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl fmt::Debug for FieldTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldTable")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldTable {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e
    }
}

impl Eq for FieldTable {}

impl FieldTable {
    pub fn new(p: u32, e: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let q = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        if e == 0 || q > MAX_ORDER as u64 {
            return Err(Error::UnsupportedOrder { p, e });
        }
        let q = q as usize;
        let modulus = conway_modulus(p, e).ok_or(Error::UnsupportedOrder { p, e })?;

        let digits = |x: usize| -> Vec<u32> {
            let mut d = vec![0u32; e as usize];
            let mut x = x;
            for slot in d.iter_mut() {
                *slot = (x % p as usize) as u32;
                x /= p as usize;
            }
            d
        };
        let index = |d: &[u32]| -> usize { d.iter().rev().fold(0, |acc, &c| acc * p as usize + c as usize) };

        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for x in 0..q {
            let dx = digits(x);
            for y in 0..q {
                let dy = digits(y);
                let sum: Vec<u32> = dx.iter().zip(&dy).map(|(a, b)| (a + b) % p).collect();
                add[x * q + y] = index(&sum) as u8;

                // schoolbook product, then reduce by the monic modulus
                let mut prod = vec![0u32; 2 * e as usize];
                for (i, a) in dx.iter().enumerate() {
                    for (j, b) in dy.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + a * b) % p;
                    }
                }
                for deg in (e as usize..prod.len()).rev() {
                    let c = prod[deg];
                    if c == 0 {
                        continue;
                    }
                    for (k, m) in modulus.iter().enumerate().take(e as usize) {
                        let slot = deg - e as usize + k;
                        prod[slot] = (prod[slot] + (p - c) * m) % p;
                    }
                    prod[deg] = 0;
                }
                mul[x * q + y] = index(&prod[..e as usize]) as u8;
            }
        }

        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for x in 0..q {
            neg[x] = (0..q).find(|&y| add[x * q + y] == 0).unwrap() as u8;
            if x != 0 {
                inv[x] = (1..q)
                    .find(|&y| mul[x * q + y] == 1)
                    .ok_or(Error::UnsupportedOrder { p, e })? as u8;
            }
        }

        Ok(FieldTable {
            p,
            e,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
        })
    }

    pub fn shared(p: u32, e: u32) -> Result<Arc<Self>> {
        Self::new(p, e).map(Arc::new)
    }

    /// Builds GF(q) from its order.
    pub fn for_order(q: u64) -> Result<Arc<Self>> {
        let (p, e) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::shared(p, e)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn modulus_string(&self) -> String {
        let mut terms = Vec::new();
        for (deg, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coeff = if c == 1 && deg > 0 { String::new() } else { c.to_string() };
            terms.push(match deg {
                0 => coeff,
                1 => format!("{coeff}x"),
                _ => format!("{coeff}x^{deg}"),
            });
        }
        terms.join(" + ")
    }

    pub fn element(&self, index: usize) -> Result<FieldElement> {
        if index < self.q {
            Ok(FieldElement(index as u8))
        } else {
            Err(Error::ForeignElement { index, q: self.q })
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, value: i64) -> FieldElement {
        FieldElement(value.rem_euclid(self.p as i64) as u8)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(|i| FieldElement(i as u8))
    }

    pub fn nonzero(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (1..self.q).map(|i| FieldElement(i as u8))
    }

    #[inline]
    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        FieldElement(self.add[x.index() * self.q + y.index()])
    }

    #[inline]
    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        FieldElement(self.mul[x.index() * self.q + y.index()])
    }

    #[inline]
    pub fn neg(&self, x: FieldElement) -> FieldElement {
        FieldElement(self.neg[x.index()])
    }

    #[inline]
    pub fn sub(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.add(x, self.neg(y))
    }

    pub fn inv(&self, x: FieldElement) -> Result<FieldElement> {
        match x.index() {
            0 => Err(Error::ZeroInverse),
            i if i >= self.q => Err(Error::ForeignElement { index: i, q: self.q }),
            i => Ok(FieldElement(self.inv[i])),
        }
    }

    pub fn pow_int(&self, x: FieldElement, mut k: u64) -> FieldElement {
        let mut base = x;
        let mut acc = FieldElement::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// Checked variant of [`FieldTable::add`] for elements of unknown origin.
    pub fn try_add(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.add(x, y))
    }

    /// Checked variant of [`FieldTable::mul`] for elements of unknown origin.
    pub fn try_mul(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mul(x, y))
    }

    fn check(&self, x: FieldElement) -> Result<()> {
        if x.index() < self.q {
            Ok(())
        } else {
            Err(Error::ForeignElement { index: x.index(), q: self.q })
        }
    }

    pub(crate) fn add_table(&self) -> &[u8] {
        &self.add
    }

    pub(crate) fn mul_table(&self) -> &[u8] {
        &self.mul
    }

    pub(crate) fn neg_table(&self) -> &[u8] {
        &self.neg
    }

    pub(crate) fn inv_table(&self) -> &[u8] {
        &self.inv
    }
}

/// Every supported `(p, e)`.
pub fn supported_orders() -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for p in (2..=MAX_ORDER as u32).filter(|&p| is_prime(p)) {
        let mut e = 1;
        while (p as usize).pow(e) <= MAX_ORDER {
            out.push((p, e));
            e += 1;
        }
    }
    out
}
