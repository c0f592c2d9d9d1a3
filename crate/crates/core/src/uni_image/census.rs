//! Exhaustive census of `U(n,q)^m`.
//!
//! Every matrix of `U(n,q)` is enumerated by an odometer over its packed digits, raised
//! to the m-th power through the nilpotent expansion, and its image key is marked in a
//! dense bitmap. For `m = p` the image lies in `U_{p-1}(n,q)`, so the bitmap only spans
//! that subgroup. Work is split into units that fix the most significant digits; each
//! rayon worker owns a bitmap and the results are merged by OR, so the count does not
//! depend on the shard count.

use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bitmap::Bitmap;
use crate::error::{Error, Result};
use crate::gf::FieldTable;
use crate::trimat::{binomial_mod_p, KeySpace, MAX_DIM};

#[derive(Debug, Clone, Copy)]
pub struct CensusConfig {
    pub shards: usize,
    /// Refuse to enumerate groups larger than this.
    pub max_elements: u128,
    pub keep_bitmap: bool,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            shards: 1,
            max_elements: 1 << 30,
            keep_bitmap: true,
        }
    }
}

impl CensusConfig {
    pub fn with_shards(mut self, shards: usize) -> Self {
        self.shards = shards.max(1);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CensusMethod {
    Brute,
    FormulaBound,
}

impl CensusMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CensusMethod::Brute => "brute",
            CensusMethod::FormulaBound => "formula-bound",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ImageCensus {
    pub n: usize,
    pub q: usize,
    pub p: u32,
    pub m: u64,
    pub count: BigUint,
    /// Membership over `domain` keys.
    pub bitmap: Option<Bitmap>,
    pub domain: KeySpace,
    pub method: CensusMethod,
    pub elapsed: Duration,
}

impl ImageCensus {
    pub fn domain_size(&self) -> BigUint {
        BigUint::from(self.domain.size())
    }
}

/// Number of elements of `U(n,q)`, saturating.
pub fn unitriangular_order(n: usize, q: usize) -> u128 {
    (q as u128).saturating_pow((n * n.saturating_sub(1) / 2) as u32)
}

/// Key space holding `U(n,q)^m`: `U_{p-1}(n,q)` when `m = p`, all of `U(n,q)` otherwise.
pub fn image_domain(n: usize, field: &FieldTable, m: u64) -> Result<KeySpace> {
    let p = field.characteristic() as u64;
    if m == p {
        KeySpace::lower_central(n, field.order(), p as usize - 1)
    } else {
        KeySpace::unitriangular(n, field.order())
    }
}

trait Arith: Sync {
    fn mul_add(&self, acc: u32, a: u8, b: u8) -> u32;
    fn reduce(&self, acc: u32) -> u8;
}

/// GF(p): integer accumulation, one reduction per entry.
struct PrimeArith {
    p: u32,
}

impl Arith for PrimeArith {
    #[inline(always)]
    fn mul_add(&self, acc: u32, a: u8, b: u8) -> u32 {
        acc + a as u32 * b as u32
    }

    #[inline(always)]
    fn reduce(&self, acc: u32) -> u8 {
        (acc % self.p) as u8
    }
}

/// GF(p^e), e > 1: table lookups, the accumulator is a field index.
struct TableArith<'a> {
    q: usize,
    add: &'a [u8],
    mul: &'a [u8],
}

impl Arith for TableArith<'_> {
    #[inline(always)]
    fn mul_add(&self, acc: u32, a: u8, b: u8) -> u32 {
        let t = self.mul[a as usize * self.q + b as usize];
        self.add[acc as usize * self.q + t as usize] as u32
    }

    #[inline(always)]
    fn reduce(&self, acc: u32) -> u8 {
        acc as u8
    }
}

type Grid = [[u8; MAX_DIM]; MAX_DIM];

/// Image key of `(I + N)^p = I + N^p`, read off the band positions only.
#[inline(always)]
fn pth_power_key<A: Arith>(nil: &Grid, n: usize, p: usize, arith: &A, band: &[(usize, usize, u64)]) -> u64 {
    let mut cur = *nil;
    for step in 2..=p {
        let mut next = [[0u8; MAX_DIM]; MAX_DIM];
        for i in step..n {
            for j in 0..=i - step {
                let mut acc = 0u32;
                for k in j + 1..=i + 1 - step {
                    acc = arith.mul_add(acc, cur[i][k], nil[k][j]);
                }
                next[i][j] = arith.reduce(acc);
            }
        }
        cur = next;
    }
    band.iter()
        .map(|&(i, j, w)| cur[i][j] as u64 * w)
        .sum()
}

/// Image key of `(I + N)^m = I + sum_k C(m,k) N^k` over the full unitriangular key space.
fn mth_power_key(nil: &Grid, n: usize, coeffs: &[u8], f: &FieldTable, weights: &[(usize, usize, u64)]) -> u64 {
    let (add, mul, q) = (f.add_table(), f.mul_table(), f.order());
    let mut acc = [[0u8; MAX_DIM]; MAX_DIM];
    let mut term = *nil;
    for (k, &c) in coeffs.iter().enumerate() {
        if k > 0 {
            let mut next = [[0u8; MAX_DIM]; MAX_DIM];
            for i in 0..n {
                for j in 0..i {
                    let mut s = 0u8;
                    for t in j + 1..i {
                        s = add[s as usize * q + mul[term[i][t] as usize * q + nil[t][j] as usize] as usize];
                    }
                    next[i][j] = s;
                }
            }
            term = next;
        }
        if c == 0 {
            continue;
        }
        for i in 0..n {
            for j in 0..i {
                let t = mul[c as usize * q + term[i][j] as usize];
                acc[i][j] = add[acc[i][j] as usize * q + t as usize];
            }
        }
    }
    weights.iter().map(|&(i, j, w)| acc[i][j] as u64 * w).sum()
}

enum Kernel<'a> {
    PthPrime { p: usize, arith: PrimeArith, band: Vec<(usize, usize, u64)> },
    PthTable { p: usize, arith: TableArith<'a>, band: Vec<(usize, usize, u64)> },
    General { coeffs: Vec<u8>, field: &'a FieldTable, weights: Vec<(usize, usize, u64)> },
}

impl Kernel<'_> {
    #[inline(always)]
    fn key(&self, nil: &Grid, n: usize) -> u64 {
        match self {
            Kernel::PthPrime { p, arith, band } => pth_power_key(nil, n, *p, arith, band),
            Kernel::PthTable { p, arith, band } => pth_power_key(nil, n, *p, arith, band),
            Kernel::General { coeffs, field, weights } => mth_power_key(nil, n, coeffs, field, weights),
        }
    }
}

fn weights_of(domain: &KeySpace) -> Vec<(usize, usize, u64)> {
    let q = domain.q() as u64;
    let mut w = 1u64;
    domain
        .positions()
        .iter()
        .map(|&(i, j)| {
            let out = (i - 1, j - 1, w);
            w = w.wrapping_mul(q);
            out
        })
        .collect()
}

/// Exact `|U(n,q)^m|`.
pub fn u_image_census(field: &Arc<FieldTable>, n: usize, m: u64, config: &CensusConfig) -> Result<ImageCensus> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidArgument(format!("census supports 1 <= n <= {MAX_DIM}, got {n}")));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("exponent must be positive".into()));
    }
    let q = field.order();
    let order = unitriangular_order(n, q);
    if order > config.max_elements {
        return Err(Error::SizeGuard {
            what: format!("census of U({n},{q}) (elements)"),
            required: order,
            limit: config.max_elements,
        });
    }
    let start = Instant::now();
    let p = field.characteristic();
    let source = KeySpace::unitriangular(n, q)?;
    let domain = image_domain(n, field, m)?;

    let kernel = if m == p as u64 {
        let band = weights_of(&domain);
        if field.degree() == 1 {
            Kernel::PthPrime { p: p as usize, arith: PrimeArith { p }, band }
        } else {
            Kernel::PthTable {
                p: p as usize,
                arith: TableArith {
                    q,
                    add: field.add_table(),
                    mul: field.mul_table(),
                },
                band,
            }
        }
    } else {
        let kmax = m.min(n.saturating_sub(1) as u64);
        let coeffs = (1..=kmax)
            .map(|k| field.from_int(binomial_mod_p(m, k, p) as i64).index() as u8)
            .collect();
        Kernel::General {
            coeffs,
            field,
            weights: weights_of(&domain),
        }
    };

    let digits = source.positions().len();
    // fix enough high digits to give every worker several units
    let want_units = (config.shards as u64 * 16).max(1);
    let mut top = 0;
    let mut units = 1u64;
    while top < digits && units < want_units {
        top += 1;
        units *= q as u64;
    }
    let low = digits - top;
    let positions: Vec<(usize, usize)> = source.positions().iter().map(|&(i, j)| (i - 1, j - 1)).collect();

    let run_unit = |unit: u64, bitmap: &mut Bitmap| {
        let mut nil: Grid = [[0u8; MAX_DIM]; MAX_DIM];
        let mut rest = unit;
        for &(i, j) in &positions[low..] {
            nil[i][j] = (rest % q as u64) as u8;
            rest /= q as u64;
        }
        let mut odometer = vec![0u8; low];
        loop {
            bitmap.set(kernel.key(&nil, n));
            let mut t = 0;
            loop {
                if t == low {
                    return;
                }
                let (i, j) = positions[t];
                odometer[t] += 1;
                if (odometer[t] as usize) < q {
                    nil[i][j] = odometer[t];
                    break;
                }
                odometer[t] = 0;
                nil[i][j] = 0;
                t += 1;
            }
        }
    };

    let size = domain.size();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.shards.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let bitmap = pool.install(|| {
        (0..units)
            .into_par_iter()
            .fold(
                || Bitmap::new(size),
                |mut bm, unit| {
                    run_unit(unit, &mut bm);
                    bm
                },
            )
            .reduce(
                || Bitmap::new(size),
                |mut a, b| {
                    a |= &b;
                    a
                },
            )
    });

    let count = BigUint::from(bitmap.count_ones());
    Ok(ImageCensus {
        n,
        q,
        p,
        m,
        count,
        bitmap: config.keep_bitmap.then_some(bitmap),
        domain,
        method: CensusMethod::Brute,
        elapsed: start.elapsed(),
    })
}
