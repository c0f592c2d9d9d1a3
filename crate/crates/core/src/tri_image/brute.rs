use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;

use super::partition::Partition;
use super::types::diag_type_of;
use crate::error::{Error, Result};
use crate::gf::FieldTable;
use crate::trimat::{Dense, KeySpace, MAX_DIM};
use crate::uni_image::{Bitmap, CensusMethod, ImageCensus};

#[derive(Debug, Clone, Copy)]
pub struct BruteConfig {
    pub shards: usize,
    pub max_elements: u64,
}

impl Default for BruteConfig {
    fn default() -> Self {
        BruteConfig {
            shards: 1,
            max_elements: 10_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TImageBrute {
    pub census: ImageCensus,
    /// Distinct p-th powers grouped by the diagonal type of the base element.
    pub per_type: BTreeMap<Partition, BigUint>,
    /// Whether the groups are pairwise disjoint.
    pub types_disjoint: bool,
}

fn dense_pow(mut base: Dense, mut e: u64, f: &FieldTable) -> Dense {
    let mut acc = Dense::identity(base.n);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base, f);
        }
        base = base.mul(&base, f);
        e >>= 1;
    }
    acc
}

/// `|T(n,q)^p|` by raising every element and deduplicating packed keys.
pub fn t_image_brute(n: usize, field: &Arc<FieldTable>, config: &BruteConfig) -> Result<TImageBrute> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidArgument(format!("brute force supports 1 <= n <= {MAX_DIM}, got {n}")));
    }
    let start = Instant::now();
    let q = field.order();
    let p = field.characteristic();
    let space = KeySpace::triangular(n, q)?;
    if space.size() > config.max_elements {
        return Err(Error::SizeGuard {
            what: format!("brute force over T({n},{q}) (elements)"),
            required: space.size() as u128,
            limit: config.max_elements as u128,
        });
    }
    let coset = (q as u64).pow(space.positions().len() as u32);
    let diagonals = ((q - 1) as u64).pow(n as u32);
    let size = space.size();

    let run = |code: u64, acc: &mut BTreeMap<Partition, Bitmap>| -> Result<()> {
        let first = space.decode_dense(code * coset);
        let delta = diag_type_of((0..n).map(|i| first.e[i][i] as usize))?;
        let bm = acc.entry(delta).or_insert_with(|| Bitmap::new(size));
        for key in code * coset..(code + 1) * coset {
            let g = space.decode_dense(key);
            bm.set(space.encode_dense(&dense_pow(g, p as u64, field)));
        }
        Ok(())
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.shards.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let groups = pool.install(|| {
        (0..diagonals)
            .into_par_iter()
            .try_fold(BTreeMap::new, |mut acc, code| run(code, &mut acc).map(|_| acc))
            .try_reduce(BTreeMap::new, |mut a, b| {
                for (k, v) in b {
                    match a.get_mut(&k) {
                        Some(bm) => *bm |= &v,
                        None => {
                            a.insert(k, v);
                        }
                    }
                }
                Ok(a)
            })
    })?;

    let mut all = Bitmap::new(size);
    let mut per_type = BTreeMap::new();
    let mut sum = 0u64;
    for (delta, bm) in groups {
        all |= &bm;
        sum += bm.count_ones();
        per_type.insert(delta, BigUint::from(bm.count_ones()));
    }
    let count = all.count_ones();
    Ok(TImageBrute {
        census: ImageCensus {
            n,
            q,
            p,
            m: p as u64,
            count: BigUint::from(count),
            bitmap: Some(all),
            domain: space,
            method: CensusMethod::Brute,
            elapsed: start.elapsed(),
        },
        per_type,
        types_disjoint: sum == count,
    })
}
