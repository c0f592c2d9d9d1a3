use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use super::partition::{partitions_up_to_length, Partition};
use super::types::{class_index, d_delta_count};
use crate::error::{Error, Result};
use crate::gf::FieldTable;
use crate::uni_image::{u_image_census, CacheEntry, CensusCache, CensusConfig};

/// Supplies `|U(a,q)^p|`.
pub trait CensusSource {
    fn u_image_count(&mut self, a: usize, field: &Arc<FieldTable>) -> Result<BigUint>;
}

/// Fixed values keyed by `(a, q)`.
#[derive(Debug, Clone, Default)]
pub struct FixedCounts(pub BTreeMap<(usize, usize), BigUint>);

impl CensusSource for FixedCounts {
    fn u_image_count(&mut self, a: usize, field: &Arc<FieldTable>) -> Result<BigUint> {
        self.0.get(&(a, field.order())).cloned().ok_or(Error::MissingCensus {
            n: a,
            q: field.order(),
            m: field.characteristic() as u64,
        })
    }
}

/// Cache lookups, running the census on a miss when allowed.
pub struct LiveCensus<'a> {
    pub cache: &'a mut CensusCache,
    pub config: CensusConfig,
    pub compute: bool,
    pub hits: usize,
    pub misses: usize,
}

impl<'a> LiveCensus<'a> {
    pub fn new(cache: &'a mut CensusCache, config: CensusConfig, compute: bool) -> Self {
        LiveCensus {
            cache,
            config,
            compute,
            hits: 0,
            misses: 0,
        }
    }
}

impl CensusSource for LiveCensus<'_> {
    fn u_image_count(&mut self, a: usize, field: &Arc<FieldTable>) -> Result<BigUint> {
        let p = field.characteristic() as u64;
        if let Some(c) = self.cache.get(a, field, p) {
            self.hits += 1;
            return Ok(c);
        }
        if !self.compute {
            return Err(Error::MissingCensus {
                n: a,
                q: field.order(),
                m: p,
            });
        }
        self.misses += 1;
        let config = CensusConfig {
            keep_bitmap: false,
            ..self.config
        };
        let census = u_image_census(field, a, p, &config)?;
        self.cache.insert(CacheEntry::from_census(&census, field));
        Ok(census.count)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TypeSummand {
    pub partition: String,
    #[serde(skip)]
    pub delta: Partition,
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub d_count: BigUint,
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub class_index: BigUint,
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub cent_image: BigUint,
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub product: BigUint,
}

#[derive(Debug, Clone, Serialize)]
pub struct TImageFormula {
    pub n: usize,
    pub q: usize,
    pub p: u32,
    #[serde(serialize_with = "crate::serde_big::biguint")]
    pub total: BigUint,
    pub summands: Vec<TypeSummand>,
    /// Over GF(2) the group is unitriangular and the census count is returned as is.
    pub delegated: bool,
}

/// `|T(n,q)^p|` as a sum over diagonal types.
pub fn t_image_by_formula(n: usize, field: &Arc<FieldTable>, source: &mut dyn CensusSource) -> Result<TImageFormula> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let q = field.order();
    let p = field.characteristic();
    if q == 2 {
        return Ok(TImageFormula {
            n,
            q,
            p,
            total: source.u_image_count(n, field)?,
            summands: Vec::new(),
            delegated: true,
        });
    }
    let mut summands = Vec::new();
    let mut total = BigUint::ZERO;
    for delta in partitions_up_to_length(n, q - 1) {
        let d_count = d_delta_count(&delta, q)?;
        let index = class_index(&delta, q);
        let mut cent_image = BigUint::one();
        for &a in delta.parts() {
            cent_image *= source.u_image_count(a, field)?;
        }
        let product = &d_count * &index * &cent_image;
        total += &product;
        summands.push(TypeSummand {
            partition: delta.to_string(),
            delta,
            d_count,
            class_index: index,
            cent_image,
            product,
        });
    }
    Ok(TImageFormula {
        n,
        q,
        p,
        total,
        summands,
        delegated: false,
    })
}
