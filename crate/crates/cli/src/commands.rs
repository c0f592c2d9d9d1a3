use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::sync::Arc;

use clap::ValueEnum;
use num_bigint::BigUint;
use serde_json::{json, Value};
use tripower::tri_image::{t_image_brute, t_image_by_formula, triangular_order, BruteConfig, LiveCensus};
use tripower::uni_image::bitmap::{write_dump, DumpHeader};
use tripower::uni_image::{u_image_census, CacheEntry, CensusCache, CensusConfig};
use tripower::{Error, FieldElement, FieldTable, Result};

use crate::report::{ratio, ratio_value, CountRow, RunReport};

/// Work above this many elementary operations needs `--slow`.
pub const SLOW_OPS: u128 = 1_000_000_000;

pub struct Ctx {
    pub shards: usize,
    pub cache: CensusCache,
    pub slow: bool,
}

impl Ctx {
    pub fn census_config(&self) -> CensusConfig {
        CensusConfig::default().with_shards(self.shards)
    }

    /// Refuses work estimated above the slow threshold unless `--slow` was given.
    pub fn gate(&self, what: &str, ops: u128) -> Result<()> {
        eprintln!("estimate for {what}: {ops:.3e} operations", ops = ops as f64);
        if ops > SLOW_OPS && !self.slow {
            return Err(Error::SizeGuard {
                what: format!("{what} (operations) without --slow"),
                required: ops,
                limit: SLOW_OPS,
            });
        }
        Ok(())
    }
}

pub fn field(q: u64) -> Result<Arc<FieldTable>> {
    FieldTable::for_order(q)
}

fn pairs(n: usize) -> u128 {
    (n * n.saturating_sub(1) / 2).max(1) as u128
}

/// Elements of `U(n,q)` times the number of entries each power touches.
pub fn census_ops(n: usize, q: usize) -> u128 {
    (q as u128).saturating_pow((n * n.saturating_sub(1) / 2) as u32).saturating_mul(pairs(n))
}

pub fn field_info(q: u64) -> Result<RunReport> {
    let f = field(q)?;
    let mut r = RunReport::new("field-info", 1);
    r.param("q", q);
    let x = if f.degree() == 1 {
        // the prime field is stored by residue; its table modulus encodes the smallest primitive root
        f.from_int((f.characteristic() as i64 - f.modulus()[0] as i64).rem_euclid(f.characteristic() as i64))
    } else {
        f.element(f.characteristic() as usize)?
    };
    let mut order = 1u64;
    let mut y = x;
    while y != FieldElement::ONE {
        y = f.mul(y, x);
        order += 1;
    }
    r.results = json!({
        "order": f.order(),
        "characteristic": f.characteristic(),
        "degree": f.degree(),
        "modulus": f.modulus(),
        "modulus_polynomial": f.modulus_string(),
        "generator": x.index(),
        "generator_order": order,
    });
    r.check("generator is primitive", order == q - 1, format!("order {order} of {}", q - 1));
    Ok(r)
}

pub struct UImageArgs {
    pub n: usize,
    pub q: u64,
    pub m: Option<u64>,
    pub dump: Option<PathBuf>,
    pub max_elements: Option<u128>,
}

pub fn u_image(ctx: &mut Ctx, args: &UImageArgs) -> Result<RunReport> {
    let f = field(args.q)?;
    let p = f.characteristic();
    let m = args.m.unwrap_or(p as u64);
    let mut r = RunReport::new("u-image", ctx.shards);
    r.param("n", args.n);
    r.param("q", args.q);
    r.param("m", m);
    ctx.gate(&format!("census of U({},{})", args.n, args.q), census_ops(args.n, args.q as usize))?;
    let mut config = ctx.census_config();
    if let Some(limit) = args.max_elements {
        config.max_elements = limit;
    }
    let c = u_image_census(&f, args.n, m, &config)?;
    r.elapsed = c.elapsed;
    let domain = c.domain_size();
    let bm = c.bitmap.as_ref().expect("census keeps its bitmap");
    r.check(
        "bitmap popcount equals count",
        BigUint::from(bm.count_ones()) == c.count,
        format!("{} set bits", bm.count_ones()),
    );
    r.check("count within the image domain", c.count <= domain, format!("{} <= {}", c.count, domain));
    r.results = json!({
        "count": c.count.to_string(),
        "domain_size": domain.to_string(),
        "domain": if m == p as u64 { format!("U_{}({},{})", p - 1, args.n, args.q) } else { format!("U({},{})", args.n, args.q) },
        "ratio": ratio_value(&ratio(&c.count, &domain)),
        "method": c.method.as_str(),
        "p": p,
    });
    r.rows.push(CountRow::new(args.n, args.q as usize, p, m, &c.count, &domain, c.method.as_str()));
    if let Some(path) = &args.dump {
        let header = DumpHeader {
            n: args.n as u8,
            q: args.q as u8,
            p: p as u8,
            bit_len: bm.len(),
        };
        write_dump(BufWriter::new(File::create(path)?), header, bm)?;
    }
    ctx.cache.insert(CacheEntry::from_census(&c, &f));
    ctx.cache.save()?;
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TMethod {
    Formula,
    Brute,
    Both,
}

pub struct TImageArgs {
    pub n: usize,
    pub q: u64,
    pub method: TMethod,
    pub no_compute: bool,
    pub max_elements: Option<u64>,
}

pub fn t_image(ctx: &mut Ctx, args: &TImageArgs) -> Result<RunReport> {
    let f = field(args.q)?;
    let (n, q, p) = (args.n, args.q as usize, f.characteristic());
    let mut r = RunReport::new("t-image", ctx.shards);
    r.param("n", n);
    r.param("q", q);
    r.param("method", format!("{:?}", args.method).to_lowercase());
    let order = triangular_order(n, q);
    let mut results = serde_json::Map::new();
    results.insert("group_order".into(), json!(order.to_string()));

    let mut formula = None;
    if args.method != TMethod::Brute {
        let missing = (1..=n)
            .filter(|&a| ctx.cache.get(a, &f, p as u64).is_none())
            .map(|a| census_ops(a, q))
            .max()
            .unwrap_or(0);
        if !args.no_compute {
            ctx.gate(&format!("censuses feeding T({n},{q})"), missing)?;
        }
        let config = ctx.census_config();
        let mut src = LiveCensus::new(&mut ctx.cache, config, !args.no_compute);
        let out = t_image_by_formula(n, &f, &mut src)?;
        r.cache_hits = src.hits;
        ctx.cache.save()?;
        results.insert("formula_total".into(), json!(out.total.to_string()));
        results.insert("delegated".into(), json!(out.delegated));
        results.insert("summands".into(), serde_json::to_value(&out.summands).expect("serializable"));
        let sum: BigUint = out.summands.iter().map(|s| s.product.clone()).sum();
        if !out.delegated {
            r.check("summands add up", sum == out.total, format!("{} terms", out.summands.len()));
        }
        r.rows.push(CountRow::new(n, q, p, p as u64, &out.total, &order, "formula"));
        formula = Some(out);
    }

    if args.method != TMethod::Formula {
        let mut config = BruteConfig {
            shards: ctx.shards,
            ..Default::default()
        };
        if let Some(limit) = args.max_elements {
            config.max_elements = limit;
        }
        let brute = t_image_brute(n, &f, &config)?;
        r.elapsed += brute.census.elapsed;
        results.insert("brute_total".into(), json!(brute.census.count.to_string()));
        let per_type: serde_json::Map<String, Value> = brute
            .per_type
            .iter()
            .map(|(d, c)| (d.to_string(), json!(c.to_string())))
            .collect();
        results.insert("brute_per_type".into(), Value::Object(per_type));
        r.check("image sets of distinct types are disjoint", brute.types_disjoint, format!("{} types", brute.per_type.len()));
        r.rows.push(CountRow::new(n, q, p, p as u64, &brute.census.count, &order, "brute"));
        if let Some(fm) = &formula {
            r.check(
                "formula equals brute force",
                fm.total == brute.census.count,
                format!("{} vs {}", fm.total, brute.census.count),
            );
            if !fm.delegated {
                for s in &fm.summands {
                    let got = brute.per_type.get(&s.delta).cloned().unwrap_or_default();
                    r.check(
                        format!("type {} summand", s.partition),
                        got == s.product,
                        format!("{} vs {}", s.product, got),
                    );
                }
            }
        }
    }
    let total = formula
        .as_ref()
        .map(|fm| fm.total.clone())
        .or_else(|| results.get("brute_total").and_then(|v| v.as_str()).and_then(|s| s.parse().ok()))
        .expect("one method ran");
    results.insert("ratio".into(), ratio_value(&ratio(&total, &order)));
    r.results = Value::Object(results);
    Ok(r)
}

/// The published table rows: `(n, q, |U(n,q)^p|, comparison with 1/3)`.
pub const TABLE_ROWS: [(usize, u64, u64, &str); 6] = [
    (5, 2, 52, ">1/3"),
    (5, 4, 3376, ">1/3"),
    (6, 2, 600, ">1/3"),
    (6, 3, 585, ">1/3"),
    (7, 2, 13344, ">1/3"),
    (8, 2, 573184, "<1/3"),
];

pub fn paper_table(ctx: &mut Ctx) -> Result<RunReport> {
    let mut r = RunReport::new("paper-table", ctx.shards);
    r.param("slow", ctx.slow);
    let mut rows = Vec::new();
    for (n, q, expected, cmp) in TABLE_ROWS {
        let ops = census_ops(n, q as usize);
        let f = field(q)?;
        let p = f.characteristic();
        if ops > SLOW_OPS && !ctx.slow {
            eprintln!("skipping ({n},{q}): {:.3e} operations, rerun with --slow", ops as f64);
            rows.push(json!({"n": n, "q": q, "status": "skipped", "reason": "needs --slow"}));
            continue;
        }
        let c = u_image_census(&f, n, p as u64, &ctx.census_config())?;
        r.elapsed += c.elapsed;
        let domain = c.domain_size();
        let rr = ratio(&c.count, &domain);
        let third = ratio(&BigUint::from(1u32), &BigUint::from(3u32));
        let side = if rr > third { ">1/3" } else { "<1/3" };
        r.check(
            format!("row ({n},{q})"),
            c.count == BigUint::from(expected) && side == cmp,
            format!("{} / {} {}", c.count, domain, side),
        );
        rows.push(json!({
            "n": n,
            "q": q,
            "status": "computed",
            "count": c.count.to_string(),
            "domain_size": domain.to_string(),
            "domain_exponent": (n - p as usize + 1) * (n - p as usize) / 2,
            "ratio": ratio_value(&rr),
            "versus_third": side,
        }));
        r.rows.push(CountRow::new(n, q as usize, p, p as u64, &c.count, &domain, c.method.as_str()));
        ctx.cache.insert(CacheEntry::from_census(&c, &f));
    }
    ctx.cache.save()?;
    r.results = json!({ "rows": rows });
    Ok(r)
}

pub fn cache_list(ctx: &Ctx) -> Result<RunReport> {
    let mut r = RunReport::new("cache-list", ctx.shards);
    r.param("path", ctx.cache.path().map(|p| p.display().to_string()));
    let entries: Vec<_> = ctx.cache.entries().cloned().collect();
    r.results = json!({ "entries": entries });
    for e in ctx.cache.entries() {
        let f = field(e.q as u64)?;
        let p = f.characteristic();
        let domain = if e.m == p as u64 {
            BigUint::from(e.q).pow(((e.n.saturating_sub(p as usize) + 1) * e.n.saturating_sub(p as usize) / 2) as u32)
        } else {
            BigUint::from(e.q).pow((e.n * e.n.saturating_sub(1) / 2) as u32)
        };
        r.rows.push(CountRow::new(e.n, e.q, p, e.m, &e.count()?, &domain, e.method.as_str()));
    }
    Ok(r)
}

pub struct PruneArgs {
    pub stale: bool,
    pub n: Option<usize>,
    pub q: Option<usize>,
    pub all: bool,
}

pub fn cache_prune(ctx: &mut Ctx, args: &PruneArgs) -> Result<RunReport> {
    if !args.stale && !args.all && args.n.is_none() && args.q.is_none() {
        return Err(Error::InvalidArgument("prune needs --stale, --all, --n or --q".into()));
    }
    let mut r = RunReport::new("cache-prune", ctx.shards);
    r.param("stale", args.stale);
    r.param("all", args.all);
    r.param("n", args.n);
    r.param("q", args.q);
    let mut removed = 0;
    if args.stale {
        removed += ctx.cache.prune_stale();
    }
    if args.all {
        removed += ctx.cache.prune(|_| true);
    } else if args.n.is_some() || args.q.is_some() {
        removed += ctx
            .cache
            .prune(|e| args.n.is_none_or(|n| e.n == n) && args.q.is_none_or(|q| e.q == q));
    }
    ctx.cache.save()?;
    r.results = json!({ "removed": removed, "remaining": ctx.cache.len() });
    Ok(r)
}
