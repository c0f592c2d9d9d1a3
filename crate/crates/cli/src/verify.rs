use std::collections::{BTreeSet, HashSet};

use clap::ValueEnum;
use num_bigint::BigUint;
use serde_json::json;
use tripower::conj::{class_of, class_size, column_rule_inert, inert_points, is_canonical, row_rule_inert, Ambient, DeskLimits};
use tripower::gf::supported_orders;
use tripower::tri_image::{corollary_c_check, t_image_by_formula, LiveCensus};
use tripower::uni_image::bounds::{bu_report, theorem_a_report};
use tripower::uni_image::{canonical_element, lbound_terms, lbound_value, u_image_census, CacheEntry, CanonicalFamilySpec};
use tripower::{Error, FieldTable, Result, TriMatrix};

use crate::commands::{census_ops, field, Ctx, SLOW_OPS};
use crate::report::RunReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    #[value(name = "theoremA")]
    TheoremA,
    #[value(name = "propBU")]
    PropBu,
    #[value(name = "classSizes")]
    ClassSizes,
    #[value(name = "lbound")]
    Lbound,
    #[value(name = "canonical")]
    Canonical,
    #[value(name = "corollaryC")]
    CorollaryC,
    #[value(name = "all")]
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::TheoremA => "theoremA",
            Suite::PropBu => "propBU",
            Suite::ClassSizes => "classSizes",
            Suite::Lbound => "lbound",
            Suite::Canonical => "canonical",
            Suite::CorollaryC => "corollaryC",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Caps {
    pub max_n: usize,
    pub max_q: usize,
}

fn orders(max_q: usize) -> Vec<usize> {
    let mut qs: Vec<usize> = supported_orders()
        .into_iter()
        .map(|(p, e)| (p as usize).pow(e))
        .filter(|&q| q <= max_q)
        .collect();
    qs.sort_unstable();
    qs
}

/// Pairs whose census stays under the slow threshold (or any size with `--slow`).
fn census_pairs(ctx: &Ctx, caps: Caps, min_gap: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for q in orders(caps.max_q) {
        let p = field(q as u64).map(|f| f.characteristic() as usize).unwrap_or(q);
        for n in (p + min_gap).max(1)..=caps.max_n.min(8) {
            let elements = (q as u128).saturating_pow((n * (n - 1) / 2) as u32);
            if elements > 1 << 30 {
                continue;
            }
            if census_ops(n, q) > SLOW_OPS && !ctx.slow {
                continue;
            }
            out.push((n, q));
        }
    }
    out
}

pub fn verify(ctx: &mut Ctx, suite: Suite, caps: Caps) -> Result<RunReport> {
    let mut r = RunReport::new("verify", ctx.shards);
    r.param("suite", suite.name());
    r.param("max_n", caps.max_n);
    r.param("max_q", caps.max_q);
    let suites = if suite == Suite::All {
        vec![
            Suite::TheoremA,
            Suite::PropBu,
            Suite::ClassSizes,
            Suite::Lbound,
            Suite::Canonical,
            Suite::CorollaryC,
        ]
    } else {
        vec![suite]
    };
    let mut covered = serde_json::Map::new();
    for s in suites {
        let before = r.checks.len();
        match s {
            Suite::TheoremA => theorem_a(ctx, caps, &mut r)?,
            Suite::PropBu => prop_bu(ctx, caps, &mut r)?,
            Suite::ClassSizes => class_sizes(caps, &mut r)?,
            Suite::Lbound => lbound(ctx, caps, &mut r)?,
            Suite::Canonical => canonical(caps, &mut r)?,
            Suite::CorollaryC => corollary_c(ctx, caps, &mut r)?,
            Suite::All => unreachable!(),
        }
        covered.insert(s.name().into(), json!(r.checks.len() - before));
    }
    ctx.cache.save()?;
    r.results = json!({ "checks_per_suite": covered });
    Ok(r)
}

fn census(ctx: &mut Ctx, n: usize, q: usize) -> Result<tripower::uni_image::ImageCensus> {
    let f = field(q as u64)?;
    let c = u_image_census(&f, n, f.characteristic() as u64, &ctx.census_config())?;
    ctx.cache.insert(CacheEntry::from_census(&c, &f));
    Ok(c)
}

fn theorem_a(ctx: &mut Ctx, caps: Caps, r: &mut RunReport) -> Result<()> {
    for (n, q) in census_pairs(ctx, caps, 3) {
        let c = census(ctx, n, q)?;
        r.elapsed += c.elapsed;
        let t = theorem_a_report(&c)?;
        r.check(
            format!("theoremA ({n},{q})"),
            t.passed,
            format!(
                "ratio {}/{}, hypothesis {}, above 1/3 {}",
                t.ratio.numer(),
                t.ratio.denom(),
                t.hypothesis,
                t.above_third
            ),
        );
    }
    Ok(())
}

fn prop_bu(ctx: &mut Ctx, caps: Caps, r: &mut RunReport) -> Result<()> {
    for q in orders(caps.max_q) {
        for n in 2..=caps.max_n.min(8) {
            if census_ops(n, q) > SLOW_OPS && !ctx.slow || (q as u128).saturating_pow((n * (n - 1) / 2) as u32) > 1 << 30 {
                continue;
            }
            let f = field(q as u64)?;
            let c = census(ctx, n, q)?;
            r.elapsed += c.elapsed;
            let b = bu_report(&f, &c)?;
            r.check(
                format!("propBU ({n},{q})"),
                b.passed,
                format!("{:?}: image {} of {}, closure {}", b.branch, b.image_count, b.domain_size, b.closure_size),
            );
        }
    }
    Ok(())
}

fn family_members(f: &std::sync::Arc<FieldTable>, n: usize) -> Result<Vec<(CanonicalFamilySpec, TriMatrix)>> {
    let l = f.characteristic() as usize - 1;
    let mut out = Vec::new();
    for spec in CanonicalFamilySpec::all(n, f.order(), l)? {
        for a in spec.representatives(f)? {
            out.push((spec, a));
        }
    }
    Ok(out)
}

fn class_sizes(caps: Caps, r: &mut RunReport) -> Result<()> {
    let limits = DeskLimits::default();
    for q in orders(caps.max_q) {
        let f = field(q as u64)?;
        let p = f.characteristic() as usize;
        for n in p + 1..=caps.max_n.min(6) {
            if (q as u128).saturating_pow((n * (n - 1) / 2) as u32) > limits.max_group {
                continue;
            }
            let mut ok = true;
            let mut detail = String::new();
            let mut classes: Vec<HashSet<TriMatrix>> = Vec::new();
            let mut seen: Vec<TriMatrix> = Vec::new();
            for (spec, a) in family_members(&f, n)? {
                let size = class_size(&a, Ambient::Unitriangular, &limits)?;
                if BigUint::from(size) != spec.class_size() {
                    ok = false;
                    detail = format!("{spec}: orbit {size}, formula {}", spec.class_size());
                }
                if seen.contains(&a) {
                    continue;
                }
                let class: HashSet<TriMatrix> = class_of(&a, Ambient::Unitriangular, &limits)?.into_iter().collect();
                if classes.iter().any(|c| !c.is_disjoint(&class)) {
                    ok = false;
                    detail = format!("{spec}: orbit meets another representative's orbit");
                }
                seen.push(a);
                classes.push(class);
            }
            if ok {
                detail = format!("{} distinct representatives", seen.len());
            }
            r.check(format!("classSizes ({n},{q}) l={}", p - 1), ok, detail);
        }
    }
    Ok(())
}

fn lbound(ctx: &mut Ctx, caps: Caps, r: &mut RunReport) -> Result<()> {
    for (n, q) in census_pairs(ctx, caps, 3) {
        let c = census(ctx, n, q)?;
        r.elapsed += c.elapsed;
        let bound = lbound_value(n, q)?;
        let terms: BigUint = lbound_terms(n, q)?.into_iter().map(|t| t.value).sum();
        r.check(
            format!("lbound ({n},{q})"),
            bound <= c.count && terms == bound,
            format!("bound {bound} <= census {}", c.count),
        );
    }
    Ok(())
}

fn canonical(caps: Caps, r: &mut RunReport) -> Result<()> {
    let limits = DeskLimits::default();
    for q in orders(caps.max_q.min(3)) {
        let f = field(q as u64)?;
        for n in 2..=caps.max_n.min(5) {
            let (mut canon, mut rules, mut sizes, mut total) = (true, true, true, 0);
            for l in 0..=n - 2 {
                let len = n - l - 1;
                for mut code in 0..q.pow(len as u32) {
                    let a: Vec<_> = (0..len)
                        .map(|_| {
                            let v = f.element(code % q).expect("in range");
                            code /= q;
                            v
                        })
                        .collect();
                    let m = canonical_element(&f, n, l, &a)?;
                    total += 1;
                    canon &= is_canonical(&m, &limits)?;
                    let inert: BTreeSet<_> = inert_points(&m, &limits)?.into_iter().collect();
                    rules &= column_rule_inert(&m).is_subset(&inert) && row_rule_inert(&m).is_subset(&inert);
                    sizes &= class_size(&m, Ambient::Unitriangular, &limits)? == q.pow(inert.len() as u32);
                }
            }
            r.check(format!("canonical ({n},{q}) is canonical"), canon, format!("{total} elements"));
            r.check(format!("canonical ({n},{q}) inert-point rules"), rules, format!("{total} elements"));
            r.check(format!("canonical ({n},{q}) class size q^#inert"), sizes, format!("{total} elements"));
        }
    }
    Ok(())
}

fn corollary_c(ctx: &mut Ctx, caps: Caps, r: &mut RunReport) -> Result<()> {
    for q in orders(caps.max_q).into_iter().filter(|&q| q > 2) {
        let f = field(q as u64)?;
        let p = f.characteristic() as usize;
        for n in 2..=caps.max_n.min(8) {
            if q + p + 1 <= n {
                continue;
            }
            if census_ops(n, q) > SLOW_OPS && !ctx.slow || (q as u128).saturating_pow((n * (n - 1) / 2) as u32) > 1 << 30 {
                continue;
            }
            let config = ctx.census_config();
            let mut src = LiveCensus::new(&mut ctx.cache, config, true);
            let t = match t_image_by_formula(n, &f, &mut src) {
                Ok(t) => t,
                Err(Error::SizeGuard { .. }) => continue,
                Err(e) => return Err(e),
            };
            r.cache_hits += src.hits;
            let c = corollary_c_check(n, q, &t.total)?;
            r.check(
                format!("corollaryC ({n},{q})"),
                c.passed,
                format!(
                    "ratio {}/{} vs bound {}/{}",
                    c.ratio.numer(),
                    c.ratio.denom(),
                    c.bound.numer(),
                    c.bound.denom()
                ),
            );
        }
    }
    Ok(())
}
