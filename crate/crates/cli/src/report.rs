use std::time::Duration;

use clap::ValueEnum;
use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

pub const CSV_HEADER: &str = "n,q,p,m,count,domain_size,ratio_num,ratio_den,method";

/// One census-like line, shared by the CSV and table renderings.
#[derive(Debug, Clone, Serialize)]
pub struct CountRow {
    pub n: usize,
    pub q: usize,
    pub p: u32,
    pub m: u64,
    pub count: String,
    pub domain_size: String,
    pub ratio_num: String,
    pub ratio_den: String,
    pub method: String,
}

impl CountRow {
    pub fn new(n: usize, q: usize, p: u32, m: u64, count: &BigUint, domain: &BigUint, method: &str) -> Self {
        let r = ratio(count, domain);
        CountRow {
            n,
            q,
            p,
            m,
            count: count.to_string(),
            domain_size: domain.to_string(),
            ratio_num: r.numer().to_string(),
            ratio_den: r.denom().to_string(),
            method: method.to_string(),
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n, self.q, self.p, self.m, self.count, self.domain_size, self.ratio_num, self.ratio_den, self.method
        )
    }
}

pub fn ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(num.clone().into(), den.clone().into())
}

/// `{"exact": "a/b", "decimal": "0.123456"}`; the decimal is truncated, not rounded.
pub fn ratio_value(r: &BigRational) -> Value {
    json!({
        "exact": format!("{}/{}", r.numer(), r.denom()),
        "decimal": decimal(r, 6),
    })
}

pub fn decimal(r: &BigRational, places: usize) -> String {
    let neg = r.numer().sign() == num_bigint::Sign::Minus;
    let num = r.numer().magnitude().clone();
    let den = r.denom().magnitude().clone();
    let scaled = num * BigUint::from(10u32).pow(places as u32) / den;
    let digits = format!("{:0>width$}", scaled.to_string(), width = places + 1);
    let (int, frac) = digits.split_at(digits.len() - places);
    format!("{}{int}.{frac}", if neg { "-" } else { "" })
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub results: Value,
    pub checks: Vec<Check>,
    pub rows: Vec<CountRow>,
    pub cache_hits: usize,
    pub elapsed: Duration,
    pub shards: usize,
}

impl RunReport {
    pub fn new(command: &str, shards: usize) -> Self {
        RunReport {
            command: command.to_string(),
            parameters: Map::new(),
            results: Value::Null,
            checks: Vec::new(),
            rows: Vec::new(),
            cache_hits: 0,
            elapsed: Duration::ZERO,
            shards,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.parameters
            .insert(key.to_string(), serde_json::to_value(value).expect("plain value"));
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Stable document: keys sorted, no timing, no shard count.
    pub fn canonical(&self) -> Value {
        json!({
            "command": self.command,
            "parameters": self.parameters,
            "results": self.results,
            "checks": self.checks,
            "passed": self.passed(),
            "cache_hits": self.cache_hits,
        })
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(&self.canonical()).expect("serializable")
    }

    pub fn with_timing(&self) -> Value {
        let mut v = self.canonical();
        v["elapsed_seconds"] = json!(self.elapsed.as_secs_f64());
        v["shards"] = json!(self.shards);
        v
    }

    pub fn render(&self, format: Format, timing: bool) -> String {
        match format {
            Format::Json => {
                if timing {
                    serde_json::to_string_pretty(&self.with_timing()).expect("serializable")
                } else {
                    self.canonical_json()
                }
            }
            Format::Csv => {
                if self.rows.is_empty() {
                    let mut out = String::from("check,passed,detail\n");
                    for c in &self.checks {
                        out.push_str(&format!("{},{},\"{}\"\n", c.name, c.passed, c.detail.replace('"', "'")));
                    }
                    out.trim_end().to_string()
                } else {
                    let mut out = String::from(CSV_HEADER);
                    for r in &self.rows {
                        out.push('\n');
                        out.push_str(&r.csv());
                    }
                    out
                }
            }
            Format::Table => self.table(),
        }
    }

    fn table(&self) -> String {
        let mut out = String::new();
        if !self.rows.is_empty() {
            let header = ["n", "q", "p", "m", "count", "domain", "ratio", "method"];
            let body: Vec<[String; 8]> = self
                .rows
                .iter()
                .map(|r| {
                    let rr = BigRational::new(
                        r.ratio_num.parse::<num_bigint::BigInt>().unwrap(),
                        r.ratio_den.parse::<num_bigint::BigInt>().unwrap(),
                    );
                    [
                        r.n.to_string(),
                        r.q.to_string(),
                        r.p.to_string(),
                        r.m.to_string(),
                        r.count.clone(),
                        r.domain_size.clone(),
                        decimal(&rr, 4),
                        r.method.clone(),
                    ]
                })
                .collect();
            let widths: Vec<usize> = (0..8)
                .map(|i| body.iter().map(|row| row[i].len()).chain([header[i].len()]).max().unwrap())
                .collect();
            let line = |cells: Vec<&str>| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            out.push_str(&line(header.to_vec()));
            out.push('\n');
            for row in &body {
                out.push_str(&line(row.iter().map(|s| s.as_str()).collect()));
                out.push('\n');
            }
        }
        for c in &self.checks {
            out.push_str(&format!("[{}] {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
        }
        out.push_str(if self.passed() { "all checks passed" } else { "some checks failed" });
        out
    }
}
