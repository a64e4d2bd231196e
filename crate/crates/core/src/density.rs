//! Counting realizable unit-group cardinalities up to N.
//!
//! Every even number is realizable; odd ones are exactly the products of
//! numbers 2^k - 1. Reduced rings realize the products of numbers q - 1.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};

/// All products of factors 2^k - 1 (k >= 2, repetition allowed) up to N,
/// including the empty product 1.
pub fn enumerate_odd_realizable(n_max: u64) -> Vec<u64> {
    fn go(value: u64, min_k: u32, n_max: u64, out: &mut Vec<u64>) {
        out.push(value);
        let mut k = min_k;
        while k < 64 {
            let f = (1u64 << k) - 1;
            match value.checked_mul(f) {
                Some(v) if v <= n_max => go(v, k, n_max, out),
                _ => break,
            }
            k += 1;
        }
    }
    if n_max == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    go(1, 2, n_max, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

/// Flags n <= n_max that are products of numbers q - 1 (q a prime power).
fn reduced_sieve(n_max: u64) -> Vec<bool> {
    let n = n_max as usize;
    // q ranges over prime powers up to n_max + 1
    let limit = n + 1;
    let mut composite = vec![false; limit + 1];
    let mut factors = Vec::new();
    for p in 2..=limit {
        if composite[p] {
            continue;
        }
        let mut m = p * p;
        while m <= limit {
            composite[m] = true;
            m += p;
        }
        let mut q = p;
        loop {
            if q > 2 {
                factors.push(q - 1);
            }
            match q.checked_mul(p) {
                Some(next) if next <= limit => q = next,
                _ => break,
            }
        }
    }
    factors.sort_unstable();
    let mut reachable = vec![false; n + 1];
    if n >= 1 {
        reachable[1] = true;
    }
    for f in factors {
        for m in 1..=n / f {
            if reachable[m] {
                reachable[m * f] = true;
            }
        }
    }
    reachable
}

/// Cardinalities of unit groups of reduced rings up to N: products of
/// numbers q - 1, together with the torsion-free orders 2^d 3^c (whose
/// factors 2, 3, 4 are themselves of the form q - 1).
pub fn enumerate_reduced_cardinalities(n_max: u64) -> Vec<u64> {
    reduced_sieve(n_max)
        .iter()
        .enumerate()
        .filter(|(_, &r)| r)
        .map(|(i, _)| i as u64)
        .collect()
}

/// count / n rounded half-up to ten decimal places.
pub fn decimal_ratio(count: u64, n: u64) -> String {
    assert!(n > 0);
    let scale: u128 = 10_000_000_000;
    let scaled = (count as u128 * scale * 2 + n as u128) / (2 * n as u128);
    format!("{}.{:010}", scaled / scale, scaled % scale)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: u64,
    pub count_all: u64,
    pub count_odd: u64,
    pub count_reduced: u64,
    pub density_all: String,
    pub density_odd: String,
    pub density_reduced: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    #[serde(rename = "N")]
    pub n_max: u64,
    pub checkpoints: Vec<Checkpoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensitySet {
    All,
    Odd,
    Reduced,
}

impl FromStr for DensitySet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(DensitySet::All),
            "odd" => Ok(DensitySet::Odd),
            "reduced" => Ok(DensitySet::Reduced),
            _ => Err(Error::Parse(format!("unknown set `{s}`; expected all, odd or reduced"))),
        }
    }
}

impl fmt::Display for DensitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DensitySet::All => "all",
            DensitySet::Odd => "odd",
            DensitySet::Reduced => "reduced",
        })
    }
}

/// Counts and densities at each checkpoint (checkpoints above N are
/// rejected; the list is sorted and deduplicated).
pub fn density_scan(n_max: u64, checkpoints: &[u64], config: &Config) -> Result<DensityReport> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    if n_max > config.density_limit {
        return Err(Error::BoundExceeded {
            what: "density scan".into(),
            needed: n_max as u128,
            bound: config.density_limit as u128,
        });
    }
    let mut points = checkpoints.to_vec();
    if points.is_empty() {
        points.push(n_max);
    }
    points.sort_unstable();
    points.dedup();
    if let Some(&bad) = points.iter().find(|&&c| c == 0 || c > n_max) {
        return Err(Error::InvalidArgument(format!("checkpoint {bad} is outside 1..={n_max}")));
    }
    let odd = enumerate_odd_realizable(n_max);
    let reduced = reduced_sieve(n_max);

    let mut out = Vec::with_capacity(points.len());
    let (mut odd_idx, mut reduced_count, mut next_n) = (0usize, 0u64, 1u64);
    for &c in &points {
        while odd_idx < odd.len() && odd[odd_idx] <= c {
            odd_idx += 1;
        }
        while next_n <= c {
            reduced_count += reduced[next_n as usize] as u64;
            next_n += 1;
        }
        let count_odd = odd_idx as u64;
        let count_all = c / 2 + count_odd;
        out.push(Checkpoint {
            n: c,
            count_all,
            count_odd,
            count_reduced: reduced_count,
            density_all: decimal_ratio(count_all, c),
            density_odd: decimal_ratio(count_odd, c),
            density_reduced: decimal_ratio(reduced_count, c),
        });
    }
    Ok(DensityReport { n_max, checkpoints: out })
}

/// CSV with a header row; `set` keeps only n and that set's columns.
pub fn to_csv(report: &DensityReport, set: Option<DensitySet>) -> String {
    let mut s = String::new();
    match set {
        None => {
            s.push_str("n,count_all,count_odd,count_reduced,density_all,density_odd,density_reduced\n");
            for c in &report.checkpoints {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    c.n, c.count_all, c.count_odd, c.count_reduced, c.density_all, c.density_odd, c.density_reduced
                ));
            }
        }
        Some(set) => {
            s.push_str(&format!("n,count_{set},density_{set}\n"));
            for c in &report.checkpoints {
                let (count, density) = match set {
                    DensitySet::All => (c.count_all, &c.density_all),
                    DensitySet::Odd => (c.count_odd, &c.density_odd),
                    DensitySet::Reduced => (c.count_reduced, &c.density_reduced),
                };
                s.push_str(&format!("{},{},{}\n", c.n, count, density));
            }
        }
    }
    s
}
