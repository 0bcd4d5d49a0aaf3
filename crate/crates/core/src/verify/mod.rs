//! Batch verification over prime ranges, with streamed reports.

pub mod cache;
pub mod identities;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, primes_between, PrimePowerModulus};
use crate::error::{Error, Result};
use crate::hypergeom::{n_plus_one_g, s_factor, truncated_hypergeom, GSpec, HypergeomSpec};
use crate::report::{Status, VerificationReport};

pub use cache::{load_or_build, CacheOutcome, CoefficientTable};
pub use identities::run_identity_suite;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub p_min: u64,
    pub p_max: u64,
    /// `K`: comparisons are made modulo `p^K`.
    pub precision: u32,
    /// `N`: number of coefficients `c(n)` to expand.
    pub order: usize,
    pub cache: Option<PathBuf>,
    pub jobs: usize,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn conjecture() -> Self {
        Self { p_min: 2, p_max: 199, precision: 3, order: 200, cache: None, jobs: 1, format: OutputFormat::Json }
    }

    pub fn theorem() -> Self {
        Self { p_min: 3, p_max: 97, precision: 4, ..Self::conjecture() }
    }

    pub fn identities() -> Self {
        Self::conjecture()
    }

    fn validate(&self, min_precision: u32) -> Result<()> {
        let bad = |msg: String| Err(Error::BadParameters(msg));
        if self.p_min > self.p_max {
            return bad(format!("empty prime range [{}, {}]", self.p_min, self.p_max));
        }
        if self.order < self.p_max as usize {
            return bad(format!("expansion order {} is below p_max = {}", self.order, self.p_max));
        }
        if self.precision < min_precision {
            return bad(format!("precision K = {} is below the minimum {min_precision}", self.precision));
        }
        if self.jobs == 0 {
            return bad("at least one job is required".into());
        }
        Ok(())
    }

    pub(crate) fn coefficients(&self, order: usize) -> Result<(CoefficientTable, CacheOutcome)> {
        load_or_build(self.cache.as_deref(), order)
    }
}

/// Runs the work items on a pool of `jobs` threads; output order follows input order.
pub(crate) fn run_pool<T, F>(jobs: usize, items: Vec<T>, f: F) -> Result<Vec<VerificationReport>>
where
    T: Send + Sync,
    F: Fn(&T) -> Vec<VerificationReport> + Send + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::BadParameters(format!("thread pool: {e}")))?;
    let nested: Vec<Vec<VerificationReport>> = pool.install(|| items.par_iter().map(&f).collect());
    Ok(nested.into_iter().flatten().collect())
}

/// Turns an evaluation error into a failed report instead of aborting the batch.
pub(crate) fn settle(
    identity: &str,
    prime: u64,
    params: impl Into<String>,
    r: Result<VerificationReport>,
) -> VerificationReport {
    r.unwrap_or_else(|e| VerificationReport::errored(identity, prime, params, &e))
}

pub const SUPERCONGRUENCE: &str = "supercongruence";
pub const G_COEFFICIENT: &str = "g-coefficient-equality";

/// `₄F₃(1/5, 2/5, 3/5, 4/5; 1, 1, 1 | 1)_{p-1} ≡ c(p) (mod p^K)`.
pub fn check_supercongruence(p: u64, k: u32, c_p: &BigInt) -> Result<VerificationReport> {
    let started = Instant::now();
    let modulus = PrimePowerModulus::new(p, k)?;
    let lhs = truncated_hypergeom(&HypergeomSpec::quartic(5, 2, p - 1), modulus)?;
    let rhs = modulus.from_bigint(c_p);
    Ok(VerificationReport::compare(SUPERCONGRUENCE, p, "", modulus.m(), lhs, rhs, started))
}

/// `₄G(1/5, 2/5, 3/5, 4/5) - s(p)·p = c(p)`, compared modulo `p^K`.
pub fn check_g_coefficient(p: u64, k: u32, c_p: &BigInt) -> Result<VerificationReport> {
    let started = Instant::now();
    let modulus = PrimePowerModulus::new(p, k)?;
    let g = n_plus_one_g(&GSpec::quartic(5, 2)?, modulus)?;
    let lhs = g - s_factor(5, 2, modulus)? * modulus.residue(p);
    let rhs = modulus.from_bigint(c_p);
    Ok(VerificationReport::compare(G_COEFFICIENT, p, "", modulus.m(), lhs, rhs, started)
        .with_note(format!("exact equality evidenced modulo p^{k} only")))
}

fn primes_in(config: &RunConfig) -> Vec<u64> {
    primes_between(config.p_min, config.p_max)
}

/// The supercongruence for every prime in range; `p = 5` is reported as skipped.
pub fn run_conjecture(config: &RunConfig) -> Result<Vec<VerificationReport>> {
    config.validate(3)?;
    let (table, _) = config.coefficients(config.order)?;
    let k = config.precision;
    run_pool(config.jobs, primes_in(config), |&p| {
        if p == 5 {
            return vec![VerificationReport::skipped(SUPERCONGRUENCE, p, "", "p = 5 is excluded")];
        }
        let r = table.c(p as usize).and_then(|c| check_supercongruence(p, k, c));
        vec![settle(SUPERCONGRUENCE, p, "", r)]
    })
}

/// `₄G - s(p)p = c(p)` modulo `p^K` for the odd primes in range, `p ≠ 5`.
pub fn run_theorem_equality(config: &RunConfig) -> Result<Vec<VerificationReport>> {
    config.validate(1)?;
    let (table, _) = config.coefficients(config.order)?;
    let k = config.precision;
    run_pool(config.jobs, primes_in(config), |&p| {
        if p == 2 || p == 5 {
            return vec![VerificationReport::skipped(G_COEFFICIENT, p, "", "defined for odd p != 5 only")];
        }
        let r = table.c(p as usize).and_then(|c| check_g_coefficient(p, k, c));
        vec![settle(G_COEFFICIENT, p, "", r)]
    })
}

/// 0 when every non-skipped report passed, 1 otherwise.
pub fn exit_code(reports: &[VerificationReport]) -> i32 {
    if reports.iter().all(|r| r.status != Status::Fail) {
        0
    } else {
        1
    }
}

pub const CSV_HEADER: [&str; 9] =
    ["identity", "prime", "params", "modulus", "lhs", "rhs", "status", "note", "elapsed_ms"];

/// One JSON object per line, or CSV with a header row.
pub fn write_reports<W: Write>(out: W, reports: &[VerificationReport], format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Json => {
            let mut out = out;
            for r in reports {
                let line = serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?;
                writeln!(out, "{line}")?;
            }
            out.flush()?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let csv_err = |e: csv::Error| Error::Io(e.to_string());
            w.write_record(CSV_HEADER).map_err(csv_err)?;
            for r in reports {
                w.write_record([
                    r.identity.clone(),
                    r.prime.to_string(),
                    r.params.clone(),
                    r.modulus.to_string(),
                    r.lhs.to_string(),
                    r.rhs.to_string(),
                    r.status.to_string(),
                    r.note.clone().unwrap_or_default(),
                    format!("{:.3}", r.elapsed_ms),
                ])
                .map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub(crate) fn odd_primes_except_five(hi: u64) -> Vec<u64> {
    primes_between(3, hi).into_iter().filter(|&p| p != 5).collect()
}

pub(crate) fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}
