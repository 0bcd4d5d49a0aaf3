//! On-disk table of the coefficients `c(1), …, c(N)`.
//!
//! ```text
//! ETAF1 N=<order>
//! 1 <c(1)>
//! …
//! <N> <c(N)>
//! END <count>
//! ```
//!
//! Parsing is strict: any deviation (header, ordering, count, stray text)
//! is reported as [`Error::CacheCorrupt`]. The format carries no checksum, so
//! values are instead checked against the Hecke relations of the form
//! (multiplicativity, the prime-power recursion, `c(5^e) = 0`) and the bound
//! `c(p)² ≤ 4p³`. An edit to `c(p)` for a prime `p > N/2` that stays within
//! the bound is the one kind of tampering that goes unnoticed.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::qseries::modular_form_f;

const MAGIC: &str = "ETAF1";

/// `c(0), c(1), …, c(N)` of the weight-4 form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientTable {
    coeffs: Vec<BigInt>,
}

impl CoefficientTable {
    pub fn build(order: usize) -> Result<Self> {
        Ok(Self { coeffs: modular_form_f(order)?.to_bigints() })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn c(&self, n: usize) -> Result<&BigInt> {
        self.coeffs.get(n).ok_or(Error::OutOfRange { index: n, order: self.order() })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC} N={}\n", self.order());
        for (n, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push_str(&format!("{n} {c}\n"));
        }
        out.push_str(&format!("END {}\n", self.order()));
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let corrupt = |why: String| Error::CacheCorrupt(why);
        let body = text.strip_suffix('\n').ok_or_else(|| corrupt("missing final newline".into()))?;
        let mut lines = body.split('\n');
        let header = lines.next().unwrap_or_default();
        let order: usize = header
            .strip_prefix(MAGIC)
            .and_then(|r| r.strip_prefix(" N="))
            .and_then(strict_uint)
            .ok_or_else(|| corrupt(format!("bad header {header:?}")))?;
        if order == 0 {
            return Err(corrupt("order must be at least 1".into()));
        }
        let mut coeffs = vec![BigInt::from(0)];
        for n in 1..=order {
            let line = lines.next().ok_or_else(|| corrupt(format!("missing line for n={n}")))?;
            let (idx, value) = line.split_once(' ').ok_or_else(|| corrupt(format!("malformed line {line:?}")))?;
            if strict_uint(idx) != Some(n) {
                return Err(corrupt(format!("expected index {n}, found {idx:?}")));
            }
            coeffs.push(strict_int(value).ok_or_else(|| corrupt(format!("bad coefficient {value:?} at n={n}")))?);
        }
        let footer = lines.next().ok_or_else(|| corrupt("missing END line".into()))?;
        let count = footer.strip_prefix("END ").and_then(strict_uint);
        if count != Some(order) {
            return Err(corrupt(format!("bad END line {footer:?}")));
        }
        if lines.next().is_some() {
            return Err(corrupt("trailing content after END".into()));
        }
        let table = Self { coeffs };
        table.check_hecke()?;
        Ok(table)
    }

    fn check_hecke(&self) -> Result<()> {
        let c = &self.coeffs;
        let fail = |n: usize| Err(Error::CacheCorrupt(format!("c({n}) = {} is inconsistent with the table", c[n])));
        if c[1] != BigInt::from(1) {
            return fail(1);
        }
        for n in 2..c.len() {
            let p = smallest_prime_factor(n);
            let mut pe = 1;
            while n % (pe * p) == 0 {
                pe *= p;
            }
            let expected = if pe != n {
                &c[pe] * &c[n / pe]
            } else if p == 5 {
                BigInt::from(0)
            } else if pe == p {
                if &c[p] * &c[p] > BigInt::from(4 * (p as u64).pow(3)) {
                    return fail(n);
                }
                continue;
            } else {
                &c[p] * &c[n / p] - BigInt::from((p as u64).pow(3)) * &c[n / p / p]
            };
            if c[n] != expected {
                return fail(n);
            }
        }
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        let mut f = fs::File::create(&tmp)?;
        f.write_all(self.to_text().as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

fn smallest_prime_factor(n: usize) -> usize {
    (2..).take_while(|d| d * d <= n).find(|d| n.is_multiple_of(*d)).unwrap_or(n)
}

fn strict_uint(s: &str) -> Option<usize> {
    let canonical = !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'));
    canonical.then(|| s.parse().ok()).flatten()
}

fn strict_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    let canonical = !digits.is_empty()
        && digits.bytes().all(|b| b.is_ascii_digit())
        && (digits == "0" || !digits.starts_with('0'))
        && s != "-0";
    canonical.then(|| s.parse().ok()).flatten()
}

/// How [`load_or_build`] obtained its table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CacheOutcome {
    /// No cache path configured.
    Computed,
    Loaded,
    /// No usable file existed; computed and written.
    Created,
    /// The file held too few coefficients; recomputed at the requested order.
    Extended {
        previous: usize,
    },
    /// The file failed validation; recomputed.
    Replaced {
        reason: String,
    },
}

/// Loads `c(1..=order)` from `path` if valid and long enough, else computes and (re)writes it.
pub fn load_or_build(path: Option<&Path>, order: usize) -> Result<(CoefficientTable, CacheOutcome)> {
    let Some(path) = path else {
        return Ok((CoefficientTable::build(order)?, CacheOutcome::Computed));
    };
    let outcome = match CoefficientTable::read(path) {
        Ok(table) if table.order() >= order => return Ok((table, CacheOutcome::Loaded)),
        Ok(table) => CacheOutcome::Extended { previous: table.order() },
        Err(Error::CacheCorrupt(reason)) => CacheOutcome::Replaced { reason },
        Err(Error::Io(_)) if !path.exists() => CacheOutcome::Created,
        Err(e) => return Err(e),
    };
    let table = CoefficientTable::build(order)?;
    table.write(path)?;
    Ok((table, outcome))
}
