//! Structured outcome records for identity checks.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::arith::Residue;
use crate::gk_ring::GKElement;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        })
    }
}

/// One side of a checked identity: a canonical residue in `[0, p^K)`, or the
/// coefficient vector of a ring element (or a multiplicity table).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ReportValue {
    Int(u64),
    /// Only used for negative integers; see [`ReportValue::signed`].
    Signed(i64),
    Vector(Vec<u64>),
    None,
}

impl ReportValue {
    /// An exact integer that may be negative (non-modular comparisons).
    pub fn signed(v: i64) -> Self {
        if v >= 0 {
            ReportValue::Int(v as u64)
        } else {
            ReportValue::Signed(v)
        }
    }
}

impl From<Residue> for ReportValue {
    fn from(r: Residue) -> Self {
        ReportValue::Int(r.value())
    }
}

impl From<&GKElement> for ReportValue {
    fn from(e: &GKElement) -> Self {
        ReportValue::Vector(e.raw_coeffs().to_vec())
    }
}

impl fmt::Display for ReportValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportValue::Int(v) => write!(f, "{v}"),
            ReportValue::Signed(v) => write!(f, "{v}"),
            ReportValue::Vector(vs) => {
                let parts: Vec<String> = vs.iter().map(u64::to_string).collect();
                write!(f, "[{}]", parts.join(" "))
            }
            ReportValue::None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    pub prime: u64,
    /// Free-form parameter tag distinguishing reports for the same identity and prime.
    pub params: String,
    /// `p^K`, or 0 when the check is not modular.
    pub modulus: u64,
    pub lhs: ReportValue,
    pub rhs: ReportValue,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub elapsed_ms: f64,
}

impl VerificationReport {
    pub fn compare(
        identity: impl Into<String>,
        prime: u64,
        params: impl Into<String>,
        modulus: u64,
        lhs: impl Into<ReportValue>,
        rhs: impl Into<ReportValue>,
        started: Instant,
    ) -> Self {
        let (lhs, rhs) = (lhs.into(), rhs.into());
        let status = if lhs == rhs { Status::Pass } else { Status::Fail };
        Self {
            identity: identity.into(),
            prime,
            params: params.into(),
            modulus,
            lhs,
            rhs,
            status,
            note: None,
            elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
        }
    }

    pub fn skipped(
        identity: impl Into<String>,
        prime: u64,
        params: impl Into<String>,
        reason: impl Into<String>,
    ) -> Self {
        Self {
            identity: identity.into(),
            prime,
            params: params.into(),
            modulus: 0,
            lhs: ReportValue::None,
            rhs: ReportValue::None,
            status: Status::Skip,
            note: Some(reason.into()),
            elapsed_ms: 0.0,
        }
    }

    /// A check that could not be evaluated; recorded as a failure with the error text.
    pub fn errored(identity: impl Into<String>, prime: u64, params: impl Into<String>, err: &crate::Error) -> Self {
        Self { status: Status::Fail, note: Some(format!("error: {err}")), ..Self::skipped(identity, prime, params, "") }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Copy with the timing field zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> Self {
        Self { elapsed_ms: 0.0, ..self.clone() }
    }
}
