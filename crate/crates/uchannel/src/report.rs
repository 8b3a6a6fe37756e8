//! Machine-readable verification reports: one named check, a three-valued
//! verdict, and enough evidence (eigenvalue lists, norms, flags) to recompute
//! the verdict without rerunning the tool.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cmatrix::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Undetermined,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Process exit code: 0 pass, 1 fail, 2 undetermined.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Undetermined => 2,
        }
    }
}

/// One piece of evidence inside a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    Eigenvalues { name: String, values: Vec<f64> },
    Scalar { name: String, value: f64 },
    Flag { name: String, value: bool },
    Text { name: String, value: String },
    Matrix { name: String, matrix: ComplexMatrix },
}

impl Evidence {
    pub fn eigenvalues(name: impl Into<String>, values: &[f64]) -> Self {
        Evidence::Eigenvalues { name: name.into(), values: values.to_vec() }
    }

    pub fn scalar(name: impl Into<String>, value: f64) -> Self {
        Evidence::Scalar { name: name.into(), value }
    }

    pub fn flag(name: impl Into<String>, value: bool) -> Self {
        Evidence::Flag { name: name.into(), value }
    }

    pub fn text(name: impl Into<String>, value: impl Into<String>) -> Self {
        Evidence::Text { name: name.into(), value: value.into() }
    }

    pub fn matrix(name: impl Into<String>, matrix: ComplexMatrix) -> Self {
        Evidence::Matrix { name: name.into(), matrix }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
    pub inputs_digest: String,
}

impl VerificationReport {
    pub fn new(
        check_name: impl Into<String>,
        verdict: Verdict,
        evidence: Vec<Evidence>,
        inputs_digest: String,
    ) -> Self {
        VerificationReport { check_name: check_name.into(), verdict, evidence, inputs_digest }
    }
}

/// SHA-256 hex digest of the canonical JSON serialization of the inputs.
pub fn digest_of(inputs: &impl Serialize) -> String {
    let bytes = serde_json::to_vec(inputs).unwrap_or_default();
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    hex_string(&hasher.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s
}
