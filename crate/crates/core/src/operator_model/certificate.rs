use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{residual, Frame, Operators};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    FiniteRank,
    InfiniteRank,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::FiniteRank => "finite-rank",
            Mode::InfiniteRank => "infinite-rank",
        }
    }
}

/// Provenance of a run. Everything needed to reproduce the certificate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Named tolerances (absolute values after scaling, plus the scale itself).
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Named counts: pool sizes, budget fields, blocks.
    #[serde(default)]
    pub budget: BTreeMap<String, u64>,
    /// Operator indices in the order the equalization stages ran.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stage_order: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Free-form details (sign pattern, simplex vertices, barycentric weights).
    #[serde(default)]
    pub details: BTreeMap<String, serde_json::Value>,
}

/// A frame plus the scalars it realizes, with residuals that anyone can
/// recompute from the operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub mode: Mode,
    pub frame: Frame,
    pub scalars: Vec<f64>,
    pub residuals: Vec<f64>,
    pub meta: Meta,
}

/// Result of rechecking a certificate from scratch.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub gram_deviation: f64,
    pub residuals: Vec<f64>,
    pub scale: f64,
}

impl CheckReport {
    /// Per-operator verdicts: residual `<= tol * scale`.
    pub fn operator_pass(&self, tol: f64) -> Vec<bool> {
        self.residuals.iter().map(|&r| r <= tol * self.scale).collect()
    }

    pub fn gram_pass(&self, gram_tol: f64) -> bool {
        self.gram_deviation <= gram_tol
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

impl Certificate {
    /// Computes residuals from `ops` and bundles everything.
    pub fn new<O: Operators + ?Sized>(
        ops: &O,
        mode: Mode,
        frame: Frame,
        scalars: Vec<f64>,
        meta: Meta,
    ) -> Result<Self> {
        let residuals = residual(ops, &frame, &scalars)?;
        Ok(Self { mode, frame, scalars, residuals, meta })
    }

    pub fn rank(&self) -> usize {
        self.frame.rank()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Recomputes the Gram deviation and residuals, ignoring the stored ones.
    pub fn check<O: Operators + ?Sized>(&self, ops: &O) -> Result<CheckReport> {
        let residuals = residual(ops, &self.frame, &self.scalars)?;
        Ok(CheckReport { gram_deviation: self.frame.gram_deviation(), residuals, scale: ops.scale() })
    }
}
