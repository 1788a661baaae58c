//! Verification records shared by identities, corollaries and properties.

use serde::{Deserialize, Serialize};

use crate::families::FamilyParams;
use crate::identities::Aux;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Identity,
    Corollary,
    Property,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Skip,
}

/// Inputs echoed into a record. Fields that do not apply stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RecordInputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<FamilyParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<Aux>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub kind: RecordKind,
    pub tag: String,
    pub trial: usize,
    pub inputs: RecordInputs,
    pub lhs: Option<C64>,
    pub rhs: Option<C64>,
    /// |lhs − rhs| / max(1, |lhs|), or the worst error of a property run.
    pub rel_err: Option<f64>,
    pub tol: f64,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms_used: Option<usize>,
    pub wall_time_ms: f64,
}

pub fn rel_err(lhs: C64, rhs: C64) -> f64 {
    (lhs - rhs).norm() / lhs.norm().max(1.0)
}

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl VerificationRecord {
    pub fn new(kind: RecordKind, tag: &str, trial: usize, inputs: RecordInputs, tol: f64) -> Self {
        VerificationRecord {
            kind,
            tag: tag.to_string(),
            trial,
            inputs,
            lhs: None,
            rhs: None,
            rel_err: None,
            tol,
            outcome: Outcome::Fail,
            reason: None,
            terms_used: None,
            wall_time_ms: 0.0,
        }
    }

    /// Fills in both sides and decides pass/fail against `tol`.
    pub fn compare(mut self, lhs: C64, rhs: C64) -> Self {
        if finite(lhs) && finite(rhs) {
            let e = rel_err(lhs, rhs);
            self.lhs = Some(lhs);
            self.rhs = Some(rhs);
            self.rel_err = Some(e);
            self.outcome = if e <= self.tol { Outcome::Pass } else { Outcome::Fail };
        } else {
            self.lhs = finite(lhs).then_some(lhs);
            self.rhs = finite(rhs).then_some(rhs);
            self.outcome = Outcome::Fail;
            self.reason = Some("non-finite side".into());
        }
        self
    }

    pub fn skip(mut self, reason: impl Into<String>) -> Self {
        self.outcome = Outcome::Skip;
        self.reason = Some(reason.into());
        self
    }

    pub fn fail(mut self, reason: impl Into<String>) -> Self {
        self.outcome = Outcome::Fail;
        self.reason = Some(reason.into());
        self
    }

    /// Sort key: (kind, tag, trial, k).
    pub fn sort_key(&self) -> (RecordKind, String, usize, usize) {
        (self.kind, self.tag.clone(), self.trial, self.inputs.k.unwrap_or(0))
    }
}
