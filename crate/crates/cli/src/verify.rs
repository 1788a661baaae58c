//! Suite runner and report assembly for `askey verify`.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use askey_core::identities::{self, IdentityId};
use askey_core::props;
use askey_core::quadrature::{corollary_check, CorollaryId, CorollaryInput};
use askey_core::record::{Outcome, RecordInputs, RecordKind, VerificationRecord};
use askey_core::sampling::{draw_corollary, draw_identity};
use askey_core::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Tolerance floor for corollaries: the quadrature cannot reliably go lower.
pub const COROLLARY_TOL: f64 = 1e-6;
/// Expansion-point radii and degrees checked per corollary draw.
pub const COROLLARY_RHOS: [f64; 2] = [0.0, 0.3];
pub const COROLLARY_K_MAX: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Corollaries,
    Properties,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub suites: Vec<Suite>,
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    /// Where the report goes; not echoed, so reports written to different
    /// paths compare equal.
    #[serde(skip)]
    pub report_path: Option<PathBuf>,
    pub include: Vec<String>,
    pub exclude: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suites: vec![Suite::All],
            seed: 42,
            trials: 5,
            tol: 1e-8,
            report_path: None,
            include: Vec::new(),
            exclude: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Every tag `--include`/`--exclude` accepts.
pub fn known_tags() -> impl Iterator<Item = &'static str> {
    IdentityId::ALL
        .into_iter()
        .map(IdentityId::tag)
        .chain(CorollaryId::ALL.into_iter().map(CorollaryId::tag))
        .chain(props::names())
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials < 1 {
            return Err(ConfigError("trials must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(ConfigError(format!("tol must be positive and finite, got {}", self.tol)));
        }
        if self.suites.is_empty() {
            return Err(ConfigError("no suite selected".into()));
        }
        let known: BTreeSet<&str> = known_tags().collect();
        for tag in self.include.iter().chain(&self.exclude) {
            if !known.contains(tag.as_str()) {
                return Err(ConfigError(format!("unknown tag '{tag}'")));
            }
        }
        if let Some(tag) = self.include.iter().find(|t| self.exclude.contains(t)) {
            return Err(ConfigError(format!("tag '{tag}' is both included and excluded")));
        }
        Ok(())
    }

    fn runs(&self, suite: Suite) -> bool {
        self.suites.contains(&suite) || self.suites.contains(&Suite::All)
    }

    fn selected(&self, tag: &str) -> bool {
        (self.include.is_empty() || self.include.iter().any(|t| t == tag)) && !self.exclude.iter().any(|t| t == tag)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub threads: usize,
    pub os: String,
    pub arch: String,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            version: env!("CARGO_PKG_VERSION").to_string(),
            threads: rayon::current_num_threads(),
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub environment: Environment,
    pub records: Vec<VerificationRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.summary.failed == 0 {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

enum Job {
    Identity(IdentityId, usize),
    Corollary(CorollaryId, usize),
    Property(&'static str),
}

fn draw_failed(kind: RecordKind, tag: &str, trial: usize, seed: u64, tol: f64, e: askey_core::Error) -> VerificationRecord {
    let inputs = RecordInputs { seed: Some(seed), ..Default::default() };
    VerificationRecord::new(kind, tag, trial, inputs, tol).skip(e.to_string())
}

fn run_job(job: &Job, cfg: &RunConfig) -> Vec<VerificationRecord> {
    match *job {
        Job::Identity(id, trial) => vec![match draw_identity(id, cfg.seed, trial as u64) {
            Ok(inp) => identities::verify(&inp, cfg.tol, trial),
            Err(e) => draw_failed(RecordKind::Identity, id.tag(), trial, cfg.seed, cfg.tol, e),
        }],
        Job::Corollary(id, trial) => {
            let tol = cfg.tol.max(COROLLARY_TOL);
            let rhos = COROLLARY_RHOS.map(|r| C64::new(r, 0.0));
            match draw_corollary(id, cfg.seed, trial as u64, &rhos) {
                Ok(base) => rhos
                    .iter()
                    .flat_map(|&rho| (0..=COROLLARY_K_MAX).map(move |k| CorollaryInput { k, rho, ..base }))
                    .map(|inp| corollary_check(&inp, tol, trial))
                    .collect(),
                Err(e) => vec![draw_failed(RecordKind::Corollary, id.tag(), trial, cfg.seed, tol, e)],
            }
        }
        Job::Property(name) => {
            let rec = match props::run_default(name, cfg.seed) {
                Ok(case) => case.to_record(),
                Err(e) => {
                    let inputs = RecordInputs { seed: Some(cfg.seed), ..Default::default() };
                    VerificationRecord::new(RecordKind::Property, name, 0, inputs, 0.0).fail(e.to_string())
                }
            };
            vec![rec]
        }
    }
}

/// Runs the selected suites. Records are computed in parallel and ordered by
/// (kind, tag, trial, k); ties keep generation order.
pub fn run(cfg: &RunConfig) -> Result<Report, ConfigError> {
    cfg.validate()?;
    let start = Instant::now();
    let mut jobs = Vec::new();
    if cfg.runs(Suite::Identities) {
        for id in IdentityId::ALL.into_iter().filter(|id| cfg.selected(id.tag())) {
            jobs.extend((0..cfg.trials).map(|t| Job::Identity(id, t)));
        }
    }
    if cfg.runs(Suite::Corollaries) {
        for id in CorollaryId::ALL.into_iter().filter(|id| cfg.selected(id.tag())) {
            jobs.extend((0..cfg.trials).map(|t| Job::Corollary(id, t)));
        }
    }
    if cfg.runs(Suite::Properties) {
        jobs.extend(props::names().filter(|n| cfg.selected(n)).map(Job::Property));
    }
    let mut records: Vec<VerificationRecord> = jobs.par_iter().map(|j| run_job(j, cfg)).collect::<Vec<_>>().concat();
    records.sort_by_key(|r| r.sort_key());
    let count = |o: Outcome| records.iter().filter(|r| r.outcome == o).count();
    let summary = Summary {
        total: records.len(),
        passed: count(Outcome::Pass),
        failed: count(Outcome::Fail),
        skipped: count(Outcome::Skip),
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok(Report { config: cfg.clone(), environment: Environment::current(), records, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let ok = RunConfig::default();
        ok.validate().unwrap();
        let bad = RunConfig { trials: 0, ..ok.clone() };
        assert!(bad.validate().is_err());
        let bad = RunConfig { tol: 0.0, ..ok.clone() };
        assert!(bad.validate().is_err());
        let bad = RunConfig { include: vec!["bogus-id".into()], ..ok.clone() };
        assert!(bad.validate().unwrap_err().0.contains("bogus-id"));
        let bad = RunConfig { include: vec!["w-t1".into()], exclude: vec!["w-t1".into()], ..ok };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn include_filters_records() {
        let cfg = RunConfig { include: vec!["w-t1".into()], trials: 1, seed: 7, ..Default::default() };
        let rep = run(&cfg).unwrap();
        assert_eq!(rep.records.len(), 1);
        assert!(rep.records.iter().all(|r| r.tag == "w-t1"));
        assert_eq!(rep.exit_code(), 0);
    }

    #[test]
    fn report_round_trip() {
        let cfg = RunConfig {
            suites: vec![Suite::Identities, Suite::Properties],
            include: vec!["cdh-t2".into(), "mp-t3".into(), "ch-parity".into()],
            trials: 2,
            ..Default::default()
        };
        let rep = run(&cfg).unwrap();
        assert_eq!(rep.records.len(), 5);
        assert_eq!(Report::from_json(&rep.to_json()).unwrap(), rep);
    }
}
