//! Acceptance criteria, one PASS/FAIL line each. Tolerances, draw counts and
//! ranges are the pinned ones; the process exits non-zero if any line fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use askey_core::arith::gamma;
use askey_core::families::{limit_residual, CdhParams, ChahnParams, FamilyParams, LimitKind, MpParams};
use askey_core::props::{run_property, PropertyCase};
use askey_core::quadrature::{corollary_lhs, CorollaryId, CorollaryInput, DEFAULT_BUDGET};
use askey_core::record::{Outcome, RecordKind};
use askey_core::sampling::draw_corollary;
use askey_core::C64;
use askey_harness::verify::{self, RunConfig, Suite};

const SEED: u64 = 42;

struct Check {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Check {
    Check { ok, detail: detail.into() }
}

/// Runs properties and folds them into one check.
fn properties(list: &[(&str, usize, f64)]) -> Check {
    let cases: Vec<PropertyCase> =
        list.iter().map(|&(name, draws, tol)| run_property(name, SEED, draws, tol).expect("registered")).collect();
    let ok = cases.iter().all(|c| c.outcome == Outcome::Pass);
    let detail = cases
        .iter()
        .map(|c| format!("{} {:?} worst {:.2e} / tol {:.0e} over {} draws", c.name, c.outcome, c.worst, c.tolerance, c.draws))
        .collect::<Vec<_>>()
        .join("; ");
    check(ok, detail)
}

fn suite(suite: Suite, trials: usize, tol: f64) -> (verify::Report, f64) {
    let cfg = RunConfig { suites: vec![suite], seed: SEED, trials, tol, ..Default::default() };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let rep = pool.install(|| verify::run(&cfg)).unwrap();
    (rep, start.elapsed().as_secs_f64())
}

fn worst(rep: &verify::Report) -> f64 {
    rep.records.iter().filter_map(|r| r.rel_err).fold(0.0, f64::max)
}

fn criterion_1() -> Check {
    let (rep, secs) = suite(Suite::Identities, 5, 1e-8);
    let s = &rep.summary;
    let per_id = rep.records.len() == 15 * 5;
    check(
        s.passed == s.total && per_id && secs < 60.0,
        format!("{}/{} identity records pass at 1e-8, worst {:.2e}, {secs:.2} s single-threaded", s.passed, s.total, worst(&rep)),
    )
}

fn criterion_2() -> Check {
    properties(&[("degeneration", 50, 1e-12), ("base-pair-consistency", 20, 1e-12)])
}

fn criterion_3() -> Check {
    properties(&[("connection-expansion", 30, 1e-9), ("connection-delta", 60, 1e-12), ("ch-parity", 50, 0.0)])
}

fn criterion_4() -> Check {
    properties(&[("chu-vandermonde", 100, 1e-11), ("whipple", 100, 1e-11)])
}

fn criterion_5() -> Check {
    properties(&[("bounds-w1..w4", 10_000, 1e-12), ("growth-bound", 30, 0.0), ("mp-growth-sigma", 30, 0.0)])
}

fn criterion_6() -> Check {
    properties(&[("orthogonality", 12, 1e-8), ("quadrature-self-consistency", 8, 1.0)])
}

/// 2π Π_{i<j} Γ(p_i + p_j) / Γ(p_1 + p_2 + p_3 + p_4).
fn wilson_mass(p: [C64; 4]) -> C64 {
    let mut v = 2.0 * PI / gamma(p.iter().sum()).unwrap();
    for i in 0..4 {
        for j in i + 1..4 {
            v *= gamma(p[i] + p[j]).unwrap();
        }
    }
    v
}

fn criterion_7() -> Check {
    let (rep, secs) = suite(Suite::Corollaries, 1, 1e-6);
    let s = &rep.summary;
    let all = s.passed == s.total && s.total == 10 * 2 * 3 && rep.records.iter().all(|r| r.kind == RecordKind::Corollary);
    let rhos = [C64::new(0.0, 0.0), C64::new(0.3, 0.0)];
    let base = draw_corollary(CorollaryId::Iw1, SEED, 0, &rhos).unwrap();
    let inp = CorollaryInput { k: 0, rho: C64::new(0.0, 0.0), ..base };
    let FamilyParams::Wilson(target) = inp.target().unwrap() else { unreachable!() };
    let closed = wilson_mass(target.to_array());
    let quad = corollary_lhs(&inp, 1e-10, DEFAULT_BUDGET).unwrap().value;
    let e = (quad - closed).norm() / closed.norm();
    check(
        all && e <= 1e-6 && secs < 300.0,
        format!(
            "{}/{} corollary records pass at 1e-6, worst {:.2e}; iw1 at rho=0, k=0 vs closed-form Wilson integral {e:.2e}; {secs:.2} s",
            s.passed,
            s.total,
            worst(&rep)
        ),
    )
}

fn criterion_8() -> Check {
    let targets = [
        (LimitKind::WilsonToCdh, FamilyParams::Cdh(CdhParams::real(0.7, 1.2, 0.5).unwrap())),
        (LimitKind::WilsonToChahn, FamilyParams::Chahn(ChahnParams::new(C64::new(0.7, 0.3), C64::new(1.1, -0.4)).unwrap())),
        (LimitKind::CdhToMp, FamilyParams::Mp(MpParams::new(0.9, 1.2).unwrap())),
    ];
    let mut ok = true;
    let mut ratios = Vec::new();
    for (kind, p) in targets {
        for n in 1..=4 {
            let r: Vec<f64> = [10.0, 100.0, 1000.0].iter().map(|&t| limit_residual(kind, n, 0.8, &p, t).unwrap()).collect();
            let q = r[2] / r[1];
            ok &= r[0] > r[1] && r[1] > r[2] && (0.05..=0.2).contains(&q);
            ratios.push(q);
        }
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &q| (a.min(q), b.max(q)));
    check(ok, format!("12 (kind, n) sequences decrease over t = 10, 100, 1000; decade ratios in [{lo:.4}, {hi:.4}]"))
}

fn criterion_9() -> Check {
    properties(&[("mp-equivalence", 100, 1e-12)])
}

fn normalized_report(threads: &str, dir: &std::path::Path, name: &str) -> (String, i32) {
    let path = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_askey"))
        .args(["verify", "--suite", "all", "--seed", "42", "--report"])
        .arg(&path)
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .expect("askey runs")
        .status;
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    fn strip(v: &mut serde_json::Value) {
        match v {
            serde_json::Value::Object(m) => {
                m.remove("environment");
                m.remove("wall_time_ms");
                m.values_mut().for_each(strip);
            }
            serde_json::Value::Array(a) => a.iter_mut().for_each(strip),
            _ => {}
        }
    }
    strip(&mut v);
    (v.to_string(), status.code().unwrap_or(-1))
}

fn criterion_10() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let (a, ca) = normalized_report("1", dir.path(), "a.json");
    let (b, cb) = normalized_report("4", dir.path(), "b.json");
    check(a == b, format!("reports identical modulo environment and timing: {} ({} bytes; exit codes {ca}, {cb})", a == b, a.len()))
}

fn main() {
    let criteria: [(usize, &str, fn() -> Check); 10] = [
        (1, "identity catalog", criterion_1),
        (2, "degeneration", criterion_2),
        (3, "connections", criterion_3),
        (4, "Whipple and Chu-Vandermonde", criterion_4),
        (5, "bounds and growth", criterion_5),
        (6, "orthogonality", criterion_6),
        (7, "corollaries", criterion_7),
        (8, "limit relations", criterion_8),
        (9, "equivalence identity", criterion_9),
        (10, "determinism", criterion_10),
    ];
    let mut failed = 0;
    for (n, name, f) in criteria {
        let c = f();
        failed += usize::from(!c.ok);
        println!("criterion {n}: {} {name}: {}", if c.ok { "PASS" } else { "FAIL" }, c.detail);
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
