//! Registry of seeded property checks covering the invariants of every
//! numerical module. Each case draws from its own generator keyed by
//! (seed, property name, case index) and reports one error figure; the
//! property passes when the worst figure is within tolerance.

use std::time::Instant;

use crate::arith::{bound_margin, gamma, nearest_pole, pochhammer, BoundId};
use crate::connections::{chahn_connect, connection_matrix, expand, Connection};
use crate::families::{
    self, cdh_def_raw, chahn_def_raw, growth_bound_check, limit_residual, mp_def_raw, wilson_def_raw, Family,
    FamilyParams, LimitKind, WilsonParams,
};
use crate::hypergeom::{chu_vandermonde, pfq, whipple_sum, PfqSpec};
use crate::identities::{self, base_term, degenerate, derivative_at_zero, rhs_term, rhs_truncated, IdentityId, IdentityInput};
use crate::quadrature::{self, corollary_lhs, integrate, orthogonality_offdiag, weight, CorollaryId, CorollaryInput};
use crate::record::{Outcome, RecordInputs, RecordKind, VerificationRecord};
use crate::sampling::{draw_identity_with, Sampler};
use crate::{Error, Result, C64};

type CaseFn = fn(&mut Sampler, usize) -> Result<f64>;

pub struct PropertySpec {
    pub name: &'static str,
    pub module: &'static str,
    pub describe: &'static str,
    pub tol: f64,
    pub draws: usize,
    run: CaseFn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCase {
    pub name: String,
    pub seed: u64,
    pub draws: usize,
    pub tolerance: f64,
    pub outcome: Outcome,
    /// Largest error figure over the cases that ran.
    pub worst: f64,
    pub worst_case: Option<usize>,
    pub skipped: usize,
    pub detail: Option<String>,
    pub wall_time_ms: f64,
}

impl PropertyCase {
    pub fn to_record(&self) -> VerificationRecord {
        let inputs = RecordInputs { seed: Some(self.seed), draws: Some(self.draws), ..Default::default() };
        let mut rec = VerificationRecord::new(RecordKind::Property, &self.name, 0, inputs, self.tolerance);
        rec.rel_err = self.worst.is_finite().then_some(self.worst);
        rec.outcome = self.outcome;
        rec.reason = self.detail.clone();
        rec.wall_time_ms = self.wall_time_ms;
        rec
    }
}

macro_rules! prop {
    ($name:expr, $module:expr, $tol:expr, $draws:expr, $run:expr, $describe:expr) => {
        PropertySpec { name: $name, module: $module, describe: $describe, tol: $tol, draws: $draws, run: $run }
    };
}

pub static REGISTRY: &[PropertySpec] = &[
    prop!("pochhammer-split", "arith", 1e-12, 1000, pochhammer_split, "(z)_{m+n} = (z)_m (z+m)_n, m, n <= 30"),
    prop!("pochhammer-gamma", "arith", 1e-11, 1000, pochhammer_gamma, "(z)_n Gamma(z) = Gamma(z+n) for Re z > 0, n <= 30"),
    prop!("bounds-w1..w4", "arith", 1e-12, 10_000, bounds, "the four Pochhammer bounds, Re u in (0,5], |v| <= 5, n <= 50"),
    prop!("gamma-recurrence", "arith", 1e-12, 1000, gamma_recurrence, "Gamma(z+1) = z Gamma(z) away from poles"),
    prop!("chu-vandermonde", "hypergeom", 1e-11, 100, chu_vandermonde_prop, "terminating 2F1 at 1 against the closed form, n <= 20"),
    prop!("whipple", "hypergeom", 1e-11, 100, whipple_prop, "terminating well-poised 3F2 at 1 against the gamma quotient, n <= 15"),
    prop!("pfq-permutation", "hypergeom", 1e-13, 200, pfq_permutation, "terminating pFq invariant under parameter permutations"),
    prop!("pfq-tol-halving", "hypergeom", 1.0, 200, pfq_tol_halving, "halving tol moves the value by at most the larger error estimate (ratio)"),
    prop!("def-vs-sumrep", "families", 1e-10, 20, def_vs_sumrep, "definition against sum representation, n <= 10, all families"),
    prop!("wilson-symmetry", "families", 1e-10, 20, wilson_symmetry, "W_n invariant under the 24 permutations of (a,b,c,d)"),
    prop!("cdh-symmetry", "families", 1e-10, 20, cdh_symmetry, "S_n invariant under the 6 permutations of (a,b,c)"),
    prop!("ch-symmetry", "families", 1e-10, 20, ch_symmetry, "p_n invariant under a <-> b"),
    prop!("wilson-degree", "families", 1e-8, 20, wilson_degree, "(n+1)-th difference of W_n in x^2 vanishes, n-th does not"),
    prop!("realness", "families", 1e-9, 100, realness, "imaginary residue of Wilson, CDH and MP values"),
    prop!("connection-delta", "connections", 1e-12, 60, connection_delta, "coefficients reduce to delta_{n,k} at the source parameters"),
    prop!("connection-expansion", "connections", 1e-9, 30, connection_expansion, "P_n = sum_k a_{n,k} P_k at 10 points, n <= 8, all six relations"),
    prop!("connection-transitivity", "connections", 1e-9, 10, connection_transitivity, "Wilson d -> h -> d composes to the identity, n <= 6"),
    prop!("ch-parity", "connections", 0.0, 50, ch_parity, "continuous Hahn coefficients vanish for odd n - k"),
    prop!("base-pair-consistency", "identities", 1e-12, 20, base_pair, "w-t1 with h = d reproduces the w-gf1 terms"),
    prop!("degeneration", "identities", 1e-12, 50, degeneration, "generalized members at their source parameter reproduce the base terms, k <= 20"),
    prop!("monotone-refinement", "identities", 1e-12, 50, monotone_refinement, "truncation error at 2K is bounded by the error and tail at K"),
    prop!("coefficient-extraction", "identities", 1e-6, 4, coefficient_extraction, "d/drho at 0 of both sides for five random members"),
    prop!("weight-positivity", "quadrature", 0.0, 8, weight_positivity, "weight >= 0 at 10^4 points per family per draw (count of violations)"),
    prop!("quadrature-self-consistency", "quadrature", 1.0, 8, quadrature_self_consistency, "budget doubling moves an integral by at most 2x its error estimate (ratio)"),
    prop!("orthogonality", "quadrature", 1e-8, 12, orthogonality, "off-diagonal Gram entries over norm scale, m, n <= 5"),
    prop!("corollary-coherence", "quadrature", 1e-6, 4, corollary_coherence, "projection of the w-t1 left side onto W_k equals coefficient times norm, k <= 3"),
    prop!("growth-bound", "families", 0.0, 30, growth_bound, "growth fit finds finite (K, sigma) for CDH, CH, MP through n = 30"),
    prop!("mp-growth-sigma", "families", 0.0, 30, mp_growth_sigma, "fitted MP sigma <= 2|lambda + ix| + 1.5"),
    prop!("limit-rates", "families", 0.0, 15, limit_rates, "limit residuals decrease over t = 1e3, 1e4, 1e5 with decade ratio in [0.05, 0.2]"),
    prop!("mp-equivalence", "identities", 1e-12, 100, mp_equivalence, "mp-t1 left side against the closed form of its right side"),
];

pub fn lookup(name: &str) -> Option<&'static PropertySpec> {
    REGISTRY.iter().find(|p| p.name == name)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|p| p.name)
}

/// Runs `draws` seeded cases of a registered property.
pub fn run_property(name: &str, seed: u64, draws: usize, tol: f64) -> Result<PropertyCase> {
    let spec = lookup(name).ok_or_else(|| Error::UnknownProperty(name.to_string()))?;
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_case = None;
    let mut skipped = 0;
    let mut errors = Vec::new();
    for i in 0..draws {
        let mut s = Sampler::new(seed, name, i as u64);
        match (spec.run)(&mut s, i) {
            Ok(v) => {
                let v = if v.is_nan() { f64::INFINITY } else { v };
                if v > worst || worst_case.is_none() {
                    worst = worst.max(v);
                    worst_case = Some(i);
                }
            }
            Err(Error::Domain(_)) => skipped += 1,
            Err(e) => errors.push(format!("case {i}: {e}")),
        }
    }
    let ran = draws - skipped - errors.len();
    let (outcome, detail) = if !errors.is_empty() {
        (Outcome::Fail, Some(errors.join("; ")))
    } else if ran == 0 {
        (Outcome::Skip, Some("every case was outside the domain".to_string()))
    } else if worst <= tol {
        (Outcome::Pass, None)
    } else {
        (Outcome::Fail, Some(format!("worst error {worst:e} at case {}", worst_case.unwrap_or(0))))
    };
    Ok(PropertyCase {
        name: name.to_string(),
        seed,
        draws,
        tolerance: tol,
        outcome,
        worst,
        worst_case,
        skipped,
        detail,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs a property with its registered draws and tolerance.
pub fn run_default(name: &str, seed: u64) -> Result<PropertyCase> {
    let spec = lookup(name).ok_or_else(|| Error::UnknownProperty(name.to_string()))?;
    run_property(name, seed, spec.draws, spec.tol)
}

fn rel(reference: C64, value: C64) -> f64 {
    let d = (reference - value).norm();
    if d == 0.0 {
        0.0
    } else {
        d / reference.norm()
    }
}

fn rel1(reference: C64, value: C64) -> f64 {
    (reference - value).norm() / (1.0 + reference.norm())
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn permutations<const N: usize>(v: [C64; N]) -> Vec<[C64; N]> {
    if N <= 1 {
        return vec![v];
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..N).collect();
    // Heap's algorithm
    let mut cnt = vec![0usize; N];
    out.push(v);
    let mut i = 0;
    while i < N {
        if cnt[i] < i {
            if i % 2 == 0 {
                idx.swap(0, i);
            } else {
                idx.swap(cnt[i], i);
            }
            out.push(std::array::from_fn(|j| v[idx[j]]));
            cnt[i] += 1;
            i = 0;
        } else {
            cnt[i] = 0;
            i += 1;
        }
    }
    out
}

// arith

fn pochhammer_split(s: &mut Sampler, _: usize) -> Result<f64> {
    let z = C64::new(s.uniform(-5.0, 5.0), s.uniform(-3.0, 3.0));
    let (m, n) = (s.index(31), s.index(31));
    Ok(rel(pochhammer(z, m + n), pochhammer(z, m) * pochhammer(z + m as f64, n)))
}

fn pochhammer_gamma(s: &mut Sampler, _: usize) -> Result<f64> {
    let z = C64::new(5.0 * (1.0 - s.uniform(0.0, 1.0)), s.uniform(-3.0, 3.0));
    let n = s.index(31);
    Ok(rel(gamma(z + n as f64)?, pochhammer(z, n) * gamma(z)?))
}

fn bounds(s: &mut Sampler, _: usize) -> Result<f64> {
    let u = C64::new(5.0 * (1.0 - s.uniform(0.0, 1.0)), s.uniform(-5.0, 5.0));
    let v = s.disk(5.0);
    let n = s.index(51);
    let j = 1 + s.index(50);
    let k = s.index(n + 1);
    let mut worst = 0.0f64;
    for id in BoundId::ALL {
        let (lhs, rhs) = bound_margin(id, u, v, j, k, n)?;
        let excess = match id {
            BoundId::B1 => (rhs - lhs) / rhs,
            _ => (lhs - rhs) / rhs,
        };
        worst = worst.max(excess);
    }
    Ok(worst)
}

fn gamma_recurrence(s: &mut Sampler, _: usize) -> Result<f64> {
    let z = loop {
        let z = C64::new(s.uniform(-5.0, 5.0), s.uniform(-5.0, 5.0));
        let near = |w: C64| nearest_pole(w).is_some() || (w.im.abs() < 0.05 && w.re < 0.05 && (w.re - w.re.round()).abs() < 0.05);
        if !near(z) && !near(z + 1.0) {
            break z;
        }
    };
    Ok(rel(gamma(z + 1.0)?, z * gamma(z)?))
}

// hypergeom

fn chu_vandermonde_prop(s: &mut Sampler, _: usize) -> Result<f64> {
    let n = s.index(21);
    let b = C64::new(s.uniform(-3.0, 3.0), s.uniform(-2.0, 2.0));
    let cc = s.complex_param();
    let brute = pfq(&PfqSpec::new(&[c(-(n as f64)), b], &[cc], c(1.0)), 1e-15)?.value;
    Ok(rel(chu_vandermonde(n, b, cc)?, brute))
}

fn whipple_prop(s: &mut Sampler, _: usize) -> Result<f64> {
    let n = s.index(16);
    let ap = c(-(n as f64));
    let bp = C64::new(s.uniform(-3.0, 3.0), s.uniform(-2.0, 2.0));
    let cp = s.complex_param();
    let brute = pfq(&PfqSpec::new(&[ap, bp, cp], &[0.5 * (ap + bp + 1.0), 2.0 * cp], c(1.0)), 1e-15)?.value;
    let closed = whipple_sum(ap, bp, cp)?;
    // odd n gives an exact zero, so the error is taken relative to max(1, |value|)
    Ok((closed - brute).norm() / closed.norm().max(1.0))
}

fn pfq_permutation(s: &mut Sampler, _: usize) -> Result<f64> {
    let n = s.index(13);
    let num = [c(-(n as f64)), s.complex_param(), s.complex_param()];
    let den = [s.complex_param(), s.complex_param()];
    let z = s.disk(1.0);
    let v = pfq(&PfqSpec::new(&num, &den, z), 1e-15)?.value;
    let mut worst = 0.0f64;
    for pn in permutations(num) {
        for pd in permutations(den) {
            let w = pfq(&PfqSpec::new(&pn, &pd, z), 1e-15)?.value;
            worst = worst.max(rel1(v, w));
        }
    }
    Ok(worst)
}

fn pfq_tol_halving(s: &mut Sampler, _: usize) -> Result<f64> {
    let q = 1 + s.index(2);
    let num: Vec<C64> = (0..=q).map(|_| s.complex_param()).collect();
    let den: Vec<C64> = (0..q).map(|_| s.complex_param()).collect();
    let z = s.disk(0.9);
    let spec = PfqSpec::new(&num, &den, z);
    let (a, b) = (pfq(&spec, 1e-10)?, pfq(&spec, 5e-11)?);
    if !(a.converged && b.converged) {
        return Err(Error::NonConvergence { terms: a.terms_used.max(b.terms_used) });
    }
    let diff = (a.value - b.value).norm();
    let allowed = a.abs_err_est.max(b.abs_err_est);
    Ok(if diff == 0.0 { 0.0 } else { diff / allowed })
}

// families

fn def_vs_sumrep(s: &mut Sampler, i: usize) -> Result<f64> {
    let family = Family::ALL[i % 4];
    let params = s.family_params(family);
    let n = s.index(11);
    let x = s.x_for(family);
    let (d, r) = match params {
        FamilyParams::Wilson(p) => (c(families::wilson(n, x, &p)?), c(families::wilson_sumrep(n, x, &p)?)),
        FamilyParams::Cdh(p) => (c(families::cdh(n, x, &p)?), c(families::cdh_sumrep(n, x, &p)?)),
        FamilyParams::Chahn(p) => (families::chahn(n, x, &p)?, families::chahn_sumrep(n, x, &p)?),
        FamilyParams::Mp(p) => (c(families::mp(n, x, &p)?), c(families::mp_sumrep(n, x, &p)?)),
    };
    Ok(rel1(d, r))
}

fn wilson_symmetry(s: &mut Sampler, _: usize) -> Result<f64> {
    let p = s.wilson(false);
    let (n, x) = (s.index(11), s.x_half());
    let v = wilson_def_raw(n, x, p.to_array());
    Ok(permutations(p.to_array()).into_iter().map(|q| rel1(v, wilson_def_raw(n, x, q))).fold(0.0, f64::max))
}

fn cdh_symmetry(s: &mut Sampler, _: usize) -> Result<f64> {
    let p = s.cdh((1, 2));
    let (n, x) = (s.index(11), s.x_half());
    let v = cdh_def_raw(n, x, p.to_array());
    Ok(permutations(p.to_array()).into_iter().map(|q| rel1(v, cdh_def_raw(n, x, q))).fold(0.0, f64::max))
}

fn ch_symmetry(s: &mut Sampler, _: usize) -> Result<f64> {
    let p = s.chahn();
    let (n, x) = (s.index(11), s.x_whole());
    Ok(rel1(chahn_def_raw(n, x, p.a, p.b), chahn_def_raw(n, x, p.b, p.a)))
}

fn wilson_degree(s: &mut Sampler, _: usize) -> Result<f64> {
    let params = FamilyParams::Wilson(s.wilson(false));
    let n = s.index(9);
    let (y0, h) = (s.uniform(0.1, 1.0), 0.5);
    let vals: Vec<C64> =
        (0..n + 2).map(|j| families::eval(n, (y0 + j as f64 * h).sqrt(), &params)).collect::<Result<_>>()?;
    let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let diff = |order: usize| -> C64 {
        let mut d = vals.clone();
        for _ in 0..order {
            d = d.windows(2).map(|w| w[1] - w[0]).collect();
        }
        d[0]
    };
    let (lead, next) = (diff(n), diff(n + 1));
    if lead.norm() <= 1e-8 * scale {
        return Ok(f64::INFINITY);
    }
    Ok(next.norm() / scale)
}

fn realness(s: &mut Sampler, i: usize) -> Result<f64> {
    let n = s.index(11);
    let v = match i % 3 {
        0 => wilson_def_raw(n, s.x_half(), s.wilson(false).to_array()),
        1 => cdh_def_raw(n, s.x_half(), s.cdh((1, 2)).to_array()),
        _ => {
            let p = s.mp();
            mp_def_raw(n, s.x_whole(), p.lambda, p.phi)
        }
    };
    Ok(v.im.abs() / (1.0 + v.norm()))
}

// connections

/// Source parameters and a connection whose expansion basis is admissible.
fn draw_connection(s: &mut Sampler, which: usize) -> (FamilyParams, Connection) {
    match which % 6 {
        0 => (FamilyParams::Wilson(s.wilson(true)), Connection::Wilson1p { h: s.real_param() }),
        1 => {
            let (f, g) = s.pair_or_reals();
            (FamilyParams::Wilson(s.wilson(true)), Connection::Wilson3p { f, g, h: s.real_param() })
        }
        2 => {
            let (f, g) = s.pair_or_reals();
            (FamilyParams::Cdh(s.cdh((1, 2))), Connection::Cdh2p { f, g })
        }
        3 => (FamilyParams::Cdh(s.cdh((0, 1))), Connection::Cdh1p { d: s.real_param() }),
        4 => {
            let p = s.chahn();
            (FamilyParams::Chahn(p), Connection::Chahn { c: C64::new(s.re(), p.a.im) })
        }
        _ => (FamilyParams::Mp(s.mp()), Connection::Mp { psi: s.angle() }),
    }
}

fn identity_connection(source: &FamilyParams) -> Connection {
    match source {
        FamilyParams::Wilson(p) if p.d.im == 0.0 && p.a.im == 0.0 => Connection::Wilson1p { h: p.d },
        FamilyParams::Wilson(p) => Connection::Wilson3p { f: p.b, g: p.c, h: p.d },
        FamilyParams::Cdh(p) if p.c.im == 0.0 => Connection::Cdh1p { d: p.c },
        FamilyParams::Cdh(p) => Connection::Cdh2p { f: p.b, g: p.c },
        FamilyParams::Chahn(p) => Connection::Chahn { c: p.b },
        FamilyParams::Mp(p) => Connection::Mp { psi: p.phi },
    }
}

fn connection_delta(s: &mut Sampler, i: usize) -> Result<f64> {
    let (source, _) = draw_connection(s, i);
    let conn = match (i % 6, source) {
        (0, FamilyParams::Wilson(p)) => Connection::Wilson1p { h: p.d },
        (1, FamilyParams::Wilson(p)) => Connection::Wilson3p { f: p.b, g: p.c, h: p.d },
        (2, FamilyParams::Cdh(p)) => Connection::Cdh2p { f: p.b, g: p.c },
        _ => identity_connection(&source),
    };
    let n = s.index(9);
    let mut worst = 0.0f64;
    for k in 0..=n {
        let a = conn.coeff(n, k, &source)?.value;
        let delta = if k == n { c(1.0) } else { c(0.0) };
        worst = worst.max((a - delta).norm());
    }
    Ok(worst)
}

fn connection_expansion(s: &mut Sampler, i: usize) -> Result<f64> {
    let (source, conn) = draw_connection(s, i);
    let n = s.index(9);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let x = s.x_for(source.family());
        let (l, r) = expand(&conn, n, &source, x)?;
        worst = worst.max(rel1(l, r));
    }
    Ok(worst)
}

fn connection_transitivity(s: &mut Sampler, _: usize) -> Result<f64> {
    let p = s.wilson(true);
    let h = s.real_param();
    let n_max = 6;
    let a = connection_matrix(&Connection::Wilson1p { h }, n_max, &FamilyParams::Wilson(p))?;
    let back = FamilyParams::Wilson(WilsonParams::new(p.a, p.b, p.c, h)?);
    let b = connection_matrix(&Connection::Wilson1p { h: p.d }, n_max, &back)?;
    let mut worst = 0.0f64;
    for n in 0..=n_max {
        for j in 0..=n_max {
            let (mut sum, mut mag) = (c(0.0), 0.0);
            for k in 0..=n_max {
                sum += a[n][k] * b[k][j];
                mag += a[n][k].norm() * b[k][j].norm();
            }
            let delta = if n == j { 1.0 } else { 0.0 };
            worst = worst.max((sum - delta).norm() / mag.max(1.0));
        }
    }
    Ok(worst)
}

fn ch_parity(s: &mut Sampler, _: usize) -> Result<f64> {
    let p = s.chahn();
    let cp = C64::new(s.re(), p.a.im);
    let n = s.index(13);
    let mut worst = 0.0f64;
    for k in (0..=n).filter(|k| (n - k) % 2 == 1) {
        worst = worst.max(chahn_connect(n, k, &p, cp)?.value.norm());
    }
    Ok(worst)
}

// identities

fn termwise_degeneration(inp: &IdentityInput) -> Result<f64> {
    let deg = degenerate(inp)?;
    let mut worst = 0.0f64;
    for k in 0..=20 {
        worst = worst.max(rel(base_term(&deg, k)?, rhs_term(&deg, k, 1e-15)?));
    }
    Ok(worst)
}

fn base_pair(s: &mut Sampler, _: usize) -> Result<f64> {
    let inp = draw_identity_with(IdentityId::WT1, s);
    inp.check_domain()?;
    termwise_degeneration(&inp)
}

fn degeneration(s: &mut Sampler, _: usize) -> Result<f64> {
    let members: Vec<IdentityId> = IdentityId::ALL.into_iter().filter(|id| id.has_base()).collect();
    let id = members[s.index(members.len())];
    let inp = draw_identity_with(id, s);
    inp.check_domain()?;
    termwise_degeneration(&inp)
}

fn monotone_refinement(s: &mut Sampler, _: usize) -> Result<f64> {
    let members: Vec<IdentityId> = IdentityId::ALL.into_iter().filter(|&id| id != IdentityId::MpT1e).collect();
    let id = members[s.index(members.len())];
    let inp = draw_identity_with(id, s);
    let l = identities::lhs(&inp)?;
    let scale = l.norm().max(1.0);
    let mut prev: Option<(f64, f64)> = None;
    let mut worst = 0.0f64;
    for k in [8, 16, 32, 64] {
        let r = rhs_truncated(&inp, k, 1e-15)?;
        let e = (l - r.value).norm() / scale;
        let tail = r.abs_err_est / scale;
        if let Some((pe, pt)) = prev {
            worst = worst.max(e - pe - 2.0 * pt);
        }
        prev = Some((e, tail));
    }
    Ok(worst)
}

fn coefficient_extraction(s: &mut Sampler, _: usize) -> Result<f64> {
    let mut pool: Vec<IdentityId> = IdentityId::ALL.to_vec();
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let id = pool.remove(s.index(pool.len()));
        let inp = draw_identity_with(id, s);
        let f_l = |r: C64| identities::lhs(&IdentityInput { rho: r, ..inp });
        let f_r = |r: C64| Ok(rhs_truncated(&IdentityInput { rho: r, ..inp }, 1, 1e-15)?.value);
        let (dl, dr) = (derivative_at_zero(f_l, 1e-3)?, derivative_at_zero(f_r, 1e-3)?);
        worst = worst.max((dl - dr).norm() / dr.norm().max(1e-3));
    }
    Ok(worst)
}

fn mp_equivalence(s: &mut Sampler, _: usize) -> Result<f64> {
    let inp = draw_identity_with(IdentityId::MpT1e, s);
    inp.check_domain()?;
    Ok(rel(identities::lhs(&inp)?, identities::mp_t1_closed(&inp)?))
}

// quadrature

fn weight_positivity(s: &mut Sampler, i: usize) -> Result<f64> {
    let family = Family::ALL[i % 4];
    let params = s.family_params(family);
    let mut bad = 0;
    for _ in 0..10_000 {
        let x = s.x_for(family);
        match weight(&params, x) {
            Ok(w) if w >= 0.0 => {}
            Err(Error::Overflow(_)) => {}
            _ => bad += 1,
        }
    }
    Ok(bad as f64)
}

fn gram_integrand(params: FamilyParams, m: usize, n: usize) -> impl Fn(f64) -> C64 {
    move |x| {
        let w = weight(&params, x).unwrap_or(0.0);
        if w == 0.0 {
            return c(0.0);
        }
        match (families::eval(m, x, &params), families::eval(n, x, &params)) {
            (Ok(p), Ok(q)) => w * p * q,
            _ => c(f64::NAN),
        }
    }
}

fn quadrature_self_consistency(s: &mut Sampler, i: usize) -> Result<f64> {
    let family = Family::ALL[i % 4];
    let params = s.family_params(family);
    let (m, n) = (s.index(6), s.index(6));
    let f = gram_integrand(params, m, n);
    let run = |budget| match integrate(&f, family.domain(), 1e-13, budget) {
        Ok(r) => Ok(r),
        Err(Error::BudgetExceeded { partial, .. }) => Ok(partial),
        Err(e) => Err(e),
    };
    // budgets small enough that the first run stops early
    let (a, b) = (run(500)?, run(1000)?);
    let diff = (a.value - b.value).norm();
    Ok(if diff == 0.0 { 0.0 } else { diff / (2.0 * a.abs_err_est) })
}

fn orthogonality(s: &mut Sampler, i: usize) -> Result<f64> {
    let params = s.family_params(Family::ALL[i % 4]);
    let mut worst = 0.0f64;
    for m in 0..=5 {
        for n in m + 1..=5 {
            worst = worst.max(orthogonality_offdiag(m, n, &params, 1e-8)?.ratio);
        }
    }
    Ok(worst)
}

fn corollary_coherence(s: &mut Sampler, _: usize) -> Result<f64> {
    let mut inp = draw_identity_with(IdentityId::WT1, s);
    inp.rho = C64::from_polar(s.uniform(0.2, 0.5), s.uniform(0.0, 2.0 * std::f64::consts::PI));
    inp.check_domain()?;
    let cor = CorollaryInput { id: CorollaryId::Iw1, k: 0, params: inp.params, aux: inp.aux, rho: inp.rho };
    let target = cor.target()?;
    let x0 = 1.3;
    let mut worst = 0.0f64;
    for k in 0..=3 {
        let coef = rhs_term(&IdentityInput { x: x0, ..inp }, k, 1e-15)? / families::eval(k, x0, &target)?;
        let norm = integrate(&gram_integrand(target, k, k), target.family().domain(), 1e-12, quadrature::DEFAULT_BUDGET)?;
        let proj = corollary_lhs(&CorollaryInput { k, ..cor }, 1e-12, quadrature::DEFAULT_BUDGET)?;
        let want = coef * norm.value;
        worst = worst.max((proj.value - want).norm() / proj.value.norm().max(1.0));
    }
    Ok(worst)
}

// growth and limits

fn growth_bound(s: &mut Sampler, i: usize) -> Result<f64> {
    let family = [Family::Cdh, Family::Chahn, Family::Mp][i % 3];
    let params = s.family_params(family);
    let x = s.x_for(family);
    Ok(match growth_bound_check(family, 30, x, &params) {
        Ok(_) => 0.0,
        Err(Error::Fit(_)) => 1.0,
        Err(e) => return Err(e),
    })
}

fn mp_growth_sigma(s: &mut Sampler, _: usize) -> Result<f64> {
    let p = s.mp();
    let x = s.x_whole();
    let (_, sigma) = growth_bound_check(Family::Mp, 30, x, &FamilyParams::Mp(p))?;
    Ok((sigma - (2.0 * C64::new(p.lambda, x).norm() + 1.5)).max(0.0))
}

fn limit_rates(s: &mut Sampler, i: usize) -> Result<f64> {
    let (kind, target) = match i % 3 {
        0 => (LimitKind::WilsonToCdh, FamilyParams::Cdh(s.cdh((1, 2)))),
        1 => (LimitKind::WilsonToChahn, FamilyParams::Chahn(s.chahn())),
        _ => (LimitKind::CdhToMp, FamilyParams::Mp(s.mp())),
    };
    let x = s.x_for(target.family());
    let mut worst = 0.0f64;
    for n in 1..=4 {
        let r: Vec<f64> =
            [1e3, 1e4, 1e5].iter().map(|&t| limit_residual(kind, n, x, &target, t)).collect::<Result<_>>()?;
        if !(r[0] > r[1] && r[1] > r[2]) {
            worst = worst.max(1.0);
            continue;
        }
        let q = r[2] / r[1];
        worst = worst.max((0.05 - q).max(q - 0.2).max(0.0));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_covers_every_invariant() {
        // invariant bullets per module: arith 4, hypergeom 4, families 4,
        // connections 4, identities 4, quadrature 4
        for (module, bullets) in
            [("arith", 4), ("hypergeom", 4), ("families", 4), ("connections", 4), ("identities", 4), ("quadrature", 4)]
        {
            let n = REGISTRY.iter().filter(|p| p.module == module).count();
            assert!(n >= bullets, "{module}: {n} < {bullets}");
        }
        let mut names: Vec<_> = names().collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), REGISTRY.len());
    }

    #[test]
    fn unknown_property() {
        assert!(matches!(run_property("nonexistent", 1, 1, 1.0), Err(Error::UnknownProperty(_))));
    }

    #[test]
    fn permutations_are_complete() {
        let v = [c(1.0), c(2.0), c(3.0), c(4.0)];
        let mut p: Vec<Vec<u64>> = permutations(v).iter().map(|q| q.iter().map(|z| z.re as u64).collect()).collect();
        p.sort();
        p.dedup();
        assert_eq!(p.len(), 24);
    }

    #[test]
    fn spec_examples() {
        assert_eq!(run_property("wilson-symmetry", 1, 20, 1e-10).unwrap().outcome, Outcome::Pass);
        let b = run_property("bounds-w1..w4", 1, 10_000, 1e-12).unwrap();
        assert_eq!(b.outcome, Outcome::Pass, "{b:?}");
    }

    #[test]
    fn determinism() {
        let a = run_property("pochhammer-split", 9, 50, 1e-12).unwrap();
        let b = run_property("pochhammer-split", 9, 50, 1e-12).unwrap();
        assert_eq!(a.worst.to_bits(), b.worst.to_bits());
        assert_eq!(a.outcome, b.outcome);
    }
}
