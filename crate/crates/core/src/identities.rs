//! The generating-function identities: base generating functions and their
//! generalizations through connection relations. Each member has a closed
//! left side and a right side summed term by term.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::arith::{ln_factorial, ln_pochhammer};
use crate::error::{domain, Error, Result};
use crate::families::{
    cdh_scaled, chahn_scaled, mp_scaled, wilson_scaled, CdhParams, ChahnParams, Family, FamilyParams, MpParams, Scaled,
    WilsonParams,
};
use crate::hypergeom::{pfq_analytic, PfqSpec, SeriesValue, DISK_LIMIT};
use crate::record::{Outcome, RecordInputs, RecordKind, VerificationRecord};
use crate::C64;

/// Adaptive truncation starts here and doubles up to [`K_CAP`].
pub const K_START: usize = 16;
pub const K_CAP: usize = 2048;
/// Stopping tolerance for closed-form (left side) series.
const LHS_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IdentityId {
    #[serde(rename = "w-gf1")]
    WGf1,
    #[serde(rename = "w-gf2")]
    WGf2,
    #[serde(rename = "w-t1")]
    WT1,
    #[serde(rename = "w-t2")]
    WT2,
    #[serde(rename = "cdh-gf1")]
    CdhGf1,
    #[serde(rename = "cdh-l6")]
    CdhL6,
    #[serde(rename = "cdh-t1")]
    CdhT1,
    #[serde(rename = "cdh-t2")]
    CdhT2,
    #[serde(rename = "cdh-t3")]
    CdhT3,
    #[serde(rename = "ch-t1")]
    ChT1,
    #[serde(rename = "ch-t2")]
    ChT2,
    #[serde(rename = "mp-t1")]
    MpT1,
    #[serde(rename = "mp-t1e")]
    MpT1e,
    #[serde(rename = "mp-t2")]
    MpT2,
    #[serde(rename = "mp-t3")]
    MpT3,
}

use IdentityId::*;

impl IdentityId {
    pub const ALL: [IdentityId; 15] =
        [WGf1, WGf2, WT1, WT2, CdhGf1, CdhL6, CdhT1, CdhT2, CdhT3, ChT1, ChT2, MpT1, MpT1e, MpT2, MpT3];

    pub fn tag(self) -> &'static str {
        match self {
            WGf1 => "w-gf1",
            WGf2 => "w-gf2",
            WT1 => "w-t1",
            WT2 => "w-t2",
            CdhGf1 => "cdh-gf1",
            CdhL6 => "cdh-l6",
            CdhT1 => "cdh-t1",
            CdhT2 => "cdh-t2",
            CdhT3 => "cdh-t3",
            ChT1 => "ch-t1",
            ChT2 => "ch-t2",
            MpT1 => "mp-t1",
            MpT1e => "mp-t1e",
            MpT2 => "mp-t2",
            MpT3 => "mp-t3",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            WGf1 => "Wilson generating function, product of two 2F1",
            WGf2 => "Wilson generating function with a 4F3 at -4rho/(1-rho)^2",
            WT1 => "w-gf1 re-expanded in W_k(a,b,c,h), inner 4F3",
            WT2 => "w-gf2 re-expanded in W_k(a,b,c,h), inner 3F2",
            CdhGf1 => "continuous dual Hahn generating function (1-rho)^(-c+ix) 2F1",
            CdhL6 => "(1-rho)^(d-c) 2F1(b-f,d;b;rho) as a series of terminating 3F2",
            CdhT1 => "cdh-gf1 re-expanded in S_k(a,c,f), inner 2F1",
            CdhT2 => "e^rho 2F2 generating function re-expanded in S_k(a,b,d), inner 1F1",
            CdhT3 => "(1-rho)^-gamma 3F2 generating function re-expanded in S_k(a,b,d), inner 2F1",
            ChT1 => "continuous Hahn 1F1*1F1 generating function re-expanded in p_k(a,c), inner 4F5",
            ChT2 => "continuous Hahn 3F2 generating function re-expanded in p_k(a,c), inner 2F1",
            MpT1 => "Meixner-Pollaczek generating function re-expanded at angle psi",
            MpT1e => "closed form of the mp-t1 right side",
            MpT2 => "e^rho 1F1 generating function re-expanded at angle psi",
            MpT3 => "(1-rho)^-gamma 2F1 generating function re-expanded at angle psi",
        }
    }

    pub fn family(self) -> Family {
        match self {
            WGf1 | WGf2 | WT1 | WT2 => Family::Wilson,
            CdhGf1 | CdhL6 | CdhT1 | CdhT2 | CdhT3 => Family::Cdh,
            ChT1 | ChT2 => Family::Chahn,
            MpT1 | MpT1e | MpT2 | MpT3 => Family::Mp,
        }
    }

    /// Names of the auxiliary parameters the member reads.
    pub fn aux_names(self) -> &'static [&'static str] {
        match self {
            WGf1 | WGf2 | CdhGf1 => &[],
            WT1 | WT2 => &["h"],
            CdhL6 => &["d", "f"],
            CdhT1 => &["f"],
            CdhT2 => &["d"],
            CdhT3 => &["d", "gamma"],
            ChT1 | ChT2 => &["c"],
            MpT1 | MpT1e | MpT2 => &["psi"],
            MpT3 => &["psi", "gamma"],
        }
    }

    /// Identities valid for every complex ρ.
    pub fn entire(self) -> bool {
        matches!(self, CdhT2 | ChT1 | MpT2)
    }

    /// Members whose free parameter can be set back to the source parameter.
    pub fn has_base(self) -> bool {
        matches!(self, WT1 | WT2 | CdhT1 | CdhT2 | CdhT3 | ChT1 | ChT2 | MpT1 | MpT2 | MpT3)
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for IdentityId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.tag() == s)
            .ok_or_else(|| Error::Domain(format!("unknown identity tag '{s}'")))
    }
}

/// Auxiliary (free) parameters. Which ones a member reads is given by
/// [`IdentityId::aux_names`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Aux {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<f64>,
}

fn need<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::Domain(format!("missing auxiliary parameter {name}")))
}

/// One evaluation point of an identity.
///
/// Parameter roles: Wilson members use (a, b, c, d) with h replacing d.
/// cdh-gf1/cdh-t1 use the source S_n(x²; a, b, c), f replacing b. cdh-t2/t3
/// use S_n(x²; a, b, c) with d replacing c. cdh-l6 reads b and c from the
/// family record (a is unused) and d, f from `aux`. Continuous Hahn members
/// replace b by c; Meixner–Pollaczek members replace φ by ψ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityInput {
    pub id: IdentityId,
    pub params: FamilyParams,
    pub aux: Aux,
    pub x: f64,
    pub rho: C64,
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn ix(x: f64) -> C64 {
    C64::new(0.0, x)
}

/// pFq with equal numerator/denominator pairs cancelled, continued outside
/// the disk when p = q+1. Non-convergence is an error here.
pub(crate) fn hyp(num: &[C64], den: &[C64], z: C64, tol: f64) -> Result<C64> {
    let mut num = num.to_vec();
    let mut den = den.to_vec();
    let mut i = 0;
    while i < num.len() {
        match den.iter().position(|&d| d == num[i]) {
            Some(j) => {
                num.remove(i);
                den.remove(j);
            }
            None => i += 1,
        }
    }
    let s = pfq_analytic(&PfqSpec::new(&num, &den, z), tol)?;
    if !s.converged {
        return Err(Error::NonConvergence { terms: s.terms_used });
    }
    Ok(s.value)
}

/// z^w on the principal branch.
fn cpow(z: C64, w: C64) -> C64 {
    (w * z.ln()).exp()
}

/// k·ln z, with the convention 0^0 = 1.
fn ln_pow(z: C64, k: usize) -> C64 {
    if k == 0 {
        c(0.0)
    } else {
        k as f64 * z.ln()
    }
}

/// exp(ln) · scaled polynomial · inner factor.
fn assemble(ln: C64, poly: Scaled, inner: C64) -> C64 {
    let e = ln + poly.ln_scale;
    if e.re == f64::NEG_INFINITY || poly.mantissa == c(0.0) || inner == c(0.0) {
        return c(0.0);
    }
    e.exp() * poly.mantissa * inner
}

/// The convergence condition of the Meixner–Pollaczek expansions,
/// |ρ|(sin φ + |sin(ψ−φ)|) < sin ψ.
pub fn mp_cond(phi: f64, psi: f64, rho: C64) -> bool {
    rho.norm() * (phi.sin() + (psi - phi).sin().abs()) < psi.sin()
}

struct W {
    a: C64,
    b: C64,
    c: C64,
    d: C64,
}

impl IdentityInput {
    fn wilson(&self) -> Result<W> {
        match self.params {
            FamilyParams::Wilson(p) => Ok(W { a: p.a, b: p.b, c: p.c, d: p.d }),
            _ => domain(format!("{} needs Wilson parameters", self.id)),
        }
    }

    fn cdh(&self) -> Result<CdhParams> {
        match self.params {
            FamilyParams::Cdh(p) => Ok(p),
            _ => domain(format!("{} needs continuous dual Hahn parameters", self.id)),
        }
    }

    fn chahn(&self) -> Result<ChahnParams> {
        match self.params {
            FamilyParams::Chahn(p) => Ok(p),
            _ => domain(format!("{} needs continuous Hahn parameters", self.id)),
        }
    }

    fn mp(&self) -> Result<MpParams> {
        match self.params {
            FamilyParams::Mp(p) => Ok(p),
            _ => domain(format!("{} needs Meixner-Pollaczek parameters", self.id)),
        }
    }

    /// Checks the member's hypotheses: parameter admissibility and the ρ domain.
    pub fn check_domain(&self) -> Result<()> {
        let rho = self.rho;
        if !(rho.re.is_finite() && rho.im.is_finite() && self.x.is_finite()) {
            return domain("non-finite rho or x");
        }
        match self.id {
            WGf1 | WGf2 => {
                self.wilson()?;
            }
            WT1 | WT2 => {
                let p = self.wilson()?;
                WilsonParams::new(p.a, p.b, p.c, need(self.aux.h, "h")?)?;
            }
            CdhGf1 => {
                self.cdh()?;
            }
            CdhL6 => {
                let p = self.cdh()?;
                need(self.aux.d, "d")?;
                need(self.aux.f, "f")?;
                if !(p.b.re > 0.0 && p.c.re > 0.0) {
                    return domain("cdh-l6 needs Re b > 0 and Re c > 0");
                }
            }
            CdhT1 => {
                let p = self.cdh()?;
                CdhParams::new(p.a, p.c, need(self.aux.f, "f")?)?;
            }
            CdhT2 => {
                let p = self.cdh()?;
                CdhParams::new(p.a, p.b, need(self.aux.d, "d")?)?;
            }
            CdhT3 => {
                let p = self.cdh()?;
                CdhParams::new(p.a, p.b, need(self.aux.d, "d")?)?;
                need(self.aux.gamma, "gamma")?;
            }
            ChT1 | ChT2 => {
                let p = self.chahn()?;
                let cc = need(self.aux.c, "c")?;
                ChahnParams::new(p.a, cc)?;
                if (p.b.im - p.a.im).abs() > 1e-12 || (cc.im - p.a.im).abs() > 1e-12 {
                    return domain("continuous Hahn identities need Im a = Im b = Im c");
                }
            }
            MpT1 | MpT1e | MpT2 | MpT3 => {
                let p = self.mp()?;
                let psi = need(self.aux.psi, "psi")?;
                MpParams::new(p.lambda, psi)?;
                if self.id == MpT3 {
                    need(self.aux.gamma, "gamma")?;
                }
                if self.id != MpT2 && !mp_cond(p.phi, psi, rho) {
                    return domain("rho violates |rho|(sin phi + |sin(psi-phi)|) < sin psi");
                }
            }
        }
        if !self.id.entire() && !matches!(self.id, MpT1 | MpT1e | MpT3) && rho.norm() >= DISK_LIMIT {
            return domain(format!("|rho| = {} outside the sampled disk {DISK_LIMIT}", rho.norm()));
        }
        if self.id == MpT3 && rho.norm() >= DISK_LIMIT {
            return domain(format!("|rho| = {} outside the sampled disk {DISK_LIMIT}", rho.norm()));
        }
        Ok(())
    }
}

/// Closed-form left side.
pub fn lhs(input: &IdentityInput) -> Result<C64> {
    input.check_domain()?;
    let (x, rho) = (input.x, input.rho);
    let t = LHS_TOL;
    match input.id {
        WGf1 | WT1 => {
            let p = input.wilson()?;
            Ok(hyp(&[p.a + ix(x), p.c + ix(x)], &[p.a + p.c], rho, t)?
                * hyp(&[p.b - ix(x), p.d - ix(x)], &[p.b + p.d], rho, t)?)
        }
        WGf2 | WT2 => {
            let p = input.wilson()?;
            let s = p.a + p.b + p.c + p.d;
            let z = -4.0 * rho / ((1.0 - rho) * (1.0 - rho));
            Ok(cpow(1.0 - rho, 1.0 - s)
                * hyp(&[(s - 1.0) / 2.0, s / 2.0, p.a + ix(x), p.a - ix(x)], &[p.a + p.b, p.a + p.c, p.a + p.d], z, t)?)
        }
        CdhGf1 | CdhT1 => {
            let p = input.cdh()?;
            Ok(cpow(1.0 - rho, -p.c + ix(x)) * hyp(&[p.a + ix(x), p.b + ix(x)], &[p.a + p.b], rho, t)?)
        }
        CdhL6 => {
            let p = input.cdh()?;
            let (d, f) = (need(input.aux.d, "d")?, need(input.aux.f, "f")?);
            Ok(cpow(1.0 - rho, d - p.c) * hyp(&[p.b - f, d], &[p.b], rho, t)?)
        }
        CdhT2 => {
            let p = input.cdh()?;
            Ok(rho.exp() * hyp(&[p.a + ix(x), p.a - ix(x)], &[p.a + p.b, p.a + p.c], -rho, t)?)
        }
        CdhT3 => {
            let p = input.cdh()?;
            let g = need(input.aux.gamma, "gamma")?;
            Ok(cpow(1.0 - rho, -g)
                * hyp(&[g, p.a + ix(x), p.a - ix(x)], &[p.a + p.b, p.a + p.c], rho / (rho - 1.0), t)?)
        }
        ChT1 => {
            let p = input.chahn()?;
            let (ra, rb) = (p.a.re, p.b.re);
            Ok(hyp(&[p.a + ix(x)], &[c(2.0 * ra)], -C64::i() * rho, t)?
                * hyp(&[p.b.conj() - ix(x)], &[c(2.0 * rb)], C64::i() * rho, t)?)
        }
        ChT2 => {
            let p = input.chahn()?;
            let (ra, rb) = (p.a.re, p.b.re);
            let z = -4.0 * rho / ((1.0 - rho) * (1.0 - rho));
            Ok(cpow(1.0 - rho, c(1.0 - 2.0 * ra - 2.0 * rb))
                * hyp(&[c(ra + rb - 0.5), c(ra + rb), p.a + ix(x)], &[c(2.0 * ra), p.a + p.b.conj()], z, t)?)
        }
        MpT1 | MpT1e => {
            let p = input.mp()?;
            Ok(mp_gf1(p.lambda, p.phi, x, rho))
        }
        MpT2 => {
            let p = input.mp()?;
            let z = (C64::from_polar(1.0, -2.0 * p.phi) - 1.0) * rho;
            Ok(rho.exp() * hyp(&[C64::new(p.lambda, x)], &[c(2.0 * p.lambda)], z, t)?)
        }
        MpT3 => {
            let p = input.mp()?;
            let g = need(input.aux.gamma, "gamma")?;
            let z = (1.0 - C64::from_polar(1.0, -2.0 * p.phi)) * rho / (rho - 1.0);
            Ok(cpow(1.0 - rho, -g) * hyp(&[g, C64::new(p.lambda, x)], &[c(2.0 * p.lambda)], z, t)?)
        }
    }
}

/// (1 − e^{iφ}ρ)^{−λ+ix} (1 − e^{−iφ}ρ)^{−λ−ix}.
fn mp_gf1(lambda: f64, phi: f64, x: f64, rho: C64) -> C64 {
    cpow(1.0 - C64::from_polar(1.0, phi) * rho, C64::new(-lambda, x))
        * cpow(1.0 - C64::from_polar(1.0, -phi) * rho, C64::new(-lambda, -x))
}

struct MpShift {
    /// ρ sin(ψ−φ)/sin ψ
    q: C64,
    /// ρ̃ = ρ sin φ/(sin ψ − ρ sin(ψ−φ))
    rho_t: C64,
}

fn mp_shift(phi: f64, psi: f64, rho: C64) -> MpShift {
    MpShift {
        q: rho * (psi - phi).sin() / psi.sin(),
        rho_t: rho * phi.sin() / (psi.sin() - rho * (psi - phi).sin()),
    }
}

/// The right side of mp-t1 in closed form.
pub fn mp_t1_closed(input: &IdentityInput) -> Result<C64> {
    let p = input.mp()?;
    let psi = need(input.aux.psi, "psi")?;
    let sh = mp_shift(p.phi, psi, input.rho);
    Ok(cpow(1.0 - sh.q, c(-2.0 * p.lambda)) * mp_gf1(p.lambda, psi, input.x, sh.rho_t))
}

/// k-th term of the right side (global prefactors included).
pub fn rhs_term(input: &IdentityInput, k: usize, tol: f64) -> Result<C64> {
    let (x, rho) = (input.x, input.rho);
    let kf = k as f64;
    let lf = ln_factorial(k);
    let lr = ln_pow(rho, k);
    let t = tol / 10.0;
    match input.id {
        WGf1 => {
            let p = input.wilson()?;
            let poly = wilson_scaled(k, x, &WilsonParams { a: p.a, b: p.b, c: p.c, d: p.d })?;
            Ok(assemble(lr - ln_pochhammer(p.a + p.c, k) - ln_pochhammer(p.b + p.d, k) - lf, poly, c(1.0)))
        }
        WGf2 => {
            let p = input.wilson()?;
            let s = p.a + p.b + p.c + p.d;
            let poly = wilson_scaled(k, x, &WilsonParams { a: p.a, b: p.b, c: p.c, d: p.d })?;
            let ln = lr + ln_pochhammer(s - 1.0, k)
                - ln_pochhammer(p.a + p.b, k)
                - ln_pochhammer(p.a + p.c, k)
                - ln_pochhammer(p.a + p.d, k)
                - lf;
            Ok(assemble(ln, poly, c(1.0)))
        }
        WT1 => {
            let p = input.wilson()?;
            let h = need(input.aux.h, "h")?;
            let s = p.a + p.b + p.c + p.d;
            let poly = wilson_scaled(k, x, &WilsonParams { a: p.a, b: p.b, c: p.c, d: h })?;
            let ln = lr + ln_pochhammer(kf + s - 1.0, k)
                - ln_pochhammer(kf + p.a + p.b + p.c + h - 1.0, k)
                - ln_pochhammer(p.a + p.c, k)
                - ln_pochhammer(p.b + p.d, k)
                - lf;
            let inner = hyp(
                &[p.d - h, 2.0 * kf + s - 1.0, kf + p.a + p.b, kf + p.b + p.c],
                &[kf + s - 1.0, 2.0 * kf + p.a + p.b + p.c + h, kf + p.b + p.d],
                rho,
                t,
            )?;
            Ok(assemble(ln, poly, inner))
        }
        WT2 => {
            let p = input.wilson()?;
            let h = need(input.aux.h, "h")?;
            let s = p.a + p.b + p.c + p.d;
            let poly = wilson_scaled(k, x, &WilsonParams { a: p.a, b: p.b, c: p.c, d: h })?;
            let ln = lr + ln_pochhammer(kf + s - 1.0, k) + ln_pochhammer(s - 1.0, k)
                - ln_pochhammer(kf + p.a + p.b + p.c + h - 1.0, k)
                - ln_pochhammer(p.a + p.b, k)
                - ln_pochhammer(p.a + p.c, k)
                - ln_pochhammer(p.a + p.d, k)
                - lf;
            let inner = hyp(
                &[2.0 * kf + s - 1.0, p.d - h, kf + p.b + p.c],
                &[2.0 * kf + p.a + p.b + p.c + h, p.a + p.d + kf],
                rho,
                t,
            )?;
            Ok(assemble(ln, poly, inner))
        }
        CdhGf1 => {
            let p = input.cdh()?;
            Ok(assemble(lr - ln_pochhammer(p.a + p.b, k) - lf, cdh_scaled(k, x, &p), c(1.0)))
        }
        CdhL6 => {
            let p = input.cdh()?;
            let (d, f) = (need(input.aux.d, "d")?, need(input.aux.f, "f")?);
            let inner = hyp(&[c(-kf), d, f], &[p.b, p.c], c(1.0), t)?;
            let one = Scaled { mantissa: c(1.0), ln_scale: 0.0 };
            Ok(assemble(lr + ln_pochhammer(p.c, k) - lf, one, inner))
        }
        CdhT1 => {
            let p = input.cdh()?;
            let f = need(input.aux.f, "f")?;
            let poly = cdh_scaled(k, x, &CdhParams { a: p.a, b: p.c, c: f });
            let inner = hyp(&[p.b - f, kf + p.a + p.c], &[kf + p.a + p.b], rho, t)?;
            Ok(assemble(lr - ln_pochhammer(p.a + p.b, k) - lf, poly, inner))
        }
        CdhT2 => {
            let p = input.cdh()?;
            let d = need(input.aux.d, "d")?;
            let poly = cdh_scaled(k, x, &CdhParams { a: p.a, b: p.b, c: d });
            let inner = hyp(&[p.c - d], &[kf + p.a + p.c], rho, t)?;
            let ln = lr - ln_pochhammer(p.a + p.b, k) - ln_pochhammer(p.a + p.c, k) - lf;
            Ok(assemble(ln, poly, inner))
        }
        CdhT3 => {
            let p = input.cdh()?;
            let d = need(input.aux.d, "d")?;
            let g = need(input.aux.gamma, "gamma")?;
            let poly = cdh_scaled(k, x, &CdhParams { a: p.a, b: p.b, c: d });
            let inner = hyp(&[p.c - d, g + kf], &[kf + p.a + p.c], rho, t)?;
            let ln = lr + ln_pochhammer(g, k) - ln_pochhammer(p.a + p.b, k) - ln_pochhammer(p.a + p.c, k) - lf;
            Ok(assemble(ln, poly, inner))
        }
        ChT1 => {
            let p = input.chahn()?;
            let cc = need(input.aux.c, "c")?;
            let (ra, rb, rc) = (p.a.re, p.b.re, cc.re);
            let poly = chahn_scaled(k, x, &ChahnParams { a: p.a, b: cc });
            let ab = ra + rb;
            let inner = hyp(
                &[c((ab + kf) / 2.0), c((ab + kf + 1.0) / 2.0), c(ab + kf - 0.5), c(rb - rc)],
                &[
                    c(ab + (kf - 1.0) / 2.0),
                    c(ab + kf / 2.0),
                    c(rb + kf / 2.0),
                    c(rb + (kf + 1.0) / 2.0),
                    c(ra + rc + kf + 0.5),
                ],
                -rho * rho / 4.0,
                t,
            )?;
            let ln = lr + ln_pochhammer(c(kf + 2.0 * ab - 1.0), k)
                - ln_pochhammer(c(2.0 * ra), k)
                - ln_pochhammer(c(2.0 * rb), k)
                - ln_pochhammer(c(kf + 2.0 * ra + 2.0 * rc - 1.0), k);
            Ok(assemble(ln, poly, inner))
        }
        ChT2 => {
            let p = input.chahn()?;
            let cc = need(input.aux.c, "c")?;
            let (ra, rb, rc) = (p.a.re, p.b.re, cc.re);
            let poly = chahn_scaled(k, x, &ChahnParams { a: p.a, b: cc });
            let inner = hyp(&[c(ra + rb + kf - 0.5), c(rb - rc)], &[c(ra + rc + kf + 0.5)], rho * rho, t)?;
            let ln = ln_pow(-C64::i() * rho, k) + ln_pochhammer(c(2.0 * ra + 2.0 * rb - 1.0), 2 * k)
                - ln_pochhammer(c(2.0 * ra), k)
                - ln_pochhammer(c(ra + rb), k)
                - ln_pochhammer(c(2.0 * ra + 2.0 * rc + kf - 1.0), k);
            Ok(assemble(ln, poly, inner))
        }
        MpT1 | MpT1e => {
            let p = input.mp()?;
            let psi = need(input.aux.psi, "psi")?;
            let sh = mp_shift(p.phi, psi, rho);
            let poly = mp_scaled(k, x, &MpParams { lambda: p.lambda, phi: psi });
            let ln = -2.0 * p.lambda * (1.0 - sh.q).ln() + ln_pow(sh.rho_t, k);
            Ok(assemble(ln, poly, c(1.0)))
        }
        MpT2 => {
            let p = input.mp()?;
            let psi = need(input.aux.psi, "psi")?;
            let sh = mp_shift(p.phi, psi, rho);
            let poly = mp_scaled(k, x, &MpParams { lambda: p.lambda, phi: psi });
            let ln = sh.q * C64::from_polar(1.0, -p.phi) + kf * (p.phi.sin() / psi.sin()).ln()
                - ln_pochhammer(c(2.0 * p.lambda), k)
                - ix(kf * p.phi)
                + lr;
            Ok(assemble(ln, poly, c(1.0)))
        }
        MpT3 => {
            let p = input.mp()?;
            let psi = need(input.aux.psi, "psi")?;
            let g = need(input.aux.gamma, "gamma")?;
            let sh = mp_shift(p.phi, psi, rho);
            let z = 1.0 - sh.q * C64::from_polar(1.0, -p.phi);
            let poly = mp_scaled(k, x, &MpParams { lambda: p.lambda, phi: psi });
            let ln = -(g + kf) * z.ln() + kf * (p.phi.sin() / psi.sin()).ln() + ln_pochhammer(g, k)
                - ln_pochhammer(c(2.0 * p.lambda), k)
                - ix(kf * p.phi)
                + lr;
            Ok(assemble(ln, poly, c(1.0)))
        }
    }
}

/// The input with its free parameter set back to the source parameter.
pub fn degenerate(input: &IdentityInput) -> Result<IdentityInput> {
    let mut out = *input;
    match input.id {
        WT1 | WT2 => out.aux.h = Some(input.wilson()?.d),
        CdhT1 => out.aux.f = Some(input.cdh()?.b),
        CdhT2 | CdhT3 => out.aux.d = Some(input.cdh()?.c),
        ChT1 | ChT2 => out.aux.c = Some(input.chahn()?.b),
        MpT1 | MpT2 | MpT3 => out.aux.psi = Some(input.mp()?.phi),
        _ => return domain(format!("{} has no free parameter", input.id)),
    }
    Ok(out)
}

/// k-th term of the base generating function that a generalized member
/// re-expands.
pub fn base_term(input: &IdentityInput, k: usize) -> Result<C64> {
    let (x, rho) = (input.x, input.rho);
    let lf = ln_factorial(k);
    let lr = ln_pow(rho, k);
    match input.id {
        WT1 => rhs_term(&IdentityInput { id: WGf1, ..*input }, k, 1e-15),
        WT2 => rhs_term(&IdentityInput { id: WGf2, ..*input }, k, 1e-15),
        CdhT1 => rhs_term(&IdentityInput { id: CdhGf1, ..*input }, k, 1e-15),
        CdhT2 | CdhT3 => {
            let p = input.cdh()?;
            let mut ln = lr - ln_pochhammer(p.a + p.b, k) - ln_pochhammer(p.a + p.c, k) - lf;
            if input.id == CdhT3 {
                ln += ln_pochhammer(need(input.aux.gamma, "gamma")?, k);
            }
            Ok(assemble(ln, cdh_scaled(k, x, &p), c(1.0)))
        }
        ChT1 => {
            let p = input.chahn()?;
            let ln = lr - ln_pochhammer(c(2.0 * p.a.re), k) - ln_pochhammer(c(2.0 * p.b.re), k);
            Ok(assemble(ln, chahn_scaled(k, x, &p), c(1.0)))
        }
        ChT2 => {
            let p = input.chahn()?;
            let (ra, rb) = (p.a.re, p.b.re);
            let ln = lr + ln_pochhammer(c(2.0 * ra + 2.0 * rb - 1.0), k)
                - ln_pochhammer(c(2.0 * ra), k)
                - ln_pochhammer(p.a + p.b.conj(), k)
                - ix(k as f64 * PI / 2.0);
            Ok(assemble(ln, chahn_scaled(k, x, &p), c(1.0)))
        }
        MpT1 | MpT2 | MpT3 => {
            let p = input.mp()?;
            let mut ln = lr;
            if input.id != MpT1 {
                ln += -ln_pochhammer(c(2.0 * p.lambda), k) - ix(k as f64 * p.phi);
            }
            if input.id == MpT3 {
                ln += ln_pochhammer(need(input.aux.gamma, "gamma")?, k);
            }
            Ok(assemble(ln, mp_scaled(k, x, &p), c(1.0)))
        }
        _ => domain(format!("{} is not a generalized identity", input.id)),
    }
}

/// Tail estimate after the last cached term: the last two terms decay at
/// a geometric rate taken from the two before them.
fn tail_estimate(terms: &[C64]) -> f64 {
    let n = terms.len();
    if n < 4 {
        return terms.last().map_or(f64::INFINITY, |t| t.norm());
    }
    let m = terms[n - 1].norm().max(terms[n - 2].norm());
    let m2 = terms[n - 3].norm().max(terms[n - 4].norm());
    if m == 0.0 {
        return 0.0;
    }
    if m2 == 0.0 {
        return f64::INFINITY;
    }
    let r = (m / m2).sqrt();
    if r >= 1.0 {
        f64::INFINITY
    } else {
        m * r / (1.0 - r)
    }
}

fn extend_terms(input: &IdentityInput, terms: &mut Vec<C64>, upto: usize, tol: f64) -> Result<()> {
    for k in terms.len()..=upto {
        terms.push(rhs_term(input, k, tol)?);
    }
    Ok(())
}

fn summarize(terms: &[C64], tol: f64) -> SeriesValue {
    let value: C64 = terms.iter().sum();
    let tail = tail_estimate(terms);
    SeriesValue { value, abs_err_est: tail, terms_used: terms.len(), converged: tail <= tol * value.norm().max(1.0) }
}

/// Σ_{k=0}^{K} of the right side. mp-t1e returns its closed form.
pub fn rhs_truncated(input: &IdentityInput, k_max: usize, tol: f64) -> Result<SeriesValue> {
    input.check_domain()?;
    if k_max > K_CAP {
        return domain(format!("K = {k_max} exceeds the cap {K_CAP}"));
    }
    if input.id == MpT1e {
        return Ok(SeriesValue::exact(mp_t1_closed(input)?));
    }
    let mut terms = Vec::with_capacity(k_max + 1);
    extend_terms(input, &mut terms, k_max, tol)?;
    Ok(summarize(&terms, tol))
}

/// Right side with K doubling from [`K_START`] until the tail estimate is
/// below tol/10 or K reaches [`K_CAP`].
pub fn rhs_adaptive(input: &IdentityInput, tol: f64) -> Result<SeriesValue> {
    input.check_domain()?;
    if input.id == MpT1e {
        return Ok(SeriesValue::exact(mp_t1_closed(input)?));
    }
    if input.rho == c(0.0) {
        return Ok(SeriesValue { value: rhs_term(input, 0, tol)?, abs_err_est: 0.0, terms_used: 1, converged: true });
    }
    let mut terms = Vec::new();
    let mut k = K_START;
    loop {
        extend_terms(input, &mut terms, k, tol)?;
        let s = summarize(&terms, tol);
        if s.abs_err_est <= tol / 10.0 * s.value.norm().max(1.0) || k >= K_CAP {
            return Ok(s);
        }
        k = (2 * k).min(K_CAP);
    }
}

pub fn inputs_of(input: &IdentityInput) -> RecordInputs {
    RecordInputs {
        params: Some(input.params),
        aux: Some(input.aux),
        x: Some(input.x),
        rho: Some(input.rho),
        ..Default::default()
    }
}

/// Evaluates both sides and records the comparison. Domain violations are
/// skips; any other error is a recorded failure.
pub fn verify(input: &IdentityInput, tol: f64, trial: usize) -> VerificationRecord {
    let start = Instant::now();
    let rec = VerificationRecord::new(RecordKind::Identity, input.id.tag(), trial, inputs_of(input), tol);
    let mut rec = match input.check_domain() {
        Err(e) => rec.skip(e.to_string()),
        Ok(()) => match (lhs(input), rhs_adaptive(input, tol)) {
            (Ok(l), Ok(r)) => {
                let mut rec = rec.compare(l, r.value);
                rec.terms_used = Some(r.terms_used);
                if rec.outcome == Outcome::Fail && !r.converged {
                    rec.reason = Some(format!("right side not converged at K = {}", r.terms_used - 1));
                }
                rec
            }
            (Err(Error::Domain(m)), _) | (_, Err(Error::Domain(m))) => rec.skip(m),
            (Err(e), _) | (_, Err(e)) => rec.fail(e.to_string()),
        },
    };
    rec.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    rec
}

/// d/dρ at 0 of `f` by central differences with two Richardson steps.
pub fn derivative_at_zero(f: impl Fn(C64) -> Result<C64>, h: f64) -> Result<C64> {
    let d = |s: f64| -> Result<C64> { Ok((f(c(s))? - f(c(-s))?) / (2.0 * s)) };
    let (d1, d2, d3) = (d(h)?, d(h / 2.0)?, d(h / 4.0)?);
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d3 - d2) / 3.0;
    Ok((16.0 * r2 - r1) / 15.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn sample_inputs(rho: C64) -> Vec<IdentityInput> {
        let w = FamilyParams::Wilson(WilsonParams::new(cx(0.6, 0.0), cx(1.1, 0.7), cx(1.1, -0.7), cx(1.9, 0.0)).unwrap());
        let s = FamilyParams::Cdh(CdhParams::new(cx(0.7, 0.0), cx(1.3, 0.0), cx(0.5, 0.0)).unwrap());
        let ch = FamilyParams::Chahn(ChahnParams::new(cx(0.8, 0.3), cx(1.4, 0.3)).unwrap());
        let m = FamilyParams::Mp(MpParams::new(0.9, 1.3).unwrap());
        let h = Aux { h: Some(cx(0.8, 0.0)), ..Default::default() };
        let mk = |id, params, aux, x| IdentityInput { id, params, aux, x, rho };
        vec![
            mk(WGf1, w, Aux::default(), 1.3),
            mk(WGf2, w, Aux::default(), 1.3),
            mk(WT1, w, h, 1.3),
            mk(WT2, w, h, 1.3),
            mk(CdhGf1, s, Aux::default(), 0.9),
            mk(CdhL6, s, Aux { d: Some(cx(0.4, 0.3)), f: Some(cx(1.2, -0.5)), ..Default::default() }, 0.0),
            mk(CdhT1, s, Aux { f: Some(cx(1.7, 0.0)), ..Default::default() }, 0.9),
            mk(CdhT2, s, Aux { d: Some(cx(2.2, 0.0)), ..Default::default() }, 0.9),
            mk(CdhT3, s, Aux { d: Some(cx(2.2, 0.0)), gamma: Some(cx(0.7, 0.2)), ..Default::default() }, 0.9),
            mk(ChT1, ch, Aux { c: Some(cx(0.6, 0.3)), ..Default::default() }, -0.8),
            mk(ChT2, ch, Aux { c: Some(cx(0.6, 0.3)), ..Default::default() }, -0.8),
            mk(MpT1, m, Aux { psi: Some(1.9), ..Default::default() }, 0.7),
            mk(MpT1e, m, Aux { psi: Some(1.9), ..Default::default() }, 0.7),
            mk(MpT2, m, Aux { psi: Some(1.9), ..Default::default() }, 0.7),
            mk(MpT3, m, Aux { psi: Some(1.9), gamma: Some(cx(1.3, -0.4)), ..Default::default() }, 0.7),
        ]
    }

    #[test]
    fn catalog() {
        assert_eq!(IdentityId::ALL.len(), 15);
        for id in IdentityId::ALL {
            assert_eq!(id.tag().parse::<IdentityId>().unwrap(), id);
            assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{}\"", id.tag()));
        }
        assert!("w-t9".parse::<IdentityId>().is_err());
    }

    #[test]
    fn whole_catalog_at_fixed_points() {
        for rho in [cx(0.3, 0.1), cx(-0.25, -0.2), cx(0.0, 0.0)] {
            for inp in sample_inputs(rho) {
                let rec = verify(&inp, 1e-8, 0);
                assert_eq!(rec.outcome, Outcome::Pass, "{} at {rho}: {rec:?}", inp.id);
                if rho == cx(0.0, 0.0) {
                    assert_eq!(rec.rel_err, Some(0.0), "{}", inp.id);
                }
            }
        }
    }

    #[test]
    fn lhs_examples() {
        let p = FamilyParams::Wilson(WilsonParams::real(1.0, 1.0, 1.0, 1.0).unwrap());
        let inp = IdentityInput { id: WGf1, params: p, aux: Aux::default(), x: 0.0, rho: cx(0.3, 0.0) };
        let want = (-(0.7f64).ln() / 0.3).powi(2);
        let got = lhs(&inp).unwrap();
        assert!((got - want).norm() < 1e-14, "{got} vs {want}");
        let m = FamilyParams::Mp(MpParams::new(1.0, 1.2).unwrap());
        let rho = cx(0.35, 0.0);
        let inp = IdentityInput { id: MpT1, params: m, aux: Aux { psi: Some(1.2), ..Default::default() }, x: 0.0, rho };
        let want = (1.0 - C64::from_polar(1.0, 1.2) * rho).norm_sqr().recip();
        assert!((lhs(&inp).unwrap() - want).norm() < 1e-14);
    }

    #[test]
    fn entire_member_at_large_rho() {
        let s = FamilyParams::Cdh(CdhParams::real(0.7, 1.3, 0.5).unwrap());
        let inp = IdentityInput { id: CdhT2, params: s, aux: Aux { d: Some(cx(2.2, 0.0)), ..Default::default() }, x: 0.9, rho: cx(3.0, 0.0) };
        let rec = verify(&inp, 1e-7, 0);
        assert_eq!(rec.outcome, Outcome::Pass, "{rec:?}");
    }

    #[test]
    fn degenerations() {
        for inp in sample_inputs(cx(0.3, 0.2)) {
            if !inp.id.has_base() {
                continue;
            }
            let deg = degenerate(&inp).unwrap();
            for k in 0..=20 {
                let (t, b) = (rhs_term(&deg, k, 1e-12).unwrap(), base_term(&deg, k).unwrap());
                assert!((t - b).norm() <= 1e-12 * b.norm() + 1e-300, "{} k={k}: {t} vs {b}", inp.id);
            }
        }
    }

    #[test]
    fn out_of_domain_is_skipped() {
        let mut inp = sample_inputs(cx(0.97, 0.0))[2];
        assert_eq!(verify(&inp, 1e-8, 0).outcome, Outcome::Skip);
        inp.aux.h = Some(cx(0.8, 0.3));
        inp.rho = cx(0.1, 0.0);
        assert_eq!(verify(&inp, 1e-8, 0).outcome, Outcome::Skip);
    }

    #[test]
    fn first_coefficient_by_differences() {
        for inp in sample_inputs(cx(0.0, 0.0)) {
            let f_l = |r: C64| lhs(&IdentityInput { rho: r, ..inp });
            let f_r = |r: C64| Ok(rhs_truncated(&IdentityInput { rho: r, ..inp }, 1, 1e-14)?.value);
            let (dl, dr) = (derivative_at_zero(f_l, 1e-3).unwrap(), derivative_at_zero(f_r, 1e-3).unwrap());
            assert!((dl - dr).norm() <= 1e-6 * dr.norm().max(1e-3), "{}: {dl} vs {dr}", inp.id);
        }
    }
}
