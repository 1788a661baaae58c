//! Connection coefficients a_{n,k} between members of one family with
//! different parameters.

use serde::{Deserialize, Serialize};

use crate::arith::{binomial, factorial, pochhammer, POLE_EPS};
use crate::error::{domain, Error, Result};
use crate::families::{self, CdhParams, ChahnParams, FamilyParams, MpParams, WilsonParams};
use crate::hypergeom::{chu_vandermonde, nonpositive_integer, pfq, whipple_sum, PfqSpec};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionCoeff {
    pub n: usize,
    pub k: usize,
    pub value: C64,
}

fn coeff(n: usize, k: usize, value: C64) -> Result<ConnectionCoeff> {
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::Pole(format!("connection coefficient a[{n},{k}] is not finite")));
    }
    Ok(ConnectionCoeff { n, k, value })
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k > n {
        return domain(format!("k = {k} exceeds n = {n}"));
    }
    Ok(())
}

/// (z)_m for a denominator; PoleError when a factor z+j vanishes.
fn den_poch(z: C64, m: usize, what: &str) -> Result<C64> {
    if (0..m).any(|j| (z + j as f64).norm() < POLE_EPS) {
        return Err(Error::Pole(format!("{what} = ({z})_{m} vanishes")));
    }
    Ok(pochhammer(z, m))
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Terminating series at unit argument. Equal numerator/denominator pairs are
/// cancelled first; a leftover 2F1 is summed by Chu–Vandermonde.
fn terminating(num: &[C64], den: &[C64]) -> Result<C64> {
    let mut num = num.to_vec();
    let mut den = den.to_vec();
    let mut i = 0;
    while i < num.len() {
        // keep the terminating parameter
        let pos = if i == 0 { None } else { den.iter().position(|&d| (num[i] - d).norm() <= 1e-14 * (1.0 + d.norm())) };
        match pos {
            Some(j) => {
                num.remove(i);
                den.remove(j);
            }
            None => i += 1,
        }
    }
    if num.len() == 2 && den.len() == 1 {
        if let Some(m) = nonpositive_integer(num[0]) {
            // (c−b)_m is an exact zero when c−b rounds to −j, j < m
            if nonpositive_integer(den[0] - num[1]).map_or(false, |j| j < m) {
                return Ok(c(0.0));
            }
            return chu_vandermonde(m, num[1], den[0]);
        }
    }
    Ok(pfq(&PfqSpec::new(&num, &den, c(1.0)), 1.0)?.value)
}

/// Wilson coefficients with one free parameter h replacing d.
pub fn wilson_connect_1p(n: usize, k: usize, p: &WilsonParams, h: C64) -> Result<ConnectionCoeff> {
    check_k(n, k)?;
    WilsonParams::new(p.a, p.b, p.c, h)?;
    let (a, b, cc, d) = (p.a, p.b, p.c, p.d);
    let m = n - k;
    let kf = k as f64;
    let num = pochhammer(n as f64 + p.sum() - 1.0, k)
        * pochhammer(d - h, m)
        * pochhammer(kf + a + b, m)
        * pochhammer(kf + a + cc, m)
        * pochhammer(kf + b + cc, m);
    let den = den_poch(kf + a + b + cc + h - 1.0, k, "(k+a+b+c+h-1)_k")?
        * den_poch(2.0 * kf + a + b + cc + h, m, "(2k+a+b+c+h)_{n-k}")?;
    coeff(n, k, binomial(n, k)? * num / den)
}

/// Wilson coefficients with three free parameters: target (a, f, g, h).
pub fn wilson_connect_3p(n: usize, k: usize, p: &WilsonParams, f: C64, g: C64, h: C64) -> Result<ConnectionCoeff> {
    check_k(n, k)?;
    WilsonParams::new(p.a, f, g, h)?;
    let (a, b, cc, d) = (p.a, p.b, p.c, p.d);
    let (m, kf, nf) = (n - k, k as f64, n as f64);
    let s = p.sum();
    let pre = pochhammer(nf + s - 1.0, k) * pochhammer(kf + a + b, m) * pochhammer(kf + a + cc, m) * pochhammer(kf + a + d, m)
        / den_poch(kf + a + f + g + h - 1.0, k, "(k+a+f+g+h-1)_k")?;
    let f54 = terminating(
        &[c(kf - nf), kf + nf + s - 1.0, kf + a + f, kf + a + g, kf + a + h],
        &[2.0 * kf + a + f + g + h, kf + a + b, kf + a + cc, kf + a + d],
    )?;
    coeff(n, k, binomial(n, k)? * pre * f54)
}

/// Continuous dual Hahn coefficients with two free parameters: target (a, f, g).
pub fn cdh_connect_2p(n: usize, k: usize, p: &CdhParams, f: C64, g: C64) -> Result<ConnectionCoeff> {
    check_k(n, k)?;
    CdhParams::new(p.a, f, g)?;
    let (a, b, cc) = (p.a, p.b, p.c);
    let (m, kf, nf) = (n - k, k as f64, n as f64);
    let f32 = terminating(&[c(kf - nf), kf + a + f, kf + a + g], &[kf + a + b, kf + a + cc])?;
    coeff(n, k, binomial(n, k)? * pochhammer(kf + a + b, m) * pochhammer(kf + a + cc, m) * f32)
}

/// Continuous dual Hahn coefficients with one free parameter d replacing c.
pub fn cdh_connect_1p(n: usize, k: usize, p: &CdhParams, d: C64) -> Result<ConnectionCoeff> {
    check_k(n, k)?;
    let m = n - k;
    coeff(n, k, binomial(n, k)? * pochhammer(k as f64 + p.a + p.b, m) * pochhammer(p.c - d, m))
}

fn same_imaginary(p: &ChahnParams, cp: C64) -> Result<()> {
    let im = p.a.im;
    if (p.b.im - im).abs() > 1e-12 || (cp.im - im).abs() > 1e-12 {
        return domain("continuous Hahn connection needs Im a = Im b = Im c");
    }
    Ok(())
}

/// Continuous Hahn coefficients with one free parameter c replacing b,
/// in the closed form that Whipple's sum produces.
pub fn chahn_connect(n: usize, k: usize, p: &ChahnParams, cp: C64) -> Result<ConnectionCoeff> {
    check_k(n, k)?;
    same_imaginary(p, cp)?;
    ChahnParams::new(p.a, cp)?;
    if (n - k) % 2 == 1 {
        return coeff(n, k, c(0.0));
    }
    // Equal imaginary parts: every argument below is real.
    let (ra, rb, rc) = (p.a.re, p.b.re, cp.re);
    let q = (n - k) / 2;
    let (m, kf, nf) = (n - k, k as f64, n as f64);
    let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
    let num = pochhammer(c(nf + 2.0 * ra + 2.0 * rb - 1.0), k)
        * pochhammer(c(kf + 2.0 * ra), m)
        * pochhammer(c(kf + ra + rb), m)
        * pochhammer(c(rb - rc), q);
    let den = 4f64.powi(q as i32)
        * factorial(q)
        * den_poch(c(kf + 2.0 * ra + 2.0 * rc - 1.0), k, "(k+2A+2C-1)_k")?
        * den_poch(c(kf + ra + rc + 0.5), q, "(k+a+conj(c)+1/2)_p")?
        * den_poch(c(ra + rb + kf), q, "(a+conj(b)+k)_p")?;
    coeff(n, k, sign * num / den)
}

/// How the 3F2 at unit argument inside the unreduced continuous Hahn
/// coefficient is summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chahn3F2 {
    /// Exact terminating sum; valid for any admissible a, b, c.
    Direct,
    /// Whipple's gamma quotient; needs Im a = Im b = Im c.
    Whipple,
}

/// Continuous Hahn coefficients before the Whipple reduction.
pub fn chahn_connect_unreduced(n: usize, k: usize, p: &ChahnParams, cp: C64, mode: Chahn3F2) -> Result<ConnectionCoeff> {
    check_k(n, k)?;
    ChahnParams::new(p.a, cp)?;
    let (a, b) = (p.a, p.b);
    let (ra, rb, rc) = (a.re, b.re, cp.re);
    let (m, kf, nf) = (n - k, k as f64, n as f64);
    let sigma = nf + 2.0 * ra + 2.0 * rb - 1.0;
    let pre = pochhammer(c(sigma), k) * pochhammer(c(kf + 2.0 * ra), m) * pochhammer(kf + a + b.conj(), m)
        * C64::i().powu(m as u32)
        / (factorial(m) * den_poch(c(kf + 2.0 * ra + 2.0 * rc - 1.0), k, "(k+2A+2C-1)_k")?);
    let f32 = match mode {
        Chahn3F2::Direct => terminating(
            &[c(kf - nf), c(kf + sigma), kf + a + cp.conj()],
            &[c(2.0 * kf + 2.0 * ra + 2.0 * rc), kf + a + b.conj()],
        )?,
        Chahn3F2::Whipple => {
            same_imaginary(p, cp)?;
            whipple_sum(c(kf - nf), c(kf + sigma), c(kf + ra + rc))?
        }
    };
    coeff(n, k, pre * f32)
}

/// Meixner–Pollaczek coefficients from angle φ to angle ψ.
pub fn mp_connect(n: usize, k: usize, p: &MpParams, psi: f64) -> Result<ConnectionCoeff> {
    check_k(n, k)?;
    MpParams::new(p.lambda, psi)?;
    let m = n - k;
    let v = pochhammer(c(2.0 * p.lambda + k as f64), m) / factorial(m)
        * p.phi.sin().powi(k as i32)
        * (psi - p.phi).sin().powi(m as i32)
        / psi.sin().powi(n as i32);
    coeff(n, k, v)
}

/// One of the six connection relations together with its free parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Connection {
    Wilson1p { h: C64 },
    Wilson3p { f: C64, g: C64, h: C64 },
    Cdh2p { f: C64, g: C64 },
    Cdh1p { d: C64 },
    Chahn { c: C64 },
    Mp { psi: f64 },
}

impl Connection {
    /// Parameters of the expansion basis for a given source record.
    pub fn target(&self, source: &FamilyParams) -> Result<FamilyParams> {
        Ok(match (*self, source) {
            (Connection::Wilson1p { h }, FamilyParams::Wilson(p)) => {
                FamilyParams::Wilson(WilsonParams::new(p.a, p.b, p.c, h)?)
            }
            (Connection::Wilson3p { f, g, h }, FamilyParams::Wilson(p)) => {
                FamilyParams::Wilson(WilsonParams::new(p.a, f, g, h)?)
            }
            (Connection::Cdh2p { f, g }, FamilyParams::Cdh(p)) => FamilyParams::Cdh(CdhParams::new(p.a, f, g)?),
            (Connection::Cdh1p { d }, FamilyParams::Cdh(p)) => FamilyParams::Cdh(CdhParams::new(p.a, p.b, d)?),
            (Connection::Chahn { c }, FamilyParams::Chahn(p)) => FamilyParams::Chahn(ChahnParams::new(p.a, c)?),
            (Connection::Mp { psi }, FamilyParams::Mp(p)) => FamilyParams::Mp(MpParams::new(p.lambda, psi)?),
            _ => return domain("connection does not match the source family"),
        })
    }

    pub fn coeff(&self, n: usize, k: usize, source: &FamilyParams) -> Result<ConnectionCoeff> {
        match (*self, source) {
            (Connection::Wilson1p { h }, FamilyParams::Wilson(p)) => wilson_connect_1p(n, k, p, h),
            (Connection::Wilson3p { f, g, h }, FamilyParams::Wilson(p)) => wilson_connect_3p(n, k, p, f, g, h),
            (Connection::Cdh2p { f, g }, FamilyParams::Cdh(p)) => cdh_connect_2p(n, k, p, f, g),
            (Connection::Cdh1p { d }, FamilyParams::Cdh(p)) => cdh_connect_1p(n, k, p, d),
            (Connection::Chahn { c }, FamilyParams::Chahn(p)) => chahn_connect(n, k, p, c),
            (Connection::Mp { psi }, FamilyParams::Mp(p)) => mp_connect(n, k, p, psi),
            _ => domain("connection does not match the source family"),
        }
    }
}

/// Source polynomial at x and its expansion Σ_k a_{n,k} P_k(target) at x.
pub fn expand(conn: &Connection, n: usize, source: &FamilyParams, x: f64) -> Result<(C64, C64)> {
    let target = conn.target(source)?;
    let lhs = families::eval(n, x, source)?;
    let mut rhs = C64::new(0.0, 0.0);
    for k in 0..=n {
        let a = conn.coeff(n, k, source)?.value;
        if a != C64::new(0.0, 0.0) {
            rhs += a * families::eval(k, x, &target)?;
        }
    }
    Ok((lhs, rhs))
}

/// Lower-triangular matrix of coefficients a_{n,k}, n, k ≤ n_max.
pub fn connection_matrix(conn: &Connection, n_max: usize, source: &FamilyParams) -> Result<Vec<Vec<C64>>> {
    (0..=n_max)
        .map(|n| {
            (0..=n_max)
                .map(|k| if k > n { Ok(C64::new(0.0, 0.0)) } else { Ok(conn.coeff(n, k, source)?.value) })
                .collect()
        })
        .collect()
}
