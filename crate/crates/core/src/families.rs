//! The four polynomial families: parameter records, definitional and
//! sum-representation evaluators, limit relations and growth fits.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::arith::{ln_factorial, ln_pochhammer, pochhammer};
use crate::error::{domain, Error, Result};
use crate::hypergeom::{pfq, PfqSpec};
use crate::C64;

/// Degree cap of the public evaluators.
pub const MAX_DEGREE: usize = 200;
/// Allowed imaginary residue of a real-valued polynomial, relative to 1+|value|.
pub const REALITY_TOL: f64 = 1e-9;
const PAIR_TOL: f64 = 1e-12;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn ix(x: f64) -> C64 {
    C64::new(0.0, x)
}

fn positive_real_parts(vals: &[C64]) -> Result<()> {
    match vals.iter().find(|v| !(v.re > 0.0) || !v.im.is_finite()) {
        Some(v) => domain(format!("parameter {v} must have positive real part")),
        None => Ok(()),
    }
}

/// Checks that the non-real members of `vals` can be matched into conjugate
/// pairs. Candidates are sorted by (Re, |Im|, Im) and matched greedily.
pub fn conjugate_closed(vals: &[C64]) -> Result<()> {
    let mut cplx: Vec<C64> = vals.iter().copied().filter(|v| v.im.abs() > PAIR_TOL).collect();
    cplx.sort_by(|p, q| {
        (p.re, p.im.abs(), p.im).partial_cmp(&(q.re, q.im.abs(), q.im)).expect("finite parameters")
    });
    let mut used = vec![false; cplx.len()];
    for i in 0..cplx.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let partner = (i + 1..cplx.len()).find(|&j| !used[j] && (cplx[i] - cplx[j].conj()).norm() <= PAIR_TOL);
        match partner {
            Some(j) => used[j] = true,
            None => return domain(format!("parameter {} has no conjugate partner", cplx[i])),
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilsonParams {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl WilsonParams {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let p = WilsonParams { a, b, c, d };
        positive_real_parts(&p.to_array())?;
        conjugate_closed(&p.to_array())?;
        Ok(p)
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0), C64::new(d, 0.0))
    }

    pub fn to_array(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn sum(&self) -> C64 {
        self.a + self.b + self.c + self.d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdhParams {
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

impl CdhParams {
    pub fn new(a: C64, b: C64, c: C64) -> Result<Self> {
        let p = CdhParams { a, b, c };
        let vals = p.to_array();
        positive_real_parts(&vals)?;
        if vals.iter().filter(|v| v.im.abs() > PAIR_TOL).count() > 2 {
            return domain("at most one conjugate pair allowed among a, b, c");
        }
        conjugate_closed(&vals)?;
        Ok(p)
    }

    pub fn real(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0))
    }

    pub fn to_array(&self) -> [C64; 3] {
        [self.a, self.b, self.c]
    }
}

/// Continuous Hahn parameters (a, b); the remaining two are ā, b̄.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChahnParams {
    pub a: C64,
    pub b: C64,
}

impl ChahnParams {
    pub fn new(a: C64, b: C64) -> Result<Self> {
        positive_real_parts(&[a, b])?;
        Ok(ChahnParams { a, b })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpParams {
    pub lambda: f64,
    pub phi: f64,
}

impl MpParams {
    pub fn new(lambda: f64, phi: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return domain(format!("lambda = {lambda} must be positive"));
        }
        if !(phi > 0.0 && phi < PI) {
            return domain(format!("phi = {phi} must lie in (0, pi)"));
        }
        Ok(MpParams { lambda, phi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Wilson,
    Cdh,
    Chahn,
    Mp,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Wilson, Family::Cdh, Family::Chahn, Family::Mp];

    pub fn name(self) -> &'static str {
        match self {
            Family::Wilson => "wilson",
            Family::Cdh => "cdh",
            Family::Chahn => "ch",
            Family::Mp => "mp",
        }
    }

    /// True for the families orthogonal on (0, ∞) in x.
    pub fn half_line(self) -> bool {
        matches!(self, Family::Wilson | Family::Cdh)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum FamilyParams {
    Wilson(WilsonParams),
    Cdh(CdhParams),
    Chahn(ChahnParams),
    Mp(MpParams),
}

impl FamilyParams {
    pub fn family(&self) -> Family {
        match self {
            FamilyParams::Wilson(_) => Family::Wilson,
            FamilyParams::Cdh(_) => Family::Cdh,
            FamilyParams::Chahn(_) => Family::Chahn,
            FamilyParams::Mp(_) => Family::Mp,
        }
    }
}

fn real_part(v: C64) -> Result<f64> {
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::Domain(format!("non-finite polynomial value {v}")));
    }
    if v.im.abs() > REALITY_TOL * (1.0 + v.re.abs()) {
        return Err(Error::Reality { value: v.re, residue: v.im });
    }
    Ok(v.re)
}

fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        return domain(format!("degree {n} exceeds the cap {MAX_DEGREE}"));
    }
    Ok(())
}

fn terminating(num: &[C64], den: &[C64], z: C64) -> C64 {
    pfq(&PfqSpec::new(num, den, z), 1.0).expect("terminating series with admissible denominators").value
}

/// W_n by its 4F3 definition, complex, without parameter checks.
pub(crate) fn wilson_def_raw(n: usize, x: f64, [a, b, cc, d]: [C64; 4]) -> C64 {
    let nf = n as f64;
    let s = a + b + cc + d;
    let pre = pochhammer(a + b, n) * pochhammer(a + cc, n) * pochhammer(a + d, n);
    pre * terminating(&[c(-nf), nf + s - 1.0, a + ix(x), a - ix(x)], &[a + b, a + cc, a + d], c(1.0))
}

/// S_n by its 3F2 definition, complex, without parameter checks.
pub(crate) fn cdh_def_raw(n: usize, x: f64, [a, b, cc]: [C64; 3]) -> C64 {
    let pre = pochhammer(a + b, n) * pochhammer(a + cc, n);
    pre * terminating(&[c(-(n as f64)), a + ix(x), a - ix(x)], &[a + b, a + cc], c(1.0))
}

pub(crate) fn chahn_def_raw(n: usize, x: f64, a: C64, b: C64) -> C64 {
    let nf = n as f64;
    let (ra, rb) = (a.re, b.re);
    let pre = C64::i().powu(n as u32) * pochhammer(c(2.0 * ra), n) * pochhammer(a + b.conj(), n)
        / crate::arith::factorial(n);
    pre * terminating(&[c(-nf), c(nf + 2.0 * ra + 2.0 * rb - 1.0), a + ix(x)], &[c(2.0 * ra), a + b.conj()], c(1.0))
}

pub(crate) fn mp_def_raw(n: usize, x: f64, lambda: f64, phi: f64) -> C64 {
    let pre = pochhammer(c(2.0 * lambda), n) / crate::arith::factorial(n) * C64::from_polar(1.0, n as f64 * phi);
    let z = 1.0 - C64::from_polar(1.0, -2.0 * phi);
    pre * terminating(&[c(-(n as f64)), C64::new(lambda, x)], &[c(2.0 * lambda)], z)
}

/// W_n(x²; a,b,c,d) from the terminating 4F3.
pub fn wilson(n: usize, x: f64, p: &WilsonParams) -> Result<f64> {
    check_degree(n)?;
    if !(x >= 0.0) {
        return domain("Wilson polynomials take x >= 0");
    }
    real_part(wilson_def_raw(n, x, p.to_array()))
}

/// W_n(x²; a,b,c,d) from the u_k product-sum representation (x > 0).
pub fn wilson_sumrep(n: usize, x: f64, p: &WilsonParams) -> Result<f64> {
    check_degree(n)?;
    if !(x > 0.0) {
        return domain("the Wilson sum representation needs x > 0");
    }
    real_part(wilson_scaled(n, x, p)?.value())
}

/// S_n(x²; a,b,c) from the terminating 3F2.
pub fn cdh(n: usize, x: f64, p: &CdhParams) -> Result<f64> {
    check_degree(n)?;
    if !(x >= 0.0) {
        return domain("continuous dual Hahn polynomials take x >= 0");
    }
    real_part(cdh_def_raw(n, x, p.to_array()))
}

/// S_n(x²; a,b,c) from the convolution sum.
pub fn cdh_sumrep(n: usize, x: f64, p: &CdhParams) -> Result<f64> {
    check_degree(n)?;
    real_part(cdh_scaled(n, x, p).value())
}

/// p_n(x; a, b, ā, b̄), complex valued.
pub fn chahn(n: usize, x: f64, p: &ChahnParams) -> Result<C64> {
    check_degree(n)?;
    Ok(chahn_def_raw(n, x, p.a, p.b))
}

/// p_n(x; a, b, ā, b̄) from the alternating convolution sum.
pub fn chahn_sumrep(n: usize, x: f64, p: &ChahnParams) -> Result<C64> {
    check_degree(n)?;
    Ok(chahn_scaled(n, x, p).value())
}

/// P_n^{(λ)}(x; φ) from the 2F1 definition.
pub fn mp(n: usize, x: f64, p: &MpParams) -> Result<f64> {
    check_degree(n)?;
    real_part(mp_def_raw(n, x, p.lambda, p.phi))
}

/// P_n^{(λ)}(x; φ) from the convolution sum.
pub fn mp_sumrep(n: usize, x: f64, p: &MpParams) -> Result<f64> {
    check_degree(n)?;
    real_part(mp_scaled(n, x, p).value())
}

/// A value carried as `mantissa · exp(ln_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: C64,
    pub ln_scale: f64,
}

impl Scaled {
    pub fn value(&self) -> C64 {
        if self.mantissa == C64::new(0.0, 0.0) {
            return self.mantissa;
        }
        self.mantissa * self.ln_scale.exp()
    }

    /// ln|value|; −∞ for an exact zero.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.ln_scale
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut lf = Vec::with_capacity(n + 1);
    lf.push(0.0);
    for i in 1..=n {
        lf.push(lf[i - 1] + (i as f64).ln());
    }
    lf
}

/// Sorts symmetric parameters so permuted records run identical arithmetic.
fn canonical<const N: usize>(mut v: [C64; N]) -> [C64; N] {
    v.sort_by(|p, q| (p.re, p.im).partial_cmp(&(q.re, q.im)).expect("finite parameters"));
    v
}

/// Wilson polynomial through the u_k representation with scale n!³.
/// Falls back to the definition at x = 0.
pub fn wilson_scaled(n: usize, x: f64, p: &WilsonParams) -> Result<Scaled> {
    if x == 0.0 {
        return Ok(Scaled { mantissa: wilson_def_raw(n, 0.0, p.to_array()), ln_scale: 0.0 });
    }
    let params = canonical(p.to_array());
    // v_k(z) = u_k(z)/k!²
    let v = |z: C64| -> Vec<C64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut t = c(1.0);
        out.push(t);
        for k in 0..n {
            let kf = k as f64;
            let k1 = kf + 1.0;
            for &q in &params {
                t *= q + z + kf;
            }
            t /= (1.0 + 2.0 * z + kf) * (k1 * k1 * k1);
            out.push(t);
        }
        out
    };
    let (vp, vm) = (v(ix(x)), v(ix(-x)));
    let lf = ln_factorials(n);
    let mut sum = c(0.0);
    for k in 0..=n {
        let inv_binom_sq = (2.0 * (lf[k] + lf[n - k] - lf[n])).exp();
        let lin = 1.0 + c((2 * k) as f64 - n as f64) / ix(2.0 * x);
        sum += vp[k] * vm[n - k] * inv_binom_sq * lin;
    }
    Ok(Scaled { mantissa: sum, ln_scale: 3.0 * lf[n] })
}

/// Continuous dual Hahn polynomial through the convolution sum.
pub fn cdh_scaled(n: usize, x: f64, p: &CdhParams) -> Scaled {
    let [a, b, cc] = canonical(p.to_array());
    let mut r = Vec::with_capacity(n + 1);
    let mut q = Vec::with_capacity(n + 1);
    let (mut rt, mut qt) = (c(1.0), c(1.0));
    r.push(rt);
    q.push(qt);
    for k in 0..n {
        let kf = k as f64;
        rt *= (a + ix(x) + kf) * (b + ix(x) + kf) / ((a + b + kf) * (kf + 1.0));
        qt *= (cc - ix(x) + kf) / (kf + 1.0);
        r.push(rt);
        q.push(qt);
    }
    let sum: C64 = (0..=n).map(|k| r[k] * q[n - k]).sum();
    let lp = ln_pochhammer(a + b, n);
    Scaled { mantissa: sum * C64::from_polar(1.0, lp.im), ln_scale: lp.re + ln_factorial(n) }
}

/// Continuous Hahn polynomial through the alternating convolution sum.
pub fn chahn_scaled(n: usize, x: f64, p: &ChahnParams) -> Scaled {
    let [a, b] = canonical([p.a, p.b]);
    let mut al = Vec::with_capacity(n + 1);
    let mut be = Vec::with_capacity(n + 1);
    let (mut at, mut bt) = (c(1.0), c(1.0));
    al.push(at);
    be.push(bt);
    for k in 0..n {
        let kf = k as f64;
        let k1 = (kf + 1.0) * (kf + 1.0);
        at *= (a + ix(x) + kf) * (b + ix(x) + kf) / k1;
        bt *= (a.conj() - ix(x) + kf) * (b.conj() - ix(x) + kf) / k1;
        al.push(at);
        be.push(bt);
    }
    let lf = ln_factorials(n);
    let mut sum = c(0.0);
    for k in 0..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * al[k] * be[n - k] * (lf[k] + lf[n - k] - lf[n]).exp();
    }
    Scaled { mantissa: C64::i().powu(n as u32) * sum, ln_scale: lf[n] }
}

/// Meixner–Pollaczek polynomial through the convolution sum.
pub fn mp_scaled(n: usize, x: f64, p: &MpParams) -> Scaled {
    let lam = p.lambda;
    let mut lo = Vec::with_capacity(n + 1);
    let mut hi = Vec::with_capacity(n + 1);
    let (mut lt, mut ht) = (c(1.0), c(1.0));
    lo.push(lt);
    hi.push(ht);
    for k in 0..n {
        let kf = k as f64;
        lt *= C64::new(lam + kf, -x) / (kf + 1.0);
        ht *= C64::new(lam + kf, x) / (kf + 1.0);
        lo.push(lt);
        hi.push(ht);
    }
    let sum: C64 =
        (0..=n).map(|k| lo[k] * hi[n - k] * C64::from_polar(1.0, p.phi * (2.0 * k as f64 - n as f64))).sum();
    Scaled { mantissa: sum, ln_scale: 0.0 }
}

/// Stable evaluation of any family member, carried with a log-scale.
pub fn eval_scaled(n: usize, x: f64, params: &FamilyParams) -> Result<Scaled> {
    match params {
        FamilyParams::Wilson(p) => wilson_scaled(n, x, p),
        FamilyParams::Cdh(p) => Ok(cdh_scaled(n, x, p)),
        FamilyParams::Chahn(p) => Ok(chahn_scaled(n, x, p)),
        FamilyParams::Mp(p) => Ok(mp_scaled(n, x, p)),
    }
}

/// Stable evaluation of any family member as a plain complex value.
pub fn eval(n: usize, x: f64, params: &FamilyParams) -> Result<C64> {
    Ok(eval_scaled(n, x, params)?.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitKind {
    WilsonToCdh,
    WilsonToChahn,
    CdhToMp,
}

/// |scaled source polynomial at parameter t − target polynomial| for the
/// three limit relations. `target` holds the parameters of the limit family.
///
/// The shared Pochhammer prefactor is factored out of both sides and
/// reapplied in log space.
pub fn limit_residual(kind: LimitKind, n: usize, x: f64, target: &FamilyParams, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return domain("limit parameter t must be positive");
    }
    let nf = n as f64;
    let (ln_common, diff) = match (kind, target) {
        (LimitKind::WilsonToCdh, FamilyParams::Cdh(p)) => {
            // W_n(x²; a,b,c,t)/(a+t)_n → S_n(x²; a,b,c)
            let (a, b, cc) = (p.a, p.b, p.c);
            let src = terminating(
                &[c(-nf), nf + a + b + cc + t - 1.0, a + ix(x), a - ix(x)],
                &[a + b, a + cc, a + t],
                c(1.0),
            );
            let dst = terminating(&[c(-nf), a + ix(x), a - ix(x)], &[a + b, a + cc], c(1.0));
            (ln_pochhammer(a + b, n).re + ln_pochhammer(a + cc, n).re, src - dst)
        }
        (LimitKind::WilsonToChahn, FamilyParams::Chahn(p)) => {
            // W_n((x+t)²; a−it, b−it, ā+it, b̄+it)/((−2t)ⁿ n!) → p_n(x)
            let (a, b) = (p.a, p.b);
            let (ra, rb) = (a.re, b.re);
            let abt = a + b - ix(2.0 * t);
            let ratio: C64 = (0..n).map(|j| (abt + j as f64) / (-2.0 * t)).product();
            let src = ratio
                * terminating(
                    &[c(-nf), c(nf + 2.0 * ra + 2.0 * rb - 1.0), a + ix(x), a - ix(2.0 * t + x)],
                    &[abt, c(2.0 * ra), a + b.conj()],
                    c(1.0),
                );
            let dst = C64::i().powu(n as u32)
                * terminating(&[c(-nf), c(nf + 2.0 * ra + 2.0 * rb - 1.0), a + ix(x)], &[c(2.0 * ra), a + b.conj()], c(1.0));
            let ln_common = ln_pochhammer(c(2.0 * ra), n).re + ln_pochhammer(a + b.conj(), n).re - ln_factorial(n);
            (ln_common, src - dst)
        }
        (LimitKind::CdhToMp, FamilyParams::Mp(p)) => {
            // S_n((x−t)²; λ+it, λ−it, t cot φ)/((t/sin φ)_n n!) → P_n(x; φ)
            let (lam, phi) = (p.lambda, p.phi);
            let ac = C64::new(lam + t / phi.tan(), t);
            let tp = t / phi.sin();
            let ratio: C64 = (0..n).map(|j| (ac + j as f64) / (tp + j as f64)).product();
            let src = ratio
                * terminating(&[c(-nf), C64::new(lam, x), C64::new(lam, 2.0 * t - x)], &[c(2.0 * lam), ac], c(1.0));
            let dst = C64::from_polar(1.0, nf * phi)
                * terminating(&[c(-nf), C64::new(lam, x)], &[c(2.0 * lam)], 1.0 - C64::from_polar(1.0, -2.0 * phi));
            (ln_pochhammer(c(2.0 * lam), n).re - ln_factorial(n), src - dst)
        }
        _ => return domain(format!("{kind:?} does not take {:?} parameters", target.family())),
    };
    if diff.norm() == 0.0 {
        return Ok(0.0);
    }
    Ok((diff.norm().ln() + ln_common).exp())
}

/// Fits the growth envelope of a family's bound,
/// log|P_n| ≤ base(n) + σ log(1+n) + log K, over n ≤ n_max.
///
/// Envelopes: CDH base = 2 log n!, CH base = log n!, MP base = 0. σ is the
/// least-squares slope through the upper convex hull of the residuals
/// against log(1+n) (clamped at 0); K is the smallest constant that makes
/// the bound hold at every n.
pub fn growth_bound_check(family: Family, n_max: usize, x: f64, params: &FamilyParams) -> Result<(f64, f64)> {
    if n_max < 8 {
        return domain("growth fit needs n_max >= 8");
    }
    if params.family() != family {
        return domain("parameter record does not match the family");
    }
    let lf = ln_factorials(n_max);
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for n in 0..=n_max {
        let base = match family {
            Family::Cdh => 2.0 * lf[n],
            Family::Chahn => lf[n],
            Family::Mp => 0.0,
            Family::Wilson => return domain("no growth bound for Wilson polynomials"),
        };
        let ln_abs = eval_scaled(n, x, params)?.ln_abs();
        if ln_abs.is_finite() {
            pts.push((((1 + n) as f64).ln(), ln_abs - base));
        }
    }
    if pts.is_empty() {
        return Err(Error::Fit("polynomial vanishes at every degree".into()));
    }
    let hull = upper_hull(&pts);
    let sigma = if hull.len() < 2 {
        0.0
    } else {
        let m = hull.len() as f64;
        let mx = hull.iter().map(|p| p.0).sum::<f64>() / m;
        let my = hull.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = hull.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = hull.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        (sxy / sxx).max(0.0)
    };
    let ln_k = pts.iter().map(|&(l, r)| r - sigma * l).fold(f64::NEG_INFINITY, f64::max);
    let k = ln_k.exp();
    if !(k.is_finite() && k <= 1e6 && sigma <= 50.0) {
        return Err(Error::Fit(format!("fitted K = {k:e}, sigma = {sigma} out of range")));
    }
    Ok((k, sigma))
}

fn upper_hull(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in pts {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn wilson_examples() {
        let p = WilsonParams::real(0.6, 1.1, 0.9, 0.7).unwrap();
        assert_eq!(wilson(0, 2.0, &p).unwrap(), 1.0);
        let (a, b, cc, d, x) = (0.6, 1.1, 0.9, 0.7, 1.3);
        let want = (a + b) * (a + cc) * (a + d) - (a + b + cc + d) * (a * a + x * x);
        assert!((wilson(1, x, &p).unwrap() - want).abs() < 1e-13);
        let q = WilsonParams::real(0.7, 0.9, 1.1, 0.6).unwrap();
        assert!((wilson(5, x, &p).unwrap() - wilson(5, x, &q).unwrap()).abs() < 1e-10 * wilson(5, x, &p).unwrap().abs());
    }

    #[test]
    fn wilson_sumrep_examples() {
        let ones = WilsonParams::real(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((wilson_sumrep(0, 0.4, &ones).unwrap() - 1.0).abs() < 1e-15);
        assert!(wilson_sumrep(1, 1.0, &ones).unwrap().abs() < 1e-13);
        assert!(wilson_sumrep(2, 0.0, &ones).is_err());
        let p = WilsonParams::new(cx(0.8, 0.5), cx(0.8, -0.5), cx(1.3, 0.0), cx(0.4, 0.0)).unwrap();
        for n in 0..=8 {
            let (d, s) = (wilson(n, 0.9, &p).unwrap(), wilson_sumrep(n, 0.9, &p).unwrap());
            assert!((d - s).abs() <= 1e-10 * (1.0 + d.abs()), "{n}: {d} vs {s}");
        }
    }

    #[test]
    fn wilson_frozen() {
        // mpmath, 40 digits: W_6(0.81; 0.5, 1.2, 0.8, 2)
        let p = WilsonParams::real(0.5, 1.2, 0.8, 2.0).unwrap();
        let w = wilson_sumrep(6, 0.9, &p).unwrap();
        assert!((w - -8_686_671_814.669_816).abs() < 1e-12 * w.abs(), "{w}");
    }

    #[test]
    fn cdh_examples() {
        let p = CdhParams::real(1.0, 1.0, 1.0).unwrap();
        assert_eq!(cdh(0, 1.0, &p).unwrap(), 1.0);
        assert!((cdh(1, 0.0, &p).unwrap() - 3.0).abs() < 1e-14);
        assert!((cdh_sumrep(1, 0.0, &p).unwrap() - 3.0).abs() < 1e-14);
        let q = CdhParams::new(cx(0.4, 0.0), cx(1.1, 0.7), cx(1.1, -0.7)).unwrap();
        let r = CdhParams::new(cx(1.1, -0.7), cx(0.4, 0.0), cx(1.1, 0.7)).unwrap();
        for n in 0..=10 {
            let (d, s) = (cdh(n, 1.7, &q).unwrap(), cdh_sumrep(n, 1.7, &q).unwrap());
            assert!((d - s).abs() <= 1e-10 * (1.0 + d.abs()), "{n}");
            assert!((d - cdh(n, 1.7, &r).unwrap()).abs() <= 1e-10 * (1.0 + d.abs()));
        }
    }

    #[test]
    fn chahn_examples() {
        let (a, b) = (cx(0.7, 0.4), cx(1.3, -0.2));
        let p = ChahnParams::new(a, b).unwrap();
        assert_eq!(chahn(0, 0.3, &p).unwrap(), cx(1.0, 0.0));
        let x = 0.3;
        let want = C64::i() * (2.0 * a.re * (a + b.conj()) - (2.0 * a.re + 2.0 * b.re) * (a + cx(0.0, x)));
        assert!((chahn(1, x, &p).unwrap() - want).norm() < 1e-13);
        let q = ChahnParams::new(b, a).unwrap();
        for n in 0..=10 {
            let d = chahn(n, -1.2, &p).unwrap();
            let s = chahn_sumrep(n, -1.2, &p).unwrap();
            assert!((d - s).norm() <= 1e-9 * (1.0 + d.norm()), "{n}");
            assert!((s - chahn_sumrep(n, -1.2, &q).unwrap()).norm() <= 1e-12 * (1.0 + d.norm()), "{n}");
        }
    }

    #[test]
    fn mp_examples() {
        let p = MpParams::new(0.8, 1.1).unwrap();
        assert_eq!(mp(0, 0.5, &p).unwrap(), 1.0);
        let want = 2.0 * (0.8 * 1.1f64.cos() + 0.5 * 1.1f64.sin());
        assert!((mp(1, 0.5, &p).unwrap() - want).abs() < 1e-14);
        assert!((mp_sumrep(1, 0.5, &p).unwrap() - want).abs() < 1e-14);
        let q = MpParams::new(1.0, PI / 2.0).unwrap();
        assert!(mp(1, 0.0, &q).unwrap().abs() < 1e-12);
        for n in 0..=10 {
            let d = mp(n, -2.3, &p).unwrap();
            assert!((d - mp_sumrep(n, -2.3, &p).unwrap()).abs() <= 1e-10 * (1.0 + d.abs()));
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(WilsonParams::new(cx(1.0, 0.5), cx(1.0, 0.0), cx(1.0, 0.0), cx(1.0, 0.0)).is_err());
        assert!(WilsonParams::new(cx(1.0, 0.5), cx(1.0, -0.5), cx(2.0, 0.3), cx(2.0, -0.3)).is_ok());
        assert!(WilsonParams::new(cx(1.0, 0.5), cx(1.0, 0.5), cx(1.0, -0.5), cx(1.0, -0.5)).is_ok());
        assert!(WilsonParams::real(-0.1, 1.0, 1.0, 1.0).is_err());
        assert!(CdhParams::new(cx(1.0, 0.5), cx(1.0, -0.5), cx(0.0, 0.0)).is_err());
        assert!(MpParams::new(1.0, PI).is_err());
        assert!(ChahnParams::new(cx(0.0, 1.0), cx(1.0, 0.0)).is_err());
    }

    #[test]
    fn reality_error_on_bad_pairing() {
        let raw = wilson_def_raw(3, 0.7, [cx(1.0, 0.5), cx(1.0, 0.0), cx(1.0, 0.0), cx(1.0, 0.0)]);
        assert!(matches!(real_part(raw), Err(Error::Reality { .. })));
    }

    #[test]
    fn degree_cap() {
        let p = MpParams::new(1.0, 1.0).unwrap();
        assert!(mp(MAX_DEGREE + 1, 0.0, &p).is_err());
    }

    #[test]
    fn limit_rates() {
        let targets = [
            (LimitKind::WilsonToCdh, FamilyParams::Cdh(CdhParams::real(0.7, 1.2, 0.5).unwrap())),
            (LimitKind::WilsonToChahn, FamilyParams::Chahn(ChahnParams::new(cx(0.7, 0.3), cx(1.1, -0.4)).unwrap())),
            (LimitKind::CdhToMp, FamilyParams::Mp(MpParams::new(0.9, 1.2).unwrap())),
        ];
        for (kind, p) in targets {
            assert_eq!(limit_residual(kind, 0, 0.8, &p, 10.0).unwrap(), 0.0);
            for n in 1..=4 {
                let r: Vec<f64> = [10.0, 100.0, 1000.0].iter().map(|&t| limit_residual(kind, n, 0.8, &p, t).unwrap()).collect();
                assert!(r[0] > r[1] && r[1] > r[2], "{kind:?} {n} {r:?}");
                let q = r[2] / r[1];
                assert!((0.05..=0.2).contains(&q), "{kind:?} {n} {r:?}");
            }
        }
    }

    #[test]
    fn growth_fits() {
        let p = FamilyParams::Mp(MpParams::new(1.0, PI / 2.0).unwrap());
        let (k, s) = growth_bound_check(Family::Mp, 30, 0.0, &p).unwrap();
        assert!(s <= 3.0 && (k - 1.0).abs() < 1e-12, "{k} {s}");
        let p = FamilyParams::Cdh(CdhParams::real(0.5, 1.5, 2.0).unwrap());
        assert!(growth_bound_check(Family::Cdh, 30, 2.0, &p).is_ok());
        let p = FamilyParams::Chahn(ChahnParams::new(cx(0.5, 1.0), cx(2.0, -1.0)).unwrap());
        assert!(growth_bound_check(Family::Chahn, 30, -3.0, &p).is_ok());
        assert!(growth_bound_check(Family::Chahn, 5, -3.0, &p).is_err());
    }
}
