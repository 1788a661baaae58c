//! Generalized hypergeometric series and the classical unit-argument sums.

use serde::{Deserialize, Serialize};

use crate::arith::{log_gamma, nearest_pole, pochhammer};
use crate::dd::{dd, terminating_sum};
use crate::error::{domain, Error, Result};
use crate::C64;

/// Hard cap on the number of series terms.
pub const TERM_CAP: usize = 100_000;

/// Largest |z| summed directly when p = q+1; beyond 1/DISK_LIMIT the 1/z
/// continuation takes over.
pub const DISK_LIMIT: f64 = 0.95;

/// Summed series: value, truncation estimate, terms used, convergence flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: C64,
    pub abs_err_est: f64,
    pub terms_used: usize,
    pub converged: bool,
}

impl SeriesValue {
    pub fn exact(value: C64) -> Self {
        SeriesValue { value, abs_err_est: 0.0, terms_used: 0, converged: true }
    }
}

/// Parameters and argument of a pFq.
#[derive(Debug, Clone, PartialEq)]
pub struct PfqSpec {
    pub numerator: Vec<C64>,
    pub denominator: Vec<C64>,
    pub argument: C64,
}

impl PfqSpec {
    pub fn new(numerator: &[C64], denominator: &[C64], argument: C64) -> Self {
        PfqSpec { numerator: numerator.to_vec(), denominator: denominator.to_vec(), argument }
    }
}

/// `Some(n)` if `z` is the non-positive integer −n.
pub fn nonpositive_integer(z: C64) -> Option<usize> {
    let m = z.re.round();
    if m <= 0.0 && (z.re - m).abs() <= 1e-12 && z.im.abs() <= 1e-12 {
        Some((-m) as usize)
    } else {
        None
    }
}

/// Evaluate pFq(a; b; z) by its defining series.
///
/// A numerator −n ∈ −ℕ₀ makes the sum finite (n+1 terms, exact). Otherwise
/// the series runs until the geometric tail estimate
/// `|t_k| · max(1, r/(1−r))` falls below `tol·max(1, |partial|)` three times
/// in a row, where `r` is the larger of the observed term ratio and the
/// limiting ratio |z| (p = q+1). Hitting [`TERM_CAP`] returns
/// `converged = false`.
pub fn pfq(spec: &PfqSpec, tol: f64) -> Result<SeriesValue> {
    let (a, b, z) = (&spec.numerator, &spec.denominator, spec.argument);
    if !(tol > 0.0) {
        return domain("pfq tolerance must be positive");
    }
    let terminate = a.iter().filter_map(|&ai| nonpositive_integer(ai)).min();
    for &bj in b {
        if let Some(nb) = nonpositive_integer(bj) {
            match terminate {
                Some(m) if nb >= m => {}
                _ => return domain(format!("denominator parameter {bj} is a non-positive integer")),
            }
        }
    }
    let ratio = |k: usize| -> C64 {
        let kf = k as f64;
        let mut r = z / (kf + 1.0);
        for &ai in a {
            r *= ai + kf;
        }
        for &bj in b {
            r /= bj + kf;
        }
        r
    };

    if let Some(m) = terminate {
        return Ok(SeriesValue { value: terminating_sum(&a.iter().map(|&v| dd(v)).collect::<Vec<_>>(), &b.iter().map(|&v| dd(v)).collect::<Vec<_>>(), dd(z), m), abs_err_est: 0.0, terms_used: m + 1, converged: true });
    }
    if z == C64::new(0.0, 0.0) {
        return Ok(SeriesValue { value: C64::new(1.0, 0.0), abs_err_est: 0.0, terms_used: 1, converged: true });
    }
    let (p, q) = (a.len(), b.len());
    if p > q + 1 {
        return domain(format!("{p}F{q} diverges for z != 0"));
    }
    let limit_ratio = if p == q + 1 {
        if z.norm() >= DISK_LIMIT {
            return domain(format!("{p}F{q} argument |z| = {} outside the summation disk", z.norm()));
        }
        z.norm()
    } else {
        0.0
    };

    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut hits = 0;
    let mut est = f64::INFINITY;
    for k in 0..TERM_CAP - 1 {
        let prev = term.norm();
        term *= ratio(k);
        sum += term;
        let cur = term.norm();
        let observed = if prev > 0.0 { cur / prev } else { 0.0 };
        let r = observed.max(limit_ratio);
        est = if cur == 0.0 {
            0.0
        } else if r < 1.0 {
            cur * (r / (1.0 - r)).max(1.0)
        } else {
            f64::INFINITY
        };
        if est <= tol * sum.norm().max(1.0) {
            hits += 1;
            if hits == 3 {
                return Ok(SeriesValue { value: sum, abs_err_est: est, terms_used: k + 2, converged: true });
            }
        } else {
            hits = 0;
        }
    }
    Ok(SeriesValue { value: sum, abs_err_est: est, terms_used: TERM_CAP, converged: false })
}

/// pFq with the p = q+1 series continued outside the unit disk.
///
/// For |z| > 1/[`DISK_LIMIT`] (and z off the cut [1, ∞)) the function is
/// expressed through q+1 series in 1/z,
/// F(z) = Σ_j Π_{k≠j}Γ(a_k−a_j)/Γ(a_k) · Π_iΓ(b_i)/Γ(b_i−a_j) · (−z)^{−a_j}
///        · F(a_j, 1−b+a_j; 1−a_{k≠j}+a_j; 1/z).
/// Numerator parameters differing by an integer are a pole of this form and
/// are reported as such. Everything else defers to [`pfq`].
pub fn pfq_analytic(spec: &PfqSpec, tol: f64) -> Result<SeriesValue> {
    let (a, b, z) = (&spec.numerator, &spec.denominator, spec.argument);
    let terminating = a.iter().any(|&ai| nonpositive_integer(ai).is_some());
    if terminating || a.len() != b.len() + 1 || z.norm() * DISK_LIMIT <= 1.0 {
        return pfq(spec, tol);
    }
    if z.im == 0.0 && z.re > 0.0 {
        return domain("argument on the branch cut [1, inf)");
    }
    let ln_mz = (-z).ln();
    let inv = 1.0 / z;
    let mut sum = C64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut terms = 0;
    let mut all_converged = true;
    for (j, &aj) in a.iter().enumerate() {
        let mut q = GammaQuotient::new();
        for (k, &ak) in a.iter().enumerate() {
            if k != j {
                q.num(ak - aj).map_err(|_| {
                    Error::Pole(format!("numerator parameters {aj} and {ak} differ by an integer"))
                })?;
                q.den(ak);
            }
        }
        for &bi in b {
            q.num(bi)?;
            q.den(bi - aj);
        }
        if q.zero {
            continue;
        }
        let coef = (q.ln - aj * ln_mz).exp() * q.factor;
        let mut num = vec![aj];
        num.extend(b.iter().map(|&bi| 1.0 - bi + aj));
        let den: Vec<C64> =
            a.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &ak)| 1.0 - ak + aj).collect();
        let s = pfq(&PfqSpec::new(&num, &den, inv), tol)?;
        sum += coef * s.value;
        err += coef.norm() * s.abs_err_est;
        terms += s.terms_used;
        all_converged &= s.converged;
    }
    Ok(SeriesValue {
        value: sum,
        abs_err_est: err,
        terms_used: terms,
        // cancellation between the pieces shows up in abs_err_est only
        converged: all_converged,
    })
}

/// Chu–Vandermonde: 2F1(−n, b; c; 1) = (c−b)_n / (c)_n.
pub fn chu_vandermonde(n: usize, b: C64, c: C64) -> Result<C64> {
    if let Some(m) = nonpositive_integer(c) {
        if m < n {
            return domain(format!("(c)_n vanishes for c = {c}, n = {n}"));
        }
    }
    Ok(pochhammer(c - b, n) / pochhammer(c, n))
}

/// Product of gamma values and reciprocals accumulated in log space. A
/// reciprocal gamma at a pole contributes an exact zero.
struct GammaQuotient {
    ln: C64,
    factor: C64,
    zero: bool,
}

impl GammaQuotient {
    fn new() -> Self {
        GammaQuotient { ln: C64::new(0.0, 0.0), factor: C64::new(1.0, 0.0), zero: false }
    }

    fn num(&mut self, z: C64) -> Result<()> {
        self.ln += log_gamma(z)?;
        Ok(())
    }

    fn den(&mut self, z: C64) {
        if nearest_pole(z).is_some() {
            self.zero = true;
        } else {
            self.ln -= log_gamma(z).expect("pole excluded");
        }
    }

    /// Γ(x)/Γ(y), taken as a Pochhammer symbol when x − y is an integer so
    /// that simultaneous poles cancel.
    fn ratio(&mut self, x: C64, y: C64) -> Result<()> {
        let d = x - y;
        let m = d.re.round();
        if (d.re - m).abs() <= 1e-12 && d.im.abs() <= 1e-12 {
            if m >= 0.0 {
                self.factor *= pochhammer(y, m as usize);
            } else {
                let p = pochhammer(x, (-m) as usize);
                if p.norm() == 0.0 {
                    return Err(Error::Pole(format!("Gamma({x})/Gamma({y}) is infinite")));
                }
                self.factor /= p;
            }
            Ok(())
        } else {
            self.num(x)?;
            self.den(y);
            Ok(())
        }
    }

    fn value(&self) -> C64 {
        if self.zero {
            C64::new(0.0, 0.0)
        } else {
            self.ln.exp() * self.factor
        }
    }
}

/// Whipple's sum: 3F2(a', b', c'; ½(a'+b'+1), 2c'; 1) as a gamma quotient.
///
/// When a' (or b') is a non-positive even integer the pair
/// Γ(c'+½(1−a'−b'))/Γ(c'+½(1−b')) is an integer shift and is evaluated as a
/// Pochhammer symbol, which keeps the terminating case finite.
pub fn whipple_sum(ap: C64, bp: C64, cp: C64) -> Result<C64> {
    let mut q = GammaQuotient::new();
    q.factor *= std::f64::consts::PI.sqrt();
    q.num(cp + 0.5)?;
    q.num(0.5 * (ap + bp + 1.0))?;
    let top = cp + 0.5 * (1.0 - ap - bp);
    let is_even_shift = |v: C64| nonpositive_integer(v).map_or(false, |m| m % 2 == 0);
    if !is_even_shift(ap) && is_even_shift(bp) {
        q.ratio(top, cp + 0.5 * (1.0 - ap))?;
        q.den(cp + 0.5 * (1.0 - bp));
    } else {
        q.ratio(top, cp + 0.5 * (1.0 - bp))?;
        q.den(cp + 0.5 * (1.0 - ap));
    }
    q.den(0.5 * (ap + 1.0));
    q.den(0.5 * (bp + 1.0));
    Ok(q.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn zero_argument() {
        let s = pfq(&PfqSpec::new(&[r(0.3), r(2.0)], &[r(1.5)], r(0.0)), 1e-14).unwrap();
        assert_eq!(s.value, r(1.0));
        assert!(s.converged);
    }

    #[test]
    fn terminating_unit_argument() {
        let s = pfq(&PfqSpec::new(&[r(-2.0), r(1.0)], &[r(3.0)], r(1.0)), 1e-14).unwrap();
        assert!((s.value - 0.5).norm() < 1e-15);
        assert_eq!((s.terms_used, s.abs_err_est, s.converged), (3, 0.0, true));
    }

    #[test]
    fn binomial_series() {
        let s = pfq(&PfqSpec::new(&[r(1.0)], &[], r(0.5)), 1e-15).unwrap();
        assert!((s.value - 2.0).norm() < 1e-14);
        assert!(s.converged && s.abs_err_est <= 1e-15 * 2.0);
    }

    #[test]
    fn log_closed_form() {
        // 2F1(1,1;2;z) = −ln(1−z)/z
        let z = C64::new(0.3, -0.4);
        let s = pfq(&PfqSpec::new(&[r(1.0), r(1.0)], &[r(2.0)], z), 1e-15).unwrap();
        let want = -(1.0 - z).ln() / z;
        assert!((s.value - want).norm() < 1e-14);
    }

    #[test]
    fn exponential() {
        let z = C64::new(-3.0, 2.0);
        let s = pfq(&PfqSpec::new(&[], &[], z), 1e-15).unwrap();
        assert!((s.value - z.exp()).norm() < 1e-14 * z.exp().norm().max(1.0));
    }

    #[test]
    fn domain_errors() {
        assert!(pfq(&PfqSpec::new(&[r(0.5), r(1.0)], &[r(-2.0)], r(0.1)), 1e-12).is_err());
        // terminates before reaching the zero denominator
        assert!(pfq(&PfqSpec::new(&[r(-2.0), r(1.0)], &[r(-3.0)], r(0.1)), 1e-12).is_ok());
        assert!(pfq(&PfqSpec::new(&[r(-4.0), r(1.0)], &[r(-3.0)], r(0.1)), 1e-12).is_err());
        assert!(pfq(&PfqSpec::new(&[r(0.5), r(1.0)], &[r(2.0)], r(0.97)), 1e-12).is_err());
        assert!(pfq(&PfqSpec::new(&[r(0.5), r(1.0), r(1.0)], &[r(2.0)], r(0.1)), 1e-12).is_err());
    }

    #[test]
    fn chu_vandermonde_examples() {
        assert_eq!(chu_vandermonde(0, r(0.3), r(1.7)).unwrap(), r(1.0));
        assert!((chu_vandermonde(2, r(1.0), r(3.0)).unwrap() - 0.5).norm() < 1e-15);
        assert_eq!(chu_vandermonde(3, r(2.5), r(2.5)).unwrap(), r(0.0));
        assert!(chu_vandermonde(3, r(1.0), r(-1.0)).is_err());
    }

    fn whipple_direct(ap: C64, bp: C64, cp: C64) -> C64 {
        pfq(&PfqSpec::new(&[ap, bp, cp], &[0.5 * (ap + bp + 1.0), 2.0 * cp], r(1.0)), 1e-15)
            .unwrap()
            .value
    }

    #[test]
    fn whipple_examples() {
        assert!((whipple_sum(r(0.0), r(2.3), r(0.7)).unwrap() - 1.0).norm() < 1e-13);
        let w = whipple_sum(r(-2.0), r(5.0), r(2.0)).unwrap();
        assert!((w - whipple_direct(r(-2.0), r(5.0), r(2.0))).norm() < 1e-14);
        let (bp, cp) = (C64::new(1.3, 0.2), r(0.9));
        let w = whipple_sum(r(-1.0), bp, cp).unwrap();
        assert!((w - whipple_direct(r(-1.0), bp, cp)).norm() < 1e-14);
    }

    #[test]
    fn whipple_nonterminating() {
        // mpmath hyp3f2(0.3, 0.8, 0.6; 1.05, 1.2; 1)
        let w = whipple_sum(r(0.3), r(0.8), r(0.6)).unwrap();
        assert!((w - 1.338_976_901_298_239_7).norm() < 1e-12, "{w}");
    }

    #[test]
    fn whipple_coincident_poles() {
        // c' − b' such that both Γ(c'+½(1−a'−b')) and Γ(c'+½(1−b')) sit on poles
        let (ap, bp, cp) = (r(-4.0), r(7.0), r(1.0));
        let w = whipple_sum(ap, bp, cp).unwrap();
        assert!((w - whipple_direct(ap, bp, cp)).norm() < 1e-13, "{w}");
    }

    #[test]
    fn continuation_closed_forms() {
        // 2F1(a, b; b; z) = (1−z)^{−a}
        let z = r(-3.0);
        let s = pfq_analytic(&PfqSpec::new(&[r(0.3), r(0.8)], &[r(0.8)], z), 1e-14).unwrap();
        assert!((s.value - 4f64.powf(-0.3)).norm() < 1e-13, "{}", s.value);
        // 1F0(a;;z) = (1−z)^{−a}
        let z = C64::new(-2.0, 1.5);
        let a = C64::new(0.4, 0.3);
        let s = pfq_analytic(&PfqSpec::new(&[a], &[], z), 1e-14).unwrap();
        assert!((s.value - (1.0 - z).powc(-a)).norm() < 1e-13);
    }

    #[test]
    fn continuation_frozen_values() {
        // mpmath hyper(), 30 digits
        let s = pfq_analytic(&PfqSpec::new(&[r(0.3), r(0.7)], &[r(1.9)], r(-2.5)), 1e-15).unwrap();
        assert!((s.value - 0.844_310_835_371_014_9).norm() < 1e-13, "{}", s.value);
        let a = [r(1.45), r(1.95), C64::new(0.6, 0.7), C64::new(0.6, -0.7)];
        let b = [r(1.7), r(1.5), r(1.3)];
        let z = r(-4.0 * 0.3 / 0.49);
        let s = pfq_analytic(&PfqSpec::new(&a, &b, z), 1e-15).unwrap();
        assert!((s.value - 0.325_888_342_679_688_03).norm() < 1e-13, "{}", s.value);
    }
}
