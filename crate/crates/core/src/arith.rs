//! Scalar kernel: gamma, Pochhammer symbols, binomials and the four
//! Pochhammer bounds.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::C64;

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

/// Distance below which an argument counts as sitting on a pole.
pub const POLE_EPS: f64 = 1e-13;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Returns the non-positive integer `m` if `z` lies within [`POLE_EPS`] of it.
pub fn nearest_pole(z: C64) -> Option<f64> {
    let m = z.re.round();
    if m <= 0.0 && (z - m).norm() < POLE_EPS {
        Some(m)
    } else {
        None
    }
}

fn lanczos(z: C64) -> C64 {
    let z = z - 1.0;
    let mut series = C64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        series += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (z + 0.5) * t.ln() - t + series.ln() + LN_SQRT_2PI
}

fn ln_sin_pi(z: C64) -> C64 {
    if z.im > 30.0 {
        C64::new(-std::f64::consts::LN_2, PI / 2.0) - C64::i() * PI * z
    } else if z.im < -30.0 {
        C64::new(-std::f64::consts::LN_2, -PI / 2.0) + C64::i() * PI * z
    } else {
        (z * PI).sin().ln()
    }
}

/// Logarithm of Γ(z); continuous on Re z ≥ ½ and obtained by reflection
/// elsewhere, so `exp` of the result is always Γ(z).
pub fn log_gamma(z: C64) -> Result<C64> {
    if let Some(m) = nearest_pole(z) {
        return Err(Error::Pole(format!("gamma has a pole at {m}")));
    }
    if z.re < 0.5 {
        Ok(C64::new(PI.ln(), 0.0) - ln_sin_pi(z) - lanczos(1.0 - z))
    } else {
        Ok(lanczos(z))
    }
}

/// Γ(z).
pub fn gamma(z: C64) -> Result<C64> {
    if let Some(m) = nearest_pole(z) {
        return Err(Error::Pole(format!("gamma has a pole at {m}")));
    }
    if z.im == 0.0 {
        let x = z.re;
        let v = if x >= 0.5 {
            lanczos(z).re.exp()
        } else {
            PI / ((PI * x).sin() * lanczos(C64::new(1.0 - x, 0.0)).re.exp())
        };
        return Ok(C64::new(v, 0.0));
    }
    Ok(log_gamma(z)?.exp())
}

/// 1/Γ(z), entire: exactly zero on the poles of Γ.
pub fn recip_gamma(z: C64) -> C64 {
    match gamma(z) {
        Ok(g) => 1.0 / g,
        Err(_) => C64::new(0.0, 0.0),
    }
}

/// ln Γ(x) for real x > 0.
pub fn ln_gamma_real(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    lanczos(C64::new(x, 0.0)).re
}

/// ln n!.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        ln_gamma_real(n as f64 + 1.0)
    }
}

/// n! as a float (overflows to infinity past 170).
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Rising factorial (z)_n = z(z+1)…(z+n−1).
pub fn pochhammer(z: C64, n: usize) -> C64 {
    let mut p = C64::new(1.0, 0.0);
    for i in 0..n {
        p *= z + i as f64;
    }
    p
}

/// Σ ln(z+i), a logarithm of (z)_n that never overflows. A zero factor
/// gives a real part of −∞.
pub fn ln_pochhammer(z: C64, n: usize) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for i in 0..n {
        s += (z + i as f64).ln();
    }
    s
}

/// Binomial coefficient, computed multiplicatively.
pub fn binomial(n: usize, k: usize) -> Result<f64> {
    if k > n {
        return domain(format!("binomial({n}, {k}) with k > n"));
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 1..=k {
        r = r * (n - k + i) as f64 / i as f64;
    }
    Ok(r.round())
}

/// |Γ(iy)|² = π / (y sinh πy).
pub fn abs_gamma_iy_sq(y: f64) -> f64 {
    PI / (y * (PI * y).sinh())
}

/// ln(1/|Γ(2ix)|²) = ln(2x sinh(2πx)/π), stable for large x. −∞ at x = 0.
pub fn ln_inv_abs_gamma_2ix_sq(x: f64) -> f64 {
    let x = x.abs();
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    let t = 2.0 * PI * x;
    let ln_sinh = if t > 20.0 {
        t - std::f64::consts::LN_2 + (-(-2.0 * t).exp()).ln_1p()
    } else {
        t.sinh().ln()
    };
    (2.0 * x / PI).ln() + ln_sinh
}

/// The four Pochhammer bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundId {
    /// |(u)_j| ≥ (Re u)(j−1)!
    B1,
    /// |(v)_n|/n! ≤ (1+n)^{|v|}
    B2,
    /// |(k+v)_{n−k}| ≤ (1+n)^{|v|} n!/k!
    B3,
    /// |(k+v)_n/(k+u)_n| ≤ max(1/Re u, 1)(1+n)^{1+|v|}
    B4,
}

impl BoundId {
    pub const ALL: [BoundId; 4] = [BoundId::B1, BoundId::B2, BoundId::B3, BoundId::B4];
}

/// Both sides of a bound inequality. B1 holds when `lhs >= rhs`, B2–B4 when
/// `lhs <= rhs`.
pub fn bound_margin(id: BoundId, u: C64, v: C64, j: usize, k: usize, n: usize) -> Result<(f64, f64)> {
    let nf = n as f64;
    match id {
        BoundId::B1 => {
            if u.re <= 0.0 || j < 1 {
                return domain("B1 needs Re u > 0 and j >= 1");
            }
            Ok((pochhammer(u, j).norm(), u.re * factorial(j - 1)))
        }
        BoundId::B2 => {
            let lhs = pochhammer(v, n).norm() / factorial(n);
            Ok((lhs, (1.0 + nf).powf(v.norm())))
        }
        BoundId::B3 => {
            if k > n {
                return domain("B3 needs k <= n");
            }
            let lhs = pochhammer(v + k as f64, n - k).norm();
            let ratio: f64 = ((k + 1)..=n).map(|i| i as f64).product();
            Ok((lhs, (1.0 + nf).powf(v.norm()) * ratio))
        }
        BoundId::B4 => {
            if u.re <= 0.0 {
                return domain("B4 needs Re u > 0");
            }
            let kf = k as f64;
            let lhs = (pochhammer(v + kf, n) / pochhammer(u + kf, n)).norm();
            Ok((lhs, (1.0 / u.re).max(1.0) * (1.0 + nf).powf(1.0 + v.norm())))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn log_gamma_examples() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!((log_gamma(c(4.0, 0.0)).unwrap() - c(6f64.ln(), 0.0)).norm() < 1e-14);
        assert!((log_gamma(c(0.5, 0.0)).unwrap().re - 0.572_364_942_924_700_1).abs() < 1e-14);
    }

    #[test]
    fn gamma_examples() {
        assert!((gamma(c(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        assert!((gamma(c(5.0, 0.0)).unwrap() - 24.0).norm() < 1e-12);
        let gi = gamma(c(0.0, 1.0)).unwrap();
        assert!((gi.norm_sqr() - 0.272_029_054_982_133_2).abs() < 1e-13);
        assert!((gi.norm_sqr() - abs_gamma_iy_sq(1.0)).abs() < 1e-13);
    }

    #[test]
    fn gamma_frozen_values() {
        // mpmath, 30 digits
        let cases = [
            (c(0.3, 2.7), c(0.028_059_879_610_273_216, -0.009_433_071_836_457_113_6)),
            (c(-1.5, 0.0), c(2.363_271_801_207_354_7, 0.0)),
            (c(-2.3, -1.1), c(0.019_977_353_763_679_27, 0.088_828_834_683_559_92)),
            (c(7.25, 12.0), c(0.038_374_707_984_722_223, 0.433_263_275_044_111_1)),
        ];
        for (z, want) in cases {
            let g = gamma(z).unwrap();
            assert!((g - want).norm() <= 1e-13 * want.norm(), "{z}: {g} vs {want}");
        }
    }

    #[test]
    fn poles_rejected() {
        assert!(matches!(log_gamma(c(0.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(gamma(c(-3.0, 1e-14)), Err(Error::Pole(_))));
        assert!(gamma(c(-3.0, 1e-10)).is_ok());
        assert_eq!(recip_gamma(c(-2.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn large_imaginary_reflection() {
        // |Γ(iy)|² for y large goes through the asymptotic ln sin branch.
        for y in [35.0, -40.0] {
            let lg = log_gamma(c(0.0, y) + c(1e-3, 0.0)).unwrap();
            let direct = log_gamma(c(1.0 + 1e-3, y)).unwrap() - c(1e-3, y).ln();
            assert!((lg.re - direct.re).abs() < 1e-11, "{y}");
        }
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(c(3.3, -1.0), 0), c(1.0, 0.0));
        assert_eq!(pochhammer(c(1.0, 0.0), 5), c(120.0, 0.0));
        assert_eq!(pochhammer(c(2.0, 1.0), 2), c(5.0, 5.0));
        let lp = ln_pochhammer(c(2.0, 1.0), 2).exp();
        assert!((lp - c(5.0, 5.0)).norm() < 1e-14);
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(7, 0).unwrap(), 1.0);
        assert_eq!(binomial(5, 2).unwrap(), 10.0);
        assert_eq!(binomial(20, 10).unwrap(), 184_756.0);
        assert!(binomial(3, 4).is_err());
    }

    #[test]
    fn bound_examples() {
        let one = c(1.0, 0.0);
        let (l, r) = bound_margin(BoundId::B1, one, one, 1, 0, 0).unwrap();
        assert_eq!((l, r), (1.0, 1.0));
        let (l, r) = bound_margin(BoundId::B2, one, c(0.0, 0.0), 0, 0, 6).unwrap();
        assert_eq!((l, r), (0.0, 1.0));
        let u = c(0.7, 0.4);
        let (l, r) = bound_margin(BoundId::B4, u, u, 0, 3, 9).unwrap();
        assert!((l - 1.0).abs() < 1e-14 && l <= r);
        assert!(bound_margin(BoundId::B1, c(-1.0, 0.0), one, 1, 0, 0).is_err());
        assert!(bound_margin(BoundId::B3, one, one, 0, 5, 4).is_err());
    }

    #[test]
    fn inverse_gamma_2ix() {
        for x in [0.01, 0.5, 1.0, 7.0] {
            let direct = 1.0 / gamma(c(0.0, 2.0 * x)).unwrap().norm_sqr();
            let closed = ln_inv_abs_gamma_2ix_sq(x).exp();
            assert!((direct - closed).abs() < 1e-12 * closed, "{x}");
        }
    }
}
