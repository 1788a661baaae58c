//! Complex double-double accumulation for finite sums that cancel.
//!
//! Only addition and multiplication are used: `TwoFloat` division loses the
//! low word (its reciprocal residual is formed without an fma), so quotients
//! are taken once, in double, at the end.

use num_complex::Complex;
use twofloat::TwoFloat;

use crate::C64;

pub(crate) type Cdd = Complex<TwoFloat>;

pub(crate) fn dd(z: C64) -> Cdd {
    Cdd::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

pub(crate) fn ddr(x: f64) -> Cdd {
    Cdd::new(TwoFloat::from(x), TwoFloat::from(0.0))
}

pub(crate) fn to_c64(z: Cdd) -> C64 {
    C64::new(z.re.hi() + z.re.lo(), z.im.hi() + z.im.lo())
}

/// Multiplies p and q by the same power of two when q drifts far from 1.
fn rescale(p: &mut Cdd, q: &mut Cdd) {
    let m = q.re.hi().abs().max(q.im.hi().abs());
    if m > 1e100 || (m < 1e-100 && m > 0.0) {
        let s = TwoFloat::from(2f64.powi(-m.log2().round() as i32));
        *p = *p * s;
        *q = *q * s;
    }
}

/// Σ_{k≤m} Π(a_i)_k / Π(b_j)_k · z^k/k!, nested from the last term as one
/// fraction P/Q: v ← 1 + (num_k/den_k)·v.
pub(crate) fn terminating_sum(a: &[Cdd], b: &[Cdd], z: Cdd, m: usize) -> C64 {
    let (mut p, mut q) = (ddr(1.0), ddr(1.0));
    for k in (0..m).rev() {
        let kf = ddr(k as f64);
        let mut num = z;
        let mut den = kf + ddr(1.0);
        for &ai in a {
            num = num * (ai + kf);
        }
        for &bj in b {
            den = den * (bj + kf);
        }
        p = q * den + num * p;
        q = q * den;
        rescale(&mut p, &mut q);
    }
    to_c64(p) / to_c64(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_binomial_sum_is_exact() {
        // exact while m! fits in 106 bits
        for m in 1..25 {
            // 1F0(−m;;1) = 0
            let v = terminating_sum(&[ddr(-(m as f64))], &[], ddr(1.0), m);
            assert_eq!(v, C64::new(0.0, 0.0), "m = {m}");
        }
    }
}
