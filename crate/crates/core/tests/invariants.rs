use askey_core::arith::{gamma, pochhammer};
use askey_core::families::{self, CdhParams, FamilyParams, MpParams, WilsonParams};
use askey_core::hypergeom::{chu_vandermonde, pfq, PfqSpec};
use askey_core::quadrature::weight;
use askey_core::C64;
use proptest::prelude::*;

fn re() -> impl Strategy<Value = f64> {
    0.1f64..3.0
}

fn cx() -> impl Strategy<Value = C64> {
    (re(), -2.0f64..2.0).prop_map(|(a, b)| C64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pochhammer_splits(z in cx(), m in 0usize..20, n in 0usize..20) {
        let whole = pochhammer(z, m + n);
        let split = pochhammer(z, m) * pochhammer(z + m as f64, n);
        prop_assert!((whole - split).norm() <= 1e-12 * whole.norm());
    }

    #[test]
    fn gamma_recurrence(z in cx()) {
        let (g, g1) = (gamma(z).unwrap(), gamma(z + 1.0).unwrap());
        prop_assert!((g1 - z * g).norm() <= 1e-12 * g1.norm());
    }

    #[test]
    fn chu_vandermonde_matches_the_sum(n in 0usize..20, b in cx(), c in cx()) {
        let brute = pfq(&PfqSpec::new(&[C64::new(-(n as f64), 0.0), b], &[c], C64::new(1.0, 0.0)), 1e-15).unwrap().value;
        let closed = chu_vandermonde(n, b, c).unwrap();
        prop_assert!((brute - closed).norm() <= 1e-11 * closed.norm().max(1e-300));
    }

    #[test]
    fn weights_are_nonnegative(a in re(), b in re(), c in re(), d in re(), x in 0.0f64..20.0, phi in 0.2f64..2.9) {
        let ps = [
            FamilyParams::Wilson(WilsonParams::real(a, b, c, d).unwrap()),
            FamilyParams::Cdh(CdhParams::real(a, b, c).unwrap()),
            FamilyParams::Mp(MpParams::new(a, phi).unwrap()),
        ];
        for p in ps {
            prop_assert!(weight(&p, x).unwrap() >= 0.0);
        }
    }

    #[test]
    fn definition_agrees_with_sum_representation(a in re(), b in re(), c in re(), x in 0.05f64..5.0, n in 0usize..12) {
        let p = CdhParams::real(a, b, c).unwrap();
        let (u, v) = (families::cdh(n, x, &p).unwrap(), families::cdh_sumrep(n, x, &p).unwrap());
        prop_assert!((u - v).abs() <= 1e-10 * (1.0 + u.abs()), "{u} vs {v}");
    }
}
