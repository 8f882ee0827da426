use num_bigint::BigUint;
use proptest::prelude::*;

use stirval::classes::ResidueClass;
use stirval::clarke::{clarke_zero, ClarkeForm, Parity};
use stirval::padic::{binomial, factorial, kummer_binomial_val, legendre_factorial_val, nu_int};
use stirval::stirling::stirling_exact;
use stirval::{ModStirlingEngine, Precision, Valuation, ValuationOutcome};

fn naive_nu(p: u64, mut n: u64) -> Valuation {
    if n == 0 {
        return Valuation::Infinite;
    }
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Valuation::Finite(v)
}

fn big_nu2(n: &BigUint) -> Valuation {
    n.trailing_zeros().map_or(Valuation::Infinite, |t| Valuation::Finite(t as i64))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nu_matches_repeated_division(p in prop::sample::select(vec![2u64, 3, 5, 7, 13]), n in 0u64..1_000_000) {
        prop_assert_eq!(nu_int(p, &n).unwrap(), naive_nu(p, n));
    }

    #[test]
    fn nu_is_additive(a in 1u64..1_000_000, b in 1u64..1_000_000) {
        let prod = BigUint::from(a) * BigUint::from(b);
        prop_assert_eq!(nu_int(2, &prod).unwrap(), naive_nu(2, a) + naive_nu(2, b));
    }

    #[test]
    fn nu_is_ultrametric(a in 0u64..1_000_000, b in 0u64..1_000_000) {
        let lhs = nu_int(2, &(a + b)).unwrap();
        let rhs = nu_int(2, &a).unwrap().min(nu_int(2, &b).unwrap());
        prop_assert!(lhs >= rhs);
    }

    #[test]
    fn legendre_matches_factorial(p in prop::sample::select(vec![2u64, 3, 5]), m in 0u64..400) {
        prop_assert_eq!(legendre_factorial_val(p, &m).unwrap(), nu_int(p, &factorial(m)).unwrap());
    }

    #[test]
    fn kummer_matches_binomial(m in 0u64..400, frac in 0.0f64..=1.0) {
        let k = ((m as f64) * frac) as u64;
        prop_assert_eq!(kummer_binomial_val(&m, &k).unwrap(), big_nu2(&binomial(m, k)));
    }

    #[test]
    fn children_partition_parent(k in 1u32..40, m in 1u32..12, j in 0u64..4096, n in 0u64..20_000) {
        let c = ResidueClass::new(k, m, j).unwrap();
        let [a, b] = c.children();
        prop_assert_eq!(c.contains(n), a.contains(n) ^ b.contains(n));
        prop_assert!(!(a.contains(n) && b.contains(n)));
    }

    #[test]
    fn engine_matches_exact(k in 1u32..=200, extra in 0u64..200) {
        let n = k as u64 + extra;
        let want = big_nu2(&stirling_exact(n, k as u64).unwrap());
        let got = ModStirlingEngine::new(k).valuation_result(n).unwrap();
        prop_assert_eq!(got, want);
    }

    // A tight ceiling may give up but must never report a wrong value.
    #[test]
    fn low_ceiling_is_sound(k in 1u32..=60, extra in 0u64..120, bits in 1u32..80) {
        let n = k as u64 + extra;
        let want = big_nu2(&stirling_exact(n, k as u64).unwrap());
        let engine = ModStirlingEngine::with_precision(k, Precision::with_max_bits(bits));
        if let ValuationOutcome::Exact(v) = engine.valuation(n) {
            prop_assert_eq!(v, want);
        }
    }

    #[test]
    fn zero_is_stable_under_truncation(lo in 4u32..60, extra in 0u32..60, odd in any::<bool>()) {
        let hi = lo + extra;
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let f = ClarkeForm::f05();
        let narrow = clarke_zero(&f, parity, lo).unwrap();
        let wide = clarke_zero(&f, parity, hi).unwrap();
        prop_assert_eq!(wide.residue % (1u128 << narrow.residue_bits()), narrow.residue);
    }
}
