use num_bigint::BigInt;
use proptest::prelude::*;
use sonda::encoding::{tuple_strings, untuple_strings};
use sonda::names::{pad, pair, project, strip_padding, Name, Side};
use sonda::real::{real_add, real_from_dyadic, real_mul};
use sonda::{decode_dyadic, Dyadic, SecondOrderPolynomial, SizeFn};

fn dyadic() -> impl Strategy<Value = Dyadic> {
    (any::<i64>(), 0u64..70).prop_map(|(m, e)| Dyadic::new(BigInt::from(m), e))
}

fn bits() -> impl Strategy<Value = String> {
    proptest::collection::vec(any::<bool>(), 0..24).prop_map(|v| v.into_iter().map(|b| if b { '1' } else { '0' }).collect())
}

proptest! {
    #[test]
    fn dyadic_round_trip(x in dyadic()) {
        prop_assert_eq!(decode_dyadic(&x.encode()).unwrap(), x);
    }

    #[test]
    fn rounding_error_is_half_an_ulp(x in dyadic(), k in 0u64..40) {
        let r = x.round_to(k);
        prop_assert!(r.exponent() <= k);
        prop_assert!((&r - &x).abs() <= Dyadic::pow2(-(k as i64) - 1));
    }

    #[test]
    fn tuples_round_trip(parts in proptest::collection::vec(bits(), 0..5)) {
        prop_assert_eq!(untuple_strings(&tuple_strings(&parts)).unwrap(), parts);
    }

    #[test]
    fn pair_projects_back(u in bits(), a in 0usize..6, b in 0usize..6) {
        let phi = Name::from_fn(move |w| format!("{w}{}", "1".repeat(a)));
        let psi = Name::from_fn(move |w| "0".repeat(w.len() + b));
        let p = pair(&phi, &psi);
        prop_assert_eq!(project(Side::Left, &p).query(&u).unwrap(), phi.query(&u).unwrap());
        prop_assert_eq!(project(Side::Right, &p).query(&u).unwrap(), psi.query(&u).unwrap());
    }

    #[test]
    fn padding_is_exact_and_reversible(u in bits(), extra in 0usize..5) {
        let short = Name::from_fn(|w| w.chars().rev().collect());
        let wide = Name::from_fn(move |w| "0".repeat(2 * w.len() + extra));
        let a = pad(&short, &wide).query(&u).unwrap();
        prop_assert_eq!(a.len(), 2 * u.len() + extra);
        prop_assert_eq!(strip_padding(&a), short.query(&u).unwrap());
    }

    #[test]
    fn sopoly_monotone(n in 0u64..30, c in 1usize..5) {
        let p = SecondOrderPolynomial::parse("L(L(n*n))+L(L(n)*L(n))+L(n)+4").unwrap();
        let (lo, hi) = (SizeFn::new(move |x| x + c), SizeFn::new(move |x| 2 * x + c));
        prop_assert!(p.eval(&lo, n) <= p.eval(&hi, n));
        prop_assert!(p.eval(&lo, n) <= p.eval(&lo, n + 1));
    }

    #[test]
    fn real_arithmetic_within_precision(a in -4000i64..4000, b in -4000i64..4000, m in 0u64..30) {
        let (x, y) = (Dyadic::new(a, 7), Dyadic::new(b, 5));
        let (rx, ry) = (real_from_dyadic(&x), real_from_dyadic(&y));
        let tol = Dyadic::pow2(-(m as i64));
        prop_assert!((&real_add(&rx, &ry).approx(m).unwrap() - &(&x + &y)).abs() <= tol);
        prop_assert!((&real_mul(&rx, &ry).approx(m).unwrap() - &(&x * &y)).abs() <= tol);
    }
}
