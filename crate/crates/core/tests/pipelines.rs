use sonda::catalog::{find_op, fun_real_pair, real_pair};
use sonda::cfun::{apply, approx_query, Domain};
use sonda::complexity::{exist2, exist2_problem, exist2_via_qbf2, sat2, translate, builtin_predicate, Caps};
use sonda::encoding::{tuple_strings, unary};
use sonda::ivp::lip_ivp;
use sonda::names::{split_paired_answer, strip_padding};
use sonda::real::{read_dyadic, real_from_dyadic};
use sonda::sets::{convex_hull, exact_hull_vertices, parse_exact_set, set_from_exact, set_query, HullOptions};
use sonda::{decode_dyadic, parse_expr, Dyadic, RealName};

fn d(s: &str) -> Dyadic {
    decode_dyadic(s).unwrap()
}

#[test]
fn closed_expressions_match_exact_values() {
    for (src, exact) in [("1/2 + 1/4", Dyadic::new(3, 2)), ("(3 - 5/8) * -2", Dyadic::new(-19, 2)), ("0.375*0.375", Dyadic::new(9, 6))] {
        let e = parse_expr(src).unwrap();
        assert_eq!(e.eval_exact(&[]), Some(exact.clone()));
        let x = e.real_name().unwrap();
        for n in [0u64, 3, 17, 40] {
            let a = read_dyadic(&x.name().query(&unary(n as usize)).unwrap()).unwrap();
            assert!((&a - &exact).abs() <= Dyadic::pow2(-(n as i64)), "{src} at {n}");
        }
    }
}

#[test]
fn apply_sin_to_a_third() {
    let f = parse_expr("sin(t)").unwrap().to_cfun(Domain::Unit).unwrap();
    let third = RealName::from_approx(1, 2, |i| Ok(Dyadic::new((num_bigint::BigInt::from(1) << (i + 2)) / 3, i + 2)));
    let y = apply(&f, &third).unwrap();
    for n in [4u64, 20, 40] {
        let v = y.approx(n).unwrap().to_f64();
        assert!((v - (1.0f64 / 3.0).sin()).abs() <= 2f64.powi(-(n.min(48) as i32)));
    }
}

#[test]
fn ivp_name_answers_through_query_strings() {
    let g = parse_expr("2*t").unwrap().to_lip(None).unwrap();
    let ivp = lip_ivp(&g).unwrap();
    let name = ivp.cfun().name().clone();
    for (n, t) in [(2u64, "+1/10"), (5, "+11/100"), (6, "+1/1")] {
        let raw = name.query(&format!("1{}", approx_query(n, &[d(t)]))).unwrap();
        let v = decode_dyadic(strip_padding(split_paired_answer(&raw).unwrap())).unwrap();
        let exact = &d(t) * &d(t);
        assert!((&v - &exact).abs() <= Dyadic::pow2(-(n as i64)), "t={t} n={n}: {v}");
        // the modulus side answers unary
        let m = name.query(&format!("0{}", unary(n as usize))).unwrap();
        assert!(split_paired_answer(&m).unwrap().bytes().all(|b| b == b'0'));
    }
}

#[test]
fn polygon_file_hull() {
    let text = "# a triangle\npolygon\n+0/1 +0/1\n+1/1 +0/1\n+0/1 +1/1\n";
    let set = parse_exact_set(text).unwrap();
    assert_eq!(exact_hull_vertices(&set).len(), 3);
    let s = set_from_exact(&set).unwrap();
    let h = convex_hull(&s, HullOptions::default());
    for n in 0..=4u64 {
        // inside the triangle, and far outside across the hypotenuse
        assert!(set_query(&s, &Dyadic::new(1, 2), &Dyadic::new(1, 2), n).unwrap());
        assert!(set_query(&h, &Dyadic::new(1, 3), &Dyadic::new(1, 2), n).unwrap());
        assert!(!set_query(&h, &Dyadic::one(), &Dyadic::one(), n.max(2)).unwrap());
    }
}

#[test]
fn reduction_agrees_with_direct_search() {
    let caps = Caps::default();
    let p = builtin_predicate("parity").unwrap();
    let direct = translate(&exist2_problem(caps), p.name()).unwrap();
    let reduced = translate(&exist2_via_qbf2(caps), p.name()).unwrap();
    for u in ["", "1", "01", "110"] {
        for n in 0..4 {
            let q = tuple_strings(&[u.to_string(), unary(n)]);
            assert_eq!(direct.query(&q).unwrap(), reduced.query(&q).unwrap());
            let want = exist2(&p, u, n, &caps).unwrap();
            assert_eq!(direct.query(&q).unwrap(), if want { "1" } else { "0" });
        }
    }
    let odd = builtin_predicate("xor").unwrap();
    assert!(sat2(&odd, "p(a1) & p(a2) & !p(a1, a2)", &caps).unwrap());
    assert!(!sat2(&p, "!p(a1) & !p(a2) & !p(a1, a2)", &caps).unwrap());
}

#[test]
fn metered_operators_stay_within_bounds() {
    let x = real_from_dyadic(&Dyadic::new(5, 3));
    let y = real_from_dyadic(&Dyadic::new(-7, 1));
    let f = parse_expr("3/4*t + 1/8").unwrap().to_cfun(Domain::Unit).unwrap();
    for n in [0u64, 8, 30] {
        for (op, oracle) in [("real_add", real_pair(&x, &y)), ("real_mul", real_pair(&x, &y)), ("apply", fun_real_pair(&f, &x))] {
            let out = find_op(op).unwrap().run(&oracle, n).unwrap();
            assert!(out.cost <= out.bound.unwrap(), "{op} at {n}");
            assert!(!out.trace.is_empty());
        }
    }
}
