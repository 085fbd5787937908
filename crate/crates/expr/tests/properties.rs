use ambient_expr::{parse, Expr, Rational64, Scalar};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-4i64..5).prop_map(Expr::int),
        (1i64..4, 2i64..5).prop_map(|(n, d)| Expr::rational(n, d)),
        Just(Expr::var("x")),
        Just(Expr::var("y")),
        Just(Expr::func("I", "x", 0)),
        Just(Expr::func("I", "x", 1)),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a + &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a - &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a * &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| if b.is_zero() { a } else { &a / &b }),
            (inner, 1i64..3).prop_map(|(a, k)| a.pow_i(k)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_commutes(a in expr(), b in expr()) {
        prop_assert!((&(&a + &b) - &(&b + &a)).is_zero());
    }

    #[test]
    fn multiplication_distributes(a in expr(), b in expr(), c in expr()) {
        let l = &a * &(&b + &c);
        let r = &(&a * &b) + &(&a * &c);
        prop_assert!(l.equals(&r));
    }

    #[test]
    fn inverse_cancels(a in expr()) {
        prop_assume!(!a.is_zero());
        prop_assert!((&(&a * &(&Expr::one() / &a)) - &Expr::one()).is_zero());
    }

    #[test]
    fn mixed_partials_commute(a in expr()) {
        let xy = a.diff("x").diff("y");
        let yx = a.diff("y").diff("x");
        prop_assert!(xy.equals(&yx));
    }

    #[test]
    fn product_rule(a in expr(), b in expr()) {
        let l = (&a * &b).diff("x");
        let r = &(&a.diff("x") * &b) + &(&a * &b.diff("x"));
        prop_assert!(l.equals(&r));
    }

    #[test]
    fn print_parse_round_trip(a in expr()) {
        let ctx = ambient_expr::ParseContext::new().coords(["x", "y"]).func("I", "x");
        let back = ctx.parse(&a.to_string()).unwrap();
        prop_assert!((&back - &a).is_zero(), "{} reparsed as {}", a, back);
    }

    #[test]
    fn scalar_radicals_agree_with_floats(a in -6i64..7, b in 1i64..13, c in -6i64..7, d in 1i64..13, n in -5i64..6) {
        let s = &(&Scalar::prime_power(2, Rational64::new(a, b)) * &Scalar::prime_power(3, Rational64::new(c, d)))
            + &Scalar::from_int(n);
        let f = 2f64.powf(a as f64 / b as f64) * 3f64.powf(c as f64 / d as f64) + n as f64;
        prop_assert!((s.to_f64() - f).abs() <= 1e-12 * f.abs().max(1.0));
    }
}

#[test]
fn sqrt2_times_sqrt3_is_sqrt6() {
    let half = Rational64::new(1, 2);
    let a = &Scalar::prime_power(2, half) * &Scalar::prime_power(3, half);
    let b = parse("2^(1/2)*3^(1/2)").unwrap().as_scalar().unwrap();
    assert_eq!(a, b);
    assert_eq!(&a * &a, Scalar::from_int(6));
}

#[test]
fn sqrt2_squared_minus_two() {
    let r = Expr::scalar(Scalar::sqrt2());
    assert!((&r.pow_i(2) - &Expr::int(2)).is_zero());
}

#[test]
fn exp_cancellation() {
    let e = parse("exp(y)*exp(-y) - 1").unwrap();
    assert!(e.is_zero());
    let f = parse("exp(-2*y)*exp(y)^2").unwrap();
    assert!(f.is_one());
}

#[test]
fn ode_rule_differentiation() {
    let s = Expr::func("s", "x", 0);
    let i = Expr::func("I", "x", 0);
    let rules = ambient_expr::RuleSet::new().with("s", "x", 2, &(&Expr::rational(1, 3) * &i) * &s);
    let d = rules.diff(&Expr::func("s", "x", 1), "x");
    assert!(d.equals(&(&(&Expr::rational(1, 3) * &i) * &s)));
}

#[test]
fn antiderivative_atom() {
    let ctx = ambient_expr::ParseContext::new().coords(["q"]).func("F", "q");
    let integrand = ctx.parse("F''*F").unwrap();
    let ctx = ctx.integral("J", "q", integrand.clone());
    let j = ctx.parse("J").unwrap();
    assert!(j.diff("q").equals(&integrand));
}

#[test]
fn parses_monge_function() {
    let ctx = ambient_expr::ParseContext::new().coords(["x", "y", "p", "q", "z"]).func("I", "x");
    let f = ctx.parse("-(1/2)*(q^2 + (10/3)*I*p^2 + (1 + I^2 - I'')*y^2)").unwrap();
    let q = Expr::var("q");
    assert!(f.diff("q").equals(&-q));
    let c = parse("2^(-5/6)*3^(-1/3)").unwrap().as_scalar().unwrap();
    assert!((c.to_f64() - 2f64.powf(-5.0 / 6.0) * 3f64.powf(-1.0 / 3.0)).abs() < 1e-14);
}
