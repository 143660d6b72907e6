use proptest::prelude::*;

use fsw_core::dsl::{eval, eval_str, parse, BinOp, Environment, Expr, Func, Value};
use fsw_core::{BundleSymbol, Rational, Ring};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0i64..50).prop_map(Expr::num),
        (0i64..20, 1i64..9).prop_map(|(p, q)| Expr::Num(Rational::new(p.into(), q.into()))),
        prop::sample::select(vec!["U", "V", "x", "c", "rank", "a_1"]).prop_map(Expr::ident),
    ]
}

/// Grammar-shaped expressions up to depth 4.
fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 24, 3, |inner| {
        let op = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul)];
        let func = prop::sample::select(Func::ALL.to_vec());
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (op, inner.clone(), inner.clone()).prop_map(|(o, l, r)| Expr::binary(o, l, r)),
            (func, inner.clone(), inner).prop_map(|(f, a, b)| {
                let args = if f.arity() == 2 { vec![a, b] } else { vec![a] };
                Expr::call(f, args)
            }),
        ]
    })
}

fn random_env(seed: &[i64]) -> (Environment, Vec<&'static str>) {
    let ring = Ring::with_generators(
        &[
            ("a", 1),
            ("b", 1),
            ("c", 1),
            ("e1", 1),
            ("e2", 2),
            ("e3", 3),
        ],
        5,
    )
    .unwrap();
    let gen = |i: usize| ring.gen(["a", "b", "c"][i % 3]).unwrap();
    let lin = |k: usize| {
        let x = gen(k).scale(&fsw_core::rat(seed[k % seed.len()]));
        x.add(&gen(k + 1).scale(&fsw_core::rat(seed[(k + 1) % seed.len()])))
            .unwrap()
    };
    let mut env = Environment::new(ring.clone()).unwrap();
    let rank = 1 + seed[0].unsigned_abs() as usize % 4;
    let roots = (0..rank).map(lin).collect();
    env.bind_bundle("X", BundleSymbol::with_roots("X", roots).unwrap())
        .unwrap();
    let formal_rank = 1 + seed[1].unsigned_abs() as u32 % 3;
    env.bind_bundle(
        "Y",
        BundleSymbol::formal_from_generators("Y", &ring, "e", formal_rank).unwrap(),
    )
    .unwrap();
    (
        env,
        vec![
            "X",
            "Y",
            "X + Y",
            "X - 2*Y",
            "dual(X) - Y",
            "twist(X, a + b)",
        ],
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_parse_fixpoint(e in expr()) {
        prop_assert!(e.depth() <= 4);
        let once = parse(&e.to_string()).unwrap();
        let twice = parse(&once.to_string()).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(&once, &e);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chern_times_segre_is_one(seed in proptest::collection::vec(-3i64..=3, 4), d in 1i64..=5) {
        let (env, exprs) = random_env(&seed);
        for x in exprs {
            let text = format!("grade(c({x})*s({x}), {d})");
            let v = eval_str(&text, &env).unwrap();
            prop_assert_eq!(v, Value::Graded(env.ring().zero()), "{}", text);
        }
    }
}

#[test]
fn eval_of_parsed_equals_eval_of_printed() {
    let (env, _) = random_env(&[1, 2, -1, 3]);
    for text in [
        "rank(X) * 2 - rank(Y)",
        "grade(c(twist(X, a)) * s(dual(Y)), 2)",
        "-(a - b) * c + 1/3",
    ] {
        let e = parse(text).unwrap();
        assert_eq!(
            eval(&e, &env).unwrap(),
            eval(&parse(&e.to_string()).unwrap(), &env).unwrap()
        );
    }
}
