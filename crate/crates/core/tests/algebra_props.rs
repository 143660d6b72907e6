use proptest::prelude::*;

use fsw_core::kcalc::{k_equal, sym_power};
use fsw_core::{BundleSymbol, GradedClass, KClass, Rational, Ring, Twist};

const D: u32 = 4;

fn ring() -> Ring {
    Ring::with_generators(&[("x", 1), ("y", 1), ("z", 2)], D).unwrap()
}

fn wide_ring() -> Ring {
    Ring::with_generators(&[("x", 1), ("y", 1), ("z", 2)], D + 2).unwrap()
}

fn monomials(max_degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for c in 0..=max_degree / 2 {
        for a in 0..=max_degree - 2 * c {
            for b in 0..=max_degree - 2 * c - a {
                out.push(vec![a, b, c]);
            }
        }
    }
    out
}

prop_compose! {
    fn coeff()(num in -4i64..=4, den in 1i64..=3) -> Rational {
        Rational::new(num.into(), den.into())
    }
}

/// Raw terms up to degree `D + 2`; interpreted in either ring.
fn raw_terms() -> impl Strategy<Value = Vec<(Vec<u32>, Rational)>> {
    let mons = monomials(D + 2);
    proptest::collection::vec((proptest::sample::select(mons), coeff()), 0..8)
}

fn class(ring: &Ring, terms: &[(Vec<u32>, Rational)]) -> GradedClass {
    GradedClass::from_terms(ring, terms.to_vec()).unwrap()
}

fn homogeneous(ring: &Ring, degree: u32, coeffs: &[Rational]) -> GradedClass {
    let terms: Vec<_> = monomials(degree)
        .into_iter()
        .filter(|m| m[0] + m[1] + 2 * m[2] == degree)
        .zip(coeffs.iter().cycle())
        .map(|(m, q)| (m, q.clone()))
        .collect();
    GradedClass::from_terms(ring, terms).unwrap()
}

/// (root-modelled, rank, coefficient pool, dualized)
type SymbolSpec = (bool, u32, Vec<Rational>, bool);
/// (symbol, multiplicity, twist coefficients)
type TermSpec = (SymbolSpec, i64, Option<Vec<Rational>>);

fn symbol() -> impl Strategy<Value = SymbolSpec> {
    (
        any::<bool>(),
        1u32..=4,
        proptest::collection::vec(coeff(), 1..6),
        any::<bool>(),
    )
}

fn build_symbol(ring: &Ring, (roots, rank, coeffs, dual): &SymbolSpec, name: &str) -> BundleSymbol {
    let sym = if *roots {
        let rs = (0..*rank)
            .map(|i| homogeneous(ring, 1, &coeffs[i as usize % coeffs.len()..]))
            .collect();
        BundleSymbol::with_roots(name, rs).unwrap()
    } else {
        let cs = (1..=*rank)
            .map(|i| homogeneous(ring, i, &coeffs[(i as usize) % coeffs.len()..]))
            .collect();
        BundleSymbol::formal(name, cs).unwrap()
    };
    if *dual {
        sym.dual()
    } else {
        sym
    }
}

fn kclass() -> impl Strategy<Value = Vec<TermSpec>> {
    proptest::collection::vec(
        (
            symbol(),
            prop_oneof![Just(-2i64), Just(-1), Just(1), Just(2)],
            proptest::option::of(proptest::collection::vec(coeff(), 1..3)),
        ),
        1..4,
    )
}

fn build_k(ring: &Ring, spec: &[TermSpec]) -> KClass {
    spec.iter()
        .enumerate()
        .fold(KClass::zero(), |acc, (i, (s, mult, tw))| {
            let sym = build_symbol(ring, s, &format!("E{i}"));
            let twist = match tw {
                Some(c) => Twist::line(format!("L{i}"), homogeneous(ring, 1, c)).unwrap(),
                None => Twist::trivial(),
            };
            acc.add(&KClass::from_term(sym, twist, *mult))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_commutative_and_associative(a in raw_terms(), b in raw_terms(), c in raw_terms()) {
        let r = ring();
        let (a, b, c) = (class(&r, &a), class(&r, &b), class(&r, &c));
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
    }

    #[test]
    fn grades_sum_to_class(a in raw_terms()) {
        let r = ring();
        let a = class(&r, &a);
        let mut sum = r.zero();
        for d in 0..=i64::from(D) {
            sum = sum.add(&a.grade(d).unwrap()).unwrap();
        }
        prop_assert_eq!(sum, a);
    }

    #[test]
    fn units_invert_exactly(a in raw_terms()) {
        let r = ring();
        let a = class(&r, &a);
        let unit = a.sub(&r.constant(a.constant_term())).unwrap().add(&r.one()).unwrap();
        let inv = unit.invert_unit().unwrap();
        prop_assert!(unit.mul(&inv).unwrap().is_one());
    }

    #[test]
    fn truncation_is_an_ideal(a in raw_terms(), b in raw_terms()) {
        let (small, wide) = (ring(), wide_ring());
        let narrow_product = class(&small, &a).mul(&class(&small, &b)).unwrap();
        let wide_product = class(&wide, &a).mul(&class(&wide, &b)).unwrap();
        for d in 0..=i64::from(D) {
            let lhs: Vec<_> = narrow_product.grade(d).unwrap().terms().map(|(e, q)| (e.to_vec(), q.clone())).collect();
            let rhs: Vec<_> = wide_product.grade(d).unwrap().terms().map(|(e, q)| (e.to_vec(), q.clone())).collect();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn chern_is_a_homomorphism(k1 in kclass(), k2 in kclass()) {
        let r = ring();
        let (a, b) = (build_k(&r, &k1), build_k(&r, &k2));
        let sum = a.add(&b);
        prop_assert_eq!(sum.rank(), a.rank() + b.rank());
        prop_assert_eq!(
            sum.total_chern(&r).unwrap(),
            a.total_chern(&r).unwrap().mul(&b.total_chern(&r).unwrap()).unwrap()
        );
        prop_assert!(a.total_chern(&r).unwrap().mul(&a.total_segre(&r).unwrap()).unwrap().is_one());
        prop_assert!(k_equal(&a.dual().dual(), &a));
    }

    #[test]
    fn honest_bundles_have_no_chern_above_rank(rank in 1u32..=3, coeffs in proptest::collection::vec(coeff(), 1..6)) {
        let r = ring();
        let sym = build_symbol(&r, &(true, rank, coeffs, false), "E");
        let c = KClass::from_symbol(sym).total_chern(&r).unwrap();
        for j in i64::from(rank) + 1..=i64::from(D) {
            prop_assert!(c.grade(j).unwrap().is_zero());
        }
    }

    #[test]
    fn sym_power_rank_law(d in 0u32..=6, roots in any::<bool>()) {
        let r = Ring::with_generators(&[("a", 1), ("b", 1), ("c1", 1), ("c2", 2)], 3).unwrap();
        let u = if roots {
            BundleSymbol::with_roots("U", vec![r.gen("a").unwrap(), r.gen("b").unwrap()]).unwrap()
        } else {
            BundleSymbol::formal_from_generators("U", &r, "c", 2).unwrap()
        };
        let s = sym_power(&u, d).unwrap();
        prop_assert_eq!(s.rank(), i64::from(d) + 1);
    }
}
