use proptest::prelude::*;

use fsw_core::adgraph::{
    codim, e_class, effective_coeffs, enumerate_admissible, pair, partial_gt, AdmissibleGraph,
    ExcClass, PairingContext,
};
use fsw_core::sweep::{interpolation_sweep, Execution};

/// Brute-force parent assignments `p(j) ∈ {none} ∪ {1..n}`, keeping those
/// with `p(j) < j`.
fn brute_force_count(n: usize) -> usize {
    let mut count = 0;
    let total = (n + 1).pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let mut ok = true;
        for j in 1..=n {
            let p = c % (n + 1);
            c /= n + 1;
            if p != 0 && p >= j {
                ok = false;
            }
        }
        if ok {
            count += 1;
        }
    }
    count
}

#[test]
fn enumeration_matches_brute_force() {
    for n in 1..=6 {
        let graphs = enumerate_admissible(n).unwrap();
        assert_eq!(graphs.len(), brute_force_count(n), "n = {n}");
        let mut sorted = graphs.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), graphs.len());
    }
    assert_eq!(brute_force_count(3), 6);
}

#[test]
fn codim_cross_check_up_to_six() {
    for n in 1..=6 {
        for g in enumerate_admissible(n).unwrap() {
            assert_eq!(codim(&g).unwrap(), g.edge_count());
        }
    }
}

#[test]
fn gt_is_a_strict_partial_order() {
    for n in 1..=5 {
        let graphs = enumerate_admissible(n).unwrap();
        let len = graphs.len();
        let gt: Vec<Vec<bool>> = graphs
            .iter()
            .map(|a| graphs.iter().map(|b| partial_gt(a, b)).collect())
            .collect();
        for i in 0..len {
            assert!(!gt[i][i]);
            for j in 0..len {
                if !gt[i][j] {
                    continue;
                }
                assert!(!gt[j][i], "antisymmetry {} {}", graphs[i], graphs[j]);
                for k in 0..len {
                    if gt[j][k] {
                        assert!(
                            gt[i][k],
                            "transitivity {} > {} > {}",
                            graphs[i], graphs[j], graphs[k]
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn interpolation_small_scale() {
    for n in 1..=4 {
        let s = interpolation_sweep(n, 3, Execution::Sequential).unwrap();
        assert!(s.failures.is_empty(), "{:?}", s.failures.first());
    }
}

fn exhaustive_effective(x: &ExcClass, g: &AdmissibleGraph) -> Option<Vec<i64>> {
    let n = g.n();
    let bound = x.coeffs.iter().map(|v| v.abs()).max().unwrap_or(0) * n as i64;
    let es: Vec<ExcClass> = (1..=n).map(|i| e_class(g, i).unwrap()).collect();
    let mut c = vec![0i64; n];
    loop {
        let sum = es
            .iter()
            .zip(&c)
            .fold(ExcClass::zero(n), |acc, (e, k)| acc.add(&e.scale(*k)));
        if sum == *x {
            return Some(c);
        }
        let mut i = 0;
        loop {
            if i == n {
                return None;
            }
            c[i] += 1;
            if c[i] <= bound {
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}

fn graph(max_n: usize) -> impl Strategy<Value = AdmissibleGraph> {
    (1..=max_n)
        .prop_flat_map(|n| proptest::collection::vec(any::<prop::sample::Index>(), n))
        .prop_map(|picks| {
            let parents = picks
                .iter()
                .enumerate()
                .map(|(j, ix)| {
                    let choice = ix.index(j + 1);
                    (choice > 0).then_some(choice)
                })
                .collect();
            AdmissibleGraph::from_parents(parents).unwrap()
        })
}

proptest! {
    #[test]
    fn effective_coeffs_is_exact(g in graph(4), raw in proptest::collection::vec(-2i64..=2, 4)) {
        let x = ExcClass { coeffs: raw[..g.n()].to_vec(), c_coeff: 0 };
        let solved = effective_coeffs(&x, &g);
        if let Some(c) = &solved {
            let rebuilt = (1..=g.n()).fold(ExcClass::zero(g.n()), |acc, j| {
                acc.add(&e_class(&g, j).unwrap().scale(c[j - 1]))
            });
            prop_assert_eq!(&rebuilt, &x);
        }
        prop_assert_eq!(solved, exhaustive_effective(&x, &g));
    }

    #[test]
    fn curve_pairing_closed_form(g in graph(6), m in proptest::collection::vec(1i64..=4, 6)) {
        let m = m[..g.n()].to_vec();
        let ctx = PairingContext::from_multiplicities(m.clone()).unwrap();
        let curve = ExcClass::curve_minus(&m);
        for i in 1..=g.n() {
            let e = e_class(&g, i).unwrap();
            let closed = m[i - 1] - g.children(i).iter().map(|&c| m[c - 1]).sum::<i64>();
            prop_assert_eq!(pair(&curve, &e, &ctx), closed);
            prop_assert_eq!(pair(&e, &e, &ctx), -1 - g.children(i).len() as i64);
        }
    }
}
