mod common;

use std::collections::BTreeSet;

use anticomm::algebra::tuples;
use anticomm::free::{has_jonsson_tarski_term, has_majority_term};
use anticomm::hom::find_isomorphism;
use anticomm::{enumerate_homs, fixtures, free_algebra, product, AlgebraRef, Limits};
use common::{arb_algebra, arc};
use proptest::prelude::*;

fn bases() -> Vec<AlgebraRef> {
    [fixtures::sl2(), fixtures::z2(), fixtures::ps2(), fixtures::maj2(), fixtures::l2()]
        .into_iter()
        .map(arc)
        .collect()
}

/// The number of `k`-ary term operations of `a`: close the projections of
/// `a^(a^k)` under the operations, combining each new operation with every
/// known one.
fn clone_size(a: &AlgebraRef, k: usize) -> usize {
    let points: Vec<Vec<usize>> = tuples(a.size(), k).collect();
    let mut known: Vec<Vec<usize>> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut queue: Vec<Vec<usize>> =
        (0..k).map(|j| points.iter().map(|p| p[j]).collect()).collect();
    // nullary operations
    for s in (0..a.signature().len()).filter(|&s| a.arity(s) == 0) {
        queue.push(vec![a.apply(s, &[]); points.len()]);
    }
    while let Some(op) = queue.pop() {
        if !seen.insert(op.clone()) {
            continue;
        }
        known.push(op);
        let newest = known.len() - 1;
        for s in (0..a.signature().len()).filter(|&s| a.arity(s) > 0) {
            for args in tuples(known.len(), a.arity(s)).filter(|t| t.contains(&newest)) {
                let v: Vec<usize> = (0..points.len())
                    .map(|i| {
                        let vals: Vec<usize> = args.iter().map(|&c| known[c][i]).collect();
                        a.apply(s, &vals)
                    })
                    .collect();
                if !seen.contains(&v) {
                    queue.push(v);
                }
            }
        }
    }
    known.len()
}

fn check_universal_property(basis: &[AlgebraRef], k: usize) {
    let f = free_algebra(basis, k, &Limits::default()).unwrap();
    for b in basis {
        let homs = enumerate_homs(&f.carrier, b).unwrap();
        for images in tuples(b.size(), k) {
            let h = f.extend(b, &images).unwrap();
            for (j, &g) in f.generators.iter().enumerate() {
                assert_eq!(h.apply(g), images[j]);
            }
            for e in 0..f.size() {
                assert_eq!(h.apply(e), f.label(e).evaluate(b, &images).unwrap());
            }
            let extending: Vec<_> = homs
                .iter()
                .filter(|g| f.generators.iter().enumerate().all(|(j, &x)| g.apply(x) == images[j]))
                .collect();
            assert_eq!(extending.len(), 1, "{} k={k} {images:?}", b.name());
            assert_eq!(extending[0].map(), h.map());
        }
    }
}

#[test]
fn free_algebras_are_free() {
    for a in bases() {
        for k in 1..=2 {
            check_universal_property(&[a.clone()], k);
            let f = free_algebra(&[a.clone()], k, &Limits::default()).unwrap();
            assert_eq!(f.size(), clone_size(&a, k), "{} k={k}", a.name());
        }
    }
}

#[test]
fn stated_sizes() {
    let size = |a, k| free_algebra(&[arc(a)], k, &Limits::default()).unwrap().size();
    assert_eq!(size(fixtures::z2(), 1), 2);
    assert_eq!(size(fixtures::ps2(), 2), 3);
    assert_eq!(size(fixtures::l2(), 1), 1);
}

#[test]
fn adding_products_to_the_basis_changes_nothing() {
    for a in bases() {
        let sq = product(&a, &a).unwrap().algebra;
        for k in 1..=2 {
            let one = free_algebra(&[a.clone()], k, &Limits::default()).unwrap();
            let two = free_algebra(&[a.clone(), sq.clone()], k, &Limits::default()).unwrap();
            assert!(find_isomorphism(&one.carrier, &two.carrier).unwrap().is_some(), "{}", a.name());
            // generators correspond
            let h = one.extend(&two.carrier, &two.generators).unwrap();
            assert!(h.is_bijective());
        }
    }
}

#[test]
fn term_scans_return_terms_that_evaluate_correctly() {
    let limits = Limits::default();
    for a in [fixtures::maj2(), fixtures::l2()] {
        let a = arc(a);
        let m = has_majority_term(&[a.clone()], &limits).unwrap().unwrap();
        for t in tuples(a.size(), 2) {
            let (x, y) = (t[0], t[1]);
            for args in [[x, x, y], [x, y, x], [y, x, x]] {
                assert_eq!(m.evaluate(&a, &args).unwrap(), x, "{m}");
            }
        }
    }
    for a in [fixtures::z2(), fixtures::sl2(), fixtures::ps2()] {
        assert!(has_majority_term(&[arc(a)], &limits).unwrap().is_none());
    }
    let z2 = arc(fixtures::z2());
    let t = has_jonsson_tarski_term(&[z2.clone()], &limits).unwrap().unwrap();
    for x in 0..2 {
        assert_eq!(t.evaluate(&z2, &[x, 0]).unwrap(), x);
        assert_eq!(t.evaluate(&z2, &[0, x]).unwrap(), x);
    }
    for a in [fixtures::sl2(), fixtures::ps2(), fixtures::maj2()] {
        assert!(has_jonsson_tarski_term(&[arc(a)], &limits).unwrap().is_none());
    }
}

#[test]
fn caps_are_enforced() {
    let limits = Limits { max_free_size: 2, ..Limits::default() };
    assert!(matches!(
        free_algebra(&[arc(fixtures::sl2())], 2, &limits),
        Err(anticomm::Error::CapExceeded { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_free_algebras_match_the_clone_and_are_free(
        a in arb_algebra().prop_filter("small", |a| a.size() <= 3)
    ) {
        let a = arc(a);
        let limits = Limits::default();
        let f = free_algebra(&[a.clone()], 1, &limits).unwrap();
        prop_assert_eq!(f.size(), clone_size(&a, 1));
        check_universal_property(&[a.clone()], 1);
        if a.size() == 2 {
            let f2 = free_algebra(&[a.clone()], 2, &limits).unwrap();
            prop_assert_eq!(f2.size(), clone_size(&a, 2));
        }
    }
}
