mod common;

use anticomm::algebra::tuples;
use anticomm::{
    all_congruences, chain_between, eq_kernel, generated_congruence, generated_subalgebra, quotient,
    AlgebraRef, Congruence, FiniteAlgebra,
};
use common::{arc, oracle_congruences, oracle_generated, small_fixtures, arb_algebra};
use proptest::prelude::*;

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).collect()
}

/// Agreement with the oracle, a replaying trace and valid chains for every
/// related pair.
fn check_generated(a: &AlgebraRef, oracle_cons: &[Vec<usize>], pairs: &[(usize, usize)]) {
    let n = a.size();
    let theta = generated_congruence(a, pairs).unwrap();
    let expected = oracle_generated(oracle_cons, n, pairs);
    for x in 0..n {
        for y in 0..n {
            assert_eq!(theta.related(x, y), expected[x][y], "{} {pairs:?} ({x},{y})", a.name());
        }
    }
    let trace = theta.trace().unwrap();
    assert_eq!(trace.replay(a).unwrap(), theta.reps());
    for x in 0..n {
        for y in (0..n).filter(|&y| theta.related(x, y)) {
            let chain = chain_between(&theta, x, y).unwrap();
            assert_eq!(chain.elements.first(), Some(&x));
            assert_eq!(chain.elements.last(), Some(&y));
            assert_eq!(chain.validate(a, pairs), Ok(()), "{} {pairs:?} {x}->{y}", a.name());
        }
    }
}

#[test]
fn generated_congruence_matches_the_oracle_on_every_pair_set() {
    for a in small_fixtures().into_iter().filter(|a| a.size() <= 5) {
        let cons = oracle_congruences(&a);
        let candidates = all_pairs(a.size());
        for mask in 0u32..(1 << candidates.len()) {
            let pairs: Vec<_> = (0..candidates.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| candidates[i])
                .collect();
            check_generated(&a, &cons, &pairs);
        }
    }
}

#[test]
fn congruence_lattices_match_the_oracle() {
    for a in small_fixtures() {
        let mut expected: Vec<Vec<usize>> = oracle_congruences(&a)
            .into_iter()
            .map(|blocks| {
                (0..a.size())
                    .map(|e| (0..a.size()).find(|&f| blocks[f] == blocks[e]).unwrap())
                    .collect()
            })
            .collect();
        expected.sort();
        let mut got: Vec<Vec<usize>> =
            all_congruences(&a, 12).unwrap().iter().map(|c| c.reps().to_vec()).collect();
        got.sort();
        assert_eq!(got, expected, "{}", a.name());
    }
}

fn lattice_laws(cons: &[Congruence]) {
    for r in cons {
        for s in cons {
            let (j, m) = (r.join(s), r.meet(s));
            assert!(r.leq(&j) && s.leq(&j) && m.leq(r) && m.leq(s));
            for t in cons {
                if r.leq(t) && s.leq(t) {
                    assert!(j.leq(t));
                }
                if t.leq(r) && t.leq(s) {
                    assert!(t.leq(&m));
                }
            }
        }
    }
}

#[test]
fn joins_and_meets_are_bounds() {
    for a in small_fixtures() {
        lattice_laws(&all_congruences(&a, 12).unwrap());
    }
}

#[test]
fn quotients_have_the_congruence_as_kernel() {
    for a in small_fixtures().into_iter().filter(|a| a.size() <= 6) {
        for theta in all_congruences(&a, 12).unwrap() {
            let (q, proj) = quotient(&theta).unwrap();
            assert_eq!(q.size(), theta.num_classes());
            assert_eq!(eq_kernel(&proj), theta);
        }
    }
}

fn arb_pairs(n: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((0..n, 0..n), 0..4)
}

proptest! {
    #[test]
    fn random_algebras_agree_with_the_oracle(
        (a, pairs) in arb_algebra().prop_flat_map(|a| { let n = a.size(); (Just(a), arb_pairs(n)) })
    ) {
        let a = arc(a);
        let cons = oracle_congruences(&a);
        check_generated(&a, &cons, &pairs);
    }

    #[test]
    fn generation_is_monotone(
        (a, p, q) in arb_algebra().prop_flat_map(|a| {
            let n = a.size();
            (Just(a), arb_pairs(n), arb_pairs(n))
        })
    ) {
        let a = arc(a);
        let small = generated_congruence(&a, &p).unwrap();
        let both: Vec<_> = p.iter().chain(&q).copied().collect();
        let big = generated_congruence(&a, &both).unwrap();
        prop_assert!(small.leq(&big));
        // the generated congruence is idempotent: regenerating from its own
        // classes changes nothing
        let pairs: Vec<_> = (0..a.size()).map(|e| (small.rep(e), e)).collect();
        prop_assert_eq!(generated_congruence(&a, &pairs).unwrap(), small);
    }

    #[test]
    fn random_lattices_obey_the_laws(a in arb_algebra()) {
        lattice_laws(&all_congruences(&arc(a), 12).unwrap());
    }

    #[test]
    fn random_quotients_round_trip(
        (a, pairs) in arb_algebra().prop_flat_map(|a| { let n = a.size(); (Just(a), arb_pairs(n)) })
    ) {
        let a = arc(a);
        let theta = generated_congruence(&a, &pairs).unwrap();
        let (_, proj) = quotient(&theta).unwrap();
        prop_assert_eq!(eq_kernel(&proj), theta);
    }

    #[test]
    fn generated_subalgebras_are_closed_and_labelled(
        (a, gens) in arb_algebra().prop_flat_map(|a| {
            let n = a.size();
            (Just(a), prop::collection::vec(0..n, 1..3))
        })
    ) {
        let a: AlgebraRef = arc(a);
        let sub = generated_subalgebra(&a, &gens).unwrap();
        let image = sub.inclusion.image_set();
        // closed: every operation stays inside the image
        for s in 0..a.signature().len() {
            for t in tuples(image.len(), a.arity(s)) {
                let args: Vec<_> = t.iter().map(|&i| image[i]).collect();
                prop_assert!(image.contains(&a.apply(s, &args)));
            }
        }
        for (e, label) in sub.labels.iter().enumerate() {
            prop_assert_eq!(label.evaluate(&a, &sub.generators).unwrap(), sub.inclusion.apply(e));
        }
        // regenerating from the image gives the same subuniverse
        let again = generated_subalgebra(&a, &image).unwrap();
        prop_assert_eq!(again.inclusion.image_set(), image);
    }
}

#[test]
fn hand_computed_principal_congruences() {
    // Z2 × Z2: Cg(0, 1) identifies the second coordinate
    let v = arc(anticomm::fixtures::z2xz2());
    let theta = generated_congruence(&v, &[(0, 1)]).unwrap();
    assert_eq!(theta.classes(), vec![vec![0, 1], vec![2, 3]]);
    // in a pointed set any partition is a congruence, so Cg(a, b) is minimal
    let set = arc(FiniteAlgebra::from_named("S", 4, vec![("0", 0, vec![0])], Some("0")).unwrap());
    let theta = generated_congruence(&set, &[(1, 3)]).unwrap();
    assert_eq!(theta.classes(), vec![vec![0], vec![1, 3], vec![2]]);
}
