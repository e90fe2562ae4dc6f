//! Brute-force oracles shared by the integration tests. They deliberately
//! avoid the library's own algorithms: partitions are enumerated as
//! restricted growth strings and compatibility is checked tuple by tuple.
#![allow(dead_code)]

use std::sync::Arc;

use anticomm::algebra::tuples;
use anticomm::{fixtures, AlgebraRef, FiniteAlgebra, Homomorphism};
use proptest::prelude::*;

pub fn arc(a: FiniteAlgebra) -> AlgebraRef {
    Arc::new(a)
}

/// `MAJ2 × MAJ2`, built by hand rather than through `product`.
pub fn maj2xmaj2() -> FiniteAlgebra {
    let maj = |a: usize, b: usize, c: usize| usize::from(a + b + c >= 2);
    let table = tuples(4, 3)
        .map(|t| 2 * maj(t[0] >> 1, t[1] >> 1, t[2] >> 1) + maj(t[0] & 1, t[1] & 1, t[2] & 1))
        .collect();
    FiniteAlgebra::from_named("MAJ2xMAJ2", 4, vec![("maj", 3, table), ("0", 0, vec![0])], Some("0"))
        .unwrap()
}

/// Every fixture algebra, including the hand-built ones.
pub fn small_fixtures() -> Vec<AlgebraRef> {
    let mut v: Vec<AlgebraRef> = fixtures::all().into_iter().map(arc).collect();
    v.push(arc(maj2xmaj2()));
    v
}

/// Every partition of `0..n`, as block labels in restricted growth form.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur.push(b);
            go(i + 1, n, cur, max.max(b), out);
            cur.pop();
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut cur = vec![0];
    go(1, n, &mut cur, 0, &mut out);
    out
}

/// Whether the partition is preserved by every operation, changing one
/// argument at a time.
pub fn compatible(a: &FiniteAlgebra, blocks: &[usize]) -> bool {
    let n = a.size();
    for s in 0..a.signature().len() {
        let k = a.arity(s);
        for t in tuples(n, k) {
            let base = blocks[a.apply(s, &t)];
            for i in 0..k {
                for b in (0..n).filter(|&b| blocks[b] == blocks[t[i]]) {
                    let mut u = t.clone();
                    u[i] = b;
                    if blocks[a.apply(s, &u)] != base {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// All congruences, as restricted-growth block labels.
pub fn oracle_congruences(a: &FiniteAlgebra) -> Vec<Vec<usize>> {
    partitions(a.size()).into_iter().filter(|p| compatible(a, p)).collect()
}

/// The intersection of every congruence containing `pairs`.
pub fn oracle_generated(cons: &[Vec<usize>], n: usize, pairs: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut rel = vec![vec![true; n]; n];
    for c in cons.iter().filter(|c| pairs.iter().all(|&(x, y)| c[x] == c[y])) {
        for x in 0..n {
            for y in 0..n {
                rel[x][y] &= c[x] == c[y];
            }
        }
    }
    rel
}

/// Random algebras of size 2..=5 with one or two operations of arity ≤ 2.
pub fn arb_algebra() -> impl Strategy<Value = FiniteAlgebra> {
    (2usize..=5)
        .prop_flat_map(|n| {
            let op = |k: u32| prop::collection::vec(0..n, n.pow(k));
            (Just(n), op(2), prop::option::of(op(1)))
        })
        .prop_map(|(n, bin, un)| {
            let mut ops = vec![("f", 2, bin)];
            if let Some(un) = un {
                ops.push(("g", 1, un));
            }
            FiniteAlgebra::from_named("R", n, ops, None).unwrap()
        })
}

/// Every homomorphism between fixtures of at most `max` elements, paired
/// by common codomain.
pub fn hom_pairs(max: usize, pointed: bool) -> Vec<(Homomorphism, Homomorphism)> {
    let algs: Vec<AlgebraRef> = small_fixtures()
        .into_iter()
        .filter(|a| a.size() <= max && (!pointed || a.signature().is_pointed()))
        .collect();
    let mut pairs = Vec::new();
    for x in &algs {
        let into: Vec<Homomorphism> = algs
            .iter()
            .filter(|a| a.same_signature(x).is_ok())
            .flat_map(|a| anticomm::enumerate_homs(a, x).unwrap())
            .collect();
        for f in &into {
            for g in &into {
                pairs.push((f.clone(), g.clone()));
            }
        }
    }
    pairs
}
