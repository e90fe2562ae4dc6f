//! Free algebras of finitely generated varieties, realized inside products
//! of subpowers, and scans for majority and Jónsson–Tarski terms.

use std::sync::Arc;

use crate::algebra::{table_len, AlgebraRef, FiniteAlgebra};
use crate::closure::{self, Derivation};
use crate::error::{Error, Result};
use crate::hom::Homomorphism;
use crate::term::Term;
use crate::Elem;

/// Size caps shared by the decision procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest free-algebra carrier generated before giving up.
    pub max_free_size: usize,
    /// Largest algebra whose full congruence lattice is enumerated.
    pub max_con_size: usize,
}

pub const DEFAULT_MAX_FREE_SIZE: usize = 20_000;

/// Longest coordinate vector (sum of `|A_i|^rank`).
const MAX_COORDINATES: usize = 1 << 16;

/// Largest total operation-table size materialized for a free algebra.
const MAX_TABLE_ENTRIES: usize = 1 << 26;

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_free_size: DEFAULT_MAX_FREE_SIZE,
            max_con_size: crate::congruence::DEFAULT_MAX_CON_SIZE,
        }
    }
}

/// The free algebra on `rank` generators in the variety generated by
/// `basis`.
///
/// An element is its graph on the basis: for each basis algebra `A` and each
/// assignment `A^rank`, the value of the element's term. Generator `j` is the
/// `j`-th projection.
#[derive(Debug, Clone)]
pub struct FreeAlgebra {
    pub carrier: AlgebraRef,
    /// Element of each generator; they coincide only in trivial varieties.
    pub generators: Vec<Elem>,
    basis: Vec<AlgebraRef>,
    rank: usize,
    derivations: Vec<Derivation>,
    coords: Vec<Vec<Elem>>,
    offsets: Vec<usize>,
}

fn check_basis(basis: &[AlgebraRef]) -> Result<()> {
    let first = basis.first().ok_or(Error::EmptyUniverse)?;
    basis.iter().try_for_each(|b| first.same_signature(b))
}

/// `Π |A_i|^(|A_i|^rank)`, as text.
fn size_bound(basis: &[AlgebraRef], rank: usize) -> String {
    basis
        .iter()
        .map(|a| format!("{}^({}^{})", a.size(), a.size(), rank))
        .collect::<Vec<_>>()
        .join("·")
}

pub fn free_algebra(basis: &[AlgebraRef], rank: usize, limits: &Limits) -> Result<FreeAlgebra> {
    check_basis(basis)?;
    let cap_error = || Error::CapExceeded {
        what: format!("free algebra on {rank} generators"),
        cap: limits.max_free_size,
        bound: size_bound(basis, rank),
    };
    let mut offsets = Vec::with_capacity(basis.len() + 1);
    let mut len = 0usize;
    for a in basis {
        offsets.push(len);
        len = table_len(a.size(), rank)
            .and_then(|l| len.checked_add(l))
            .filter(|&l| l <= MAX_COORDINATES)
            .ok_or_else(cap_error)?;
    }
    offsets.push(len);

    let generators: Vec<Vec<Elem>> = (0..rank)
        .map(|j| {
            basis
                .iter()
                .flat_map(|a| crate::algebra::tuples(a.size(), rank).map(move |t| t[j]))
                .collect()
        })
        .collect();
    let sig = basis[0].signature().clone();
    let mut scratch = Vec::new();
    let c = closure::close(
        &sig,
        generators,
        |s, args: &[&Vec<Elem>]| {
            let mut out = Vec::with_capacity(len);
            for (i, a) in basis.iter().enumerate() {
                for coord in offsets[i]..offsets[i + 1] {
                    scratch.clear();
                    scratch.extend(args.iter().map(|v| v[coord]));
                    out.push(a.apply(s, &scratch));
                }
            }
            out
        },
        limits.max_free_size,
    )
    .map_err(|_| cap_error())?;

    let n = c.elements.len();
    if n == 0 {
        return Err(Error::EmptyUniverse);
    }
    let entries: usize = sig
        .symbols()
        .iter()
        .map(|s| table_len(n, s.arity).unwrap_or(usize::MAX))
        .fold(0usize, |acc, x| acc.saturating_add(x));
    if entries > MAX_TABLE_ENTRIES {
        return Err(Error::CapExceeded {
            what: format!("operation tables of the free algebra on {rank} generators"),
            cap: MAX_TABLE_ENTRIES,
            bound: format!("{entries} entries"),
        });
    }
    let names: Vec<String> = (1..=rank).map(|i| format!("x{i}")).collect();
    let carrier = FiniteAlgebra::from_fn(
        format!("F({})", names.join(",")),
        n,
        sig.clone(),
        |s, args| {
            let mut out = Vec::with_capacity(len);
            for (i, a) in basis.iter().enumerate() {
                for coord in offsets[i]..offsets[i + 1] {
                    scratch.clear();
                    scratch.extend(args.iter().map(|&e| c.elements[e][coord]));
                    out.push(a.apply(s, &scratch));
                }
            }
            c.index[&out]
        },
    )?;
    Ok(FreeAlgebra {
        carrier: Arc::new(carrier),
        generators: c.generators,
        basis: basis.to_vec(),
        rank,
        derivations: c.derivations,
        coords: c.elements,
        offsets,
    })
}

impl FreeAlgebra {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn basis(&self) -> &[AlgebraRef] {
        &self.basis
    }

    pub fn size(&self) -> usize {
        self.carrier.size()
    }

    /// The breadth-first term naming `e`, over `x1..x{rank}`.
    pub fn label(&self, e: Elem) -> Term {
        closure::label(self.carrier.signature(), &self.derivations, e)
    }

    pub fn labels(&self) -> Vec<Term> {
        (0..self.size()).map(|e| self.label(e)).collect()
    }

    /// The values of `e` on basis algebra `i`, one per assignment in
    /// row-major order.
    pub fn coordinates(&self, e: Elem, i: usize) -> &[Elem] {
        &self.coords[e][self.offsets[i]..self.offsets[i + 1]]
    }

    /// The homomorphism sending generator `j` to `images[j]`, computed by
    /// evaluating labels in `target`.
    pub fn extend(&self, target: &AlgebraRef, images: &[Elem]) -> Result<Homomorphism> {
        self.carrier.same_signature(target)?;
        if images.len() != self.rank {
            return Err(Error::SizeMismatch {
                expected: self.rank,
                found: images.len(),
            });
        }
        for &v in images {
            target.check_element(v)?;
        }
        let map = closure::evaluate(
            &self.derivations,
            |j| images[j],
            |s, args| target.apply(s, args),
        );
        Homomorphism::new(self.carrier.clone(), target.clone(), map)
    }
}

/// Scans `F(x, y, z)` for `m` with `m(a,a,b) = m(a,b,a) = m(b,a,a) = a`
/// on every basis algebra; returns the first in element order.
pub fn has_majority_term(basis: &[AlgebraRef], limits: &Limits) -> Result<Option<Term>> {
    let f = free_algebra(basis, 3, limits)?;
    let found = (0..f.size()).find(|&e| {
        f.basis.iter().enumerate().all(|(i, alg)| {
            let n = alg.size();
            let v = f.coordinates(e, i);
            let at = |x: Elem, y: Elem, z: Elem| v[(x * n + y) * n + z];
            (0..n).all(|a| (0..n).all(|b| at(a, a, b) == a && at(a, b, a) == a && at(b, a, a) == a))
        })
    });
    Ok(found.map(|e| f.label(e)))
}

/// Scans `F(x, y)` for `t` with `t(a, 0) = a = t(0, a)` on every basis
/// algebra.
pub fn has_jonsson_tarski_term(basis: &[AlgebraRef], limits: &Limits) -> Result<Option<Term>> {
    check_basis(basis)?;
    let zeros = basis
        .iter()
        .map(|a| a.require_zero())
        .collect::<Result<Vec<_>>>()?;
    let f = free_algebra(basis, 2, limits)?;
    let found = (0..f.size()).find(|&e| {
        f.basis.iter().enumerate().all(|(i, alg)| {
            let n = alg.size();
            let z = zeros[i];
            let v = f.coordinates(e, i);
            (0..n).all(|a| v[a * n + z] == a && v[z * n + a] == a)
        })
    });
    Ok(found.map(|e| f.label(e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn arc(a: FiniteAlgebra) -> AlgebraRef {
        Arc::new(a)
    }

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn small_free_algebras() {
        let z2 = free_algebra(&[arc(fixtures::z2())], 1, &limits()).unwrap();
        assert_eq!(z2.size(), 2);
        let ps2 = free_algebra(&[arc(fixtures::ps2())], 2, &limits()).unwrap();
        assert_eq!(ps2.size(), 3);
        let l2 = free_algebra(&[arc(fixtures::l2())], 1, &limits()).unwrap();
        assert_eq!(l2.size(), 1);
        // free distributive lattice on three generators
        let l2_3 = free_algebra(&[arc(fixtures::l2())], 3, &limits()).unwrap();
        assert_eq!(l2_3.size(), 18);
    }

    #[test]
    fn generators_are_labelled_by_variables() {
        let f = free_algebra(&[arc(fixtures::sl2())], 2, &limits()).unwrap();
        assert_eq!(f.label(f.generators[0]), Term::var(0));
        assert_eq!(f.label(f.generators[1]), Term::var(1));
        for (e, t) in f.labels().iter().enumerate() {
            assert_eq!(t.evaluate(&f.carrier, &f.generators).unwrap(), e);
        }
    }

    #[test]
    fn cap_overflow_reports_the_bound() {
        let tight = Limits {
            max_free_size: 3,
            ..Limits::default()
        };
        let err = free_algebra(&[arc(fixtures::l2())], 3, &tight).unwrap_err();
        match err {
            Error::CapExceeded { cap, bound, .. } => {
                assert_eq!(cap, 3);
                assert_eq!(bound, "2^(2^3)");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn extension_along_generators() {
        let z2 = arc(fixtures::z2());
        let f = free_algebra(&[z2.clone()], 2, &limits()).unwrap();
        let h = f.extend(&z2, &[1, 1]).unwrap();
        assert_eq!(h.apply(f.generators[0]), 1);
        assert!(f.extend(&z2, &[1]).is_err());
    }

    #[test]
    fn majority_terms() {
        let maj = has_majority_term(&[arc(fixtures::maj2())], &limits()).unwrap();
        assert_eq!(maj.unwrap().to_string(), "maj(x1, x2, x3)");
        assert_eq!(has_majority_term(&[arc(fixtures::z2())], &limits()).unwrap(), None);
        let l2 = arc(fixtures::l2());
        let median = has_majority_term(&[l2.clone()], &limits()).unwrap().unwrap();
        for t in crate::algebra::tuples(2, 2) {
            let (a, b) = (t[0], t[1]);
            assert_eq!(median.evaluate(&l2, &[a, a, b]).unwrap(), a);
            assert_eq!(median.evaluate(&l2, &[a, b, a]).unwrap(), a);
            assert_eq!(median.evaluate(&l2, &[b, a, a]).unwrap(), a);
        }
    }

    #[test]
    fn jonsson_tarski_terms() {
        let z2 = has_jonsson_tarski_term(&[arc(fixtures::z2())], &limits()).unwrap();
        assert_eq!(z2.unwrap().to_string(), "plus(x1, x2)");
        assert_eq!(has_jonsson_tarski_term(&[arc(fixtures::sl2())], &limits()).unwrap(), None);
        assert_eq!(has_jonsson_tarski_term(&[arc(fixtures::ps2())], &limits()).unwrap(), None);
        assert!(matches!(
            has_jonsson_tarski_term(&[arc(fixtures::l2())], &limits()),
            Err(Error::NotPointed(_))
        ));
    }
}
