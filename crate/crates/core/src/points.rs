//! Split points over a base algebra: fibre products, the local coequalizer
//! criterion, partial Mal'tsev operations and internal groupoids.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraRef, FiniteAlgebra};
use crate::congruence::{generated_congruence, Congruence};
use crate::constructions::{product, pullback, subalgebra_on, PullbackAlgebra};
use crate::error::{Error, Result};
use crate::hom::{first_hom_with_pins, Homomorphism};
use crate::lemmas::{Counterexample, LemmaVerdict};
use crate::Elem;

/// `p: A → X` with `p ∘ s = 1_X`.
#[derive(Debug, Clone)]
pub struct SplitPoint {
    pub p: Homomorphism,
    pub s: Homomorphism,
}

impl SplitPoint {
    pub fn total(&self) -> &AlgebraRef {
        self.p.dom()
    }

    pub fn base(&self) -> &AlgebraRef {
        self.p.cod()
    }
}

pub fn validate_point(p: Homomorphism, s: Homomorphism) -> Result<SplitPoint> {
    if s.dom() != p.cod() {
        return Err(Error::CodomainMismatch(
            s.dom().name().to_string(),
            p.cod().name().to_string(),
        ));
    }
    if s.cod() != p.dom() {
        return Err(Error::CodomainMismatch(
            s.cod().name().to_string(),
            p.dom().name().to_string(),
        ));
    }
    if let Some(x) = (0..p.cod().size()).find(|&x| p.apply(s.apply(x)) != x) {
        return Err(Error::SplitLaw(x));
    }
    Ok(SplitPoint { p, s })
}

/// The product of two points in the fibre over their common base.
#[derive(Debug, Clone)]
pub struct FibreProduct {
    pub pullback: PullbackAlgebra,
    /// `(A ×_X B, d, (s, t))`.
    pub point: SplitPoint,
    pub proj1: Homomorphism,
    pub proj2: Homomorphism,
}

pub fn fibre_product(first: &SplitPoint, second: &SplitPoint) -> Result<FibreProduct> {
    if first.base() != second.base() {
        return Err(Error::CodomainMismatch(
            first.base().name().to_string(),
            second.base().name().to_string(),
        ));
    }
    let pb = pullback(&first.p, &second.p)?;
    let d = first.p.after(&pb.p1)?;
    let st = (0..first.base().size())
        .map(|x| {
            pb.element(first.s.apply(x), second.s.apply(x))
                .expect("sections agree over the base")
        })
        .collect();
    let st = Homomorphism::new(first.base().clone(), pb.algebra.clone(), st)?;
    let point = validate_point(d, st)?;
    Ok(FibreProduct {
        proj1: pb.p1.clone(),
        proj2: pb.p2.clone(),
        pullback: pb,
        point,
    })
}

/// With `E = Eq(p)` and Θ generated by `((sp(a), a), (a, sp(a)))` for all
/// `a`, requires `(sp(a), a) Θ (sp(a), sp(a))` for every `a`.
pub fn check_point_anticommutativity(point: &SplitPoint) -> Result<LemmaVerdict> {
    let e = pullback(&point.p, &point.p)?;
    let a = point.total();
    let sp = |x: Elem| point.s.apply(point.p.apply(x));
    let at = |x: Elem, y: Elem| e.element(x, y).expect("same fibre");
    let gens: Vec<(Elem, Elem)> = (0..a.size())
        .filter(|&x| sp(x) != x)
        .map(|x| (at(sp(x), x), at(x, sp(x))))
        .collect();
    let theta = generated_congruence(&e.algebra, &gens)?;
    let bad = (0..a.size()).find(|&x| !theta.related(at(sp(x), x), at(sp(x), sp(x))));
    Ok(LemmaVerdict::from_counterexample(
        bad.map(|a| Counterexample::Point { a }),
    ))
}

/// `p` on the triples `x R y S z` with `p(x,x,y) = y = p(y,x,x)`.
#[derive(Debug, Clone)]
pub struct PartialMaltsev {
    /// The triples, in lexicographic order; element `i` of `p.dom()` is
    /// `triples[i]`.
    pub triples: Vec<(Elem, Elem, Elem)>,
    pub p: Homomorphism,
}

fn same_algebra(r: &Congruence, s: &Congruence) -> Result<()> {
    if r.algebra() != s.algebra() {
        return Err(Error::SignatureMismatch(
            r.algebra().name().to_string(),
            s.algebra().name().to_string(),
        ));
    }
    Ok(())
}

/// The lexicographically first partial Mal'tsev operation for `R` and `S`,
/// found by pinned homomorphism search from the subalgebra of triples of
/// `X³`.
pub fn find_partial_maltsev(r: &Congruence, s: &Congruence) -> Result<Option<PartialMaltsev>> {
    same_algebra(r, s)?;
    let x = r.algebra();
    let n = x.size();
    let cube = {
        let sq = product(x, x)?;
        product(&sq.algebra, x)?.algebra
    };
    let index = |a: Elem, b: Elem, c: Elem| (a * n + b) * n + c;
    let mut triples = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if !r.related(a, b) {
                continue;
            }
            for c in 0..n {
                if s.related(b, c) {
                    triples.push((a, b, c));
                }
            }
        }
    }
    let elements: Vec<Elem> = triples.iter().map(|&(a, b, c)| index(a, b, c)).collect();
    let (carrier, _) = subalgebra_on(&cube, &elements, format!("R∘S({})", x.name()))?;
    let mut pins = vec![None; elements.len()];
    for (i, &(a, b, c)) in triples.iter().enumerate() {
        if a == b {
            pins[i] = Some(c);
        }
        if b == c {
            match pins[i] {
                Some(v) if v != a => return Ok(None),
                _ => pins[i] = Some(a),
            }
        }
    }
    let p = first_hom_with_pins(&carrier, x, &pins)?;
    Ok(p.map(|p| PartialMaltsev { triples, p }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalCheck {
    /// A partial Mal'tsev operation exists.
    pub commuting: bool,
    pub meet_is_diagonal: bool,
    /// Commuting with `R ∧ S ≠ Δ`: no locally anticommutative variety
    /// contains this algebra.
    pub flags_nonlocal: bool,
    /// Agreement with the ambient verdict, when one is given.
    pub consistent: Option<bool>,
}

pub fn check_commuting_implies_diagonal(
    r: &Congruence,
    s: &Congruence,
    ambient_locally_anticommutative: Option<bool>,
) -> Result<DiagonalCheck> {
    same_algebra(r, s)?;
    let commuting = find_partial_maltsev(r, s)?.is_some();
    let meet_is_diagonal = r.meet(s).is_discrete();
    let flags_nonlocal = commuting && !meet_is_diagonal;
    Ok(DiagonalCheck {
        commuting,
        meet_is_diagonal,
        flags_nonlocal,
        consistent: ambient_locally_anticommutative.map(|local| !(local && flags_nonlocal)),
    })
}

/// An internal groupoid `C_2 ⇉ C_1 ⇉ C_0`. Arrows `a` run from `d1(a)` to
/// `d2(a)`; `C_2` holds the composable pairs `(a, b)` with `d2(a) = d1(b)`
/// through `p1`, `p2`, and `m(a, b)` composes them.
#[derive(Debug, Clone)]
pub struct GroupoidData {
    pub c0: AlgebraRef,
    pub c1: AlgebraRef,
    pub c2: AlgebraRef,
    pub d1: Homomorphism,
    pub d2: Homomorphism,
    pub s: Homomorphism,
    pub m: Homomorphism,
    pub sigma: Homomorphism,
    pub p1: Homomorphism,
    pub p2: Homomorphism,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidFailure {
    /// `(i)`..`(iv)` or `inverse`.
    pub axiom: String,
    pub law: String,
    /// Arrows (or objects, for (i)) where the law fails.
    pub at: Vec<Elem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidVerdict {
    pub valid: bool,
    pub failure: Option<GroupoidFailure>,
    /// Whether `(d1, d2): C_1 → C_0 × C_0` is injective; only for valid
    /// groupoids.
    pub injective: Option<bool>,
}

fn shape(what: &str, h: &Homomorphism, dom: &AlgebraRef, cod: &AlgebraRef) -> Result<()> {
    if h.dom() != dom || h.cod() != cod {
        return Err(Error::MalformedGroupoid(format!(
            "{what} must map `{}` to `{}`, found `{}` -> `{}`",
            dom.name(),
            cod.name(),
            h.dom().name(),
            h.cod().name()
        )));
    }
    Ok(())
}

pub fn verify_internal_groupoid(g: &GroupoidData) -> Result<GroupoidVerdict> {
    shape("d1", &g.d1, &g.c1, &g.c0)?;
    shape("d2", &g.d2, &g.c1, &g.c0)?;
    shape("s", &g.s, &g.c0, &g.c1)?;
    shape("m", &g.m, &g.c2, &g.c1)?;
    shape("inv", &g.sigma, &g.c1, &g.c1)?;
    shape("p1", &g.p1, &g.c2, &g.c1)?;
    shape("p2", &g.p2, &g.c2, &g.c1)?;

    // C_2 must be exactly the composable pairs
    let n1 = g.c1.size();
    let mut pair_index = vec![None; n1 * n1];
    for e in 0..g.c2.size() {
        let (a, b) = (g.p1.apply(e), g.p2.apply(e));
        if g.d2.apply(a) != g.d1.apply(b) {
            return Err(Error::MalformedGroupoid(format!(
                "element {e} of C2 is ({a}, {b}), which is not composable"
            )));
        }
        if pair_index[a * n1 + b].replace(e).is_some() {
            return Err(Error::MalformedGroupoid(format!("pair ({a}, {b}) occurs twice in C2")));
        }
    }
    let compose = |a: Elem, b: Elem| -> Result<Elem> {
        pair_index[a * n1 + b].map(|e| g.m.apply(e)).ok_or_else(|| {
            Error::MalformedGroupoid(format!("composable pair ({a}, {b}) is missing from C2"))
        })
    };
    for a in 0..n1 {
        for b in 0..n1 {
            if g.d2.apply(a) == g.d1.apply(b) {
                compose(a, b)?;
            }
        }
    }

    let fail = |axiom: &str, law: &str, at: Vec<Elem>| {
        Ok(GroupoidVerdict {
            valid: false,
            failure: Some(GroupoidFailure {
                axiom: axiom.into(),
                law: law.into(),
                at,
            }),
            injective: None,
        })
    };
    let (d1, d2, s, sigma) = (&g.d1, &g.d2, &g.s, &g.sigma);
    for x in 0..g.c0.size() {
        if d1.apply(s.apply(x)) != x {
            return fail("(i)", "d1 ∘ s = 1", vec![x]);
        }
        if d2.apply(s.apply(x)) != x {
            return fail("(i)", "d2 ∘ s = 1", vec![x]);
        }
    }
    for a in 0..n1 {
        if compose(a, s.apply(d2.apply(a)))? != a {
            return fail("(ii)", "m ∘ (1, s ∘ d2) = 1", vec![a]);
        }
        if compose(s.apply(d1.apply(a)), a)? != a {
            return fail("(ii)", "m ∘ (s ∘ d1, 1) = 1", vec![a]);
        }
    }
    for e in 0..g.c2.size() {
        if d1.apply(g.p1.apply(e)) != d1.apply(g.m.apply(e)) {
            return fail("(iii)", "d1 ∘ p1 = d1 ∘ m", vec![g.p1.apply(e), g.p2.apply(e)]);
        }
        if d2.apply(g.p2.apply(e)) != d2.apply(g.m.apply(e)) {
            return fail("(iii)", "d2 ∘ p2 = d2 ∘ m", vec![g.p1.apply(e), g.p2.apply(e)]);
        }
    }
    for e in 0..g.c2.size() {
        let (a, b) = (g.p1.apply(e), g.p2.apply(e));
        for c in (0..n1).filter(|&c| d2.apply(b) == d1.apply(c)) {
            if compose(a, compose(b, c)?)? != compose(compose(a, b)?, c)? {
                return fail("(iv)", "m(a, m(b, c)) = m(m(a, b), c)", vec![a, b, c]);
            }
        }
    }
    for a in 0..n1 {
        let inv = sigma.apply(a);
        if d1.apply(inv) != d2.apply(a) || d2.apply(inv) != d1.apply(a) {
            return fail("inverse", "d1 ∘ σ = d2 and d2 ∘ σ = d1", vec![a]);
        }
        if compose(a, inv)? != s.apply(d1.apply(a)) {
            return fail("inverse", "m ∘ (1, σ) = s ∘ d1", vec![a]);
        }
        if compose(inv, a)? != s.apply(d2.apply(a)) {
            return fail("inverse", "m ∘ (σ, 1) = s ∘ d2", vec![a]);
        }
    }
    let mut seen = std::collections::HashSet::new();
    let injective = (0..n1).all(|a| seen.insert((d1.apply(a), d2.apply(a))));
    Ok(GroupoidVerdict {
        valid: true,
        failure: None,
        injective: Some(injective),
    })
}

/// The groupoid of a congruence `E` on `X`: arrows are the pairs `x E y`,
/// composition is transitivity.
pub fn equivalence_groupoid(e: &Congruence) -> Result<GroupoidData> {
    let x = e.algebra();
    let n = x.size();
    let sq = product(x, x)?;
    let arrows: Vec<Elem> = (0..sq.algebra.size())
        .filter(|&p| {
            let (a, b) = sq.unpair(p);
            e.related(a, b)
        })
        .collect();
    let (c1, _) = subalgebra_on(&sq.algebra, &arrows, format!("E({})", x.name()))?;
    let arrow = |a: Elem, b: Elem| arrows.binary_search(&sq.pair(a, b)).expect("related pair");
    let cube = product(&sq.algebra, x)?;
    let mut composable = Vec::new();
    for &p in &arrows {
        let (_, b) = sq.unpair(p);
        for c in (0..n).filter(|&c| e.related(b, c)) {
            composable.push(cube.pair(p, c));
        }
    }
    let (c2, _) = subalgebra_on(&cube.algebra, &composable, format!("E2({})", x.name()))?;
    let triple = |t: Elem| {
        let (p, c) = cube.unpair(composable[t]);
        let (a, b) = sq.unpair(p);
        (a, b, c)
    };
    let on_c2 = |f: &dyn Fn(Elem, Elem, Elem) -> Elem| -> Vec<Elem> {
        (0..composable.len())
            .map(|t| {
                let (a, b, c) = triple(t);
                f(a, b, c)
            })
            .collect()
    };
    let on_c1 = |f: &dyn Fn(Elem, Elem) -> Elem| -> Vec<Elem> {
        arrows
            .iter()
            .map(|&p| {
                let (a, b) = sq.unpair(p);
                f(a, b)
            })
            .collect()
    };
    let hom = |dom: &AlgebraRef, cod: &AlgebraRef, map: Vec<Elem>| {
        Homomorphism::new(dom.clone(), cod.clone(), map)
    };
    Ok(GroupoidData {
        d1: hom(&c1, x, on_c1(&|a, _| a))?,
        d2: hom(&c1, x, on_c1(&|_, b| b))?,
        s: hom(x, &c1, (0..n).map(|a| arrow(a, a)).collect())?,
        m: hom(&c2, &c1, on_c2(&|a, _, c| arrow(a, c)))?,
        sigma: hom(&c1, &c1, on_c1(&|a, b| arrow(b, a)))?,
        p1: hom(&c2, &c1, on_c2(&|a, b, _| arrow(a, b)))?,
        p2: hom(&c2, &c1, on_c2(&|_, b, c| arrow(b, c)))?,
        c0: x.clone(),
        c1,
        c2,
    })
}

/// A group `Z_n` as a one-object groupoid in the empty signature, with
/// composition `m` given as a table over pairs `(a, b) ↦ a·n + b`.
pub fn one_object_groupoid(n: usize, m: Vec<Elem>, inverse: Vec<Elem>) -> Result<GroupoidData> {
    let sig = crate::algebra::Signature::new(vec![], None)?;
    let set = |k: usize| -> Result<AlgebraRef> {
        Ok(Arc::new(FiniteAlgebra::new(format!("set{k}"), k, sig.clone(), vec![])?))
    };
    let (c0, c1, c2) = (set(1)?, set(n)?, set(n * n)?);
    let hom = |dom: &AlgebraRef, cod: &AlgebraRef, map: Vec<Elem>| {
        Homomorphism::new(dom.clone(), cod.clone(), map)
    };
    Ok(GroupoidData {
        d1: hom(&c1, &c0, vec![0; n])?,
        d2: hom(&c1, &c0, vec![0; n])?,
        s: hom(&c0, &c1, vec![0])?,
        m: hom(&c2, &c1, m)?,
        sigma: hom(&c1, &c1, inverse)?,
        p1: hom(&c2, &c1, (0..n * n).map(|e| e / n).collect())?,
        p2: hom(&c2, &c1, (0..n * n).map(|e| e % n).collect())?,
        c0,
        c1,
        c2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn arc(a: FiniteAlgebra) -> AlgebraRef {
        Arc::new(a)
    }

    fn sum_point() -> SplitPoint {
        let v = arc(fixtures::z2xz2());
        let z2 = arc(fixtures::z2());
        let p = Homomorphism::new(v.clone(), z2.clone(), vec![0, 1, 1, 0]).unwrap();
        let s = Homomorphism::new(z2, v, vec![0, 2]).unwrap();
        validate_point(p, s).unwrap()
    }

    fn projection_point() -> SplitPoint {
        let sl2 = arc(fixtures::sl2());
        let p = product(&sl2, &sl2).unwrap();
        let diag = Homomorphism::new(sl2, p.algebra.clone(), vec![p.pair(0, 0), p.pair(1, 1)]).unwrap();
        validate_point(p.pi1.clone(), diag).unwrap()
    }

    #[test]
    fn split_law() {
        let z2 = arc(fixtures::z2());
        let id = Homomorphism::identity(&z2);
        assert!(validate_point(id.clone(), id.clone()).is_ok());
        let zero = Homomorphism::zero(&z2, &z2).unwrap();
        assert!(matches!(validate_point(zero, id), Err(Error::SplitLaw(1))));
        projection_point();
    }

    #[test]
    fn fibre_products() {
        let p = sum_point();
        let fp = fibre_product(&p, &p).unwrap();
        assert_eq!(fp.pullback.size(), 8);
        let q = fp.point.p.clone();
        for (proj, src) in [(&fp.proj1, &p), (&fp.proj2, &p)] {
            assert_eq!(src.p.after(proj).unwrap().map(), q.map());
            assert_eq!(proj.after(&fp.point.s).unwrap().map(), src.s.map());
        }

        let z2 = arc(fixtures::z2());
        let id = Homomorphism::identity(&z2);
        let zero_point = validate_point(id.clone(), id).unwrap();
        let fp = fibre_product(&p, &zero_point).unwrap();
        assert_eq!(fp.pullback.size(), p.total().size());
    }

    #[test]
    fn point_anticommutativity() {
        let z2 = arc(fixtures::z2());
        let id = Homomorphism::identity(&z2);
        assert!(check_point_anticommutativity(&validate_point(id.clone(), id).unwrap()).unwrap().holds);
        assert!(!check_point_anticommutativity(&sum_point()).unwrap().holds);

        let pp = projection_point();
        let v = check_point_anticommutativity(&pp).unwrap();
        assert!(!v.holds);
        assert!(!crate::lemmas::triangular_on_pullback(&pp.p, &pp.p).unwrap().holds);
    }

    #[test]
    fn partial_maltsev_operations() {
        let z2 = arc(fixtures::z2());
        let found = find_partial_maltsev(&Congruence::total(&z2), &Congruence::total(&z2))
            .unwrap()
            .unwrap();
        for (i, &(a, b, c)) in found.triples.iter().enumerate() {
            assert_eq!(found.p.apply(i), a ^ b ^ c);
        }
        let sl2 = arc(fixtures::sl2());
        assert!(find_partial_maltsev(&Congruence::total(&sl2), &Congruence::total(&sl2))
            .unwrap()
            .is_none());
        let delta = Congruence::discrete(&sl2);
        let d = find_partial_maltsev(&delta, &delta).unwrap().unwrap();
        assert_eq!(d.triples, vec![(0, 0, 0), (1, 1, 1)]);
        assert_eq!(d.p.map(), &[0, 1]);
    }

    #[test]
    fn commuting_relations_and_the_diagonal() {
        let z2 = arc(fixtures::z2());
        let all = Congruence::total(&z2);
        let c = check_commuting_implies_diagonal(&all, &all, Some(false)).unwrap();
        assert!(c.commuting && !c.meet_is_diagonal && c.flags_nonlocal);
        assert_eq!(c.consistent, Some(true));

        let l2 = arc(fixtures::l2());
        for r in [Congruence::discrete(&l2), Congruence::total(&l2)] {
            for s in [Congruence::discrete(&l2), Congruence::total(&l2)] {
                let c = check_commuting_implies_diagonal(&r, &s, Some(true)).unwrap();
                assert!(!c.flags_nonlocal);
                assert_eq!(c.consistent, Some(true));
            }
        }
    }

    #[test]
    fn groupoids() {
        let l2 = arc(fixtures::l2());
        let g = equivalence_groupoid(&Congruence::total(&l2)).unwrap();
        assert_eq!((g.c1.size(), g.c2.size()), (4, 8));
        let v = verify_internal_groupoid(&g).unwrap();
        assert!(v.valid);
        assert_eq!(v.injective, Some(true));

        let z2 = one_object_groupoid(2, vec![0, 1, 1, 0], vec![0, 1]).unwrap();
        let v = verify_internal_groupoid(&z2).unwrap();
        assert!(v.valid);
        assert_eq!(v.injective, Some(false));

        let mut m: Vec<Elem> = (0..9).map(|e| (e / 3 + e % 3) % 3).collect();
        m[4] = 1;
        let bad = one_object_groupoid(3, m, vec![0, 2, 1]).unwrap();
        let v = verify_internal_groupoid(&bad).unwrap();
        assert!(!v.valid);
        assert_eq!(v.failure.unwrap().axiom, "(iv)");
    }

    #[test]
    fn c2_must_be_the_pullback() {
        let mut z2 = one_object_groupoid(2, vec![0, 1, 1, 0], vec![0, 1]).unwrap();
        z2.p2 = Homomorphism::new(z2.c2.clone(), z2.c1.clone(), vec![0, 0, 1, 1]).unwrap();
        assert!(matches!(verify_internal_groupoid(&z2), Err(Error::MalformedGroupoid(_))));
    }
}
