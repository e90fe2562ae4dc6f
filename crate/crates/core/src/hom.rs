//! Homomorphisms between finite algebras and backtracking search for them.

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::algebra::{AlgebraRef, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::Elem;

/// A structure-preserving map, stored as its image array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    dom: AlgebraRef,
    cod: AlgebraRef,
    map: Vec<Elem>,
}

/// Outcome of checking the homomorphism equations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomCheck {
    Holds,
    /// `map(f(args)) != f(map(args))`.
    Fails { symbol: String, args: Vec<Elem> },
}

impl HomCheck {
    pub fn holds(&self) -> bool {
        matches!(self, HomCheck::Holds)
    }
}

/// Checks every symbol on every argument tuple, in symbol then row-major
/// order, and reports the first violation.
pub fn hom_check(dom: &FiniteAlgebra, cod: &FiniteAlgebra, map: &[Elem]) -> Result<HomCheck> {
    dom.same_signature(cod)?;
    if map.len() != dom.size() {
        return Err(Error::SizeMismatch {
            expected: dom.size(),
            found: map.len(),
        });
    }
    for &v in map {
        cod.check_element(v)?;
    }
    for (s, sym) in dom.signature().symbols().iter().enumerate() {
        let mut image = vec![0; sym.arity];
        for args in crate::algebra::tuples(dom.size(), sym.arity) {
            for (i, &a) in args.iter().enumerate() {
                image[i] = map[a];
            }
            if map[dom.apply(s, &args)] != cod.apply(s, &image) {
                return Ok(HomCheck::Fails {
                    symbol: sym.name.clone(),
                    args,
                });
            }
        }
    }
    Ok(HomCheck::Holds)
}

impl Homomorphism {
    pub fn new(dom: AlgebraRef, cod: AlgebraRef, map: Vec<Elem>) -> Result<Self> {
        match hom_check(&dom, &cod, &map)? {
            HomCheck::Holds => Ok(Homomorphism { dom, cod, map }),
            HomCheck::Fails { symbol, args } => Err(Error::NotHomomorphism {
                cod: cod.name().to_string(),
                symbol,
                args,
            }),
        }
    }

    /// For maps known to be homomorphisms by construction.
    pub(crate) fn trusted(dom: AlgebraRef, cod: AlgebraRef, map: Vec<Elem>) -> Self {
        debug_assert!(hom_check(&dom, &cod, &map).map(|c| c.holds()).unwrap_or(false));
        Homomorphism { dom, cod, map }
    }

    pub fn identity(a: &AlgebraRef) -> Self {
        Homomorphism {
            dom: a.clone(),
            cod: a.clone(),
            map: (0..a.size()).collect(),
        }
    }

    /// The constant map onto the zero of `cod`.
    pub fn zero(dom: &AlgebraRef, cod: &AlgebraRef) -> Result<Self> {
        let z = cod.require_zero()?;
        Homomorphism::new(dom.clone(), cod.clone(), vec![z; dom.size()])
    }

    pub fn dom(&self) -> &AlgebraRef {
        &self.dom
    }

    pub fn cod(&self) -> &AlgebraRef {
        &self.cod
    }

    pub fn map(&self) -> &[Elem] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, e: Elem) -> Elem {
        self.map[e]
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &Homomorphism) -> Result<Homomorphism> {
        if !Arc::ptr_eq(&first.cod, &self.dom) && *first.cod != *self.dom {
            return Err(Error::CodomainMismatch(
                first.cod.name().to_string(),
                self.dom.name().to_string(),
            ));
        }
        Ok(Homomorphism {
            dom: first.dom.clone(),
            cod: self.cod.clone(),
            map: first.map.iter().map(|&a| self.map[a]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.size()];
        self.map.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.cod.size()];
        for &v in &self.map {
            seen[v] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Sorted image set.
    pub fn image_set(&self) -> Vec<Elem> {
        let mut img = self.map.clone();
        img.sort_unstable();
        img.dedup();
        img
    }

    pub fn is_zero(&self) -> bool {
        match self.cod.zero() {
            Some(z) => self.map.iter().all(|&v| v == z),
            None => false,
        }
    }
}

/// Visits every homomorphism `dom -> cod` compatible with `pins`, in
/// lexicographic order of image arrays.
///
/// Elements are assigned in index order. Once every argument of a table
/// entry is assigned, the entry either checks an already assigned result or
/// forces the value of a later one.
pub(crate) fn search_homs(
    dom: &FiniteAlgebra,
    cod: &FiniteAlgebra,
    pins: &[Option<Elem>],
    mut visit: impl FnMut(&[Elem]) -> ControlFlow<()>,
) {
    let n = dom.size();
    let mut forced: Vec<Option<Elem>> = pins.to_vec();
    forced.resize(n, None);
    for (s, sym) in dom.signature().symbols().iter().enumerate() {
        if sym.arity == 0 {
            let r = dom.constant(s);
            let w = cod.constant(s);
            match forced[r] {
                Some(x) if x != w => return,
                _ => forced[r] = Some(w),
            }
        }
    }
    let mut search = Search {
        dom,
        cod,
        image: vec![0; n],
        forced,
        trail: Vec::new(),
    };
    let _ = search.descend(0, &mut visit);
}

struct Search<'a> {
    dom: &'a FiniteAlgebra,
    cod: &'a FiniteAlgebra,
    image: Vec<Elem>,
    forced: Vec<Option<Elem>>,
    trail: Vec<Elem>,
}

impl Search<'_> {
    fn descend(
        &mut self,
        e: Elem,
        visit: &mut impl FnMut(&[Elem]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if e == self.dom.size() {
            return visit(&self.image);
        }
        let range = match self.forced[e] {
            Some(v) => v..v + 1,
            None => 0..self.cod.size(),
        };
        for v in range {
            self.image[e] = v;
            let mark = self.trail.len();
            if self.propagate(e) {
                self.descend(e + 1, visit)?;
            }
            for r in self.trail.drain(mark..) {
                self.forced[r] = None;
            }
        }
        ControlFlow::Continue(())
    }

    /// Checks or forces every table entry whose largest argument is `e`.
    fn propagate(&mut self, e: Elem) -> bool {
        let dom = self.dom;
        for (s, sym) in dom.signature().symbols().iter().enumerate() {
            let arity = sym.arity;
            if arity == 0 {
                continue;
            }
            let mut args = vec![0; arity];
            let mut image = vec![0; arity];
            // `first` is the first position holding `e`: earlier positions
            // range over 0..e, later ones over 0..=e.
            for first in 0..arity {
                if first > 0 && e == 0 {
                    break;
                }
                args.iter_mut().for_each(|a| *a = 0);
                args[first] = e;
                loop {
                    for i in 0..arity {
                        image[i] = self.image[args[i]];
                    }
                    let r = dom.apply(s, &args);
                    let w = self.cod.apply(s, &image);
                    if r <= e {
                        if self.image[r] != w {
                            return false;
                        }
                    } else {
                        match self.forced[r] {
                            Some(x) if x != w => return false,
                            Some(_) => {}
                            None => {
                                self.forced[r] = Some(w);
                                self.trail.push(r);
                            }
                        }
                    }
                    if !advance(&mut args, first, e) {
                        break;
                    }
                }
            }
        }
        true
    }
}

fn advance(args: &mut [Elem], first: usize, e: Elem) -> bool {
    for i in (0..args.len()).rev() {
        if i == first {
            continue;
        }
        let bound = if i < first { e } else { e + 1 };
        args[i] += 1;
        if args[i] < bound {
            return true;
        }
        args[i] = 0;
    }
    false
}

/// All homomorphisms `a -> b` in lexicographic order of image arrays.
pub fn enumerate_homs(a: &AlgebraRef, b: &AlgebraRef) -> Result<Vec<Homomorphism>> {
    a.same_signature(b)?;
    let mut out = Vec::new();
    search_homs(a, b, &[], |img| {
        out.push(Homomorphism {
            dom: a.clone(),
            cod: b.clone(),
            map: img.to_vec(),
        });
        ControlFlow::Continue(())
    });
    Ok(out)
}

/// Lexicographically first homomorphism agreeing with `pins`.
pub fn first_hom_with_pins(
    a: &AlgebraRef,
    b: &AlgebraRef,
    pins: &[Option<Elem>],
) -> Result<Option<Homomorphism>> {
    a.same_signature(b)?;
    let mut found = None;
    search_homs(a, b, pins, |img| {
        found = Some(img.to_vec());
        ControlFlow::Break(())
    });
    Ok(found.map(|map| Homomorphism {
        dom: a.clone(),
        cod: b.clone(),
        map,
    }))
}

/// An isomorphism `a -> b`, if one exists.
pub fn find_isomorphism(a: &AlgebraRef, b: &AlgebraRef) -> Result<Option<Homomorphism>> {
    a.same_signature(b)?;
    if a.size() != b.size() {
        return Ok(None);
    }
    let mut found = None;
    search_homs(a, b, &[], |img| {
        let mut seen = vec![false; b.size()];
        if img.iter().all(|&v| !std::mem::replace(&mut seen[v], true)) {
            found = Some(img.to_vec());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(found.map(|map| Homomorphism {
        dom: a.clone(),
        cod: b.clone(),
        map,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::algebra::tuples;

    fn brute_force_homs(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Vec<Vec<Elem>> {
        tuples(b.size(), a.size())
            .filter(|m| hom_check(a, b, m).unwrap().holds())
            .collect()
    }

    #[test]
    fn identity_and_zero_maps() {
        let sl2 = Arc::new(fixtures::sl2());
        assert!(hom_check(&sl2, &sl2, &[0, 1]).unwrap().holds());
        let z2 = Arc::new(fixtures::z2());
        assert!(hom_check(&z2, &z2, &[0, 0]).unwrap().holds());
    }

    #[test]
    fn swap_on_sl2_fails_at_meet() {
        let sl2 = fixtures::sl2();
        // swap(0 ∧ 1) = swap(0) = 1, but swap(0) ∧ swap(1) = 1 ∧ 0 = 0. The
        // constant table is checked first and also fails, so check meet alone.
        let meet_only = FiniteAlgebra::from_named("m", 2, vec![("meet", 2, vec![0, 0, 0, 1])], None)
            .unwrap();
        assert_eq!(
            hom_check(&meet_only, &meet_only, &[1, 0]).unwrap(),
            HomCheck::Fails {
                symbol: "meet".into(),
                args: vec![0, 1]
            }
        );
        assert!(!hom_check(&sl2, &sl2, &[1, 0]).unwrap().holds());
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let sl2 = fixtures::sl2();
        assert!(matches!(
            hom_check(&sl2, &sl2, &[0]),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn enumeration_counts() {
        let z2 = Arc::new(fixtures::z2());
        let homs = enumerate_homs(&z2, &z2).unwrap();
        assert_eq!(homs.iter().map(|h| h.map().to_vec()).collect::<Vec<_>>(), vec![vec![0, 0], vec![0, 1]]);
        let ps2 = Arc::new(fixtures::ps2());
        assert_eq!(enumerate_homs(&ps2, &ps2).unwrap().len(), 2);
        let one = Arc::new(FiniteAlgebra::trivial(z2.signature().clone()));
        assert_eq!(enumerate_homs(&z2, &one).unwrap().len(), 1);
    }

    #[test]
    fn search_matches_brute_force_on_fixtures() {
        let algs = fixtures::all();
        for a in &algs {
            for b in &algs {
                if a.signature() != b.signature() || a.size() > 4 || b.size() > 4 {
                    continue;
                }
                let (ra, rb) = (Arc::new(a.clone()), Arc::new(b.clone()));
                let found: Vec<_> = enumerate_homs(&ra, &rb)
                    .unwrap()
                    .into_iter()
                    .map(|h| h.map)
                    .collect();
                assert_eq!(found, brute_force_homs(a, b), "{} -> {}", a.name(), b.name());
            }
        }
    }

    #[test]
    fn pins_restrict_the_search() {
        let z2 = Arc::new(fixtures::z2());
        let h = first_hom_with_pins(&z2, &z2, &[None, Some(1)]).unwrap().unwrap();
        assert_eq!(h.map(), &[0, 1]);
        assert!(first_hom_with_pins(&z2, &z2, &[Some(1), None]).unwrap().is_none());
    }

    #[test]
    fn composition_and_isomorphism() {
        let z2 = Arc::new(fixtures::z2());
        let id = Homomorphism::identity(&z2);
        let zero = Homomorphism::zero(&z2, &z2).unwrap();
        assert_eq!(id.after(&zero).unwrap(), zero);
        assert_eq!(zero.after(&id).unwrap(), zero);
        assert!(find_isomorphism(&z2, &z2).unwrap().unwrap().is_bijective());
    }
}
