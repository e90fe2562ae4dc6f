//! Products, subalgebras, pullbacks, quotients, images and kernels.

use std::collections::HashMap;
use std::sync::Arc;

use crate::algebra::{AlgebraRef, FiniteAlgebra};
use crate::closure;
use crate::congruence::Congruence;
use crate::error::{Error, Result};
use crate::hom::Homomorphism;
use crate::term::Term;
use crate::Elem;

/// `A × B` with the pair `(a, b)` stored at index `a·|B| + b`.
#[derive(Debug, Clone)]
pub struct Product {
    pub algebra: AlgebraRef,
    pub left: AlgebraRef,
    pub right: AlgebraRef,
    pub pi1: Homomorphism,
    pub pi2: Homomorphism,
}

impl Product {
    #[inline]
    pub fn pair(&self, a: Elem, b: Elem) -> Elem {
        a * self.right.size() + b
    }

    #[inline]
    pub fn unpair(&self, e: Elem) -> (Elem, Elem) {
        (e / self.right.size(), e % self.right.size())
    }

    /// `a ↦ (a, 0)`.
    pub fn inject_left(&self) -> Result<Homomorphism> {
        let z = self.right.require_zero()?;
        Homomorphism::new(
            self.left.clone(),
            self.algebra.clone(),
            (0..self.left.size()).map(|a| self.pair(a, z)).collect(),
        )
    }

    /// `b ↦ (0, b)`.
    pub fn inject_right(&self) -> Result<Homomorphism> {
        let z = self.left.require_zero()?;
        Homomorphism::new(
            self.right.clone(),
            self.algebra.clone(),
            (0..self.right.size()).map(|b| self.pair(z, b)).collect(),
        )
    }
}

pub fn product(a: &AlgebraRef, b: &AlgebraRef) -> Result<Product> {
    a.same_signature(b)?;
    let nb = b.size();
    let size = a.size().checked_mul(nb).ok_or_else(|| Error::CapExceeded {
        what: "product".into(),
        cap: usize::MAX,
        bound: format!("{}·{}", a.size(), nb),
    })?;
    let mut left = Vec::new();
    let mut right = Vec::new();
    let algebra = FiniteAlgebra::from_fn(
        format!("{}x{}", a.name(), b.name()),
        size,
        a.signature().clone(),
        |s, args| {
            left.clear();
            right.clear();
            for &e in args {
                left.push(e / nb);
                right.push(e % nb);
            }
            a.apply(s, &left) * nb + b.apply(s, &right)
        },
    )?;
    let algebra = Arc::new(algebra);
    let pi1 = Homomorphism::trusted(algebra.clone(), a.clone(), (0..size).map(|e| e / nb).collect());
    let pi2 = Homomorphism::trusted(algebra.clone(), b.clone(), (0..size).map(|e| e % nb).collect());
    Ok(Product {
        algebra,
        left: a.clone(),
        right: b.clone(),
        pi1,
        pi2,
    })
}

/// The subalgebra on a sorted, closed element set. Fails if the set is not
/// closed under the operations.
pub fn subalgebra_on(
    a: &AlgebraRef,
    elements: &[Elem],
    name: impl Into<String>,
) -> Result<(AlgebraRef, Homomorphism)> {
    if elements.is_empty() {
        return Err(Error::EmptyUniverse);
    }
    let mut position = vec![usize::MAX; a.size()];
    for (i, &e) in elements.iter().enumerate() {
        a.check_element(e)?;
        position[e] = i;
    }
    let mut outside = None;
    let mut lifted = Vec::new();
    let sub = FiniteAlgebra::from_fn(name, elements.len(), a.signature().clone(), |s, args| {
        lifted.clear();
        lifted.extend(args.iter().map(|&i| elements[i]));
        let v = a.apply(s, &lifted);
        if position[v] == usize::MAX {
            outside.get_or_insert(v);
            0
        } else {
            position[v]
        }
    })?;
    if let Some(element) = outside {
        return Err(Error::NotClosed {
            algebra: a.name().to_string(),
            element,
        });
    }
    let sub = Arc::new(sub);
    let inclusion = Homomorphism::trusted(sub.clone(), a.clone(), elements.to_vec());
    Ok((sub, inclusion))
}

/// A generated subalgebra together with witnessing term labels.
#[derive(Debug, Clone)]
pub struct Subalgebra {
    pub algebra: AlgebraRef,
    pub inclusion: Homomorphism,
    /// Sorted, deduplicated generators; generator `j` is the variable `x{j+1}`.
    pub generators: Vec<Elem>,
    /// `labels[e]` evaluates to `inclusion(e)` at the generators.
    pub labels: Vec<Term>,
}

/// Smallest subuniverse containing `gens` and every constant. Elements are
/// renumbered in increasing order of their value in `a`.
pub fn generated_subalgebra(a: &AlgebraRef, gens: &[Elem]) -> Result<Subalgebra> {
    let mut generators = gens.to_vec();
    generators.sort_unstable();
    generators.dedup();
    for &g in &generators {
        a.check_element(g)?;
    }
    let c = closure::close(
        a.signature(),
        generators.clone(),
        |s, args| {
            let vals: Vec<Elem> = args.iter().map(|&&e| e).collect();
            a.apply(s, &vals)
        },
        usize::MAX,
    )
    .expect("closure inside a finite algebra is bounded");
    if c.elements.is_empty() {
        return Err(Error::EmptyUniverse);
    }
    let mut order: Vec<usize> = (0..c.elements.len()).collect();
    order.sort_by_key(|&i| c.elements[i]);
    let elements: Vec<Elem> = order.iter().map(|&i| c.elements[i]).collect();
    let labels = order
        .iter()
        .map(|&i| closure::label(a.signature(), &c.derivations, i))
        .collect();
    let (algebra, inclusion) = subalgebra_on(a, &elements, format!("Sg{}", a.name()))?;
    Ok(Subalgebra {
        algebra,
        inclusion,
        generators,
        labels,
    })
}

/// `A ×_X B = {(a, b) | f(a) = g(b)}` with its projections.
#[derive(Debug, Clone)]
pub struct PullbackAlgebra {
    pub algebra: AlgebraRef,
    /// Pairs in lexicographic order; element `e` encodes `pairs[e]`.
    pub pairs: Vec<(Elem, Elem)>,
    index: HashMap<(Elem, Elem), Elem>,
    pub p1: Homomorphism,
    pub p2: Homomorphism,
}

impl PullbackAlgebra {
    pub fn pair_of(&self, e: Elem) -> (Elem, Elem) {
        self.pairs[e]
    }

    pub fn element(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.index.get(&(a, b)).copied()
    }

    pub fn size(&self) -> usize {
        self.pairs.len()
    }
}

pub fn pullback(f: &Homomorphism, g: &Homomorphism) -> Result<PullbackAlgebra> {
    if f.cod() != g.cod() {
        return Err(Error::CodomainMismatch(
            f.cod().name().to_string(),
            g.cod().name().to_string(),
        ));
    }
    f.dom().same_signature(g.dom())?;
    let (a, b) = (f.dom(), g.dom());
    let mut by_value: Vec<Vec<Elem>> = vec![Vec::new(); f.cod().size()];
    for y in 0..b.size() {
        by_value[g.apply(y)].push(y);
    }
    let mut pairs = Vec::new();
    for x in 0..a.size() {
        for &y in &by_value[f.apply(x)] {
            pairs.push((x, y));
        }
    }
    let index: HashMap<(Elem, Elem), Elem> =
        pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut left = Vec::new();
    let mut right = Vec::new();
    let algebra = FiniteAlgebra::from_fn(
        format!("{}x[{}]{}", a.name(), f.cod().name(), b.name()),
        pairs.len(),
        a.signature().clone(),
        |s, args| {
            left.clear();
            right.clear();
            for &e in args {
                left.push(pairs[e].0);
                right.push(pairs[e].1);
            }
            index[&(a.apply(s, &left), b.apply(s, &right))]
        },
    )?;
    let algebra = Arc::new(algebra);
    let p1 = Homomorphism::trusted(algebra.clone(), a.clone(), pairs.iter().map(|p| p.0).collect());
    let p2 = Homomorphism::trusted(algebra.clone(), b.clone(), pairs.iter().map(|p| p.1).collect());
    Ok(PullbackAlgebra {
        algebra,
        pairs,
        index,
        p1,
        p2,
    })
}

/// `A/θ`, each class represented by its least member, classes ordered by
/// that member.
pub fn quotient(theta: &Congruence) -> Result<(AlgebraRef, Homomorphism)> {
    let a = theta.algebra();
    let reps: Vec<Elem> = (0..a.size()).filter(|&e| theta.rep(e) == e).collect();
    let class_of: Vec<Elem> = (0..a.size())
        .map(|e| reps.binary_search(&theta.rep(e)).expect("rep is a class member"))
        .collect();
    let mut lifted = Vec::new();
    let q = FiniteAlgebra::from_fn(
        format!("{}/θ", a.name()),
        reps.len(),
        a.signature().clone(),
        |s, args| {
            lifted.clear();
            lifted.extend(args.iter().map(|&c| reps[c]));
            class_of[a.apply(s, &lifted)]
        },
    )?;
    let q = Arc::new(q);
    let proj = Homomorphism::new(a.clone(), q.clone(), class_of)?;
    Ok((q, proj))
}

/// `f = m ∘ e` with `e` onto the image subalgebra and `m` its inclusion.
pub fn image_factorization(f: &Homomorphism) -> Result<(Homomorphism, Homomorphism)> {
    let image = f.image_set();
    let (mid, m) = subalgebra_on(f.cod(), &image, format!("Im({})", f.dom().name()))?;
    let e_map = f
        .map()
        .iter()
        .map(|v| image.binary_search(v).expect("value is in the image"))
        .collect();
    let e = Homomorphism::trusted(f.dom().clone(), mid, e_map);
    Ok((e, m))
}

/// The subalgebra `f⁻¹(0)` of the domain.
pub fn kernel_subalgebra(f: &Homomorphism) -> Result<(AlgebraRef, Homomorphism)> {
    let z = f.cod().require_zero()?;
    f.dom().require_zero()?;
    let elems: Vec<Elem> = (0..f.dom().size()).filter(|&a| f.apply(a) == z).collect();
    subalgebra_on(f.dom(), &elems, format!("ker({})", f.dom().name()))
}
