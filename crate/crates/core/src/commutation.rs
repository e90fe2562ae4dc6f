//! Huq commutation, disjointness, central morphisms and the decision of
//! anticommutativity with witness extraction.

use crate::algebra::AlgebraRef;
use crate::congruence::{chain_between, generated_congruence, Chain, Congruence};
use crate::constructions::{kernel_subalgebra, product, pullback, Product};
use crate::error::{Error, Result};
use crate::free::{free_algebra, FreeAlgebra, Limits};
use crate::hom::{first_hom_with_pins, Homomorphism};
use crate::witness::{compile_chain, MaltsevWitness};
use crate::Elem;

/// `ρ: A × B → C` with `ρ(a, 0) = f(a)` and `ρ(0, b) = g(b)`.
#[derive(Debug, Clone)]
pub struct Cooperator {
    pub product: Product,
    pub rho: Homomorphism,
}

fn check_pair(f: &Homomorphism, g: &Homomorphism) -> Result<()> {
    if f.cod() != g.cod() {
        return Err(Error::CodomainMismatch(
            f.cod().name().to_string(),
            g.cod().name().to_string(),
        ));
    }
    f.dom().require_zero()?;
    g.dom().require_zero()?;
    f.cod().require_zero()?;
    Ok(())
}

/// The lexicographically first cooperator, if `f` and `g` commute.
pub fn find_cooperator(f: &Homomorphism, g: &Homomorphism) -> Result<Option<Cooperator>> {
    check_pair(f, g)?;
    let p = product(f.dom(), g.dom())?;
    let (za, zb) = (f.dom().require_zero()?, g.dom().require_zero()?);
    let mut pins = vec![None; p.algebra.size()];
    for a in 0..f.dom().size() {
        pins[p.pair(a, zb)] = Some(f.apply(a));
    }
    for b in 0..g.dom().size() {
        // f(0) = 0 = g(0), so the pins agree at (0, 0)
        pins[p.pair(za, b)] = Some(g.apply(b));
    }
    let rho = first_hom_with_pins(&p.algebra, f.cod(), &pins)?;
    Ok(rho.map(|rho| Cooperator { product: p, rho }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disjointness {
    pub holds: bool,
    /// The first `(a, b)` with `f(a) = g(b) ≠ 0`.
    pub witness: Option<(Elem, Elem)>,
}

pub fn are_disjoint(f: &Homomorphism, g: &Homomorphism) -> Result<Disjointness> {
    check_pair(f, g)?;
    let zero = f.cod().require_zero()?;
    for a in 0..f.dom().size() {
        let fa = f.apply(a);
        if fa == zero {
            continue;
        }
        if let Some(b) = (0..g.dom().size()).find(|&b| g.apply(b) == fa) {
            return Ok(Disjointness {
                holds: false,
                witness: Some((a, b)),
            });
        }
    }
    Ok(Disjointness {
        holds: true,
        witness: None,
    })
}

/// Whether the comparison `ker f × ker g → A ×_C B` is a bijection.
pub fn disjoint_via_kernels(f: &Homomorphism, g: &Homomorphism) -> Result<bool> {
    check_pair(f, g)?;
    let pb = pullback(f, g)?;
    let (kf, incl_f) = kernel_subalgebra(f)?;
    let (kg, incl_g) = kernel_subalgebra(g)?;
    let kk = product(&kf, &kg)?;
    let comparison = (0..kk.algebra.size())
        .map(|e| {
            let (a, b) = kk.unpair(e);
            pb.element(incl_f.apply(a), incl_g.apply(b))
                .expect("kernel pairs lie in the pullback")
        })
        .collect();
    Ok(Homomorphism::new(kk.algebra.clone(), pb.algebra.clone(), comparison)?.is_bijective())
}

/// `f` commutes with the identity of its codomain.
pub fn is_central(f: &Homomorphism) -> Result<bool> {
    let id = Homomorphism::identity(f.cod());
    Ok(find_cooperator(f, &id)?.is_some())
}

pub fn is_commutative_object(m: &AlgebraRef) -> Result<bool> {
    is_central(&Homomorphism::identity(m))
}

#[derive(Debug, Clone)]
pub struct AnticommutativityVerdict {
    pub holds: bool,
    /// `F(x)`.
    pub free: FreeAlgebra,
    /// `F(x) × F(x)`.
    pub square: Product,
    /// `Cg((x,0), (0,x))` on the square.
    pub theta: Congruence,
    /// From `(x,0)` to `(0,0)`, when they are related.
    pub chain: Option<Chain>,
    pub witness: Option<MaltsevWitness>,
    pub note: Option<String>,
}

/// Decides whether the variety generated by `basis` is anticommutative:
/// `(x,0)` and `(0,0)` are related by the congruence on `F(x)²` generated by
/// `((x,0), (0,x))`.
pub fn decide_anticommutative(
    basis: &[AlgebraRef],
    limits: &Limits,
) -> Result<AnticommutativityVerdict> {
    for a in basis {
        a.require_zero()?;
    }
    let free = free_algebra(basis, 1, limits)?;
    let f = &free.carrier;
    let x = free.generators[0];
    let zero = f.require_zero()?;
    let square = product(f, f)?;
    let start = square.pair(x, zero);
    let generator = (start, square.pair(zero, x));
    let target = square.pair(zero, zero);
    let theta = generated_congruence(&square.algebra, &[generator])?;
    let holds = theta.related(start, target);
    let (chain, witness, note) = if holds {
        let chain = chain_between(&theta, start, target)?;
        let compiled = compile_chain(
            &chain,
            f.signature(),
            |e| square.unpair(e),
            |e| free.label(e),
        );
        let witness = MaltsevWitness {
            m: compiled.left.len(),
            n: compiled.p.len(),
            u: compiled.left,
            v: compiled.right,
            p: compiled.p,
        };
        (Some(chain), Some(witness), None)
    } else {
        let note = format!(
            "(x,0) and (0,0) lie in different classes of Cg((x,0),(0,x)) on F(x)², which has {} \
             classes over {} elements; the quotient is a model separating them",
            theta.num_classes(),
            square.algebra.size()
        );
        (None, None, Some(note))
    };
    Ok(AnticommutativityVerdict {
        holds,
        free,
        square,
        theta,
        chain,
        witness,
        note,
    })
}
