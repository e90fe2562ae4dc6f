//! Small algebras used throughout the examples and tests.

use crate::algebra::FiniteAlgebra;
use crate::constructions::product;
use std::sync::Arc;

/// `({0,1}, ∧, 0)`.
pub fn sl2() -> FiniteAlgebra {
    FiniteAlgebra::from_named(
        "SL2",
        2,
        vec![("meet", 2, vec![0, 0, 0, 1]), ("0", 0, vec![0])],
        Some("0"),
    )
    .unwrap()
}

/// The two-element group `({0,1}, +, 0)`.
pub fn z2() -> FiniteAlgebra {
    FiniteAlgebra::from_named(
        "Z2",
        2,
        vec![("plus", 2, vec![0, 1, 1, 0]), ("0", 0, vec![0])],
        Some("0"),
    )
    .unwrap()
}

/// The two-element pointed set.
pub fn ps2() -> FiniteAlgebra {
    FiniteAlgebra::from_named("PS2", 2, vec![("0", 0, vec![0])], Some("0")).unwrap()
}

/// `({0,1}, maj, 0)`.
pub fn maj2() -> FiniteAlgebra {
    let maj = crate::algebra::tuples(2, 3)
        .map(|t| usize::from(t[0] + t[1] + t[2] >= 2))
        .collect();
    FiniteAlgebra::from_named("MAJ2", 2, vec![("maj", 3, maj), ("0", 0, vec![0])], Some("0")).unwrap()
}

/// The two-element lattice `({0,1}, ∧, ∨)`.
pub fn l2() -> FiniteAlgebra {
    FiniteAlgebra::from_named(
        "L2",
        2,
        vec![("meet", 2, vec![0, 0, 0, 1]), ("join", 2, vec![0, 1, 1, 1])],
        None,
    )
    .unwrap()
}

pub fn z2xz2() -> FiniteAlgebra {
    let z2 = Arc::new(z2());
    let p = product(&z2, &z2).unwrap();
    (*p.algebra).clone().with_name("Z2xZ2")
}

pub fn sl2xsl2() -> FiniteAlgebra {
    let sl2 = Arc::new(sl2());
    let p = product(&sl2, &sl2).unwrap();
    (*p.algebra).clone().with_name("SL2xSL2")
}

pub fn all() -> Vec<FiniteAlgebra> {
    vec![sl2(), z2(), ps2(), maj2(), l2(), z2xz2(), sl2xsl2()]
}
