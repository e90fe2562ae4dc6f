//! Finite universal algebra workbench.
//!
//! Decides anticommutativity and local anticommutativity of the variety
//! generated by finite algebras, extracts Mal'tsev-term witnesses from
//! congruence derivations, and checks triangular/shifting lemmas, directly
//! decomposable congruence classes, Huq commutation and constructions in
//! categories of points, all by exact computation.

pub mod algebra;
mod closure;
pub mod commutation;
pub mod congruence;
pub mod constructions;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod free;
pub mod hom;
pub mod lemmas;
pub mod points;
pub mod term;
pub mod witness;

/// Elements are dense indices `0..n`.
pub type Elem = usize;

pub use algebra::{AlgebraRef, FiniteAlgebra, Signature, Symbol};
pub use congruence::{all_congruences, chain_between, eq_kernel, generated_congruence, Chain, Congruence};
pub use constructions::{
    generated_subalgebra, image_factorization, kernel_subalgebra, product, pullback, quotient,
    Product, PullbackAlgebra,
};
pub use error::{Error, Result};
pub use free::{free_algebra, FreeAlgebra, Limits};
pub use hom::{enumerate_homs, hom_check, HomCheck, Homomorphism};
pub use term::{evaluate_term, Term};
