//! Finite semantics: formulas as set-valued dipresheaves over finite
//! categories, derivations as dinatural families.

pub mod apply;
pub mod enumerate;
pub mod eval;
pub mod family;
pub mod fincat;
pub mod model;
pub mod props;
pub mod random;
pub mod value;

use thiserror::Error;

use crate::kernel::KernelError;

pub use apply::{eval_derivation, eval_derivation_with, Holes};
pub use enumerate::{
    compute_coend, compute_end, end_to_family, enumerate_dinaturals, family_to_end, search_composition_failure,
    CompositionWitness,
};
pub use eval::{Binding, Evaluator};
pub use family::{check_dinatural, families_equal, DinatFamily, HexagonWitness};
pub use fincat::{FinCat, Morphism, SemCat};
pub use model::{AtomTable, FunctorTable, Model, Shape};
pub use value::{DSet, Value};

/// Default bound on the size of any materialized set.
pub const DEFAULT_MAX_SET_SIZE: usize = 1_000_000;

/// The enumeration guard, overridable through `DINAT_MAX_SET_SIZE`.
pub fn max_set_size() -> usize {
    std::env::var("DINAT_MAX_SET_SIZE").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_MAX_SET_SIZE)
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("category {cat}: {reason}")]
    Category { cat: String, reason: String },
    #[error("atom {atom}: {reason}")]
    Atom { atom: String, reason: String },
    #[error("functor {functor}: {reason}")]
    Functor { functor: String, reason: String },
    #[error("model does not interpret {kind} `{name}`")]
    Missing { kind: String, name: String },
    #[error("`{name}` is interpreted as {found}, declared as {expected}")]
    Signature { name: String, expected: String, found: String },
    #[error("{0}")]
    Format(String),
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("{what} needs {required} elements, above the bound {limit}")]
    BoundExceeded { what: String, required: u128, limit: usize },
    #[error("variable `{0}` has no assigned objects")]
    Unassigned(String),
    #[error("no family supplied for hole `{0}`")]
    Hole(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("soundness bug: the family of `{node}` fails the hexagon: {witness}")]
    Soundness { node: String, witness: String },
}
