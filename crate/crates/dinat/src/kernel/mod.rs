//! Derivation trees and their checker.

pub mod check;
pub mod deriv;
pub mod eq;
pub mod jrule;
pub mod macros;
pub mod search;

use thiserror::Error;

use crate::syntax::SyntaxError;

pub use check::{check_derivation, check_node, rename_root};
pub use deriv::{Derivation, Dir, FubiniKind, NatSite, Rule};
pub use eq::{canonical_key, check_eq_judgement, normalize, EqJudgement, Strategy};
pub use jrule::{check_hom_elim_side_condition, hom_hyp, j_premise, HomHyp};
pub use macros::{expand_all, expand_macro};
pub use search::{search, SearchResult};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("{node}: {error}")]
    Syntax { node: String, error: SyntaxError },
    #[error("{node}: schema mismatch: {reason}")]
    SchemaMismatch { node: String, reason: String },
    #[error("{node}: variance violation: `{variable}` occurs {occurrence}")]
    VarianceViolation { node: String, variable: String, occurrence: String },
}

impl KernelError {
    /// Error class name, as used by negative corpus entries.
    pub fn class(&self) -> &'static str {
        match self {
            KernelError::SchemaMismatch { .. } => "SchemaMismatch",
            KernelError::VarianceViolation { .. } => "VarianceViolation",
            KernelError::Syntax { error, .. } => match error {
                SyntaxError::UnboundVariable(_) => "UnboundVariable",
                SyntaxError::UnknownAtom(_) => "UnknownAtom",
                SyntaxError::UnknownFunctor(_) => "UnknownFunctor",
                SyntaxError::UnknownCategory(_) => "UnknownCategory",
                SyntaxError::ArityMismatch { .. } => "ArityMismatch",
                SyntaxError::TypeMismatch { .. } => "TypeMismatch",
                SyntaxError::DuplicateName(_) => "DuplicateName",
            },
        }
    }

    pub fn node(&self) -> &str {
        match self {
            KernelError::Syntax { node, .. }
            | KernelError::SchemaMismatch { node, .. }
            | KernelError::VarianceViolation { node, .. } => node,
        }
    }
}
