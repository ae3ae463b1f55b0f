//! Category expressions, difunctor terms, formulas and sequents.

pub mod cat;
pub mod formula;
pub mod sequent;
pub mod signature;
pub mod term;

use thiserror::Error;

pub use cat::{normalize, CatExpr};
pub use formula::{ctx_formula, fresh_name, Formula, Occurrence, PathStep};
pub use sequent::Sequent;
pub use signature::{FunctorSig, SignatureTable, Slot};
pub use term::{ctx_lookup, Polarity, TermCtx, TermExpr};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("unknown functor `{0}`")]
    UnknownFunctor(String),
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("`{symbol}` expects {expected} arguments, found {found}")]
    ArityMismatch { symbol: String, expected: usize, found: usize },
    #[error("type mismatch at {at}: expected {expected}, found {found}")]
    TypeMismatch { at: String, expected: CatExpr, found: CatExpr },
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
}
