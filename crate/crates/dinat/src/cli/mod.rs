//! Concrete syntax for derivation files, model files and the command layer
//! behind the `dinat` binary.

pub mod commands;
pub mod lexer;
pub mod modelfile;
pub mod parser;
pub mod printer;

use thiserror::Error;

use crate::kernel::{Derivation, Strategy};
use crate::syntax::{CatExpr, SignatureTable, Slot};

pub use parser::{parse_cat, parse_derivation, parse_sequent};
pub use printer::{print_derivation, print_file};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: unexpected character `{ch}`")]
    Lex { line: usize, col: usize, ch: char },
    #[error("{line}:{col}: expected {}, found {found}", expected.join(" or "))]
    Unexpected { line: usize, col: usize, expected: Vec<String>, found: String },
    #[error("{line}:{col}: {message}")]
    Invalid { line: usize, col: usize, message: String },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Lex { line, col, .. }
            | ParseError::Unexpected { line, col, .. }
            | ParseError::Invalid { line, col, .. } => (*line, *col),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decl {
    Cat(String),
    Atom(String, Vec<Slot>),
    Functor(String, Vec<CatExpr>, CatExpr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedDerivation {
    pub name: String,
    /// Error class the kernel is expected to report, for negative examples.
    pub reject: Option<String>,
    pub deriv: Derivation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obligation {
    pub name: String,
    /// The derivation this equation is about.
    pub target: String,
    pub strategy: Strategy,
    pub lhs: Derivation,
    pub rhs: Derivation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DerivationFile {
    pub decls: Vec<Decl>,
    pub sig: SignatureTable,
    pub derivations: Vec<NamedDerivation>,
    pub obligations: Vec<Obligation>,
}

impl DerivationFile {
    pub fn derivation(&self, name: &str) -> Option<&NamedDerivation> {
        self.derivations.iter().find(|d| d.name == name)
    }
}
