//! Proof kernel and finite-category semantics for a directed first-order
//! logic whose entailments are dinatural transformations.

// Composition and order tables are indexed by object and morphism ids.
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod finsem;
pub mod corpus;
pub mod kernel;
pub mod par;
pub mod syntax;
