//! The worked examples, shipped as derivation files and checked on load.

mod models;
mod run;

pub use models::model_suite;
pub use run::{run_corpus, Outcome, Status};

use crate::cli::{parse_derivation, DerivationFile, Obligation};
use crate::kernel::Derivation;
use crate::syntax::{Sequent, SignatureTable};

/// Source files, embedded at build time.
pub const FILES: &[(&str, &str)] = &[
    ("comp.dinat", include_str!("../../corpus/comp.dinat")),
    ("map.dinat", include_str!("../../corpus/map.dinat")),
    ("transport.dinat", include_str!("../../corpus/transport.dinat")),
    ("sym.dinat", include_str!("../../corpus/sym.dinat")),
    ("refl.dinat", include_str!("../../corpus/refl.dinat")),
    ("yoneda.dinat", include_str!("../../corpus/yoneda.dinat")),
    ("coyoneda.dinat", include_str!("../../corpus/coyoneda.dinat")),
    ("presheaf-exp.dinat", include_str!("../../corpus/presheaf-exp.dinat")),
    ("ran.dinat", include_str!("../../corpus/ran.dinat")),
    ("lan.dinat", include_str!("../../corpus/lan.dinat")),
    ("fubini.dinat", include_str!("../../corpus/fubini.dinat")),
    ("rift.dinat", include_str!("../../corpus/rift.dinat")),
    ("hom-lim.dinat", include_str!("../../corpus/hom-lim.dinat")),
    ("dinat-as-end.dinat", include_str!("../../corpus/dinat-as-end.dinat")),
    ("hom-rel-adj.dinat", include_str!("../../corpus/hom-rel-adj.dinat")),
];

/// Entry names every corpus build must provide.
pub const MANIFEST: &str = include_str!("../../corpus/MANIFEST");

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expectation {
    /// Must check.
    Accept,
    /// Must be rejected with this error class.
    Reject(String),
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub file: &'static str,
    pub sig: SignatureTable,
    pub derivation: Derivation,
    pub expected: Sequent,
    pub obligations: Vec<Obligation>,
    pub expectation: Expectation,
}

impl CorpusEntry {
    pub fn is_positive(&self) -> bool {
        self.expectation == Expectation::Accept
    }
}

/// Parses one embedded file; the files are fixed, so failure is a build bug.
pub fn parse_file(name: &str) -> DerivationFile {
    let (_, src) = FILES.iter().find(|(n, _)| *n == name).unwrap_or_else(|| panic!("no corpus file {name}"));
    parse_derivation(src).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Every entry, in file order.
pub fn corpus_entries() -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    for (file, _) in FILES {
        let f = parse_file(file);
        for d in &f.derivations {
            out.push(CorpusEntry {
                name: d.name.clone(),
                file,
                sig: f.sig.clone(),
                derivation: d.deriv.clone(),
                expected: d.deriv.concl.clone(),
                obligations: f.obligations.iter().filter(|o| o.target == d.name).cloned().collect(),
                expectation: d.reject.clone().map_or(Expectation::Accept, Expectation::Reject),
            });
        }
    }
    out
}

pub fn manifest_names() -> Vec<String> {
    MANIFEST.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with(';')).map(String::from).collect()
}
