use std::collections::{BTreeMap, BTreeSet};

use super::cat::CatExpr;
use super::term::Polarity;
use super::SyntaxError;

/// One argument slot of an atom: `(E, Pos)` takes a term of type `E`,
/// `(E, Neg)` a term of type `E^op`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Slot {
    pub cat: CatExpr,
    pub polarity: Polarity,
}

impl Slot {
    pub fn new(cat: CatExpr, polarity: Polarity) -> Self {
        Slot { cat: cat.normalize(), polarity }
    }

    /// Type a term must have to fill this slot.
    pub fn arg_type(&self) -> CatExpr {
        match self.polarity {
            Polarity::Pos => self.cat.normalize(),
            Polarity::Neg => self.cat.dual(),
        }
    }
}

/// Functor symbol `F : D1 * ... * Dn -> E`, taking `n` arguments.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FunctorSig {
    pub dom: Vec<CatExpr>,
    pub cod: CatExpr,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignatureTable {
    pub cats: BTreeSet<String>,
    pub atoms: BTreeMap<String, Vec<Slot>>,
    pub functors: BTreeMap<String, FunctorSig>,
}

impl SignatureTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn taken(&self, name: &str) -> bool {
        self.cats.contains(name) || self.atoms.contains_key(name) || self.functors.contains_key(name)
    }

    pub fn declare_cat(&mut self, name: &str) -> Result<(), SyntaxError> {
        if self.taken(name) {
            return Err(SyntaxError::DuplicateName(name.to_string()));
        }
        self.cats.insert(name.to_string());
        Ok(())
    }

    pub fn declare_atom(&mut self, name: &str, slots: Vec<Slot>) -> Result<(), SyntaxError> {
        if self.taken(name) {
            return Err(SyntaxError::DuplicateName(name.to_string()));
        }
        for s in &slots {
            self.check_cat(&s.cat)?;
        }
        let slots = slots.into_iter().map(|s| Slot::new(s.cat, s.polarity)).collect();
        self.atoms.insert(name.to_string(), slots);
        Ok(())
    }

    pub fn declare_functor(&mut self, name: &str, dom: Vec<CatExpr>, cod: CatExpr) -> Result<(), SyntaxError> {
        if self.taken(name) {
            return Err(SyntaxError::DuplicateName(name.to_string()));
        }
        for c in dom.iter().chain(std::iter::once(&cod)) {
            self.check_cat(c)?;
        }
        let sig = FunctorSig {
            dom: dom.iter().map(|c| c.normalize()).collect(),
            cod: cod.normalize(),
        };
        self.functors.insert(name.to_string(), sig);
        Ok(())
    }

    /// Every base name in `c` must be a declared category.
    pub fn check_cat(&self, c: &CatExpr) -> Result<(), SyntaxError> {
        let mut names = Vec::new();
        c.bases(&mut names);
        match names.into_iter().find(|n| !self.cats.contains(n)) {
            Some(n) => Err(SyntaxError::UnknownCategory(n)),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_names_are_rejected() {
        let mut sig = SignatureTable::new();
        sig.declare_cat("C").unwrap();
        assert!(sig.declare_atom("C", vec![]).is_err());
        assert!(matches!(
            sig.declare_atom("P", vec![Slot::new(CatExpr::base("D"), Polarity::Pos)]),
            Err(SyntaxError::UnknownCategory(_))
        ));
    }

    #[test]
    fn negative_slots_take_opposite_terms() {
        let s = Slot::new(CatExpr::base("C"), Polarity::Neg);
        assert_eq!(s.arg_type(), CatExpr::base("C").op());
    }
}
