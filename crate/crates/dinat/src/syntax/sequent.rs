use std::collections::BTreeSet;
use std::fmt;

use super::cat::CatExpr;
use super::formula::{ctx_formula, fresh_name, Formula};
use super::signature::SignatureTable;
use super::term::TermExpr;
use super::SyntaxError;

/// `[ctx] hyps |- goal`. The context binds its variables and the hypothesis
/// list binds its labels, so sequents compare up to renaming of both.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub ctx: Vec<(String, CatExpr)>,
    pub hyps: Vec<(String, Formula)>,
    pub goal: Formula,
}

impl Sequent {
    pub fn new(ctx: Vec<(String, CatExpr)>, hyps: Vec<(String, Formula)>, goal: Formula) -> Self {
        Sequent {
            ctx: ctx.into_iter().map(|(n, c)| (n, c.normalize())).collect(),
            hyps: hyps.into_iter().map(|(l, f)| (l, f.normalize())).collect(),
            goal: goal.normalize(),
        }
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.ctx.iter().position(|(n, _)| n == name)
    }

    pub fn hyp_index(&self, label: &str) -> Option<usize> {
        self.hyps.iter().position(|(l, _)| l == label)
    }

    pub fn hyp(&self, label: &str) -> Option<&Formula> {
        self.hyps.iter().find(|(l, _)| l == label).map(|(_, f)| f)
    }

    pub fn var_type(&self, name: &str) -> Option<&CatExpr> {
        self.ctx.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    pub fn hyp_formulas(&self) -> Vec<Formula> {
        self.hyps.iter().map(|(_, f)| f.clone()).collect()
    }

    /// The hypotheses as one formula, right-nested.
    pub fn context_formula(&self) -> Formula {
        ctx_formula(&self.hyp_formulas())
    }

    /// All variable names and labels in use, for fresh-name generation.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.ctx.iter().map(|(n, _)| n.clone()).collect();
        for (l, f) in &self.hyps {
            out.insert(l.clone());
            f.all_names(&mut out);
        }
        self.goal.all_names(&mut out);
        out
    }

    pub fn fresh_var(&self, base: &str) -> String {
        fresh_name(base, &self.names())
    }

    pub fn fresh_label(&self, base: &str) -> String {
        fresh_name(base, &self.names())
    }

    pub fn with_goal(&self, goal: Formula) -> Sequent {
        Sequent { ctx: self.ctx.clone(), hyps: self.hyps.clone(), goal: goal.normalize() }
    }

    /// Substitutes a term for a variable everywhere in hypotheses and goal.
    pub fn substitute(&self, v: &str, t: &TermExpr) -> (Vec<(String, Formula)>, Formula) {
        let hyps = self.hyps.iter().map(|(l, f)| (l.clone(), f.substitute(v, t))).collect();
        (hyps, self.goal.substitute(v, t))
    }

    /// Context variables and labels renamed positionally.
    pub fn canon(&self) -> Sequent {
        let mut scope: Vec<(String, String)> =
            self.ctx.iter().enumerate().map(|(i, (n, _))| (n.clone(), format!("#v{i}"))).collect();
        let ctx = self.ctx.iter().enumerate().map(|(i, (_, c))| (format!("#v{i}"), c.clone())).collect();
        let hyps = self
            .hyps
            .iter()
            .enumerate()
            .map(|(i, (_, f))| (format!("#h{i}"), f.canon(&mut scope)))
            .collect();
        let goal = self.goal.canon(&mut scope);
        Sequent { ctx, hyps, goal }
    }

    pub fn alpha_equal(&self, other: &Sequent) -> bool {
        self.ctx.len() == other.ctx.len() && self.hyps.len() == other.hyps.len() && self.canon() == other.canon()
    }

    /// Distinct names and labels, every formula well-formed.
    pub fn check(&self, sig: &SignatureTable) -> Result<(), SyntaxError> {
        let mut seen = BTreeSet::new();
        for (n, c) in &self.ctx {
            if !seen.insert(n.clone()) {
                return Err(SyntaxError::DuplicateName(n.clone()));
            }
            sig.check_cat(c)?;
        }
        let mut labels = BTreeSet::new();
        let mut ctx = self.ctx.clone();
        for (l, f) in &self.hyps {
            if !labels.insert(l.clone()) {
                return Err(SyntaxError::DuplicateName(l.clone()));
            }
            f.check(&mut ctx, sig)?;
        }
        self.goal.check(&mut ctx, sig)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{[")?;
        for (i, (n, c)) in self.ctx.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}: {c}")?;
        }
        write!(f, "]")?;
        for (i, (l, h)) in self.hyps.iter().enumerate() {
            write!(f, "{}{l}: {h}", if i == 0 { " " } else { ", " })?;
        }
        write!(f, " |- {}}}", self.goal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::TermExpr;

    fn hom(s: TermExpr, t: TermExpr) -> Formula {
        Formula::hom(CatExpr::base("C"), s, t)
    }

    #[test]
    fn sequents_compare_up_to_renaming() {
        let c = CatExpr::base("C");
        let a = Sequent::new(
            vec![("a".into(), c.clone()), ("b".into(), c.clone())],
            vec![("f".into(), hom(TermExpr::neg("a"), TermExpr::var("b")))],
            hom(TermExpr::neg("a"), TermExpr::var("b")),
        );
        let b = Sequent::new(
            vec![("x".into(), c.clone()), ("y".into(), c.clone())],
            vec![("g".into(), hom(TermExpr::neg("x"), TermExpr::var("y")))],
            hom(TermExpr::neg("x"), TermExpr::var("y")),
        );
        assert!(a.alpha_equal(&b));
        let swapped = Sequent::new(b.ctx.iter().rev().cloned().collect(), b.hyps.clone(), b.goal.clone());
        assert!(!a.alpha_equal(&swapped));
    }

    #[test]
    fn display_matches_concrete_syntax() {
        let s = Sequent::new(
            vec![("x".into(), CatExpr::base("C"))],
            vec![("k".into(), Formula::atom("P", vec![TermExpr::neg("x"), TermExpr::var("x")]))],
            Formula::Top,
        );
        assert_eq!(s.to_string(), "{[x: C] k: P(~x, x) |- T}");
    }
}
