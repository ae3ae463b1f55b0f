use std::fmt;

use crate::syntax::{Sequent, TermExpr};

/// Direction of an invertible derived rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    Fwd,
    Bwd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FubiniKind {
    /// `end x. end y. B` to `end y. end x. B`.
    Swap,
    /// `end x. end y. B` to `end p. B[fst p, snd p]`.
    Pair,
    /// `end p. B` to `end x. end y. B[<x, y>]`.
    Unpair,
}

/// Where a natural family is composed onto a dinatural one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NatSite {
    Goal,
    Hyp(String),
}

/// Inference rules. Parameters name variables and labels of the node's
/// conclusion unless noted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Id,
    Refl,
    Weaken(String),
    Pair,
    Proj1,
    Proj2,
    /// Labels of the premise moved into the goal.
    Curry(Vec<String>),
    Uncurry(Vec<String>),
    /// `var` names a premise variable, `term` is over the conclusion context.
    Reindex { var: String, term: TermExpr },
    J(String),
    /// The label names a hypothesis of the premise.
    JInv(String),
    /// Premises: the body derivation, then a derivation of the equality.
    JWithEq,
    EndIntro,
    EndElim,
    CoendIntro,
    CoendElim,
    Exchange(String, String),
    /// Splits `p` into the fresh premise variables `x`, `y`.
    PairCtx(String, String, String),
    /// Merges `x`, `y` into the fresh premise variable `p`.
    UnpairCtx(String, String, String),
    OpVar(String),
    ImpFunc,
    Hole(String),
    /// Premises: a natural family, then the derivation it is composed with.
    NatCut(NatSite),
    Yoneda,
    YonedaInv,
    CoYoneda,
    CoYonedaInv,
    YonedaGoal(Dir),
    CoYonedaHyp(String, Dir),
    Fubini(FubiniKind),
    CoendFrobenius(Dir),
    HomRelAdj(String),
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Id => "id",
            Rule::Refl => "refl",
            Rule::Weaken(_) => "weaken",
            Rule::Pair => "pair",
            Rule::Proj1 => "proj1",
            Rule::Proj2 => "proj2",
            Rule::Curry(_) => "curry",
            Rule::Uncurry(_) => "uncurry",
            Rule::Reindex { .. } => "reindex",
            Rule::J(_) => "j",
            Rule::JInv(_) => "jinv",
            Rule::JWithEq => "j-with-eq",
            Rule::EndIntro => "end-intro",
            Rule::EndElim => "end-elim",
            Rule::CoendIntro => "coend-intro",
            Rule::CoendElim => "coend-elim",
            Rule::Exchange(..) => "exchange",
            Rule::PairCtx(..) => "pair-ctx",
            Rule::UnpairCtx(..) => "unpair-ctx",
            Rule::OpVar(_) => "op-var",
            Rule::ImpFunc => "imp-func",
            Rule::Hole(_) => "hole",
            Rule::NatCut(_) => "nat-cut",
            Rule::Yoneda => "yoneda",
            Rule::YonedaInv => "yoneda-inv",
            Rule::CoYoneda => "coyoneda",
            Rule::CoYonedaInv => "coyoneda-inv",
            Rule::YonedaGoal(_) => "yoneda-goal",
            Rule::CoYonedaHyp(..) => "coyoneda-hyp",
            Rule::Fubini(_) => "fubini",
            Rule::CoendFrobenius(_) => "coend-frobenius",
            Rule::HomRelAdj(_) => "hom-rel-adj",
        }
    }

    /// Number of premises the rule takes.
    pub fn arity(&self) -> usize {
        match self {
            Rule::Id | Rule::Refl | Rule::Hole(_) => 0,
            Rule::Pair | Rule::JWithEq | Rule::ImpFunc | Rule::NatCut(_) => 2,
            _ => 1,
        }
    }

    /// Derived rules checked and evaluated through their expansion.
    pub fn is_macro(&self) -> bool {
        matches!(
            self,
            Rule::Yoneda
                | Rule::YonedaInv
                | Rule::CoYoneda
                | Rule::CoYonedaInv
                | Rule::YonedaGoal(_)
                | Rule::CoYonedaHyp(..)
                | Rule::Fubini(_)
                | Rule::CoendFrobenius(_)
                | Rule::HomRelAdj(_)
        )
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = |d: &Dir| if *d == Dir::Fwd { "fwd" } else { "bwd" };
        match self {
            Rule::Weaken(l) | Rule::J(l) | Rule::JInv(l) | Rule::OpVar(l) | Rule::Hole(l) | Rule::HomRelAdj(l) => {
                write!(f, "{} {l}", self.name())
            }
            Rule::Curry(ls) | Rule::Uncurry(ls) => write!(f, "{} [{}]", self.name(), ls.join(" ")),
            Rule::Reindex { var, term } => write!(f, "reindex {var} {term}"),
            Rule::Exchange(x, y) => write!(f, "exchange {x} {y}"),
            Rule::PairCtx(x, y, p) => write!(f, "pair-ctx {x} {y} {p}"),
            Rule::UnpairCtx(p, x, y) => write!(f, "unpair-ctx {p} {x} {y}"),
            Rule::NatCut(NatSite::Goal) => write!(f, "nat-cut :goal"),
            Rule::NatCut(NatSite::Hyp(l)) => write!(f, "nat-cut {l}"),
            Rule::YonedaGoal(d) | Rule::CoendFrobenius(d) => write!(f, "{} {}", self.name(), dir(d)),
            Rule::CoYonedaHyp(l, d) => write!(f, "coyoneda-hyp {l} {}", dir(d)),
            Rule::Fubini(k) => {
                let k = match k {
                    FubiniKind::Swap => "swap",
                    FubiniKind::Pair => "pair",
                    FubiniKind::Unpair => "unpair",
                };
                write!(f, "fubini {k}")
            }
            _ => write!(f, "{}", self.name()),
        }
    }
}

/// A derivation tree; every node stores its claimed conclusion.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    pub rule: Rule,
    pub concl: Sequent,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn new(rule: Rule, concl: Sequent, premises: Vec<Derivation>) -> Self {
        Derivation { rule, concl, premises }
    }

    pub fn leaf(rule: Rule, concl: Sequent) -> Self {
        Derivation { rule, concl, premises: Vec::new() }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(|p| p.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.premises.iter().map(|p| p.depth()).max().unwrap_or(0)
    }

    /// Names of the holes in the tree, left to right.
    pub fn holes(&self, out: &mut Vec<String>) {
        if let Rule::Hole(n) = &self.rule {
            out.push(n.clone());
        }
        self.premises.iter().for_each(|p| p.holes(out));
    }
}
