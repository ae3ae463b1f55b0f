use std::collections::BTreeSet;
use std::fmt;

use super::cat::CatExpr;
use super::signature::SignatureTable;
use super::term::{Polarity, TermExpr};
use super::SyntaxError;

/// Dipresheaf formulas. `Hom(C, s, t)` expects `s : C^op` and `t : C`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Hom(CatExpr, TermExpr, TermExpr),
    Atom(String, Vec<TermExpr>),
    And(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    End(String, CatExpr, Box<Formula>),
    Coend(String, CatExpr, Box<Formula>),
}

/// One step of a position inside a formula or term.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathStep {
    Left,
    Right,
    HomSrc,
    HomTgt,
    Arg(usize),
    Body,
    Fst,
    Snd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub path: Vec<PathStep>,
    pub polarity: Polarity,
}

/// Right-nested conjunction of a hypothesis list, `T` when empty.
pub fn ctx_formula<'a, I>(hyps: I) -> Formula
where
    I: IntoIterator<Item = &'a Formula>,
    I::IntoIter: DoubleEndedIterator,
{
    let mut it = hyps.into_iter().rev();
    match it.next() {
        None => Formula::Top,
        Some(last) => it.fold(last.clone(), |acc, f| Formula::and(f.clone(), acc)),
    }
}

/// Picks `base`, `base'`, `base''`, ... avoiding every name in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = base.to_string();
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

impl Formula {
    pub fn atom(name: impl Into<String>, args: Vec<TermExpr>) -> Self {
        Formula::Atom(name.into(), args)
    }

    pub fn hom(cat: CatExpr, s: TermExpr, t: TermExpr) -> Self {
        Formula::Hom(cat.normalize(), s, t)
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn end(x: impl Into<String>, cat: CatExpr, body: Formula) -> Self {
        Formula::End(x.into(), cat.normalize(), Box::new(body))
    }

    pub fn coend(x: impl Into<String>, cat: CatExpr, body: Formula) -> Self {
        Formula::Coend(x.into(), cat.normalize(), Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Top => {}
            Formula::Hom(_, s, t) => {
                s.free_vars(out);
                t.free_vars(out);
            }
            Formula::Atom(_, args) => args.iter().for_each(|a| a.free_vars(out)),
            Formula::And(a, b) | Formula::Imp(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::End(x, _, body) | Formula::Coend(x, _, body) => {
                let mut inner = BTreeSet::new();
                body.collect_free(&mut inner);
                inner.remove(x);
                out.extend(inner);
            }
        }
    }

    /// Every name used anywhere, bound or free.
    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::End(x, _, body) | Formula::Coend(x, _, body) => {
                out.insert(x.clone());
                body.all_names(out);
            }
            Formula::And(a, b) | Formula::Imp(a, b) => {
                a.all_names(out);
                b.all_names(out);
            }
            _ => self.collect_free(out),
        }
    }

    pub fn mentions(&self, v: &str) -> bool {
        self.free_vars().contains(v)
    }

    /// Free occurrences of `v` with their variance; `Imp` flips on the left.
    pub fn occurrences(&self, v: &str) -> Vec<Occurrence> {
        let mut out = Vec::new();
        self.occ(v, Polarity::Pos, &mut Vec::new(), &mut out);
        out
    }

    fn occ(&self, v: &str, pol: Polarity, path: &mut Vec<PathStep>, out: &mut Vec<Occurrence>) {
        match self {
            Formula::Top => {}
            Formula::Hom(_, s, t) => {
                path.push(PathStep::HomSrc);
                term_occ(s, v, pol, path, out);
                path.pop();
                path.push(PathStep::HomTgt);
                term_occ(t, v, pol, path, out);
                path.pop();
            }
            Formula::Atom(_, args) => {
                for (i, a) in args.iter().enumerate() {
                    path.push(PathStep::Arg(i));
                    term_occ(a, v, pol, path, out);
                    path.pop();
                }
            }
            Formula::And(a, b) | Formula::Imp(a, b) => {
                let left = if matches!(self, Formula::Imp(..)) { pol.flip() } else { pol };
                path.push(PathStep::Left);
                a.occ(v, left, path, out);
                path.pop();
                path.push(PathStep::Right);
                b.occ(v, pol, path, out);
                path.pop();
            }
            Formula::End(x, _, body) | Formula::Coend(x, _, body) => {
                if x != v {
                    path.push(PathStep::Body);
                    body.occ(v, pol, path, out);
                    path.pop();
                }
            }
        }
    }

    /// Capture-avoiding substitution; `~v` receives the op-image of `t`.
    pub fn substitute(&self, v: &str, t: &TermExpr) -> Formula {
        let mut fv = BTreeSet::new();
        t.free_vars(&mut fv);
        self.subst(v, t, &fv)
    }

    fn subst(&self, v: &str, t: &TermExpr, fv: &BTreeSet<String>) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Hom(c, s, u) => Formula::Hom(c.clone(), s.substitute(v, t), u.substitute(v, t)),
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|a| a.substitute(v, t)).collect()),
            Formula::And(a, b) => Formula::and(a.subst(v, t, fv), b.subst(v, t, fv)),
            Formula::Imp(a, b) => Formula::imp(a.subst(v, t, fv), b.subst(v, t, fv)),
            Formula::End(x, c, body) | Formula::Coend(x, c, body) => {
                if x == v || !body.mentions(v) {
                    return self.clone();
                }
                let (x, body) = if fv.contains(x) {
                    let mut avoid = fv.clone();
                    body.all_names(&mut avoid);
                    avoid.insert(v.to_string());
                    let y = fresh_name(x, &avoid);
                    let renamed = body.subst(x, &TermExpr::var(y.clone()), &BTreeSet::from([y.clone()]));
                    (y, renamed)
                } else {
                    (x.clone(), (**body).clone())
                };
                let body = Box::new(body.subst(v, t, fv));
                if matches!(self, Formula::End(..)) {
                    Formula::End(x, c.clone(), body)
                } else {
                    Formula::Coend(x, c.clone(), body)
                }
            }
        }
    }

    /// Renames a free variable, keeping annotations.
    pub fn rename(&self, from: &str, to: &str) -> Formula {
        if from == to {
            return self.clone();
        }
        self.substitute(from, &TermExpr::var(to))
    }

    /// Normal form of every category and term inside.
    pub fn normalize(&self) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Hom(c, s, t) => Formula::Hom(c.normalize(), s.normalize(), t.normalize()),
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(|a| a.normalize()).collect()),
            Formula::And(a, b) => Formula::and(a.normalize(), b.normalize()),
            Formula::Imp(a, b) => Formula::imp(a.normalize(), b.normalize()),
            Formula::End(x, c, b) => Formula::end(x.clone(), c.clone(), b.normalize()),
            Formula::Coend(x, c, b) => Formula::coend(x.clone(), c.clone(), b.normalize()),
        }
    }

    /// Renames free variables through `scope` (innermost last) and binders to
    /// depth-indexed names, so alpha-equivalent formulas become identical.
    pub fn canon(&self, scope: &mut Vec<(String, String)>) -> Formula {
        let look = |scope: &Vec<(String, String)>, n: &str| -> String {
            scope
                .iter()
                .rev()
                .find(|(k, _)| k == n)
                .map(|(_, v)| v.clone())
                .unwrap_or_else(|| n.to_string())
        };
        match self {
            Formula::Top => Formula::Top,
            Formula::Hom(c, s, t) => {
                Formula::Hom(c.clone(), s.map_names(&|n| look(scope, n)), t.map_names(&|n| look(scope, n)))
            }
            Formula::Atom(p, args) => {
                Formula::Atom(p.clone(), args.iter().map(|a| a.map_names(&|n| look(scope, n))).collect())
            }
            Formula::And(a, b) => Formula::and(a.canon(scope), b.canon(scope)),
            Formula::Imp(a, b) => Formula::imp(a.canon(scope), b.canon(scope)),
            Formula::End(x, c, body) | Formula::Coend(x, c, body) => {
                let bound = format!("#b{}", scope.len());
                scope.push((x.clone(), bound.clone()));
                let body = Box::new(body.canon(scope));
                scope.pop();
                if matches!(self, Formula::End(..)) {
                    Formula::End(bound, c.clone(), body)
                } else {
                    Formula::Coend(bound, c.clone(), body)
                }
            }
        }
    }

    /// Equality up to renaming of `End`/`Coend` binders.
    pub fn alpha_equal(&self, other: &Formula) -> bool {
        self.canon(&mut Vec::new()) == other.canon(&mut Vec::new())
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Top => 1,
            Formula::Hom(_, s, t) => 1 + s.size() + t.size(),
            Formula::Atom(_, args) => 1 + args.iter().map(|a| a.size()).sum::<usize>(),
            Formula::And(a, b) | Formula::Imp(a, b) => 1 + a.size() + b.size(),
            Formula::End(_, _, b) | Formula::Coend(_, _, b) => 1 + b.size(),
        }
    }

    /// Well-formedness against the context and signature.
    pub fn check(&self, ctx: &mut Vec<(String, CatExpr)>, sig: &SignatureTable) -> Result<(), SyntaxError> {
        match self {
            Formula::Top => Ok(()),
            Formula::Hom(c, s, t) => {
                sig.check_cat(c)?;
                let (want_s, want_t) = (c.dual(), c.normalize());
                let (got_s, got_t) = (s.type_of(ctx, sig)?, t.type_of(ctx, sig)?);
                if got_s != want_s {
                    return Err(SyntaxError::TypeMismatch { at: format!("source of {self}"), expected: want_s, found: got_s });
                }
                if got_t != want_t {
                    return Err(SyntaxError::TypeMismatch { at: format!("target of {self}"), expected: want_t, found: got_t });
                }
                Ok(())
            }
            Formula::Atom(p, args) => {
                let slots = sig.atoms.get(p).ok_or_else(|| SyntaxError::UnknownAtom(p.clone()))?;
                if slots.len() != args.len() {
                    return Err(SyntaxError::ArityMismatch { symbol: p.clone(), expected: slots.len(), found: args.len() });
                }
                for (i, (slot, a)) in slots.iter().zip(args).enumerate() {
                    let got = a.type_of(ctx, sig)?;
                    if got != slot.arg_type() {
                        return Err(SyntaxError::TypeMismatch {
                            at: format!("argument {} of {self}", i + 1),
                            expected: slot.arg_type(),
                            found: got,
                        });
                    }
                }
                Ok(())
            }
            Formula::And(a, b) | Formula::Imp(a, b) => {
                a.check(ctx, sig)?;
                b.check(ctx, sig)
            }
            Formula::End(x, c, body) | Formula::Coend(x, c, body) => {
                sig.check_cat(c)?;
                ctx.push((x.clone(), c.normalize()));
                let r = body.check(ctx, sig);
                ctx.pop();
                r
            }
        }
    }

    fn is_binder(&self) -> bool {
        matches!(self, Formula::End(..) | Formula::Coend(..))
    }

    fn fmt_top(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::End(x, c, body) | Formula::Coend(x, c, body) => {
                let kw = if matches!(self, Formula::End(..)) { "end" } else { "coend" };
                write!(f, "{kw} {x}: {c}. ")?;
                body.fmt_top(f)
            }
            Formula::Imp(a, b) => {
                a.fmt_operand(f)?;
                write!(f, " => ")?;
                b.fmt_top(f)
            }
            _ => self.fmt_and(f),
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_binder() || matches!(self, Formula::Imp(..)) {
            write!(f, "(")?;
            self.fmt_top(f)?;
            write!(f, ")")
        } else {
            self.fmt_and(f)
        }
    }

    fn fmt_and(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::And(a, b) => {
                a.fmt_prim(f)?;
                write!(f, " * ")?;
                b.fmt_operand(f)
            }
            _ => self.fmt_prim(f),
        }
    }

    fn fmt_prim(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => write!(f, "T"),
            Formula::Hom(_, s, t) => write!(f, "hom({s}, {t})"),
            Formula::Atom(p, args) if args.is_empty() => write!(f, "{p}"),
            Formula::Atom(p, args) => {
                write!(f, "{p}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            _ => {
                write!(f, "(")?;
                self.fmt_top(f)?;
                write!(f, ")")
            }
        }
    }
}

fn term_occ(t: &TermExpr, v: &str, pol: Polarity, path: &mut Vec<PathStep>, out: &mut Vec<Occurrence>) {
    match t {
        TermExpr::Var(n, p) if n == v => out.push(Occurrence { path: path.clone(), polarity: pol.times(*p) }),
        TermExpr::Var(..) | TermExpr::Unit => {}
        TermExpr::App(_, _, args) => {
            for (i, a) in args.iter().enumerate() {
                path.push(PathStep::Arg(i));
                term_occ(a, v, pol, path, out);
                path.pop();
            }
        }
        TermExpr::Pair(a, b) => {
            path.push(PathStep::Left);
            term_occ(a, v, pol, path, out);
            path.pop();
            path.push(PathStep::Right);
            term_occ(b, v, pol, path, out);
            path.pop();
        }
        TermExpr::Fst(x) | TermExpr::Snd(x) => {
            path.push(if matches!(t, TermExpr::Fst(_)) { PathStep::Fst } else { PathStep::Snd });
            term_occ(x, v, pol, path, out);
            path.pop();
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_top(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c() -> CatExpr {
        CatExpr::base("C")
    }

    fn p(args: Vec<TermExpr>) -> Formula {
        Formula::atom("P", args)
    }

    #[test]
    fn hom_source_is_negative() {
        let f = Formula::hom(c(), TermExpr::neg("x"), TermExpr::var("y"));
        let occ = f.occurrences("x");
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].polarity, Polarity::Neg);
        assert!(Formula::Top.occurrences("x").is_empty());
    }

    #[test]
    fn implication_flips_its_left_side() {
        let f = Formula::imp(p(vec![TermExpr::var("x")]), p(vec![TermExpr::var("x")]));
        let pols: Vec<_> = f.occurrences("x").into_iter().map(|o| o.polarity).collect();
        assert_eq!(pols, vec![Polarity::Neg, Polarity::Pos]);
    }

    #[test]
    fn substitution_reaches_negative_slots_through_op() {
        let f = Formula::hom(c(), TermExpr::neg("x"), TermExpr::var("y"));
        let g = f.substitute("y", &TermExpr::app("F", vec![TermExpr::var("z")]));
        assert_eq!(g.to_string(), "hom(~x, F(z))");
        let g = f.substitute("x", &TermExpr::app("F", vec![TermExpr::var("z")]));
        assert_eq!(g.to_string(), "hom(F^op(~z), y)");
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = Formula::end("x", c(), p(vec![TermExpr::neg("x"), TermExpr::var("v")]));
        let g = f.substitute("v", &TermExpr::var("x"));
        assert_eq!(g.to_string(), "end x': C. P(~x', x)");
        assert!(g.mentions("x"));
    }

    #[test]
    fn binders_are_alpha_convertible() {
        let a = Formula::end("x", c(), p(vec![TermExpr::neg("x"), TermExpr::var("x")]));
        let b = Formula::end("c", c(), p(vec![TermExpr::neg("c"), TermExpr::var("c")]));
        assert!(a.alpha_equal(&b));
        assert!(!p(vec![TermExpr::var("x")]).alpha_equal(&p(vec![TermExpr::var("y")])));
    }

    #[test]
    fn printing_brackets_binders_in_operands() {
        let body = p(vec![TermExpr::neg("x"), TermExpr::var("x")]);
        let f = Formula::imp(Formula::coend("x", c(), body.clone()), Formula::atom("X", vec![]));
        assert_eq!(f.to_string(), "(coend x: C. P(~x, x)) => X");
        let g = Formula::imp(Formula::atom("X", vec![]), Formula::end("x", c(), body));
        assert_eq!(g.to_string(), "X => end x: C. P(~x, x)");
    }

    #[test]
    fn context_formula_nests_to_the_right() {
        let (a, b, d) = (Formula::atom("A", vec![]), Formula::atom("B", vec![]), Formula::atom("D", vec![]));
        assert_eq!(ctx_formula(&[a.clone(), b.clone(), d.clone()]), Formula::and(a, Formula::and(b, d)));
        assert_eq!(ctx_formula(&[] as &[Formula]), Formula::Top);
    }
}
