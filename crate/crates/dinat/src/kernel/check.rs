use std::collections::BTreeSet;

use super::deriv::{Derivation, NatSite, Rule};
use super::jrule::{j_premise, JFailure};
use super::macros::expansion;
use super::KernelError;
use crate::syntax::{ctx_formula, Formula, Polarity, Sequent, SignatureTable, TermExpr};

/// Checks every node and returns the root conclusion.
pub fn check_derivation(d: &Derivation, sig: &SignatureTable) -> Result<Sequent, KernelError> {
    check_at(d, sig, "root")?;
    Ok(d.concl.clone())
}

fn check_at(d: &Derivation, sig: &SignatureTable, path: &str) -> Result<(), KernelError> {
    for (i, p) in d.premises.iter().enumerate() {
        check_at(p, sig, &format!("{path}.{i}"))?;
    }
    check_node(d, sig, &format!("{} at {path}", d.rule))
}

fn schema(node: &str, reason: impl Into<String>) -> KernelError {
    KernelError::SchemaMismatch { node: node.to_string(), reason: reason.into() }
}

pub(crate) fn from_j_failure(node: &str, f: JFailure) -> KernelError {
    match f {
        JFailure::Schema(r) => schema(node, r),
        JFailure::Variance { variable, occurrence } => {
            KernelError::VarianceViolation { node: node.to_string(), variable, occurrence }
        }
    }
}

fn expect(node: &str, what: &str, expected: &Sequent, found: &Sequent) -> Result<(), KernelError> {
    if expected.alpha_equal(found) {
        Ok(())
    } else {
        Err(schema(node, format!("{what}: expected {expected}, found {found}")))
    }
}

/// `s` with its variables and labels renamed positionally to those of `like`.
pub fn relabel(s: &Sequent, like: &Sequent) -> Sequent {
    let tmp = |i: usize| format!("#t{i}");
    let mut hyps = s.hyps.clone();
    let mut goal = s.goal.clone();
    let steps: Vec<(String, String)> = s.ctx.iter().enumerate().map(|(i, (n, _))| (n.clone(), tmp(i))).collect();
    let back: Vec<(String, String)> = like.ctx.iter().enumerate().map(|(i, (n, _))| (tmp(i), n.clone())).collect();
    for (from, to) in steps.iter().chain(back.iter()) {
        hyps = hyps.into_iter().map(|(l, f)| (l, f.rename(from, to))).collect();
        goal = goal.rename(from, to);
    }
    let ctx = s
        .ctx
        .iter()
        .enumerate()
        .map(|(i, (n, c))| (like.ctx.get(i).map_or(n.clone(), |(m, _)| m.clone()), c.clone()))
        .collect();
    let hyps = hyps
        .into_iter()
        .enumerate()
        .map(|(i, (l, f))| (like.hyps.get(i).map_or(l, |(m, _)| m.clone()), f))
        .collect();
    Sequent { ctx, hyps, goal }
}

fn without_labels(s: &Sequent, labels: &[String]) -> Vec<(String, Formula)> {
    s.hyps.iter().filter(|(l, _)| !labels.contains(l)).cloned().collect()
}

fn listed(node: &str, s: &Sequent, labels: &[String]) -> Result<Vec<Formula>, KernelError> {
    let distinct: BTreeSet<&String> = labels.iter().collect();
    if distinct.len() != labels.len() {
        return Err(schema(node, "repeated label"));
    }
    labels
        .iter()
        .map(|l| s.hyp(l).cloned().ok_or_else(|| schema(node, format!("no hypothesis `{l}`"))))
        .collect()
}

fn map_formulas(s: &Sequent, f: impl Fn(&Formula) -> Formula) -> (Vec<(String, Formula)>, Formula) {
    (s.hyps.iter().map(|(l, h)| (l.clone(), f(h))).collect(), f(&s.goal))
}

/// Checks one node against its rule, trusting the premises' conclusions.
pub fn check_node(d: &Derivation, sig: &SignatureTable, node: &str) -> Result<(), KernelError> {
    let c = &d.concl;
    c.check(sig).map_err(|error| KernelError::Syntax { node: node.to_string(), error })?;
    if d.premises.len() != d.rule.arity() {
        return Err(schema(node, format!("expected {} premises, found {}", d.rule.arity(), d.premises.len())));
    }
    let p = |i: usize| &d.premises[i].concl;
    match &d.rule {
        Rule::Id => {
            if c.hyps.len() != 1 || !c.hyps[0].1.alpha_equal(&c.goal) {
                return Err(schema(node, "identity needs exactly one hypothesis equal to the goal"));
            }
        }
        Rule::Refl => match &c.goal {
            Formula::Hom(_, s, t) if c.hyps.is_empty() && s.normalize() == t.op_image().normalize() => {}
            _ => return Err(schema(node, "refl concludes `hom(~t, t)` from no hypotheses")),
        },
        Rule::Hole(_) => {}
        Rule::Weaken(l) => {
            if c.hyp(l).is_none() {
                return Err(schema(node, format!("no hypothesis `{l}`")));
            }
            let e = Sequent::new(c.ctx.clone(), without_labels(c, std::slice::from_ref(l)), c.goal.clone());
            expect(node, "premise", &e, p(0))?;
        }
        Rule::Pair => match &c.goal {
            Formula::And(a, b) => {
                expect(node, "first premise", &c.with_goal((**a).clone()), p(0))?;
                expect(node, "second premise", &c.with_goal((**b).clone()), p(1))?;
            }
            _ => return Err(schema(node, "goal is not a conjunction")),
        },
        Rule::Proj1 | Rule::Proj2 => match &p(0).goal {
            Formula::And(a, b) => {
                let g = if d.rule == Rule::Proj1 { a } else { b };
                expect(node, "conclusion", &p(0).with_goal((**g).clone()), c)?;
            }
            _ => return Err(schema(node, "premise goal is not a conjunction")),
        },
        Rule::Curry(labels) => {
            let fs = listed(node, p(0), labels)?;
            let e = Sequent::new(
                p(0).ctx.clone(),
                without_labels(p(0), labels),
                Formula::imp(ctx_formula(&fs), p(0).goal.clone()),
            );
            expect(node, "conclusion", &e, c)?;
        }
        Rule::Uncurry(labels) => {
            let fs = listed(node, c, labels)?;
            let e = Sequent::new(c.ctx.clone(), without_labels(c, labels), Formula::imp(ctx_formula(&fs), c.goal.clone()));
            expect(node, "premise", &e, p(0))?;
        }
        Rule::Reindex { var, term } => {
            let sub = p(0);
            let ty = sub.var_type(var).ok_or_else(|| schema(node, format!("premise has no variable `{var}`")))?;
            let got = term.type_of(&c.ctx, sig).map_err(|error| KernelError::Syntax { node: node.to_string(), error })?;
            if got != ty.normalize() {
                return Err(schema(node, format!("`{term}` has type {got}, `{var}` has type {ty}")));
            }
            for (n, t) in sub.ctx.iter().filter(|(n, _)| n != var) {
                if c.var_type(n) != Some(t) {
                    return Err(schema(node, format!("premise variable `{n}: {t}` is not in the conclusion")));
                }
            }
            let (hyps, goal) = sub.substitute(var, term);
            expect(node, "conclusion", &Sequent::new(c.ctx.clone(), hyps, goal), c)?;
        }
        Rule::J(e) => {
            let e = j_premise(c, e).map_err(|f| from_j_failure(node, f))?;
            expect(node, "premise", &e, p(0))?;
        }
        Rule::JInv(e) => {
            let e = j_premise(p(0), e).map_err(|f| from_j_failure(node, f))?;
            expect(node, "conclusion", &e, c)?;
        }
        Rule::JWithEq => {
            let eqd = p(1);
            let shape = |s: &Sequent| Sequent::new(s.ctx.clone(), s.hyps.clone(), Formula::Top);
            if eqd.ctx.len() != c.ctx.len() || eqd.hyps.len() != c.hyps.len() || !shape(eqd).alpha_equal(&shape(c)) {
                return Err(schema(node, "the equality must be derived in the conclusion's context"));
            }
            let eqd = relabel(eqd, c);
            if !matches!(&eqd.goal, Formula::Hom(_, TermExpr::Var(..), TermExpr::Var(..))) {
                return Err(schema(node, format!("`{}` is not a hom between two variables", eqd.goal)));
            }
            let label = c.fresh_label("e");
            let mut hyps = vec![(label.clone(), eqd.goal.clone())];
            hyps.extend(c.hyps.iter().cloned());
            let virt = Sequent::new(c.ctx.clone(), hyps, c.goal.clone());
            let e = j_premise(&virt, &label).map_err(|f| from_j_failure(node, f))?;
            expect(node, "premise", &e, p(0))?;
        }
        Rule::EndIntro => match &c.goal {
            Formula::End(x, cat, body) => {
                let x2 = c.fresh_var(x);
                let mut ctx = c.ctx.clone();
                ctx.push((x2.clone(), cat.clone()));
                let e = Sequent::new(ctx, c.hyps.clone(), body.rename(x, &x2));
                expect(node, "premise", &e, p(0))?;
            }
            _ => return Err(schema(node, "goal is not an end")),
        },
        Rule::EndElim => {
            let (v, cat) = c.ctx.last().ok_or_else(|| schema(node, "empty context"))?;
            if let Some((l, _)) = c.hyps.iter().find(|(_, f)| f.mentions(v)) {
                return Err(schema(node, format!("hypothesis `{l}` mentions the eliminated variable `{v}`")));
            }
            let ctx = c.ctx[..c.ctx.len() - 1].to_vec();
            let e = Sequent::new(ctx, c.hyps.clone(), Formula::end(v.clone(), cat.clone(), c.goal.clone()));
            expect(node, "premise", &e, p(0))?;
        }
        Rule::CoendIntro => {
            let sub = p(0);
            let (a, cat) = sub.ctx.last().ok_or_else(|| schema(node, "premise context is empty"))?;
            if sub.goal.mentions(a) {
                return Err(schema(node, format!("goal mentions the bound variable `{a}`")));
            }
            let label = c.hyps.first().map_or("l".to_string(), |(l, _)| l.clone());
            let e = Sequent::new(
                sub.ctx[..sub.ctx.len() - 1].to_vec(),
                vec![(label, Formula::coend(a.clone(), cat.clone(), sub.context_formula()))],
                sub.goal.clone(),
            );
            expect(node, "conclusion", &e, c)?;
        }
        Rule::CoendElim => {
            let (a, cat) = c.ctx.last().ok_or_else(|| schema(node, "empty context"))?;
            if c.goal.mentions(a) {
                return Err(schema(node, format!("goal mentions the bound variable `{a}`")));
            }
            let label = p(0).hyps.first().map_or("m".to_string(), |(l, _)| l.clone());
            let e = Sequent::new(
                c.ctx[..c.ctx.len() - 1].to_vec(),
                vec![(label, Formula::coend(a.clone(), cat.clone(), c.context_formula()))],
                c.goal.clone(),
            );
            expect(node, "premise", &e, p(0))?;
        }
        Rule::Exchange(x, y) => {
            let i = c.var_index(x).ok_or_else(|| schema(node, format!("no variable `{x}`")))?;
            if c.ctx.get(i + 1).map(|(n, _)| n) != Some(y) {
                return Err(schema(node, format!("`{x}` and `{y}` are not adjacent in that order")));
            }
            let mut e = c.clone();
            e.ctx.swap(i, i + 1);
            expect(node, "premise", &e, p(0))?;
        }
        Rule::PairCtx(x, y, pv) => {
            let i = c.var_index(pv).ok_or_else(|| schema(node, format!("no variable `{pv}`")))?;
            let (l, r) = match &c.ctx[i].1 {
                crate::syntax::CatExpr::Prod(l, r) => ((**l).clone(), (**r).clone()),
                t => return Err(schema(node, format!("`{pv}` has non-product type {t}"))),
            };
            let mut names = c.names();
            names.remove(pv);
            if x == y || names.contains(x) || names.contains(y) {
                return Err(schema(node, format!("`{x}` and `{y}` must be distinct fresh names")));
            }
            let pair = TermExpr::pair(TermExpr::var(x.clone()), TermExpr::var(y.clone()));
            let (hyps, goal) = map_formulas(c, |f| f.substitute(pv, &pair));
            let mut ctx = c.ctx.clone();
            ctx.splice(i..=i, [(x.clone(), l), (y.clone(), r)]);
            expect(node, "premise", &Sequent::new(ctx, hyps, goal), p(0))?;
        }
        Rule::UnpairCtx(pv, x, y) => {
            let i = c.var_index(x).ok_or_else(|| schema(node, format!("no variable `{x}`")))?;
            if c.ctx.get(i + 1).map(|(n, _)| n) != Some(y) {
                return Err(schema(node, format!("`{x}` and `{y}` are not adjacent in that order")));
            }
            let mut names = c.names();
            names.remove(x);
            names.remove(y);
            if names.contains(pv) {
                return Err(schema(node, format!("`{pv}` must be a fresh name")));
            }
            let pt = TermExpr::var(pv.clone());
            let (hyps, goal) =
                map_formulas(c, |f| f.substitute(x, &TermExpr::fst(pt.clone())).substitute(y, &TermExpr::snd(pt.clone())));
            let cat = crate::syntax::CatExpr::prod(c.ctx[i].1.clone(), c.ctx[i + 1].1.clone());
            let mut ctx = c.ctx.clone();
            ctx.splice(i..=i + 1, [(pv.clone(), cat)]);
            expect(node, "premise", &Sequent::new(ctx, hyps, goal), p(0))?;
        }
        Rule::OpVar(y) => {
            let i = c.var_index(y).ok_or_else(|| schema(node, format!("no variable `{y}`")))?;
            let (hyps, goal) = map_formulas(c, |f| f.substitute(y, &TermExpr::neg(y.clone())));
            let mut ctx = c.ctx.clone();
            ctx[i].1 = ctx[i].1.dual();
            expect(node, "premise", &Sequent::new(ctx, hyps, goal), p(0))?;
        }
        Rule::ImpFunc => match (c.hyps.as_slice(), &c.goal) {
            ([(_, Formula::Imp(a, b))], Formula::Imp(a2, b2)) => {
                let e0 = Sequent::new(c.ctx.clone(), vec![("p".into(), (**a2).clone())], (**a).clone());
                let e1 = Sequent::new(c.ctx.clone(), vec![("q".into(), (**b).clone())], (**b2).clone());
                expect(node, "first premise", &e0, p(0))?;
                expect(node, "second premise", &e1, p(1))?;
            }
            _ => return Err(schema(node, "imp-func concludes `P => Q |- P' => Q'`")),
        },
        Rule::NatCut(site) => {
            let nat = p(0);
            let types = |s: &Sequent| s.ctx.iter().map(|(_, t)| t.clone()).collect::<Vec<_>>();
            if nat.hyps.len() != 1 || types(nat) != types(c) {
                return Err(schema(node, "the natural family needs one hypothesis over the same context"));
            }
            let nat = relabel(nat, c);
            let (nh, ng) = (&nat.hyps[0].1, &nat.goal);
            for (v, _) in &c.ctx {
                let pols: BTreeSet<Polarity> =
                    nh.occurrences(v).iter().chain(ng.occurrences(v).iter()).map(|o| o.polarity).collect();
                if pols.len() > 1 {
                    return Err(schema(node, format!("the composed family is not natural in `{v}`")));
                }
            }
            match site {
                NatSite::Goal => {
                    expect(node, "conclusion", &c.with_goal(ng.clone()), c)?;
                    expect(node, "premise", &c.with_goal(nh.clone()), p(1))?;
                }
                NatSite::Hyp(l) => {
                    let i = c.hyp_index(l).ok_or_else(|| schema(node, format!("no hypothesis `{l}`")))?;
                    let mut want = c.clone();
                    want.hyps[i].1 = nh.clone();
                    expect(node, "conclusion", &want, c)?;
                    let mut e = c.clone();
                    e.hyps[i].1 = ng.clone();
                    expect(node, "premise", &e, p(1))?;
                }
            }
        }
        r if r.is_macro() => {
            let sub = Derivation::leaf(Rule::Hole("#sub".into()), d.premises[0].concl.clone());
            let tree = expansion(d, sub).map_err(|r| schema(node, r))?;
            check_at(&tree, sig, &format!("{node} > expansion"))?;
            expect(node, "expansion", c, &tree.concl)?;
        }
        r => return Err(schema(node, format!("unhandled rule {r}"))),
    }
    Ok(())
}

/// `d` with its root conclusion replaced by the alpha-equal `target`,
/// rewriting the root's parameters that name conclusion variables or labels.
pub fn rename_root(d: &Derivation, target: &Sequent) -> Derivation {
    let old = &d.concl;
    let var = |n: &String| old.var_index(n).map_or(n.clone(), |i| target.ctx[i].0.clone());
    let lab = |n: &String| old.hyp_index(n).map_or(n.clone(), |i| target.hyps[i].0.clone());
    let fresh = |n: &String| if target.names().contains(n) { target.fresh_var(n) } else { n.clone() };
    let rule = match &d.rule {
        Rule::Weaken(l) => Rule::Weaken(lab(l)),
        Rule::Uncurry(ls) => Rule::Uncurry(ls.iter().map(lab).collect()),
        Rule::Reindex { var: v, term } => {
            let mut t = term.clone();
            let tmp: Vec<String> = (0..old.ctx.len()).map(|i| format!("#t{i}")).collect();
            for (i, (n, _)) in old.ctx.iter().enumerate() {
                t = t.rename(n, &tmp[i]);
            }
            for (i, (n, _)) in target.ctx.iter().enumerate() {
                t = t.rename(&tmp[i], n);
            }
            Rule::Reindex { var: v.clone(), term: t }
        }
        Rule::J(e) => Rule::J(lab(e)),
        Rule::HomRelAdj(e) => Rule::HomRelAdj(lab(e)),
        Rule::Exchange(x, y) => Rule::Exchange(var(x), var(y)),
        Rule::PairCtx(x, y, p) => {
            let (x2, mut y2) = (fresh(x), fresh(y));
            if y2 == x2 {
                y2 = format!("{x2}'");
            }
            Rule::PairCtx(x2, y2, var(p))
        }
        Rule::UnpairCtx(p, x, y) => Rule::UnpairCtx(fresh(p), var(x), var(y)),
        Rule::OpVar(y) => Rule::OpVar(var(y)),
        Rule::NatCut(NatSite::Hyp(l)) => Rule::NatCut(NatSite::Hyp(lab(l))),
        Rule::CoYonedaHyp(l, dir) => Rule::CoYonedaHyp(lab(l), *dir),
        r => r.clone(),
    };
    Derivation { rule, concl: target.clone(), premises: d.premises.clone() }
}
