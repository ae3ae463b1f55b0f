use std::collections::BTreeSet;

use super::check::rename_root;
use super::deriv::{Derivation, Dir, FubiniKind, NatSite, Rule};
use super::jrule::{j_premise, JFailure};
use super::KernelError;
use crate::syntax::{ctx_formula, fresh_name, CatExpr, Formula, Polarity, Sequent, TermExpr};

type Built = Result<Derivation, String>;

fn pick(pref: Option<&str>, base: &str, avoid: &BTreeSet<String>) -> String {
    match pref {
        Some(n) if !avoid.contains(n) => n.to_string(),
        _ => fresh_name(base, avoid),
    }
}

fn node(rule: Rule, concl: Sequent, premises: Vec<Derivation>) -> Derivation {
    Derivation::new(rule, concl, premises)
}

/// Splits a right-nested conjunction into `n` components.
fn split_conj(f: &Formula, n: usize) -> Option<Vec<Formula>> {
    if n <= 1 {
        return Some(vec![f.clone()]);
    }
    match f {
        Formula::And(a, rest) => {
            let mut out = vec![(**a).clone()];
            out.extend(split_conj(rest, n - 1)?);
            Some(out)
        }
        _ => None,
    }
}

fn j_reason(f: JFailure) -> String {
    match f {
        JFailure::Schema(r) => r,
        JFailure::Variance { variable, occurrence } => format!("`{variable}` occurs {occurrence}"),
    }
}

fn finish(root: Derivation, hint: Option<&Sequent>) -> Derivation {
    match hint {
        Some(h) if root.concl.alpha_equal(h) => rename_root(&root, h),
        _ => root,
    }
}

fn last_var(s: &Sequent, what: &str) -> Result<(String, CatExpr), String> {
    s.ctx.last().cloned().ok_or_else(|| format!("{what} context is empty"))
}

fn hint_last_var(hint: Option<&Sequent>) -> Option<&str> {
    hint.and_then(|h| h.ctx.last()).map(|(n, _)| n.as_str())
}

fn without_last(s: &Sequent) -> Vec<(String, CatExpr)> {
    s.ctx[..s.ctx.len().saturating_sub(1)].to_vec()
}

fn binder_name(f: &Formula) -> Option<&str> {
    match f {
        Formula::End(x, _, _) | Formula::Coend(x, _, _) => Some(x),
        _ => None,
    }
}

/// Expands a derived rule over `sub`; `hint` is the intended conclusion and
/// supplies names and, where the sub alone is ambiguous, the shape.
pub fn build(rule: &Rule, sub: Derivation, hint: Option<&Sequent>) -> Built {
    let s = sub.concl.clone();
    let root = match rule {
        Rule::Yoneda => {
            let (z, cat) = last_var(&s, "premise")?;
            let mut avoid = s.names();
            avoid.remove(&z);
            let a = pick(hint_last_var(hint), &z, &avoid);
            avoid.insert(a.clone());
            let x = pick(hint.and_then(|h| binder_name(&h.goal)), "x", &avoid);
            avoid.insert(x.clone());
            let e = fresh_name("e", &avoid);
            let hom = Formula::hom(cat.clone(), TermExpr::neg(a.clone()), TermExpr::var(x.clone()));
            let mut ctx = without_last(&s);
            ctx.push((a.clone(), cat.clone()));
            let mut hyps = vec![(e.clone(), hom.clone())];
            hyps.extend(s.hyps.iter().map(|(l, f)| (l.clone(), f.rename(&z, &a))));
            let body = s.goal.rename(&z, &x);
            let mut jctx = ctx.clone();
            jctx.push((x.clone(), cat.clone()));
            let j = node(Rule::J(e.clone()), Sequent::new(jctx.clone(), hyps.clone(), body.clone()), vec![sub]);
            let curried = Sequent::new(jctx, hyps[1..].to_vec(), Formula::imp(hom.clone(), body.clone()));
            let c = node(Rule::Curry(vec![e]), curried, vec![j]);
            let concl = Sequent::new(ctx, hyps[1..].to_vec(), Formula::end(x, cat, Formula::imp(hom, body)));
            node(Rule::EndIntro, concl, vec![c])
        }
        Rule::YonedaInv => {
            let (x, cat, body) = match &s.goal {
                Formula::End(x, cat, body) => (x.clone(), cat.clone(), (**body).clone()),
                g => return Err(format!("goal `{g}` is not an end")),
            };
            let avoid = s.names();
            let x2 = fresh_name(&x, &avoid);
            let body = body.rename(&x, &x2);
            let mut ctx = s.ctx.clone();
            ctx.push((x2.clone(), cat));
            let el = node(Rule::EndElim, Sequent::new(ctx.clone(), s.hyps.clone(), body.clone()), vec![sub]);
            let (h, p) = match &body {
                Formula::Imp(h, p) => ((**h).clone(), (**p).clone()),
                b => return Err(format!("`{b}` is not an implication")),
            };
            let mut av2 = avoid.clone();
            av2.insert(x2);
            let e = fresh_name("e", &av2);
            let mut hyps = vec![(e.clone(), h)];
            hyps.extend(s.hyps.iter().cloned());
            let unc = node(Rule::Uncurry(vec![e.clone()]), Sequent::new(ctx, hyps, p), vec![el]);
            let concl = j_premise(&unc.concl, &e).map_err(j_reason)?;
            node(Rule::JInv(e), concl, vec![unc])
        }
        Rule::CoYoneda => {
            let (z, cat) = last_var(&s, "premise")?;
            let mut avoid = s.names();
            avoid.remove(&z);
            let a = pick(hint_last_var(hint), &z, &avoid);
            avoid.insert(a.clone());
            let hint_binder = hint.and_then(|h| h.hyps.first()).and_then(|(_, f)| binder_name(f));
            let x = pick(hint_binder, "x", &avoid);
            avoid.insert(x.clone());
            let e = fresh_name("e", &avoid);
            let hom = Formula::hom(cat.clone(), TermExpr::neg(x.clone()), TermExpr::var(a.clone()));
            let mut ctx = without_last(&s);
            ctx.push((a.clone(), cat.clone()));
            let mut jctx = ctx.clone();
            jctx.push((x.clone(), cat.clone()));
            let mut hyps = vec![(e.clone(), hom)];
            hyps.extend(s.hyps.iter().map(|(l, f)| (l.clone(), f.rename(&z, &x))));
            let goal = s.goal.rename(&z, &a);
            let j = node(Rule::J(e), Sequent::new(jctx, hyps.clone(), goal.clone()), vec![sub]);
            let l = hint.and_then(|h| h.hyps.first()).map_or("l".to_string(), |(l, _)| l.clone());
            let fs: Vec<Formula> = hyps.iter().map(|(_, f)| f.clone()).collect();
            let concl = Sequent::new(ctx, vec![(l, Formula::coend(x, cat, ctx_formula(&fs)))], goal);
            node(Rule::CoendIntro, concl, vec![j])
        }
        Rule::CoYonedaInv => {
            let (x, cat, body) = match s.hyps.as_slice() {
                [(_, Formula::Coend(x, cat, body))] => (x.clone(), cat.clone(), (**body).clone()),
                _ => return Err("premise needs a single coend hypothesis".into()),
            };
            let n = match hint {
                Some(h) => h.hyps.len() + 1,
                None if matches!(body, Formula::And(..)) => 2,
                None => 1,
            };
            let mut avoid = s.names();
            let x2 = fresh_name(&x, &avoid);
            avoid.insert(x2.clone());
            let comps = split_conj(&body.rename(&x, &x2), n).ok_or("coend body has too few components")?;
            let e = fresh_name("e", &avoid);
            avoid.insert(e.clone());
            let mut labels = vec![e.clone()];
            for i in 1..n {
                let pref = hint.map(|h| h.hyps[i - 1].0.as_str());
                let l = pick(pref, "k", &avoid);
                avoid.insert(l.clone());
                labels.push(l);
            }
            let mut ctx = s.ctx.clone();
            ctx.push((x2, cat));
            let hyps: Vec<(String, Formula)> = labels.into_iter().zip(comps).collect();
            let el = node(Rule::CoendElim, Sequent::new(ctx, hyps, s.goal.clone()), vec![sub]);
            let concl = j_premise(&el.concl, &e).map_err(j_reason)?;
            node(Rule::JInv(e), concl, vec![el])
        }
        Rule::YonedaGoal(dir) => {
            let h = hint.ok_or("yoneda-goal needs its conclusion")?;
            let ends = if *dir == Dir::Fwd { h } else { &s };
            let (x, cat, s_term, p) = match &ends.goal {
                Formula::End(x, cat, body) => match &**body {
                    Formula::Imp(hom, p) => match &**hom {
                        Formula::Hom(_, src, TermExpr::Var(v, Polarity::Pos)) if v == x => {
                            (x.clone(), cat.clone(), src.clone(), (**p).clone())
                        }
                        f => return Err(format!("`{f}` is not `hom(t, {x})`")),
                    },
                    f => return Err(format!("`{f}` is not an implication")),
                },
                g => return Err(format!("goal `{g}` is not an end")),
            };
            let t = s_term.op_image().normalize();
            let mut avoid = h.names();
            avoid.extend(s.names());
            let z = fresh_name("z", &avoid);
            let mut zctx = h.ctx.clone();
            zctx.push((z.clone(), cat.clone()));
            let m = fresh_name("m", &avoid);
            let nat = if *dir == Dir::Fwd {
                let pz = p.rename(&x, &z);
                let id = node(Rule::Id, Sequent::new(zctx, vec![(m.clone(), pz.clone())], pz), vec![]);
                let y = build(&Rule::Yoneda, id.clone(), None)?;
                let yn = node(Rule::Yoneda, y.concl.clone(), vec![id]);
                let a = y.concl.ctx.last().unwrap().0.clone();
                let (hyps, goal) = y.concl.substitute(&a, &t);
                node(Rule::Reindex { var: a, term: t.clone() }, Sequent::new(h.ctx.clone(), hyps, goal), vec![yn])
            } else {
                let endf = Formula::end(
                    x.clone(),
                    cat.clone(),
                    Formula::imp(Formula::hom(cat.clone(), TermExpr::neg(z.clone()), TermExpr::var(x.clone())), p.clone()),
                );
                let id = node(Rule::Id, Sequent::new(zctx, vec![(m.clone(), endf.clone())], endf), vec![]);
                let y = build(&Rule::YonedaInv, id.clone(), None)?;
                let yn = node(Rule::YonedaInv, y.concl.clone(), vec![id]);
                let zz = y.concl.ctx.last().unwrap().0.clone();
                let (hyps, goal) = y.concl.substitute(&zz, &t);
                node(Rule::Reindex { var: zz, term: t.clone() }, Sequent::new(h.ctx.clone(), hyps, goal), vec![yn])
            };
            node(Rule::NatCut(NatSite::Goal), h.clone(), vec![nat, sub])
        }
        Rule::CoYonedaHyp(l, dir) => {
            let h = hint.ok_or("coyoneda-hyp needs its conclusion")?;
            let coend_side = if *dir == Dir::Fwd { h } else { &s };
            let f = coend_side.hyp(l).ok_or_else(|| format!("no hypothesis `{l}`"))?;
            let (x, cat, t, q) = match f {
                Formula::Coend(x, cat, body) => match &**body {
                    Formula::And(hom, q) => match &**hom {
                        Formula::Hom(_, TermExpr::Var(v, Polarity::Neg), t) if v == x => {
                            (x.clone(), cat.clone(), t.clone(), (**q).clone())
                        }
                        f => return Err(format!("`{f}` is not `hom(~{x}, t)`")),
                    },
                    f => return Err(format!("`{f}` is not a conjunction")),
                },
                f => return Err(format!("`{f}` is not a coend")),
            };
            let mut avoid = h.names();
            avoid.extend(s.names());
            let z = fresh_name("z", &avoid);
            avoid.insert(z.clone());
            let m = fresh_name("m", &avoid);
            let mut zctx = h.ctx.clone();
            zctx.push((z.clone(), cat.clone()));
            let nat = if *dir == Dir::Fwd {
                let qz = q.rename(&x, &z);
                let id = node(Rule::Id, Sequent::new(zctx, vec![(m, qz.clone())], qz), vec![]);
                let y = build(&Rule::CoYoneda, id.clone(), None)?;
                let yn = node(Rule::CoYoneda, y.concl.clone(), vec![id]);
                let a = y.concl.ctx.last().unwrap().0.clone();
                let (hyps, goal) = y.concl.substitute(&a, &t);
                node(Rule::Reindex { var: a, term: t }, Sequent::new(h.ctx.clone(), hyps, goal), vec![yn])
            } else {
                let x2 = fresh_name(&x, &avoid);
                let cf = Formula::coend(
                    x2.clone(),
                    cat.clone(),
                    Formula::and(
                        Formula::hom(cat.clone(), TermExpr::neg(x2.clone()), TermExpr::var(z.clone())),
                        q.rename(&x, &x2),
                    ),
                );
                let id = node(Rule::Id, Sequent::new(zctx, vec![(m, cf.clone())], cf), vec![]);
                let y = build(&Rule::CoYonedaInv, id.clone(), None)?;
                let yn = node(Rule::CoYonedaInv, y.concl.clone(), vec![id]);
                let zz = y.concl.ctx.last().unwrap().0.clone();
                let (hyps, goal) = y.concl.substitute(&zz, &t);
                node(Rule::Reindex { var: zz, term: t }, Sequent::new(h.ctx.clone(), hyps, goal), vec![yn])
            };
            node(Rule::NatCut(NatSite::Hyp(l.clone())), h.clone(), vec![nat, sub])
        }
        Rule::Fubini(kind) => fubini(*kind, sub)?,
        Rule::CoendFrobenius(dir) => frobenius(*dir, sub, hint)?,
        Rule::HomRelAdj(e) => {
            let h = hint.ok_or("hom-rel-adj needs its conclusion")?;
            let hh = super::jrule::hom_hyp(h, e).map_err(j_reason)?;
            if let Some((l, _)) = h.hyps.iter().find(|(l, f)| l != e && (f.mentions(&hh.a) || f.mentions(&hh.b))) {
                return Err(format!("hypothesis `{l}` depends on the equality variables"));
            }
            node(Rule::J(e.clone()), h.clone(), vec![sub])
        }
        r => return Err(format!("{r} is not a derived rule")),
    };
    Ok(finish(root, hint))
}

fn end_parts(f: &Formula) -> Result<(String, CatExpr, Formula), String> {
    match f {
        Formula::End(x, c, b) => Ok((x.clone(), c.clone(), (**b).clone())),
        g => Err(format!("`{g}` is not an end")),
    }
}

fn fubini(kind: FubiniKind, sub: Derivation) -> Built {
    let s = sub.concl.clone();
    let mut avoid = s.names();
    let with = |ctx: &[(String, CatExpr)], extra: &[(String, CatExpr)], goal: Formula| {
        let mut c = ctx.to_vec();
        c.extend(extra.iter().cloned());
        Sequent::new(c, s.hyps.clone(), goal)
    };
    let (x, c1, inner) = end_parts(&s.goal)?;
    let x2 = fresh_name(&x, &avoid);
    avoid.insert(x2.clone());
    let inner = inner.rename(&x, &x2);
    let n1 = node(Rule::EndElim, with(&s.ctx, &[(x2.clone(), c1.clone())], inner.clone()), vec![sub]);
    if kind == FubiniKind::Unpair {
        let (l, r) = match &c1 {
            CatExpr::Prod(l, r) => ((**l).clone(), (**r).clone()),
            c => return Err(format!("`{x}` ranges over the non-product {c}")),
        };
        let xa = fresh_name("x", &avoid);
        avoid.insert(xa.clone());
        let ya = fresh_name("y", &avoid);
        let b = inner.substitute(&x2, &TermExpr::pair(TermExpr::var(xa.clone()), TermExpr::var(ya.clone())));
        let n2 = node(
            Rule::UnpairCtx(x2, xa.clone(), ya.clone()),
            with(&s.ctx, &[(xa.clone(), l.clone()), (ya.clone(), r.clone())], b.clone()),
            vec![n1],
        );
        let e1 = Formula::end(ya.clone(), r, b);
        let n3 = node(Rule::EndIntro, with(&s.ctx, &[(xa.clone(), l.clone())], e1.clone()), vec![n2]);
        return Ok(node(Rule::EndIntro, with(&s.ctx, &[], Formula::end(xa, l, e1)), vec![n3]));
    }
    let (y, c2, body) = end_parts(&inner)?;
    let y2 = fresh_name(&y, &avoid);
    avoid.insert(y2.clone());
    let body = body.rename(&y, &y2);
    let both = [(x2.clone(), c1.clone()), (y2.clone(), c2.clone())];
    let n2 = node(Rule::EndElim, with(&s.ctx, &both, body.clone()), vec![n1]);
    match kind {
        FubiniKind::Swap => {
            let swapped = [(y2.clone(), c2.clone()), (x2.clone(), c1.clone())];
            let n3 = node(Rule::Exchange(y2.clone(), x2.clone()), with(&s.ctx, &swapped, body.clone()), vec![n2]);
            let e1 = Formula::end(x2.clone(), c1, body);
            let n4 = node(Rule::EndIntro, with(&s.ctx, &swapped[..1], e1.clone()), vec![n3]);
            Ok(node(Rule::EndIntro, with(&s.ctx, &[], Formula::end(y2, c2, e1)), vec![n4]))
        }
        FubiniKind::Pair => {
            let p = fresh_name("p", &avoid);
            let pt = TermExpr::var(p.clone());
            let b = body.substitute(&x2, &TermExpr::fst(pt.clone())).substitute(&y2, &TermExpr::snd(pt));
            let pc = CatExpr::prod(c1, c2);
            let n3 = node(Rule::PairCtx(x2, y2, p.clone()), with(&s.ctx, &[(p.clone(), pc.clone())], b.clone()), vec![n2]);
            Ok(node(Rule::EndIntro, with(&s.ctx, &[], Formula::end(p, pc, b)), vec![n3]))
        }
        FubiniKind::Unpair => unreachable!(),
    }
}

fn frobenius(dir: Dir, sub: Derivation, hint: Option<&Sequent>) -> Built {
    let s = sub.concl.clone();
    let mut avoid = s.names();
    if let Some(h) = hint {
        avoid.extend(h.names());
    }
    match dir {
        Dir::Fwd => {
            let (x, cat, body) = match s.hyps.as_slice() {
                [(_, Formula::Coend(x, cat, body))] => (x.clone(), cat.clone(), (**body).clone()),
                _ => return Err("premise needs a single coend hypothesis".into()),
            };
            let n = hint.map_or(2, |h| h.hyps.len().max(1));
            let x2 = fresh_name(&x, &avoid);
            avoid.insert(x2.clone());
            let comps = split_conj(&body.rename(&x, &x2), n).ok_or("coend body has too few components")?;
            let mut labels = Vec::new();
            for i in 0..n - 1 {
                let l = pick(hint.map(|h| h.hyps[i].0.as_str()), "d", &avoid);
                avoid.insert(l.clone());
                labels.push(l);
            }
            let t = fresh_name("t", &avoid);
            let delta: Vec<(String, Formula)> = labels.iter().cloned().zip(comps.iter().cloned()).collect();
            let theta = comps[n - 1].clone();
            let mut ctx = s.ctx.clone();
            ctx.push((x2.clone(), cat.clone()));
            let mut hyps = delta.clone();
            hyps.push((t.clone(), theta.clone()));
            let n1 = node(Rule::CoendElim, Sequent::new(ctx.clone(), hyps, s.goal.clone()), vec![sub]);
            let dk = Formula::imp(ctx_formula(&comps[..n - 1]), s.goal.clone());
            let n2 = node(Rule::Curry(labels.clone()), Sequent::new(ctx, vec![(t, theta.clone())], dk.clone()), vec![n1]);
            let l = hint.and_then(|h| h.hyps.last()).map_or("l".to_string(), |(l, _)| l.clone());
            let cf = Formula::coend(x2, cat, theta);
            let n3 = node(Rule::CoendIntro, Sequent::new(s.ctx.clone(), vec![(l.clone(), cf.clone())], dk), vec![n2]);
            let mut hyps = delta;
            hyps.push((l, cf));
            Ok(node(Rule::Uncurry(labels), Sequent::new(s.ctx.clone(), hyps, s.goal.clone()), vec![n3]))
        }
        Dir::Bwd => {
            let (last, delta) = s.hyps.split_last().ok_or("premise has no hypotheses")?;
            let (x, cat, theta) = match &last.1 {
                Formula::Coend(x, cat, body) => (x.clone(), cat.clone(), (**body).clone()),
                f => return Err(format!("last hypothesis `{f}` is not a coend")),
            };
            let labels: Vec<String> = delta.iter().map(|(l, _)| l.clone()).collect();
            let dforms: Vec<Formula> = delta.iter().map(|(_, f)| f.clone()).collect();
            let dk = Formula::imp(ctx_formula(&dforms), s.goal.clone());
            let n1 = node(Rule::Curry(labels.clone()), Sequent::new(s.ctx.clone(), vec![last.clone()], dk.clone()), vec![sub]);
            let x2 = fresh_name(&x, &avoid);
            avoid.insert(x2.clone());
            let t = fresh_name("t", &avoid);
            let theta = theta.rename(&x, &x2);
            let mut ctx = s.ctx.clone();
            ctx.push((x2.clone(), cat.clone()));
            let n2 = node(Rule::CoendElim, Sequent::new(ctx.clone(), vec![(t.clone(), theta.clone())], dk), vec![n1]);
            let mut hyps = delta.to_vec();
            hyps.push((t, theta.clone()));
            let n3 = node(Rule::Uncurry(labels), Sequent::new(ctx, hyps, s.goal.clone()), vec![n2]);
            let m = hint.and_then(|h| h.hyps.first()).map_or("m".to_string(), |(l, _)| l.clone());
            let mut all = dforms;
            all.push(theta);
            let cf = Formula::coend(x2, cat, ctx_formula(&all));
            Ok(node(Rule::CoendIntro, Sequent::new(s.ctx.clone(), vec![(m, cf)], s.goal.clone()), vec![n3]))
        }
    }
}

/// The expansion of a derived-rule node over its actual premise.
pub fn expansion(d: &Derivation, sub: Derivation) -> Built {
    build(&d.rule, sub, Some(&d.concl))
}

/// One-step expansion of a macro node.
pub fn expand_macro(d: &Derivation) -> Result<Derivation, KernelError> {
    let sub = d.premises.first().cloned().ok_or_else(|| KernelError::SchemaMismatch {
        node: d.rule.to_string(),
        reason: "missing premise".into(),
    })?;
    expansion(d, sub).map_err(|reason| KernelError::SchemaMismatch { node: d.rule.to_string(), reason })
}

/// Expands every macro, recursively, into primitive rules.
pub fn expand_all(d: &Derivation) -> Result<Derivation, KernelError> {
    let premises = d.premises.iter().map(expand_all).collect::<Result<Vec<_>, _>>()?;
    let d2 = Derivation::new(d.rule.clone(), d.concl.clone(), premises);
    if d2.rule.is_macro() {
        expand_all(&expand_macro(&d2)?)
    } else {
        Ok(d2)
    }
}
