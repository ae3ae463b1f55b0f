use std::collections::HashMap;

use super::eval::Evaluator;
use super::family::{check_dinatural, DinatFamily};
use super::value::Value;
use super::EvalError;
use crate::kernel::check::relabel;
use crate::kernel::{expand_all, Derivation, NatSite, Rule};
use crate::kernel::jrule::hom_hyp;
use crate::syntax::{ctx_formula, Formula, Polarity, Sequent};

/// Families standing in for `hole` leaves, by hole name.
pub type Holes = HashMap<String, DinatFamily>;

/// Evaluates a checked derivation and asserts its family is dinatural.
pub fn eval_derivation(ev: &Evaluator, d: &Derivation) -> Result<DinatFamily, EvalError> {
    eval_derivation_with(ev, d, &Holes::new())
}

/// As `eval_derivation`, reading `hole` leaves from `holes`.
pub fn eval_derivation_with(ev: &Evaluator, d: &Derivation, holes: &Holes) -> Result<DinatFamily, EvalError> {
    let fam = eval_unchecked(ev, d, holes)?;
    if let Some(w) = check_dinatural(ev, &fam)? {
        return Err(EvalError::Soundness { node: d.concl.to_string(), witness: w.to_string() });
    }
    Ok(fam)
}

/// The family of a derivation, without the hexagon check.
pub fn eval_unchecked(ev: &Evaluator, d: &Derivation, holes: &Holes) -> Result<DinatFamily, EvalError> {
    let d = expand_all(d)?;
    DinatFamily::tabulate(ev, &d.concl, |p, i| apply(ev, &d, holes, p, i))
}

fn shape(what: impl Into<String>) -> EvalError {
    EvalError::Shape(what.into())
}

fn hyp_pos(s: &Sequent, l: &str) -> Result<usize, EvalError> {
    s.hyp_index(l).ok_or_else(|| shape(format!("no hypothesis `{l}`")))
}

fn var_pos(s: &Sequent, x: &str) -> Result<usize, EvalError> {
    s.var_index(x).ok_or_else(|| shape(format!("no variable `{x}`")))
}

/// The component of a derivation's family at `point` on `inputs`.
pub fn apply(ev: &Evaluator, d: &Derivation, holes: &Holes, point: &[usize], inputs: &[Value]) -> Result<Value, EvalError> {
    let c = &d.concl;
    let sub = |i: usize, p: &[usize], v: &[Value]| apply(ev, &d.premises[i], holes, p, v);
    let pc = |i: usize| &d.premises[i].concl;
    Ok(match &d.rule {
        Rule::Id => inputs[0].clone(),
        Rule::Refl => match &c.goal {
            Formula::Hom(a, _, t) => {
                let env = ev.diagonal(&c.ctx, point)?;
                let o = ev.term_idx(t, &env, true)?;
                Value::Mor(ev.sem(a)?.cat.id(o))
            }
            g => return Err(shape(format!("refl with goal {g}"))),
        },
        Rule::Hole(n) => {
            let fam = holes.get(n).ok_or_else(|| EvalError::Hole(n.clone()))?;
            fam.get(point, inputs)
                .cloned()
                .ok_or_else(|| shape(format!("hole `{n}` has no entry at {point:?}")))?
        }
        Rule::Weaken(l) => {
            let i = hyp_pos(c, l)?;
            let rest: Vec<Value> = inputs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v.clone()).collect();
            sub(0, point, &rest)?
        }
        Rule::Pair => Value::pair(sub(0, point, inputs)?, sub(1, point, inputs)?),
        Rule::Proj1 | Rule::Proj2 => match sub(0, point, inputs)? {
            Value::Pair(a, b) => *if d.rule == Rule::Proj1 { a } else { b },
            v => return Err(shape(format!("projection of {v}"))),
        },
        Rule::Curry(labels) => {
            let p = pc(0);
            let fs = labels.iter().map(|l| Ok(p.hyps[hyp_pos(p, l)?].1.clone())).collect::<Result<Vec<_>, EvalError>>()?;
            let dom = ev.eval_set(&ctx_formula(&fs), &ev.diagonal(&p.ctx, point)?)?;
            let mut outs = Vec::with_capacity(dom.len());
            for a in &dom.elems {
                let parts = a.untuple(labels.len()).ok_or_else(|| shape(format!("{a} is not a tuple")))?;
                let mut rest = inputs.iter();
                let mut full = Vec::with_capacity(p.hyps.len());
                for (l, _) in &p.hyps {
                    match labels.iter().position(|m| m == l) {
                        Some(k) => full.push(parts[k].clone()),
                        None => full.push(rest.next().ok_or_else(|| shape("too few inputs"))?.clone()),
                    }
                }
                outs.push(sub(0, point, &full)?);
            }
            Value::Fun(outs)
        }
        Rule::Uncurry(labels) => {
            let idx = labels.iter().map(|l| hyp_pos(c, l)).collect::<Result<Vec<_>, _>>()?;
            let rest: Vec<Value> =
                inputs.iter().enumerate().filter(|(j, _)| !idx.contains(j)).map(|(_, v)| v.clone()).collect();
            let fs: Vec<Formula> = idx.iter().map(|&i| c.hyps[i].1.clone()).collect();
            let dom = ev.eval_set(&ctx_formula(&fs), &ev.diagonal(&c.ctx, point)?)?;
            let a = Value::tuple_of(&idx.iter().map(|&i| inputs[i].clone()).collect::<Vec<_>>());
            match sub(0, point, &rest)? {
                Value::Fun(outs) => {
                    let k = dom.position(&a).ok_or_else(|| shape(format!("{a} outside the domain")))?;
                    outs[k].clone()
                }
                v => return Err(shape(format!("uncurry of {v}"))),
            }
        }
        Rule::Reindex { var, term } => {
            let env = ev.diagonal(&c.ctx, point)?;
            let p = pc(0);
            let mut q = Vec::with_capacity(p.ctx.len());
            for (n, _) in &p.ctx {
                if n == var {
                    q.push(ev.term_idx(term, &env, true)?);
                } else {
                    q.push(point[var_pos(c, n)?]);
                }
            }
            sub(0, &q, inputs)?
        }
        Rule::J(e) => j_core(ev, c, e, &d.premises[0], holes, point, inputs)?,
        Rule::JInv(e) => {
            let p = pc(0);
            let h = hom_hyp(p, e).map_err(|f| shape(format!("{f:?}")))?;
            let mut it = point.iter();
            let mut q = Vec::with_capacity(p.ctx.len());
            for (n, _) in &p.ctx {
                q.push(if *n == h.a { 0 } else { *it.next().ok_or_else(|| shape("point too short"))? });
            }
            let (ia, ib) = (var_pos(p, &h.a)?, var_pos(p, &h.b)?);
            q[ia] = q[ib];
            let ie = hyp_pos(p, e)?;
            let mut full = inputs.to_vec();
            full.insert(ie, Value::Mor(ev.sem(&h.cat)?.cat.id(q[ib])));
            sub(0, &q, &full)?
        }
        Rule::JWithEq => {
            let eqd = relabel(pc(1), c);
            let label = c.fresh_label("e");
            let mut hyps = vec![(label.clone(), eqd.goal.clone())];
            hyps.extend(c.hyps.iter().cloned());
            let virt = Sequent::new(c.ctx.clone(), hyps, c.goal.clone());
            let m = sub(1, point, inputs)?;
            let mut full = vec![m];
            full.extend(inputs.iter().cloned());
            j_core(ev, &virt, &label, &d.premises[0], holes, point, &full)?
        }
        Rule::EndIntro => match &c.goal {
            Formula::End(_, cat, _) => {
                let n = ev.sem(cat)?.cat.n_obj();
                let mut q = point.to_vec();
                q.push(0);
                let mut comps = Vec::with_capacity(n);
                for o in 0..n {
                    *q.last_mut().unwrap() = o;
                    comps.push(sub(0, &q, inputs)?);
                }
                Value::Tuple(comps)
            }
            g => return Err(shape(format!("end-intro with goal {g}"))),
        },
        Rule::EndElim => {
            let (last, init) = point.split_last().ok_or_else(|| shape("empty point"))?;
            match sub(0, init, inputs)? {
                Value::Tuple(ts) => ts[*last].clone(),
                v => return Err(shape(format!("end-elim of {v}"))),
            }
        }
        Rule::CoendIntro => match &inputs[0] {
            Value::Inj(o, v) => {
                let p = pc(0);
                let parts = v.untuple(p.hyps.len()).ok_or_else(|| shape(format!("{v} is not a tuple")))?;
                let mut q = point.to_vec();
                q.push(*o);
                sub(0, &q, &parts)?
            }
            v => return Err(shape(format!("coend-intro of {v}"))),
        },
        Rule::CoendElim => {
            let p = pc(0);
            let (last, init) = point.split_last().ok_or_else(|| shape("empty point"))?;
            let set = ev.eval_set(&p.hyps[0].1, &ev.diagonal(&p.ctx, init)?)?;
            let v = Value::inj(*last, Value::tuple_of(inputs));
            let k = set.class_of(&v).ok_or_else(|| shape(format!("{v} outside the coend")))?;
            sub(0, init, &[set.elems[k].clone()])?
        }
        Rule::Exchange(x, _) => {
            let i = var_pos(c, x)?;
            let mut q = point.to_vec();
            q.swap(i, i + 1);
            sub(0, &q, inputs)?
        }
        Rule::PairCtx(_, _, pv) => {
            let i = var_pos(c, pv)?;
            let (l, r) = ev.sem(&c.ctx[i].1)?.split_obj(point[i]);
            let mut q = point.to_vec();
            q.splice(i..=i, [l, r]);
            sub(0, &q, inputs)?
        }
        Rule::UnpairCtx(_, x, _) => {
            let i = var_pos(c, x)?;
            let o = ev.sem(&pc(0).ctx[i].1)?.pair_obj(point[i], point[i + 1]);
            let mut q = point.to_vec();
            q.splice(i..=i + 1, [o]);
            sub(0, &q, inputs)?
        }
        Rule::OpVar(_) => sub(0, point, inputs)?,
        Rule::ImpFunc => match (&c.hyps[0].1, &c.goal, &inputs[0]) {
            (Formula::Imp(a, _), Formula::Imp(a2, _), Value::Fun(phi)) => {
                let env = ev.diagonal(&c.ctx, point)?;
                let dom = ev.eval_set(a, &env)?;
                let dom2 = ev.eval_set(a2, &env)?;
                let mut outs = Vec::with_capacity(dom2.len());
                for u in &dom2.elems {
                    let x = sub(0, point, std::slice::from_ref(u))?;
                    let k = dom.position(&x).ok_or_else(|| shape(format!("{x} outside the domain")))?;
                    outs.push(sub(1, point, &[phi[k].clone()])?);
                }
                Value::Fun(outs)
            }
            _ => return Err(shape("imp-func on a non-function")),
        },
        Rule::NatCut(NatSite::Goal) => {
            let v = sub(1, point, inputs)?;
            sub(0, point, &[v])?
        }
        Rule::NatCut(NatSite::Hyp(l)) => {
            let i = hyp_pos(c, l)?;
            let mut full = inputs.to_vec();
            full[i] = sub(0, point, &inputs[i..=i])?;
            sub(1, point, &full)?
        }
        r => return Err(shape(format!("rule {r} must be expanded before evaluation"))),
    })
}

/// Hom-elimination on `e` in `c`: move the other hypotheses along the
/// equality to `b`, run the premise there, and move the result back.
fn j_core(
    ev: &Evaluator,
    c: &Sequent,
    e: &str,
    premise: &Derivation,
    holes: &Holes,
    point: &[usize],
    inputs: &[Value],
) -> Result<Value, EvalError> {
    let h = hom_hyp(c, e).map_err(|f| shape(format!("{f:?}")))?;
    let (ia, ib, ie) = (var_pos(c, &h.a)?, var_pos(c, &h.b)?, hyp_pos(c, e)?);
    let m = match &inputs[ie] {
        Value::Mor(m) => *m,
        v => return Err(shape(format!("equality input {v}"))),
    };
    let (alpha, beta) = (point[ia], point[ib]);
    let acat = ev.sem(&c.ctx[ia].1)?;
    let env = ev.diagonal(&c.ctx, point)?;
    let mut there = ev.identity_motion(&env);
    let id_alpha = acat.cat.id(alpha);
    let (neg, pos) = if h.sigma == Polarity::Neg { (id_alpha, m) } else { (m, id_alpha) };
    there[ia].neg = neg;
    there[ia].pos = pos;
    let mut moved = Vec::with_capacity(c.hyps.len() - 1);
    for (j, (_, f)) in c.hyps.iter().enumerate() {
        if j != ie {
            moved.push(ev.act(f, &there, &inputs[j])?);
        }
    }
    let q: Vec<usize> = point.iter().enumerate().filter(|(j, _)| *j != ia).map(|(_, o)| *o).collect();
    let out = apply(ev, premise, holes, &q, &moved)?;
    let mut at_b = point.to_vec();
    at_b[ia] = beta;
    let mut back = ev.identity_motion(&ev.diagonal(&c.ctx, &at_b)?);
    let id_beta = acat.cat.id(beta);
    let (neg, pos) = if h.sigma == Polarity::Neg { (m, id_beta) } else { (id_beta, m) };
    back[ia].neg = neg;
    back[ia].pos = pos;
    ev.act(&c.goal, &back, &out)
}
