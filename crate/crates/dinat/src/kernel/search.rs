use super::check::check_derivation;
use super::deriv::{Derivation, Rule};
use super::jrule::{hom_hyp, j_premise};
use crate::syntax::{Formula, Sequent, SignatureTable, TermExpr};

/// Outcome of a bounded backward search.
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub found: Option<Derivation>,
    /// Candidate rule applications tried.
    pub explored: usize,
}

/// Backward steps whose premises are determined by the conclusion.
fn steps(s: &Sequent) -> Vec<(Rule, Vec<Sequent>)> {
    let mut out = Vec::new();
    for (l, _) in &s.hyps {
        let hyps = s.hyps.iter().filter(|(m, _)| m != l).cloned().collect();
        out.push((Rule::Weaken(l.clone()), vec![Sequent::new(s.ctx.clone(), hyps, s.goal.clone())]));
        if hom_hyp(s, l).is_ok() {
            if let Ok(p) = j_premise(s, l) {
                out.push((Rule::J(l.clone()), vec![p]));
            }
        }
        let hyps = s.hyps.iter().filter(|(m, _)| m != l).cloned().collect();
        let f = s.hyp(l).unwrap().clone();
        out.push((Rule::Uncurry(vec![l.clone()]), vec![Sequent::new(s.ctx.clone(), hyps, Formula::imp(f, s.goal.clone()))]));
    }
    if let Formula::Imp(a, g) = &s.goal {
        let l = s.fresh_label("h");
        let mut hyps = s.hyps.clone();
        hyps.push((l.clone(), (**a).clone()));
        out.push((Rule::Curry(vec![l]), vec![Sequent::new(s.ctx.clone(), hyps, (**g).clone())]));
    }
    for w in s.ctx.windows(2) {
        let mut p = s.clone();
        let i = s.var_index(&w[0].0).unwrap();
        p.ctx.swap(i, i + 1);
        out.push((Rule::Exchange(w[0].0.clone(), w[1].0.clone()), vec![p]));
    }
    for (i, (y, t)) in s.ctx.iter().enumerate() {
        let flip = |f: &Formula| f.substitute(y, &TermExpr::neg(y.clone()));
        let mut ctx = s.ctx.clone();
        ctx[i].1 = t.dual();
        let hyps = s.hyps.iter().map(|(l, f)| (l.clone(), flip(f))).collect();
        out.push((Rule::OpVar(y.clone()), vec![Sequent::new(ctx, hyps, flip(&s.goal))]));
    }
    match &s.goal {
        Formula::End(x, c, body) => {
            let x2 = s.fresh_var(x);
            let mut ctx = s.ctx.clone();
            ctx.push((x2.clone(), c.clone()));
            out.push((Rule::EndIntro, vec![Sequent::new(ctx, s.hyps.clone(), body.rename(x, &x2))]));
        }
        Formula::And(a, b) => {
            out.push((Rule::Pair, vec![s.with_goal((**a).clone()), s.with_goal((**b).clone())]));
        }
        _ => {}
    }
    if let Some((v, c)) = s.ctx.last() {
        let delta = s.ctx[..s.ctx.len() - 1].to_vec();
        if s.hyps.iter().all(|(_, f)| !f.mentions(v)) {
            let g = Formula::end(v.clone(), c.clone(), s.goal.clone());
            out.push((Rule::EndElim, vec![Sequent::new(delta.clone(), s.hyps.clone(), g)]));
        }
        if !s.goal.mentions(v) {
            let h = Formula::coend(v.clone(), c.clone(), s.context_formula());
            out.push((Rule::CoendElim, vec![Sequent::new(delta, vec![("m".into(), h)], s.goal.clone())]));
        }
    }
    if let [(_, Formula::Coend(a, c, body))] = s.hyps.as_slice() {
        let a2 = s.fresh_var(a);
        let mut ctx = s.ctx.clone();
        ctx.push((a2.clone(), c.clone()));
        out.push((Rule::CoendIntro, vec![Sequent::new(ctx, vec![("k".into(), body.rename(a, &a2))], s.goal.clone())]));
    }
    if let ([(_, Formula::Imp(a, b))], Formula::Imp(a2, b2)) = (s.hyps.as_slice(), &s.goal) {
        out.push((
            Rule::ImpFunc,
            vec![
                Sequent::new(s.ctx.clone(), vec![("p".into(), (**a2).clone())], (**a).clone()),
                Sequent::new(s.ctx.clone(), vec![("q".into(), (**b).clone())], (**b2).clone()),
            ],
        ));
    }
    out
}

fn leaf(s: &Sequent) -> Option<Derivation> {
    if s.hyps.len() == 1 && s.hyps[0].1.alpha_equal(&s.goal) {
        return Some(Derivation::leaf(Rule::Id, s.clone()));
    }
    match &s.goal {
        Formula::Hom(_, a, b) if s.hyps.is_empty() && a.normalize() == b.op_image().normalize() => {
            Some(Derivation::leaf(Rule::Refl, s.clone()))
        }
        _ => None,
    }
}

fn go(s: &Sequent, sig: &SignatureTable, depth: usize, explored: &mut usize) -> Option<Derivation> {
    if let Some(d) = leaf(s) {
        return Some(d);
    }
    if depth <= 1 {
        return None;
    }
    'rules: for (rule, premises) in steps(s) {
        *explored += 1;
        let mut subs = Vec::new();
        for p in &premises {
            if p.check(sig).is_err() {
                continue 'rules;
            }
            match go(p, sig, depth - 1, explored) {
                Some(d) => subs.push(d),
                None => continue 'rules,
            }
        }
        let d = Derivation::new(rule, s.clone(), subs);
        if check_derivation(&d, sig).is_ok() {
            return Some(d);
        }
    }
    None
}

/// Searches for a derivation of `s` of height at most `depth`, over the
/// primitive rules whose premises the conclusion determines.
pub fn search(s: &Sequent, sig: &SignatureTable, depth: usize) -> SearchResult {
    let mut explored = 0;
    let found = go(s, sig, depth, &mut explored);
    SearchResult { found, explored }
}
