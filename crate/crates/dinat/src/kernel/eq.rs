use super::check::{check_derivation, from_j_failure, rename_root};
use super::deriv::{Derivation, NatSite, Rule};
use super::jrule::j_premise;
use super::KernelError;
use crate::syntax::{Sequent, SignatureTable};

/// Two derivations claimed extensionally equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqJudgement {
    pub lhs: Derivation,
    pub rhs: Derivation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Leave the judgement to extensional checking.
    Direct,
    /// Precompose both sides with refl on each listed equality, in order,
    /// then normalize. An empty list only normalizes.
    JEq(Vec<String>),
}

fn var_key(s: &Sequent, n: &str, tag: &str) -> String {
    s.var_index(n).map_or_else(|| n.to_string(), |i| format!("{tag}v{i}"))
}

fn hyp_key(s: &Sequent, n: &str, tag: &str) -> String {
    s.hyp_index(n).map_or_else(|| n.to_string(), |i| format!("{tag}h{i}"))
}

/// A name-independent rendering of the tree: rule parameters become
/// positions and every conclusion is put in canonical form.
pub fn canonical_key(d: &Derivation) -> String {
    let c = &d.concl;
    let p0 = d.premises.first().map(|p| &p.concl);
    let in_premise = |n: &str, f: fn(&Sequent, &str, &str) -> String| p0.map_or(n.to_string(), |p| f(p, n, "p"));
    let params: Vec<String> = match &d.rule {
        Rule::Weaken(l) | Rule::J(l) | Rule::HomRelAdj(l) | Rule::NatCut(NatSite::Hyp(l)) => vec![hyp_key(c, l, "")],
        Rule::CoYonedaHyp(l, dir) => vec![hyp_key(c, l, ""), format!("{dir:?}")],
        Rule::JInv(e) => vec![in_premise(e, hyp_key)],
        Rule::Curry(ls) => ls.iter().map(|l| in_premise(l, hyp_key)).collect(),
        Rule::Uncurry(ls) => ls.iter().map(|l| hyp_key(c, l, "")).collect(),
        Rule::Reindex { var, term } => {
            vec![in_premise(var, var_key), term.map_names(&|n| var_key(c, n, "")).to_string()]
        }
        Rule::Exchange(x, y) => vec![var_key(c, x, ""), var_key(c, y, "")],
        Rule::OpVar(y) => vec![var_key(c, y, "")],
        Rule::PairCtx(_, _, p) => vec![var_key(c, p, "")],
        Rule::UnpairCtx(_, x, y) => vec![var_key(c, x, ""), var_key(c, y, "")],
        Rule::Hole(n) => vec![n.clone()],
        Rule::YonedaGoal(dir) | Rule::CoendFrobenius(dir) => vec![format!("{dir:?}")],
        Rule::Fubini(k) => vec![format!("{k:?}")],
        _ => vec![],
    };
    let kids: Vec<String> = d.premises.iter().map(canonical_key).collect();
    format!("{}[{}]{}({})", d.rule.name(), params.join(","), c.canon(), kids.join(","))
}

fn accept(cand: Derivation, at: &Derivation, sig: &SignatureTable) -> Option<Derivation> {
    (check_derivation(&cand, sig).is_ok() && cand.concl.alpha_equal(&at.concl)).then_some(cand)
}

fn jinv(e: &str, d: Derivation) -> Option<Derivation> {
    let concl = j_premise(&d.concl, e).ok()?;
    Some(Derivation::new(Rule::JInv(e.to_string()), concl, vec![d]))
}

/// One rewrite at the root of `d`, whose premises are already normal.
fn rewrite(d: &Derivation, sig: &SignatureTable) -> Option<Derivation> {
    let p = d.premises.first()?;
    let cand = match (&d.rule, &p.rule) {
        (Rule::JInv(e), Rule::J(g)) if e == g => rename_root(&p.premises[0], &d.concl),
        (Rule::JInv(e), Rule::J(g)) => {
            let inner = normalize(&jinv(e, p.premises[0].clone())?, sig);
            Derivation::new(Rule::J(g.clone()), d.concl.clone(), vec![inner])
        }
        (Rule::JInv(e), Rule::Id) if p.concl.hyps.len() == 1 && p.concl.hyps[0].0 == *e => {
            Derivation::leaf(Rule::Refl, d.concl.clone())
        }
        (Rule::JInv(e), Rule::JInv(g)) => {
            let x = p.premises[0].clone();
            let plain = jinv(e, x)?;
            let reduced = normalize(&plain, sig);
            if canonical_key(&reduced) == canonical_key(&plain) {
                return None;
            }
            let concl = j_premise(&reduced.concl, g).ok()?;
            let c = Derivation::new(Rule::JInv(g.clone()), concl, vec![reduced]);
            rename_root(&c, &d.concl)
        }
        (Rule::J(e), Rule::JInv(g)) => {
            let inner = &p.premises[0];
            if !inner.concl.alpha_equal(&d.concl) || inner.concl.hyp_index(g) != d.concl.hyp_index(e) {
                return None;
            }
            rename_root(inner, &d.concl)
        }
        (Rule::J(_), Rule::Refl) if d.concl.hyps.len() == 1 && d.concl.hyps[0].1.alpha_equal(&d.concl.goal) => {
            Derivation::leaf(Rule::Id, d.concl.clone())
        }
        _ => return None,
    };
    accept(cand, d, sig)
}

/// Bottom-up normal form under the computation and uniqueness rules for
/// hom-elim; every step is re-checked against the same conclusion.
pub fn normalize(d: &Derivation, sig: &SignatureTable) -> Derivation {
    let premises = d.premises.iter().map(|p| normalize(p, sig)).collect();
    let mut cur = Derivation::new(d.rule.clone(), d.concl.clone(), premises);
    for _ in 0..64 {
        match rewrite(&cur, sig) {
            Some(next) => cur = next,
            None => break,
        }
    }
    cur
}

/// Reduces an equation to the obligations left for extensional checking.
pub fn check_eq_judgement(
    j: &EqJudgement,
    strategy: &Strategy,
    sig: &SignatureTable,
) -> Result<Vec<EqJudgement>, KernelError> {
    let l = check_derivation(&j.lhs, sig)?;
    let r = check_derivation(&j.rhs, sig)?;
    if !l.alpha_equal(&r) {
        return Err(KernelError::SchemaMismatch {
            node: "equation".into(),
            reason: format!("sides conclude {l} and {r}"),
        });
    }
    let (a, b) = match strategy {
        Strategy::Direct => (j.lhs.clone(), j.rhs.clone()),
        Strategy::JEq(labels) => {
            let (mut a, mut b) = (normalize(&j.lhs, sig), normalize(&j.rhs, sig));
            for e in labels {
                let node = format!("jeq {e}");
                let ca = j_premise(&a.concl, e).map_err(|f| from_j_failure(&node, f))?;
                let eb = a.concl.hyp_index(e).map_or(e.clone(), |i| b.concl.hyps[i].0.clone());
                let cb = j_premise(&b.concl, &eb).map_err(|f| from_j_failure(&node, f))?;
                a = normalize(&Derivation::new(Rule::JInv(e.clone()), ca, vec![a]), sig);
                b = normalize(&Derivation::new(Rule::JInv(eb), cb, vec![b]), sig);
            }
            (a, b)
        }
    };
    if canonical_key(&a) == canonical_key(&b) {
        Ok(Vec::new())
    } else {
        Ok(vec![EqJudgement { lhs: a, rhs: b }])
    }
}
