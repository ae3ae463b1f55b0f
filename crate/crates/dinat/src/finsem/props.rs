//! Extensional properties over enumerated families, shared by the `verify`
//! command and the test suites.

use serde::Serialize;

use super::apply::{eval_derivation_with, Holes};
use super::enumerate::{compose_pointwise, end_formula, end_to_family, enumerate_dinaturals, family_to_end};
use super::family::{families_equal, DinatFamily};
use super::{EvalError, Evaluator, Value};
use crate::kernel::{hom_hyp, j_premise, Derivation, Rule};
use crate::syntax::{Formula, Sequent};

/// Instances checked and the first few failures.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PropReport {
    pub instances: usize,
    pub failures: Vec<String>,
}

impl PropReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok && self.failures.len() < 5 {
            self.failures.push(what());
        }
    }

    pub fn merge(&mut self, other: PropReport) {
        self.instances += other.instances;
        for f in other.failures {
            if self.failures.len() < 5 {
                self.failures.push(f);
            }
        }
    }
}

fn hole(s: &Sequent) -> Derivation {
    Derivation::leaf(Rule::Hole("h".into()), s.clone())
}

fn eval_with(ev: &Evaluator, d: &Derivation, fam: &DinatFamily) -> Result<DinatFamily, EvalError> {
    let holes: Holes = [("h".to_string(), fam.clone())].into_iter().collect();
    eval_derivation_with(ev, d, &holes)
}

fn check_round_trip(
    ev: &Evaluator,
    r: &mut PropReport,
    d: &Derivation,
    fams: &[DinatFamily],
    name: &str,
) -> Result<(), EvalError> {
    for (i, f) in fams.iter().enumerate() {
        let back = eval_with(ev, d, f)?;
        let ok = families_equal(&back, f)?;
        r.record(ok, || format!("{name} differs from the identity on family {i}"));
    }
    Ok(())
}

/// Hom-elimination on `e` against its inverse, both ways, over every
/// enumerated family of `s` and of its premise.
pub fn j_round_trips(ev: &Evaluator, s: &Sequent, e: &str) -> Result<PropReport, EvalError> {
    let p = j_premise(s, e).map_err(|f| EvalError::Shape(format!("no hom-elimination on `{e}`: {f:?}")))?;
    let mut r = PropReport::default();
    let j_of = |sub| Derivation::new(Rule::J(e.to_string()), s.clone(), vec![sub]);
    let jinv_of = |sub| Derivation::new(Rule::JInv(e.to_string()), p.clone(), vec![sub]);
    check_round_trip(ev, &mut r, &j_of(jinv_of(hole(s))), &enumerate_dinaturals(ev, s)?, "J after J^-1")?;
    check_round_trip(ev, &mut r, &jinv_of(j_of(hole(&p))), &enumerate_dinaturals(ev, &p)?, "J^-1 after J")?;
    Ok(r)
}

/// `J(h)` at `refl` is `h`, read off the tables: at every point where the
/// ends of `e` coincide and `e` is an identity, `J(h)` agrees with `h` at
/// the point with the source of `e` removed.
pub fn j_computation(ev: &Evaluator, s: &Sequent, e: &str) -> Result<PropReport, EvalError> {
    let p = j_premise(s, e).map_err(|f| EvalError::Shape(format!("no hom-elimination on `{e}`: {f:?}")))?;
    let h = hom_hyp(s, e).map_err(|f| EvalError::Shape(format!("{f:?}")))?;
    let (ia, ib) = (s.var_index(&h.a).unwrap(), s.var_index(&h.b).unwrap());
    let ie = s.hyp_index(e).unwrap();
    let cat = ev.sem(&h.cat)?;
    let d = Derivation::new(Rule::J(e.to_string()), s.clone(), vec![hole(&p)]);
    let mut r = PropReport::default();
    for (n, fam) in enumerate_dinaturals(ev, &p)?.iter().enumerate() {
        let jh = eval_with(ev, &d, fam)?;
        let mut ok = true;
        for (pt, row) in &jh.table {
            if pt[ia] != pt[ib] {
                continue;
            }
            let pt2: Vec<usize> = pt.iter().enumerate().filter(|(i, _)| *i != ia).map(|(_, o)| *o).collect();
            for (inputs, out) in row {
                if inputs[ie] != Value::Mor(cat.cat.id(pt[ia])) {
                    continue;
                }
                let rest: Vec<Value> = inputs.iter().enumerate().filter(|(i, _)| *i != ie).map(|(_, v)| v.clone()).collect();
                ok &= fam.get(&pt2, &rest) == Some(out);
            }
        }
        r.record(ok, || format!("J(h) at refl differs from h for family {n}"));
    }
    Ok(r)
}

/// End introduction against elimination, when the goal of `s` is an end.
pub fn end_round_trips(ev: &Evaluator, s: &Sequent) -> Result<PropReport, EvalError> {
    let Formula::End(x, c, body) = &s.goal else {
        return Err(EvalError::Shape(format!("the goal of {s} is not an end")));
    };
    let x2 = s.fresh_var(x);
    let mut ctx = s.ctx.clone();
    ctx.push((x2.clone(), c.clone()));
    let p = Sequent::new(ctx, s.hyps.clone(), body.rename(x, &x2));
    let intro = |sub| Derivation::new(Rule::EndIntro, s.clone(), vec![sub]);
    let elim = |sub| Derivation::new(Rule::EndElim, p.clone(), vec![sub]);
    let mut r = PropReport::default();
    check_round_trip(ev, &mut r, &intro(elim(hole(s))), &enumerate_dinaturals(ev, s)?, "end-intro after end-elim")?;
    check_round_trip(ev, &mut r, &elim(intro(hole(&p))), &enumerate_dinaturals(ev, &p)?, "end-elim after end-intro")?;
    Ok(r)
}

/// Coend elimination against introduction, when `s` has a single coend
/// hypothesis.
pub fn coend_round_trips(ev: &Evaluator, s: &Sequent) -> Result<PropReport, EvalError> {
    let [(k, Formula::Coend(a, c, body))] = s.hyps.as_slice() else {
        return Err(EvalError::Shape(format!("{s} does not have a single coend hypothesis")));
    };
    let a2 = s.fresh_var(a);
    let mut ctx = s.ctx.clone();
    ctx.push((a2.clone(), c.clone()));
    let p = Sequent::new(ctx, vec![(k.clone(), body.rename(a, &a2))], s.goal.clone());
    let intro = |sub| Derivation::new(Rule::CoendIntro, s.clone(), vec![sub]);
    let elim = |sub| Derivation::new(Rule::CoendElim, p.clone(), vec![sub]);
    let mut r = PropReport::default();
    check_round_trip(ev, &mut r, &intro(elim(hole(s))), &enumerate_dinaturals(ev, s)?, "coend-intro after coend-elim")?;
    check_round_trip(ev, &mut r, &elim(intro(hole(&p))), &enumerate_dinaturals(ev, &p)?, "coend-elim after coend-intro")?;
    Ok(r)
}

/// The dinaturals of `s` against the end of the internal hom: equal counts,
/// and the two translations are mutually inverse bijections.
pub fn dinat_as_end(ev: &Evaluator, s: &Sequent) -> Result<PropReport, EvalError> {
    let fams = enumerate_dinaturals(ev, s)?;
    let end = ev.eval_set(&end_formula(s), &[])?;
    let mut r = PropReport::default();
    r.record(fams.len() == end.len(), || format!("{} dinaturals but {} points of the end", fams.len(), end.len()));
    let mut images = Vec::with_capacity(fams.len());
    for (i, f) in fams.iter().enumerate() {
        let v = family_to_end(ev, f)?;
        let back = end_to_family(ev, s, &v)?;
        r.record(end.position(&v).is_some() && families_equal(&back, f)?, || format!("family {i} does not round-trip"));
        images.push(v);
    }
    images.sort();
    images.dedup();
    r.record(images.len() == fams.len(), || "two families share a point of the end".into());
    for v in &end.elems {
        let f = end_to_family(ev, s, v)?;
        r.record(family_to_end(ev, &f)? == *v, || format!("point {v} does not round-trip"));
    }
    Ok(r)
}

/// Two families between the same formulas in opposite directions compose
/// to identities both ways.
pub fn inverse_pair(ev: &Evaluator, f: &DinatFamily, g: &DinatFamily) -> Result<PropReport, EvalError> {
    let mut r = PropReport::default();
    for (first, second, name) in [(f, g, "g after f"), (g, f, "f after g")] {
        let comp = compose_pointwise(ev, first, second)?;
        let ok = comp.table.values().all(|row| row.iter().all(|(i, o)| i.len() == 1 && i[0] == *o));
        r.record(ok, || format!("{name} is not the identity"));
    }
    Ok(r)
}
