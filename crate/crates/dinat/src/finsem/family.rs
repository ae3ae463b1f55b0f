use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::eval::{Binding, Evaluator};
use super::value::Value;
use super::EvalError;
use crate::syntax::Sequent;

/// A family of functions, one per assignment of objects to the context
/// variables, from the hypotheses' sets to the goal's set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DinatFamily {
    pub sequent: Sequent,
    /// Point, then one value per hypothesis, to the output.
    pub table: BTreeMap<Vec<usize>, BTreeMap<Vec<Value>, Value>>,
}

/// A failing hexagon: the two composites disagree on `input`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HexagonWitness {
    pub variable: String,
    pub morphism: String,
    /// Objects of the other variables, by name.
    pub others: Vec<(String, String)>,
    pub input: Vec<Value>,
    pub left: Value,
    pub right: Value,
}

impl fmt::Display for HexagonWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inputs: Vec<String> = self.input.iter().map(|v| v.to_string()).collect();
        write!(f, "in `{}` along {}", self.variable, self.morphism)?;
        if !self.others.is_empty() {
            let o: Vec<String> = self.others.iter().map(|(x, v)| format!("{x}={v}")).collect();
            write!(f, " with {}", o.join(", "))?;
        }
        write!(f, ", input [{}] gives {} and {}", inputs.join(", "), self.left, self.right)
    }
}

/// Every tuple with one entry from each list, in lexicographic order.
pub fn cartesian<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for l in lists {
        let mut next = Vec::with_capacity(out.len() * l.len());
        for prefix in &out {
            for x in l {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

impl DinatFamily {
    pub fn get(&self, point: &[usize], inputs: &[Value]) -> Option<&Value> {
        self.table.get(point)?.get(inputs)
    }

    /// All assignments of objects to the context of `s`.
    pub fn points(ev: &Evaluator, s: &Sequent) -> Result<Vec<Vec<usize>>, EvalError> {
        let sizes = s
            .ctx
            .iter()
            .map(|(_, t)| Ok((0..ev.sem(t)?.cat.n_obj()).collect()))
            .collect::<Result<Vec<Vec<usize>>, EvalError>>()?;
        Ok(cartesian(&sizes))
    }

    /// The hypothesis tuples at a point.
    pub fn inputs(ev: &Evaluator, s: &Sequent, env: &[Binding]) -> Result<Vec<Vec<Value>>, EvalError> {
        let sets = s.hyps.iter().map(|(_, f)| ev.eval_set(f, env)).collect::<Result<Vec<_>, _>>()?;
        let required = sets.iter().fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128));
        ev.guard(|| format!("the hypotheses of {s}"), required)?;
        Ok(cartesian(&sets.iter().map(|s| s.elems.clone()).collect::<Vec<_>>()))
    }

    /// Tabulates `f` at every point and hypothesis tuple of `s`.
    pub fn tabulate(
        ev: &Evaluator,
        s: &Sequent,
        mut f: impl FnMut(&[usize], &[Value]) -> Result<Value, EvalError>,
    ) -> Result<DinatFamily, EvalError> {
        let mut table = BTreeMap::new();
        for p in DinatFamily::points(ev, s)? {
            let env = ev.diagonal(&s.ctx, &p)?;
            let mut row = BTreeMap::new();
            for i in DinatFamily::inputs(ev, s, &env)? {
                let v = f(&p, &i)?;
                row.insert(i, v);
            }
            table.insert(p, row);
        }
        Ok(DinatFamily { sequent: s.clone(), table })
    }

    pub fn size(&self) -> usize {
        self.table.values().map(|r| r.len()).sum()
    }
}

/// One hexagon instance: a variable, a morphism `f: a -> b` of its category
/// and objects for the other variables.
pub(crate) struct Hexagon {
    pub var: usize,
    pub morphism: usize,
    pub point_a: Vec<usize>,
    pub point_b: Vec<usize>,
    pub mixed: Vec<Binding>,
    /// Hypotheses from the mixed point to `b` and to `a`.
    pub hyp_to_b: Vec<Binding>,
    pub hyp_to_a: Vec<Binding>,
    /// Goal from `b` and from `a` to the other mixed point.
    pub goal_from_b: Vec<Binding>,
    pub goal_from_a: Vec<Binding>,
}

pub(crate) fn hexagons(ev: &Evaluator, s: &Sequent) -> Result<Vec<Hexagon>, EvalError> {
    let mut out = Vec::new();
    let points = DinatFamily::points(ev, s)?;
    for (k, (x, ty)) in s.ctx.iter().enumerate() {
        let cat = ev.sem(ty)?;
        for f in 0..cat.cat.n_mor() {
            let (a, b) = (cat.cat.src(f), cat.cat.dst(f));
            let (ida, idb) = (cat.cat.id(a), cat.cat.id(b));
            for p in points.iter().filter(|p| p[k] == 0) {
                let (mut pa, mut pb) = (p.clone(), p.clone());
                pa[k] = a;
                pb[k] = b;
                let mut mixed = ev.diagonal(&s.ctx, &pa)?;
                mixed[k] = ev.bind(x, ty, b, a)?;
                let moved = |neg: usize, pos: usize| -> Result<Vec<Binding>, EvalError> {
                    let mut m = ev.identity_motion(&mixed);
                    m[k] = ev.bind(x, ty, neg, pos)?;
                    Ok(m)
                };
                out.push(Hexagon {
                    var: k,
                    morphism: f,
                    hyp_to_b: moved(idb, f)?,
                    hyp_to_a: moved(f, ida)?,
                    goal_from_b: moved(f, idb)?,
                    goal_from_a: moved(ida, f)?,
                    point_a: pa,
                    point_b: pb,
                    mixed,
                });
            }
        }
    }
    Ok(out)
}

/// Checks the hexagon for every variable, morphism and input; returns the
/// first failure.
pub fn check_dinatural(ev: &Evaluator, fam: &DinatFamily) -> Result<Option<HexagonWitness>, EvalError> {
    let s = &fam.sequent;
    let missing = |p: &[usize]| EvalError::Shape(format!("family has no entry at point {p:?}"));
    for h in hexagons(ev, s)? {
        for input in DinatFamily::inputs(ev, s, &h.mixed)? {
            let to_b = s.hyps.iter().zip(&input).map(|((_, f), v)| ev.act(f, &h.hyp_to_b, v)).collect::<Result<Vec<_>, _>>()?;
            let to_a = s.hyps.iter().zip(&input).map(|((_, f), v)| ev.act(f, &h.hyp_to_a, v)).collect::<Result<Vec<_>, _>>()?;
            let gb = fam.get(&h.point_b, &to_b).ok_or_else(|| missing(&h.point_b))?;
            let ga = fam.get(&h.point_a, &to_a).ok_or_else(|| missing(&h.point_a))?;
            let left = ev.act(&s.goal, &h.goal_from_b, gb)?;
            let right = ev.act(&s.goal, &h.goal_from_a, ga)?;
            if left != right {
                let (x, ty) = &s.ctx[h.var];
                let cat = ev.sem(ty)?;
                let mut others = Vec::new();
                for (j, (y, t)) in s.ctx.iter().enumerate() {
                    if j != h.var {
                        others.push((y.clone(), ev.sem(t)?.cat.objects[h.point_a[j]].clone()));
                    }
                }
                return Ok(Some(HexagonWitness {
                    variable: x.clone(),
                    morphism: cat.cat.morphisms[h.morphism].name.clone(),
                    others,
                    input,
                    left,
                    right,
                }));
            }
        }
    }
    Ok(None)
}

/// Extensional equality; the families must share their points and inputs.
pub fn families_equal(f1: &DinatFamily, f2: &DinatFamily) -> Result<bool, EvalError> {
    if f1.table.len() != f2.table.len() {
        return Err(EvalError::Shape(format!("{} points against {}", f1.table.len(), f2.table.len())));
    }
    let mut equal = true;
    for ((p1, r1), (p2, r2)) in f1.table.iter().zip(&f2.table) {
        if p1 != p2 || r1.len() != r2.len() || r1.keys().zip(r2.keys()).any(|(a, b)| a != b) {
            return Err(EvalError::Shape(format!("the families differ in shape at point {p1:?}")));
        }
        equal &= r1.values().zip(r2.values()).all(|(a, b)| a == b);
    }
    Ok(equal)
}
