use std::collections::BTreeMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::eval::Evaluator;
use super::family::{check_dinatural, hexagons, DinatFamily, HexagonWitness};
use super::value::{DSet, Value};
use super::EvalError;
use crate::syntax::{CatExpr, Formula, Sequent};

struct Cell {
    point: usize,
    input: usize,
}

/// A hexagon condition between two cells: `left[v_l] == right[v_r]`.
struct Link {
    left_cell: usize,
    right_cell: usize,
    maps: usize,
}

/// The enumeration problem of a sequent: one cell per (point, input), and
/// the hexagon conditions between cells.
struct Compiled {
    points: Vec<Vec<usize>>,
    inputs: Vec<Vec<Vec<Value>>>,
    goals: Vec<Rc<DSet>>,
    cells: Vec<Cell>,
    /// First cell of each point.
    base: Vec<usize>,
    links: Vec<Link>,
    maps: Vec<(Vec<Value>, Vec<Value>)>,
}

impl Compiled {
    fn new(ev: &Evaluator, s: &Sequent) -> Result<Compiled, EvalError> {
        let points = DinatFamily::points(ev, s)?;
        let index: BTreeMap<Vec<usize>, usize> = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let mut cells = Vec::new();
        let mut base = Vec::new();
        let mut inputs = Vec::new();
        let mut goals = Vec::new();
        let mut cell_of: Vec<BTreeMap<Vec<Value>, usize>> = Vec::new();
        for (pi, p) in points.iter().enumerate() {
            let env = ev.diagonal(&s.ctx, p)?;
            let ins = DinatFamily::inputs(ev, s, &env)?;
            let mut m = BTreeMap::new();
            base.push(cells.len());
            for (ii, i) in ins.iter().enumerate() {
                m.insert(i.clone(), cells.len());
                cells.push(Cell { point: pi, input: ii });
            }
            cell_of.push(m);
            inputs.push(ins);
            goals.push(ev.eval_set(&s.goal, &env)?);
        }
        let mut maps: Vec<(Vec<Value>, Vec<Value>)> = Vec::new();
        let mut links = Vec::new();
        for h in hexagons(ev, s)? {
            let (pa, pb) = (index[&h.point_a], index[&h.point_b]);
            let l = goals[pb].elems.iter().map(|g| ev.act(&s.goal, &h.goal_from_b, g)).collect::<Result<Vec<_>, _>>()?;
            let r = goals[pa].elems.iter().map(|g| ev.act(&s.goal, &h.goal_from_a, g)).collect::<Result<Vec<_>, _>>()?;
            maps.push((l, r));
            for input in DinatFamily::inputs(ev, s, &h.mixed)? {
                let to_b = s.hyps.iter().zip(&input).map(|((_, f), v)| ev.act(f, &h.hyp_to_b, v)).collect::<Result<Vec<_>, _>>()?;
                let to_a = s.hyps.iter().zip(&input).map(|((_, f), v)| ev.act(f, &h.hyp_to_a, v)).collect::<Result<Vec<_>, _>>()?;
                links.push(Link { left_cell: cell_of[pb][&to_b], right_cell: cell_of[pa][&to_a], maps: maps.len() - 1 });
            }
        }
        Ok(Compiled { points, inputs, goals, cells, base, links, maps })
    }

    fn holds(&self, choice: &[usize]) -> bool {
        self.links.iter().all(|l| {
            let (lm, rm) = &self.maps[l.maps];
            lm[choice[l.left_cell]] == rm[choice[l.right_cell]]
        })
    }

    fn solve(&self, ev: &Evaluator) -> Result<Vec<Vec<usize>>, EvalError> {
        let mut by_last: Vec<Vec<usize>> = vec![Vec::new(); self.cells.len()];
        for (k, l) in self.links.iter().enumerate() {
            by_last[l.left_cell.max(l.right_cell)].push(k);
        }
        let sizes: Vec<usize> = self.cells.iter().map(|c| self.goals[c.point].len()).collect();
        let mut choice = vec![0usize; self.cells.len()];
        let mut found = Vec::new();
        search(ev, 0, &sizes, &self.links, &self.maps, &by_last, &mut choice, &mut found)?;
        Ok(found)
    }

    fn family(&self, s: &Sequent, choice: &[usize]) -> DinatFamily {
        let mut table: BTreeMap<Vec<usize>, BTreeMap<Vec<Value>, Value>> =
            self.points.iter().map(|p| (p.clone(), BTreeMap::new())).collect();
        for (k, c) in self.cells.iter().enumerate() {
            let row = table.get_mut(&self.points[c.point]).unwrap();
            row.insert(self.inputs[c.point][c.input].clone(), self.goals[c.point].elems[choice[k]].clone());
        }
        DinatFamily { sequent: s.clone(), table }
    }
}

/// All dinatural families over `s`, in canonical order.
pub fn enumerate_dinaturals(ev: &Evaluator, s: &Sequent) -> Result<Vec<DinatFamily>, EvalError> {
    let c = Compiled::new(ev, s)?;
    Ok(c.solve(ev)?.iter().map(|ch| c.family(s, ch)).collect())
}

#[allow(clippy::too_many_arguments)]
fn search(
    ev: &Evaluator,
    k: usize,
    sizes: &[usize],
    links: &[Link],
    maps: &[(Vec<Value>, Vec<Value>)],
    by_last: &[Vec<usize>],
    choice: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) -> Result<(), EvalError> {
    if k == sizes.len() {
        ev.guard(|| "the dinatural families".into(), found.len() as u128 + 1)?;
        found.push(choice.clone());
        return Ok(());
    }
    for v in 0..sizes[k] {
        choice[k] = v;
        let ok = by_last[k].iter().all(|&i| {
            let l = &links[i];
            let (lm, rm) = &maps[l.maps];
            lm[choice[l.left_cell]] == rm[choice[l.right_cell]]
        });
        if ok {
            search(ev, k + 1, sizes, links, maps, by_last, choice, found)?;
        }
    }
    Ok(())
}

/// `end x1. ... end xn. (H1 * ... * Hk => G)` for a sequent over `x1..xn`.
pub fn end_formula(s: &Sequent) -> Formula {
    let body = Formula::imp(s.context_formula(), s.goal.clone());
    s.ctx.iter().rev().fold(body, |acc, (x, c)| Formula::end(x.clone(), c.clone(), acc))
}

/// The element of `end_formula(s)` a family corresponds to.
pub fn family_to_end(ev: &Evaluator, fam: &DinatFamily) -> Result<Value, EvalError> {
    let s = &fam.sequent;
    let sizes = s.ctx.iter().map(|(_, t)| Ok(ev.sem(t)?.cat.n_obj())).collect::<Result<Vec<_>, EvalError>>()?;
    let mut point = Vec::new();
    build_end(ev, fam, &sizes, &mut point)
}

fn build_end(ev: &Evaluator, fam: &DinatFamily, sizes: &[usize], point: &mut Vec<usize>) -> Result<Value, EvalError> {
    let s = &fam.sequent;
    if point.len() == sizes.len() {
        let dom = ev.eval_set(&s.context_formula(), &ev.diagonal(&s.ctx, point)?)?;
        let mut outs = Vec::with_capacity(dom.len());
        for a in &dom.elems {
            let parts = a.untuple(s.hyps.len()).ok_or_else(|| EvalError::Shape(format!("{a} is not a tuple")))?;
            outs.push(
                fam.get(point, &parts)
                    .cloned()
                    .ok_or_else(|| EvalError::Shape(format!("family has no entry at {point:?}")))?,
            );
        }
        return Ok(Value::Fun(outs));
    }
    let mut comps = Vec::with_capacity(sizes[point.len()]);
    for o in 0..sizes[point.len()] {
        point.push(o);
        comps.push(build_end(ev, fam, sizes, point)?);
        point.pop();
    }
    Ok(Value::Tuple(comps))
}

/// Inverse of `family_to_end`.
pub fn end_to_family(ev: &Evaluator, s: &Sequent, v: &Value) -> Result<DinatFamily, EvalError> {
    DinatFamily::tabulate(ev, s, |p, inputs| {
        let mut cur = v;
        for &o in p {
            cur = match cur {
                Value::Tuple(ts) => &ts[o],
                other => return Err(EvalError::Shape(format!("{other} is not a tuple"))),
            };
        }
        let dom = ev.eval_set(&s.context_formula(), &ev.diagonal(&s.ctx, p)?)?;
        let k = dom
            .position(&Value::tuple_of(inputs))
            .ok_or_else(|| EvalError::Shape("input outside the domain".into()))?;
        match cur {
            Value::Fun(outs) => Ok(outs[k].clone()),
            other => Err(EvalError::Shape(format!("{other} is not a function"))),
        }
    })
}

/// The end of `body` in `x` (free in nothing else) and its projections.
pub fn compute_end(ev: &Evaluator, x: &str, c: &CatExpr, body: &Formula) -> Result<(Rc<DSet>, DinatFamily), EvalError> {
    let end = Formula::end(x, c.clone(), body.clone());
    let set = ev.eval_set(&end, &[])?;
    let s = Sequent::new(vec![(x.to_string(), c.clone())], vec![("k".into(), end)], body.clone());
    let fam = DinatFamily::tabulate(ev, &s, |p, inputs| match &inputs[0] {
        Value::Tuple(ts) => Ok(ts[p[0]].clone()),
        v => Err(EvalError::Shape(format!("{v} is not a tuple"))),
    })?;
    Ok((set, fam))
}

/// The coend of `body` in `x` (free in nothing else) and its injections.
pub fn compute_coend(ev: &Evaluator, x: &str, c: &CatExpr, body: &Formula) -> Result<(Rc<DSet>, DinatFamily), EvalError> {
    let coend = Formula::coend(x, c.clone(), body.clone());
    let set = ev.eval_set(&coend, &[])?;
    let s = Sequent::new(vec![(x.to_string(), c.clone())], vec![("k".into(), body.clone())], coend);
    let fam = DinatFamily::tabulate(ev, &s, |p, inputs| {
        let v = Value::inj(p[0], inputs[0].clone());
        let k = set.class_of(&v).ok_or_else(|| EvalError::Shape(format!("{v} outside the coend")))?;
        Ok(set.elems[k].clone())
    })?;
    Ok((set, fam))
}

/// Two dinatural families whose pointwise composite is not dinatural.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionWitness {
    pub p: String,
    pub q: String,
    pub r: String,
    /// Tables of the two families as (point, inputs, output) rows.
    pub alpha: Vec<(Vec<usize>, Vec<Value>, Value)>,
    pub beta: Vec<(Vec<usize>, Vec<Value>, Value)>,
    pub failure: HexagonWitness,
}

pub fn rows(f: &DinatFamily) -> Vec<(Vec<usize>, Vec<Value>, Value)> {
    f.table.iter().flat_map(|(p, r)| r.iter().map(move |(i, v)| (p.clone(), i.clone(), v.clone()))).collect()
}

pub fn from_rows(s: &Sequent, rows: &[(Vec<usize>, Vec<Value>, Value)]) -> DinatFamily {
    let mut table: BTreeMap<Vec<usize>, BTreeMap<Vec<Value>, Value>> = BTreeMap::new();
    for (p, i, v) in rows {
        table.entry(p.clone()).or_default().insert(i.clone(), v.clone());
    }
    DinatFamily { sequent: s.clone(), table }
}

/// The pointwise composite of `alpha: P -> Q` and `beta: Q -> R`.
pub fn compose_pointwise(ev: &Evaluator, alpha: &DinatFamily, beta: &DinatFamily) -> Result<DinatFamily, EvalError> {
    let s = alpha.sequent.with_goal(beta.sequent.goal.clone());
    DinatFamily::tabulate(ev, &s, |p, inputs| {
        let mid = alpha.get(p, inputs).ok_or_else(|| EvalError::Shape("alpha is partial".into()))?;
        beta.get(p, std::slice::from_ref(mid)).cloned().ok_or_else(|| EvalError::Shape("beta is partial".into()))
    })
}

/// Searches pairs of dinatural families `P -> Q -> R` over one variable
/// `x: C`, for `P, Q, R` drawn from `pool`, whose composite fails the
/// hexagon. Pools whose enumeration exceeds the evaluator's bound are
/// skipped.
pub fn search_composition_failure(ev: &Evaluator, pool: &[Formula]) -> Result<Option<CompositionWitness>, EvalError> {
    let ctx = vec![("x".to_string(), CatExpr::base("C"))];
    let seq = |i: usize, j: usize| Sequent::new(ctx.clone(), vec![("k".into(), pool[i].clone())], pool[j].clone());
    type Solved = Option<Rc<(Compiled, Vec<Vec<usize>>)>>;
    let mut cache: BTreeMap<(usize, usize), Solved> = BTreeMap::new();
    let mut dinats = |i: usize, j: usize| -> Result<Solved, EvalError> {
        if let Some(v) = cache.get(&(i, j)) {
            return Ok(v.clone());
        }
        let v = match Compiled::new(ev, &seq(i, j)).and_then(|c| c.solve(ev).map(|f| (c, f))) {
            Ok(v) => Some(Rc::new(v)),
            Err(EvalError::BoundExceeded { .. }) => None,
            Err(e) => return Err(e),
        };
        cache.insert((i, j), v.clone());
        Ok(v)
    };
    for q in 0..pool.len() {
        for p in 0..pool.len() {
            let Some(pq) = dinats(p, q)? else { continue };
            if pq.1.is_empty() {
                continue;
            }
            for r in 0..pool.len() {
                let Some(qr) = dinats(q, r)? else { continue };
                let Some(pr) = dinats(p, r)? else { continue };
                // Cells of P -> Q and P -> R coincide; a cell's output in Q
                // is an input of Q -> R at the same point.
                let (cpq, cqr, cpr) = (&pq.0, &qr.0, &pr.0);
                for a in &pq.1 {
                    for b in &qr.1 {
                        let comp: Vec<usize> = cpq
                            .cells
                            .iter()
                            .zip(a)
                            .map(|(c, &out)| b[cqr.base[c.point] + out])
                            .collect();
                        if cpr.holds(&comp) {
                            continue;
                        }
                        let (fa, fb) = (cpq.family(&seq(p, q), a), cqr.family(&seq(q, r), b));
                        let failure = check_dinatural(ev, &compose_pointwise(ev, &fa, &fb)?)?
                            .ok_or_else(|| EvalError::Shape("compiled hexagon disagrees with check_dinatural".into()))?;
                        return Ok(Some(CompositionWitness {
                            p: pool[p].to_string(),
                            q: pool[q].to_string(),
                            r: pool[r].to_string(),
                            alpha: rows(&fa),
                            beta: rows(&fb),
                            failure,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}
