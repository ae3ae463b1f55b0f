use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use super::fincat::{FinCat, SemCat};
use super::model::{product_type, slot_types, Model};
use super::value::{DSet, Value};
use super::{max_set_size, EvalError, ModelError};
use crate::syntax::{CatExpr, Formula, Polarity, TermExpr};

/// A variable with two components. In an environment `neg` and `pos` are
/// the objects read by negative and positive occurrences; in a motion they
/// are morphisms, `neg` going backwards.
#[derive(Clone, Debug)]
pub struct Binding {
    pub name: String,
    pub ty: CatExpr,
    pub cat: Rc<SemCat>,
    pub neg: usize,
    pub pos: usize,
}

type SetKey = (Formula, Vec<(String, usize, usize)>);

/// Evaluates formulas in one model, caching categories and sets. Not shared
/// across threads.
pub struct Evaluator<'m> {
    pub model: &'m Model,
    pub limit: usize,
    cats: RefCell<HashMap<CatExpr, Rc<SemCat>>>,
    sets: RefCell<HashMap<SetKey, Rc<DSet>>>,
}

fn lookup<'a>(vars: &'a [Binding], x: &str) -> Result<&'a Binding, EvalError> {
    vars.iter().rev().find(|b| b.name == x).ok_or_else(|| EvalError::Unassigned(x.to_string()))
}

pub fn swapped(vars: &[Binding]) -> Vec<Binding> {
    vars.iter().map(|b| Binding { neg: b.pos, pos: b.neg, ..b.clone() }).collect()
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m Model) -> Evaluator<'m> {
        Evaluator::with_limit(model, max_set_size())
    }

    pub fn with_limit(model: &'m Model, limit: usize) -> Evaluator<'m> {
        Evaluator { model, limit, cats: RefCell::default(), sets: RefCell::default() }
    }

    pub fn guard(&self, what: impl FnOnce() -> String, required: u128) -> Result<(), EvalError> {
        if required > self.limit as u128 {
            return Err(EvalError::BoundExceeded { what: what(), required, limit: self.limit });
        }
        Ok(())
    }

    /// The category a type denotes, with its product structure.
    pub fn sem(&self, e: &CatExpr) -> Result<Rc<SemCat>, EvalError> {
        let e = e.normalize();
        if let Some(c) = self.cats.borrow().get(&e) {
            return Ok(c.clone());
        }
        let c = match &e {
            CatExpr::Base(n) => SemCat::leaf(self.model.base(n)?.clone()),
            CatExpr::Op(inner) => SemCat::leaf(self.model.cat_of(inner)?.op()),
            CatExpr::Prod(a, b) => SemCat::product(self.sem(a)?, self.sem(b)?),
            CatExpr::Unit => SemCat::leaf(FinCat::unit()),
        };
        self.cats.borrow_mut().insert(e, c.clone());
        Ok(c)
    }

    /// A binding for `name: ty` with both components set.
    pub fn bind(&self, name: &str, ty: &CatExpr, neg: usize, pos: usize) -> Result<Binding, EvalError> {
        Ok(Binding { name: name.to_string(), ty: ty.normalize(), cat: self.sem(ty)?, neg, pos })
    }

    /// The environment placing each variable of `ctx` at the given object.
    pub fn diagonal(&self, ctx: &[(String, CatExpr)], point: &[usize]) -> Result<Vec<Binding>, EvalError> {
        ctx.iter().zip(point).map(|((n, t), &o)| self.bind(n, t, o, o)).collect()
    }

    /// The motion holding every variable of `env` at its identities.
    pub fn identity_motion(&self, env: &[Binding]) -> Vec<Binding> {
        env.iter()
            .map(|b| Binding { neg: b.cat.cat.id(b.neg), pos: b.cat.cat.id(b.pos), ..b.clone() })
            .collect()
    }

    pub fn motion_src(&self, m: &[Binding]) -> Vec<Binding> {
        m.iter().map(|b| Binding { neg: b.cat.cat.dst(b.neg), pos: b.cat.cat.src(b.pos), ..b.clone() }).collect()
    }

    pub fn motion_tgt(&self, m: &[Binding]) -> Vec<Binding> {
        m.iter().map(|b| Binding { neg: b.cat.cat.src(b.neg), pos: b.cat.cat.dst(b.pos), ..b.clone() }).collect()
    }

    fn atom_dom(&self, p: &str) -> Result<Rc<SemCat>, EvalError> {
        let t = self.atom(p)?;
        self.sem(&product_type(&slot_types(&t.slots)))
    }

    fn atom(&self, p: &str) -> Result<&'m super::model::AtomTable, EvalError> {
        Ok(self
            .model
            .atoms
            .get(p)
            .ok_or_else(|| ModelError::Missing { kind: "atom".into(), name: p.to_string() })?)
    }

    fn functor(&self, f: &str) -> Result<&'m super::model::FunctorTable, EvalError> {
        Ok(self
            .model
            .functors
            .get(f)
            .ok_or_else(|| ModelError::Missing { kind: "functor".into(), name: f.to_string() })?)
    }

    /// Normalized type of a term.
    pub fn term_type(&self, t: &TermExpr, vars: &[Binding]) -> Result<CatExpr, EvalError> {
        let flip = |p: &Polarity, c: &CatExpr| if *p == Polarity::Pos { c.normalize() } else { c.dual() };
        Ok(match t {
            TermExpr::Var(x, p) => flip(p, &lookup(vars, x)?.ty),
            TermExpr::App(f, p, _) => flip(p, &self.functor(f)?.cod),
            TermExpr::Pair(a, b) => CatExpr::prod(self.term_type(a, vars)?, self.term_type(b, vars)?),
            TermExpr::Fst(u) | TermExpr::Snd(u) => match self.term_type(u, vars)? {
                CatExpr::Prod(a, b) => *if matches!(t, TermExpr::Fst(_)) { a } else { b },
                other => return Err(EvalError::Shape(format!("projection from non-product {other}"))),
            },
            TermExpr::Unit => CatExpr::Unit,
        })
    }

    /// Object (`obj`) or morphism index of a term under an environment or
    /// a motion.
    pub fn term_idx(&self, t: &TermExpr, vars: &[Binding], obj: bool) -> Result<usize, EvalError> {
        Ok(match t {
            TermExpr::Var(x, p) => {
                let b = lookup(vars, x)?;
                if *p == Polarity::Pos {
                    b.pos
                } else {
                    b.neg
                }
            }
            TermExpr::App(f, _, args) => {
                let table = self.functor(f)?;
                let dom = self.sem(&product_type(&table.dom))?;
                let parts = args.iter().map(|a| self.term_idx(a, vars, obj)).collect::<Result<Vec<_>, _>>()?;
                let i = dom.tuple_index(&parts, obj);
                if obj {
                    table.obj[i]
                } else {
                    table.mor[i]
                }
            }
            TermExpr::Pair(a, b) => {
                let cat = self.sem(&self.term_type(t, vars)?)?;
                let (i, j) = (self.term_idx(a, vars, obj)?, self.term_idx(b, vars, obj)?);
                if obj {
                    cat.pair_obj(i, j)
                } else {
                    cat.pair_mor(i, j)
                }
            }
            TermExpr::Fst(u) | TermExpr::Snd(u) => {
                let cat = self.sem(&self.term_type(u, vars)?)?;
                let i = self.term_idx(u, vars, obj)?;
                let (l, r) = if obj { cat.split_obj(i) } else { cat.split_mor(i) };
                if matches!(t, TermExpr::Fst(_)) {
                    l
                } else {
                    r
                }
            }
            TermExpr::Unit => 0,
        })
    }

    /// The set a formula denotes at an environment, in canonical order.
    pub fn eval_set(&self, f: &Formula, env: &[Binding]) -> Result<Rc<DSet>, EvalError> {
        let mut key_env = Vec::new();
        for x in f.free_vars() {
            let b = lookup(env, &x)?;
            key_env.push((x, b.neg, b.pos));
        }
        let key = (f.clone(), key_env);
        if let Some(s) = self.sets.borrow().get(&key) {
            return Ok(s.clone());
        }
        let s = Rc::new(self.compute_set(f, env)?);
        self.sets.borrow_mut().insert(key, s.clone());
        Ok(s)
    }

    fn compute_set(&self, f: &Formula, env: &[Binding]) -> Result<DSet, EvalError> {
        Ok(match f {
            Formula::Top => DSet::new(vec![Value::Unit]),
            Formula::Hom(a, s, t) => {
                let cat = self.sem(a)?;
                let (so, to) = (self.term_idx(s, env, true)?, self.term_idx(t, env, true)?);
                DSet::new(cat.cat.hom(so, to).map(Value::Mor).collect())
            }
            Formula::Atom(p, args) => {
                let dom = self.atom_dom(p)?;
                let parts = args.iter().map(|a| self.term_idx(a, env, true)).collect::<Result<Vec<_>, _>>()?;
                let n = self.atom(p)?.elems[dom.tuple_index(&parts, true)].len();
                DSet::new((0..n).map(Value::Elem).collect())
            }
            Formula::And(a, b) => {
                let (x, y) = (self.eval_set(a, env)?, self.eval_set(b, env)?);
                self.guard(|| format!("the set of {f}"), x.len() as u128 * y.len() as u128)?;
                let mut out = Vec::with_capacity(x.len() * y.len());
                for u in &x.elems {
                    for v in &y.elems {
                        out.push(Value::pair(u.clone(), v.clone()));
                    }
                }
                DSet::new(out)
            }
            Formula::Imp(a, b) => {
                let (x, y) = (self.eval_set(a, &swapped(env))?, self.eval_set(b, env)?);
                let required = (y.len() as u128).checked_pow(x.len() as u32).unwrap_or(u128::MAX);
                self.guard(|| format!("the function set of {f}"), required)?;
                let mut out = Vec::new();
                let mut digits = vec![0usize; x.len()];
                if !y.is_empty() || x.is_empty() {
                    loop {
                        out.push(Value::Fun(digits.iter().map(|&d| y.elems[d].clone()).collect()));
                        let mut i = digits.len();
                        loop {
                            if i == 0 {
                                return Ok(DSet::new(out));
                            }
                            i -= 1;
                            digits[i] += 1;
                            if digits[i] < y.len() {
                                break;
                            }
                            digits[i] = 0;
                        }
                    }
                }
                DSet::new(out)
            }
            Formula::End(x, c, body) => self.end_set(x, c, body, env)?,
            Formula::Coend(x, c, body) => self.coend_set(x, c, body, env)?,
        })
    }

    fn extend(&self, vars: &[Binding], x: &str, c: &CatExpr, neg: usize, pos: usize) -> Result<Vec<Binding>, EvalError> {
        let mut out = vars.to_vec();
        out.push(self.bind(x, c, neg, pos)?);
        Ok(out)
    }

    /// Wedge conditions of `body` in `x`: for each `f: a -> b`, the images
    /// of the components at `a` and `b` in `body(a, b)`.
    #[allow(clippy::type_complexity)]
    fn wedge_data(
        &self,
        x: &str,
        c: &CatExpr,
        body: &Formula,
        env: &[Binding],
    ) -> Result<(Vec<Rc<DSet>>, Vec<(usize, usize, Vec<Value>, Vec<Value>)>), EvalError> {
        let cat = self.sem(c)?;
        let ids = self.identity_motion(env);
        let comps = (0..cat.cat.n_obj())
            .map(|o| self.eval_set(body, &self.extend(env, x, c, o, o)?))
            .collect::<Result<Vec<_>, _>>()?;
        let mut conds = Vec::new();
        for f in 0..cat.cat.n_mor() {
            let (a, b) = (cat.cat.src(f), cat.cat.dst(f));
            let left = self.extend(&ids, x, c, cat.cat.id(a), f)?;
            let right = self.extend(&ids, x, c, f, cat.cat.id(b))?;
            let l = comps[a].elems.iter().map(|v| self.act(body, &left, v)).collect::<Result<Vec<_>, _>>()?;
            let r = comps[b].elems.iter().map(|v| self.act(body, &right, v)).collect::<Result<Vec<_>, _>>()?;
            conds.push((a, b, l, r));
        }
        Ok((comps, conds))
    }

    fn end_set(&self, x: &str, c: &CatExpr, body: &Formula, env: &[Binding]) -> Result<DSet, EvalError> {
        let (comps, conds) = self.wedge_data(x, c, body, env)?;
        let n = comps.len();
        let mut by_last: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, (a, b, _, _)) in conds.iter().enumerate() {
            by_last[(*a).max(*b)].push(i);
        }
        let mut out = Vec::new();
        let mut choice = vec![0usize; n];
        self.wedges(0, &comps, &conds, &by_last, &mut choice, &mut out)?;
        Ok(DSet::new(out))
    }

    #[allow(clippy::type_complexity)]
    fn wedges(
        &self,
        o: usize,
        comps: &[Rc<DSet>],
        conds: &[(usize, usize, Vec<Value>, Vec<Value>)],
        by_last: &[Vec<usize>],
        choice: &mut Vec<usize>,
        out: &mut Vec<Value>,
    ) -> Result<(), EvalError> {
        if o == comps.len() {
            self.guard(|| "an end".into(), out.len() as u128 + 1)?;
            out.push(Value::Tuple(choice.iter().zip(comps).map(|(&i, s)| s.elems[i].clone()).collect()));
            return Ok(());
        }
        for i in 0..comps[o].len() {
            choice[o] = i;
            let ok = by_last[o].iter().all(|&k| {
                let (a, b, l, r) = &conds[k];
                l[choice[*a]] == r[choice[*b]]
            });
            if ok {
                self.wedges(o + 1, comps, conds, by_last, choice, out)?;
            }
        }
        Ok(())
    }

    fn coend_set(&self, x: &str, c: &CatExpr, body: &Formula, env: &[Binding]) -> Result<DSet, EvalError> {
        let cat = self.sem(c)?;
        let ids = self.identity_motion(env);
        let comps = (0..cat.cat.n_obj())
            .map(|o| self.eval_set(body, &self.extend(env, x, c, o, o)?))
            .collect::<Result<Vec<_>, _>>()?;
        let mut offset = vec![0];
        for s in &comps {
            offset.push(offset.last().unwrap() + s.len());
        }
        let mut uf = UnionFind::new(*offset.last().unwrap());
        for f in 0..cat.cat.n_mor() {
            let (a, b) = (cat.cat.src(f), cat.cat.dst(f));
            let mixed = self.eval_set(body, &self.extend(env, x, c, b, a)?)?;
            let left = self.extend(&ids, x, c, f, cat.cat.id(a))?;
            let right = self.extend(&ids, x, c, cat.cat.id(b), f)?;
            for p in &mixed.elems {
                let l = comps[a].position(&self.act(body, &left, p)?).expect("action stays in its set");
                let r = comps[b].position(&self.act(body, &right, p)?).expect("action stays in its set");
                uf.union(offset[a] + l, offset[b] + r);
            }
        }
        let value = |g: usize| {
            let o = offset.partition_point(|&s| s <= g) - 1;
            Value::inj(o, comps[o].elems[g - offset[o]].clone())
        };
        let reps: Vec<usize> = (0..uf.len()).filter(|&g| uf.find(g) == g).collect();
        let rep_pos: HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let classes = (0..uf.len()).map(|g| (value(g), rep_pos[&uf.find(g)])).collect();
        Ok(DSet::quotient(reps.into_iter().map(value).collect(), classes))
    }

    /// The action of a motion on an element of the set at its source.
    pub fn act(&self, f: &Formula, m: &[Binding], v: &Value) -> Result<Value, EvalError> {
        Ok(match (f, v) {
            (Formula::Top, _) => Value::Unit,
            (Formula::Hom(a, s, t), Value::Mor(h)) => {
                let cat = self.sem(a)?;
                let (us, ut) = (self.term_idx(s, m, false)?, self.term_idx(t, m, false)?);
                Value::Mor(cat.cat.comp(cat.cat.comp(us, *h), ut))
            }
            (Formula::Atom(p, args), Value::Elem(e)) => {
                let dom = self.atom_dom(p)?;
                let parts = args.iter().map(|a| self.term_idx(a, m, false)).collect::<Result<Vec<_>, _>>()?;
                Value::Elem(self.atom(p)?.action[dom.tuple_index(&parts, false)][*e])
            }
            (Formula::And(a, b), Value::Pair(x, y)) => Value::pair(self.act(a, m, x)?, self.act(b, m, y)?),
            (Formula::Imp(a, b), Value::Fun(outs)) => {
                let back = swapped(m);
                let dom_src = self.eval_set(a, &swapped(&self.motion_src(m)))?;
                let dom_tgt = self.eval_set(a, &swapped(&self.motion_tgt(m)))?;
                let mut res = Vec::with_capacity(dom_tgt.len());
                for u in &dom_tgt.elems {
                    let u0 = self.act(a, &back, u)?;
                    let i = dom_src.position(&u0).ok_or_else(|| EvalError::Shape(format!("{u0} outside the domain of {f}")))?;
                    res.push(self.act(b, m, &outs[i])?);
                }
                Value::Fun(res)
            }
            (Formula::End(x, c, body), Value::Tuple(ts)) => {
                let cat = self.sem(c)?;
                let mut res = Vec::with_capacity(ts.len());
                for (o, t) in ts.iter().enumerate() {
                    let id = cat.cat.id(o);
                    res.push(self.act(body, &self.extend(m, x, c, id, id)?, t)?);
                }
                Value::Tuple(res)
            }
            (Formula::Coend(x, c, body), Value::Inj(o, p)) => {
                let cat = self.sem(c)?;
                let id = cat.cat.id(*o);
                let p2 = self.act(body, &self.extend(m, x, c, id, id)?, p)?;
                let tgt = self.eval_set(f, &self.motion_tgt(m))?;
                let v = Value::inj(*o, p2);
                let k = tgt.class_of(&v).ok_or_else(|| EvalError::Shape(format!("{v} outside {f}")))?;
                tgt.elems[k].clone()
            }
            (f, v) => return Err(EvalError::Shape(format!("{v} is not an element of {f}"))),
        })
    }

    /// Prints an element of the set of `f` at `env` with the model's names.
    pub fn render(&self, f: &Formula, env: &[Binding], v: &Value) -> Result<String, EvalError> {
        Ok(match (f, v) {
            (Formula::Top, _) => "*".to_string(),
            (Formula::Hom(a, _, _), Value::Mor(h)) => self.sem(a)?.cat.morphisms[*h].name.clone(),
            (Formula::Atom(p, args), Value::Elem(e)) => {
                let dom = self.atom_dom(p)?;
                let parts = args.iter().map(|a| self.term_idx(a, env, true)).collect::<Result<Vec<_>, _>>()?;
                self.atom(p)?.elems[dom.tuple_index(&parts, true)][*e].clone()
            }
            (Formula::And(a, b), Value::Pair(x, y)) => format!("({}, {})", self.render(a, env, x)?, self.render(b, env, y)?),
            (Formula::Imp(a, b), Value::Fun(outs)) => {
                let back = swapped(env);
                let dom = self.eval_set(a, &back)?;
                let mut parts = Vec::with_capacity(outs.len());
                for (u, o) in dom.elems.iter().zip(outs) {
                    parts.push(format!("{} => {}", self.render(a, &back, u)?, self.render(b, env, o)?));
                }
                format!("{{{}}}", parts.join(", "))
            }
            (Formula::End(x, c, body), Value::Tuple(ts)) => {
                let cat = self.sem(c)?;
                let mut parts = Vec::with_capacity(ts.len());
                for (o, t) in ts.iter().enumerate() {
                    parts.push(format!("{}: {}", cat.cat.objects[o], self.render(body, &self.extend(env, x, c, o, o)?, t)?));
                }
                format!("<{}>", parts.join(", "))
            }
            (Formula::Coend(x, c, body), Value::Inj(o, p)) => {
                let cat = self.sem(c)?;
                format!("[{}: {}]", cat.cat.objects[*o], self.render(body, &self.extend(env, x, c, *o, *o)?, p)?)
            }
            (f, v) => return Err(EvalError::Shape(format!("{v} is not an element of {f}"))),
        })
    }
}

/// Union-find with path compression; the root of a class is its least index.
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut j = i;
        while self.parent[j] != r {
            let next = self.parent[j];
            self.parent[j] = r;
            j = next;
        }
        r
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra < rb {
            self.parent[rb] = ra;
        } else if rb < ra {
            self.parent[ra] = rb;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c() -> CatExpr {
        CatExpr::base("C")
    }

    fn model(cat: FinCat) -> Model {
        Model::new("m").with_cat("C", cat)
    }

    fn hom_xx() -> Formula {
        Formula::hom(c(), TermExpr::neg("x"), TermExpr::var("x"))
    }

    #[test]
    fn hom_on_the_arrow_reads_the_table() {
        let m = model(FinCat::walking_arrow());
        let ev = Evaluator::new(&m);
        let env = vec![ev.bind("a", &c(), 0, 0).unwrap(), ev.bind("b", &c(), 1, 1).unwrap()];
        let f = Formula::hom(c(), TermExpr::neg("a"), TermExpr::var("b"));
        assert_eq!(ev.eval_set(&f, &env).unwrap().len(), 1);
    }

    #[test]
    fn ends_of_hom() {
        for (cat, n) in [(FinCat::walking_arrow(), 1), (FinCat::discrete(&["a", "b"]), 1), (FinCat::empty(), 1)] {
            let m = model(cat);
            let ev = Evaluator::new(&m);
            let e = Formula::end("x", c(), hom_xx());
            assert_eq!(ev.eval_set(&e, &[]).unwrap().len(), n);
        }
    }

    #[test]
    fn coends_of_hom_and_top() {
        let m = model(FinCat::walking_arrow());
        let ev = Evaluator::new(&m);
        assert_eq!(ev.eval_set(&Formula::coend("x", c(), hom_xx()), &[]).unwrap().len(), 2);
        assert_eq!(ev.eval_set(&Formula::coend("x", c(), Formula::Top), &[]).unwrap().len(), 1);
        let m = model(FinCat::empty());
        let ev = Evaluator::new(&m);
        assert_eq!(ev.eval_set(&Formula::coend("x", c(), hom_xx()), &[]).unwrap().len(), 0);
    }

    #[test]
    fn function_sets_use_the_twisted_point() {
        let m = model(FinCat::walking_arrow());
        let ev = Evaluator::new(&m);
        // hom(~x, x) => hom(~x, x) at (a, b): functions from hom(b, a) = {} to hom(a, b).
        let env = vec![ev.bind("x", &c(), 0, 1).unwrap()];
        let f = Formula::imp(hom_xx(), hom_xx());
        assert_eq!(ev.eval_set(&f, &env).unwrap().len(), 1);
        let env = vec![ev.bind("x", &c(), 1, 0).unwrap()];
        assert_eq!(ev.eval_set(&f, &env).unwrap().len(), 0);
    }

    #[test]
    fn union_find_keeps_least_roots() {
        let mut uf = UnionFind::new(5);
        uf.union(4, 2);
        uf.union(2, 3);
        uf.union(1, 4);
        assert_eq!(uf.find(3), 1);
        assert_eq!(uf.find(0), 0);
    }
}
