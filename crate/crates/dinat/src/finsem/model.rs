use std::collections::{BTreeMap, HashMap};

use super::fincat::FinCat;
use super::value::Value;
use super::ModelError;
use crate::syntax::{CatExpr, FunctorSig, Polarity, SignatureTable, Slot};

/// An atom's interpretation: a set per object of its domain (the product of
/// its slot types) and a function per morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomTable {
    pub slots: Vec<Slot>,
    /// Element names, per domain object.
    pub elems: Vec<Vec<String>>,
    /// `action[m][i]` is the image of element `i` of `src(m)`.
    pub action: Vec<Vec<usize>>,
}

/// A functor's interpretation on the product of its domain categories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorTable {
    pub dom: Vec<CatExpr>,
    pub cod: CatExpr,
    pub obj: Vec<usize>,
    pub mor: Vec<usize>,
}

/// Interpretations of base categories, atoms and functors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Model {
    pub name: String,
    pub cats: BTreeMap<String, FinCat>,
    pub atoms: BTreeMap<String, AtomTable>,
    pub functors: BTreeMap<String, FunctorTable>,
}

/// Right-nested product of a list of types, `1` when empty.
pub fn product_type(types: &[CatExpr]) -> CatExpr {
    match types {
        [] => CatExpr::Unit,
        [a] => a.normalize(),
        [a, rest @ ..] => CatExpr::prod(a.normalize(), product_type(rest)),
    }
}

pub fn slot_types(slots: &[Slot]) -> Vec<CatExpr> {
    slots.iter().map(|s| s.arg_type()).collect()
}

/// Splits an index of a right-nested product into per-factor indices.
pub fn split_index(mut idx: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for i in (0..sizes.len()).rev() {
        if i == 0 {
            out[0] = idx;
        } else {
            out[i] = idx % sizes[i];
            idx /= sizes[i];
        }
    }
    out
}

/// Inverse of `split_index`.
pub fn join_index(parts: &[usize], sizes: &[usize]) -> usize {
    parts.iter().zip(sizes).fold(0, |acc, (p, s)| acc * s + p)
}

impl Model {
    pub fn new(name: &str) -> Model {
        Model { name: name.to_string(), ..Model::default() }
    }

    /// Adds a category, renamed after the symbol it interprets.
    pub fn with_cat(mut self, name: &str, mut c: FinCat) -> Model {
        c.name = name.to_string();
        self.cats.insert(name.to_string(), c);
        self
    }

    pub fn with_atom(mut self, name: &str, t: AtomTable) -> Model {
        self.atoms.insert(name.to_string(), t);
        self
    }

    pub fn with_functor(mut self, name: &str, t: FunctorTable) -> Model {
        self.functors.insert(name.to_string(), t);
        self
    }

    /// The finite category a type denotes.
    pub fn cat_of(&self, e: &CatExpr) -> Result<FinCat, ModelError> {
        match e.normalize() {
            CatExpr::Base(n) => self.base(&n).cloned(),
            CatExpr::Op(inner) => Ok(self.cat_of(&inner)?.op()),
            CatExpr::Prod(a, b) => Ok(FinCat::product(&self.cat_of(&a)?, &self.cat_of(&b)?)),
            CatExpr::Unit => Ok(FinCat::unit()),
        }
    }

    pub fn base(&self, n: &str) -> Result<&FinCat, ModelError> {
        self.cats.get(n).ok_or_else(|| ModelError::Missing { kind: "category".into(), name: n.to_string() })
    }

    /// Checks every category, atom action and functor table.
    pub fn validate(&self) -> Result<(), ModelError> {
        for c in self.cats.values() {
            c.validate()?;
        }
        for (name, t) in &self.atoms {
            let dom = self.cat_of(&product_type(&slot_types(&t.slots)))?;
            validate_atom(name, t, &dom)?;
        }
        for (name, t) in &self.functors {
            let dom = self.cat_of(&product_type(&t.dom))?;
            let cod = self.cat_of(&t.cod)?;
            validate_functor(name, t, &dom, &cod)?;
        }
        Ok(())
    }

    /// Checks that every symbol of `sig` is interpreted with matching types.
    pub fn check_signature(&self, sig: &SignatureTable) -> Result<(), ModelError> {
        for c in &sig.cats {
            self.base(c)?;
        }
        for (name, slots) in &sig.atoms {
            let t = self
                .atoms
                .get(name)
                .ok_or_else(|| ModelError::Missing { kind: "atom".into(), name: name.clone() })?;
            if &t.slots != slots {
                return Err(ModelError::Signature {
                    name: name.clone(),
                    expected: show_slots(slots),
                    found: show_slots(&t.slots),
                });
            }
        }
        for (name, FunctorSig { dom, cod }) in &sig.functors {
            let t = self
                .functors
                .get(name)
                .ok_or_else(|| ModelError::Missing { kind: "functor".into(), name: name.clone() })?;
            let norm = |v: &[CatExpr]| v.iter().map(|c| c.normalize()).collect::<Vec<_>>();
            if norm(&t.dom) != norm(dom) || t.cod.normalize() != cod.normalize() {
                let show = |d: &[CatExpr], c: &CatExpr| {
                    format!("({}) -> {c}", d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
                };
                return Err(ModelError::Signature {
                    name: name.clone(),
                    expected: show(dom, cod),
                    found: show(&t.dom, &t.cod),
                });
            }
        }
        Ok(())
    }
}

fn show_slots(slots: &[Slot]) -> String {
    let parts: Vec<String> = slots
        .iter()
        .map(|s| format!("({} {})", if s.polarity == Polarity::Pos { "+" } else { "-" }, s.cat))
        .collect();
    format!("[{}]", parts.join(" "))
}

fn validate_atom(name: &str, t: &AtomTable, dom: &FinCat) -> Result<(), ModelError> {
    let err = |reason: String| ModelError::Atom { atom: name.to_string(), reason };
    if t.elems.len() != dom.n_obj() {
        return Err(err(format!("expected sets for {} objects, found {}", dom.n_obj(), t.elems.len())));
    }
    if t.action.len() != dom.n_mor() {
        return Err(err(format!("expected actions for {} morphisms, found {}", dom.n_mor(), t.action.len())));
    }
    for (m, row) in t.action.iter().enumerate() {
        let (s, d) = (dom.src(m), dom.dst(m));
        let mname = &dom.morphisms[m].name;
        if row.len() != t.elems[s].len() || row.iter().any(|&x| x >= t.elems[d].len()) {
            return Err(err(format!("action of {mname} is not a function between the sets of its ends")));
        }
    }
    for o in 0..dom.n_obj() {
        let row = &t.action[dom.id(o)];
        if row.iter().enumerate().any(|(i, &x)| i != x) {
            return Err(err(format!("identity on {} does not act as the identity", dom.objects[o])));
        }
    }
    for f in 0..dom.n_mor() {
        for g in 0..dom.n_mor() {
            if let Some(h) = dom.compose[f][g] {
                for i in 0..t.elems[dom.src(f)].len() {
                    if t.action[h][i] != t.action[g][t.action[f][i]] {
                        return Err(err(format!(
                            "action does not preserve the composite {};{}",
                            dom.morphisms[f].name, dom.morphisms[g].name
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

fn validate_functor(name: &str, t: &FunctorTable, dom: &FinCat, cod: &FinCat) -> Result<(), ModelError> {
    let err = |reason: String| ModelError::Functor { functor: name.to_string(), reason };
    if t.obj.len() != dom.n_obj() || t.obj.iter().any(|&o| o >= cod.n_obj()) {
        return Err(err("object map has the wrong shape".into()));
    }
    if t.mor.len() != dom.n_mor() || t.mor.iter().any(|&m| m >= cod.n_mor()) {
        return Err(err("morphism map has the wrong shape".into()));
    }
    for m in 0..dom.n_mor() {
        let fm = t.mor[m];
        if cod.src(fm) != t.obj[dom.src(m)] || cod.dst(fm) != t.obj[dom.dst(m)] {
            return Err(err(format!("image of {} has the wrong ends", dom.morphisms[m].name)));
        }
    }
    for o in 0..dom.n_obj() {
        if t.mor[dom.id(o)] != cod.id(t.obj[o]) {
            return Err(err(format!("identity on {} is not preserved", dom.objects[o])));
        }
    }
    for f in 0..dom.n_mor() {
        for g in 0..dom.n_mor() {
            if let Some(h) = dom.compose[f][g] {
                if cod.compose[t.mor[f]][t.mor[g]] != Some(t.mor[h]) {
                    return Err(err(format!(
                        "composite {};{} is not preserved",
                        dom.morphisms[f].name, dom.morphisms[g].name
                    )));
                }
            }
        }
    }
    Ok(())
}

impl FunctorTable {
    pub fn identity(c: &CatExpr, cat: &FinCat) -> FunctorTable {
        FunctorTable {
            dom: vec![c.clone()],
            cod: c.clone(),
            obj: (0..cat.n_obj()).collect(),
            mor: (0..cat.n_mor()).collect(),
        }
    }

    /// The functor constant at object `o`.
    pub fn constant(dom: &CatExpr, dcat: &FinCat, cod: &CatExpr, ccat: &FinCat, o: usize) -> FunctorTable {
        FunctorTable {
            dom: vec![dom.clone()],
            cod: cod.clone(),
            obj: vec![o; dcat.n_obj()],
            mor: vec![ccat.id(o); dcat.n_mor()],
        }
    }
}

/// Building blocks for atom tables over base-typed slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    /// A constant set with `n` elements.
    Const(usize),
    /// `hom(o_i, o_j)` for a negative slot `i` and a positive slot `j`.
    Hom(usize, usize),
    /// `hom(c, o_j)` for a positive slot `j`.
    From(usize, usize),
    /// `hom(o_i, c)` for a negative slot `i`.
    To(usize, usize),
    Prod(Box<Shape>, Box<Shape>),
    Sum(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn prod(a: Shape, b: Shape) -> Shape {
        Shape::Prod(Box::new(a), Box::new(b))
    }

    pub fn sum(a: Shape, b: Shape) -> Shape {
        Shape::Sum(Box::new(a), Box::new(b))
    }

    fn elems(&self, cats: &[&FinCat], objs: &[usize]) -> Vec<Value> {
        match self {
            Shape::Const(n) => (0..*n).map(Value::Elem).collect(),
            Shape::Hom(i, j) => cats[*i].hom(objs[*i], objs[*j]).map(Value::Mor).collect(),
            Shape::From(c, j) => cats[*j].hom(*c, objs[*j]).map(Value::Mor).collect(),
            Shape::To(i, c) => cats[*i].hom(objs[*i], *c).map(Value::Mor).collect(),
            Shape::Prod(a, b) => {
                let (xs, ys) = (a.elems(cats, objs), b.elems(cats, objs));
                xs.iter().flat_map(|x| ys.iter().map(move |y| Value::pair(x.clone(), y.clone()))).collect()
            }
            Shape::Sum(a, b) => {
                let mut out: Vec<Value> = a.elems(cats, objs).into_iter().map(|x| Value::inj(0, x)).collect();
                out.extend(b.elems(cats, objs).into_iter().map(|x| Value::inj(1, x)));
                out
            }
        }
    }

    /// Action of per-slot base morphisms; negative slots compose before.
    fn act(&self, cats: &[&FinCat], mors: &[usize], v: &Value) -> Value {
        match (self, v) {
            (Shape::Const(_), v) => v.clone(),
            (Shape::Hom(i, j), Value::Mor(h)) => {
                Value::Mor(cats[*j].comp(cats[*i].comp(mors[*i], *h), mors[*j]))
            }
            (Shape::From(_, j), Value::Mor(h)) => Value::Mor(cats[*j].comp(*h, mors[*j])),
            (Shape::To(i, _), Value::Mor(h)) => Value::Mor(cats[*i].comp(mors[*i], *h)),
            (Shape::Prod(a, b), Value::Pair(x, y)) => Value::pair(a.act(cats, mors, x), b.act(cats, mors, y)),
            (Shape::Sum(a, _), Value::Inj(0, x)) => Value::inj(0, a.act(cats, mors, x)),
            (Shape::Sum(_, b), Value::Inj(1, x)) => Value::inj(1, b.act(cats, mors, x)),
            (s, v) => panic!("value {v} does not belong to shape {s:?}"),
        }
    }

    /// Tabulates the shape over `slots`, whose categories must be base
    /// categories of `model`.
    pub fn table(&self, model: &Model, slots: Vec<Slot>) -> Result<AtomTable, ModelError> {
        let mut bases = Vec::new();
        for s in &slots {
            match &s.cat {
                CatExpr::Base(n) => bases.push(model.base(n)?),
                other => {
                    return Err(ModelError::Format(format!("shape tables need base slot types, found {other}")))
                }
            }
        }
        let dom = model.cat_of(&product_type(&slot_types(&slots)))?;
        let osizes: Vec<usize> = bases.iter().map(|c| c.n_obj()).collect();
        let msizes: Vec<usize> = bases.iter().map(|c| c.n_mor()).collect();
        let sets: Vec<Vec<Value>> =
            (0..dom.n_obj()).map(|o| self.elems(&bases, &split_index(o, &osizes))).collect();
        let index: Vec<HashMap<&Value, usize>> =
            sets.iter().map(|s| s.iter().enumerate().map(|(i, v)| (v, i)).collect()).collect();
        let mut action = Vec::new();
        for m in 0..dom.n_mor() {
            let mors = split_index(m, &msizes);
            let (s, d) = (dom.src(m), dom.dst(m));
            let row = sets[s]
                .iter()
                .map(|v| {
                    let w = self.act(&bases, &mors, v);
                    index[d].get(&w).copied().ok_or_else(|| ModelError::Format(format!("shape action leaves its set at {w}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            action.push(row);
        }
        let names = |v: &Value| name_value(v, &bases);
        let elems = sets.iter().map(|s| s.iter().map(names).collect()).collect();
        Ok(AtomTable { slots, elems, action })
    }
}

fn name_value(v: &Value, bases: &[&FinCat]) -> String {
    match v {
        Value::Mor(m) => bases.first().map_or(format!("{v}"), |c| c.morphisms[*m].name.clone()),
        Value::Elem(e) => e.to_string(),
        Value::Pair(a, b) => format!("({}, {})", name_value(a, bases), name_value(b, bases)),
        Value::Inj(i, x) => format!("in{i}({})", name_value(x, bases)),
        other => other.to_string(),
    }
}
