use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Elements of evaluated sets. The derived order is the canonical order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Value {
    Unit,
    /// A morphism, by index in its category.
    Mor(usize),
    /// An element of an atom's set, by index.
    Elem(usize),
    Pair(Box<Value>, Box<Value>),
    /// A point of an end: one component per object.
    Tuple(Vec<Value>),
    /// A coend class, by its least representative.
    Inj(usize, Box<Value>),
    /// A function, as its outputs in the canonical order of its domain.
    Fun(Vec<Value>),
}

impl Value {
    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn inj(c: usize, v: Value) -> Value {
        Value::Inj(c, Box::new(v))
    }

    /// Right-nested tuple of hypothesis values, matching `ctx_formula`.
    pub fn tuple_of(vs: &[Value]) -> Value {
        match vs {
            [] => Value::Unit,
            [v] => v.clone(),
            [v, rest @ ..] => Value::pair(v.clone(), Value::tuple_of(rest)),
        }
    }

    /// Inverse of `tuple_of` for `n` components.
    pub fn untuple(&self, n: usize) -> Option<Vec<Value>> {
        match (n, self) {
            (0, Value::Unit) => Some(Vec::new()),
            (1, v) => Some(vec![v.clone()]),
            (n, Value::Pair(a, b)) if n > 1 => {
                let mut out = vec![(**a).clone()];
                out.extend(b.untuple(n - 1)?);
                Some(out)
            }
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => write!(f, "*"),
            Value::Mor(m) => write!(f, "#m{m}"),
            Value::Elem(e) => write!(f, "#e{e}"),
            Value::Pair(a, b) => write!(f, "({a}, {b})"),
            Value::Tuple(vs) | Value::Fun(vs) => {
                let open = if matches!(self, Value::Tuple(_)) { "<" } else { "[" };
                let close = if matches!(self, Value::Tuple(_)) { ">" } else { "]" };
                write!(f, "{open}")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "{close}")
            }
            Value::Inj(c, v) => write!(f, "[{c}: {v}]"),
        }
    }
}

/// A finite set in canonical order, with an index and, for coends, the
/// class of every representative-or-not element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DSet {
    pub elems: Vec<Value>,
    index: HashMap<Value, usize>,
    classes: HashMap<Value, usize>,
}

impl DSet {
    pub fn new(mut elems: Vec<Value>) -> DSet {
        elems.sort();
        elems.dedup();
        let index = elems.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        DSet { elems, index, classes: HashMap::new() }
    }

    /// A quotient: `classes` maps every element of the disjoint union to the
    /// position of its class representative in `reps`.
    pub fn quotient(reps: Vec<Value>, classes: HashMap<Value, usize>) -> DSet {
        let mut s = DSet::new(reps);
        s.classes = classes;
        s
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn position(&self, v: &Value) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Position of the class of `v` in a quotient set.
    pub fn class_of(&self, v: &Value) -> Option<usize> {
        self.classes.get(v).copied().or_else(|| self.position(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuples_round_trip() {
        for n in 0..4 {
            let vs: Vec<Value> = (0..n).map(Value::Elem).collect();
            assert_eq!(Value::tuple_of(&vs).untuple(n), Some(vs));
        }
    }

    #[test]
    fn sets_are_sorted_and_indexed() {
        let s = DSet::new(vec![Value::Elem(2), Value::Elem(0), Value::Elem(2)]);
        assert_eq!(s.elems, vec![Value::Elem(0), Value::Elem(2)]);
        assert_eq!(s.position(&Value::Elem(2)), Some(1));
    }
}
