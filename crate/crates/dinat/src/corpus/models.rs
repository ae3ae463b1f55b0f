use crate::finsem::{FinCat, FunctorTable, Model, Shape};
use crate::syntax::{CatExpr, Polarity, Slot};

fn slot(c: &str, p: Polarity) -> Slot {
    Slot::new(CatExpr::base(c), p)
}

fn slots(spec: &[(&str, Polarity)]) -> Vec<Slot> {
    spec.iter().map(|(c, p)| slot(c, *p)).collect()
}

/// Atom shapes for one interpretation; `first` and `last` are objects, or
/// `None` when the category is empty.
struct Variant {
    p: Shape,
    k: Shape,
    g: Shape,
    r: Shape,
    s: Shape,
    v: Shape,
    q: Shape,
    constant_functor: bool,
}

fn from_or(c: Option<usize>, slot: usize, n: usize) -> Shape {
    c.map_or(Shape::Const(n), |c| Shape::From(c, slot))
}

fn to_or(slot: usize, c: Option<usize>, n: usize) -> Shape {
    c.map_or(Shape::Const(n), |c| Shape::To(slot, c))
}

fn variants(first: Option<usize>, last: Option<usize>) -> Vec<Variant> {
    vec![
        Variant {
            p: from_or(first, 0, 1),
            k: Shape::Const(1),
            g: Shape::sum(from_or(first, 0, 1), Shape::Const(1)),
            r: Shape::Hom(0, 1),
            s: Shape::prod(to_or(0, last, 1), from_or(first, 1, 1)),
            v: Shape::prod(Shape::Hom(0, 1), Shape::Hom(2, 3)),
            q: Shape::Const(2),
            constant_functor: false,
        },
        Variant {
            p: Shape::sum(from_or(first, 0, 1), from_or(last, 0, 0)),
            k: from_or(last, 0, 2),
            g: Shape::Const(0),
            r: Shape::sum(Shape::Hom(0, 1), Shape::Const(1)),
            s: Shape::Hom(0, 1),
            v: Shape::prod(Shape::Hom(0, 1), Shape::Const(1)),
            q: Shape::Const(0),
            constant_functor: true,
        },
        Variant {
            p: Shape::Const(3),
            k: Shape::Const(0),
            g: from_or(last, 0, 2),
            r: Shape::sum(to_or(0, first, 0), Shape::Const(1)),
            s: Shape::Const(2),
            v: Shape::Hom(2, 1),
            q: Shape::Const(1),
            constant_functor: false,
        },
    ]
}

fn build(cat_name: &str, cat: &FinCat, tag: &str, v: &Variant) -> Model {
    use Polarity::{Neg, Pos};
    let c = CatExpr::base("C");
    let d = CatExpr::base("D");
    let base = Model::new(&format!("{cat_name}/{tag}")).with_cat("C", cat.clone()).with_cat("D", cat.clone());
    let functor = match (v.constant_functor, cat.n_obj()) {
        (true, n) if n > 0 => FunctorTable::constant(&c, cat, &d, cat, n - 1),
        _ => FunctorTable { cod: d.clone(), ..FunctorTable::identity(&c, cat) },
    };
    let table = |s: &Shape, spec: &[(&str, Polarity)]| s.table(&base, slots(spec)).expect("suite shapes tabulate");
    let m = base
        .clone()
        .with_functor("F", functor)
        .with_atom("P", table(&v.p, &[("C", Pos)]))
        .with_atom("K", table(&v.k, &[("C", Pos)]))
        .with_atom("G", table(&v.g, &[("D", Pos)]))
        .with_atom("R", table(&v.r, &[("C", Neg), ("C", Pos)]))
        .with_atom("S", table(&v.s, &[("C", Neg), ("C", Pos)]))
        .with_atom("V", table(&v.v, &[("C", Neg), ("C", Pos), ("D", Neg), ("D", Pos)]))
        .with_atom("Q", table(&v.q, &[]));
    m.validate().expect("suite models are valid");
    m
}

/// The fixed model suite: five categories, each with two or three atom
/// interpretations. `D` is interpreted as `C`.
pub fn model_suite() -> Vec<Model> {
    let cats = [
        ("2", FinCat::walking_arrow(), 3),
        ("discrete", FinCat::discrete(&["a", "b"]), 2),
        ("poset3", FinCat::poset3(), 2),
        ("idem", FinCat::idempotent(), 3),
        ("empty", FinCat::empty(), 2),
    ];
    let mut out = Vec::new();
    for (name, cat, k) in cats {
        let n = cat.n_obj();
        let (first, last) = if n == 0 { (None, None) } else { (Some(0), Some(n - 1)) };
        for (i, v) in variants(first, last).iter().take(k).enumerate() {
            out.push(build(name, &cat, ["a", "b", "c"][i], v));
        }
    }
    out
}
