use std::fmt;
use std::rc::Rc;

use super::ModelError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub name: String,
    pub src: usize,
    pub dst: usize,
}

/// A finite category given by explicit tables. `compose[f][g]` is `f;g`
/// (first `f`, then `g`) when `dst(f) = src(g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCat {
    pub name: String,
    pub objects: Vec<String>,
    pub morphisms: Vec<Morphism>,
    pub identity: Vec<usize>,
    pub compose: Vec<Vec<Option<usize>>>,
}

impl FinCat {
    /// Builds a category from generators-free data: every morphism and every
    /// composite must be listed. Identities are added as `id_<obj>`.
    pub fn new(
        name: &str,
        objects: &[&str],
        arrows: &[(&str, &str, &str)],
        composites: &[(&str, &str, &str)],
    ) -> Result<FinCat, ModelError> {
        let objects: Vec<String> = objects.iter().map(|s| s.to_string()).collect();
        let obj = |o: &str| {
            objects.iter().position(|x| x == o).ok_or_else(|| ModelError::Category {
                cat: name.to_string(),
                reason: format!("unknown object `{o}`"),
            })
        };
        let mut morphisms: Vec<Morphism> =
            objects.iter().enumerate().map(|(i, o)| Morphism { name: format!("id_{o}"), src: i, dst: i }).collect();
        for (n, s, d) in arrows {
            if morphisms.iter().any(|m| m.name == *n) {
                return Err(ModelError::Category { cat: name.into(), reason: format!("duplicate morphism `{n}`") });
            }
            morphisms.push(Morphism { name: n.to_string(), src: obj(s)?, dst: obj(d)? });
        }
        let identity: Vec<usize> = (0..objects.len()).collect();
        let mor = |m: &str| {
            morphisms.iter().position(|x| x.name == m).ok_or_else(|| ModelError::Category {
                cat: name.to_string(),
                reason: format!("unknown morphism `{m}`"),
            })
        };
        let n = morphisms.len();
        let mut compose = vec![vec![None; n]; n];
        for f in 0..n {
            for g in 0..n {
                if morphisms[f].dst != morphisms[g].src {
                    continue;
                }
                if f == identity[morphisms[f].src] {
                    compose[f][g] = Some(g);
                } else if g == identity[morphisms[g].src] {
                    compose[f][g] = Some(f);
                }
            }
        }
        for (f, g, h) in composites {
            let (f, g, h) = (mor(f)?, mor(g)?, mor(h)?);
            compose[f][g] = Some(h);
        }
        let c = FinCat { name: name.to_string(), objects, morphisms, identity, compose };
        c.validate()?;
        Ok(c)
    }

    pub fn n_obj(&self) -> usize {
        self.objects.len()
    }

    pub fn n_mor(&self) -> usize {
        self.morphisms.len()
    }

    pub fn src(&self, m: usize) -> usize {
        self.morphisms[m].src
    }

    pub fn dst(&self, m: usize) -> usize {
        self.morphisms[m].dst
    }

    pub fn id(&self, o: usize) -> usize {
        self.identity[o]
    }

    /// `f;g`; panics on non-composable input, which validation rules out.
    pub fn comp(&self, f: usize, g: usize) -> usize {
        self.compose[f][g].unwrap_or_else(|| {
            panic!("{}: `{}` and `{}` do not compose", self.name, self.morphisms[f].name, self.morphisms[g].name)
        })
    }

    pub fn hom(&self, a: usize, b: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_mor()).filter(move |&m| self.src(m) == a && self.dst(m) == b)
    }

    /// Totality on composable pairs, typing of composites, units and
    /// associativity, all checked exhaustively.
    pub fn validate(&self) -> Result<(), ModelError> {
        let err = |reason: String| Err(ModelError::Category { cat: self.name.clone(), reason });
        let n = self.n_mor();
        if self.identity.len() != self.n_obj() || self.compose.len() != n {
            return err("table sizes do not match".into());
        }
        for (o, &i) in self.identity.iter().enumerate() {
            if i >= n || self.src(i) != o || self.dst(i) != o {
                return err(format!("identity of `{}` is not an endomorphism of it", self.objects[o]));
            }
        }
        let name = |m: usize| &self.morphisms[m].name;
        for f in 0..n {
            for g in 0..n {
                let composable = self.dst(f) == self.src(g);
                match self.compose[f][g] {
                    None if composable => return err(format!("missing composite {};{}", name(f), name(g))),
                    Some(_) if !composable => return err(format!("composite of {} and {} given but not composable", name(f), name(g))),
                    Some(h) if h >= n || self.src(h) != self.src(f) || self.dst(h) != self.dst(g) => {
                        return err(format!("{};{} has the wrong type", name(f), name(g)))
                    }
                    _ => {}
                }
            }
            let (s, d) = (self.identity[self.src(f)], self.identity[self.dst(f)]);
            if self.compose[s][f] != Some(f) || self.compose[f][d] != Some(f) {
                return err(format!("identities are not units for {}", name(f)));
            }
        }
        for f in 0..n {
            for g in (0..n).filter(|&g| self.dst(f) == self.src(g)) {
                let fg = self.comp(f, g);
                for h in (0..n).filter(|&h| self.dst(g) == self.src(h)) {
                    if self.comp(fg, h) != self.comp(f, self.comp(g, h)) {
                        return err(format!("composition is not associative on ({}, {}, {})", name(f), name(g), name(h)));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn op(&self) -> FinCat {
        let n = self.n_mor();
        let mut compose = vec![vec![None; n]; n];
        for f in 0..n {
            for g in 0..n {
                compose[f][g] = self.compose[g][f];
            }
        }
        FinCat {
            name: format!("{}^op", self.name),
            objects: self.objects.clone(),
            morphisms: self.morphisms.iter().map(|m| Morphism { name: m.name.clone(), src: m.dst, dst: m.src }).collect(),
            identity: self.identity.clone(),
            compose,
        }
    }

    /// Objects and morphisms are indexed `i * |B| + j`.
    pub fn product(a: &FinCat, b: &FinCat) -> FinCat {
        let (no, nm) = (b.n_obj(), b.n_mor());
        let mut objects = Vec::new();
        for x in &a.objects {
            for y in &b.objects {
                objects.push(format!("({x},{y})"));
            }
        }
        let mut morphisms = Vec::new();
        for f in &a.morphisms {
            for g in &b.morphisms {
                morphisms.push(Morphism { name: format!("({},{})", f.name, g.name), src: f.src * no + g.src, dst: f.dst * no + g.dst });
            }
        }
        let identity = (0..a.n_obj() * no).map(|o| a.identity[o / no] * nm + b.identity[o % no]).collect();
        let n = morphisms.len();
        let mut compose = vec![vec![None; n]; n];
        for f in 0..n {
            for g in 0..n {
                if let (Some(x), Some(y)) = (a.compose[f / nm][g / nm], b.compose[f % nm][g % nm]) {
                    compose[f][g] = Some(x * nm + y);
                }
            }
        }
        FinCat { name: format!("{} * {}", a.name, b.name), objects, morphisms, identity, compose }
    }

    pub fn unit() -> FinCat {
        FinCat {
            name: "1".into(),
            objects: vec!["*".into()],
            morphisms: vec![Morphism { name: "id_*".into(), src: 0, dst: 0 }],
            identity: vec![0],
            compose: vec![vec![Some(0)]],
        }
    }

    pub fn walking_arrow() -> FinCat {
        FinCat::new("2", &["a", "b"], &[("f", "a", "b")], &[]).unwrap()
    }

    pub fn discrete(names: &[&str]) -> FinCat {
        FinCat::new("discrete", names, &[], &[]).unwrap()
    }

    /// The chain `a <= b <= c`.
    pub fn poset3() -> FinCat {
        FinCat::new(
            "3",
            &["a", "b", "c"],
            &[("f", "a", "b"), ("g", "b", "c"), ("h", "a", "c")],
            &[("f", "g", "h")],
        )
        .unwrap()
    }

    /// One object with an idempotent `s`.
    pub fn idempotent() -> FinCat {
        FinCat::new("idem", &["o"], &[("s", "o", "o")], &[("s", "s", "s")]).unwrap()
    }

    pub fn empty() -> FinCat {
        FinCat::new("0", &[], &[], &[]).unwrap()
    }
}

impl fmt::Display for FinCat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} objects, {} morphisms)", self.name, self.n_obj(), self.n_mor())
    }
}

/// The category a type denotes, remembering how products split.
#[derive(Clone, Debug)]
pub struct SemCat {
    pub cat: FinCat,
    pub split: Option<(Rc<SemCat>, Rc<SemCat>)>,
}

impl SemCat {
    pub fn leaf(cat: FinCat) -> Rc<SemCat> {
        Rc::new(SemCat { cat, split: None })
    }

    pub fn product(a: Rc<SemCat>, b: Rc<SemCat>) -> Rc<SemCat> {
        Rc::new(SemCat { cat: FinCat::product(&a.cat, &b.cat), split: Some((a, b)) })
    }

    /// Product of a list, nested to the right; the empty list gives `1`.
    pub fn product_list(items: &[Rc<SemCat>]) -> Rc<SemCat> {
        match items {
            [] => SemCat::leaf(FinCat::unit()),
            [a] => a.clone(),
            [a, rest @ ..] => SemCat::product(a.clone(), SemCat::product_list(rest)),
        }
    }

    pub fn pair_obj(&self, i: usize, j: usize) -> usize {
        let (_, b) = self.split.as_ref().expect("not a product");
        i * b.cat.n_obj() + j
    }

    pub fn pair_mor(&self, f: usize, g: usize) -> usize {
        let (_, b) = self.split.as_ref().expect("not a product");
        f * b.cat.n_mor() + g
    }

    pub fn split_obj(&self, o: usize) -> (usize, usize) {
        let (_, b) = self.split.as_ref().expect("not a product");
        (o / b.cat.n_obj(), o % b.cat.n_obj())
    }

    pub fn split_mor(&self, m: usize) -> (usize, usize) {
        let (_, b) = self.split.as_ref().expect("not a product");
        (m / b.cat.n_mor(), m % b.cat.n_mor())
    }

    /// Combines per-factor indices for a right-nested list product.
    pub fn tuple_index(&self, parts: &[usize], obj: bool) -> usize {
        match parts {
            [] => 0,
            [a] => *a,
            [a, rest @ ..] => {
                let (_, b) = self.split.as_ref().expect("not a product");
                let r = b.tuple_index(rest, obj);
                if obj {
                    self.pair_obj(*a, r)
                } else {
                    self.pair_mor(*a, r)
                }
            }
        }
    }
}
