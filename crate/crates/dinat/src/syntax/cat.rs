use std::fmt;

/// Category expressions: base categories closed under opposite, binary
/// product and the terminal category.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CatExpr {
    Base(String),
    Op(Box<CatExpr>),
    Prod(Box<CatExpr>, Box<CatExpr>),
    Unit,
}

impl CatExpr {
    pub fn base(name: impl Into<String>) -> Self {
        CatExpr::Base(name.into())
    }

    pub fn op(self) -> Self {
        CatExpr::Op(Box::new(self))
    }

    pub fn prod(a: CatExpr, b: CatExpr) -> Self {
        CatExpr::Prod(Box::new(a), Box::new(b))
    }

    /// Normal form: `Op` only ever wraps a `Base`.
    pub fn normalize(&self) -> CatExpr {
        self.norm(false)
    }

    fn norm(&self, flip: bool) -> CatExpr {
        match self {
            CatExpr::Base(n) if flip => CatExpr::Op(Box::new(CatExpr::Base(n.clone()))),
            CatExpr::Base(n) => CatExpr::Base(n.clone()),
            CatExpr::Op(inner) => inner.norm(!flip),
            CatExpr::Prod(a, b) => CatExpr::prod(a.norm(flip), b.norm(flip)),
            CatExpr::Unit => CatExpr::Unit,
        }
    }

    /// Normal form of the opposite category.
    pub fn dual(&self) -> CatExpr {
        self.norm(true)
    }

    pub fn is_normal(&self) -> bool {
        match self {
            CatExpr::Base(_) | CatExpr::Unit => true,
            CatExpr::Op(inner) => matches!(**inner, CatExpr::Base(_)),
            CatExpr::Prod(a, b) => a.is_normal() && b.is_normal(),
        }
    }

    /// Number of constructors.
    pub fn size(&self) -> usize {
        match self {
            CatExpr::Base(_) | CatExpr::Unit => 1,
            CatExpr::Op(inner) => 1 + inner.size(),
            CatExpr::Prod(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Base category names mentioned.
    pub fn bases(&self, out: &mut Vec<String>) {
        match self {
            CatExpr::Base(n) => out.push(n.clone()),
            CatExpr::Op(inner) => inner.bases(out),
            CatExpr::Prod(a, b) => {
                a.bases(out);
                b.bases(out);
            }
            CatExpr::Unit => {}
        }
    }
}

pub fn normalize(e: &CatExpr) -> CatExpr {
    e.normalize()
}

impl fmt::Display for CatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn prim(e: &CatExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match e {
                CatExpr::Base(n) => write!(f, "{n}"),
                CatExpr::Unit => write!(f, "1"),
                CatExpr::Op(inner) => {
                    prim(inner, f)?;
                    write!(f, "^op")
                }
                CatExpr::Prod(..) => write!(f, "({e})"),
            }
        }
        match self {
            CatExpr::Prod(a, b) => {
                prim(a, f)?;
                write!(f, " * {b}")
            }
            _ => prim(self, f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c() -> CatExpr {
        CatExpr::base("C")
    }

    #[test]
    fn op_is_involutive() {
        assert_eq!(c().op().op().normalize(), c());
    }

    #[test]
    fn op_distributes_over_products() {
        let d = CatExpr::base("D");
        let e = CatExpr::prod(c(), d.clone()).op();
        assert_eq!(e.normalize(), CatExpr::prod(c().op(), d.op()));
        assert_eq!(CatExpr::Unit.op().normalize(), CatExpr::Unit);
    }

    #[test]
    fn base_is_fixed() {
        assert_eq!(c().normalize(), c());
        assert!(c().op().is_normal());
        assert!(!c().op().op().is_normal());
    }

    #[test]
    fn display_parenthesizes_nested_products() {
        let d = CatExpr::base("D");
        let left = CatExpr::prod(CatExpr::prod(c(), d.clone()), c());
        assert_eq!(left.to_string(), "(C * D) * C");
        assert_eq!(CatExpr::prod(c(), d).op().to_string(), "(C * D)^op");
    }
}
