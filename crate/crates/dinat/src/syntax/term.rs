use std::collections::BTreeSet;
use std::fmt;

use super::cat::CatExpr;
use super::signature::SignatureTable;
use super::SyntaxError;

/// Variance of an occurrence: `Neg` is the contravariant copy `~x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Pos,
    Neg,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
        }
    }

    /// Composition of polarities: `Neg` flips, `Pos` keeps.
    pub fn times(self, other: Polarity) -> Polarity {
        if self == Polarity::Pos {
            other
        } else {
            other.flip()
        }
    }
}

impl std::ops::Neg for Polarity {
    type Output = Polarity;
    fn neg(self) -> Polarity {
        self.flip()
    }
}

/// Ordered term context; entries are `(name, category)`.
pub type TermCtx = Vec<(String, CatExpr)>;

pub fn ctx_lookup<'a>(ctx: &'a [(String, CatExpr)], name: &str) -> Option<&'a CatExpr> {
    ctx.iter().rev().find(|(n, _)| n == name).map(|(_, c)| c)
}

/// Difunctor terms. `App(f, Neg, args)` is the opposite functor `f^op`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermExpr {
    Var(String, Polarity),
    App(String, Polarity, Vec<TermExpr>),
    Pair(Box<TermExpr>, Box<TermExpr>),
    Fst(Box<TermExpr>),
    Snd(Box<TermExpr>),
    Unit,
}

impl TermExpr {
    pub fn var(name: impl Into<String>) -> Self {
        TermExpr::Var(name.into(), Polarity::Pos)
    }

    pub fn neg(name: impl Into<String>) -> Self {
        TermExpr::Var(name.into(), Polarity::Neg)
    }

    pub fn app(f: impl Into<String>, args: Vec<TermExpr>) -> Self {
        TermExpr::App(f.into(), Polarity::Pos, args)
    }

    pub fn pair(a: TermExpr, b: TermExpr) -> Self {
        TermExpr::Pair(Box::new(a), Box::new(b))
    }

    pub fn fst(t: TermExpr) -> Self {
        TermExpr::Fst(Box::new(t))
    }

    pub fn snd(t: TermExpr) -> Self {
        TermExpr::Snd(Box::new(t))
    }

    /// The image under `(-)^op`: every variance annotation flipped.
    pub fn op_image(&self) -> TermExpr {
        match self {
            TermExpr::Var(n, p) => TermExpr::Var(n.clone(), p.flip()),
            TermExpr::App(f, p, args) => {
                TermExpr::App(f.clone(), p.flip(), args.iter().map(|a| a.op_image()).collect())
            }
            TermExpr::Pair(a, b) => TermExpr::pair(a.op_image(), b.op_image()),
            TermExpr::Fst(t) => TermExpr::fst(t.op_image()),
            TermExpr::Snd(t) => TermExpr::snd(t.op_image()),
            TermExpr::Unit => TermExpr::Unit,
        }
    }

    pub fn mentions(&self, v: &str) -> bool {
        match self {
            TermExpr::Var(n, _) => n == v,
            TermExpr::App(_, _, args) => args.iter().any(|a| a.mentions(v)),
            TermExpr::Pair(a, b) => a.mentions(v) || b.mentions(v),
            TermExpr::Fst(t) | TermExpr::Snd(t) => t.mentions(v),
            TermExpr::Unit => false,
        }
    }

    pub fn free_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            TermExpr::Var(n, _) => {
                out.insert(n.clone());
            }
            TermExpr::App(_, _, args) => args.iter().for_each(|a| a.free_vars(out)),
            TermExpr::Pair(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            TermExpr::Fst(t) | TermExpr::Snd(t) => t.free_vars(out),
            TermExpr::Unit => {}
        }
    }

    /// Variable occurrences with their annotations, left to right.
    pub fn var_occurrences(&self, out: &mut Vec<(String, Polarity)>) {
        match self {
            TermExpr::Var(n, p) => out.push((n.clone(), *p)),
            TermExpr::App(_, _, args) => args.iter().for_each(|a| a.var_occurrences(out)),
            TermExpr::Pair(a, b) => {
                a.var_occurrences(out);
                b.var_occurrences(out);
            }
            TermExpr::Fst(t) | TermExpr::Snd(t) => t.var_occurrences(out),
            TermExpr::Unit => {}
        }
    }

    /// Replaces `v` by `t` and `~v` by the op-image of `t`, then normalizes.
    pub fn substitute(&self, v: &str, t: &TermExpr) -> TermExpr {
        self.subst_raw(v, t).normalize()
    }

    fn subst_raw(&self, v: &str, t: &TermExpr) -> TermExpr {
        match self {
            TermExpr::Var(n, Polarity::Pos) if n == v => t.clone(),
            TermExpr::Var(n, Polarity::Neg) if n == v => t.op_image(),
            TermExpr::Var(..) | TermExpr::Unit => self.clone(),
            TermExpr::App(f, p, args) => {
                TermExpr::App(f.clone(), *p, args.iter().map(|a| a.subst_raw(v, t)).collect())
            }
            TermExpr::Pair(a, b) => TermExpr::pair(a.subst_raw(v, t), b.subst_raw(v, t)),
            TermExpr::Fst(x) => TermExpr::fst(x.subst_raw(v, t)),
            TermExpr::Snd(x) => TermExpr::snd(x.subst_raw(v, t)),
        }
    }

    /// Renames free occurrences of `from` to `to`, keeping annotations.
    pub fn rename(&self, from: &str, to: &str) -> TermExpr {
        match self {
            TermExpr::Var(n, p) if n == from => TermExpr::Var(to.to_string(), *p),
            TermExpr::Var(..) | TermExpr::Unit => self.clone(),
            TermExpr::App(f, p, args) => {
                TermExpr::App(f.clone(), *p, args.iter().map(|a| a.rename(from, to)).collect())
            }
            TermExpr::Pair(a, b) => TermExpr::pair(a.rename(from, to), b.rename(from, to)),
            TermExpr::Fst(x) => TermExpr::fst(x.rename(from, to)),
            TermExpr::Snd(x) => TermExpr::snd(x.rename(from, to)),
        }
    }

    /// Applies `f` to every variable name.
    pub fn map_names(&self, f: &dyn Fn(&str) -> String) -> TermExpr {
        match self {
            TermExpr::Var(n, p) => TermExpr::Var(f(n), *p),
            TermExpr::Unit => TermExpr::Unit,
            TermExpr::App(g, p, args) => TermExpr::App(g.clone(), *p, args.iter().map(|a| a.map_names(f)).collect()),
            TermExpr::Pair(a, b) => TermExpr::pair(a.map_names(f), b.map_names(f)),
            TermExpr::Fst(x) => TermExpr::fst(x.map_names(f)),
            TermExpr::Snd(x) => TermExpr::snd(x.map_names(f)),
        }
    }

    /// Beta and eta for pairs: `fst <a,b> = a` and `<fst p, snd p> = p`.
    pub fn normalize(&self) -> TermExpr {
        match self {
            TermExpr::Var(..) | TermExpr::Unit => self.clone(),
            TermExpr::App(f, p, args) => {
                TermExpr::App(f.clone(), *p, args.iter().map(|a| a.normalize()).collect())
            }
            TermExpr::Fst(t) => match t.normalize() {
                TermExpr::Pair(a, _) => *a,
                n => TermExpr::fst(n),
            },
            TermExpr::Snd(t) => match t.normalize() {
                TermExpr::Pair(_, b) => *b,
                n => TermExpr::snd(n),
            },
            TermExpr::Pair(a, b) => {
                let (a, b) = (a.normalize(), b.normalize());
                if let (TermExpr::Fst(x), TermExpr::Snd(y)) = (&a, &b) {
                    if x == y {
                        return (**x).clone();
                    }
                }
                TermExpr::pair(a, b)
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            TermExpr::Var(..) | TermExpr::Unit => 1,
            TermExpr::App(_, _, args) => 1 + args.iter().map(|a| a.size()).sum::<usize>(),
            TermExpr::Pair(a, b) => 1 + a.size() + b.size(),
            TermExpr::Fst(t) | TermExpr::Snd(t) => 1 + t.size(),
        }
    }

    /// Infers the (normalized) category of the term.
    pub fn type_of(&self, ctx: &[(String, CatExpr)], sig: &SignatureTable) -> Result<CatExpr, SyntaxError> {
        match self {
            TermExpr::Var(n, p) => {
                let ty = ctx_lookup(ctx, n).ok_or_else(|| SyntaxError::UnboundVariable(n.clone()))?;
                Ok(match p {
                    Polarity::Pos => ty.normalize(),
                    Polarity::Neg => ty.dual(),
                })
            }
            TermExpr::App(f, p, args) => {
                let fs = sig.functors.get(f).ok_or_else(|| SyntaxError::UnknownFunctor(f.clone()))?;
                if fs.dom.len() != args.len() {
                    return Err(SyntaxError::ArityMismatch {
                        symbol: f.clone(),
                        expected: fs.dom.len(),
                        found: args.len(),
                    });
                }
                for (i, (a, d)) in args.iter().zip(&fs.dom).enumerate() {
                    let want = match p {
                        Polarity::Pos => d.normalize(),
                        Polarity::Neg => d.dual(),
                    };
                    let got = a.type_of(ctx, sig)?;
                    if got != want {
                        return Err(SyntaxError::TypeMismatch {
                            at: format!("argument {} of {}", i + 1, self),
                            expected: want,
                            found: got,
                        });
                    }
                }
                Ok(match p {
                    Polarity::Pos => fs.cod.normalize(),
                    Polarity::Neg => fs.cod.dual(),
                })
            }
            TermExpr::Pair(a, b) => Ok(CatExpr::prod(a.type_of(ctx, sig)?, b.type_of(ctx, sig)?)),
            TermExpr::Fst(t) | TermExpr::Snd(t) => match t.type_of(ctx, sig)? {
                CatExpr::Prod(a, b) => Ok(if matches!(self, TermExpr::Fst(_)) { *a } else { *b }),
                other => Err(SyntaxError::TypeMismatch {
                    at: format!("{self}"),
                    expected: CatExpr::prod(CatExpr::base("_"), CatExpr::base("_")),
                    found: other,
                }),
            },
            TermExpr::Unit => Ok(CatExpr::Unit),
        }
    }
}

impl fmt::Display for TermExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermExpr::Var(n, Polarity::Pos) => write!(f, "{n}"),
            TermExpr::Var(n, Polarity::Neg) => write!(f, "~{n}"),
            TermExpr::App(name, p, args) => {
                write!(f, "{name}")?;
                if *p == Polarity::Neg {
                    write!(f, "^op")?;
                }
                write!(f, "(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            TermExpr::Pair(a, b) => write!(f, "<{a}, {b}>"),
            TermExpr::Fst(t) => write!(f, "fst({t})"),
            TermExpr::Snd(t) => write!(f, "snd({t})"),
            TermExpr::Unit => write!(f, "()"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_image_is_involutive() {
        let t = TermExpr::app("F", vec![TermExpr::pair(TermExpr::var("x"), TermExpr::neg("y"))]);
        assert_eq!(t.op_image().op_image(), t);
        assert_eq!(t.op_image().to_string(), "F^op(<~x, y>)");
    }

    #[test]
    fn negative_occurrences_receive_the_op_image() {
        let t = TermExpr::neg("x").substitute("x", &TermExpr::app("F", vec![TermExpr::var("z")]));
        assert_eq!(t.to_string(), "F^op(~z)");
    }

    #[test]
    fn pairs_normalize() {
        let p = TermExpr::var("p");
        let eta = TermExpr::pair(TermExpr::fst(p.clone()), TermExpr::snd(p.clone()));
        assert_eq!(eta.normalize(), p);
        let beta = TermExpr::fst(TermExpr::pair(TermExpr::var("a"), TermExpr::var("b")));
        assert_eq!(beta.normalize(), TermExpr::var("a"));
    }
}
