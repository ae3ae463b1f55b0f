use std::fmt::Write;

use super::{Decl, DerivationFile};
use crate::kernel::{Derivation, Strategy};
use crate::syntax::{CatExpr, Polarity};

/// Renders a derivation tree, one node per line, children indented.
pub fn print_derivation(d: &Derivation, indent: usize) -> String {
    let mut out = String::new();
    node(d, indent, &mut out);
    out
}

fn node(d: &Derivation, indent: usize, out: &mut String) {
    let _ = write!(out, "{:indent$}({} {}", "", d.rule, d.concl);
    for p in &d.premises {
        out.push('\n');
        node(p, indent + 2, out);
    }
    out.push(')');
}

fn grouped(c: &CatExpr) -> String {
    let s = c.to_string();
    if s.contains(' ') {
        format!("({s})")
    } else {
        s
    }
}

/// Renders a whole file; parsing the output gives back the same file.
pub fn print_file(f: &DerivationFile) -> String {
    let mut out = String::new();
    for d in &f.decls {
        match d {
            Decl::Cat(c) => {
                let _ = writeln!(out, "(cat {c})");
            }
            Decl::Atom(p, slots) => {
                let _ = write!(out, "(atom {p}");
                for s in slots {
                    let sign = if s.polarity == Polarity::Pos { '+' } else { '-' };
                    let _ = write!(out, " ({sign} {})", s.cat);
                }
                out.push_str(")\n");
            }
            Decl::Functor(n, dom, cod) => {
                let dom: Vec<String> = dom.iter().map(grouped).collect();
                let _ = writeln!(out, "(functor {n} ({}) {})", dom.join(" "), grouped(cod));
            }
        }
    }
    for d in &f.derivations {
        let reject = d.reject.as_ref().map(|r| format!(" :reject {r}")).unwrap_or_default();
        let _ = writeln!(out, "\n(derivation {}{reject}\n{})", d.name, print_derivation(&d.deriv, 2));
    }
    for o in &f.obligations {
        let strategy = match &o.strategy {
            Strategy::Direct => "direct".to_string(),
            Strategy::JEq(ls) if ls.is_empty() => "(jeq)".to_string(),
            Strategy::JEq(ls) => format!("(jeq {})", ls.join(" ")),
        };
        let _ = writeln!(
            out,
            "\n(obligation {} :for {} {strategy}\n{}\n{})",
            o.name,
            o.target,
            print_derivation(&o.lhs, 2),
            print_derivation(&o.rhs, 2)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse_derivation;
    use super::*;

    #[test]
    fn round_trips_a_file() {
        let src = "
            (cat C) (atom P (- C) (+ C)) (functor F (C C^op) C)
            (derivation d :reject VarianceViolation
              (curry [h] {[x: C] |- P(~x, F(x, ~x)) => P(~x, F(x, ~x))}
                (id {[x: C] h: P(~x, F(x, ~x)) |- P(~x, F(x, ~x))})))
            (obligation o :for d (jeq)
              (ref d) (ref d))";
        let f = parse_derivation(src).unwrap();
        let printed = print_file(&f);
        let g = parse_derivation(&printed).unwrap();
        assert_eq!(f, g);
        assert_eq!(printed, print_file(&g));
    }
}
