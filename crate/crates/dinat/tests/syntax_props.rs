//! Randomized properties of formulas, the concrete syntax and the kernel.

use dinat::cli::{parse_derivation, parse_sequent};
use dinat::kernel::{check_derivation, j_premise, Derivation, Rule};
use dinat::syntax::{CatExpr, Formula, PathStep, Polarity, Sequent, SignatureTable, TermExpr};
use proptest::prelude::*;

const DECLS: &str = "(cat C) (cat D) (atom P (+ C)) (atom K (+ C)) (atom G (+ D)) (atom R (- C) (+ C)) \
                     (atom S (- C) (+ C)) (atom V (- C) (+ C) (- D) (+ D)) (atom Q) (functor F (C) D)";

/// Context variables; binders reuse `x` and `y` and add `z`.
const VARS: [&str; 4] = ["a", "b", "x", "y"];
const BINDERS: [&str; 3] = ["x", "y", "z"];

fn sig() -> SignatureTable {
    parse_derivation(DECLS).unwrap().sig
}

fn ctx() -> Vec<(String, CatExpr)> {
    VARS.iter().map(|v| (v.to_string(), CatExpr::base("C"))).collect()
}

fn c() -> CatExpr {
    CatExpr::base("C")
}

fn name() -> impl Strategy<Value = String> {
    prop::sample::select(&["a", "b", "x", "y", "z"][..]).prop_map(str::to_string)
}

fn var(n: String, p: Polarity) -> TermExpr {
    TermExpr::Var(n, p)
}

fn fapp(n: String, p: Polarity) -> TermExpr {
    TermExpr::App("F".into(), p, vec![TermExpr::Var(n, p)])
}

fn leaf() -> impl Strategy<Value = Formula> {
    use Polarity::{Neg, Pos};
    prop_oneof![
        Just(Formula::Top),
        Just(Formula::atom("Q", vec![])),
        (prop::sample::select(&["P", "K"][..]), name()).prop_map(|(p, n)| Formula::atom(p, vec![var(n, Pos)])),
        name().prop_map(|n| Formula::atom("G", vec![fapp(n, Pos)])),
        (prop::sample::select(&["R", "S"][..]), name(), name())
            .prop_map(|(p, s, t)| Formula::atom(p, vec![var(s, Neg), var(t, Pos)])),
        (name(), name()).prop_map(|(s, t)| Formula::hom(c(), var(s, Neg), var(t, Pos))),
        (name(), name()).prop_map(|(s, t)| Formula::hom(CatExpr::base("D"), fapp(s, Neg), fapp(t, Pos))),
        (name(), name(), name(), name())
            .prop_map(|(s, t, u, w)| Formula::atom("V", vec![var(s, Neg), var(t, Pos), fapp(u, Neg), fapp(w, Pos)])),
    ]
}

fn formula() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        let binder = prop::sample::select(&BINDERS[..]);
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            (binder.clone(), inner.clone()).prop_map(|(x, b)| Formula::end(x, c(), b)),
            (binder, inner).prop_map(|(x, b)| Formula::coend(x, c(), b)),
        ]
    })
}

/// A formula that is well formed in `[a, b, x, y: C]`: `z` only under a
/// binder for it.
fn closed_formula() -> impl Strategy<Value = Formula> {
    formula().prop_filter("z free", |f| !f.free_vars().contains("z"))
}

/// Renames `from` to `to` in the terms of `f`, stopping under rebinding.
fn rename_free(f: &Formula, from: &str, to: &str) -> Formula {
    let t = |t: &TermExpr| t.map_names(&|n| if n == from { to.to_string() } else { n.to_string() });
    match f {
        Formula::Top => Formula::Top,
        Formula::Hom(k, s, u) => Formula::Hom(k.clone(), t(s), t(u)),
        Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(t).collect()),
        Formula::And(a, b) => Formula::and(rename_free(a, from, to), rename_free(b, from, to)),
        Formula::Imp(a, b) => Formula::imp(rename_free(a, from, to), rename_free(b, from, to)),
        Formula::End(x, k, b) if x == from => Formula::end(x.clone(), k.clone(), (**b).clone()),
        Formula::Coend(x, k, b) if x == from => Formula::coend(x.clone(), k.clone(), (**b).clone()),
        Formula::End(x, k, b) => Formula::end(x.clone(), k.clone(), rename_free(b, from, to)),
        Formula::Coend(x, k, b) => Formula::coend(x.clone(), k.clone(), rename_free(b, from, to)),
    }
}

/// Gives every binder a fresh `{prefix}{depth}` name.
fn rebind(f: &Formula, prefix: &str, depth: usize) -> Formula {
    match f {
        Formula::And(a, b) => Formula::and(rebind(a, prefix, depth), rebind(b, prefix, depth)),
        Formula::Imp(a, b) => Formula::imp(rebind(a, prefix, depth), rebind(b, prefix, depth)),
        Formula::End(x, k, b) | Formula::Coend(x, k, b) => {
            let n = format!("{prefix}{depth}");
            let body = rebind(&rename_free(b, x, &n), prefix, depth + 1);
            if matches!(f, Formula::End(..)) {
                Formula::end(n, k.clone(), body)
            } else {
                Formula::coend(n, k.clone(), body)
            }
        }
        other => other.clone(),
    }
}

/// Free occurrences of `v`, counted leaf by leaf.
fn count_free(f: &Formula, v: &str) -> usize {
    let in_term = |t: &TermExpr| {
        let mut occ = Vec::new();
        t.var_occurrences(&mut occ);
        occ.iter().filter(|(n, _)| n == v).count()
    };
    match f {
        Formula::Top => 0,
        Formula::Hom(_, s, t) => in_term(s) + in_term(t),
        Formula::Atom(_, args) => args.iter().map(in_term).sum(),
        Formula::And(a, b) | Formula::Imp(a, b) => count_free(a, v) + count_free(b, v),
        Formula::End(x, _, b) | Formula::Coend(x, _, b) => {
            if x == v {
                0
            } else {
                count_free(b, v)
            }
        }
    }
}

fn well_formed(f: &Formula) -> bool {
    f.check(&mut ctx(), &sig()).is_ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn generated_formulas_are_well_formed(f in closed_formula()) {
        prop_assert!(well_formed(&f), "{f}");
    }

    #[test]
    fn normalize_is_idempotent_and_linear(f in closed_formula()) {
        let n = f.normalize();
        prop_assert_eq!(n.normalize(), n.clone());
        prop_assert!(n.size() <= 2 * f.size(), "{} grew to {}", f.size(), n.size());
    }

    #[test]
    fn substitution_removes_the_variable(f in closed_formula(), v in prop::sample::select(&VARS[..]), t in prop::sample::select(&VARS[..])) {
        prop_assume!(t != v);
        let g = f.substitute(v, &TermExpr::var(t));
        prop_assert!(g.occurrences(v).is_empty(), "{g}");
        prop_assert!(well_formed(&g), "{g}");
        prop_assert_eq!(g.occurrences(t).len(), f.occurrences(t).len() + f.occurrences(v).len());
    }

    #[test]
    fn alpha_equal_is_an_equivalence(f in closed_formula(), g in closed_formula()) {
        let (f1, f2) = (rebind(&f, "p", 0), rebind(&f, "q", 0));
        prop_assert!(f.alpha_equal(&f));
        prop_assert!(f.alpha_equal(&f1) && f1.alpha_equal(&f));
        prop_assert!(f1.alpha_equal(&f2) && f.alpha_equal(&f2));
        prop_assert_eq!(f.alpha_equal(&g), g.alpha_equal(&f));
        prop_assert_eq!(f.alpha_equal(&g), f1.alpha_equal(&g));
    }

    #[test]
    fn substitution_respects_alpha(f in closed_formula(), v in prop::sample::select(&VARS[..]), t in prop::sample::select(&VARS[..])) {
        let g = rebind(&f, "p", 0);
        // `t` may be a name the binders of `f` capture; substitution must rename them.
        let (fs, gs) = (f.substitute(v, &TermExpr::var(t)), g.substitute(v, &TermExpr::var(t)));
        prop_assert!(fs.alpha_equal(&gs), "{fs} vs {gs}");
    }

    #[test]
    fn each_occurrence_has_one_polarity(f in closed_formula(), v in prop::sample::select(&VARS[..])) {
        let occ = f.occurrences(v);
        prop_assert_eq!(occ.len(), count_free(&f, v));
        let mut paths: Vec<&Vec<PathStep>> = occ.iter().map(|o| &o.path).collect();
        paths.sort_by_key(|p| format!("{p:?}"));
        paths.dedup();
        prop_assert_eq!(paths.len(), occ.len());
        let flipped: Vec<Polarity> = Formula::imp(f.clone(), Formula::Top).occurrences(v).iter().map(|o| o.polarity).collect();
        let kept: Vec<Polarity> = Formula::and(Formula::Top, f.clone()).occurrences(v).iter().map(|o| o.polarity).collect();
        prop_assert_eq!(flipped, occ.iter().map(|o| o.polarity.flip()).collect::<Vec<_>>());
        prop_assert_eq!(kept, occ.iter().map(|o| o.polarity).collect::<Vec<_>>());
    }

    #[test]
    fn sequents_survive_print_and_parse(h in closed_formula(), g in closed_formula()) {
        let s = Sequent::new(ctx(), vec![("h".into(), h)], g);
        let text = s.to_string();
        let back = parse_sequent(&text, &sig()).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn j_side_conditions_are_alpha_invariant(h in closed_formula(), g in closed_formula()) {
        let hom = Formula::hom(c(), TermExpr::neg("a"), TermExpr::var("b"));
        let s = Sequent::new(ctx(), vec![("e".into(), hom), ("h".into(), h)], g);
        let renamed = {
            let r = |f: &Formula| rename_free(&rename_free(f, "a", "m"), "b", "n");
            let ctx = s.ctx.iter().map(|(v, k)| (match v.as_str() { "a" => "m", "b" => "n", o => o }.to_string(), k.clone())).collect();
            Sequent::new(ctx, s.hyps.iter().map(|(l, f)| (l.clone(), r(f))).collect(), r(&s.goal))
        };
        let run = |s: &Sequent| {
            let premise = j_premise(s, "e").unwrap_or_else(|_| s.clone());
            let d = Derivation::new(Rule::J("e".into()), s.clone(), vec![Derivation::leaf(Rule::Hole("p".into()), premise)]);
            check_derivation(&d, &sig())
        };
        let (r1, r2) = (run(&s), run(&renamed));
        prop_assert_eq!(j_premise(&s, "e").is_ok(), j_premise(&renamed, "e").is_ok());
        prop_assert_eq!(r1.is_ok(), r2.is_ok(), "{:?} vs {:?}", r1, r2);
        prop_assert_eq!(r1.map(|x| x.to_string()).map_err(|e| e.class()), run(&s).map(|x| x.to_string()).map_err(|e| e.class()));
    }
}
