use crate::syntax::{CatExpr, Formula, Polarity, Sequent, TermExpr};

/// An equality hypothesis `e : hom_A(a, b)` between two context variables.
/// `sigma` and `tau` are the annotations of `a` and `b` inside the hom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomHyp {
    pub label: String,
    pub cat: CatExpr,
    pub a: String,
    pub sigma: Polarity,
    pub b: String,
    pub tau: Polarity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JFailure {
    Schema(String),
    Variance { variable: String, occurrence: String },
}

pub fn hom_hyp(s: &Sequent, e: &str) -> Result<HomHyp, JFailure> {
    let f = s.hyp(e).ok_or_else(|| JFailure::Schema(format!("no hypothesis `{e}`")))?;
    match f {
        Formula::Hom(cat, TermExpr::Var(a, sigma), TermExpr::Var(b, tau)) => {
            if a == b {
                return Err(JFailure::Schema(format!("`{e}` relates `{a}` to itself")));
            }
            Ok(HomHyp { label: e.to_string(), cat: cat.clone(), a: a.clone(), sigma: *sigma, b: b.clone(), tau: *tau })
        }
        _ => Err(JFailure::Schema(format!("`{e}` is not a hom between two variables: {f}"))),
    }
}

fn polarity_word(p: Polarity) -> &'static str {
    match p {
        Polarity::Pos => "positively",
        Polarity::Neg => "negatively",
    }
}

/// First occurrence breaking the hom-elim side condition: in the goal `a`
/// and `b` keep their annotation from `e`, in the other hypotheses they
/// carry the opposite one.
pub fn j_violation(s: &Sequent, h: &HomHyp) -> Option<JFailure> {
    for (v, pol) in [(&h.a, h.sigma), (&h.b, h.tau)] {
        if let Some(o) = s.goal.occurrences(v).into_iter().find(|o| o.polarity != pol) {
            return Some(JFailure::Variance {
                variable: v.clone(),
                occurrence: format!(
                    "{} in the goal `{}` (only {} allowed)",
                    polarity_word(o.polarity),
                    s.goal,
                    polarity_word(pol)
                ),
            });
        }
        for (l, f) in s.hyps.iter().filter(|(l, _)| *l != h.label) {
            if let Some(o) = f.occurrences(v).into_iter().find(|o| o.polarity != pol.flip()) {
                return Some(JFailure::Variance {
                    variable: v.clone(),
                    occurrence: format!(
                        "{} in hypothesis {l}: `{f}` (only {} allowed)",
                        polarity_word(o.polarity),
                        polarity_word(pol.flip())
                    ),
                });
            }
        }
    }
    None
}

/// The premise of hom-elim on `e`: `a` is dropped, `b` becomes a fresh `z`
/// at its position, and both are replaced by `z` everywhere.
pub fn j_premise(s: &Sequent, e: &str) -> Result<Sequent, JFailure> {
    let h = hom_hyp(s, e)?;
    if let Some(v) = j_violation(s, &h) {
        return Err(v);
    }
    let z = s.fresh_var(&h.b);
    let zb = TermExpr::Var(z.clone(), h.tau);
    let za = TermExpr::Var(z.clone(), h.sigma.flip());
    let sub = |f: &Formula| f.substitute(&h.b, &zb).substitute(&h.a, &za);
    let ctx = s
        .ctx
        .iter()
        .filter(|(n, _)| *n != h.a)
        .map(|(n, c)| if *n == h.b { (z.clone(), h.cat.clone()) } else { (n.clone(), c.clone()) })
        .collect();
    let hyps = s.hyps.iter().filter(|(l, _)| l != e).map(|(l, f)| (l.clone(), sub(f))).collect();
    Ok(Sequent::new(ctx, hyps, sub(&s.goal)))
}

/// Whether `e : hom(a, b)` may be eliminated in `s`.
pub fn check_hom_elim_side_condition(s: &Sequent, a: &str, b: &str, e: &str) -> Result<bool, String> {
    let h = match hom_hyp(s, e) {
        Ok(h) => h,
        Err(JFailure::Schema(r)) => return Err(r),
        Err(JFailure::Variance { .. }) => unreachable!(),
    };
    if h.a != a || h.b != b {
        return Err(format!("`{e}` relates `{}` to `{}`, not `{a}` to `{b}`", h.a, h.b));
    }
    Ok(j_violation(s, &h).is_none())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c() -> CatExpr {
        CatExpr::base("C")
    }

    fn hom(s: TermExpr, t: TermExpr) -> Formula {
        Formula::hom(c(), s, t)
    }

    fn ctx(names: &[&str]) -> Vec<(String, CatExpr)> {
        names.iter().map(|n| (n.to_string(), c())).collect()
    }

    fn comp() -> Sequent {
        Sequent::new(
            ctx(&["a", "b", "c"]),
            vec![
                ("f".into(), hom(TermExpr::neg("a"), TermExpr::var("b"))),
                ("g".into(), hom(TermExpr::neg("b"), TermExpr::var("c"))),
            ],
            hom(TermExpr::neg("a"), TermExpr::var("c")),
        )
    }

    #[test]
    fn comp_satisfies_the_side_condition() {
        assert_eq!(check_hom_elim_side_condition(&comp(), "a", "b", "f"), Ok(true));
        let p = j_premise(&comp(), "f").unwrap();
        let expected = Sequent::new(
            ctx(&["z", "c"]),
            vec![("g".into(), hom(TermExpr::neg("z"), TermExpr::var("c")))],
            hom(TermExpr::neg("z"), TermExpr::var("c")),
        );
        assert!(p.alpha_equal(&expected), "{p}");
    }

    #[test]
    fn sym_is_rejected_on_a() {
        let s = Sequent::new(
            ctx(&["a", "b"]),
            vec![("e".into(), hom(TermExpr::neg("a"), TermExpr::var("b")))],
            hom(TermExpr::neg("b"), TermExpr::var("a")),
        );
        assert_eq!(check_hom_elim_side_condition(&s, "a", "b", "e"), Ok(false));
        match j_premise(&s, "e") {
            Err(JFailure::Variance { variable, .. }) => assert_eq!(variable, "a"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dummy_goal_is_always_allowed() {
        let s = Sequent::new(
            ctx(&["a", "b"]),
            vec![("e".into(), hom(TermExpr::neg("a"), TermExpr::var("b")))],
            Formula::Top,
        );
        assert_eq!(check_hom_elim_side_condition(&s, "a", "b", "e"), Ok(true));
    }

    #[test]
    fn non_hom_hypothesis_is_an_error() {
        let s = Sequent::new(ctx(&["a"]), vec![("e".into(), Formula::Top)], Formula::Top);
        assert!(check_hom_elim_side_condition(&s, "a", "a", "e").is_err());
    }
}
