use dinat::cli::{parse_derivation, parse_sequent};
use dinat::corpus::parse_file;
use dinat::kernel::{check_derivation, check_eq_judgement, expand_all, search, EqJudgement, KernelError, Strategy};

fn check_src(src: &str) -> Result<(), KernelError> {
    let f = parse_derivation(src).unwrap();
    for d in &f.derivations {
        check_derivation(&d.deriv, &f.sig)?;
    }
    Ok(())
}

#[test]
fn sym_names_the_offending_variable() {
    let f = parse_file("sym.dinat");
    match check_derivation(&f.derivations[0].deriv, &f.sig) {
        Err(KernelError::VarianceViolation { variable, occurrence, node }) => {
            assert_eq!(variable, "a");
            assert!(occurrence.contains("positively in the goal"), "{occurrence}");
            assert!(node.starts_with("j e at root"), "{node}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn wrong_premise_is_a_schema_mismatch() {
    let r = check_src(
        "(cat C)
         (derivation bad
           (j f {[a: C, b: C, c: C] f: hom(~a, b), g: hom(~b, c) |- hom(~a, c)}
             (id {[b: C, c: C] g: hom(~c, b) |- hom(~c, b)})))",
    );
    assert_eq!(r.unwrap_err().class(), "SchemaMismatch");
}

#[test]
fn hypotheses_may_not_use_the_source_positively() {
    let r = check_src(
        "(cat C) (atom P (+ C))
         (derivation bad
           (j e {[a: C, b: C] e: hom(~a, b), k: P(~a) |- P(b)}
             (id {[b: C] k: P(~b) |- P(b)})))",
    );
    assert!(r.is_err());
}

#[test]
fn ill_formed_conclusions_are_syntax_errors() {
    let r = check_src("(cat C) (atom P (+ C)) (derivation bad (id {[x: C] k: P(~x) |- P(~x)}))");
    assert_eq!(r.unwrap_err().class(), "TypeMismatch");
    let r = check_src("(cat C) (atom P (+ C)) (derivation bad (id {[x: C] k: P(y) |- P(y)}))");
    assert_eq!(r.unwrap_err().class(), "UnboundVariable");
}

#[test]
fn macro_nodes_check_their_expansion() {
    let r = check_src(
        "(cat C) (atom P (+ C)) (atom K (+ C))
         (derivation bad
           (yoneda {[a: C] k: K(a) |- end x: C. hom(~a, x) => P(x)}
             (id {[a: C] k: P(a) |- P(a)})))",
    );
    assert_eq!(r.unwrap_err().class(), "SchemaMismatch");
}

#[test]
fn expansions_are_macro_free_and_check() {
    for file in ["yoneda.dinat", "coyoneda.dinat", "presheaf-exp.dinat", "ran.dinat", "lan.dinat", "fubini.dinat", "hom-lim.dinat"] {
        let f = parse_file(file);
        for d in &f.derivations {
            let e = expand_all(&d.deriv).unwrap();
            fn no_macros(d: &dinat::kernel::Derivation) -> bool {
                !d.rule.is_macro() && d.premises.iter().all(no_macros)
            }
            assert!(no_macros(&e), "{}", d.name);
            let s = check_derivation(&e, &f.sig).unwrap_or_else(|err| panic!("{}: {err}", d.name));
            assert!(s.alpha_equal(&d.deriv.concl));
        }
    }
}

#[test]
fn reindex_rejects_mistyped_terms() {
    let r = check_src(
        "(cat C) (cat D) (functor F (C) D)
         (derivation bad
           (reindex x F(y) {[y: C] |- hom(F^op(~y), F(y))}
             (refl {[x: C] |- hom(~x, x)})))",
    );
    assert_eq!(r.unwrap_err().class(), "SchemaMismatch");
}

#[test]
fn reindex_along_a_functor() {
    check_src(
        "(cat C) (cat D) (functor F (C) D)
         (derivation ok
           (reindex x F(y) {[y: C] |- hom(F^op(~y), F(y))}
             (refl {[x: D] |- hom(~x, x)})))",
    )
    .unwrap();
}

#[test]
fn associativity_needs_both_eliminations() {
    let f = parse_file("comp.dinat");
    let o = f.obligations.iter().find(|o| o.name == "comp-assoc").unwrap();
    let j = EqJudgement { lhs: o.lhs.clone(), rhs: o.rhs.clone() };
    assert!(check_eq_judgement(&j, &o.strategy, &f.sig).unwrap().is_empty());
    assert_eq!(check_eq_judgement(&j, &Strategy::JEq(vec![]), &f.sig).unwrap().len(), 1);
    assert_eq!(check_eq_judgement(&j, &Strategy::Direct, &f.sig).unwrap().len(), 1);
}

#[test]
fn search_finds_comp_but_not_sym() {
    let sig = parse_derivation("(cat C)").unwrap().sig;
    let comp = parse_sequent("{[a: C, b: C, c: C] f: hom(~a, b), g: hom(~b, c) |- hom(~a, c)}", &sig).unwrap();
    let found = search(&comp, &sig, 3).found.expect("comp is derivable");
    assert!(check_derivation(&found, &sig).is_ok());
    let sym = parse_sequent("{[a: C, b: C] e: hom(~a, b) |- hom(~b, a)}", &sig).unwrap();
    let r = search(&sym, &sig, 3);
    assert!(r.found.is_none());
    assert!(r.explored > 0);
}
