use std::collections::BTreeSet;

use dinat::corpus::{corpus_entries, manifest_names, Expectation};
use dinat::kernel::{check_derivation, check_eq_judgement, EqJudgement};

#[test]
fn every_entry_checks_or_fails_as_declared() {
    let mut failures = Vec::new();
    for e in corpus_entries() {
        let r = check_derivation(&e.derivation, &e.sig);
        match (&e.expectation, r) {
            (Expectation::Accept, Ok(s)) => assert!(s.alpha_equal(&e.expected)),
            (Expectation::Accept, Err(err)) => failures.push(format!("{}: {err}", e.name)),
            (Expectation::Reject(class), Err(err)) if err.class() == class => {}
            (Expectation::Reject(class), r) => failures.push(format!("{}: expected {class}, got {r:?}", e.name)),
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn obligations_discharge_syntactically() {
    let mut failures = Vec::new();
    for e in corpus_entries() {
        for o in &e.obligations {
            let j = EqJudgement { lhs: o.lhs.clone(), rhs: o.rhs.clone() };
            match check_eq_judgement(&j, &o.strategy, &e.sig) {
                Ok(rest) if rest.is_empty() => {}
                Ok(rest) => failures.push(format!("{}: residual {}", o.name, rest.len())),
                Err(err) => failures.push(format!("{}: {err}", o.name)),
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn manifest_matches_entries() {
    let names: BTreeSet<String> = corpus_entries().into_iter().map(|e| e.name).collect();
    let listed: BTreeSet<String> = manifest_names().into_iter().collect();
    assert_eq!(names, listed);
}
