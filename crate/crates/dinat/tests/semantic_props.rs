//! Randomized properties of models, the evaluator and the execution modes.

use std::collections::BTreeMap;

use dinat::cli::modelfile::{parse_model, print_model};
use dinat::cli::{parse_derivation, parse_sequent};
use dinat::corpus::{corpus_entries, model_suite, run_corpus};
use dinat::finsem::eval::UnionFind;
use dinat::finsem::random::{random_composition_search, random_models};
use dinat::finsem::{check_dinatural, enumerate_dinaturals, DinatFamily, EvalError, Evaluator};
use dinat::par::Exec;
use dinat::syntax::{Sequent, SignatureTable};
use proptest::prelude::*;

fn sig() -> SignatureTable {
    parse_derivation("(cat C) (atom R (- C) (+ C)) (atom S (- C) (+ C))").unwrap().sig
}

fn seq(text: &str) -> Sequent {
    parse_sequent(text, &sig()).unwrap()
}

/// The restriction of a two-variable family to the points where both
/// variables agree, as a family over one variable.
fn diagonal(f: &DinatFamily, s: &Sequent) -> DinatFamily {
    let table = f.table.iter().filter(|(p, _)| p[0] == p[1]).map(|(p, row)| (vec![p[0]], row.clone())).collect();
    DinatFamily { sequent: s.clone(), table }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_models_validate_and_round_trip(seed in 0u64..10_000) {
        for m in random_models(seed, 3) {
            prop_assert!(m.validate().is_ok(), "{}", m.name);
            prop_assert!(m.check_signature(&sig()).is_ok(), "{}", m.name);
            let text = print_model(&m).unwrap();
            let back = parse_model(&text).map_err(|e| TestCaseError::fail(format!("{}: {e}", m.name)))?;
            prop_assert_eq!(&back, &m);
            prop_assert_eq!(print_model(&back).unwrap(), text);
        }
    }

    #[test]
    fn diagonals_of_naturals_are_dinatural(seed in 0u64..10_000) {
        let two = seq("{[x: C, y: C] r: R(~x, y) |- S(~x, y)}");
        let one = seq("{[z: C] r: R(~z, z) |- S(~z, z)}");
        for m in random_models(seed, 2) {
            let ev = Evaluator::with_limit(&m, 5000);
            let fams = match enumerate_dinaturals(&ev, &two) {
                Err(EvalError::BoundExceeded { .. }) => continue,
                other => other.map_err(|e| TestCaseError::fail(e.to_string()))?,
            };
            for f in fams.iter().take(50) {
                prop_assert_eq!(check_dinatural(&ev, f).unwrap(), None);
                let d = diagonal(f, &one);
                prop_assert_eq!(check_dinatural(&ev, &d).unwrap(), None, "{} on {}", two, m.name);
            }
        }
    }

    #[test]
    fn union_find_roots_are_least_members(n in 1usize..24, pairs in prop::collection::vec((0usize..24, 0usize..24), 0..30)) {
        let mut uf = UnionFind::new(n);
        let mut label: Vec<usize> = (0..n).collect();
        for (a, b) in pairs.into_iter().filter(|(a, b)| *a < n && *b < n) {
            uf.union(a, b);
            let (la, lb) = (label[a], label[b]);
            for l in label.iter_mut() {
                if *l == lb {
                    *l = la;
                }
            }
        }
        let mut least: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, l) in label.iter().enumerate() {
            least.entry(*l).or_insert(i);
        }
        for i in 0..n {
            prop_assert_eq!(uf.find(i), least[&label[i]]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn composition_search_ignores_exec_mode(seed in 0u64..1_000) {
        let seq = random_composition_search(seed, 12, 2000, Exec::Sequential).unwrap();
        let par = random_composition_search(seed, 12, 2000, Exec::Parallel).unwrap();
        prop_assert_eq!(seq.tried, par.tried);
        prop_assert_eq!(seq.with_witness, par.with_witness);
        prop_assert_eq!(format!("{:?}", seq.first), format!("{:?}", par.first));
    }
}

#[test]
fn corpus_run_ignores_exec_mode() {
    let (entries, models) = (corpus_entries(), model_suite());
    assert_eq!(run_corpus(&entries, &models, Exec::Sequential), run_corpus(&entries, &models, Exec::Parallel));
}

#[test]
fn diagonals_of_naturals_on_the_suite() {
    let mut checked = 0;
    for (src, dst) in [("R", "S"), ("S", "R"), ("R", "R")] {
        let two = seq(&format!("{{[x: C, y: C] r: {src}(~x, y) |- {dst}(~x, y)}}"));
        let one = seq(&format!("{{[z: C] r: {src}(~z, z) |- {dst}(~z, z)}}"));
        for m in model_suite() {
            let ev = Evaluator::new(&m);
            for f in enumerate_dinaturals(&ev, &two).unwrap() {
                assert_eq!(check_dinatural(&ev, &diagonal(&f, &one)).unwrap(), None, "{two} on {}", m.name);
                checked += 1;
            }
        }
    }
    assert!(checked >= 20, "only {checked} natural families");
}
