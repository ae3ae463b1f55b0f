use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dinat::corpus::{corpus_entries, model_suite, run_corpus, Expectation, Status};
use dinat::par::Exec;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../dinat/corpus").join(name)
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn dinat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dinat")).args(args).output().expect("binary runs")
}

fn run(args: &[&str]) -> (i32, String) {
    let o = dinat(args);
    (o.status.code().expect("exit code"), String::from_utf8(o.stdout).expect("utf-8 output"))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn check_comp_prints_conclusion() {
    let (code, out) = run(&["check", p(&corpus("comp.dinat"))]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("ok   comp: {[a: C, b: C, c: C] f: hom(~a, b), g: hom(~b, c) |- hom(~a, c)}"), "{out}");
    assert!(out.contains("comp-assoc: discharged"), "{out}");
}

#[test]
fn check_sym_reports_variance_violation() {
    let (code, out) = run(&["check", p(&corpus("sym.dinat"))]);
    assert_eq!(code, 2, "{out}");
    assert!(out.contains("VarianceViolation"), "{out}");
    assert!(out.contains("`a` occurs positively in the goal"), "{out}");
}

#[test]
fn check_sym_json_names_class_and_node() {
    let (code, out) = run(&["--json", "check", p(&corpus("sym.dinat"))]);
    assert_eq!(code, 2);
    let first: serde_json::Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
    assert_eq!(first["kind"], "check");
    assert_eq!(first["status"], "fail");
    assert_eq!(first["class"], "VarianceViolation");
    assert_eq!(first["node"], "j e at root");
}

#[test]
fn check_missing_file_is_io_error() {
    let (code, out) = run(&["check", "/nonexistent/x.dinat"]);
    assert_eq!(code, 3, "{out}");
}

#[test]
fn check_parse_error_has_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.dinat");
    std::fs::write(&f, "(cat C)\n(derivation r\n  (refl {[x: C] |- hom(~x, x)})\n").unwrap();
    let (code, out) = run(&["check", p(&f)]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("bad.dinat:4:1"), "{out}");
}

#[test]
fn check_empty_file_passes() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("empty.dinat");
    std::fs::write(&f, "").unwrap();
    let (code, out) = run(&["check", p(&f)]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("0 derivations"), "{out}");
}

#[test]
fn eval_comp_at_point() {
    let (code, out) = run(&["eval", p(&corpus("comp.dinat")), "--model", p(&fixture("two.model")), "--at", "a,a,b"]);
    assert_eq!(code, 0, "{out}");
    let expected = "derivation comp: {[a: C, b: C, c: C] f: hom(~a, b), g: hom(~b, c) |- hom(~a, c)}\n  \
                    at (a, a, b)\n    (id_a, f) |-> f\n  dinaturality: PASS\n";
    assert_eq!(out, expected);
}

#[test]
fn eval_refl_gives_identities() {
    let (code, out) = run(&["eval", p(&corpus("refl.dinat")), "--model", p(&fixture("two.model"))]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("at (a)\n    () |-> id_a\n  at (b)\n    () |-> id_b\n  dinaturality: PASS"), "{out}");
}

#[test]
fn eval_full_table_of_comp_on_two() {
    let (code, out) = run(&["eval", p(&corpus("comp.dinat")), "--model", p(&fixture("two.model"))]);
    assert_eq!(code, 0, "{out}");
    let rows: Vec<&str> = out.lines().filter(|l| l.contains("|->")).map(str::trim).collect();
    // Composable pairs of the walking arrow.
    assert_eq!(rows, ["(id_a, id_a) |-> id_a", "(id_a, f) |-> f", "(f, id_b) |-> f", "(id_b, id_b) |-> id_b"]);
}

#[test]
fn eval_bad_point_is_usage_error() {
    let (code, _) = run(&["eval", p(&corpus("comp.dinat")), "--model", p(&fixture("two.model")), "--at", "a,z,b"]);
    assert_eq!(code, 64);
    let (code, _) = run(&["eval", p(&corpus("comp.dinat")), "--model", p(&fixture("two.model")), "--at", "a"]);
    assert_eq!(code, 64);
}

#[test]
fn eval_non_associative_model_names_triple() {
    let (code, out) = run(&["eval", p(&corpus("comp.dinat")), "--model", p(&fixture("bad-assoc.model"))]);
    assert_eq!(code, 4, "{out}");
    assert!(out.contains("not associative on (e, e, e)"), "{out}");
}

#[test]
fn eval_signature_mismatch_is_model_error() {
    let (code, out) = run(&["eval", p(&corpus("yoneda.dinat")), "--model", p(&fixture("two.model"))]);
    assert_eq!(code, 4, "{out}");
}

#[test]
fn verify_yoneda_round_trips_pass() {
    let (code, out) = run(&["verify", p(&corpus("yoneda.dinat")), "--enumerate"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("inverse:yoneda-inv"), "{out}");
    assert!(out.contains("end-round-trip"), "{out}");
    assert!(!out.contains("FAIL"), "{out}");
}

#[test]
fn verify_comp_obligations_pass_everywhere() {
    let (code, out) = run(&["--json", "verify", p(&corpus("comp.dinat"))]);
    assert_eq!(code, 0, "{out}");
    let obligations: Vec<&str> = out.lines().filter(|l| l.contains("\"property\":\"obligation:")).collect();
    // Three obligations, syntactically and on each of the twelve suite models.
    assert_eq!(obligations.len(), 3 * 13);
    assert!(obligations.iter().all(|l| l.contains("\"status\":\"pass\"")));
}

#[test]
fn verify_small_bound_warns_and_passes() {
    let (code, out) = run(&["verify", p(&corpus("comp.dinat")), "--max-size", "1"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("SKIP") && out.contains("bound exceeded"), "{out}");
    assert!(out.contains("0 failed"), "{out}");
}

#[test]
fn verify_is_deterministic_across_exec_modes() {
    let file = corpus("coyoneda.dinat");
    let args = ["--json", "verify", p(&file), "--enumerate", "--seed", "11"];
    let par = dinat(&args).stdout;
    let mut seq_args = vec!["--sequential"];
    seq_args.extend_from_slice(&args);
    let seq = dinat(&seq_args).stdout;
    assert!(!par.is_empty());
    assert_eq!(par, seq);
    assert_eq!(par, dinat(&args).stdout);
}

#[test]
fn verify_with_user_models() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("two.model"), dir.path().join("two.model")).unwrap();
    std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let (code, out) = run(&["verify", p(&corpus("comp.dinat")), "--models", p(dir.path())]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("on two"), "{out}");
    assert!(!out.contains("on 2/a"), "{out}");
}

#[test]
fn corpus_default_is_green() {
    let (code, out) = run(&["corpus"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains(" 0 failed"), "{out}");
}

#[test]
fn corpus_with_corrupted_model_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("broken.model");
    let text = std::fs::read_to_string(fixture("two.model")).unwrap().replace("\"dst\": \"b\"", "\"dst\": \"q\"");
    std::fs::write(&bad, text).unwrap();
    let (code, out) = run(&["corpus", "--models", p(dir.path())]);
    assert_eq!(code, 4, "{out}");
    assert!(out.contains("broken.model"), "{out}");
}

#[test]
fn corpus_with_user_model_runs_it() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("two.model"), dir.path().join("two.model")).unwrap();
    let (code, out) = run(&["corpus", "--models", p(dir.path())]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("PASS comp sound on two"), "{out}");
}

#[test]
fn corpus_flipping_sym_to_positive_trips() {
    let mut entries = corpus_entries();
    let sym = entries.iter_mut().find(|e| e.name == "sym").expect("sym entry");
    sym.expectation = Expectation::Accept;
    let outcomes = run_corpus(&entries, &model_suite(), Exec::Sequential);
    assert!(outcomes.iter().any(|o| o.entry == "sym" && o.status == Status::Fail));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(dinat(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(dinat(&["check"]).status.code(), Some(64));
    assert_eq!(dinat(&["--help"]).status.code(), Some(0));
}
