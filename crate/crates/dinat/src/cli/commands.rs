//! The subcommands behind the `dinat` binary. Each writes its report to
//! `out` and returns the process exit code.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value as Json};

use super::modelfile::parse_model;
use super::{parse_derivation, DerivationFile, ParseError};
use crate::corpus::{corpus_entries, model_suite, run_corpus, Outcome, Status};
use crate::finsem::apply::eval_unchecked;
use crate::finsem::props::{
    coend_round_trips, dinat_as_end, end_round_trips, inverse_pair, j_computation, j_round_trips, PropReport,
};
use crate::finsem::random::random_composition_search;
use crate::finsem::{check_dinatural, eval_derivation, families_equal, EvalError, Evaluator, Holes, Model};
use crate::kernel::{check_derivation, check_eq_judgement, j_premise, EqJudgement};
use crate::par::Exec;
use crate::syntax::{Formula, Sequent};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_CHECK: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_MODEL: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

/// Random models drawn by `verify --seed`.
pub const SEARCH_MODELS: usize = 200;

/// Set bound for the composition search; `--max-size` only lowers it.
pub const SEARCH_LIMIT: usize = 2000;

#[derive(Clone, Copy, Debug)]
pub struct Options {
    /// Line-delimited JSON records instead of text.
    pub json: bool,
    pub exec: Exec,
    /// Bound on materialized sets.
    pub max_size: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { json: false, exec: Exec::default(), max_size: crate::finsem::max_set_size() }
    }
}

/// Writes either the text line or the JSON record of each report item.
struct Report<'w> {
    json: bool,
    out: &'w mut dyn Write,
}

impl Report<'_> {
    fn emit(&mut self, text: impl AsRef<str>, record: Json) -> io::Result<()> {
        if self.json {
            writeln!(self.out, "{record}")
        } else {
            writeln!(self.out, "{}", text.as_ref())
        }
    }

    fn error(&mut self, class: &str, text: impl Into<String>, mut record: Json) -> io::Result<()> {
        let text = text.into();
        record["kind"] = json!("error");
        record["class"] = json!(class);
        record["message"] = json!(text);
        self.emit(format!("error: {text}"), record)
    }
}

struct Failure(i32);

type Step<T> = Result<T, Failure>;

fn read(r: &mut Report, path: &Path) -> io::Result<Step<String>> {
    match std::fs::read_to_string(path) {
        Ok(t) => Ok(Ok(t)),
        Err(e) => {
            r.error("io", format!("cannot read {}: {e}", path.display()), json!({ "path": path.display().to_string() }))?;
            Ok(Err(Failure(EXIT_IO)))
        }
    }
}

fn load_derivations(r: &mut Report, path: &Path) -> io::Result<Step<DerivationFile>> {
    let text = match read(r, path)? {
        Ok(t) => t,
        Err(f) => return Ok(Err(f)),
    };
    match parse_derivation(&text) {
        Ok(f) => Ok(Ok(f)),
        Err(e) => {
            let (line, col) = e.position();
            let mut rec = json!({ "path": path.display().to_string(), "line": line, "col": col });
            if let ParseError::Unexpected { expected, .. } = &e {
                rec["expected"] = json!(expected);
            }
            r.error("parse", format!("{}:{e}", path.display()), rec)?;
            Ok(Err(Failure(EXIT_PARSE)))
        }
    }
}

fn load_model_file(r: &mut Report, path: &Path) -> io::Result<Step<Model>> {
    let text = match read(r, path)? {
        Ok(t) => t,
        Err(f) => return Ok(Err(f)),
    };
    match parse_model(&text) {
        Ok(mut m) => {
            if m.name.is_empty() {
                m.name = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            }
            Ok(Ok(m))
        }
        Err(e) => {
            let p = path.display().to_string();
            r.error("model", format!("model {p}: {e}"), json!({ "path": p }))?;
            Ok(Err(Failure(EXIT_MODEL)))
        }
    }
}

/// Model files (`*.model`, `*.json`) of a directory, in name order.
fn load_model_dir(r: &mut Report, dir: &Path) -> io::Result<Step<Vec<Model>>> {
    let entries = match std::fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) => {
            r.error("io", format!("cannot read {}: {e}", dir.display()), json!({ "path": dir.display().to_string() }))?;
            return Ok(Err(Failure(EXIT_IO)));
        }
    };
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "model" || x == "json"))
        .collect();
    paths.sort();
    let mut models = Vec::new();
    for p in paths {
        match load_model_file(r, &p)? {
            Ok(m) => models.push(m),
            Err(f) => return Ok(Err(f)),
        }
    }
    Ok(Ok(models))
}

macro_rules! step {
    ($e:expr) => {
        match $e? {
            Ok(v) => v,
            Err(Failure(code)) => return Ok(code),
        }
    };
}

/// Checks every derivation of the file and reduces its obligations.
pub fn cmd_check(path: &Path, opts: &Options, out: &mut dyn Write) -> io::Result<i32> {
    let mut r = Report { json: opts.json, out };
    let file = step!(load_derivations(&mut r, path));
    let check = check_file(&mut r, &file)?;
    let failed = check.iter().filter(|c| !**c).count();
    r.emit(
        format!("{} derivations, {} obligations, {failed} failed", file.derivations.len(), file.obligations.len()),
        json!({ "kind": "summary", "derivations": file.derivations.len(), "obligations": file.obligations.len(), "failed": failed }),
    )?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_CHECK })
}

/// Reports each derivation and obligation; `true` per item that checks.
fn check_file(r: &mut Report, file: &DerivationFile) -> io::Result<Vec<bool>> {
    let mut res = Vec::new();
    for d in &file.derivations {
        match check_derivation(&d.deriv, &file.sig) {
            Ok(s) => {
                r.emit(format!("ok   {}: {s}", d.name), json!({ "kind": "check", "name": d.name, "status": "pass", "conclusion": s.to_string() }))?;
                res.push(true);
            }
            Err(e) => {
                r.emit(
                    format!("FAIL {} [{}]: {e}", d.name, e.class()),
                    json!({ "kind": "check", "name": d.name, "status": "fail", "class": e.class(), "node": e.node(), "message": e.to_string() }),
                )?;
                res.push(false);
            }
        }
    }
    for o in &file.obligations {
        let j = EqJudgement { lhs: o.lhs.clone(), rhs: o.rhs.clone() };
        match check_eq_judgement(&j, &o.strategy, &file.sig) {
            Ok(rest) if rest.is_empty() => {
                r.emit(format!("ok   {}: discharged", o.name), json!({ "kind": "obligation", "name": o.name, "status": "pass", "residual": 0 }))?;
                res.push(true);
            }
            Ok(rest) => {
                r.emit(
                    format!("open {}: {} equations left for extensional checking", o.name, rest.len()),
                    json!({ "kind": "obligation", "name": o.name, "status": "open", "residual": rest.len() }),
                )?;
                res.push(true);
            }
            Err(e) => {
                r.emit(
                    format!("FAIL {} [{}]: {e}", o.name, e.class()),
                    json!({ "kind": "obligation", "name": o.name, "status": "fail", "class": e.class(), "message": e.to_string() }),
                )?;
                res.push(false);
            }
        }
    }
    Ok(res)
}

fn eval_error_code(e: &EvalError) -> i32 {
    match e {
        EvalError::Model(_) | EvalError::BoundExceeded { .. } => EXIT_MODEL,
        _ => EXIT_CHECK,
    }
}

/// Prints the function table of every derivation on one model, optionally
/// at one point given as object names, and checks dinaturality.
pub fn cmd_eval(path: &Path, model: &Path, at: Option<&[String]>, opts: &Options, out: &mut dyn Write) -> io::Result<i32> {
    let mut r = Report { json: opts.json, out };
    let file = step!(load_derivations(&mut r, path));
    let m = step!(load_model_file(&mut r, model));
    if let Err(e) = m.check_signature(&file.sig) {
        r.error("model", format!("model {}: {e}", m.name), json!({ "model": m.name }))?;
        return Ok(EXIT_MODEL);
    }
    let ev = Evaluator::with_limit(&m, opts.max_size);
    let mut code = EXIT_OK;
    for d in &file.derivations {
        if d.reject.is_some() {
            r.emit(format!("skip {}: negative example", d.name), json!({ "kind": "skip", "derivation": d.name }))?;
            continue;
        }
        let s = match check_derivation(&d.deriv, &file.sig) {
            Ok(s) => s,
            Err(e) => {
                r.emit(format!("FAIL {} [{}]: {e}", d.name, e.class()), json!({ "kind": "check", "name": d.name, "status": "fail", "class": e.class(), "message": e.to_string() }))?;
                code = code.max(EXIT_CHECK);
                continue;
            }
        };
        let fam = match eval_unchecked(&ev, &d.deriv, &Holes::new()) {
            Ok(f) => f,
            Err(e) => {
                r.error("eval", format!("{}: {e}", d.name), json!({ "derivation": d.name }))?;
                code = code.max(eval_error_code(&e));
                continue;
            }
        };
        let objs: Vec<Vec<String>> = match s.ctx.iter().map(|(_, t)| ev.sem(t).map(|c| c.cat.objects.clone())).collect() {
            Ok(o) => o,
            Err(e) => {
                r.error("eval", format!("{}: {e}", d.name), json!({ "derivation": d.name }))?;
                code = code.max(EXIT_MODEL);
                continue;
            }
        };
        let wanted = match at {
            None => None,
            Some(names) if names.len() == s.ctx.len() => {
                let idx: Option<Vec<usize>> =
                    names.iter().zip(&objs).map(|(n, os)| os.iter().position(|o| o == n.trim())).collect();
                match idx {
                    Some(p) => Some(p),
                    None => {
                        r.error("usage", format!("--at {}: unknown object", names.join(",")), json!({}))?;
                        return Ok(EXIT_USAGE);
                    }
                }
            }
            Some(names) => {
                r.error("usage", format!("--at needs {} objects for {}, got {}", s.ctx.len(), d.name, names.len()), json!({}))?;
                return Ok(EXIT_USAGE);
            }
        };
        r.emit(format!("derivation {}: {s}", d.name), json!({ "kind": "derivation", "name": d.name, "conclusion": s.to_string() }))?;
        for (p, row) in &fam.table {
            if wanted.as_ref().is_some_and(|w| w != p) {
                continue;
            }
            let names: Vec<String> = p.iter().zip(&objs).map(|(&o, os)| os[o].clone()).collect();
            r.emit(format!("  at ({})", names.join(", ")), json!({ "kind": "point", "derivation": d.name, "point": names }))?;
            let env = match ev.diagonal(&s.ctx, p) {
                Ok(e) => e,
                Err(e) => {
                    r.error("eval", e.to_string(), json!({}))?;
                    return Ok(EXIT_MODEL);
                }
            };
            for (inputs, output) in row {
                let shown: Result<Vec<String>, EvalError> =
                    s.hyps.iter().zip(inputs).map(|((_, f), v)| ev.render(f, &env, v)).collect();
                let (ins, outp) = match (shown, ev.render(&s.goal, &env, output)) {
                    (Ok(i), Ok(o)) => (i, o),
                    (Err(e), _) | (_, Err(e)) => {
                        r.error("eval", e.to_string(), json!({}))?;
                        return Ok(EXIT_MODEL);
                    }
                };
                r.emit(
                    format!("    ({}) |-> {outp}", ins.join(", ")),
                    json!({ "kind": "row", "derivation": d.name, "point": names, "inputs": ins, "output": outp }),
                )?;
            }
        }
        match check_dinatural(&ev, &fam) {
            Ok(None) => r.emit("  dinaturality: PASS", json!({ "kind": "dinaturality", "derivation": d.name, "status": "pass" }))?,
            Ok(Some(w)) => {
                r.emit(format!("  dinaturality: FAIL {w}"), json!({ "kind": "dinaturality", "derivation": d.name, "status": "fail", "witness": w }))?;
                code = code.max(EXIT_CHECK);
            }
            Err(e) => {
                r.error("eval", format!("{}: {e}", d.name), json!({ "derivation": d.name }))?;
                code = code.max(eval_error_code(&e));
            }
        }
    }
    Ok(code)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct VerifyRow {
    pub derivation: String,
    pub property: String,
    pub model: String,
    pub status: Status,
    pub instances: usize,
    pub detail: String,
}

fn row_of(d: &str, prop: &str, model: &str, r: Result<PropReport, EvalError>) -> VerifyRow {
    let (status, instances, detail) = match r {
        Ok(rep) if rep.passed() => (Status::Pass, rep.instances, String::new()),
        Ok(rep) => (Status::Fail, rep.instances, rep.failures.join("; ")),
        Err(e @ EvalError::BoundExceeded { .. }) => (Status::Skip, 0, format!("bound exceeded: {e}")),
        Err(e) => (Status::Fail, 0, e.to_string()),
    };
    VerifyRow { derivation: d.into(), property: prop.into(), model: model.into(), status, instances, detail }
}

fn single(ok: bool, what: &str) -> PropReport {
    PropReport { instances: 1, failures: if ok { vec![] } else { vec![what.to_string()] } }
}

/// Whether `b` is `a` read backwards: one hypothesis each, same context,
/// hypothesis and goal exchanged.
fn is_inverse(a: &Sequent, b: &Sequent) -> bool {
    match (a.hyps.as_slice(), b.hyps.as_slice()) {
        ([(_, ha)], [(_, hb)]) => a.ctx == b.ctx && ha.alpha_equal(&b.goal) && hb.alpha_equal(&a.goal),
        _ => false,
    }
}

/// Every applicable property of one derivation on one model.
fn verify_one(file: &DerivationFile, concls: &[Sequent], di: usize, m: &Model, opts: &Options, enumerate: bool) -> Vec<VerifyRow> {
    let d = &file.derivations[di];
    let s = &concls[di];
    let ev = Evaluator::with_limit(m, opts.max_size);
    let mut rows = Vec::new();
    let mut push = |prop: &str, r| rows.push(row_of(&d.name, prop, &m.name, r));
    let fam = eval_derivation(&ev, &d.deriv);
    push("sound", fam.as_ref().map(|_| single(true, "")).map_err(Clone::clone));
    for o in file.obligations.iter().filter(|o| o.target == d.name) {
        if let Err(e) = check_derivation(&o.lhs, &file.sig).and_then(|_| check_derivation(&o.rhs, &file.sig)) {
            push(&format!("obligation:{}", o.name), Ok(single(false, &format!("a side does not check: {e}"))));
            continue;
        }
        let r = eval_derivation(&ev, &o.lhs)
            .and_then(|l| Ok((l, eval_derivation(&ev, &o.rhs)?)))
            .and_then(|(l, rr)| families_equal(&l, &rr))
            .map(|eq| single(eq, "sides differ extensionally"));
        push(&format!("obligation:{}", o.name), r);
    }
    for (dj, other) in file.derivations.iter().enumerate() {
        if dj != di && other.reject.is_none() && is_inverse(s, &concls[dj]) {
            let r = fam.clone().and_then(|f| inverse_pair(&ev, &f, &eval_derivation(&ev, &other.deriv)?));
            push(&format!("inverse:{}", other.name), r);
        }
    }
    if enumerate {
        for (l, _) in &s.hyps {
            if j_premise(s, l).is_ok() {
                push(&format!("j-round-trip:{l}"), j_round_trips(&ev, s, l));
                push(&format!("j-computation:{l}"), j_computation(&ev, s, l));
            }
        }
        if matches!(s.goal, Formula::End(..)) {
            push("end-round-trip", end_round_trips(&ev, s));
        }
        if matches!(s.hyps.as_slice(), [(_, Formula::Coend(..))]) {
            push("coend-round-trip", coend_round_trips(&ev, s));
        }
        push("dinat-as-end", dinat_as_end(&ev, s));
    }
    rows
}

/// Runs the applicable properties of every derivation across models; with
/// a seed, also the composition search over random models.
pub fn cmd_verify(
    path: &Path,
    models: Option<&Path>,
    seed: Option<u64>,
    enumerate: bool,
    opts: &Options,
    out: &mut dyn Write,
) -> io::Result<i32> {
    let mut r = Report { json: opts.json, out };
    let file = step!(load_derivations(&mut r, path));
    let models = match models {
        Some(dir) => step!(load_model_dir(&mut r, dir)),
        None => model_suite(),
    };
    let mut concls = Vec::new();
    let mut failed = 0;
    for d in &file.derivations {
        match check_derivation(&d.deriv, &file.sig) {
            Ok(s) => concls.push(s),
            Err(e) if d.reject.as_deref() == Some(e.class()) => concls.push(d.deriv.concl.clone()),
            Err(e) => {
                r.emit(format!("FAIL {} [{}]: {e}", d.name, e.class()), json!({ "kind": "check", "name": d.name, "status": "fail", "class": e.class(), "message": e.to_string() }))?;
                failed += 1;
                concls.push(d.deriv.concl.clone());
            }
        }
    }
    if failed > 0 {
        return Ok(EXIT_CHECK);
    }
    let mut tasks = Vec::new();
    for (di, d) in file.derivations.iter().enumerate() {
        if d.reject.is_some() {
            continue;
        }
        for m in &models {
            tasks.push((di, m));
        }
    }
    let mut rows: Vec<VerifyRow> = opts
        .exec
        .map(&tasks, |(di, m)| {
            if let Err(e) = m.check_signature(&file.sig) {
                let d = &file.derivations[*di].name;
                return vec![VerifyRow { derivation: d.clone(), property: "sound".into(), model: m.name.clone(), status: Status::Skip, instances: 0, detail: e.to_string() }];
            }
            verify_one(&file, &concls, *di, m, opts, enumerate)
        })
        .into_iter()
        .flatten()
        .collect();
    for o in &file.obligations {
        let j = EqJudgement { lhs: o.lhs.clone(), rhs: o.rhs.clone() };
        let rep = match check_eq_judgement(&j, &o.strategy, &file.sig) {
            Ok(rest) => single(rest.is_empty(), "residual equations remain"),
            Err(e) => single(false, &e.to_string()),
        };
        rows.push(row_of(&o.target, &format!("obligation:{}", o.name), "-", Ok(rep)));
    }
    if let Some(seed) = seed {
        let r = random_composition_search(seed, SEARCH_MODELS, opts.max_size.min(SEARCH_LIMIT), opts.exec);
        let row = match r {
            Ok(sum) => VerifyRow {
                derivation: "-".into(),
                property: "composition-search".into(),
                model: format!("random/{seed}"),
                status: Status::Pass,
                instances: sum.tried,
                detail: match sum.first {
                    Some((m, w)) => format!("{} of {} models carry a witness; first on {}: {} -> {} -> {}", sum.with_witness, sum.tried, m.name, w.p, w.q, w.r),
                    None => format!("no witness in {} models", sum.tried),
                },
            },
            Err(e) => row_of("-", "composition-search", &format!("random/{seed}"), Err(e)),
        };
        rows.push(row);
    }
    rows.sort();
    for row in &rows {
        let tag = match row.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        let detail = if row.detail.is_empty() { String::new() } else { format!(": {}", row.detail) };
        let mut rec = serde_json::to_value(row).unwrap_or_default();
        rec["kind"] = json!("property");
        r.emit(format!("{tag} {} {} on {} ({} instances){detail}", row.derivation, row.property, row.model, row.instances), rec)?;
    }
    let count = |st: Status| rows.iter().filter(|x| x.status == st).count();
    let (pass, fail, skip) = (count(Status::Pass), count(Status::Fail), count(Status::Skip));
    if !opts.json {
        summary_table(&mut r, &rows)?;
    }
    r.emit(
        format!("{pass} passed, {fail} failed, {skip} skipped"),
        json!({ "kind": "summary", "passed": pass, "failed": fail, "skipped": skip }),
    )?;
    Ok(if fail == 0 { EXIT_OK } else { EXIT_CHECK })
}

/// Property x model grid: `P` pass, `F` fail, `S` skipped, `.` not run.
fn summary_table(r: &mut Report, rows: &[VerifyRow]) -> io::Result<()> {
    let mut models: Vec<&str> = rows.iter().map(|x| x.model.as_str()).collect();
    models.sort();
    models.dedup();
    let mut props: Vec<(String, String)> = rows.iter().map(|x| (x.derivation.clone(), x.property.clone())).collect();
    props.dedup();
    let label = |(d, p): &(String, String)| format!("{d} {p}");
    let width = props.iter().map(|k| label(k).len()).max().unwrap_or(0);
    writeln!(r.out)?;
    for (i, m) in models.iter().enumerate() {
        writeln!(r.out, "{:width$}  {}{m}", "", "| ".repeat(i))?;
    }
    for k in &props {
        let cells: Vec<&str> = models
            .iter()
            .map(|m| match rows.iter().find(|x| x.derivation == k.0 && x.property == k.1 && x.model == *m) {
                Some(x) if x.status == Status::Pass => "P",
                Some(x) if x.status == Status::Fail => "F",
                Some(_) => "S",
                None => ".",
            })
            .collect();
        writeln!(r.out, "{:width$}  {}", label(k), cells.join(" "))?;
    }
    writeln!(r.out)
}

/// Runs the shipped corpus on the model suite plus the models of `dir`.
pub fn cmd_corpus(dir: Option<&Path>, opts: &Options, out: &mut dyn Write) -> io::Result<i32> {
    let mut r = Report { json: opts.json, out };
    let mut models = model_suite();
    if let Some(dir) = dir {
        models.extend(step!(load_model_dir(&mut r, dir)));
    }
    let outcomes = run_corpus(&corpus_entries(), &models, opts.exec);
    report_outcomes(&mut r, &outcomes)
}

fn report_outcomes(r: &mut Report, outcomes: &[Outcome]) -> io::Result<i32> {
    for o in outcomes {
        let tag = match o.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        let mut rec = serde_json::to_value(o).unwrap_or_default();
        rec["kind"] = json!("corpus");
        r.emit(format!("{tag} {} {} on {}: {}", o.entry, o.property, o.model, o.detail), rec)?;
    }
    let failed = outcomes.iter().filter(|o| o.status == Status::Fail).count();
    let skipped = outcomes.iter().filter(|o| o.status == Status::Skip).count();
    r.emit(
        format!("{} checks, {failed} failed, {skipped} skipped", outcomes.len()),
        json!({ "kind": "summary", "checks": outcomes.len(), "failed": failed, "skipped": skipped }),
    )?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_CHECK })
}
