use serde::Serialize;

use super::{CorpusEntry, Expectation};
use crate::finsem::{eval_derivation, families_equal, EvalError, Evaluator, Model};
use crate::kernel::{check_derivation, check_eq_judgement, EqJudgement};
use crate::par::Exec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Not applicable to the model, or over the enumeration bound.
    Skip,
}

/// One property of one entry, on one model or (`-`) on none.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Outcome {
    pub entry: String,
    pub property: String,
    pub model: String,
    pub status: Status,
    pub detail: String,
}

impl Outcome {
    fn new(entry: &str, property: &str, model: &str, status: Status, detail: impl Into<String>) -> Outcome {
        Outcome {
            entry: entry.to_string(),
            property: property.to_string(),
            model: model.to_string(),
            status,
            detail: detail.into(),
        }
    }
}

enum Task<'a> {
    Check(&'a CorpusEntry),
    Eval(&'a CorpusEntry, &'a Model),
    Obligation(&'a CorpusEntry, usize, Option<&'a Model>),
}

fn eval_status(r: Result<String, EvalError>) -> (Status, String) {
    match r {
        Ok(d) => (Status::Pass, d),
        Err(e @ EvalError::BoundExceeded { .. }) => (Status::Skip, e.to_string()),
        Err(e) => (Status::Fail, e.to_string()),
    }
}

fn run_task(t: &Task) -> Outcome {
    match t {
        Task::Check(e) => {
            let (status, detail) = match (&e.expectation, check_derivation(&e.derivation, &e.sig)) {
                (Expectation::Accept, Ok(s)) if s.alpha_equal(&e.expected) => (Status::Pass, s.to_string()),
                (Expectation::Accept, Ok(s)) => (Status::Fail, format!("concludes {s}, expected {}", e.expected)),
                (Expectation::Accept, Err(err)) => (Status::Fail, err.to_string()),
                (Expectation::Reject(c), Err(err)) if err.class() == c => (Status::Pass, format!("rejected: {err}")),
                (Expectation::Reject(c), Err(err)) => (Status::Fail, format!("expected {c}, got {err}")),
                (Expectation::Reject(c), Ok(s)) => (Status::Fail, format!("expected {c}, but checks as {s}")),
            };
            Outcome::new(&e.name, "check", "-", status, detail)
        }
        Task::Eval(e, m) => {
            if let Err(err) = m.check_signature(&e.sig) {
                return Outcome::new(&e.name, "sound", &m.name, Status::Skip, err.to_string());
            }
            if let Err(err) = check_derivation(&e.derivation, &e.sig) {
                return Outcome::new(&e.name, "sound", &m.name, Status::Skip, format!("does not check: {err}"));
            }
            let ev = Evaluator::new(m);
            let (status, detail) = eval_status(eval_derivation(&ev, &e.derivation).map(|f| format!("{} rows", f.size())));
            Outcome::new(&e.name, "sound", &m.name, status, detail)
        }
        Task::Obligation(e, i, None) => {
            let o = &e.obligations[*i];
            let j = EqJudgement { lhs: o.lhs.clone(), rhs: o.rhs.clone() };
            let (status, detail) = match check_eq_judgement(&j, &o.strategy, &e.sig) {
                Ok(rest) if rest.is_empty() => (Status::Pass, "discharged".to_string()),
                Ok(rest) => (Status::Fail, format!("{} residual equations", rest.len())),
                Err(err) => (Status::Fail, err.to_string()),
            };
            Outcome::new(&e.name, &o.name, "-", status, detail)
        }
        Task::Obligation(e, i, Some(m)) => {
            let o = &e.obligations[*i];
            if let Err(err) = m.check_signature(&e.sig) {
                return Outcome::new(&e.name, &o.name, &m.name, Status::Skip, err.to_string());
            }
            if let Err(err) = check_derivation(&o.lhs, &e.sig).and_then(|_| check_derivation(&o.rhs, &e.sig)) {
                return Outcome::new(&e.name, &o.name, &m.name, Status::Skip, format!("does not check: {err}"));
            }
            let ev = Evaluator::new(m);
            let r = eval_derivation(&ev, &o.lhs).and_then(|l| {
                let r = eval_derivation(&ev, &o.rhs)?;
                families_equal(&l, &r)
            });
            let (status, detail) = match eval_status(r.map(|eq| eq.to_string())) {
                (Status::Pass, d) if d == "false" => (Status::Fail, "sides differ extensionally".to_string()),
                (Status::Pass, _) => (Status::Pass, "equal".to_string()),
                other => other,
            };
            Outcome::new(&e.name, &o.name, &m.name, status, detail)
        }
    }
}

/// Checks every entry, evaluates positive ones on every model and discharges
/// their obligations both syntactically and extensionally. Sorted by
/// (entry, property, model).
pub fn run_corpus(entries: &[CorpusEntry], models: &[Model], exec: Exec) -> Vec<Outcome> {
    let mut tasks = Vec::new();
    for e in entries {
        tasks.push(Task::Check(e));
        if !e.is_positive() {
            continue;
        }
        for i in 0..e.obligations.len() {
            tasks.push(Task::Obligation(e, i, None));
            tasks.extend(models.iter().map(|m| Task::Obligation(e, i, Some(m))));
        }
        tasks.extend(models.iter().map(|m| Task::Eval(e, m)));
    }
    let mut out = exec.map(&tasks, run_task);
    out.sort();
    out
}
