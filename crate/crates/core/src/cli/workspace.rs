//! Loaded definitions plus query execution shared by commands and the REPL.

use serde_json::{json, Value};

use super::{ExitStatus, Limits, Outcome};
use crate::equiv::{
    bounded_equal, decide_equal_rational, finite_equiv, finite_equiv_bounded, prove_equal_symbolic, BoundedVerdict,
    EqualityVerdict, FinEquivVerdict, SymbolicVerdict,
};
use crate::error::EvalError;
use crate::eval::EvalSession;
use crate::expr::{DefinitionSet, StreamExpr};
use crate::model::{check_well_formed, WellFormedReport};
use crate::proof::linear::{DataPredicate, HereditaryCandidate};
use crate::proof::{
    forall_rational, prove_equal_by_recurrence, prove_forall, recurrence_of, symbolic_proof_object, ForallOutcome,
    ProofError, ProofObject,
};
use crate::syntax::{EqualMethod, ParseErrors, Query};
use crate::value::DataValue;

pub(crate) fn parse_error(e: &ParseErrors) -> Outcome {
    let mut o = Outcome::error(ExitStatus::Usage, "parse", e.to_string()).with_json_field("diagnostics", json!(e));
    o.text = e.to_string();
    o
}

pub(crate) fn eval_error(e: &EvalError) -> Outcome {
    let status = match e {
        EvalError::UnknownName(_) | EvalError::FreeVariable(_) | EvalError::ExpansionBelowBase { .. } => {
            ExitStatus::Usage
        }
        _ => ExitStatus::EvalError,
    };
    Outcome::error(status, "eval", e.to_string())
}

pub(crate) fn ill_formed(report: &WellFormedReport) -> Outcome {
    let lines: Vec<String> = report
        .violations
        .iter()
        .map(|v| format!("{}: condition {}: {}", v.definition, v.condition, v.message))
        .collect();
    Outcome::error(ExitStatus::Usage, "ill_formed", format!("definitions are not well-formed\n{}", lines.join("\n")))
        .with_json_field("violations", json!(report.violations))
}

pub(crate) fn report_outcome(report: &WellFormedReport, count: usize) -> Outcome {
    let text = if report.is_well_formed() {
        format!("well-formed: {}", plural(count, "definition"))
    } else {
        report
            .violations
            .iter()
            .map(|v| format!("{}: condition {}: {}", v.definition, v.condition, v.message))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let status = if report.is_well_formed() { ExitStatus::True } else { ExitStatus::False };
    Outcome::result(status, text, json!(report))
}

pub struct Workspace {
    sess: EvalSession,
    limits: Limits,
}

impl Workspace {
    pub fn new(defs: DefinitionSet, limits: Limits) -> Self {
        Self { sess: EvalSession::new(defs), limits }
    }

    pub fn defs(&self) -> &DefinitionSet {
        self.sess.defs()
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    /// Replaces the definitions when they are well-formed.
    pub fn replace_defs(&mut self, defs: DefinitionSet) -> Result<(), Outcome> {
        let report = check_well_formed(&defs);
        if !report.is_well_formed() {
            return Err(ill_formed(&report));
        }
        self.sess = EvalSession::new(defs);
        Ok(())
    }

    pub fn run(&mut self, q: &Query) -> (Outcome, Option<ProofObject>) {
        let res = match q {
            Query::Element { name, index } => self.element(name, *index).map(|o| (o, None)),
            Query::Expand { name, index } => self.expand(name, *index).map(|o| (o, None)),
            Query::Equal { left, right, method } => self.equal(left, right, *method).map(|o| (o, None)),
            Query::FinEquiv { left, right } => self.fequiv(left, right).map(|o| (o, None)),
            Query::Forall { predicate, stream, candidate } => self.forall(predicate, stream, candidate.as_ref()),
            Query::ProveEqual { left, right } => self.prove_equal(left, right),
        };
        res.unwrap_or_else(|e| (eval_error(&e), None))
    }

    fn element(&mut self, name: &str, index: u64) -> Result<Outcome, EvalError> {
        let v = self.sess.element(name, index)?;
        Ok(Outcome::result(
            ExitStatus::True,
            v.to_string(),
            json!({"name": name, "index": index, "value": v}),
        ))
    }

    fn expand(&mut self, name: &str, index: u64) -> Result<Outcome, EvalError> {
        let x = self.sess.expand(name, index)?;
        Ok(Outcome::result(ExitStatus::True, x.to_string(), json!(x)))
    }

    fn free_names(&self, es: &[&StreamExpr]) -> Vec<String> {
        es.iter()
            .flat_map(|e| e.names())
            .filter(|n| !self.defs().contains(n))
            .collect()
    }

    fn equal(&mut self, a: &StreamExpr, b: &StreamExpr, method: EqualMethod) -> Result<Outcome, EvalError> {
        let free = self.free_names(&[a, b]);
        let closed = free.is_empty();
        let method = match method {
            EqualMethod::Auto if !closed => EqualMethod::Symbolic,
            m => m,
        };
        if !closed && method != EqualMethod::Symbolic {
            return Err(EvalError::FreeVariable(free[0].clone()));
        }
        match method {
            EqualMethod::Bisim => self.bisim(a, b),
            EqualMethod::Symbolic => self.symbolic(a, b),
            EqualMethod::Bounded => self.bounded(a, b, "bounded"),
            EqualMethod::Recurrence => self.by_recurrence(a, b),
            EqualMethod::Auto => {
                let mut notes = Vec::new();
                for step in [Self::bisim, Self::by_recurrence, Self::symbolic] {
                    let o = step(self, a, b)?;
                    if o.status != ExitStatus::Unknown {
                        return Ok(o);
                    }
                    notes.push(o.text);
                }
                let o = self.bounded(a, b, "auto")?;
                Ok(o.with_json_field("attempts", json!(notes)))
            }
        }
    }

    fn bisim(&mut self, a: &StreamExpr, b: &StreamExpr) -> Result<Outcome, EvalError> {
        let v = decide_equal_rational(a, b, &mut self.sess, self.limits.max_states)?;
        let (status, text) = match &v {
            EqualityVerdict::Equal { witness } => {
                (ExitStatus::True, format!("equal (bisimulation of {})", plural(witness.len(), "state pair")))
            }
            EqualityVerdict::NotEqual { index, left, right } => {
                (ExitStatus::False, format!("not equal: element {index} is {left} vs {right}"))
            }
            EqualityVerdict::Unknown { reason } => (ExitStatus::Unknown, format!("unknown: {reason}")),
        };
        Ok(Outcome::result(status, text, tagged(json!(v), "bisim")))
    }

    fn symbolic(&mut self, a: &StreamExpr, b: &StreamExpr) -> Result<Outcome, EvalError> {
        let v = prove_equal_symbolic(a, b, &mut self.sess, self.limits.pair_cap)?;
        let (status, text) = match &v {
            SymbolicVerdict::Proved { pairs } => {
                (ExitStatus::True, format!("equal (circular coinduction, {})", plural(pairs.pairs.len(), "pair")))
            }
            SymbolicVerdict::Refuted { index, left, right } => {
                (ExitStatus::False, format!("not equal: element {index} is {left} vs {right}"))
            }
            SymbolicVerdict::Unknown { reason } => (ExitStatus::Unknown, format!("unknown: {reason}")),
        };
        Ok(Outcome::result(status, text, tagged(json!(v), "symbolic")))
    }

    fn bounded(&mut self, a: &StreamExpr, b: &StreamExpr, method: &str) -> Result<Outcome, EvalError> {
        let v = bounded_equal(a, b, self.limits.bound, &mut self.sess)?;
        let (status, text) = match &v {
            BoundedVerdict::EqualUpTo { bound } => {
                (ExitStatus::Unknown, format!("unknown: elements 0..={bound} agree (not a proof)"))
            }
            BoundedVerdict::NotEqual { index, left, right } => {
                (ExitStatus::False, format!("not equal: element {index} is {left} vs {right}"))
            }
        };
        Ok(Outcome::result(status, text, tagged(json!(v), method)))
    }

    fn by_recurrence(&mut self, a: &StreamExpr, b: &StreamExpr) -> Result<Outcome, EvalError> {
        let (Some(x), Some(y)) = (plain_name(a), plain_name(b)) else {
            let reason = "the recurrence method compares two names";
            return Ok(Outcome::result(
                ExitStatus::Unknown,
                format!("unknown: {reason}"),
                json!({"verdict": "unknown", "reason": reason, "method": "recurrence"}),
            ));
        };
        let mut attempt = prove_equal_by_recurrence(x, y, &mut self.sess);
        if attempt.is_err() {
            let swapped = prove_equal_by_recurrence(y, x, &mut self.sess);
            if swapped.is_ok() {
                attempt = swapped;
            }
        }
        match attempt {
            Ok(proof) => Ok(Outcome::result(
                ExitStatus::True,
                format!("equal (shared recurrence: {})", proof_recurrence(&proof)),
                json!({"verdict": "equal", "method": "recurrence", "proof": proof}),
            )),
            Err(ProofError::Eval(e)) => Err(e),
            Err(e) => Ok(Outcome::result(
                ExitStatus::Unknown,
                format!("unknown: {e}"),
                json!({"verdict": "unknown", "reason": e.to_string(), "method": "recurrence"}),
            )),
        }
    }

    fn fequiv(&mut self, a: &StreamExpr, b: &StreamExpr) -> Result<Outcome, EvalError> {
        let mut v = finite_equiv(a, b, &mut self.sess, self.limits.max_states)?;
        if matches!(v, FinEquivVerdict::Unknown { .. }) {
            v = finite_equiv_bounded(a, b, self.limits.bound, &mut self.sess)?;
        }
        let (status, text) = match &v {
            FinEquivVerdict::Equivalent { bijection } => {
                let pairs: Vec<String> = bijection.pairs.iter().map(|(x, y)| format!("{x} <-> {y}")).collect();
                (ExitStatus::True, format!("finitely equivalent via {{{}}}", pairs.join(", ")))
            }
            FinEquivVerdict::ConsistentUpTo { bound } => (
                ExitStatus::Unknown,
                format!("unknown: a bijection is consistent with elements 0..={bound} (not a proof)"),
            ),
            FinEquivVerdict::NotEquivalent { index, left, right, reason } => (
                ExitStatus::False,
                format!("not finitely equivalent: at element {index} ({left} vs {right}) {reason}"),
            ),
            FinEquivVerdict::Unknown { reason } => (ExitStatus::Unknown, format!("unknown: {reason}")),
        };
        Ok(Outcome::result(status, text, json!(v)))
    }

    fn forall(
        &mut self,
        p: &DataPredicate,
        stream: &StreamExpr,
        h: Option<&HereditaryCandidate>,
    ) -> Result<(Outcome, Option<ProofObject>), EvalError> {
        let mut failures = Vec::new();
        if let Some(h) = h {
            let Some((name, offset)) = name_and_offset(stream) else {
                let o = Outcome::error(ExitStatus::Usage, "usage", "a window proof needs a stream of the form `s(n)` or `s^k(n)`");
                return Ok((o, None));
            };
            match prove_forall(p, name, h, offset, &mut self.sess) {
                Ok(proof) => return Ok(proved(proof)),
                Err(ProofError::Eval(e)) => return Err(e),
                Err(e) => failures.push(e.to_string()),
            }
        } else {
            match forall_rational(p, stream, &mut self.sess, self.limits.max_states) {
                Ok(ForallOutcome::Proved(proof)) => return Ok(proved(proof)),
                Ok(ForallOutcome::Counterexample { index, value }) => return Ok((counterexample(index, &value, &[]), None)),
                Ok(ForallOutcome::Unknown { reason }) => failures.push(reason),
                Err(ProofError::Eval(e)) => return Err(e),
                Err(e) => failures.push(e.to_string()),
            }
            // Try H = p on every position of a window as wide as the recurrence.
            if let Some((name, offset)) = name_and_offset(stream) {
                if let Some(rec) = recurrence_of(name, self.defs()) {
                    let cs = (0..rec.order()).flat_map(|k| p.at(k)).collect();
                    if let Ok(h) = HereditaryCandidate::new(rec.order(), cs) {
                        match prove_forall(p, name, &h, offset, &mut self.sess) {
                            Ok(proof) => return Ok(proved(proof)),
                            Err(ProofError::Eval(e)) => return Err(e),
                            Err(e) => failures.push(format!("with {h}: {e}")),
                        }
                    }
                }
            }
        }
        for index in 0..=self.limits.bound {
            let v = self.sess.value_at(stream, index)?;
            let Some(r) = v.as_rational() else {
                let o = Outcome::error(ExitStatus::EvalError, "eval", format!("element {index} is {v}, which is not a number"));
                return Ok((o, None));
            };
            if !p.holds(&r) {
                return Ok((counterexample(index, &v, &failures), None));
            }
        }
        let text = format!(
            "unknown: {}; elements 0..={} satisfy the predicate",
            failures.join("; "),
            self.limits.bound
        );
        let j = json!({"verdict": "unknown", "reasons": failures, "checked_up_to": self.limits.bound});
        Ok((Outcome::result(ExitStatus::Unknown, text, j), None))
    }

    fn prove_equal(&mut self, a: &StreamExpr, b: &StreamExpr) -> Result<(Outcome, Option<ProofObject>), EvalError> {
        let mut failures = Vec::new();
        if let (Some(x), Some(y)) = (plain_name(a), plain_name(b)) {
            for (l, r) in [(x, y), (y, x)] {
                match prove_equal_by_recurrence(l, r, &mut self.sess) {
                    Ok(proof) => return Ok(proved(proof)),
                    Err(ProofError::Eval(e)) => return Err(e),
                    Err(e) => failures.push(e.to_string()),
                }
            }
        }
        match prove_equal_symbolic(a, b, &mut self.sess, self.limits.pair_cap)? {
            SymbolicVerdict::Proved { pairs } => {
                return Ok(proved(symbolic_proof_object(a, b, &pairs, self.defs())));
            }
            SymbolicVerdict::Refuted { index, left, right } => {
                let text = format!("not equal: element {index} is {left} vs {right}");
                let j = json!({"verdict": "not_equal", "index": index, "left": left, "right": right});
                return Ok((Outcome::result(ExitStatus::False, text, j), None));
            }
            SymbolicVerdict::Unknown { reason } => failures.push(reason),
        }
        if self.free_names(&[a, b]).is_empty() {
            if let BoundedVerdict::NotEqual { index, left, right } = bounded_equal(a, b, self.limits.bound, &mut self.sess)? {
                let text = format!("not equal: element {index} is {left} vs {right}");
                let j = json!({"verdict": "not_equal", "index": index, "left": left, "right": right});
                return Ok((Outcome::result(ExitStatus::False, text, j), None));
            }
        }
        let text = format!("unknown: {}", failures.join("; "));
        Ok((Outcome::result(ExitStatus::Unknown, text, json!({"verdict": "unknown", "reasons": failures})), None))
    }
}

fn plural(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

fn tagged(mut v: Value, method: &str) -> Value {
    v["method"] = json!(method);
    v
}

fn proved(proof: ProofObject) -> (Outcome, Option<ProofObject>) {
    let text = format!("proved: {}", proof.claim());
    let j = json!({"verdict": "proved", "claim": proof.claim(), "proof": proof});
    (Outcome::result(ExitStatus::True, text, j), Some(proof))
}

fn counterexample(index: u64, value: &DataValue, notes: &[String]) -> Outcome {
    Outcome::result(
        ExitStatus::False,
        format!("counterexample: element {index} is {value}"),
        json!({"verdict": "counterexample", "index": index, "value": value, "notes": notes}),
    )
}

fn proof_recurrence(p: &ProofObject) -> String {
    match p {
        ProofObject::RecurrenceEqual { recurrence, .. } => recurrence.to_string(),
        _ => String::new(),
    }
}

fn plain_name(e: &StreamExpr) -> Option<&str> {
    name_and_offset(e).filter(|(_, k)| *k == 0).map(|(n, _)| n)
}

fn name_and_offset(e: &StreamExpr) -> Option<(&str, u64)> {
    match e {
        StreamExpr::NameTail(n, k) => Some((n, *k)),
        _ => None,
    }
}
