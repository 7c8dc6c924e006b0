//! Independent checking of proof objects.
//!
//! Every field that the prover computed is recomputed from the embedded
//! definitions and compared exactly, so an edited certificate is rejected.

use serde_json::Value;
use thiserror::Error;

use super::linear::{DataPredicate, HereditaryCandidate, LinearConstraint, LinearExpr};
use super::objects::{equal_claim, ProofObject};
use super::prover::{forall_rational, prove_equal_by_recurrence, prove_forall, ForallOutcome};
use crate::equiv::{is_instance, symbolic_value_at, DEFAULT_MAX_STATES};
use crate::eval::{normalize, tail, EvalSession};
use crate::expr::{DefinitionSet, StreamExpr};
use crate::model::check_well_formed;
use crate::syntax::{parse_definitions, parse_stream_expr, ParseOptions, SourceText};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("malformed proof object: {0}")]
    Malformed(String),
    #[error("embedded definitions are not well-formed: {0}")]
    IllFormed(String),
    #[error("field `{path}` does not match: expected {expected}, found {found}")]
    Mismatch { path: String, expected: String, found: String },
    #[error("proof does not check: {0}")]
    Rejected(String),
}

/// Checks a proof object, returning its claim on success.
pub fn verify(proof: &ProofObject) -> Result<String, VerifyError> {
    match proof {
        ProofObject::RationalForall { definitions, stream, predicate, states, .. } => {
            let mut sess = session(definitions)?;
            check_predicate(predicate)?;
            let e = expr(stream)?;
            let cap = states.len().clamp(1, DEFAULT_MAX_STATES);
            match forall_rational(predicate, &e, &mut sess, cap).map_err(rejected)? {
                ForallOutcome::Proved(expected) => compare(&expected, proof)?,
                ForallOutcome::Counterexample { index, value } => {
                    return Err(VerifyError::Rejected(format!("element {index} is {value}, which violates the predicate")))
                }
                ForallOutcome::Unknown { .. } => {
                    return Err(VerifyError::Rejected(format!("`{stream}` has more than {cap} states")))
                }
            }
        }
        ProofObject::HereditaryForall { definitions, stream, offset, predicate, candidate, .. } => {
            let mut sess = session(definitions)?;
            check_predicate(predicate)?;
            check_candidate(candidate)?;
            let expected = prove_forall(predicate, stream, candidate, *offset, &mut sess).map_err(rejected)?;
            compare(&expected, proof)?;
        }
        ProofObject::RecurrenceEqual { definitions, left, right, .. } => {
            let mut sess = session(definitions)?;
            let expected = prove_equal_by_recurrence(left, right, &mut sess).map_err(rejected)?;
            compare(&expected, proof)?;
        }
        ProofObject::SymbolicBisim { claim, definitions, left, right, pairs } => {
            let mut sess = session(definitions)?;
            expect_eq("claim", &equal_claim(left, right), claim)?;
            let pairs: Vec<(StreamExpr, StreamExpr)> = pairs
                .iter()
                .map(|p| Ok((expr(&p.left)?, expr(&p.right)?)))
                .collect::<Result<_, VerifyError>>()?;
            check_relation(&expr(left)?, &expr(right)?, &pairs, &mut sess)?;
        }
    }
    Ok(proof.claim().to_string())
}

fn rejected(e: impl std::fmt::Display) -> VerifyError {
    VerifyError::Rejected(e.to_string())
}

fn session(definitions: &str) -> Result<EvalSession, VerifyError> {
    let src = SourceText::new(definitions, "<proof>");
    let defs: DefinitionSet =
        parse_definitions(&src, ParseOptions::default()).map_err(|e| VerifyError::Malformed(e.to_string()))?;
    let report = check_well_formed(&defs);
    if let Some(v) = report.violations.first() {
        return Err(VerifyError::IllFormed(v.message.clone()));
    }
    Ok(EvalSession::new(defs))
}

fn expr(text: &str) -> Result<StreamExpr, VerifyError> {
    parse_stream_expr(text).map_err(|e| VerifyError::Malformed(format!("`{text}`: {e}")))
}

fn check_normalized(cs: &[LinearConstraint]) -> Result<(), VerifyError> {
    for c in cs {
        let n = LinearConstraint::new(LinearExpr { constant: c.constant.clone(), coeffs: c.coeffs.clone() }, c.relation);
        if n != *c {
            return Err(VerifyError::Malformed(format!("constraint `{c}` is not in normal form")));
        }
    }
    Ok(())
}

fn check_predicate(p: &DataPredicate) -> Result<(), VerifyError> {
    check_normalized(&p.constraints)?;
    DataPredicate::new(p.constraints.clone()).map(|_| ()).map_err(VerifyError::Malformed)
}

fn check_candidate(h: &HereditaryCandidate) -> Result<(), VerifyError> {
    check_normalized(&h.constraints)?;
    HereditaryCandidate::new(h.width, h.constraints.clone()).map(|_| ()).map_err(VerifyError::Malformed)
}

fn expect_eq(path: &str, expected: &str, found: &str) -> Result<(), VerifyError> {
    if expected == found {
        return Ok(());
    }
    Err(VerifyError::Mismatch { path: path.into(), expected: expected.into(), found: found.into() })
}

fn compare(expected: &ProofObject, found: &ProofObject) -> Result<(), VerifyError> {
    let a = serde_json::to_value(expected).expect("serializable");
    let b = serde_json::to_value(found).expect("serializable");
    match first_difference(&a, &b, String::new()) {
        None => Ok(()),
        Some((path, x, y)) => Err(VerifyError::Mismatch { path, expected: x, found: y }),
    }
}

fn first_difference(a: &Value, b: &Value, path: String) -> Option<(String, String, String)> {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            for (k, va) in x {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                match y.get(k) {
                    Some(vb) => {
                        if let Some(d) = first_difference(va, vb, p) {
                            return Some(d);
                        }
                    }
                    None => return Some((p, va.to_string(), "nothing".into())),
                }
            }
            y.keys()
                .find(|k| !x.contains_key(*k))
                .map(|k| (format!("{path}.{k}"), "nothing".into(), y[k].to_string()))
        }
        (Value::Array(x), Value::Array(y)) => {
            for (i, (va, vb)) in x.iter().zip(y).enumerate() {
                if let Some(d) = first_difference(va, vb, format!("{path}[{i}]")) {
                    return Some(d);
                }
            }
            (x.len() != y.len()).then(|| (format!("{path}.length"), x.len().to_string(), y.len().to_string()))
        }
        _ => (a != b).then(|| (path, a.to_string(), b.to_string())),
    }
}

/// The relation must start at the normalized claim, have symbolically equal
/// heads, and be closed under tails up to renaming.
fn check_relation(
    left: &StreamExpr,
    right: &StreamExpr,
    pairs: &[(StreamExpr, StreamExpr)],
    sess: &mut EvalSession,
) -> Result<(), VerifyError> {
    let start = (normalize(left, sess.defs()), normalize(right, sess.defs()));
    let closed = |p: &(StreamExpr, StreamExpr), defs: &DefinitionSet| {
        p.0 == p.1 || pairs.iter().any(|q| is_instance(p, q, defs))
    };
    if !closed(&start, sess.defs()) {
        return Err(VerifyError::Rejected(format!("the relation does not contain ({}, {})", start.0, start.1)));
    }
    for (i, p) in pairs.iter().enumerate() {
        let normal = (normalize(&p.0, sess.defs()), normalize(&p.1, sess.defs()));
        if normal != *p {
            return Err(VerifyError::Malformed(format!("pair {i} is not in normal form")));
        }
        let hl = symbolic_value_at(&p.0, 0, sess).map_err(rejected)?;
        let hr = symbolic_value_at(&p.1, 0, sess).map_err(rejected)?;
        if hl != hr || hl.is_stuck() {
            return Err(VerifyError::Rejected(format!("pair {i} has heads {hl} and {hr}")));
        }
        let next = (normalize(&tail(&p.0), sess.defs()), normalize(&tail(&p.1), sess.defs()));
        if !closed(&next, sess.defs()) {
            return Err(VerifyError::Rejected(format!("the tails of pair {i} ({}, {}) are not covered", next.0, next.1)));
        }
    }
    Ok(())
}
