//! Proof search: rational streams, hereditary window predicates over
//! recurrences, equality by shared recurrence, and plain induction.

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::linear::{DataPredicate, HereditaryCandidate, LinearConstraint, Relation};
use super::objects::{equal_claim, forall_claim, Entailment, EqualityWitness, ProofObject, RationalState};
use super::poly::Polynomial;
use super::recurrence::{polynomial_stream, recurrence_of, step_residual, LinearRecurrence};
use crate::equiv::{state_graph, SymbolicProof};
use crate::error::EvalError;
use crate::eval::EvalSession;
use crate::expr::{DefinitionSet, StreamExpr};
use crate::syntax::{parse_definitions, ParseOptions, SourceText};
use crate::value::DataValue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("`{0}` is not defined by a linear recurrence")]
    NoRecurrence(String),
    #[error("window width {width} is smaller than the recurrence order {order}")]
    WidthMismatch { width: usize, order: usize },
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("base window {values:?} of `{stream}` at offset {offset} violates H")]
    BaseWindow { stream: String, offset: u64, values: Vec<String> },
    #[error("H is not hereditary: {failing}")]
    NotHereditary { failing: Box<Entailment> },
    #[error("element {index} is {value}, which is not a number")]
    NonNumeric { index: u64, value: String },
    #[error("base mismatch at index {index}: {left} vs {right}")]
    BaseMismatch { index: u64, left: String, right: String },
    #[error("step mismatch: residual polynomial {residual} is not zero")]
    StepMismatch { residual: Polynomial },
    #[error("missing premise: {0}")]
    MissingPremise(&'static str),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Result of a `forall` decision on a rational stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForallOutcome {
    Proved(ProofObject),
    Counterexample { index: u64, value: DataValue },
    Unknown { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeredityCheck {
    pub hereditary: bool,
    pub transcript: Vec<Entailment>,
}

fn numeric(index: u64, v: &DataValue) -> Result<BigRational, ProofError> {
    v.as_rational().ok_or_else(|| ProofError::NonNumeric { index, value: v.to_string() })
}

/// `w_width = a1*w_{width-1} + ... + ar*w_{width-r} + q`.
pub fn step_constraint(width: usize, rec: &LinearRecurrence, q: &BigRational) -> LinearConstraint {
    let mut coeffs = vec![BigRational::zero(); width + 1];
    coeffs[width] = BigRational::one();
    for (i, a) in rec.coeffs.iter().enumerate() {
        coeffs[width - 1 - i] -= a;
    }
    LinearConstraint::new(super::linear::LinearExpr { constant: -q, coeffs }, Relation::Eq)
}

/// The entailments establishing that `h` is `p`-hereditary for `rec`:
/// `H |= p(w0)`, and `H` with one recurrence step entails `H` on the shifted window.
pub fn heredity_obligations(
    h: &HereditaryCandidate,
    p: &DataPredicate,
    rec: &LinearRecurrence,
) -> Result<Vec<(Vec<LinearConstraint>, LinearConstraint)>, ProofError> {
    if h.width < rec.order() {
        return Err(ProofError::WidthMismatch { width: h.width, order: rec.order() });
    }
    if !rec.inhomogeneity.is_constant() {
        return Err(ProofError::NotApplicable(format!(
            "the step of `{}` depends on n ({}); use the recurrence-equality route",
            rec.name, rec.inhomogeneity
        )));
    }
    let mut out = Vec::new();
    for goal in p.at(0) {
        out.push((h.constraints.clone(), goal));
    }
    let mut stepped = h.constraints.clone();
    stepped.push(step_constraint(h.width, rec, &rec.inhomogeneity.constant_term()));
    for c in &h.constraints {
        out.push((stepped.clone(), c.shift_vars(1)));
    }
    Ok(out)
}

pub fn check_hereditary(
    h: &HereditaryCandidate,
    p: &DataPredicate,
    rec: &LinearRecurrence,
) -> Result<HeredityCheck, ProofError> {
    let transcript: Vec<Entailment> = heredity_obligations(h, p, rec)?
        .into_iter()
        .map(|(a, g)| Entailment::check(a, g))
        .collect();
    Ok(HeredityCheck { hereditary: transcript.iter().all(|e| e.holds), transcript })
}

/// Proves `forall n >= offset. p(name(n))` from a window predicate `h`.
pub fn prove_forall(
    p: &DataPredicate,
    name: &str,
    h: &HereditaryCandidate,
    offset: u64,
    sess: &mut EvalSession,
) -> Result<ProofObject, ProofError> {
    let rec = recurrence_of(name, sess.defs()).ok_or_else(|| ProofError::NoRecurrence(name.into()))?;
    if h.width < rec.order() {
        return Err(ProofError::WidthMismatch { width: h.width, order: rec.order() });
    }
    let mut window = Vec::new();
    let mut numbers = Vec::new();
    for i in 0..h.width as u64 {
        let v = sess.element(name, offset + i)?;
        numbers.push(numeric(offset + i, &v)?);
        window.push(v);
    }
    if !h.holds_at(&numbers) {
        return Err(ProofError::BaseWindow {
            stream: name.into(),
            offset,
            values: window.iter().map(ToString::to_string).collect(),
        });
    }
    let check = check_hereditary(h, p, &rec)?;
    if let Some(failing) = check.transcript.iter().find(|e| !e.holds) {
        return Err(ProofError::NotHereditary { failing: Box::new(failing.clone()) });
    }
    Ok(ProofObject::HereditaryForall {
        claim: forall_claim(p, name, offset),
        definitions: sess.defs().to_string(),
        stream: name.into(),
        offset,
        predicate: p.clone(),
        candidate: h.clone(),
        recurrence: rec,
        base_window: window,
        transcript: check.transcript,
    })
}

/// Decides `forall n. p(s(n))` when `s` has finitely many tails.
pub fn forall_rational(
    p: &DataPredicate,
    s: &StreamExpr,
    sess: &mut EvalSession,
    max_states: usize,
) -> Result<ForallOutcome, ProofError> {
    let g = state_graph(s, sess, max_states)?;
    if g.overflow {
        return Ok(ForallOutcome::Unknown { reason: g.overflow_reason(max_states) });
    }
    // The graph is the lasso of `s`, so walk order is index order.
    for (index, state) in g.walk(g.len()).enumerate() {
        let head = g.head_of(state);
        if !p.holds(&numeric(index as u64, head)?) {
            return Ok(ForallOutcome::Counterexample { index: index as u64, value: head.clone() });
        }
    }
    let states = (0..g.len())
        .map(|i| RationalState {
            expr: g.states[i].to_string(),
            head: g.heads[i].clone(),
            tail: g.tails[i].expect("complete graph"),
        })
        .collect();
    let stream = s.to_string();
    Ok(ForallOutcome::Proved(ProofObject::RationalForall {
        claim: forall_claim(p, &stream, 0),
        definitions: sess.defs().to_string(),
        stream,
        predicate: p.clone(),
        initial: g.initial,
        states,
    }))
}

/// Proves `a = b` when `b` satisfies `a`'s recurrence from the same bases.
pub fn prove_equal_by_recurrence(a: &str, b: &str, sess: &mut EvalSession) -> Result<ProofObject, ProofError> {
    let defs = sess.defs();
    let rec = recurrence_of(a, defs).ok_or_else(|| ProofError::NoRecurrence(a.into()))?;
    let witness = if let Some(poly) = polynomial_stream(b, defs) {
        for (i, base) in rec.base.iter().enumerate() {
            let v = poly.eval_at(i as u64);
            if v != *base {
                return Err(ProofError::BaseMismatch {
                    index: i as u64,
                    left: DataValue::number(base.clone()).to_string(),
                    right: DataValue::number(v).to_string(),
                });
            }
        }
        let residual = step_residual(&poly, &rec);
        if !residual.is_zero() {
            return Err(ProofError::StepMismatch { residual });
        }
        EqualityWitness::Polynomial { polynomial: poly }
    } else {
        let other = recurrence_of(b, defs).ok_or_else(|| ProofError::NoRecurrence(b.into()))?;
        if let Some(i) = (0..rec.order().max(other.order())).find(|&i| rec.base.get(i) != other.base.get(i)) {
            let show = |r: &LinearRecurrence| r.base.get(i).map_or("none".into(), |x| DataValue::number(x.clone()).to_string());
            return Err(ProofError::BaseMismatch { index: i as u64, left: show(&rec), right: show(&other) });
        }
        if other.coeffs != rec.coeffs || other.inhomogeneity != rec.inhomogeneity {
            return Err(ProofError::NotApplicable(format!("`{a}` and `{b}` follow different recurrences: {rec} vs {other}")));
        }
        EqualityWitness::Recurrence { recurrence: other }
    };
    Ok(ProofObject::RecurrenceEqual {
        claim: equal_claim(a, b),
        definitions: sess.defs().to_string(),
        left: a.into(),
        right: b.into(),
        recurrence: rec,
        witness,
    })
}

/// The induction premises for `p` over the naturals: `p(0)`, and
/// `p(w0)` with `w1 = w0 + 1` entails `p(w1)`.
pub fn induction_premises(p: &DataPredicate) -> (bool, bool) {
    let base = p.holds(&BigRational::zero());
    let mut assumptions = p.at(0);
    assumptions.push(super::linear::constraint(&[1, -1], 1, Relation::Eq));
    let step = p.at(1).iter().all(|g| super::linear::entails_linear(&assumptions, g));
    (base, step)
}

pub const NAT_SOURCE: &str = "nat as [0 | 1 + nat]";

/// Packages ordinary induction as a hereditary proof over `nat`.
pub fn induction_bridge(p: &DataPredicate, base_holds: bool, step_holds: bool) -> Result<ProofObject, ProofError> {
    if !base_holds {
        return Err(ProofError::MissingPremise("the base case p(0) does not hold"));
    }
    if !step_holds {
        return Err(ProofError::MissingPremise("the step p(n) => p(n + 1) does not hold"));
    }
    let defs = nat_definitions();
    let h = HereditaryCandidate::new(1, p.constraints.clone()).map_err(ProofError::NotApplicable)?;
    let mut sess = EvalSession::new(defs);
    prove_forall(p, "nat", &h, 0, &mut sess)
}

fn nat_definitions() -> DefinitionSet {
    parse_definitions(&SourceText::new(NAT_SOURCE, "<nat>"), ParseOptions::default()).expect("nat parses")
}

/// Wraps a closed symbolic relation as a proof object.
pub fn symbolic_proof_object(
    left: &StreamExpr,
    right: &StreamExpr,
    proof: &SymbolicProof,
    defs: &DefinitionSet,
) -> ProofObject {
    ProofObject::SymbolicBisim {
        claim: equal_claim(&left.to_string(), &right.to_string()),
        definitions: defs.to_string(),
        left: left.to_string(),
        right: right.to_string(),
        pairs: proof
            .pairs
            .iter()
            .map(|(l, r)| crate::equiv::StatePair { left: l.to_string(), right: r.to_string() })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::linear::constraint;
    use crate::syntax::parse_window_constraints;

    const SRC: &str = "fib as [0, 1 | fib + fib^1]\n\
                       (nat, sum1) as [(0, 0) | (1 + nat, 1 + nat + sum1)]\n\
                       sum2 as [0 | (1/2)*nat^1*(1 + nat^1)]\n\
                       one_c as [1 | one_c]\n\
                       o2 as [0, 1 | o2]\n\
                       o6 as [0, 1, 2, 3, 4, 5 | o6]\n\
                       sq as [0 | (1 + nat)*(1 + nat)]";

    fn session() -> EvalSession {
        EvalSession::new(parse_definitions(&SourceText::repl(SRC), ParseOptions::default()).unwrap())
    }

    fn pred(s: &str) -> DataPredicate {
        DataPredicate::new(parse_window_constraints(s).unwrap()).unwrap()
    }

    fn window(width: usize, s: &str) -> HereditaryCandidate {
        HereditaryCandidate::new(width, parse_window_constraints(s).unwrap()).unwrap()
    }

    #[test]
    fn fib_positive_from_one() {
        let mut s = session();
        let proof = prove_forall(&pred("w0 > 0"), "fib", &window(2, "w0 > 0 and w1 > 0"), 1, &mut s).unwrap();
        assert_eq!(proof.claim(), "forall n >= 1. fib(n) > 0");
        let err = prove_forall(&pred("w0 > 0"), "fib", &window(2, "w0 > 0 and w1 > 0"), 0, &mut s).unwrap_err();
        assert!(matches!(&err, ProofError::BaseWindow { values, .. } if values[0] == "0"), "{err}");
    }

    #[test]
    fn narrow_window_is_not_hereditary() {
        let rec = recurrence_of("fib", session().defs()).unwrap();
        let h = window(2, "w0 > 0");
        let check = check_hereditary(&h, &pred("w0 > 0"), &rec).unwrap();
        assert!(!check.hereditary);
        assert!(matches!(
            check_hereditary(&window(1, "w0 > 0"), &pred("w0 > 0"), &rec),
            Err(ProofError::WidthMismatch { .. })
        ));
        let trivial = window(2, "w0 = w0");
        assert!(check_hereditary(&trivial, &pred("w0 = w0"), &rec).unwrap().hereditary);
    }

    #[test]
    fn nat_is_nonnegative() {
        let mut s = session();
        prove_forall(&pred("w0 >= 0"), "nat", &window(1, "w0 >= 0"), 0, &mut s).unwrap();
    }

    #[test]
    fn rational_foralls() {
        let mut s = session();
        let out = forall_rational(&pred("w0 > 0"), &StreamExpr::name("one_c"), &mut s, 100).unwrap();
        let ForallOutcome::Proved(ProofObject::RationalForall { states, .. }) = out else { panic!("{out:?}") };
        assert_eq!(states.len(), 1);
        let out = forall_rational(&pred("w0 > 0"), &StreamExpr::name("o2"), &mut s, 100).unwrap();
        assert_eq!(out, ForallOutcome::Counterexample { index: 0, value: 0.into() });
        let out = forall_rational(&pred("w0 >= 0"), &StreamExpr::name("o6"), &mut s, 100).unwrap();
        assert!(matches!(out, ForallOutcome::Proved(ProofObject::RationalForall { ref states, .. }) if states.len() == 6));
    }

    #[test]
    fn sums_agree() {
        let mut s = session();
        let proof = prove_equal_by_recurrence("sum1", "sum2", &mut s).unwrap();
        let ProofObject::RecurrenceEqual { witness: EqualityWitness::Polynomial { polynomial }, .. } = proof else {
            panic!()
        };
        assert_eq!(polynomial.to_string(), "1/2*n^2 + 1/2*n");
        assert!(prove_equal_by_recurrence("nat", "nat", &mut s).is_ok());
        assert!(matches!(
            prove_equal_by_recurrence("fib", "sq", &mut s),
            Err(ProofError::BaseMismatch { .. } | ProofError::StepMismatch { .. })
        ));
    }

    #[test]
    fn induction() {
        for (p, ok) in [("w0 >= 0", true), ("w0 > 0", false), ("2*w0 >= w0", true)] {
            let p = pred(p);
            let (b, st) = induction_premises(&p);
            assert_eq!(induction_bridge(&p, b, st).is_ok(), ok);
        }
        let c = constraint(&[1], 0, Relation::Ge);
        assert_eq!(pred("2*w0 >= w0").constraints, vec![c]);
    }
}
