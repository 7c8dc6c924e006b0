//! Serializable proof certificates.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::linear::{entails_linear, DataPredicate, HereditaryCandidate, LinearConstraint};
use super::poly::Polynomial;
use super::recurrence::LinearRecurrence;
use crate::equiv::StatePair;
use crate::value::DataValue;

/// One linear entailment obligation and its outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entailment {
    pub assumptions: Vec<LinearConstraint>,
    pub goal: LinearConstraint,
    pub holds: bool,
}

impl Entailment {
    pub fn check(assumptions: Vec<LinearConstraint>, goal: LinearConstraint) -> Self {
        let holds = entails_linear(&assumptions, &goal);
        Self { assumptions, goal, holds }
    }
}

impl fmt::Display for Entailment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.assumptions.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        let sym = if self.holds { "|=" } else { "|/=" };
        write!(f, " {sym} {}", self.goal)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalState {
    pub expr: String,
    pub head: DataValue,
    pub tail: usize,
}

/// Why the right-hand stream follows the left-hand recurrence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum EqualityWitness {
    /// The right stream is this polynomial in `n`.
    Polynomial { polynomial: Polynomial },
    /// The right stream has the same recurrence.
    Recurrence { recurrence: LinearRecurrence },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProofObject {
    /// Every reachable tail of a finite-state stream satisfies the predicate.
    RationalForall {
        claim: String,
        definitions: String,
        stream: String,
        predicate: DataPredicate,
        initial: usize,
        states: Vec<RationalState>,
    },
    /// A window predicate holds initially and is preserved by the recurrence step.
    HereditaryForall {
        claim: String,
        definitions: String,
        stream: String,
        offset: u64,
        predicate: DataPredicate,
        candidate: HereditaryCandidate,
        recurrence: LinearRecurrence,
        base_window: Vec<DataValue>,
        transcript: Vec<Entailment>,
    },
    /// Both streams satisfy one recurrence from the same bases.
    RecurrenceEqual {
        claim: String,
        definitions: String,
        left: String,
        right: String,
        recurrence: LinearRecurrence,
        witness: EqualityWitness,
    },
    /// A relation closed under tails up to renaming of free stream variables.
    SymbolicBisim {
        claim: String,
        definitions: String,
        left: String,
        right: String,
        pairs: Vec<StatePair>,
    },
}

impl ProofObject {
    pub fn claim(&self) -> &str {
        match self {
            ProofObject::RationalForall { claim, .. }
            | ProofObject::HereditaryForall { claim, .. }
            | ProofObject::RecurrenceEqual { claim, .. }
            | ProofObject::SymbolicBisim { claim, .. } => claim,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ProofObject::RationalForall { .. } => "rational_forall",
            ProofObject::HereditaryForall { .. } => "hereditary_forall",
            ProofObject::RecurrenceEqual { .. } => "recurrence_equal",
            ProofObject::SymbolicBisim { .. } => "symbolic_bisim",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("proof objects serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// `p` with `w0` read as `subject`.
pub(crate) fn render_predicate(p: &DataPredicate, subject: &str) -> String {
    p.to_string().replace("w0", subject)
}

pub(crate) fn forall_claim(p: &DataPredicate, stream: &str, offset: u64) -> String {
    let subject = if stream.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
        format!("{stream}(n)")
    } else {
        format!("({stream})(n)")
    };
    if offset == 0 {
        format!("forall n. {}", render_predicate(p, &subject))
    } else {
        format!("forall n >= {offset}. {}", render_predicate(p, &subject))
    }
}

pub(crate) fn equal_claim(left: &str, right: &str) -> String {
    format!("{left} = {right}")
}
