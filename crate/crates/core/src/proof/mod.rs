pub mod linear;
mod objects;
mod poly;
mod prover;
mod recurrence;
mod verify;

pub use objects::{Entailment, EqualityWitness, ProofObject, RationalState};
pub use poly::Polynomial;
pub use prover::{
    check_hereditary, forall_rational, heredity_obligations, induction_bridge, induction_premises, prove_equal_by_recurrence,
    prove_forall, step_constraint, symbolic_proof_object, ForallOutcome, HeredityCheck, ProofError, NAT_SOURCE,
};
pub use recurrence::{poly_satisfies, polynomial_of_expr, polynomial_stream, recurrence_of, step_residual, LinearRecurrence};
pub use verify::{verify, VerifyError};
