//! Equality of a corecursive sum and its closed form through a shared recurrence.

use corec::proof::{polynomial_stream, prove_equal_by_recurrence, recurrence_of};
use corec::{parse_definitions, verify, EvalSession, ParseOptions, SourceText};

fn main() {
    let src = SourceText::new(include_str!("../data/sums.codata"), "sums.codata");
    let mut sess = EvalSession::new(parse_definitions(&src, ParseOptions::default()).unwrap());
    println!("sum1: {}", recurrence_of("sum1", sess.defs()).unwrap());
    println!("sum2(n) = {}", polynomial_stream("sum2", sess.defs()).unwrap());
    let proof = prove_equal_by_recurrence("sum1", "sum2", &mut sess).unwrap();
    println!("{}", proof.to_json());
    println!("verified: {}", verify(&proof).unwrap());
}
