//! A window-predicate proof that fib is positive from index 1, checked
//! independently after a JSON round trip.

use corec::proof::linear::{DataPredicate, HereditaryCandidate};
use corec::proof::{check_hereditary, prove_forall, recurrence_of};
use corec::syntax::parse_window_constraints;
use corec::{parse_definitions, verify, EvalSession, ParseOptions, ProofObject, SourceText};

fn main() {
    let src = SourceText::new(include_str!("../data/fib.codata"), "fib.codata");
    let mut sess = EvalSession::new(parse_definitions(&src, ParseOptions::default()).unwrap());
    let p = DataPredicate::new(parse_window_constraints("w0 > 0").unwrap()).unwrap();
    let h = HereditaryCandidate::new(2, parse_window_constraints("w0 > 0 and w1 > 0").unwrap()).unwrap();

    let rec = recurrence_of("fib", sess.defs()).unwrap();
    println!("recurrence: {rec}");
    for e in check_hereditary(&h, &p, &rec).unwrap().transcript {
        println!("  {e}");
    }

    match prove_forall(&p, "fib", &h, 0, &mut sess) {
        Ok(_) => println!("unexpected proof from offset 0"),
        Err(e) => println!("offset 0: {e}"),
    }
    let proof = prove_forall(&p, "fib", &h, 1, &mut sess).unwrap();
    let json = proof.to_json();
    println!("{json}");
    let reread = ProofObject::from_json(&json).unwrap();
    println!("verified: {}", verify(&reread).unwrap());
}
