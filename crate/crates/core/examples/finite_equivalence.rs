//! Finite equivalence: equality up to a bijection of element values.

use corec::equiv::{finite_equiv, finite_equiv_bounded, FinEquivVerdict, DEFAULT_MAX_STATES};
use corec::{parse_definitions, parse_stream_expr, EvalSession, ParseOptions, SourceText};

fn main() {
    let src = SourceText::new(include_str!("../data/osc.codata"), "osc.codata");
    let mut sess = EvalSession::new(parse_definitions(&src, ParseOptions::default()).unwrap());
    let pair = parse_stream_expr("(o2, o3)").unwrap();
    for other in ["o6", "o3"] {
        let v = finite_equiv(&pair, &parse_stream_expr(other).unwrap(), &mut sess, DEFAULT_MAX_STATES).unwrap();
        match v {
            FinEquivVerdict::Equivalent { bijection } => {
                println!("(o2, o3) ~f {other}:");
                for (x, y) in &bijection.pairs {
                    println!("  {x} -> {y}");
                }
            }
            other_verdict => println!("(o2, o3) vs {other}: {}", serde_json::to_string(&other_verdict).unwrap()),
        }
    }

    let src = SourceText::new(include_str!("../data/n_nat.codata"), "n_nat.codata");
    let mut sess = EvalSession::new(parse_definitions(&src, ParseOptions::default()).unwrap());
    let (n, nat) = (parse_stream_expr("n").unwrap(), parse_stream_expr("nat").unwrap());
    let v = finite_equiv_bounded(&n, &nat, 2000, &mut sess).unwrap();
    println!("n vs nat: {}", serde_json::to_string(&v).unwrap());
}
