//! Deciding equality of eventually periodic streams.

use corec::equiv::{decide_equal_rational, state_graph, DEFAULT_MAX_STATES};
use corec::{parse_definitions, EvalSession, ParseOptions, SourceText, StreamExpr};

fn main() {
    let src = SourceText::new(include_str!("../data/osc.codata"), "osc.codata");
    let mut sess = EvalSession::new(parse_definitions(&src, ParseOptions::default()).unwrap());

    let g = state_graph(&StreamExpr::name("o6"), &mut sess, DEFAULT_MAX_STATES).unwrap();
    println!("o6 has {} states with heads {:?}", g.len(), g.heads.iter().map(ToString::to_string).collect::<Vec<_>>());

    for (a, b) in [("s1", "s2"), ("o2", "o6"), ("o3", "o3")] {
        let v = decide_equal_rational(&StreamExpr::name(a), &StreamExpr::name(b), &mut sess, DEFAULT_MAX_STATES).unwrap();
        println!("{a} vs {b}: {}", serde_json::to_string(&v).unwrap());
    }
}
