//! Circular coinduction over stream variables, then a concrete instance.

use std::collections::HashMap;

use corec::equiv::{decide_equal_rational, instantiate, prove_equal_symbolic, SymbolicVerdict, DEFAULT_MAX_STATES};
use corec::{parse_definitions, parse_stream_expr, EvalSession, ParseOptions, SourceText};

fn main() {
    let src = SourceText::new(include_str!("../data/osc.codata"), "osc.codata");
    let mut sess = EvalSession::new(parse_definitions(&src, ParseOptions::default()).unwrap());
    for (l, r) in [("even(zip(s, t))", "s"), ("odd(zip(s, t))", "t"), ("zip(even(s), odd(s))", "s")] {
        let (l, r) = (parse_stream_expr(l).unwrap(), parse_stream_expr(r).unwrap());
        match prove_equal_symbolic(&l, &r, &mut sess, 64).unwrap() {
            SymbolicVerdict::Proved { pairs } => {
                println!("{l} = {r}, relation:");
                for (a, b) in &pairs.pairs {
                    println!("  ({a}, {b})");
                }
                let map = HashMap::from([
                    ("s".to_string(), parse_stream_expr("o2").unwrap()),
                    ("t".to_string(), parse_stream_expr("o3").unwrap()),
                ]);
                let (li, ri) = (instantiate(&l, &map), instantiate(&r, &map));
                let check = decide_equal_rational(&li, &ri, &mut sess, DEFAULT_MAX_STATES).unwrap();
                println!("  instance {li} = {ri}: {}", serde_json::to_string(&check).unwrap());
            }
            v => println!("{l} = {r}: {v:?}"),
        }
    }
}
