//! Elements and expansions of corecursive definitions.

use corec::{parse_definitions, EvalSession, ParseOptions, SourceText};

fn main() {
    let src = SourceText::new(include_str!("../data/fib.codata"), "fib.codata");
    let defs = parse_definitions(&src, ParseOptions::default()).expect("fib.codata parses");
    let mut sess = EvalSession::new(defs);

    for n in 1..=5 {
        println!("fib[{n}] = {}", sess.expand("fib", n).unwrap());
    }
    println!("fib(100) = {}", sess.element("fib", 100).unwrap());
    println!("fact(20) = {}", sess.element("fact", 20).unwrap());

    let f: Vec<String> = (0..8).map(|i| sess.element("f", i).unwrap().to_string()).collect();
    println!("f = [{}, ...]", f.join(", "));
    println!("head computations so far: {}", sess.step_counter());
}
