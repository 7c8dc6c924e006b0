//! Well-formedness reports, including one for a non-linear definition.

use corec::model::{check_well_formed, dependency_graph};
use corec::{parse_definitions, ParseOptions, SourceText};

fn report(file: &str, content: &str) {
    let opts = ParseOptions { allow_stream_exponent: true };
    let defs = parse_definitions(&SourceText::new(content, file), opts).expect("parses");
    let graph = dependency_graph(&defs);
    println!("{file}: dependency edges {:?}", graph.edges());
    let r = check_well_formed(&defs);
    println!("{}", serde_json::to_string_pretty(&r).unwrap());
}

fn main() {
    report("fib.codata", include_str!("../data/fib.codata"));
    report("hofstadter.codata", include_str!("../data/hofstadter.codata"));
    report("bad.codata", "s as [0 | s^1]\nt as [0, 1 | u]");
}
