//! Driving the REPL programmatically.

use corec::cli::{Limits, Repl};
use corec::{DefinitionSet, ParseOptions};

fn main() {
    let mut repl = Repl::new(DefinitionSet::new(), Limits::default(), ParseOptions::default()).unwrap();
    let script = [
        "fib as [0, 1 | fib^0 + fib^1]",
        "eval fib 5",
        "expand fib 5",
        "o2 as [0, 1 | o2]",
        "o3 as [0, 1, 2 | o3]",
        "o6 as [0, 1, 2, 3, 4, 5 | o6]",
        "fequiv (o2, o3) o6",
        "equal o2 o6",
        "prove forall n. fib^1(n) > 0",
        "eval undefined 3",
        ":defs",
        ":reset",
        ":defs",
    ];
    for line in script {
        println!("> {line}");
        if let Some(o) = repl.handle_line(line).outcome {
            println!("{}", o.text);
        }
    }
}
