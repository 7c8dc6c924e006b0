#![allow(dead_code)]

pub mod oracle;
pub mod props;

use corec::{parse_definitions, DefinitionSet, EvalSession, ParseOptions, SourceText};

pub const LIB: &str = "\
fib as [0, 1 | fib + fib^1]
nat as [0 | 1 + nat]
fact as [1 | nat^1 * fact]
o2 as [0, 1 | o2]
o3 as [0, 1, 2 | o3]
o6 as [0, 1, 2, 3, 4, 5 | o6]
one_c as [1 | one_c]
s1 as [1 | s1]
s2 as [1, 1 | s2]
(f, g) as [(0, 1) | (g, 2*f)]
tri as [0 | tri + nat^1]
";

pub fn defs(src: &str) -> DefinitionSet {
    parse_definitions(&SourceText::new(src, "test"), ParseOptions::default()).expect("test definitions parse")
}

pub fn session(src: &str) -> EvalSession {
    EvalSession::new(defs(src))
}

pub fn data_file(name: &str) -> String {
    let path = format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}
