//! The `.codata` surface language.
//!
//! One definition or query per line; `#` starts a comment. See
//! `docs/grammar.md` for the grammar.

mod diag;
mod lexer;
mod parser;
mod printer;
mod query;

pub use diag::{ParseDiagnostic, ParseErrors, Severity, Span};
pub use parser::{
    parse_data, parse_definition, parse_definitions, parse_stream_expr, parse_stream_expr_with,
    ParseOptions, SourceText, BUILTINS,
};
pub use printer::print_expr;
pub use query::{parse_query, parse_query_with, parse_window_constraints, EqualMethod, Query};

/// True when a line looks like a definition (`... as [ ... ]`) rather than a query.
pub fn is_definition_line(line: &str) -> bool {
    let mut words = line.split_whitespace();
    words.any(|w| w == "as") && line.contains('[')
}
