//! Operational semantics: tails, normalization, elements and expansions.

mod rewrite;
mod session;

pub use rewrite::{canonicalize, normalize, normalize_with_fuel, polynomial_terms, shift, tail, DEFAULT_UNFOLD_FUEL};
pub use session::{EvalSession, Expansion};
