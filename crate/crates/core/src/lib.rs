//! Corecursive stream definitions: parsing, evaluation, equivalence
//! checking and checkable coinduction proofs.

pub mod cli;
pub mod equiv;
pub mod error;
pub mod eval;
pub mod expr;
pub mod model;
pub mod proof;
pub mod syntax;
pub mod value;

pub use error::{DimensionError, EvalError};
pub use eval::{EvalSession, Expansion};
pub use expr::{CodataDefinition, DefName, DefinitionSet, StreamExpr};
pub use model::{check_well_formed, WellFormedReport};
pub use proof::{verify, ProofObject};
pub use syntax::{parse_definitions, parse_stream_expr, ParseOptions, SourceText};
pub use value::DataValue;
