use thiserror::Error;

use crate::value::DataValue;

/// Failures while computing stream elements.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("type error: cannot apply `{op}` to {left} and {right}")]
    TypeMismatch {
        op: &'static str,
        left: String,
        right: String,
    },
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("`{0}` is a free stream variable and has no elements")]
    FreeVariable(String),
    #[error("definition of `{name}` is not productive: element {index} depends on itself")]
    Unproductive { name: String, index: u64 },
    #[error("stream-valued tail exponents cannot be evaluated")]
    DynamicTail,
    #[error("component {index} does not exist in value {value}")]
    Component { index: usize, value: String },
    #[error("expansion index {n} is below the index of the last base case ({last})")]
    ExpansionBelowBase { n: u64, last: u64 },
    #[error("index {0} is too large to evaluate")]
    IndexOverflow(u64),
}

impl EvalError {
    pub fn type_mismatch(op: &'static str, left: &DataValue, right: &DataValue) -> Self {
        EvalError::TypeMismatch {
            op,
            left: left.to_string(),
            right: right.to_string(),
        }
    }
}

/// Dimension checking failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimensionError {
    #[error("dimension mismatch {left} vs {right} in `{op}`")]
    Mismatch {
        op: &'static str,
        left: usize,
        right: usize,
    },
    #[error("unknown name `{0}`")]
    UnknownName(String),
}
