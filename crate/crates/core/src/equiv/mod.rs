//! Stream equality and finite equivalence.
//!
//! Exact decisions work on streams whose normalized tails form a finite
//! graph; other pairs get bounded checks or the symbolic prover.

mod finite;
mod graph;
mod rational;
mod symbolic;

pub use finite::{finite_equiv, finite_equiv_bounded, Bijection, FinEquivVerdict};
pub use graph::{state_graph, StateGraph, DEFAULT_MAX_STATES, MAX_GRAPH_NODES};
pub use rational::{bounded_equal, decide_equal_rational, BoundedVerdict, EqualityVerdict, StatePair, DEFAULT_BOUND};
pub use symbolic::{
    instantiate, prove_equal_symbolic, symbolic_value_at, SymHead, SymbolicProof, SymbolicVerdict, DEFAULT_PAIR_CAP,
};
pub(crate) use symbolic::is_instance;
