use std::collections::{HashMap, VecDeque};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use super::graph::{state_graph, StateGraph};
use crate::error::EvalError;
use crate::eval::EvalSession;
use crate::expr::StreamExpr;
use crate::value::DataValue;

pub const DEFAULT_BOUND: u64 = 1000;

/// A pair of streams as printed expressions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatePair {
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EqualityVerdict {
    /// `witness` is a bisimulation: head-consistent and closed under paired tails.
    Equal { witness: Vec<StatePair> },
    NotEqual { index: u64, left: DataValue, right: DataValue },
    Unknown { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum BoundedVerdict {
    /// Elements `0..=bound` agree. This is not a proof of equality.
    EqualUpTo { bound: u64 },
    NotEqual { index: u64, left: DataValue, right: DataValue },
}

/// Decides equality of two streams with finite state graphs.
///
/// Equivalence classes of states are merged with union-find, pairing
/// the initial states and then paired tails; a head mismatch refutes.
/// On success the witness is the lasso of the synchronous walk.
pub fn decide_equal_rational(
    a: &StreamExpr,
    b: &StreamExpr,
    sess: &mut EvalSession,
    max_states: usize,
) -> Result<EqualityVerdict, EvalError> {
    let ga = state_graph(a, sess, max_states)?;
    let gb = state_graph(b, sess, max_states)?;
    if ga.overflow || gb.overflow {
        return Ok(EqualityVerdict::Unknown { reason: ga.overflow_reason(max_states) });
    }
    let n = ga.len();
    let mut uf = UnionFind::<usize>::new(n + gb.len());
    let mut queue = VecDeque::from([(ga.initial, gb.initial)]);
    uf.union(ga.initial, n + gb.initial);
    let mut equal = true;
    while let Some((x, y)) = queue.pop_front() {
        if ga.head_of(x) != gb.head_of(y) {
            equal = false;
            break;
        }
        let (tx, ty) = (ga.tail_of(x).expect("complete graph"), gb.tail_of(y).expect("complete graph"));
        if uf.union(tx, n + ty) {
            queue.push_back((tx, ty));
        }
    }
    if equal {
        let witness = lasso(&ga, &gb)
            .into_iter()
            .map(|(x, y)| StatePair { left: ga.states[x].to_string(), right: gb.states[y].to_string() })
            .collect();
        return Ok(EqualityVerdict::Equal { witness });
    }
    // The synchronous walk reaches the first differing index within |A|*|B| steps.
    let (mut x, mut y) = (ga.initial, gb.initial);
    for index in 0.. {
        if ga.head_of(x) != gb.head_of(y) {
            return Ok(EqualityVerdict::NotEqual {
                index,
                left: ga.head_of(x).clone(),
                right: gb.head_of(y).clone(),
            });
        }
        x = ga.tail_of(x).expect("complete graph");
        y = gb.tail_of(y).expect("complete graph");
    }
    unreachable!()
}

/// Paired states visited by the synchronous walk until it repeats.
fn lasso(ga: &StateGraph, gb: &StateGraph) -> Vec<(usize, usize)> {
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    let mut cur = (ga.initial, gb.initial);
    while seen.insert(cur, out.len()).is_none() {
        out.push(cur);
        cur = (ga.tail_of(cur.0).expect("complete graph"), gb.tail_of(cur.1).expect("complete graph"));
    }
    out
}

/// Compares elements `0..=bound`.
pub fn bounded_equal(
    a: &StreamExpr,
    b: &StreamExpr,
    bound: u64,
    sess: &mut EvalSession,
) -> Result<BoundedVerdict, EvalError> {
    for index in 0..=bound {
        let left = sess.value_at(a, index)?;
        let right = sess.value_at(b, index)?;
        if left != right {
            return Ok(BoundedVerdict::NotEqual { index, left, right });
        }
    }
    Ok(BoundedVerdict::EqualUpTo { bound })
}
