use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::graph::state_graph;
use crate::error::EvalError;
use crate::eval::EvalSession;
use crate::expr::StreamExpr;
use crate::value::DataValue;

/// Value pairs `a(i) -> b(i)` in order of first occurrence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Bijection {
    pub pairs: Vec<(DataValue, DataValue)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FinEquivVerdict {
    Equivalent { bijection: Bijection },
    /// Consistent on positions `0..=bound`; not a decision.
    ConsistentUpTo { bound: u64 },
    NotEquivalent { index: u64, left: DataValue, right: DataValue, reason: String },
    Unknown { reason: String },
}

/// Accumulates the position-wise value relation and checks it stays a bijection.
#[derive(Default)]
struct Relation {
    forward: HashMap<DataValue, DataValue>,
    backward: HashMap<DataValue, DataValue>,
    pairs: Vec<(DataValue, DataValue)>,
}

impl Relation {
    fn observe(&mut self, index: u64, l: DataValue, r: DataValue) -> Result<(), FinEquivVerdict> {
        let conflict = |reason: String, l: DataValue, r: DataValue| FinEquivVerdict::NotEquivalent {
            index,
            left: l,
            right: r,
            reason,
        };
        match (self.forward.get(&l), self.backward.get(&r)) {
            (Some(img), _) if *img != r => {
                Err(conflict(format!("{l} is already mapped to {img}, now needs {r}"), l.clone(), r))
            }
            (_, Some(pre)) if *pre != l => {
                Err(conflict(format!("{r} is already the image of {pre}, now needed for {l}"), l.clone(), r))
            }
            (Some(_), Some(_)) => Ok(()),
            _ => {
                self.forward.insert(l.clone(), r.clone());
                self.backward.insert(r.clone(), l.clone());
                self.pairs.push((l, r));
                Ok(())
            }
        }
    }
}

/// Decides finite equivalence of two streams with finite state graphs by
/// walking the pair of graphs until the paired state repeats.
pub fn finite_equiv(
    a: &StreamExpr,
    b: &StreamExpr,
    sess: &mut EvalSession,
    max_states: usize,
) -> Result<FinEquivVerdict, EvalError> {
    let ga = state_graph(a, sess, max_states)?;
    let gb = state_graph(b, sess, max_states)?;
    if ga.overflow || gb.overflow {
        return Ok(FinEquivVerdict::Unknown { reason: ga.overflow_reason(max_states) });
    }
    let mut rel = Relation::default();
    let mut seen = HashSet::new();
    let (mut x, mut y) = (ga.initial, gb.initial);
    let mut index = 0u64;
    while seen.insert((x, y)) {
        if let Err(v) = rel.observe(index, ga.head_of(x).clone(), gb.head_of(y).clone()) {
            return Ok(v);
        }
        x = ga.tail_of(x).expect("complete graph");
        y = gb.tail_of(y).expect("complete graph");
        index += 1;
    }
    Ok(FinEquivVerdict::Equivalent { bijection: Bijection { pairs: rel.pairs } })
}

/// Checks that `a(i) -> b(i)` is injective both ways for `i <= bound`.
pub fn finite_equiv_bounded(
    a: &StreamExpr,
    b: &StreamExpr,
    bound: u64,
    sess: &mut EvalSession,
) -> Result<FinEquivVerdict, EvalError> {
    let mut rel = Relation::default();
    for index in 0..=bound {
        let l = sess.value_at(a, index)?;
        let r = sess.value_at(b, index)?;
        if let Err(v) = rel.observe(index, l, r) {
            return Ok(v);
        }
    }
    Ok(FinEquivVerdict::ConsistentUpTo { bound })
}
