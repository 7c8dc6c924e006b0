use std::collections::{HashMap, VecDeque};

use crate::error::EvalError;
use crate::eval::{normalize, tail, EvalSession};
use crate::expr::StreamExpr;
use crate::value::DataValue;

pub const DEFAULT_MAX_STATES: usize = 10_000;

/// Total expression nodes a state graph may hold before exploration stops.
pub const MAX_GRAPH_NODES: usize = 1 << 20;

/// The tails of a stream reachable by repeated `tail`, identified up to
/// normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateGraph {
    pub states: Vec<StreamExpr>,
    pub initial: usize,
    pub heads: Vec<DataValue>,
    /// `None` only for states left unexplored when the cap was hit.
    pub tails: Vec<Option<usize>>,
    pub overflow: bool,
}

impl StateGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn head_of(&self, state: usize) -> &DataValue {
        &self.heads[state]
    }

    pub fn tail_of(&self, state: usize) -> Option<usize> {
        self.tails[state]
    }

    /// Why exploration stopped early.
    pub fn overflow_reason(&self, max_states: usize) -> String {
        format!("no finite state graph within {max_states} states and {MAX_GRAPH_NODES} expression nodes")
    }

    /// The walk `initial, tail(initial), ...` as state ids, `len` steps.
    pub fn walk(&self, len: usize) -> impl Iterator<Item = usize> + '_ {
        let mut cur = Some(self.initial);
        std::iter::from_fn(move || {
            let s = cur?;
            cur = self.tails[s];
            Some(s)
        })
        .take(len)
    }
}

/// Explores the tails of `e` breadth-first, at most `max_states` of them.
pub fn state_graph(e: &StreamExpr, sess: &mut EvalSession, max_states: usize) -> Result<StateGraph, EvalError> {
    let start = normalize(e, sess.defs());
    let mut index = HashMap::new();
    index.insert(start.clone(), 0);
    let mut g = StateGraph {
        states: vec![start],
        initial: 0,
        heads: vec![],
        tails: vec![],
        overflow: false,
    };
    let mut nodes = g.states[0].size();
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        debug_assert_eq!(s, g.heads.len());
        let head = sess.head(&g.states[s])?;
        g.heads.push(head);
        let next = normalize(&tail(&g.states[s]), sess.defs());
        let id = match index.get(&next) {
            Some(&id) => Some(id),
            None if g.states.len() >= max_states || nodes + next.size() > MAX_GRAPH_NODES => {
                g.overflow = true;
                None
            }
            None => {
                let id = g.states.len();
                nodes += next.size();
                index.insert(next.clone(), id);
                g.states.push(next);
                queue.push_back(id);
                Some(id)
            }
        };
        g.tails.push(id);
        if g.overflow {
            break;
        }
    }
    // States discovered but never expanded keep a head so callers can index uniformly.
    while g.heads.len() < g.states.len() {
        let s = g.heads.len();
        let head = sess.head(&g.states[s])?;
        g.heads.push(head);
        g.tails.push(None);
    }
    Ok(g)
}
