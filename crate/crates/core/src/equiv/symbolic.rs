use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use super::rational::StatePair;
use crate::error::EvalError;
use crate::eval::{normalize, shift, tail, EvalSession};
use crate::expr::{DefinitionSet, Side, StreamExpr};
use crate::value::DataValue;

pub const DEFAULT_PAIR_CAP: usize = 256;

/// A head computed with free stream variables left symbolic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymHead {
    Known(DataValue),
    /// `x(i)` for a free variable `x`.
    Var(String, u64),
    Tuple(Vec<SymHead>),
    Cons(String, Vec<SymHead>),
    /// Arithmetic on a free variable: no syntactic value.
    Stuck,
}

impl SymHead {
    pub fn is_stuck(&self) -> bool {
        match self {
            SymHead::Stuck => true,
            SymHead::Tuple(xs) | SymHead::Cons(_, xs) => xs.iter().any(SymHead::is_stuck),
            _ => false,
        }
    }
}

impl fmt::Display for SymHead {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, xs: &[SymHead]| {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        };
        match self {
            SymHead::Known(v) => write!(f, "{v}"),
            SymHead::Var(x, i) => write!(f, "{x}({i})"),
            SymHead::Tuple(xs) => {
                f.write_str("(")?;
                list(f, xs)?;
                f.write_str(")")
            }
            SymHead::Cons(c, xs) => {
                write!(f, "{c}(")?;
                list(f, xs)?;
                f.write_str(")")
            }
            SymHead::Stuck => f.write_str("?"),
        }
    }
}

/// Element `n` of `e`, treating undeclared names as free variables.
pub fn symbolic_value_at(e: &StreamExpr, n: u64, sess: &mut EvalSession) -> Result<SymHead, EvalError> {
    use StreamExpr::*;
    let over = || EvalError::IndexOverflow(n);
    let known2 = |a: SymHead, b: SymHead, f: &dyn Fn(&DataValue, &DataValue) -> Result<DataValue, EvalError>| {
        match (a, b) {
            (SymHead::Known(x), SymHead::Known(y)) => f(&x, &y).map(SymHead::Known),
            _ => Ok(SymHead::Stuck),
        }
    };
    Ok(match e {
        NameTail(t, k) => {
            let i = k.checked_add(n).ok_or_else(over)?;
            if sess.defs().contains(t) {
                SymHead::Known(sess.element(t, i)?)
            } else {
                SymHead::Var(t.clone(), i)
            }
        }
        Const(v) => SymHead::Known(v.clone()),
        AddConst(side, v, s) => {
            let x = symbolic_value_at(s, n, sess)?;
            let c = SymHead::Known(v.clone());
            match side {
                Side::Left => known2(c, x, &DataValue::add)?,
                Side::Right => known2(x, c, &DataValue::add)?,
            }
        }
        MulConst(side, v, s) => {
            let x = symbolic_value_at(s, n, sess)?;
            let c = SymHead::Known(v.clone());
            match side {
                Side::Left => known2(c, x, &DataValue::mul)?,
                Side::Right => known2(x, c, &DataValue::mul)?,
            }
        }
        Add(a, b) => {
            let x = symbolic_value_at(a, n, sess)?;
            known2(x, symbolic_value_at(b, n, sess)?, &DataValue::add)?
        }
        Mul(a, b) => {
            let x = symbolic_value_at(a, n, sess)?;
            known2(x, symbolic_value_at(b, n, sess)?, &DataValue::mul)?
        }
        Pairing(items) => {
            let hs = items.iter().map(|i| symbolic_value_at(i, n, sess)).collect::<Result<Vec<_>, _>>()?;
            if hs.iter().all(|h| matches!(h, SymHead::Known(_))) {
                SymHead::Known(sess.value_at(e, n)?)
            } else {
                SymHead::Tuple(hs)
            }
        }
        Map(c, items) => {
            let hs = items.iter().map(|i| symbolic_value_at(i, n, sess)).collect::<Result<Vec<_>, _>>()?;
            if hs.iter().all(|h| matches!(h, SymHead::Known(_))) {
                SymHead::Known(sess.value_at(e, n)?)
            } else {
                SymHead::Cons(c.clone(), hs)
            }
        }
        Even(s) => symbolic_value_at(s, n.checked_mul(2).ok_or_else(over)?, sess)?,
        Odd(s) => {
            let i = n.checked_mul(2).and_then(|i| i.checked_add(1)).ok_or_else(over)?;
            symbolic_value_at(s, i, sess)?
        }
        Zip(a, b) => symbolic_value_at(if n.is_multiple_of(2) { a } else { b }, n / 2, sess)?,
        Shifted(s, k) => symbolic_value_at(s, k.checked_add(n).ok_or_else(over)?, sess)?,
        DynamicTail(..) => SymHead::Stuck,
    })
}

/// Substitutes expressions for names: `x^k` becomes `shift(map[x], k)`.
pub fn instantiate(e: &StreamExpr, map: &HashMap<String, StreamExpr>) -> StreamExpr {
    e.map_tails(&mut |n, k| match map.get(n) {
        Some(x) => shift(x, k),
        None => StreamExpr::NameTail(n.to_string(), k),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicProof {
    /// The closed relation: every pair has equal heads and its tail pair is
    /// an instance of some pair here, up to renaming `x -> y^j`.
    pub pairs: Vec<(StreamExpr, StreamExpr)>,
}

impl Serialize for SymbolicProof {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<StatePair> = self
            .pairs
            .iter()
            .map(|(l, r)| StatePair { left: l.to_string(), right: r.to_string() })
            .collect();
        pairs.serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SymbolicVerdict {
    Proved { pairs: SymbolicProof },
    Refuted { index: u64, left: DataValue, right: DataValue },
    Unknown { reason: String },
}

type Renaming = HashMap<String, (String, u64)>;

/// Whether `target` is `pattern` with each free variable `x` replaced by some `y^j`.
fn matches(pattern: &StreamExpr, target: &StreamExpr, defs: &DefinitionSet, sigma: &mut Renaming) -> bool {
    use StreamExpr::*;
    match (pattern, target) {
        (NameTail(x, k), NameTail(y, m)) if !defs.contains(x) => {
            if defs.contains(y) || m < k {
                return false;
            }
            let image = (y.clone(), m - k);
            match sigma.get(x) {
                Some(prev) => *prev == image,
                None => {
                    sigma.insert(x.clone(), image);
                    true
                }
            }
        }
        (NameTail(x, k), NameTail(y, m)) => x == y && k == m,
        (Const(a), Const(b)) => a == b,
        (AddConst(s1, v1, a), AddConst(s2, v2, b)) | (MulConst(s1, v1, a), MulConst(s2, v2, b)) => {
            s1 == s2 && v1 == v2 && matches(a, b, defs, sigma)
        }
        (Add(a1, a2), Add(b1, b2)) | (Mul(a1, a2), Mul(b1, b2)) | (Zip(a1, a2), Zip(b1, b2)) => {
            matches(a1, b1, defs, sigma) && matches(a2, b2, defs, sigma)
        }
        (Even(a), Even(b)) | (Odd(a), Odd(b)) => matches(a, b, defs, sigma),
        (Shifted(a, j), Shifted(b, k)) => j == k && matches(a, b, defs, sigma),
        (Pairing(xs), Pairing(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| matches(x, y, defs, sigma))
        }
        (Map(c, xs), Map(d, ys)) => {
            c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| matches(x, y, defs, sigma))
        }
        _ => false,
    }
}

pub(crate) fn is_instance(pair: &(StreamExpr, StreamExpr), of: &(StreamExpr, StreamExpr), defs: &DefinitionSet) -> bool {
    let mut sigma = Renaming::new();
    matches(&of.0, &pair.0, defs, &mut sigma) && matches(&of.1, &pair.1, defs, &mut sigma)
}

/// Circular coinduction over expressions with free stream variables.
pub fn prove_equal_symbolic(
    lhs: &StreamExpr,
    rhs: &StreamExpr,
    sess: &mut EvalSession,
    pair_cap: usize,
) -> Result<SymbolicVerdict, EvalError> {
    let start = (normalize(lhs, sess.defs()), normalize(rhs, sess.defs()));
    let mut relation: Vec<(StreamExpr, StreamExpr)> = Vec::new();
    let mut queue = VecDeque::from([(start, 0u64)]);
    while let Some((pair, depth)) = queue.pop_front() {
        if pair.0 == pair.1 || relation.iter().any(|p| is_instance(&pair, p, sess.defs())) {
            continue;
        }
        if relation.len() >= pair_cap {
            return Ok(SymbolicVerdict::Unknown { reason: format!("pair cap {pair_cap} exceeded") });
        }
        let hl = symbolic_value_at(&pair.0, 0, sess)?;
        let hr = symbolic_value_at(&pair.1, 0, sess)?;
        if hl.is_stuck() || hr.is_stuck() {
            return Ok(SymbolicVerdict::Unknown { reason: "heads not comparable symbolically".into() });
        }
        if hl != hr {
            return Ok(match (hl, hr) {
                (SymHead::Known(left), SymHead::Known(right)) => {
                    SymbolicVerdict::Refuted { index: depth, left, right }
                }
                (l, r) => SymbolicVerdict::Unknown {
                    reason: format!("heads differ symbolically at index {depth}: {l} vs {r}"),
                },
            });
        }
        let next = (normalize(&tail(&pair.0), sess.defs()), normalize(&tail(&pair.1), sess.defs()));
        relation.push(pair);
        queue.push_back((next, depth + 1));
    }
    Ok(SymbolicVerdict::Proved { pairs: SymbolicProof { pairs: relation } })
}
