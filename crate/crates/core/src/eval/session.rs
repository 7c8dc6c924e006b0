use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::rewrite::shift;
use crate::error::EvalError;
use crate::expr::{DefinitionSet, StreamExpr};
use crate::value::DataValue;

/// The `n`-th expansion `[s(0), ..., s(n) | E^(n-k)]` of a definition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Expansion {
    pub name: String,
    pub n: u64,
    pub prefix: Vec<DataValue>,
    #[serde(serialize_with = "serialize_display")]
    pub residual: StreamExpr,
}

fn serialize_display<S: serde::Serializer>(e: &StreamExpr, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(e)
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.prefix.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            v.fmt_in_expr(f)?;
        }
        write!(f, " | {}]", self.residual)
    }
}

/// Evaluation state over a fixed definition set. Elements of each name are
/// memoized and filled bottom-up, so a linear recurrence costs one head
/// computation per index.
#[derive(Debug)]
pub struct EvalSession {
    defs: DefinitionSet,
    memo: HashMap<String, Vec<DataValue>>,
    filling: HashSet<String>,
    steps: u64,
}

impl EvalSession {
    pub fn new(defs: DefinitionSet) -> Self {
        Self { defs, memo: HashMap::new(), filling: HashSet::new(), steps: 0 }
    }

    pub fn defs(&self) -> &DefinitionSet {
        &self.defs
    }

    /// Number of element computations performed so far.
    pub fn step_counter(&self) -> u64 {
        self.steps
    }

    /// Memoized elements past the base cases, per name.
    pub fn memo_snapshot(&self) -> BTreeMap<String, Vec<DataValue>> {
        self.memo.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }

    /// `s(n)` for an atomic name `s`.
    pub fn element(&mut self, name: &str, n: u64) -> Result<DataValue, EvalError> {
        let (def, component) = self.defs.lookup(name).ok_or_else(|| EvalError::UnknownName(name.into()))?;
        let base = def.base_len();
        if n < base {
            return self.defs.base_case(name, n as usize).cloned().ok_or_else(|| EvalError::Component {
                index: component,
                value: def.base_cases[n as usize].to_string(),
            });
        }
        let target = n - base;
        let filled = self.memo.get(name).map_or(0, Vec::len) as u64;
        if target < filled {
            return Ok(self.memo[name][target as usize].clone());
        }
        if !self.filling.insert(name.to_string()) {
            return Err(EvalError::Unproductive { name: name.into(), index: n });
        }
        let projected = self.defs.component_body(name).cloned();
        let whole = def.body.clone();
        let result = (|| {
            for i in filled..=target {
                let v = match &projected {
                    Some(body) => self.value_at(body, i)?,
                    None => {
                        let v = self.value_at(&whole, i)?;
                        v.component(component)
                            .cloned()
                            .ok_or_else(|| EvalError::Component { index: component, value: v.to_string() })?
                    }
                };
                self.steps += 1;
                self.memo.entry(name.to_string()).or_default().push(v);
            }
            Ok(self.memo[name][target as usize].clone())
        })();
        self.filling.remove(name);
        result
    }

    /// Element `n` of an arbitrary expression, by the pointwise head rules.
    pub fn value_at(&mut self, e: &StreamExpr, n: u64) -> Result<DataValue, EvalError> {
        use StreamExpr::*;
        let idx = |a: u64, b: u64| a.checked_add(b).ok_or(EvalError::IndexOverflow(n));
        match e {
            NameTail(t, k) => {
                let i = idx(*k, n)?;
                if !self.defs.contains(t) {
                    return Err(EvalError::FreeVariable(t.clone()));
                }
                self.element(t, i)
            }
            Const(v) => Ok(v.clone()),
            AddConst(side, v, s) => {
                let x = self.value_at(s, n)?;
                match side {
                    crate::expr::Side::Left => v.add(&x),
                    crate::expr::Side::Right => x.add(v),
                }
            }
            MulConst(side, v, s) => {
                let x = self.value_at(s, n)?;
                match side {
                    crate::expr::Side::Left => v.mul(&x),
                    crate::expr::Side::Right => x.mul(v),
                }
            }
            Add(a, b) => {
                let x = self.value_at(a, n)?;
                x.add(&self.value_at(b, n)?)
            }
            Mul(a, b) => {
                let x = self.value_at(a, n)?;
                x.mul(&self.value_at(b, n)?)
            }
            Pairing(items) => {
                let mut out = Vec::new();
                for item in items {
                    match self.value_at(item, n)? {
                        DataValue::Tuple(vs) => out.extend(vs),
                        v => out.push(v),
                    }
                }
                Ok(DataValue::tuple(out))
            }
            Map(c, items) => {
                let args = items.iter().map(|i| self.value_at(i, n)).collect::<Result<_, _>>()?;
                Ok(DataValue::constructor(c.clone(), args))
            }
            Even(s) => self.value_at(s, n.checked_mul(2).ok_or(EvalError::IndexOverflow(n))?),
            Odd(s) => {
                let i = n.checked_mul(2).and_then(|i| i.checked_add(1)).ok_or(EvalError::IndexOverflow(n))?;
                self.value_at(s, i)
            }
            Zip(a, b) => {
                if n.is_multiple_of(2) {
                    self.value_at(a, n / 2)
                } else {
                    self.value_at(b, n / 2)
                }
            }
            Shifted(s, k) => self.value_at(s, idx(*k, n)?),
            DynamicTail(..) => Err(EvalError::DynamicTail),
        }
    }

    /// `e(0)`.
    pub fn head(&mut self, e: &StreamExpr) -> Result<DataValue, EvalError> {
        self.value_at(e, 0)
    }

    /// The first `len` elements of `e`.
    pub fn prefix(&mut self, e: &StreamExpr, len: u64) -> Result<Vec<DataValue>, EvalError> {
        (0..len).map(|i| self.value_at(e, i)).collect()
    }

    /// The `n`-th expansion of `name`; `n` must reach the last base case.
    pub fn expand(&mut self, name: &str, n: u64) -> Result<Expansion, EvalError> {
        let (def, _) = self.defs.lookup(name).ok_or_else(|| EvalError::UnknownName(name.into()))?;
        let last = def.base_len() - 1;
        if n < last {
            return Err(EvalError::ExpansionBelowBase { n, last });
        }
        let body = self.defs.component_body(name).cloned().unwrap_or_else(|| def.body.clone());
        let residual = shift(&body, n - last);
        let prefix = (0..=n).map(|i| self.element(name, i)).collect::<Result<_, _>>()?;
        Ok(Expansion { name: name.into(), n, prefix, residual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_definitions, parse_stream_expr, ParseOptions, SourceText};

    fn session(src: &str) -> EvalSession {
        EvalSession::new(parse_definitions(&SourceText::repl(src), ParseOptions::default()).unwrap())
    }

    const LIB: &str = "fib as [0, 1 | fib + fib^1]\n\
                       nat as [0 | 1 + nat]\n\
                       fact as [1 | nat^1 * fact]\n\
                       o2 as [0, 1 | o2]\n\
                       o3 as [0, 1, 2 | o3]\n\
                       (f, g) as [(0, 1) | (g, 2*f)]";

    #[test]
    fn small_elements() {
        let mut s = session(LIB);
        assert_eq!(s.element("fib", 7).unwrap(), DataValue::int(13));
        assert_eq!(s.element("nat", 5).unwrap(), DataValue::int(5));
        assert_eq!(s.element("fact", 5).unwrap(), DataValue::int(120));
        assert_eq!(s.element("g", 2).unwrap(), DataValue::int(2));
        assert_eq!(s.element("f", 4).unwrap(), DataValue::int(0));
    }

    #[test]
    fn heads_of_expressions() {
        let mut s = session(LIB);
        let e = |x: &str| parse_stream_expr(x).unwrap();
        assert_eq!(s.head(&e("fib^4 + fib^5")).unwrap(), DataValue::int(8));
        assert_eq!(s.head(&e("zip(o2, o3)")).unwrap(), DataValue::int(0));
        assert_eq!(s.head(&e("const(7)")).unwrap(), DataValue::int(7));
        assert_eq!(s.value_at(&e("(o2, o3)"), 4).unwrap(), DataValue::tuple(vec![0.into(), 1.into()]));
        assert_eq!(s.value_at(&e("odd(nat)"), 3).unwrap(), DataValue::int(7));
    }

    #[test]
    fn expansions() {
        let mut s = session(LIB);
        let x = s.expand("fib", 5).unwrap();
        assert_eq!(x.to_string(), "[0, 1, 1, 2, 3, 5 | fib^4 + fib^5]");
        assert_eq!(s.expand("fib", 1).unwrap().residual, parse_stream_expr("fib + fib^1").unwrap());
        assert_eq!(s.expand("nat", 3).unwrap().prefix, vec![0.into(), 1.into(), 2.into(), 3.into()]);
        assert_eq!(s.expand("fib", 0), Err(EvalError::ExpansionBelowBase { n: 0, last: 1 }));
    }

    #[test]
    fn evaluation_is_linear() {
        let mut s = session(LIB);
        s.element("fib", 1000).unwrap();
        assert_eq!(s.step_counter(), 999);
        s.element("fib", 1001).unwrap();
        assert_eq!(s.step_counter(), 1000);
    }

    #[test]
    fn type_errors_are_reported() {
        let mut s = session("p as [(0, 1) | p]\nbad as [0 | 1 + p]");
        assert!(matches!(s.element("bad", 1), Err(EvalError::TypeMismatch { op: "+", .. })));
    }

    #[test]
    fn unproductive_definitions_fail() {
        let mut s = session("z as [0 | even(z^1)]");
        assert!(matches!(s.element("z", 3), Err(EvalError::Unproductive { .. })));
    }
}
