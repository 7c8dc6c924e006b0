//! Abstract syntax of stream expressions and codata definitions.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::value::DataValue;

/// Which side of a mixed data/stream operator the data constant sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// An expression denoting a stream.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StreamExpr {
    /// `s^k`; `k = 0` is the bare name.
    NameTail(String, u64),
    /// The constant stream `const(a)`.
    Const(DataValue),
    /// `a + s` or `s + a` with `a` a data constant.
    AddConst(Side, DataValue, Box<StreamExpr>),
    /// `a * s` or `s * a` with `a` a data constant.
    MulConst(Side, DataValue, Box<StreamExpr>),
    Add(Box<StreamExpr>, Box<StreamExpr>),
    Mul(Box<StreamExpr>, Box<StreamExpr>),
    /// Pointwise grouping `(s1, ..., sn)`, `n >= 2`.
    Pairing(Vec<StreamExpr>),
    /// Pointwise application of a data constructor, `f(s1, ..., sn)`.
    Map(String, Vec<StreamExpr>),
    Even(Box<StreamExpr>),
    Odd(Box<StreamExpr>),
    Zip(Box<StreamExpr>, Box<StreamExpr>),
    /// `E^k` for a compound expression `E`; removed by normalization.
    Shifted(Box<StreamExpr>, u64),
    /// `s^t` with a stream-valued exponent. Parsed on request, never evaluable.
    DynamicTail(Box<StreamExpr>, Box<StreamExpr>),
}

impl StreamExpr {
    pub fn name(name: impl Into<String>) -> Self {
        StreamExpr::NameTail(name.into(), 0)
    }

    pub fn tail_of(name: impl Into<String>, k: u64) -> Self {
        StreamExpr::NameTail(name.into(), k)
    }

    pub fn constant(value: impl Into<DataValue>) -> Self {
        StreamExpr::Const(value.into())
    }

    pub fn add(a: StreamExpr, b: StreamExpr) -> Self {
        StreamExpr::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: StreamExpr, b: StreamExpr) -> Self {
        StreamExpr::Mul(Box::new(a), Box::new(b))
    }

    pub fn add_const(value: impl Into<DataValue>, e: StreamExpr) -> Self {
        StreamExpr::AddConst(Side::Left, value.into(), Box::new(e))
    }

    pub fn mul_const(value: impl Into<DataValue>, e: StreamExpr) -> Self {
        StreamExpr::MulConst(Side::Left, value.into(), Box::new(e))
    }

    pub fn even(e: StreamExpr) -> Self {
        StreamExpr::Even(Box::new(e))
    }

    pub fn odd(e: StreamExpr) -> Self {
        StreamExpr::Odd(Box::new(e))
    }

    pub fn zip(a: StreamExpr, b: StreamExpr) -> Self {
        StreamExpr::Zip(Box::new(a), Box::new(b))
    }

    pub fn shifted(e: StreamExpr, k: u64) -> Self {
        StreamExpr::Shifted(Box::new(e), k)
    }

    /// Direct subexpressions, in order.
    pub fn children(&self) -> Vec<&StreamExpr> {
        match self {
            StreamExpr::NameTail(..) | StreamExpr::Const(_) => vec![],
            StreamExpr::AddConst(_, _, e)
            | StreamExpr::MulConst(_, _, e)
            | StreamExpr::Even(e)
            | StreamExpr::Odd(e)
            | StreamExpr::Shifted(e, _) => vec![e],
            StreamExpr::Add(a, b)
            | StreamExpr::Mul(a, b)
            | StreamExpr::Zip(a, b)
            | StreamExpr::DynamicTail(a, b) => vec![a, b],
            StreamExpr::Pairing(items) | StreamExpr::Map(_, items) => items.iter().collect(),
        }
    }

    /// Number of nodes, counted without recursion.
    pub fn size(&self) -> usize {
        let mut stack = vec![self];
        let mut n = 0;
        while let Some(e) = stack.pop() {
            n += 1;
            stack.extend(e.children());
        }
        n
    }

    /// Calls `f` on every `NameTail` occurrence.
    pub fn visit_tails<'a>(&'a self, f: &mut impl FnMut(&'a str, u64)) {
        if let StreamExpr::NameTail(n, k) = self {
            f(n, *k);
        }
        for c in self.children() {
            c.visit_tails(f);
        }
    }

    /// Atomic names occurring anywhere in the expression.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_tails(&mut |n, _| {
            out.insert(n.to_string());
        });
        out
    }

    /// Largest tail index of any `NameTail`, or `None` when there is none.
    pub fn max_tail_depth(&self) -> Option<u64> {
        let mut best = None;
        self.visit_tails(&mut |_, k| best = Some(best.map_or(k, |b: u64| b.max(k))));
        best
    }

    pub fn contains_dynamic_tail(&self) -> bool {
        matches!(self, StreamExpr::DynamicTail(..))
            || self.children().iter().any(|c| c.contains_dynamic_tail())
    }

    /// Replaces every occurrence of an atomic name, keeping tail indices.
    pub fn rename(&self, map: &impl Fn(&str) -> Option<String>) -> StreamExpr {
        self.map_tails(&mut |n, k| StreamExpr::NameTail(map(n).unwrap_or_else(|| n.to_string()), k))
    }

    /// Rebuilds the expression with each `NameTail` replaced by `f(name, k)`.
    pub fn map_tails(&self, f: &mut impl FnMut(&str, u64) -> StreamExpr) -> StreamExpr {
        use StreamExpr::*;
        match self {
            NameTail(n, k) => f(n, *k),
            Const(v) => Const(v.clone()),
            AddConst(s, v, e) => AddConst(*s, v.clone(), Box::new(e.map_tails(f))),
            MulConst(s, v, e) => MulConst(*s, v.clone(), Box::new(e.map_tails(f))),
            Add(a, b) => Add(Box::new(a.map_tails(f)), Box::new(b.map_tails(f))),
            Mul(a, b) => Mul(Box::new(a.map_tails(f)), Box::new(b.map_tails(f))),
            Pairing(items) => Pairing(items.iter().map(|e| e.map_tails(f)).collect()),
            Map(c, items) => Map(c.clone(), items.iter().map(|e| e.map_tails(f)).collect()),
            Even(e) => Even(Box::new(e.map_tails(f))),
            Odd(e) => Odd(Box::new(e.map_tails(f))),
            Zip(a, b) => Zip(Box::new(a.map_tails(f)), Box::new(b.map_tails(f))),
            Shifted(e, k) => Shifted(Box::new(e.map_tails(f)), *k),
            DynamicTail(a, b) => DynamicTail(Box::new(a.map_tails(f)), Box::new(b.map_tails(f))),
        }
    }

    /// Dimension assuming every name is atomic (dimension 1). Mismatches
    /// are tolerated here; see [`crate::model::dimension`] for the checked version.
    pub(crate) fn loose_dimension(&self) -> usize {
        use StreamExpr::*;
        match self {
            NameTail(..) | Map(..) => 1,
            Const(v) => v.dimension(),
            AddConst(_, _, e) | MulConst(_, _, e) | Even(e) | Odd(e) | Shifted(e, _) => {
                e.loose_dimension()
            }
            DynamicTail(e, _) => e.loose_dimension(),
            Add(a, _) | Mul(a, _) | Zip(a, _) => a.loose_dimension(),
            Pairing(items) => items.iter().map(|e| e.loose_dimension()).sum(),
        }
    }

    /// The expression denoting component `index` of this (tuple-valued) stream.
    pub fn project(&self, index: usize) -> Option<StreamExpr> {
        use StreamExpr::*;
        let dim = self.loose_dimension();
        if index >= dim {
            return None;
        }
        if dim == 1 {
            return Some(self.clone());
        }
        Some(match self {
            Const(v) => Const(v.component(index)?.clone()),
            AddConst(s, v, e) => AddConst(*s, v.component(index)?.clone(), Box::new(e.project(index)?)),
            MulConst(s, v, e) => {
                let c = if v.dimension() == 1 { v.clone() } else { v.component(index)?.clone() };
                MulConst(*s, c, Box::new(e.project(index)?))
            }
            Add(a, b) => Add(Box::new(a.project(index)?), Box::new(b.project(index)?)),
            Mul(a, b) => Mul(Box::new(a.project(index)?), Box::new(b.project(index)?)),
            Pairing(items) => {
                let mut offset = 0;
                for item in items {
                    let d = item.loose_dimension();
                    if index < offset + d {
                        return item.project(index - offset);
                    }
                    offset += d;
                }
                return None;
            }
            Even(e) => Even(Box::new(e.project(index)?)),
            Odd(e) => Odd(Box::new(e.project(index)?)),
            Zip(a, b) => Zip(Box::new(a.project(index)?), Box::new(b.project(index)?)),
            Shifted(e, k) => Shifted(Box::new(e.project(index)?), *k),
            NameTail(..) | Map(..) | DynamicTail(..) => return None,
        })
    }
}

/// The name of a definition: one atomic name or a tuple of them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DefName {
    Atomic(String),
    Compound(Vec<String>),
}

impl DefName {
    pub fn components(&self) -> &[String] {
        match self {
            DefName::Atomic(n) => std::slice::from_ref(n),
            DefName::Compound(ns) => ns,
        }
    }

    pub fn dimension(&self) -> usize {
        self.components().len()
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, DefName::Atomic(_))
    }
}

impl fmt::Display for DefName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DefName::Atomic(n) => f.write_str(n),
            DefName::Compound(ns) => write!(f, "({})", ns.join(", ")),
        }
    }
}

/// `name as [d0, ..., dk | body]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodataDefinition {
    pub name: DefName,
    pub base_cases: Vec<DataValue>,
    pub body: StreamExpr,
}

impl CodataDefinition {
    pub fn new(name: DefName, base_cases: Vec<DataValue>, body: StreamExpr) -> Self {
        Self { name, base_cases, body }
    }

    pub fn dimension(&self) -> usize {
        self.name.dimension()
    }

    /// Number of base cases, i.e. the first index computed from the body.
    pub fn base_len(&self) -> u64 {
        self.base_cases.len() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` is defined more than once")]
pub struct DuplicateName(pub String);

/// Where an atomic name is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NameSlot {
    pub definition: usize,
    pub component: usize,
}

/// An ordered collection of definitions indexed by atomic name.
#[derive(Clone, Debug, Default)]
pub struct DefinitionSet {
    definitions: Vec<CodataDefinition>,
    slots: HashMap<String, NameSlot>,
    component_bodies: HashMap<String, Option<StreamExpr>>,
}

impl PartialEq for DefinitionSet {
    fn eq(&self, other: &Self) -> bool {
        self.definitions == other.definitions
    }
}

impl Eq for DefinitionSet {}

impl DefinitionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_definitions(
        defs: impl IntoIterator<Item = CodataDefinition>,
    ) -> Result<Self, DuplicateName> {
        let mut set = Self::new();
        for d in defs {
            set.insert(d)?;
        }
        Ok(set)
    }

    /// Adds a definition, rejecting any atomic name that is already bound.
    pub fn insert(&mut self, def: CodataDefinition) -> Result<(), DuplicateName> {
        let comps = def.name.components();
        for (i, n) in comps.iter().enumerate() {
            if self.slots.contains_key(n) || comps[..i].contains(n) {
                return Err(DuplicateName(n.clone()));
            }
        }
        let idx = self.definitions.len();
        for (component, n) in comps.iter().enumerate() {
            self.slots.insert(n.clone(), NameSlot { definition: idx, component });
            let body = if def.name.is_atomic() {
                Some(def.body.clone())
            } else {
                def.body.project(component)
            };
            self.component_bodies.insert(n.clone(), body);
        }
        self.definitions.push(def);
        Ok(())
    }

    pub fn definitions(&self) -> &[CodataDefinition] {
        &self.definitions
    }

    pub fn len(&self) -> usize {
        self.definitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.definitions.is_empty()
    }

    pub fn slot(&self, name: &str) -> Option<NameSlot> {
        self.slots.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.slots.contains_key(name)
    }

    /// The owning definition of an atomic name and the name's component index.
    pub fn lookup(&self, name: &str) -> Option<(&CodataDefinition, usize)> {
        self.slot(name)
            .map(|s| (&self.definitions[s.definition], s.component))
    }

    /// The defining expression restricted to one atomic name's component.
    pub fn component_body(&self, name: &str) -> Option<&StreamExpr> {
        self.component_bodies.get(name).and_then(|b| b.as_ref())
    }

    /// Base case `i` of an atomic name (its component, for compound definitions).
    pub fn base_case(&self, name: &str, i: usize) -> Option<&DataValue> {
        let (def, comp) = self.lookup(name)?;
        let value = def.base_cases.get(i)?;
        if def.name.is_atomic() {
            Some(value)
        } else {
            value.component(comp)
        }
    }

    /// Atomic names in definition order.
    pub fn atomic_names(&self) -> impl Iterator<Item = &str> {
        self.definitions
            .iter()
            .flat_map(|d| d.name.components().iter().map(String::as_str))
    }
}
