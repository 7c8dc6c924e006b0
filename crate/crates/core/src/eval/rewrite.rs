//! Syntactic operations on stream expressions: shifting, one-step tails and
//! normalization to a canonical form.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::expr::{DefinitionSet, Side, StreamExpr};
use crate::value::{rat_add, rat_mul, DataValue};

/// Default bound on unfolding passes in [`normalize`].
pub const DEFAULT_UNFOLD_FUEL: usize = 20_000;

/// `e^k`: the expression denoting the `k`-th tail of `e`.
///
/// Tails of `even`, `odd` and `zip` are resolved with their closed forms,
/// which agree with applying the one-step rules `k` times.
pub fn shift(e: &StreamExpr, k: u64) -> StreamExpr {
    use StreamExpr::*;
    if k == 0 {
        return strip_shifts(e);
    }
    let b = |x: &StreamExpr| Box::new(shift(x, k));
    match e {
        NameTail(n, j) => NameTail(n.clone(), j.saturating_add(k)),
        Const(v) => Const(v.clone()),
        AddConst(s, v, x) => AddConst(*s, v.clone(), b(x)),
        MulConst(s, v, x) => MulConst(*s, v.clone(), b(x)),
        Add(x, y) => Add(b(x), b(y)),
        Mul(x, y) => Mul(b(x), b(y)),
        Pairing(items) => Pairing(items.iter().map(|x| shift(x, k)).collect()),
        Map(c, items) => Map(c.clone(), items.iter().map(|x| shift(x, k)).collect()),
        Even(x) => Even(Box::new(shift(x, k.saturating_mul(2)))),
        Odd(x) => Odd(Box::new(shift(x, k.saturating_mul(2)))),
        Zip(x, y) => {
            if k.is_multiple_of(2) {
                Zip(Box::new(shift(x, k / 2)), Box::new(shift(y, k / 2)))
            } else {
                Zip(Box::new(shift(y, k / 2)), Box::new(shift(x, k / 2 + 1)))
            }
        }
        Shifted(x, j) => shift(x, j.saturating_add(k)),
        DynamicTail(..) => Shifted(Box::new(strip_shifts(e)), k),
    }
}

/// Removes `Shifted` nodes wherever a closed form exists.
fn strip_shifts(e: &StreamExpr) -> StreamExpr {
    use StreamExpr::*;
    match e {
        Shifted(x, j) => shift(x, *j),
        NameTail(..) | Const(_) => e.clone(),
        AddConst(s, v, x) => AddConst(*s, v.clone(), Box::new(strip_shifts(x))),
        MulConst(s, v, x) => MulConst(*s, v.clone(), Box::new(strip_shifts(x))),
        Add(x, y) => Add(Box::new(strip_shifts(x)), Box::new(strip_shifts(y))),
        Mul(x, y) => Mul(Box::new(strip_shifts(x)), Box::new(strip_shifts(y))),
        Pairing(items) => Pairing(items.iter().map(strip_shifts).collect()),
        Map(c, items) => Map(c.clone(), items.iter().map(strip_shifts).collect()),
        Even(x) => Even(Box::new(strip_shifts(x))),
        Odd(x) => Odd(Box::new(strip_shifts(x))),
        Zip(x, y) => Zip(Box::new(strip_shifts(x)), Box::new(strip_shifts(y))),
        DynamicTail(x, y) => DynamicTail(Box::new(strip_shifts(x)), Box::new(strip_shifts(y))),
    }
}

/// One-step tail. Names are not unfolded, so `tail(fib^1 + fib^2)` is
/// `fib^2 + fib^3`.
pub fn tail(e: &StreamExpr) -> StreamExpr {
    shift(e, 1)
}

type Monomial = Vec<StreamExpr>;

/// A polynomial over non-arithmetic atoms with rational coefficients.
#[derive(Clone, Debug, Default)]
struct Poly {
    constant: BigRational,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    fn constant(c: BigRational) -> Self {
        Poly { constant: c, terms: BTreeMap::new() }
    }

    fn atom(e: StreamExpr) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![e], BigRational::one());
        Poly { constant: BigRational::zero(), terms }
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if m.is_empty() {
            self.constant = rat_add(&self.constant, &c);
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(BigRational::zero);
        *slot = rat_add(slot, &c);
        if slot.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    fn add(mut self, other: Poly) -> Poly {
        self.constant = rat_add(&self.constant, &other.constant);
        for (m, c) in other.terms {
            self.add_term(m, c);
        }
        self
    }

    fn scale(mut self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::default();
        }
        self.constant = rat_mul(&self.constant, k);
        for c in self.terms.values_mut() {
            *c = rat_mul(c, k);
        }
        self
    }

    fn entries(&self) -> impl Iterator<Item = (Monomial, &BigRational)> {
        std::iter::once((Vec::new(), &self.constant)).chain(self.terms.iter().map(|(m, c)| (m.clone(), c)))
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (m1, c1) in self.entries() {
            for (m2, c2) in other.entries() {
                let mut m = m1.clone();
                m.extend(m2);
                m.sort();
                out.add_term(m, rat_mul(c1, c2));
            }
        }
        out
    }

    fn render(self, dimension: usize) -> StreamExpr {
        let mut sum: Option<StreamExpr> = None;
        for (m, c) in self.terms {
            let mono = m
                .into_iter()
                .reduce(StreamExpr::mul)
                .expect("monomials are non-empty");
            let term = if c.is_one() {
                mono
            } else {
                StreamExpr::MulConst(Side::Left, DataValue::number(c), Box::new(mono))
            };
            sum = Some(match sum {
                None => term,
                Some(s) => StreamExpr::add(s, term),
            });
        }
        match sum {
            None if dimension > 1 && self.constant.is_zero() => {
                StreamExpr::Const(DataValue::tuple(vec![DataValue::int(0); dimension]))
            }
            None => StreamExpr::Const(DataValue::number(self.constant)),
            Some(s) if self.constant.is_zero() => s,
            Some(s) => StreamExpr::AddConst(Side::Left, DataValue::number(self.constant), Box::new(s)),
        }
    }
}

fn is_arith(e: &StreamExpr) -> bool {
    matches!(
        e,
        StreamExpr::Add(..) | StreamExpr::Mul(..) | StreamExpr::AddConst(..) | StreamExpr::MulConst(..)
    )
}

/// Polynomial view of an expression whose children are already canonical.
fn poly_of(e: &StreamExpr) -> Poly {
    use StreamExpr::*;
    match e {
        Const(v) => match v.as_rational() {
            Some(r) => Poly::constant(r),
            None => Poly::atom(e.clone()),
        },
        Add(a, b) => poly_of(a).add(poly_of(b)),
        Mul(a, b) => poly_of(a).mul(&poly_of(b)),
        AddConst(_, v, s) => match v.as_rational() {
            Some(r) => poly_of(s).add(Poly::constant(r)),
            None => Poly::atom(e.clone()),
        },
        MulConst(_, v, s) => match v.as_rational() {
            Some(r) => poly_of(s).scale(&r),
            None => Poly::atom(e.clone()),
        },
        other => Poly::atom(other.clone()),
    }
}

fn flatten_consts(items: &[StreamExpr]) -> Option<DataValue> {
    let mut values = Vec::new();
    for item in items {
        match item {
            StreamExpr::Const(DataValue::Tuple(vs)) => values.extend(vs.iter().cloned()),
            StreamExpr::Const(v) => values.push(v.clone()),
            _ => return None,
        }
    }
    Some(DataValue::tuple(values))
}

/// Canonical form without unfolding definitions: shifts collapsed, sums and
/// products flattened into a sorted polynomial, constants folded.
pub fn canonicalize(e: &StreamExpr) -> StreamExpr {
    use StreamExpr::*;
    let b = |x: &StreamExpr| Box::new(canonicalize(x));
    match e {
        NameTail(..) | Const(_) => e.clone(),
        Shifted(x, k) => {
            let s = shift(x, *k);
            if matches!(s, Shifted(..)) {
                match s {
                    Shifted(inner, k) => Shifted(b(&inner), k),
                    _ => unreachable!(),
                }
            } else {
                canonicalize(&s)
            }
        }
        AddConst(s, v, x) => arith(AddConst(*s, v.clone(), b(x))),
        MulConst(s, v, x) => arith(MulConst(*s, v.clone(), b(x))),
        Add(x, y) => arith(Add(b(x), b(y))),
        Mul(x, y) => arith(Mul(b(x), b(y))),
        Pairing(items) => {
            let items: Vec<_> = items.iter().map(canonicalize).collect();
            match flatten_consts(&items) {
                Some(v) => Const(v),
                None => Pairing(items),
            }
        }
        Map(c, items) => {
            let items: Vec<_> = items.iter().map(canonicalize).collect();
            if items.iter().all(|i| matches!(i, Const(_))) {
                let args = items
                    .into_iter()
                    .map(|i| match i {
                        Const(v) => v,
                        _ => unreachable!(),
                    })
                    .collect();
                Const(DataValue::constructor(c.clone(), args))
            } else {
                Map(c.clone(), items)
            }
        }
        Even(x) | Odd(x) => {
            let x = canonicalize(x);
            match x {
                Const(v) => Const(v),
                x if matches!(e, Even(_)) => Even(Box::new(x)),
                x => Odd(Box::new(x)),
            }
        }
        Zip(x, y) => {
            let (x, y) = (canonicalize(x), canonicalize(y));
            match (&x, &y) {
                (Const(a), Const(c)) if a == c => x,
                _ => Zip(Box::new(x), Box::new(y)),
            }
        }
        DynamicTail(x, y) => DynamicTail(b(x), b(y)),
    }
}

/// Folds an arithmetic node with canonical children. Nodes mixing
/// non-numeric constants stay as they are.
fn arith(e: StreamExpr) -> StreamExpr {
    debug_assert!(is_arith(&e));
    let dimension = e.loose_dimension();
    poly_of(&e).render(dimension)
}

/// Sum-of-monomials view of `e` after canonicalization: the constant term
/// and each product of non-arithmetic atoms with its coefficient.
pub fn polynomial_terms(e: &StreamExpr) -> (BigRational, Vec<(Vec<StreamExpr>, BigRational)>) {
    let p = poly_of(&canonicalize(e));
    (p.constant, p.terms.into_iter().collect())
}

/// `shift(body, k - #base)` for `t^k` at or past `t`'s base cases, when
/// that does not deepen the expression.
fn unfolding(n: &str, k: u64, defs: &DefinitionSet) -> Option<StreamExpr> {
    let (def, _) = defs.lookup(n)?;
    let base = def.base_len();
    if k < base {
        return None;
    }
    let unfolded = shift(defs.component_body(n)?, k - base);
    if unfolded.contains_dynamic_tail() || unfolded.max_tail_depth().is_some_and(|d| d > k) {
        None
    } else {
        Some(unfolded)
    }
}

/// Unfolds, for each name, its deepest unfoldable tail. Taking only the
/// deepest keeps recurrences at their own width instead of spreading over
/// every intermediate tail.
fn unfold_once(e: &StreamExpr, defs: &DefinitionSet) -> StreamExpr {
    let mut deepest: BTreeMap<String, (u64, StreamExpr)> = BTreeMap::new();
    e.visit_tails(&mut |n, k| {
        if deepest.get(n).is_some_and(|(d, _)| *d >= k) {
            return;
        }
        if let Some(u) = unfolding(n, k, defs) {
            deepest.insert(n.to_string(), (k, u));
        }
    });
    e.map_tails(&mut |n, k| match deepest.get(n) {
        Some((d, u)) if *d == k => u.clone(),
        _ => StreamExpr::NameTail(n.to_string(), k),
    })
}

/// Canonical form with guarded unfolding of names, repeated to a fixpoint.
pub fn normalize(e: &StreamExpr, defs: &DefinitionSet) -> StreamExpr {
    normalize_with_fuel(e, defs, DEFAULT_UNFOLD_FUEL)
}

/// As [`normalize`], stopping after `fuel` unfolding passes.
pub fn normalize_with_fuel(e: &StreamExpr, defs: &DefinitionSet, fuel: usize) -> StreamExpr {
    let mut cur = canonicalize(e);
    for _ in 0..fuel {
        let next = canonicalize(&unfold_once(&cur, defs));
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_definitions, parse_stream_expr, ParseOptions, SourceText};

    fn e(s: &str) -> StreamExpr {
        parse_stream_expr(s).unwrap()
    }

    fn fib() -> DefinitionSet {
        parse_definitions(&SourceText::repl("fib as [0, 1 | fib + fib^1]"), ParseOptions::default()).unwrap()
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift(&e("fib^1 + fib^2"), 3), e("fib^4 + fib^5"));
        assert_eq!(shift(&e("fib + fib^1"), 0), e("fib + fib^1"));
        assert_eq!(shift(&e("const(1)"), 5), e("const(1)"));
    }

    #[test]
    fn one_step_tails() {
        assert_eq!(tail(&e("zip(s, t)")), e("zip(t, s^1)"));
        assert_eq!(tail(&e("even(s)")), e("even(s^2)"));
        assert_eq!(tail(&e("odd(s)")), e("odd(s^2)"));
        assert_eq!(tail(&e("fib^1 + fib^2")), e("fib^2 + fib^3"));
    }

    #[test]
    fn zip_closed_form_matches_single_steps() {
        let z = e("zip(even(s), odd(t^1))");
        let mut stepped = z.clone();
        for k in 0..7 {
            assert_eq!(shift(&z, k), stepped);
            stepped = tail(&stepped);
        }
    }

    #[test]
    fn nested_tails_collapse() {
        assert_eq!(canonicalize(&e("fib^1^2")), e("fib^3"));
        assert_eq!(canonicalize(&e("(fib + fib^1)^2")), e("fib^2 + fib^3"));
    }

    #[test]
    fn constants_fold() {
        assert_eq!(canonicalize(&e("const(1) + const(2)")), e("const(3)"));
        assert_eq!(canonicalize(&e("2 * const(3) + 1")), e("const(7)"));
        assert_eq!(canonicalize(&e("(const(0), const(1))")), e("const((0, 1))"));
    }

    #[test]
    fn like_terms_collect() {
        assert_eq!(canonicalize(&e("x + x")), e("2 * x"));
        assert_eq!(canonicalize(&e("x - x")), e("const(0)"));
        assert_eq!(canonicalize(&e("y + 1 + x")), e("1 + (x + y)"));
        assert_eq!(canonicalize(&e("(1 + x) * 2")), e("2 + 2 * x"));
    }

    #[test]
    fn unfold_at_boundary() {
        let d = fib();
        assert_eq!(normalize(&e("fib^2"), &d), e("fib + fib^1"));
        assert_eq!(normalize(&e("fib^1"), &d), e("fib^1"));
        assert_eq!(normalize(&e("fib^3"), &d), e("fib + 2 * fib^1"));
    }

    #[test]
    fn normalize_is_idempotent_on_deep_tails() {
        let d = fib();
        let once = normalize(&e("fib^40 * fib^3 + even(fib^7)"), &d);
        assert_eq!(normalize(&once, &d), once);
    }
}
