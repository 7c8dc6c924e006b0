//! Randomized laws over a fixed definition set, shared by the property tests
//! and the acceptance suite.

use std::cell::RefCell;

use corec::eval::{normalize, shift, tail};
use corec::syntax::parse_stream_expr;
use corec::{DataValue, EvalSession, StreamExpr};
use proptest::prelude::*;
use proptest::sample::select;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

use super::{session, LIB};

pub const CASES: u32 = 10_000;
pub const SEED: u64 = 0x00c0_dec0_2026;

/// Scalar names usable inside generated expressions.
pub const NAMES: &[&str] = &["fib", "nat", "o2", "o3", "o6", "one_c", "s2", "f", "g", "tri"];

pub fn config() -> Config {
    Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..Config::default()
    }
}

fn leaf() -> BoxedStrategy<StreamExpr> {
    prop_oneof![
        3 => (select(NAMES), 0u64..4).prop_map(|(n, k)| StreamExpr::tail_of(n, k)),
        1 => (-3i64..=3).prop_map(|c| StreamExpr::constant(DataValue::int(c))),
    ]
    .boxed()
}

/// Scalar stream expressions of depth at most 3.
pub fn expr() -> BoxedStrategy<StreamExpr> {
    leaf()
        .prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| StreamExpr::add(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| StreamExpr::mul(a, b)),
                (-3i64..=3, inner.clone()).prop_map(|(c, e)| StreamExpr::mul_const(c, e)),
                (-3i64..=3, inner.clone()).prop_map(|(c, e)| StreamExpr::add_const(c, e)),
                inner.clone().prop_map(StreamExpr::even),
                inner.clone().prop_map(StreamExpr::odd),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| StreamExpr::zip(a, b)),
                (inner, 1u64..4).prop_map(|(e, k)| StreamExpr::shifted(e, k)),
            ]
        })
        .boxed()
}

fn run<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(&mut EvalSession, S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let sess = RefCell::new(session(LIB));
    TestRunner::new(config())
        .run(&strategy, |v| test(&mut sess.borrow_mut(), v))
        .map_err(|e| format!("{name}: {e}"))
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

pub fn normalize_idempotent() -> Result<(), String> {
    run("normalize idempotence", expr(), |sess, e| {
        let once = normalize(&e, sess.defs());
        let twice = normalize(&once, sess.defs());
        prop_assert_eq!(&twice, &once, "for {}", e);
        for n in [0, 1, 5] {
            prop_assert_eq!(ok(sess.value_at(&once, n))?, ok(sess.value_at(&e, n))?, "value at {} of {}", n, e);
        }
        Ok(())
    })
}

pub fn shift_composition() -> Result<(), String> {
    run("shift composition", (expr(), 0u64..20, 0u64..20), |sess, (e, a, b)| {
        let stepwise = shift(&shift(&e, a), b);
        let direct = shift(&e, a + b);
        prop_assert_eq!(
            normalize(&stepwise, sess.defs()),
            normalize(&direct, sess.defs()),
            "shift({}, {}) then {}",
            e,
            a,
            b
        );
        for m in [0, 3] {
            prop_assert_eq!(ok(sess.value_at(&stepwise, m))?, ok(sess.value_at(&e, a + b + m))?);
        }
        Ok(())
    })
}

pub fn pointwise_laws() -> Result<(), String> {
    run("pointwise laws", (expr(), expr(), 0u64..=200), |sess, (s, t, n)| {
        let l = ok(sess.value_at(&s, n))?;
        let r = ok(sess.value_at(&t, n))?;
        let sum = ok(sess.value_at(&StreamExpr::add(s.clone(), t.clone()), n))?;
        let product = ok(sess.value_at(&StreamExpr::mul(s.clone(), t.clone()), n))?;
        prop_assert_eq!(sum, ok(l.add(&r))?, "{} + {} at {}", s, t, n);
        prop_assert_eq!(product, ok(l.mul(&r))?, "{} * {} at {}", s, t, n);
        Ok(())
    })
}

pub fn expansion_matches_iterated_tail() -> Result<(), String> {
    run("expansion vs iterated tail", (select(NAMES), 0u64..=200), |sess, (name, n)| {
        let last = sess.defs().lookup(name).unwrap().0.base_len() - 1;
        let n = n.max(last);
        let exp = ok(sess.expand(name, n))?;
        let mut e = StreamExpr::name(name);
        for (i, v) in exp.prefix.iter().enumerate() {
            prop_assert_eq!(&ok(sess.head(&e))?, v, "{}({})", name, i);
            e = normalize(&tail(&e), sess.defs());
        }
        prop_assert_eq!(normalize(&exp.residual, sess.defs()), e.clone(), "residual of {}[{}]", name, n);
        prop_assert_eq!(ok(sess.head(&exp.residual))?, ok(sess.element(name, n + 1))?);
        Ok(())
    })
}

pub fn printed_expressions_reparse() -> Result<(), String> {
    run("print/parse round trip", expr(), |sess, e| {
        let norm = normalize(&e, sess.defs());
        let text = norm.to_string();
        let back = ok(parse_stream_expr(&text))?;
        prop_assert_eq!(normalize(&back, sess.defs()), norm, "printed as {}", text);
        Ok(())
    })
}

pub type Suite = (&'static str, fn() -> Result<(), String>);

pub const SUITES: &[Suite] = &[
    ("normalize idempotence", normalize_idempotent),
    ("shift composition", shift_composition),
    ("pointwise laws", pointwise_laws),
    ("expansion vs iterated tail", expansion_matches_iterated_tail),
];
