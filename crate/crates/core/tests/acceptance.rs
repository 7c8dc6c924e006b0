//! End-to-end acceptance checks, one line per criterion.

mod common;

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{data_file, oracle, props, session};
use corec::equiv::{
    decide_equal_rational, finite_equiv, finite_equiv_bounded, instantiate, prove_equal_symbolic, EqualityVerdict,
    FinEquivVerdict, SymbolicVerdict, DEFAULT_MAX_STATES, DEFAULT_PAIR_CAP,
};
use corec::proof::linear::{entails_linear, DataPredicate, HereditaryCandidate};
use corec::proof::{
    forall_rational, induction_bridge, induction_premises, prove_equal_by_recurrence, prove_forall,
    symbolic_proof_object, EqualityWitness, ForallOutcome, ProofError,
};
use corec::syntax::parse_window_constraints;
use corec::{parse_stream_expr, verify, DataValue, ProofObject, StreamExpr};
use num_bigint::BigInt;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn e(text: &str) -> StreamExpr {
    parse_stream_expr(text).unwrap()
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure!(took < limit, "took {took:?}, limit {limit:?}");
    Ok(took)
}

fn predicate(text: &str) -> DataPredicate {
    DataPredicate::new(parse_window_constraints(text).unwrap()).unwrap()
}

fn window(width: usize, text: &str) -> HereditaryCandidate {
    HereditaryCandidate::new(width, parse_window_constraints(text).unwrap()).unwrap()
}

fn expansion_table() -> Check {
    let start = Instant::now();
    let mut sess = session(&data_file("fib.codata"));
    let exp = sess.expand("fib", 5).map_err(|e| e.to_string())?;
    let took = within(start, Duration::from_millis(10))?;
    let prefix: Vec<String> = exp.prefix.iter().map(ToString::to_string).collect();
    ensure!(prefix == ["0", "1", "1", "2", "3", "5"], "prefix {prefix:?}");
    ensure!(exp.residual.to_string() == "fib^4 + fib^5", "residual {}", exp.residual);
    Ok(format!("{exp} in {took:?}"))
}

fn element_oracle() -> Check {
    let start = Instant::now();
    let mut sess = session(&data_file("fib.codata"));
    let (mut a, mut b) = (BigInt::from(0), BigInt::from(1));
    for n in 0..=300 {
        let got = sess.element("fib", n).unwrap();
        ensure!(got == DataValue::from(a.clone()), "fib({n}) = {got}, expected {a}");
        if n == 300 {
            ensure!(a.to_string().len() == 63, "fib(300) has {} digits", a.to_string().len());
        }
        (a, b) = (b.clone(), a + b);
    }
    let mut factorial = BigInt::from(1);
    for n in 0..=50u64 {
        if n > 0 {
            factorial *= n;
        }
        let got = sess.element("fact", n).unwrap();
        ensure!(got == DataValue::from(factorial.clone()), "fact({n}) = {got}");
    }
    for n in 0..=1000u64 {
        let got = sess.element("nat", n).unwrap();
        ensure!(got == DataValue::from(BigInt::from(n)), "nat({n}) = {got}");
    }
    let took = within(start, Duration::from_secs(1))?;
    Ok(format!("fib <= 300, fact <= 50, nat <= 1000 in {took:?}"))
}

fn iterativity() -> Check {
    let mut sess = session(&data_file("fib.codata"));
    let before = sess.step_counter();
    sess.element("fib", 1000).unwrap();
    let steps = sess.step_counter() - before;
    ensure!(steps <= 5000, "{steps} head computations");
    Ok(format!("{steps} head computations for fib(1000)"))
}

fn rational_equality() -> Check {
    let start = Instant::now();
    let mut sess = session(&data_file("osc.codata"));
    let same = decide_equal_rational(&e("s1"), &e("s2"), &mut sess, DEFAULT_MAX_STATES).unwrap();
    let differ = decide_equal_rational(&e("o2"), &e("o6"), &mut sess, DEFAULT_MAX_STATES).unwrap();
    let took = within(start, Duration::from_millis(10))?;
    let EqualityVerdict::Equal { witness } = same else { return Err(format!("s1 vs s2: {same:?}")) };
    ensure!(witness.len() <= 3, "witness of {} pairs", witness.len());
    let expected = EqualityVerdict::NotEqual { index: 2, left: DataValue::int(0), right: DataValue::int(2) };
    ensure!(differ == expected, "o2 vs o6: {differ:?}");
    Ok(format!("s1 = s2 with {} pairs, o2 != o6 at 2 in {took:?}", witness.len()))
}

fn finite_equivalence() -> Check {
    let start = Instant::now();
    let mut sess = session(&data_file("osc.codata"));
    let yes = finite_equiv(&e("(o2, o3)"), &e("o6"), &mut sess, DEFAULT_MAX_STATES).unwrap();
    let no = finite_equiv(&e("(o2, o3)"), &e("o3"), &mut sess, DEFAULT_MAX_STATES).unwrap();
    let mut unary = session(&data_file("n_nat.codata"));
    let bounded = finite_equiv_bounded(&e("n"), &e("nat"), 10_000, &mut unary).unwrap();
    let took = within(start, Duration::from_secs(1))?;

    let FinEquivVerdict::Equivalent { bijection } = yes else { return Err(format!("(o2, o3) ~ o6: {yes:?}")) };
    let listed: Vec<(String, String)> =
        bijection.pairs.iter().map(|(l, r)| (l.to_string(), r.to_string())).collect();
    let expected: Vec<(String, String)> =
        [("(0, 0)", "0"), ("(1, 1)", "1"), ("(0, 2)", "2"), ("(1, 0)", "3"), ("(0, 1)", "4"), ("(1, 2)", "5")]
            .iter()
            .map(|(l, r)| (l.to_string(), r.to_string()))
            .collect();
    ensure!(listed == expected, "bijection {listed:?}");
    ensure!(matches!(no, FinEquivVerdict::NotEquivalent { .. }), "(o2, o3) ~ o3: {no:?}");
    ensure!(bounded == FinEquivVerdict::ConsistentUpTo { bound: 10_000 }, "n ~ nat: {bounded:?}");
    Ok(format!("6-pair bijection, (o2, o3) !~ o3, n ~ nat up to 10000 in {took:?}"))
}

fn symbolic_proofs() -> Check {
    let start = Instant::now();
    let mut sess = session(&data_file("osc.codata"));
    let mut sizes = Vec::new();
    for (l, r) in [("even(zip(s, t))", "s"), ("zip(even(s), odd(s))", "s")] {
        let (l, r) = (e(l), e(r));
        let verdict = prove_equal_symbolic(&l, &r, &mut sess, DEFAULT_PAIR_CAP).unwrap();
        let SymbolicVerdict::Proved { pairs } = verdict else { return Err(format!("{l} = {r}: {verdict:?}")) };
        ensure!(pairs.pairs.len() <= 4, "{l} = {r} needed {} pairs", pairs.pairs.len());
        sizes.push(pairs.pairs.len());
        let map = HashMap::from([("s".to_string(), e("o2")), ("t".to_string(), e("o3"))]);
        for (a, b) in std::iter::once((l.clone(), r.clone())).chain(pairs.pairs.iter().cloned()) {
            let (a, b) = (instantiate(&a, &map), instantiate(&b, &map));
            let v = decide_equal_rational(&a, &b, &mut sess, DEFAULT_MAX_STATES).unwrap();
            ensure!(matches!(v, EqualityVerdict::Equal { .. }), "{a} vs {b}: {v:?}");
        }
    }
    let took = within(start, Duration::from_millis(100))?;
    Ok(format!("pair sets of sizes {sizes:?}, instances equal, in {took:?}"))
}

fn coinduction_proofs() -> Check {
    let start = Instant::now();
    let mut sess = session(&data_file("fib.codata"));
    let p = predicate("w0 > 0");
    let h = window(2, "w0 > 0 and w1 > 0");
    let proof = prove_forall(&p, "fib", &h, 1, &mut sess).map_err(|e| e.to_string())?;
    ensure!(proof.claim() == "forall n >= 1. fib(n) > 0", "claim {}", proof.claim());
    match prove_forall(&p, "fib", &h, 0, &mut sess) {
        Err(ProofError::BaseWindow { offset: 0, values, .. }) if values.first().map(String::as_str) == Some("0") => {}
        other => return Err(format!("offset 0: {other:?}")),
    }

    let mut sums = session(&data_file("sums.codata"));
    let eq = prove_equal_by_recurrence("sum1", "sum2", &mut sums).map_err(|e| e.to_string())?;
    let ProofObject::RecurrenceEqual { witness: EqualityWitness::Polynomial { polynomial }, .. } = &eq else {
        return Err(format!("sum1 = sum2: {eq:?}"));
    };
    let coeffs: Vec<String> = polynomial.coeffs().iter().map(ToString::to_string).collect();
    ensure!(coeffs == ["0", "1/2", "1/2"], "polynomial {coeffs:?}");
    for n in 0..=500u64 {
        let closed = DataValue::from(BigInt::from(n * (n + 1) / 2));
        ensure!(sums.element("sum1", n).unwrap() == closed, "sum1({n})");
    }

    let mut osc = session(&data_file("osc.codata"));
    let outcome = forall_rational(&predicate("w0 > 0"), &e("one_c"), &mut osc, DEFAULT_MAX_STATES).unwrap();
    let ForallOutcome::Proved(ProofObject::RationalForall { states, .. }) = &outcome else {
        return Err(format!("one_c > 0: {outcome:?}"));
    };
    ensure!(states.len() == 1, "{} states", states.len());
    let took = within(start, Duration::from_millis(100))?;
    Ok(format!("fib > 0 from 1, fails at 0 with fib(0) = 0, sum1 = n(n+1)/2, one_c > 0 in {took:?}"))
}

/// Every proof the library emits for the sample data.
fn emitted_proofs() -> Vec<ProofObject> {
    let mut out = Vec::new();
    let mut fib = session(&data_file("fib.codata"));
    out.push(prove_forall(&predicate("w0 > 0"), "fib", &window(2, "w0 > 0 and w1 > 0"), 1, &mut fib).unwrap());
    out.push(prove_forall(&predicate("w0 >= 0"), "fib", &window(2, "w0 >= 0 and w1 >= 0"), 0, &mut fib).unwrap());
    let mut sums = session(&data_file("sums.codata"));
    out.push(prove_equal_by_recurrence("sum1", "sum2", &mut sums).unwrap());
    let mut osc = session(&data_file("osc.codata"));
    for (p, s) in [("w0 > 0", "one_c"), ("w0 < 6 and w0 >= 0", "o6"), ("w0 <= 2", "(o3)^1")] {
        match forall_rational(&predicate(p), &e(s), &mut osc, DEFAULT_MAX_STATES).unwrap() {
            ForallOutcome::Proved(proof) => out.push(proof),
            other => panic!("{p} over {s}: {other:?}"),
        }
    }
    for (l, r) in [("even(zip(s, t))", "s"), ("zip(even(s), odd(s))", "s")] {
        let (l, r) = (e(l), e(r));
        let SymbolicVerdict::Proved { pairs } = prove_equal_symbolic(&l, &r, &mut osc, DEFAULT_PAIR_CAP).unwrap() else {
            panic!("{l} = {r} not proved");
        };
        out.push(symbolic_proof_object(&l, &r, &pairs, osc.defs()));
    }
    let p = predicate("2*w0 >= w0");
    let (base, step) = induction_premises(&p);
    out.push(induction_bridge(&p, base, step).unwrap());
    out
}

fn is_number(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    let mut parts = body.splitn(2, '/');
    let digits = |t: Option<&str>| t.is_some_and(|t| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit()));
    let num = parts.next();
    digits(num) && parts.next().is_none_or(|d| digits(Some(d)))
}

/// Every copy of `v` with exactly one numeric leaf bumped, with its path.
fn single_mutations(v: &Value) -> Vec<(String, Value)> {
    fn go(v: &Value, path: String, root: &Value, out: &mut Vec<(String, Value)>) {
        match v {
            Value::Number(n) => {
                let bumped = Value::from(n.as_u64().unwrap() + 1);
                out.push((path.clone(), replace_at(root, &path, bumped)));
            }
            Value::String(s) if is_number(s) => {
                let bumped = match s.split_once('/') {
                    Some((num, den)) => {
                        let (num, den): (BigInt, BigInt) = (num.parse().unwrap(), den.parse().unwrap());
                        format!("{}/{}", num + &den, den)
                    }
                    None => (s.parse::<BigInt>().unwrap() + 1u32).to_string(),
                };
                out.push((path.clone(), replace_at(root, &path, Value::String(bumped))));
            }
            Value::Array(items) => {
                for (i, x) in items.iter().enumerate() {
                    go(x, format!("{path}/{i}"), root, out);
                }
            }
            Value::Object(fields) => {
                for (k, x) in fields {
                    go(x, format!("{path}/{k}"), root, out);
                }
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(v, String::new(), v, &mut out);
    out
}

fn replace_at(root: &Value, pointer: &str, new: Value) -> Value {
    let mut copy = root.clone();
    *copy.pointer_mut(pointer).unwrap() = new;
    copy
}

/// Bumps the first base case of `stream` inside the embedded definitions.
fn mutate_definitions(proof: &Value, stream: &str) -> Option<Value> {
    let defs = proof["definitions"].as_str()?;
    let line = defs.lines().find(|l| l.split_once(" as [").is_some_and(|(name, _)| name.contains(stream)))?;
    let open = line.find('[')?;
    let rest = &line[open + 1..];
    let end = rest.find([',', '|'])?;
    let first = rest[..end].trim();
    let bumped = if first.starts_with('(') {
        let inner = first.trim_start_matches('(');
        let comma = inner.find(',')?;
        let v: BigInt = inner[..comma].trim().parse().ok()?;
        format!("({}{}", v + 1u32, &inner[comma..])
    } else {
        (first.parse::<BigInt>().ok()? + 1u32).to_string()
    };
    let new_line = format!("{}[{}{}", &line[..open], bumped, &rest[end..]);
    let mut copy = proof.clone();
    copy["definitions"] = Value::String(defs.replacen(line, &new_line, 1));
    Some(copy)
}

fn rejected(v: &Value) -> bool {
    match serde_json::from_value::<ProofObject>(v.clone()) {
        Ok(p) => verify(&p).is_err(),
        Err(_) => true,
    }
}

fn verifier_independence() -> Check {
    let proofs = emitted_proofs();
    let mut mutants = 0;
    for proof in &proofs {
        let text = proof.to_json();
        let back = ProofObject::from_json(&text).map_err(|e| format!("{}: {e}", proof.kind()))?;
        ensure!(back == *proof, "{} does not round-trip", proof.kind());
        let claim = verify(&back).map_err(|e| format!("{}: {e}", proof.claim()))?;
        ensure!(claim == proof.claim(), "verified claim {claim}");

        let value: Value = serde_json::from_str(&text).unwrap();
        for (path, mutant) in single_mutations(&value) {
            ensure!(rejected(&mutant), "{}: mutating {path} accepted", proof.claim());
            mutants += 1;
        }
        let stream = ["stream", "left"].iter().find_map(|k| value[*k].as_str()).unwrap_or("");
        if let Some(mutant) = mutate_definitions(&value, stream) {
            ensure!(rejected(&mutant), "{}: changed base case of {stream} accepted", proof.claim());
            mutants += 1;
        }
    }
    Ok(format!("{} proofs verified, {mutants} single-value mutations rejected", proofs.len()))
}

fn property_suites() -> Check {
    let start = Instant::now();
    for (name, suite) in props::SUITES {
        suite().map_err(|e| format!("{name}: {e}"))?;
    }
    let took = within(start, Duration::from_secs(30))?;
    Ok(format!("{} suites x {} cases in {took:?}", props::SUITES.len(), props::CASES))
}

fn entailment_oracle() -> Check {
    let corpus = oracle::corpus(200);
    let mut entailed = 0;
    for (i, inst) in corpus.iter().enumerate() {
        let expected = oracle::entails(&inst.assumptions, &inst.goal, inst.vars);
        let got = entails_linear(&inst.assumptions, &inst.goal);
        ensure!(got == expected, "instance {i}: {inst:?} gave {got}, oracle {expected}");
        entailed += usize::from(expected);
    }
    Ok(format!("200 instances agree ({entailed} entailed)"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("expansion table", expansion_table),
        ("element oracle", element_oracle),
        ("iterativity", iterativity),
        ("rational equality", rational_equality),
        ("finite equivalence", finite_equivalence),
        ("symbolic proofs", symbolic_proofs),
        ("coinduction proofs", coinduction_proofs),
        ("verifier independence", verifier_independence),
        ("property suites", property_suites),
        ("entailment oracle", entailment_oracle),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic.downcast_ref::<String>().cloned().or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
