//! Queries: `eval`, `expand`, `equal`, `fequiv` and `prove forall`.

use std::fmt;

use num_rational::BigRational;

use super::diag::{ParseDiagnostic, ParseErrors};
use super::lexer::{lex_line, Tok};
use super::parser::{Parser, SourceText};
use super::ParseOptions;
use crate::expr::StreamExpr;
use crate::proof::linear::{DataPredicate, HereditaryCandidate, LinearConstraint, LinearExpr, Relation};

/// How `equal` should decide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EqualMethod {
    #[default]
    Auto,
    Bisim,
    Symbolic,
    Bounded,
    Recurrence,
}

impl EqualMethod {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "auto" => Self::Auto,
            "bisim" => Self::Bisim,
            "symbolic" => Self::Symbolic,
            "bounded" => Self::Bounded,
            "recurrence" => Self::Recurrence,
            _ => return None,
        })
    }
}

impl fmt::Display for EqualMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Auto => "auto",
            Self::Bisim => "bisim",
            Self::Symbolic => "symbolic",
            Self::Bounded => "bounded",
            Self::Recurrence => "recurrence",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    Element { name: String, index: u64 },
    Expand { name: String, index: u64 },
    Equal { left: StreamExpr, right: StreamExpr, method: EqualMethod },
    FinEquiv { left: StreamExpr, right: StreamExpr },
    /// `∀n. p(stream(n))`, optionally with a window candidate `H`.
    Forall {
        predicate: DataPredicate,
        stream: StreamExpr,
        candidate: Option<HereditaryCandidate>,
    },
    /// `prove a = b`: equality with a checkable certificate.
    ProveEqual { left: StreamExpr, right: StreamExpr },
}

/// Parses one query line.
pub fn parse_query(src: &SourceText) -> Result<Query, ParseErrors> {
    parse_query_with(src, ParseOptions::default())
}

pub fn parse_query_with(src: &SourceText, opts: ParseOptions) -> Result<Query, ParseErrors> {
    let line = src.content.trim_end_matches(['\n', '\r']);
    if line.contains('\n') {
        let span = super::Span::new(2, 1, 1);
        return Err(ParseDiagnostic::error("a query must fit on one line", span).into());
    }
    let toks = lex_line(line, 1)?;
    let mut p = Parser::new(&toks, 1, opts);
    let q = query(&mut p)?;
    p.expect_end()?;
    Ok(q)
}

fn query(p: &mut Parser<'_>) -> Result<Query, ParseDiagnostic> {
    let head = match p.peek() {
        Some(Tok::Ident(s)) => s.clone(),
        _ => return p.error("expected a query (`eval`, `expand`, `equal`, `fequiv` or `prove`)"),
    };
    let head_span = p.here();
    p.ident("query")?;
    match head.as_str() {
        "eval" | "expand" => {
            let name = p.ident("a codata name")?;
            let index = p.natural("an index")?;
            Ok(if head == "eval" {
                Query::Element { name, index }
            } else {
                Query::Expand { name, index }
            })
        }
        "equal" | "fequiv" => {
            let left = p.stream_expr()?;
            let right = p.stream_expr()?;
            if head == "fequiv" {
                return Ok(Query::FinEquiv { left, right });
            }
            let mut method = EqualMethod::Auto;
            if p.eat_keyword("by") {
                let span = p.here();
                let m = p.ident("a method name")?;
                method = EqualMethod::parse(&m).ok_or_else(|| {
                    ParseDiagnostic::error(
                        format!("unknown method `{m}`: expected auto, bisim, symbolic, bounded or recurrence"),
                        span,
                    )
                })?;
            }
            Ok(Query::Equal { left, right, method })
        }
        "prove" => prove(p),
        other => Err(ParseDiagnostic::error(
            format!("unknown query `{other}`: expected eval, expand, equal, fequiv or prove"),
            head_span,
        )),
    }
}

fn prove(p: &mut Parser<'_>) -> Result<Query, ParseDiagnostic> {
    if !p.eat_keyword("forall") {
        let left = p.stream_expr()?;
        p.expect(&Tok::EqSign, "`forall` or `=` after `prove`")?;
        let right = p.stream_expr()?;
        return Ok(Query::ProveEqual { left, right });
    }
    let var = p.ident("a bound index variable")?;
    p.expect(&Tok::Dot, "`.` after the bound variable")?;
    let mut stream: Option<StreamExpr> = None;
    let mut constraints = vec![linear_constraint(p, &mut |p| stream_application(p, &var, &mut stream))?];
    while p.eat_keyword("and") {
        constraints.push(linear_constraint(p, &mut |p| stream_application(p, &var, &mut stream))?);
    }
    let Some(stream) = stream else {
        return p.error("the predicate must mention a stream applied to the bound variable");
    };
    let span = p.here();
    let predicate = DataPredicate::new(constraints).map_err(|m| ParseDiagnostic::error(m, span))?;
    let candidate = if p.eat_keyword("using") {
        if !p.eat_keyword("window") {
            return p.error("expected `window` after `using`");
        }
        let width = p.natural("a window width")? as usize;
        let span = p.here();
        let cs = window_constraints(p)?;
        Some(HereditaryCandidate::new(width, cs).map_err(|m| ParseDiagnostic::error(m, span))?)
    } else {
        None
    };
    Ok(Query::Forall { predicate, stream, candidate })
}

/// `{ c1 and c2 ... }` over window variables `w0, w1, ...`.
pub(crate) fn window_constraints(p: &mut Parser<'_>) -> Result<Vec<LinearConstraint>, ParseDiagnostic> {
    p.expect(&Tok::LBrace, "`{`")?;
    let mut cs = vec![linear_constraint(p, &mut window_var)?];
    while p.eat_keyword("and") {
        cs.push(linear_constraint(p, &mut window_var)?);
    }
    p.expect(&Tok::RBrace, "`}`")?;
    Ok(cs)
}

/// Parses a predicate body like `w0 > 0 and w2 = w0 + w1`.
pub fn parse_window_constraints(text: &str) -> Result<Vec<LinearConstraint>, ParseErrors> {
    let toks = lex_line(text, 1)?;
    let mut p = Parser::new(&toks, 1, ParseOptions::default());
    let mut cs = vec![linear_constraint(&mut p, &mut window_var)?];
    while p.eat_keyword("and") {
        cs.push(linear_constraint(&mut p, &mut window_var)?);
    }
    p.expect_end()?;
    Ok(cs)
}

type VarParser<'a> = dyn FnMut(&mut Parser<'_>) -> Result<Option<usize>, ParseDiagnostic> + 'a;

fn window_var(p: &mut Parser<'_>) -> Result<Option<usize>, ParseDiagnostic> {
    if let Some(Tok::Ident(s)) = p.peek() {
        if let Some(idx) = s.strip_prefix('w').and_then(|d| d.parse::<usize>().ok()) {
            p.ident("window variable")?;
            return Ok(Some(idx));
        }
        return p.error("expected a window variable `w0`, `w1`, ...");
    }
    Ok(None)
}

/// Recognizes `name(n)`, `name^k(n)` or `(expr)(n)`; all occurrences must
/// denote the same stream, which becomes variable `w0`.
fn stream_application(
    p: &mut Parser<'_>,
    var: &str,
    seen: &mut Option<StreamExpr>,
) -> Result<Option<usize>, ParseDiagnostic> {
    let start = p.pos();
    let span = p.here();
    let expr = match p.peek() {
        Some(Tok::Ident(_)) => {
            let name = p.ident("stream name")?;
            let mut k = 0;
            if p.eat(&Tok::Caret) {
                k = p.natural("tail exponent")?;
            }
            StreamExpr::NameTail(name, k)
        }
        Some(Tok::LParen) => {
            p.eat(&Tok::LParen);
            match p.stream_expr() {
                Ok(e) if p.eat(&Tok::RParen) && p.peek() == Some(&Tok::LParen) => e,
                _ => {
                    p.reset(start);
                    return Ok(None);
                }
            }
        }
        _ => return Ok(None),
    };
    p.expect(&Tok::LParen, &format!("`({var})`"))?;
    let v = p.ident("the bound variable")?;
    if v != var {
        return Err(ParseDiagnostic::error(
            format!("expected the bound variable `{var}`, found `{v}`"),
            span,
        ));
    }
    p.expect(&Tok::RParen, "`)`")?;
    match seen {
        Some(prev) if *prev != expr => Err(ParseDiagnostic::error(
            "a predicate may mention only one stream",
            span,
        )),
        _ => {
            *seen = Some(expr);
            Ok(Some(0))
        }
    }
}

fn linear_constraint(p: &mut Parser<'_>, var: &mut VarParser<'_>) -> Result<LinearConstraint, ParseDiagnostic> {
    let lhs = linear_sum(p, var)?;
    let rel = match p.peek() {
        Some(Tok::Lt) => Relation::Lt,
        Some(Tok::Le) => Relation::Le,
        Some(Tok::EqSign) => Relation::Eq,
        Some(Tok::Ge) => Relation::Ge,
        Some(Tok::Gt) => Relation::Gt,
        _ => return p.error("malformed constraint: expected a comparator (<, <=, =, >=, >)"),
    };
    p.bump();
    let rhs = linear_sum(p, var)?;
    Ok(LinearConstraint::compare(&lhs, rel, &rhs))
}

fn linear_sum(p: &mut Parser<'_>, var: &mut VarParser<'_>) -> Result<LinearExpr, ParseDiagnostic> {
    let mut acc = linear_product(p, var)?;
    loop {
        if p.eat(&Tok::Plus) {
            acc = acc.add(&linear_product(p, var)?);
        } else if p.eat(&Tok::Minus) {
            acc = acc.sub(&linear_product(p, var)?);
        } else {
            return Ok(acc);
        }
    }
}

fn linear_product(p: &mut Parser<'_>, var: &mut VarParser<'_>) -> Result<LinearExpr, ParseDiagnostic> {
    let mut acc = linear_unary(p, var)?;
    loop {
        let span = p.here();
        if p.eat(&Tok::Star) {
            let rhs = linear_unary(p, var)?;
            acc = if acc.is_constant() {
                rhs.scale(&acc.constant)
            } else if rhs.is_constant() {
                acc.scale(&rhs.constant)
            } else {
                return Err(ParseDiagnostic::error(
                    "malformed constraint: product of two variables is not linear",
                    span,
                ));
            };
        } else if p.eat(&Tok::Slash) {
            let rhs = linear_unary(p, var)?;
            if !rhs.is_constant() || rhs.constant == BigRational::from_integer(0.into()) {
                return Err(ParseDiagnostic::error(
                    "malformed constraint: can only divide by a non-zero constant",
                    span,
                ));
            }
            acc = acc.scale(&rhs.constant.recip());
        } else {
            return Ok(acc);
        }
    }
}

fn linear_unary(p: &mut Parser<'_>, var: &mut VarParser<'_>) -> Result<LinearExpr, ParseDiagnostic> {
    if p.eat(&Tok::Minus) {
        return Ok(linear_unary(p, var)?.scale(&BigRational::from_integer((-1).into())));
    }
    if let Some(idx) = var(p)? {
        return Ok(LinearExpr::var(idx));
    }
    match p.peek() {
        Some(Tok::Int(n)) => {
            let n = n.clone();
            p.bump();
            Ok(LinearExpr::constant(BigRational::from_integer(n)))
        }
        Some(Tok::LParen) => {
            p.eat(&Tok::LParen);
            let e = linear_sum(p, var)?;
            p.expect(&Tok::RParen, "`)`")?;
            Ok(e)
        }
        _ => p.error("malformed constraint: expected a variable, numeral or `(`"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::linear::constraint;

    fn q(s: &str) -> Result<Query, ParseErrors> {
        parse_query(&SourceText::repl(s))
    }

    #[test]
    fn eval_query() {
        assert_eq!(q("eval fib 7").unwrap(), Query::Element { name: "fib".into(), index: 7 });
    }

    #[test]
    fn equal_defaults_to_auto() {
        assert_eq!(
            q("equal s1 s2").unwrap(),
            Query::Equal {
                left: StreamExpr::name("s1"),
                right: StreamExpr::name("s2"),
                method: EqualMethod::Auto
            }
        );
        assert!(matches!(
            q("equal (o2, o3) o6 by bisim").unwrap(),
            Query::Equal { method: EqualMethod::Bisim, .. }
        ));
    }

    #[test]
    fn prove_with_window() {
        let query = q("prove forall n. fib^1(n) > 0 using window 2 {w0 > 0 and w1 > 0}").unwrap();
        let Query::Forall { predicate, stream, candidate } = query else { panic!() };
        assert_eq!(stream, StreamExpr::tail_of("fib", 1));
        assert_eq!(predicate.constraints, vec![constraint(&[1], 0, Relation::Gt)]);
        let h = candidate.unwrap();
        assert_eq!(h.width, 2);
        assert_eq!(h.constraints[1], constraint(&[0, 1], 0, Relation::Gt));
    }

    #[test]
    fn prove_over_expression() {
        let query = q("prove forall n. (o2 + o3)(n) >= 0").unwrap();
        assert!(matches!(query, Query::Forall { stream: StreamExpr::Add(..), candidate: None, .. }));
    }

    #[test]
    fn unknown_head_and_bad_constraint() {
        let e = q("frobnicate fib").unwrap_err();
        assert!(e.diagnostics()[0].message.contains("unknown query"));
        let e = q("prove forall n. fib(n) 0").unwrap_err();
        assert!(e.diagnostics()[0].message.contains("malformed constraint"));
        let e = q("prove forall n. fib(n) * fib(n) > 0").unwrap_err();
        assert!(e.diagnostics()[0].message.contains("not linear"));
    }

    #[test]
    fn window_constraint_parsing() {
        let cs = parse_window_constraints("w2 = w0 + w1 and 2*w0 >= w0").unwrap();
        assert_eq!(cs[0], constraint(&[-1, -1, 1], 0, Relation::Eq));
        assert_eq!(cs[1], constraint(&[1], 0, Relation::Ge));
    }
}
