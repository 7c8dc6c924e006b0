//! Recursive descent parser for `.codata` definitions and stream expressions.

use num_bigint::BigInt;

use super::diag::{ParseDiagnostic, ParseErrors, Span};
use super::lexer::{lex_line, Tok, Token};
use crate::expr::{CodataDefinition, DefName, DefinitionSet, Side, StreamExpr};
use crate::value::DataValue;

pub const BUILTINS: [&str; 5] = ["even", "odd", "split", "zip", "const"];

/// Source code plus where it came from.
#[derive(Clone, Debug)]
pub struct SourceText {
    pub content: String,
    pub origin: String,
}

impl SourceText {
    pub fn new(content: impl Into<String>, origin: impl Into<String>) -> Self {
        Self {
            content: content.into(),
            origin: origin.into(),
        }
    }

    pub fn repl(content: impl Into<String>) -> Self {
        Self::new(content, "<repl>")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept `s^t` with a stream-valued exponent. Such definitions parse
    /// but never pass the well-formedness check.
    pub allow_stream_exponent: bool,
}

/// Either a data constant or a genuine stream, before lifting.
#[derive(Clone, Debug)]
pub(crate) enum PExpr {
    Data(DataValue),
    Stream(StreamExpr),
}

impl PExpr {
    fn into_stream(self) -> StreamExpr {
        match self {
            PExpr::Data(v) => StreamExpr::Const(v),
            PExpr::Stream(s) => s,
        }
    }
}

pub(crate) struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    line: usize,
    opts: ParseOptions,
    data_mode: bool,
}

type PResult<T> = Result<T, ParseDiagnostic>;

impl<'t> Parser<'t> {
    pub(crate) fn new(toks: &'t [Token], line: usize, opts: ParseOptions) -> Self {
        Self {
            toks,
            pos: 0,
            line,
            opts,
            data_mode: false,
        }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn reset(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub(crate) fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset).map(|t| &t.tok)
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn bump(&mut self) -> Option<&'t Token> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    /// Span of the current token, or of the last one at end of input.
    pub(crate) fn here(&self) -> Span {
        match self.toks.get(self.pos).or_else(|| self.toks.last()) {
            Some(t) => t.span,
            None => Span::new(self.line, 1, 0),
        }
    }

    pub(crate) fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let found = match self.peek() {
            Some(t) => t.describe(),
            None => "end of input".to_string(),
        };
        Err(ParseDiagnostic::error(format!("{}, found {found}", msg.into()), self.here()))
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok, what: &str) -> PResult<()> {
        if self.eat(tok) {
            Ok(())
        } else if self.at_end() && matches!(tok, Tok::RBracket | Tok::RParen | Tok::RBrace) {
            Err(ParseDiagnostic::error(
                format!("unbalanced bracket: expected {what} before the end of input"),
                self.here(),
            ))
        } else {
            self.error(format!("expected {what}"))
        }
    }

    pub(crate) fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.error(format!("expected {what}")),
        }
    }

    pub(crate) fn natural(&mut self, what: &str) -> PResult<u64> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let v = u64::try_from(n.clone());
                match v {
                    Ok(v) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    Err(_) => self.error(format!("{what} does not fit in 64 bits")),
                }
            }
            _ => self.error(format!("expected {what} (a numeral)")),
        }
    }

    pub(crate) fn expect_end(&self) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.error("expected end of line")
        }
    }

    /// True when the next token is `(` written directly after the previous token.
    fn adjacent_paren(&self) -> bool {
        match (self.toks.get(self.pos.wrapping_sub(1)), self.toks.get(self.pos)) {
            (Some(prev), Some(next)) => {
                next.tok == Tok::LParen
                    && next.span.line == prev.span.line
                    && next.span.column == prev.span.column + prev.span.length
            }
            _ => false,
        }
    }

    /// A stream expression; data-only results become constant streams.
    pub(crate) fn stream_expr(&mut self) -> PResult<StreamExpr> {
        self.sum().map(PExpr::into_stream)
    }

    /// A data term (base cases, `const(...)` arguments).
    pub(crate) fn data_term(&mut self) -> PResult<DataValue> {
        let saved = self.data_mode;
        self.data_mode = true;
        let start = self.here();
        let out = self.sum();
        self.data_mode = saved;
        match out? {
            PExpr::Data(v) => Ok(v),
            PExpr::Stream(_) => Err(ParseDiagnostic::error(
                "expected a data term, found a stream expression",
                start,
            )),
        }
    }

    fn sum(&mut self) -> PResult<PExpr> {
        let mut acc = self.product()?;
        loop {
            let op_span = self.here();
            if self.eat(&Tok::Plus) {
                let rhs = self.product()?;
                acc = combine(acc, rhs, Op::Add, op_span)?;
            } else if self.eat(&Tok::Minus) {
                let rhs = negate(self.product()?, op_span)?;
                acc = combine(acc, rhs, Op::Add, op_span)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> PResult<PExpr> {
        let mut acc = self.unary()?;
        loop {
            let op_span = self.here();
            if self.eat(&Tok::Star) {
                let rhs = self.unary()?;
                acc = combine(acc, rhs, Op::Mul, op_span)?;
            } else if self.eat(&Tok::Slash) {
                let rhs = self.unary()?;
                acc = match (acc, rhs) {
                    (PExpr::Data(a), PExpr::Data(b)) => PExpr::Data(
                        a.div(&b)
                            .map_err(|e| ParseDiagnostic::error(e.to_string(), op_span))?,
                    ),
                    _ => {
                        return Err(ParseDiagnostic::error(
                            "division is only defined on data constants",
                            op_span,
                        ))
                    }
                };
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> PResult<PExpr> {
        let span = self.here();
        if self.eat(&Tok::Minus) {
            let inner = self.unary()?;
            return negate(inner, span);
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<PExpr> {
        let bare_name = matches!(self.peek(), Some(Tok::Ident(_)))
            && self.peek_at(1) != Some(&Tok::LParen);
        let mut atom = self.atom()?;
        let mut first = true;
        while self.peek() == Some(&Tok::Caret) {
            let caret = self.here();
            self.pos += 1;
            let stream = match atom {
                PExpr::Stream(s) => s,
                PExpr::Data(_) => {
                    return Err(ParseDiagnostic::error(
                        "the tail operator `^` applies to streams, not data constants",
                        caret,
                    ))
                }
            };
            if let Some(Tok::Int(_)) = self.peek() {
                let k = self.natural("tail exponent")?;
                atom = PExpr::Stream(match stream {
                    StreamExpr::NameTail(n, 0) if first && bare_name => StreamExpr::NameTail(n, k),
                    other => StreamExpr::Shifted(Box::new(other), k),
                });
            } else if self.opts.allow_stream_exponent {
                let exponent = self.atom()?.into_stream();
                atom = PExpr::Stream(StreamExpr::DynamicTail(Box::new(stream), Box::new(exponent)));
            } else {
                return self.error("expected a numeral tail exponent after `^`");
            }
            first = false;
        }
        Ok(atom)
    }

    fn atom(&mut self) -> PResult<PExpr> {
        let span = self.here();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(PExpr::Data(DataValue::Integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.adjacent_paren() {
                    self.pos += 1;
                    let args = self.args()?;
                    self.application(&name, args, span)
                } else if BUILTINS.contains(&name.as_str()) {
                    Err(ParseDiagnostic::error(
                        format!("reserved function `{name}` must be applied to arguments"),
                        span,
                    ))
                } else if self.data_mode {
                    Ok(PExpr::Data(DataValue::constructor(name, vec![])))
                } else {
                    Ok(PExpr::Stream(StreamExpr::NameTail(name, 0)))
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let items = self.args()?;
                if items.len() == 1 {
                    return Ok(items.into_iter().next().unwrap());
                }
                if items.iter().all(|i| matches!(i, PExpr::Data(_))) {
                    Ok(PExpr::Data(DataValue::tuple(
                        items.into_iter().map(|i| match i {
                            PExpr::Data(v) => v,
                            PExpr::Stream(_) => unreachable!(),
                        }).collect(),
                    )))
                } else {
                    Ok(PExpr::Stream(StreamExpr::Pairing(
                        items.into_iter().map(PExpr::into_stream).collect(),
                    )))
                }
            }
            _ => self.error("expected a stream expression (name, numeral, `(` or function application)"),
        }
    }

    /// Comma-separated items after an opening `(`, through the closing `)`.
    fn args(&mut self) -> PResult<Vec<PExpr>> {
        let mut items = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(items);
        }
        loop {
            items.push(self.sum()?);
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(items);
        }
    }

    fn application(&mut self, name: &str, args: Vec<PExpr>, span: Span) -> PResult<PExpr> {
        let arity = |n: usize| -> PResult<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(ParseDiagnostic::error(
                    format!("`{name}` expects {n} argument(s), found {}", args.len()),
                    span,
                ))
            }
        };
        let streams = || args.clone().into_iter().map(PExpr::into_stream);
        Ok(PExpr::Stream(match name {
            "const" => {
                arity(1)?;
                match &args[0] {
                    PExpr::Data(v) => StreamExpr::Const(v.clone()),
                    PExpr::Stream(_) => {
                        return Err(ParseDiagnostic::error(
                            "`const` expects a data term argument",
                            span,
                        ))
                    }
                }
            }
            "even" => {
                arity(1)?;
                StreamExpr::Even(Box::new(streams().next().unwrap()))
            }
            "odd" => {
                arity(1)?;
                StreamExpr::Odd(Box::new(streams().next().unwrap()))
            }
            "split" => {
                arity(1)?;
                let s = streams().next().unwrap();
                StreamExpr::Pairing(vec![StreamExpr::Even(Box::new(s.clone())), StreamExpr::Odd(Box::new(s))])
            }
            "zip" => {
                arity(2)?;
                let mut it = streams();
                let a = it.next().unwrap();
                let b = it.next().unwrap();
                StreamExpr::Zip(Box::new(a), Box::new(b))
            }
            _ => {
                if args.iter().all(|a| matches!(a, PExpr::Data(_))) {
                    return Ok(PExpr::Data(DataValue::constructor(
                        name,
                        args.into_iter()
                            .map(|a| match a {
                                PExpr::Data(v) => v,
                                PExpr::Stream(_) => unreachable!(),
                            })
                            .collect(),
                    )));
                }
                StreamExpr::Map(name.to_string(), streams().collect())
            }
        }))
    }

    /// `name as [d0, ..., dk | body]`.
    pub(crate) fn definition(&mut self) -> PResult<(CodataDefinition, Span)> {
        let name_span = self.here();
        let name = if self.eat(&Tok::LParen) {
            let mut names = vec![self.ident("a codata name")?];
            while self.eat(&Tok::Comma) {
                names.push(self.ident("a codata name")?);
            }
            self.expect(&Tok::RParen, "`)`")?;
            if names.len() == 1 {
                DefName::Atomic(names.pop().unwrap())
            } else {
                DefName::Compound(names)
            }
        } else {
            DefName::Atomic(self.ident("a codata name")?)
        };
        for n in name.components() {
            if BUILTINS.contains(&n.as_str()) {
                return Err(ParseDiagnostic::error(
                    format!("`{n}` is a reserved function name"),
                    name_span,
                ));
            }
        }
        if !self.eat_keyword("as") {
            return self.error("expected keyword `as`");
        }
        self.expect(&Tok::LBracket, "`[`")?;
        let mut base_cases = vec![self.data_term()?];
        while self.eat(&Tok::Comma) {
            base_cases.push(self.data_term()?);
        }
        self.expect(&Tok::Pipe, "`|` after the base cases")?;
        let body = self.stream_expr()?;
        self.expect(&Tok::RBracket, "`]`")?;
        self.expect_end()?;
        Ok((CodataDefinition::new(name, base_cases, body), name_span))
    }
}

#[derive(Clone, Copy)]
enum Op {
    Add,
    Mul,
}

fn combine(a: PExpr, b: PExpr, op: Op, span: Span) -> PResult<PExpr> {
    use PExpr::*;
    Ok(match (a, b, op) {
        (Data(x), Data(y), op) => {
            let r = match op {
                Op::Add => x.add(&y),
                Op::Mul => x.mul(&y),
            };
            Data(r.map_err(|e| ParseDiagnostic::error(e.to_string(), span))?)
        }
        (Data(x), Stream(s), Op::Add) => Stream(StreamExpr::AddConst(Side::Left, x, Box::new(s))),
        (Data(x), Stream(s), Op::Mul) => Stream(StreamExpr::MulConst(Side::Left, x, Box::new(s))),
        (Stream(s), Data(x), Op::Add) => Stream(StreamExpr::AddConst(Side::Right, x, Box::new(s))),
        (Stream(s), Data(x), Op::Mul) => Stream(StreamExpr::MulConst(Side::Right, x, Box::new(s))),
        (Stream(s), Stream(t), Op::Add) => Stream(StreamExpr::Add(Box::new(s), Box::new(t))),
        (Stream(s), Stream(t), Op::Mul) => Stream(StreamExpr::Mul(Box::new(s), Box::new(t))),
    })
}

fn negate(e: PExpr, span: Span) -> PResult<PExpr> {
    Ok(match e {
        PExpr::Data(v) => PExpr::Data(v.neg().map_err(|e| ParseDiagnostic::error(e.to_string(), span))?),
        PExpr::Stream(s) => PExpr::Stream(StreamExpr::MulConst(
            Side::Left,
            DataValue::Integer(BigInt::from(-1)),
            Box::new(s),
        )),
    })
}

/// Non-empty, non-comment lines with their 1-based line numbers.
pub(crate) fn logical_lines(src: &str) -> impl Iterator<Item = (usize, &str)> {
    src.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        })
}

/// Parses a `.codata` source: one definition per line, `#` comments.
pub fn parse_definitions(src: &SourceText, opts: ParseOptions) -> Result<DefinitionSet, ParseErrors> {
    let mut errors = Vec::new();
    let mut set = DefinitionSet::new();
    for (line_no, line) in logical_lines(&src.content) {
        let toks = match lex_line(line, line_no) {
            Ok(t) => t,
            Err(d) => {
                errors.push(d);
                continue;
            }
        };
        if toks.is_empty() {
            continue;
        }
        let mut p = Parser::new(&toks, line_no, opts);
        match p.definition() {
            Ok((def, span)) => {
                if let Err(dup) = set.insert(def) {
                    errors.push(ParseDiagnostic::error(
                        format!("duplicate definition of `{}`", dup.0),
                        span,
                    ));
                }
            }
            Err(d) => errors.push(d),
        }
    }
    if errors.is_empty() {
        Ok(set)
    } else {
        Err(ParseErrors(errors))
    }
}

/// Parses a single definition line.
pub fn parse_definition(line: &str, opts: ParseOptions) -> Result<CodataDefinition, ParseErrors> {
    let toks = lex_line(line, 1)?;
    let mut p = Parser::new(&toks, 1, opts);
    Ok(p.definition()?.0)
}

/// Parses a stream expression such as `fib^1 + fib^2` or `(o2, o3)`.
pub fn parse_stream_expr(text: &str) -> Result<StreamExpr, ParseErrors> {
    parse_stream_expr_with(text, ParseOptions::default())
}

pub fn parse_stream_expr_with(text: &str, opts: ParseOptions) -> Result<StreamExpr, ParseErrors> {
    let toks = lex_line(text, 1)?;
    let mut p = Parser::new(&toks, 1, opts);
    let e = p.stream_expr()?;
    p.expect_end()?;
    Ok(e)
}

/// Parses a data term such as `3`, `-1/2`, `(0, 1)` or `s(s(0))`.
pub fn parse_data(text: &str) -> Result<DataValue, ParseErrors> {
    let toks = lex_line(text, 1)?;
    let mut p = Parser::new(&toks, 1, ParseOptions::default());
    let v = p.data_term()?;
    p.expect_end()?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defs(src: &str) -> Result<DefinitionSet, ParseErrors> {
        parse_definitions(&SourceText::new(src, "test"), ParseOptions::default())
    }

    #[test]
    fn fib_definition() {
        let set = defs("fib as [0, 1 | fib^0 + fib^1]").unwrap();
        assert_eq!(set.len(), 1);
        let d = &set.definitions()[0];
        assert_eq!(d.base_cases, vec![DataValue::int(0), DataValue::int(1)]);
        assert_eq!(
            d.body,
            StreamExpr::add(StreamExpr::tail_of("fib", 0), StreamExpr::tail_of("fib", 1))
        );
    }

    #[test]
    fn compound_definition() {
        let set = defs("(f, g) as [(0, 1) | (g, 2*f)]").unwrap();
        let d = &set.definitions()[0];
        assert_eq!(d.dimension(), 2);
        assert_eq!(
            d.body,
            StreamExpr::Pairing(vec![
                StreamExpr::name("g"),
                StreamExpr::MulConst(Side::Left, 2.into(), Box::new(StreamExpr::name("f")))
            ])
        );
        assert_eq!(set.base_case("g", 0), Some(&DataValue::int(1)));
    }

    #[test]
    fn unbalanced_bracket_at_end() {
        let errs = defs("x as [0 | x").unwrap_err();
        let d = &errs.diagnostics()[0];
        assert!(d.message.contains("unbalanced bracket"), "{}", d.message);
        assert_eq!(d.span, Span::new(1, 11, 1));
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let errs = defs("a as [0 | a]\n(b, a) as [(0, 0) | (b, a)]").unwrap_err();
        assert!(errs.diagnostics()[0].message.contains("duplicate definition of `a`"));
        assert_eq!(errs.diagnostics()[0].span.line, 2);
    }

    #[test]
    fn stream_exponent_requires_flag() {
        let src = "(nat, f, m) as [(0, 1, 0) | (1 + nat, nat - m^f, nat - f^m)]";
        let errs = defs(src).unwrap_err();
        assert!(errs.diagnostics()[0].message.contains("tail exponent"));
        let ok = parse_definitions(
            &SourceText::new(src, "h"),
            ParseOptions { allow_stream_exponent: true },
        )
        .unwrap();
        assert!(ok.definitions()[0].body.contains_dynamic_tail());
    }

    #[test]
    fn numerals_next_to_streams_are_mixed_operators() {
        assert_eq!(
            parse_stream_expr("1 + nat").unwrap(),
            StreamExpr::add_const(1, StreamExpr::name("nat"))
        );
        assert_eq!(
            parse_stream_expr("const(1) + nat").unwrap(),
            StreamExpr::add(StreamExpr::constant(1), StreamExpr::name("nat"))
        );
        assert_eq!(parse_stream_expr("2 * 3").unwrap(), StreamExpr::constant(6));
    }

    #[test]
    fn rational_coefficients() {
        let e = parse_stream_expr("(1/2)*nat*(1+nat)").unwrap();
        assert_eq!(
            e,
            StreamExpr::mul(
                StreamExpr::mul_const(DataValue::ratio(1, 2), StreamExpr::name("nat")),
                StreamExpr::add_const(1, StreamExpr::name("nat"))
            )
        );
    }

    #[test]
    fn constructor_application_needs_adjacent_paren() {
        assert!(matches!(parse_stream_expr("s(n)").unwrap(), StreamExpr::Map(..)));
        assert_eq!(
            parse_data("s(s(0))").unwrap(),
            DataValue::constructor("s", vec![DataValue::constructor("s", vec![0.into()])])
        );
        assert!(parse_stream_expr("s (n)").is_err());
    }

    #[test]
    fn chained_tails_stay_unnormalized() {
        assert_eq!(
            parse_stream_expr("fib^1^2").unwrap(),
            StreamExpr::shifted(StreamExpr::tail_of("fib", 1), 2)
        );
        assert_eq!(
            parse_stream_expr("(fib)^2").unwrap(),
            StreamExpr::shifted(StreamExpr::name("fib"), 2)
        );
    }

    #[test]
    fn builtins_check_arity() {
        assert!(parse_stream_expr("zip(s)").is_err());
        assert!(parse_stream_expr("even").is_err());
        assert_eq!(
            parse_stream_expr("split(s)").unwrap(),
            StreamExpr::Pairing(vec![StreamExpr::even(StreamExpr::name("s")), StreamExpr::odd(StreamExpr::name("s"))])
        );
    }
}
