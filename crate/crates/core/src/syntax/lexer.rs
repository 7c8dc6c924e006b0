use num_bigint::BigInt;

use super::diag::{ParseDiagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(BigInt),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Pipe,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Dot,
    Lt,
    Le,
    EqSign,
    Ge,
    Gt,
    Colon,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("numeral `{n}`"),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Pipe => "|",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Caret => "^",
            Tok::Dot => ".",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::EqSign => "=",
            Tok::Ge => ">=",
            Tok::Gt => ">",
            Tok::Colon => ":",
            Tok::Ident(_) | Tok::Int(_) => "",
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Tokenizes one line. `#` starts a comment that runs to the end of the line.
pub(crate) fn lex_line(line: &str, line_no: usize) -> Result<Vec<Token>, ParseDiagnostic> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let span = |len: usize| Span::new(line_no, start + 1, len);
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n: BigInt = text.parse().expect("digits parse");
            out.push(Token { tok: Tok::Int(n), span: span(i - start) });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Ident(text), span: span(i - start) });
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = match (c, next) {
            ('<', Some('=')) => (Tok::Le, 2),
            ('>', Some('=')) => (Tok::Ge, 2),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBracket, 1),
            (']', _) => (Tok::RBracket, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            (',', _) => (Tok::Comma, 1),
            ('|', _) => (Tok::Pipe, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            ('^', _) => (Tok::Caret, 1),
            ('.', _) => (Tok::Dot, 1),
            ('<', _) => (Tok::Lt, 1),
            ('=', _) => (Tok::EqSign, 1),
            ('>', _) => (Tok::Gt, 1),
            (':', _) => (Tok::Colon, 1),
            _ => {
                return Err(ParseDiagnostic::error(
                    format!("unexpected character `{c}`: expected an identifier, numeral or operator"),
                    span(1),
                ))
            }
        };
        out.push(Token { tok, span: span(len) });
        i += len;
    }
    Ok(out)
}
