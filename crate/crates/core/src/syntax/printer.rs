//! Concrete syntax for expressions and definitions. The output re-parses
//! to the same abstract syntax.

use std::fmt::{self, Write};

use crate::expr::{CodataDefinition, DefinitionSet, Side, StreamExpr};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const ATOM: u8 = 3;

fn prec(e: &StreamExpr) -> u8 {
    match e {
        StreamExpr::AddConst(..) | StreamExpr::Add(..) => SUM,
        StreamExpr::MulConst(..) | StreamExpr::Mul(..) => PRODUCT,
        _ => ATOM,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &StreamExpr, min: u8) -> fmt::Result {
    if prec(e) < min {
        f.write_char('(')?;
        write_expr(f, e)?;
        f.write_char(')')
    } else {
        write_expr(f, e)
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[StreamExpr]) -> fmt::Result {
    for (i, e) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write_expr(f, e)?;
    }
    Ok(())
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &StreamExpr) -> fmt::Result {
    use StreamExpr::*;
    match e {
        NameTail(n, 0) => f.write_str(n),
        NameTail(n, k) => write!(f, "{n}^{k}"),
        Const(v) => {
            f.write_str("const(")?;
            v.fmt_in_expr(f)?;
            f.write_char(')')
        }
        // Binary operators are left-associative: the right operand needs a
        // strictly higher precedence to avoid re-association.
        AddConst(Side::Left, v, s) => {
            v.fmt_in_expr(f)?;
            f.write_str(" + ")?;
            write_at(f, s, PRODUCT)
        }
        AddConst(Side::Right, v, s) => {
            write_at(f, s, SUM)?;
            f.write_str(" + ")?;
            v.fmt_in_expr(f)
        }
        MulConst(Side::Left, v, s) => {
            v.fmt_in_expr(f)?;
            f.write_str(" * ")?;
            write_at(f, s, ATOM)
        }
        MulConst(Side::Right, v, s) => {
            write_at(f, s, PRODUCT)?;
            f.write_str(" * ")?;
            v.fmt_in_expr(f)
        }
        Add(a, b) => {
            write_at(f, a, SUM)?;
            f.write_str(" + ")?;
            write_at(f, b, PRODUCT)
        }
        Mul(a, b) => {
            write_at(f, a, PRODUCT)?;
            f.write_str(" * ")?;
            write_at(f, b, ATOM)
        }
        Pairing(items) => {
            f.write_char('(')?;
            write_list(f, items)?;
            f.write_char(')')
        }
        Map(c, items) => {
            write!(f, "{c}(")?;
            write_list(f, items)?;
            f.write_char(')')
        }
        Even(s) => {
            f.write_str("even(")?;
            write_expr(f, s)?;
            f.write_char(')')
        }
        Odd(s) => {
            f.write_str("odd(")?;
            write_expr(f, s)?;
            f.write_char(')')
        }
        Zip(a, b) => {
            f.write_str("zip(")?;
            write_expr(f, a)?;
            f.write_str(", ")?;
            write_expr(f, b)?;
            f.write_char(')')
        }
        Shifted(inner, k) => match inner.as_ref() {
            NameTail(n, j) if *j > 0 => write!(f, "{n}^{j}^{k}"),
            other => {
                f.write_char('(')?;
                write_expr(f, other)?;
                write!(f, ")^{k}")
            }
        },
        DynamicTail(base, exp) => {
            write_at_postfix(f, base)?;
            f.write_char('^')?;
            write_at_postfix(f, exp)
        }
    }
}

fn write_at_postfix(f: &mut fmt::Formatter<'_>, e: &StreamExpr) -> fmt::Result {
    match e {
        StreamExpr::NameTail(n, 0) => f.write_str(n),
        other => {
            f.write_char('(')?;
            write_expr(f, other)?;
            f.write_char(')')
        }
    }
}

impl fmt::Display for StreamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

/// Renders an expression in concrete syntax.
pub fn print_expr(e: &StreamExpr) -> String {
    e.to_string()
}

impl fmt::Display for CodataDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} as [", self.name)?;
        for (i, b) in self.base_cases.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            b.fmt_in_expr(f)?;
        }
        write!(f, " | {}]", self.body)
    }
}

impl fmt::Display for DefinitionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.definitions() {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}
