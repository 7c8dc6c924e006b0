//! Exact data values carried at each stream position.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::EvalError;

/// A scalar or constructor term.
///
/// Rationals with denominator one are always stored as `Integer`, so
/// structural equality coincides with numeric equality on numbers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DataValue {
    Integer(BigInt),
    Rational(BigRational),
    Constructor(Arc<Constructed>),
    Tuple(Vec<DataValue>),
}

/// Payload of a constructor term. The structural hash is cached so that
/// deeply nested terms (e.g. `s(s(...s(0)...))`) hash in constant time.
#[derive(Debug)]
pub struct Constructed {
    symbol: String,
    args: Vec<DataValue>,
    hash: u64,
}

impl Constructed {
    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn args(&self) -> &[DataValue] {
        &self.args
    }
}

impl PartialEq for Constructed {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other) || (self.hash == other.hash && self.symbol == other.symbol && self.args == other.args)
    }
}

impl Eq for Constructed {}

impl Hash for Constructed {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.hash);
    }
}

impl PartialOrd for Constructed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Constructed {
    fn cmp(&self, other: &Self) -> Ordering {
        if std::ptr::eq(self, other) {
            return Ordering::Equal;
        }
        self.symbol
            .cmp(&other.symbol)
            .then_with(|| self.args.cmp(&other.args))
    }
}

impl Drop for Constructed {
    // Unroll the drop of long constructor chains so it does not recurse.
    fn drop(&mut self) {
        let mut pending = std::mem::take(&mut self.args);
        while let Some(value) = pending.pop() {
            match value {
                DataValue::Constructor(node) => {
                    if let Ok(mut inner) = Arc::try_unwrap(node) {
                        pending.append(&mut inner.args);
                    }
                }
                DataValue::Tuple(mut items) => pending.append(&mut items),
                _ => {}
            }
        }
    }
}

impl DataValue {
    pub fn int(n: i64) -> Self {
        DataValue::Integer(BigInt::from(n))
    }

    /// Builds a number from a rational, demoting to `Integer` when possible.
    pub fn number(r: BigRational) -> Self {
        if r.is_integer() {
            DataValue::Integer(r.to_integer())
        } else {
            DataValue::Rational(r)
        }
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        Self::number(BigRational::new(numer.into(), denom.into()))
    }

    pub fn constructor(symbol: impl Into<String>, args: Vec<DataValue>) -> Self {
        let symbol = symbol.into();
        let mut hasher = DefaultHasher::new();
        symbol.hash(&mut hasher);
        args.hash(&mut hasher);
        let hash = hasher.finish();
        DataValue::Constructor(Arc::new(Constructed { symbol, args, hash }))
    }

    /// Tuples of arity one collapse to their single component.
    pub fn tuple(mut items: Vec<DataValue>) -> Self {
        if items.len() == 1 {
            items.pop().unwrap()
        } else {
            DataValue::Tuple(items)
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, DataValue::Integer(_) | DataValue::Rational(_))
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            DataValue::Integer(i) => Some(BigRational::from_integer(i.clone())),
            DataValue::Rational(r) => Some(r.clone()),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, DataValue::Integer(i) if i.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, DataValue::Integer(i) if i.is_one())
    }

    /// Number of components: tuple arity, or 1 for scalars and constructor terms.
    pub fn dimension(&self) -> usize {
        match self {
            DataValue::Tuple(items) => items.len(),
            _ => 1,
        }
    }

    /// Component `index` of a tuple; scalars only have component 0.
    pub fn component(&self, index: usize) -> Option<&DataValue> {
        match self {
            DataValue::Tuple(items) => items.get(index),
            other if index == 0 => Some(other),
            _ => None,
        }
    }

    pub fn add(&self, other: &DataValue) -> Result<DataValue, EvalError> {
        match (self, other) {
            (DataValue::Integer(a), DataValue::Integer(b)) => Ok(DataValue::Integer(a + b)),
            (DataValue::Tuple(a), DataValue::Tuple(b)) if a.len() == b.len() => a
                .iter()
                .zip(b)
                .map(|(x, y)| x.add(y))
                .collect::<Result<Vec<_>, _>>()
                .map(DataValue::Tuple),
            (a, b) => match (a.as_rational(), b.as_rational()) {
                (Some(x), Some(y)) => Ok(DataValue::number(rat_add(&x, &y))),
                _ => Err(EvalError::type_mismatch("+", a, b)),
            },
        }
    }

    /// Product; a scalar times a tuple scales every component.
    pub fn mul(&self, other: &DataValue) -> Result<DataValue, EvalError> {
        match (self, other) {
            (DataValue::Integer(a), DataValue::Integer(b)) => Ok(DataValue::Integer(a * b)),
            (DataValue::Tuple(a), DataValue::Tuple(b)) if a.len() == b.len() => a
                .iter()
                .zip(b)
                .map(|(x, y)| x.mul(y))
                .collect::<Result<Vec<_>, _>>()
                .map(DataValue::Tuple),
            (s, DataValue::Tuple(items)) | (DataValue::Tuple(items), s) if s.is_numeric() => items
                .iter()
                .map(|x| s.mul(x))
                .collect::<Result<Vec<_>, _>>()
                .map(DataValue::Tuple),
            (a, b) => match (a.as_rational(), b.as_rational()) {
                (Some(x), Some(y)) => Ok(DataValue::number(rat_mul(&x, &y))),
                _ => Err(EvalError::type_mismatch("*", a, b)),
            },
        }
    }

    pub fn neg(&self) -> Result<DataValue, EvalError> {
        self.mul(&DataValue::int(-1))
    }

    pub fn div(&self, other: &DataValue) -> Result<DataValue, EvalError> {
        match (self.as_rational(), other.as_rational()) {
            (Some(_), Some(y)) if y.is_zero() => Err(EvalError::DivisionByZero),
            (Some(x), Some(y)) => Ok(DataValue::number(x / y)),
            _ => Err(EvalError::type_mismatch("/", self, other)),
        }
    }

    /// Writes the value so that it re-parses in an expression position:
    /// rationals are parenthesized and nullary constructors carry `()`.
    pub fn fmt_in_expr(&self, f: &mut impl fmt::Write) -> fmt::Result {
        match self {
            DataValue::Rational(_) => write!(f, "({self})"),
            DataValue::Constructor(c) if c.args.is_empty() => write!(f, "{}()", c.symbol),
            DataValue::Constructor(c) => {
                write!(f, "{}(", c.symbol)?;
                for (i, a) in c.args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    a.fmt_in_expr(f)?;
                }
                f.write_str(")")
            }
            DataValue::Tuple(items) => {
                f.write_str("(")?;
                for (i, a) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    a.fmt_in_expr(f)?;
                }
                f.write_str(")")
            }
            DataValue::Integer(_) => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for DataValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataValue::Integer(i) => write!(f, "{i}"),
            DataValue::Rational(r) => {
                if r.is_negative() {
                    write!(f, "-{}/{}", -r.numer(), r.denom())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            DataValue::Constructor(c) if c.args.is_empty() => f.write_str(&c.symbol),
            DataValue::Constructor(c) => {
                write!(f, "{}(", c.symbol)?;
                for (i, a) in c.args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            DataValue::Tuple(items) => {
                f.write_str("(")?;
                for (i, a) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl From<i64> for DataValue {
    fn from(n: i64) -> Self {
        DataValue::int(n)
    }
}

impl From<BigInt> for DataValue {
    fn from(n: BigInt) -> Self {
        DataValue::Integer(n)
    }
}

impl FromStr for DataValue {
    type Err = crate::syntax::ParseErrors;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::syntax::parse_data(s)
    }
}

impl Serialize for DataValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DataValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Exact rational printed as `p` or `p/q`.
pub(crate) fn fmt_rational(r: &BigRational) -> String {
    DataValue::number(r.clone()).to_string()
}

pub(crate) fn rational(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `a + b`, skipping the gcd reduction when both are integers.
pub(crate) fn rat_add(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_integer() && b.is_integer() {
        BigRational::from_integer(a.numer() + b.numer())
    } else {
        a + b
    }
}

/// `a * b`, skipping the gcd reduction when both are integers.
pub(crate) fn rat_mul(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_integer() && b.is_integer() {
        BigRational::from_integer(a.numer() * b.numer())
    } else {
        a * b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_demote_to_integers() {
        assert_eq!(DataValue::ratio(4, 2), DataValue::int(2));
        assert_eq!(DataValue::ratio(2, -4).to_string(), "-1/2");
    }

    #[test]
    fn mixed_arithmetic_is_exact() {
        let half = DataValue::ratio(1, 2);
        assert_eq!(half.add(&half).unwrap(), DataValue::int(1));
        assert_eq!(DataValue::int(3).mul(&half).unwrap(), DataValue::ratio(3, 2));
    }

    #[test]
    fn tuple_plus_integer_is_a_type_error() {
        let t = DataValue::tuple(vec![0.into(), 1.into()]);
        let err = t.add(&DataValue::int(3)).unwrap_err();
        assert!(err.to_string().contains('+'));
    }

    #[test]
    fn scalar_scales_tuples() {
        let t = DataValue::tuple(vec![1.into(), 2.into()]);
        assert_eq!(
            DataValue::int(2).mul(&t).unwrap(),
            DataValue::tuple(vec![2.into(), 4.into()])
        );
    }

    #[test]
    fn deep_constructor_chain_drops_without_overflow() {
        let mut v = DataValue::int(0);
        for _ in 0..200_000 {
            v = DataValue::constructor("s", vec![v]);
        }
        let w = v.clone();
        assert_eq!(v, w);
        drop(v);
        drop(w);
    }
}
