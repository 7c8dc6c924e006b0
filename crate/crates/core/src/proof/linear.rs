//! Linear constraints over window variables and an exact entailment
//! procedure based on Fourier-Motzkin variable elimination.

use std::collections::HashSet;
use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::value::{fmt_rational, rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    pub fn holds(self, value: &BigRational) -> bool {
        let zero = BigRational::zero();
        match self {
            Relation::Lt => *value < zero,
            Relation::Le => *value <= zero,
            Relation::Eq => value.is_zero(),
            Relation::Ge => *value >= zero,
            Relation::Gt => *value > zero,
        }
    }
}

/// A linear form `constant + sum(coeffs[i] * w_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinearExpr {
    pub constant: BigRational,
    pub coeffs: Vec<BigRational>,
}

impl LinearExpr {
    pub fn constant(c: BigRational) -> Self {
        Self { constant: c, coeffs: vec![] }
    }

    pub fn var(index: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); index + 1];
        coeffs[index] = BigRational::one();
        Self { constant: BigRational::zero(), coeffs }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &LinearExpr) -> LinearExpr {
        let n = self.coeffs.len().max(other.coeffs.len());
        LinearExpr {
            constant: &self.constant + &other.constant,
            coeffs: (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> LinearExpr {
        LinearExpr {
            constant: &self.constant * k,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn sub(&self, other: &LinearExpr) -> LinearExpr {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn eval(&self, values: &[BigRational]) -> Option<BigRational> {
        let mut acc = self.constant.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc += c * values.get(i)?;
            }
        }
        Some(acc)
    }
}

/// `constant + sum(coeffs[i] * w_i) ⋈ 0`, scaled to coprime integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearConstraint {
    #[serde(with = "rat")]
    pub constant: BigRational,
    #[serde(with = "rat_vec")]
    pub coeffs: Vec<BigRational>,
    pub relation: Relation,
}

impl LinearConstraint {
    pub fn new(form: LinearExpr, relation: Relation) -> Self {
        let mut c = LinearConstraint {
            constant: form.constant,
            coeffs: form.coeffs,
            relation,
        };
        c.normalize();
        c
    }

    /// `lhs ⋈ rhs`.
    pub fn compare(lhs: &LinearExpr, relation: Relation, rhs: &LinearExpr) -> Self {
        Self::new(lhs.sub(rhs), relation)
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let mut denom_lcm = num_bigint::BigInt::one();
        for q in self.coeffs.iter().chain(std::iter::once(&self.constant)) {
            denom_lcm = denom_lcm.lcm(q.denom());
        }
        let mut numer_gcd = num_bigint::BigInt::zero();
        for q in self.coeffs.iter().chain(std::iter::once(&self.constant)) {
            let scaled = (q * BigRational::from_integer(denom_lcm.clone())).to_integer();
            numer_gcd = numer_gcd.gcd(&scaled);
        }
        if numer_gcd.is_zero() {
            return;
        }
        let factor = BigRational::new(denom_lcm, numer_gcd);
        self.constant = &self.constant * &factor;
        for q in &mut self.coeffs {
            *q = &*q * &factor;
        }
        if self.relation == Relation::Eq {
            if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()) {
                if lead.is_negative() {
                    self.constant = -&self.constant;
                    for q in &mut self.coeffs {
                        *q = -&*q;
                    }
                }
            }
        }
    }

    pub fn form(&self) -> LinearExpr {
        LinearExpr {
            constant: self.constant.clone(),
            coeffs: self.coeffs.clone(),
        }
    }

    /// Number of variables the constraint can mention (highest index + 1).
    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    pub fn holds_at(&self, values: &[BigRational]) -> Option<bool> {
        self.form().eval(values).map(|v| self.relation.holds(&v))
    }

    /// Renames `w_i` to `w_{i+k}`.
    pub fn shift_vars(&self, k: usize) -> LinearConstraint {
        let mut coeffs = vec![BigRational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        LinearConstraint {
            constant: self.constant.clone(),
            coeffs,
            relation: self.relation,
        }
    }

    /// The constraints whose disjunction is the negation of this one.
    pub fn negation(&self) -> Vec<LinearConstraint> {
        let form = self.form();
        let rel = match self.relation {
            Relation::Lt => Relation::Ge,
            Relation::Le => Relation::Gt,
            Relation::Ge => Relation::Lt,
            Relation::Gt => Relation::Le,
            Relation::Eq => {
                return vec![
                    LinearConstraint::new(form.clone(), Relation::Lt),
                    LinearConstraint::new(form, Relation::Gt),
                ]
            }
        };
        vec![LinearConstraint::new(form, rel)]
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Variables on the left, the constant on the right.
        let mut wrote = false;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if wrote {
                write!(f, " {sign} ")?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            if !mag.is_one() {
                if mag.is_integer() {
                    write!(f, "{}*", fmt_rational(&mag))?;
                } else {
                    write!(f, "({})*", fmt_rational(&mag))?;
                }
            }
            write!(f, "w{i}")?;
            wrote = true;
        }
        if !wrote {
            f.write_str("0")?;
        }
        write!(f, " {} {}", self.relation.symbol(), fmt_rational(&-&self.constant))
    }
}

/// A unary data predicate: a conjunction of constraints over `w0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataPredicate {
    pub constraints: Vec<LinearConstraint>,
}

impl DataPredicate {
    pub fn new(constraints: Vec<LinearConstraint>) -> Result<Self, String> {
        if constraints.is_empty() {
            return Err("a predicate needs at least one constraint".into());
        }
        if let Some(c) = constraints.iter().find(|c| c.arity() > 1) {
            return Err(format!("data predicates may only mention w0, found `{c}`"));
        }
        Ok(Self { constraints })
    }

    pub fn holds(&self, value: &BigRational) -> bool {
        let vals = [value.clone()];
        self.constraints.iter().all(|c| c.holds_at(&vals).unwrap_or(true))
    }

    /// The predicate applied to window variable `w_k`.
    pub fn at(&self, k: usize) -> Vec<LinearConstraint> {
        self.constraints.iter().map(|c| c.shift_vars(k)).collect()
    }
}

impl fmt::Display for DataPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_conjunction(f, &self.constraints)
    }
}

/// A window predicate `H(w0, ..., w_{width-1})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HereditaryCandidate {
    pub width: usize,
    pub constraints: Vec<LinearConstraint>,
}

impl HereditaryCandidate {
    pub fn new(width: usize, constraints: Vec<LinearConstraint>) -> Result<Self, String> {
        if width == 0 {
            return Err("window width must be at least 1".into());
        }
        if let Some(c) = constraints.iter().find(|c| c.arity() > width) {
            return Err(format!("constraint `{c}` mentions a variable outside a window of width {width}"));
        }
        Ok(Self { width, constraints })
    }

    pub fn holds_at(&self, window: &[BigRational]) -> bool {
        self.constraints.iter().all(|c| c.holds_at(window).unwrap_or(false))
    }
}

impl fmt::Display for HereditaryCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "window {} {{", self.width)?;
        write_conjunction(f, &self.constraints)?;
        f.write_str("}")
    }
}

fn write_conjunction(f: &mut fmt::Formatter<'_>, cs: &[LinearConstraint]) -> fmt::Result {
    for (i, c) in cs.iter().enumerate() {
        if i > 0 {
            f.write_str(" and ")?;
        }
        write!(f, "{c}")?;
    }
    Ok(())
}

/// Decides whether `assumptions ⊨ goal` over the rationals.
///
/// Complete for rational-valued variables. For integer-valued streams the
/// answer is sound but may miss entailments that only hold over the integers.
pub fn entails_linear(assumptions: &[LinearConstraint], goal: &LinearConstraint) -> bool {
    goal.negation().iter().all(|neg| {
        let mut system = assumptions.to_vec();
        system.push(neg.clone());
        !satisfiable(&system)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Kind {
    Zero,
    NonNeg,
    Pos,
}

/// `coeffs · w + constant` compared against zero by `kind`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Row {
    coeffs: Vec<BigRational>,
    constant: BigRational,
    kind: Kind,
}

impl Row {
    fn from_constraint(c: &LinearConstraint, width: usize) -> Row {
        let mut coeffs = c.coeffs.clone();
        coeffs.resize(width, BigRational::zero());
        let (flip, kind) = match c.relation {
            Relation::Eq => (false, Kind::Zero),
            Relation::Ge => (false, Kind::NonNeg),
            Relation::Gt => (false, Kind::Pos),
            Relation::Le => (true, Kind::NonNeg),
            Relation::Lt => (true, Kind::Pos),
        };
        let mut row = Row { coeffs, constant: c.constant.clone(), kind };
        if flip {
            row = row.scaled(&-BigRational::one());
        }
        row
    }

    fn scaled(&self, k: &BigRational) -> Row {
        Row {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            constant: &self.constant * k,
            kind: self.kind,
        }
    }

    fn plus(&self, other: &Row, kind: Kind) -> Row {
        Row {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
            constant: &self.constant + &other.constant,
            kind,
        }
    }

    fn is_ground(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn ground_holds(&self) -> bool {
        match self.kind {
            Kind::Zero => self.constant.is_zero(),
            Kind::NonNeg => !self.constant.is_negative(),
            Kind::Pos => self.constant.is_positive(),
        }
    }

    /// Scales by a positive factor so that structurally equal rows dedupe.
    fn canonical(mut self) -> Row {
        let lead = self
            .coeffs
            .iter()
            .find(|c| !c.is_zero())
            .cloned()
            .unwrap_or_else(|| {
                if self.constant.is_zero() {
                    BigRational::one()
                } else {
                    self.constant.abs()
                }
            });
        let mut k = lead.abs().recip();
        if self.kind == Kind::Zero && lead.is_negative() {
            k = -k;
        }
        self = self.scaled(&k);
        self
    }
}

fn satisfiable(system: &[LinearConstraint]) -> bool {
    let width = system.iter().map(LinearConstraint::arity).max().unwrap_or(0);
    let mut rows: Vec<Row> = system.iter().map(|c| Row::from_constraint(c, width)).collect();

    // Substitute equalities away first.
    while let Some(pos) = rows
        .iter()
        .position(|r| r.kind == Kind::Zero && !r.is_ground())
    {
        let eq = rows.swap_remove(pos);
        let var = eq.coeffs.iter().position(|c| !c.is_zero()).unwrap();
        let pivot = eq.coeffs[var].clone();
        rows = rows
            .into_iter()
            .map(|r| {
                let a = r.coeffs[var].clone();
                if a.is_zero() {
                    r
                } else {
                    let k = -(a / &pivot);
                    let kind = r.kind;
                    r.plus(&eq.scaled(&k), kind)
                }
            })
            .collect();
    }

    let mut rows = match prune(rows) {
        Some(r) => r,
        None => return false,
    };

    for _ in 0..width {
        // Choose the variable that produces the fewest combinations.
        let best = (0..width)
            .filter(|&v| rows.iter().any(|r| !r.coeffs[v].is_zero()))
            .min_by_key(|&v| {
                let pos = rows.iter().filter(|r| r.coeffs[v].is_positive()).count();
                let neg = rows.iter().filter(|r| r.coeffs[v].is_negative()).count();
                pos * neg
            });
        let Some(var) = best else { break };
        let (mut lower, mut upper, mut rest) = (vec![], vec![], vec![]);
        for r in rows {
            if r.coeffs[var].is_positive() {
                lower.push(r);
            } else if r.coeffs[var].is_negative() {
                upper.push(r);
            } else {
                rest.push(r);
            }
        }
        for lo in &lower {
            for up in &upper {
                let a = lo.coeffs[var].clone();
                let b = -up.coeffs[var].clone();
                let kind = if lo.kind == Kind::Pos || up.kind == Kind::Pos {
                    Kind::Pos
                } else {
                    Kind::NonNeg
                };
                rest.push(lo.scaled(&b).plus(&up.scaled(&a), kind));
            }
        }
        rows = match prune(rest) {
            Some(r) => r,
            None => return false,
        };
    }
    rows.iter().all(Row::ground_holds)
}

/// Drops satisfied ground rows and duplicates; `None` on a false ground row.
fn prune(rows: Vec<Row>) -> Option<Vec<Row>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for r in rows {
        if r.is_ground() {
            if !r.ground_holds() {
                return None;
            }
            continue;
        }
        let r = r.canonical();
        if seen.insert(r.clone()) {
            out.push(r);
        }
    }
    Some(out)
}

/// Builds `sum(coeffs[i] * w_i) + constant ⋈ 0` from integer data; handy in tests.
pub fn constraint(coeffs: &[i64], constant: i64, relation: Relation) -> LinearConstraint {
    LinearConstraint::new(
        LinearExpr {
            constant: rational(constant),
            coeffs: coeffs.iter().map(|&c| rational(c)).collect(),
        },
        relation,
    )
}

pub(crate) mod rat {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::value::DataValue;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&DataValue::number(r.clone()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let v = DataValue::deserialize(d)?;
        v.as_rational()
            .ok_or_else(|| serde::de::Error::custom(format!("expected a number, found {v}")))
    }
}

pub(crate) mod rat_vec {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::value::DataValue;

    pub fn serialize<S: Serializer>(rs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        rs.iter()
            .map(|r| DataValue::number(r.clone()))
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<DataValue>::deserialize(d)?
            .into_iter()
            .map(|v| {
                v.as_rational()
                    .ok_or_else(|| serde::de::Error::custom(format!("expected a number, found {v}")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Relation::*;

    #[test]
    fn sum_of_positives_is_positive() {
        let a = [
            constraint(&[1], 0, Gt),
            constraint(&[0, 1], 0, Gt),
            constraint(&[-1, -1, 1], 0, Eq),
        ];
        assert!(entails_linear(&a, &constraint(&[0, 0, 1], 0, Gt)));
    }

    #[test]
    fn rational_counterexample_blocks_entailment() {
        // w0 > 0 does not give w0 > 1 (take w0 = 1/2).
        assert!(!entails_linear(&[constraint(&[1], 0, Gt)], &constraint(&[1], -1, Gt)));
    }

    #[test]
    fn equality_substitution() {
        let a = [constraint(&[1], 0, Ge), constraint(&[-1, 1], -1, Eq)];
        assert!(entails_linear(&a, &constraint(&[0, 1], -1, Ge)));
    }

    #[test]
    fn strictness_is_tracked() {
        assert!(!entails_linear(&[constraint(&[1], 0, Ge)], &constraint(&[1], 0, Gt)));
        assert!(entails_linear(&[constraint(&[1], 0, Gt)], &constraint(&[1], 0, Ge)));
        // w0 >= 0 and w0 <= 0 entail w0 = 0.
        let a = [constraint(&[1], 0, Ge), constraint(&[1], 0, Le)];
        assert!(entails_linear(&a, &constraint(&[1], 0, Eq)));
    }

    #[test]
    fn inconsistent_assumptions_entail_anything() {
        let a = [constraint(&[1], 0, Gt), constraint(&[1], 0, Lt)];
        assert!(entails_linear(&a, &constraint(&[0, 1], 5, Eq)));
    }

    #[test]
    fn normalization_clears_denominators_and_gcd() {
        let c = LinearConstraint::new(
            LinearExpr {
                constant: BigRational::new(1.into(), 2.into()),
                coeffs: vec![BigRational::new(3.into(), 2.into())],
            },
            Gt,
        );
        assert_eq!(c, constraint(&[3], 1, Gt));
        assert_eq!(c.to_string(), "3*w0 > -1");
    }
}
