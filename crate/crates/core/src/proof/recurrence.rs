//! Linear recurrences with polynomial inhomogeneity, read off definitions.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::linear::rat_vec;
use super::poly::Polynomial;
use crate::eval::polynomial_terms;
use crate::expr::{DefinitionSet, StreamExpr};

/// `s(n+r) = a1*s(n+r-1) + ... + ar*s(n) + q(n)` with bases `s(0..r)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearRecurrence {
    pub name: String,
    #[serde(with = "rat_vec")]
    pub coeffs: Vec<BigRational>,
    pub inhomogeneity: Polynomial,
    #[serde(with = "rat_vec")]
    pub base: Vec<BigRational>,
}

impl LinearRecurrence {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// The first `count` elements.
    pub fn elements(&self, count: usize) -> Vec<BigRational> {
        let r = self.order();
        let mut out: Vec<BigRational> = self.base.iter().take(count).cloned().collect();
        for n in r..count {
            let mut v = self.inhomogeneity.eval_at((n - r) as u64);
            for (i, a) in self.coeffs.iter().enumerate() {
                v += a * &out[n - 1 - i];
            }
            out.push(v);
        }
        out
    }
}

impl fmt::Display for LinearRecurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.name;
        let r = self.order();
        write!(f, "{s}(n+{r}) =")?;
        let mut first = true;
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            f.write_str(if first { " " } else { " + " })?;
            first = false;
            if !a.is_one() {
                write!(f, "{a}*")?;
            }
            match r - 1 - i {
                0 => write!(f, "{s}(n)")?,
                k => write!(f, "{s}(n+{k})")?,
            }
        }
        if !self.inhomogeneity.is_zero() || first {
            if !first {
                f.write_str(" +")?;
            }
            write!(f, " ({})", self.inhomogeneity)?;
        }
        Ok(())
    }
}

/// True iff `p` satisfies the recurrence step exactly and matches its bases.
pub fn poly_satisfies(p: &Polynomial, rec: &LinearRecurrence) -> bool {
    step_residual(p, rec).is_zero()
        && rec.base.iter().enumerate().all(|(i, b)| p.eval_at(i as u64) == *b)
}

/// `p(n+r) - sum(ai * p(n+r-i)) - q(n)`.
pub fn step_residual(p: &Polynomial, rec: &LinearRecurrence) -> Polynomial {
    let r = rec.order() as i64;
    let mut d = p.shift(r).sub(&rec.inhomogeneity);
    for (i, a) in rec.coeffs.iter().enumerate() {
        d = d.sub(&p.shift(r - 1 - i as i64).scale(a));
    }
    d
}

/// Reads a linear recurrence off `name`'s defining expression: a rational
/// combination of its own tails plus a polynomial-in-`n` stream.
pub fn recurrence_of(name: &str, defs: &DefinitionSet) -> Option<LinearRecurrence> {
    Extractor { defs, active: Vec::new() }.recurrence(name)
}

/// `Some(p)` when `name(n) = p(n)` for every `n`.
pub fn polynomial_stream(name: &str, defs: &DefinitionSet) -> Option<Polynomial> {
    Extractor { defs, active: Vec::new() }.poly_of_name(name)
}

/// `Some(p)` when the expression's element `n` is `p(n)`.
pub fn polynomial_of_expr(e: &StreamExpr, defs: &DefinitionSet) -> Option<Polynomial> {
    Extractor { defs, active: Vec::new() }.poly_stream(e)
}

struct Extractor<'a> {
    defs: &'a DefinitionSet,
    /// Guards against cycles through other names: (kind, name).
    active: Vec<(bool, String)>,
}

impl Extractor<'_> {
    fn enter(&mut self, poly: bool, name: &str) -> bool {
        let key = (poly, name.to_string());
        if self.active.contains(&key) {
            return false;
        }
        self.active.push(key);
        true
    }

    fn bases(&self, name: &str) -> Option<Vec<BigRational>> {
        let (def, _) = self.defs.lookup(name)?;
        (0..def.base_cases.len())
            .map(|i| self.defs.base_case(name, i)?.as_rational())
            .collect()
    }

    fn recurrence(&mut self, name: &str) -> Option<LinearRecurrence> {
        if !self.enter(false, name) {
            return None;
        }
        let out = self.recurrence_inner(name);
        self.active.pop();
        out
    }

    fn recurrence_inner(&mut self, name: &str) -> Option<LinearRecurrence> {
        let base = self.bases(name)?;
        let r = base.len();
        let body = self.defs.component_body(name)?;
        let (constant, terms) = polynomial_terms(body);
        let mut coeffs = vec![BigRational::zero(); r];
        let mut q = Polynomial::constant(constant);
        let mut self_ref = false;
        for (mono, c) in terms {
            if let [StreamExpr::NameTail(t, k)] = mono.as_slice() {
                if t == name {
                    let k = *k as usize;
                    if k >= r {
                        return None;
                    }
                    coeffs[r - 1 - k] += c;
                    self_ref = true;
                    continue;
                }
            }
            if mono.iter().any(|a| a.names().contains(name)) {
                return None;
            }
            q = q.add(&self.monomial(&mono)?.scale(&c));
        }
        if !self_ref {
            return None;
        }
        Some(LinearRecurrence { name: name.to_string(), coeffs, inhomogeneity: q, base })
    }

    fn monomial(&mut self, atoms: &[StreamExpr]) -> Option<Polynomial> {
        let mut acc = Polynomial::constant(BigRational::one());
        for a in atoms {
            acc = acc.mul(&self.atom(a)?);
        }
        Some(acc)
    }

    fn atom(&mut self, e: &StreamExpr) -> Option<Polynomial> {
        use StreamExpr::*;
        let two = BigRational::from_integer(2.into());
        match e {
            NameTail(t, k) => Some(self.poly_of_name(t)?.shift(i64::try_from(*k).ok()?)),
            Const(v) => Some(Polynomial::constant(v.as_rational()?)),
            Even(x) => Some(self.poly_stream(x)?.compose_affine(&two, &BigRational::zero())),
            Odd(x) => Some(self.poly_stream(x)?.compose_affine(&two, &BigRational::one())),
            Shifted(x, k) => Some(self.poly_stream(x)?.shift(i64::try_from(*k).ok()?)),
            _ => None,
        }
    }

    fn poly_stream(&mut self, e: &StreamExpr) -> Option<Polynomial> {
        let (constant, terms) = polynomial_terms(e);
        let mut acc = Polynomial::constant(constant);
        for (mono, c) in terms {
            acc = acc.add(&self.monomial(&mono)?.scale(&c));
        }
        Some(acc)
    }

    fn poly_of_name(&mut self, name: &str) -> Option<Polynomial> {
        if !self.enter(true, name) {
            return None;
        }
        let out = self.poly_of_name_inner(name);
        self.active.pop();
        out
    }

    fn poly_of_name_inner(&mut self, name: &str) -> Option<Polynomial> {
        let base = self.bases(name)?;
        let body = self.defs.component_body(name)?;
        if !body.names().contains(name) {
            // name(m) = body(m - #base) past the bases; the bases must agree.
            let p = self.poly_stream(body)?.shift(-(base.len() as i64));
            return base.iter().enumerate().all(|(i, b)| p.eval_at(i as u64) == *b).then_some(p);
        }
        let rec = self.recurrence(name)?;
        // s(n+1) = s(n) + q(n) sums a polynomial, giving degree deg(q) + 1.
        if rec.order() != 1 || !rec.coeffs[0].is_one() {
            return None;
        }
        let points = rec.elements(rec.inhomogeneity.degree() + 2);
        let p = Polynomial::interpolate(&points);
        poly_satisfies(&p, &rec).then_some(p)
    }
}
