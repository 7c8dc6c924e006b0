//! Polynomials in the index `n` with rational coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::linear::rat_vec;

/// `coeffs[i] * n^i` summed; no trailing zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    #[serde(with = "rat_vec")]
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `n`.
    pub fn index() -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeffs.first().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, n: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * n + c)
    }

    pub fn eval_at(&self, n: u64) -> BigRational {
        self.eval(&BigRational::from_integer(BigInt::from(n)))
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Polynomial, i: usize| p.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
        Polynomial::new((0..len).map(|i| get(self, i) + get(other, i)).collect())
    }

    pub fn scale(&self, k: &BigRational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// `p(a*n + b)`.
    pub fn compose_affine(&self, a: &BigRational, b: &BigRational) -> Polynomial {
        let inner = Polynomial::new(vec![b.clone(), a.clone()]);
        self.coeffs.iter().rev().fold(Polynomial::zero(), |acc, c| acc.mul(&inner).add(&Polynomial::constant(c.clone())))
    }

    /// `p(n + k)`.
    pub fn shift(&self, k: i64) -> Polynomial {
        self.compose_affine(&BigRational::one(), &BigRational::from_integer(k.into()))
    }

    /// The unique polynomial of degree `< points.len()` through `(i, points[i])`.
    pub fn interpolate(points: &[BigRational]) -> Polynomial {
        let mut acc = Polynomial::zero();
        for (i, y) in points.iter().enumerate() {
            let mut basis = Polynomial::constant(y.clone());
            for j in 0..points.len() {
                if j == i {
                    continue;
                }
                let denom = BigRational::from_integer(BigInt::from(i as i64 - j as i64));
                let factor = Polynomial::new(vec![BigRational::from_integer(BigInt::from(-(j as i64))), BigRational::one()]);
                basis = basis.mul(&factor).scale(&denom.recip());
            }
            acc = acc.add(&basis);
        }
        acc
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    f.write_str("n")?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
