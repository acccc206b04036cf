//! Polynomials in the indeterminate q with exact rational coefficients.
//!
//! This is the output form of the mean value as a function of the field size:
//! sparse, exact, and evaluable at any integer q without rounding.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PolyInQ {
    coeffs_by_power: BTreeMap<u64, Rational>,
}

impl PolyInQ {
    pub fn zero() -> PolyInQ {
        PolyInQ::default()
    }

    pub fn monomial(power: u64, coeff: Rational) -> PolyInQ {
        let mut p = PolyInQ::zero();
        p.set_coeff(power, coeff);
        p
    }

    /// Store a coefficient; zeros are removed, never stored.
    pub fn set_coeff(&mut self, power: u64, coeff: Rational) {
        if coeff.is_zero() {
            self.coeffs_by_power.remove(&power);
        } else {
            self.coeffs_by_power.insert(power, coeff);
        }
    }

    pub fn coeff(&self, power: u64) -> Rational {
        self.coeffs_by_power
            .get(&power)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs_by_power.is_empty()
    }

    pub fn degree(&self) -> Option<u64> {
        self.coeffs_by_power.keys().next_back().copied()
    }

    /// (power, coefficient) pairs in ascending power order.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.coeffs_by_power.iter().map(|(&p, c)| (p, c))
    }

    pub fn add(&self, rhs: &PolyInQ) -> PolyInQ {
        let mut out = self.clone();
        for (p, c) in rhs.terms() {
            out.set_coeff(p, out.coeff(p) + c);
        }
        out
    }

    /// Exact evaluation at a positive integer q.
    pub fn eval(&self, q: u64) -> Rational {
        let qq = BigInt::from(q);
        let mut acc = Rational::zero();
        let mut last_pow = 0u64;
        let mut q_pow = BigInt::one();
        for (p, c) in self.terms() {
            q_pow *= Pow::pow(&qq, p - last_pow);
            last_pow = p;
            acc += c * Rational::from_integer(q_pow.clone());
        }
        acc
    }
}

impl fmt::Display for PolyInQ {
    /// Descending powers, e.g. "56*q^3 - 36*q^2 + 8*q"; unit coefficients
    /// drop the "1*", the constant term prints bare, zero prints "0".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.coeffs_by_power.iter().rev().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit = mag.is_one() && *p > 0;
            if !unit {
                write!(f, "{mag}")?;
            }
            match p {
                0 => {}
                1 => write!(f, "{}q", if unit { "" } else { "*" })?,
                _ => write!(f, "{}q^{}", if unit { "" } else { "*" }, p)?,
            }
        }
        Ok(())
    }
}
