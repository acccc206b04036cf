//! Coefficient values over one of two fields: exact rationals or
//! high-precision floats.
//!
//! A computation runs entirely in one lane. The lane is fixed when a profile
//! is constructed; mixing lanes in arithmetic is a programming error and
//! panics. Promotion Exact -> Approx is explicit via [`Coeff::to_af`] /
//! [`Coeff::promote`] and one-way.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::approx::Af;
use crate::rational::{binom_rat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoeffMode {
    Exact,
    Approx { precision_bits: u32 },
}

impl CoeffMode {
    pub fn is_exact(&self) -> bool {
        matches!(self, CoeffMode::Exact)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Coeff {
    Exact(Rational),
    Approx(Af),
}

impl Coeff {
    pub fn mode(&self) -> CoeffMode {
        match self {
            Coeff::Exact(_) => CoeffMode::Exact,
            Coeff::Approx(a) => CoeffMode::Approx {
                precision_bits: a.precision_bits(),
            },
        }
    }

    pub fn zero(mode: CoeffMode) -> Coeff {
        match mode {
            CoeffMode::Exact => Coeff::Exact(Rational::zero()),
            CoeffMode::Approx { precision_bits } => Coeff::Approx(Af::zero(precision_bits)),
        }
    }

    pub fn one(mode: CoeffMode) -> Coeff {
        Coeff::from_int(1, mode)
    }

    pub fn from_int(n: i64, mode: CoeffMode) -> Coeff {
        match mode {
            CoeffMode::Exact => Coeff::Exact(Rational::from_integer(BigInt::from(n))),
            CoeffMode::Approx { precision_bits } => Coeff::Approx(Af::from_i64(n, precision_bits)),
        }
    }

    pub fn from_bigint(n: &BigInt, mode: CoeffMode) -> Coeff {
        match mode {
            CoeffMode::Exact => Coeff::Exact(Rational::from_integer(n.clone())),
            CoeffMode::Approx { precision_bits } => {
                Coeff::Approx(Af::from_bigint(n, precision_bits))
            }
        }
    }

    pub fn from_rational(r: &Rational, mode: CoeffMode) -> Coeff {
        match mode {
            CoeffMode::Exact => Coeff::Exact(r.clone()),
            CoeffMode::Approx { precision_bits } => {
                Coeff::Approx(Af::from_rational(r, precision_bits))
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Exact(r) => r.is_zero(),
            Coeff::Approx(a) => a.is_zero(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Coeff::Exact(r) => r.is_negative(),
            Coeff::Approx(a) => a.is_negative(),
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Coeff::Exact(r) => Some(r),
            Coeff::Approx(_) => None,
        }
    }

    /// Unwrap an exact value; panics on the float lane.
    pub fn expect_exact(&self, what: &str) -> &Rational {
        self.as_exact()
            .unwrap_or_else(|| panic!("{what}: expected an exact rational, got a float"))
    }

    /// Explicit promotion to the float lane at the given precision.
    pub fn to_af(&self, precision_bits: u32) -> Af {
        match self {
            Coeff::Exact(r) => Af::from_rational(r, precision_bits),
            Coeff::Approx(a) => a.clone(),
        }
    }

    /// Promote into the target mode. Exact -> Exact and Approx -> Approx are
    /// identity; Exact -> Approx converts; Approx -> Exact is refused.
    pub fn promote(&self, mode: CoeffMode) -> Coeff {
        match (self, mode) {
            (Coeff::Exact(r), CoeffMode::Exact) => Coeff::Exact(r.clone()),
            (c, CoeffMode::Approx { precision_bits }) => Coeff::Approx(c.to_af(precision_bits)),
            (Coeff::Approx(_), CoeffMode::Exact) => {
                panic!("cannot demote a float coefficient to the exact lane")
            }
        }
    }

    pub fn add(&self, rhs: &Coeff) -> Coeff {
        binop(self, rhs, |a, b| a + b, |a, b| a.add(b), "add")
    }

    pub fn sub(&self, rhs: &Coeff) -> Coeff {
        binop(self, rhs, |a, b| a - b, |a, b| a.sub(b), "sub")
    }

    pub fn mul(&self, rhs: &Coeff) -> Coeff {
        binop(self, rhs, |a, b| a * b, |a, b| a.mul(b), "mul")
    }

    pub fn div(&self, rhs: &Coeff) -> Coeff {
        binop(self, rhs, |a, b| a / b, |a, b| a.div(b), "div")
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Exact(r) => Coeff::Exact(-r.clone()),
            Coeff::Approx(a) => Coeff::Approx(a.neg()),
        }
    }

    pub fn abs(&self) -> Coeff {
        match self {
            Coeff::Exact(r) => Coeff::Exact(r.abs()),
            Coeff::Approx(a) => Coeff::Approx(a.abs()),
        }
    }

    pub fn mul_int(&self, n: i64) -> Coeff {
        self.mul(&Coeff::from_int(n, self.mode()))
    }

    pub fn mul_bigint(&self, n: &BigInt) -> Coeff {
        self.mul(&Coeff::from_bigint(n, self.mode()))
    }

    pub fn div_int(&self, n: i64) -> Coeff {
        assert!(n != 0, "division by zero integer");
        self.div(&Coeff::from_int(n, self.mode()))
    }

    /// Same-lane comparison; panics across lanes.
    pub fn le(&self, rhs: &Coeff) -> bool {
        match (self, rhs) {
            (Coeff::Exact(a), Coeff::Exact(b)) => a <= b,
            (Coeff::Approx(a), Coeff::Approx(b)) => a <= b,
            _ => panic!("comparison across Exact/Approx lanes"),
        }
    }

    pub fn lt(&self, rhs: &Coeff) -> bool {
        self.le(rhs) && self != rhs
    }

    /// Decimal value for display and reports.
    pub fn to_f64(&self) -> f64 {
        match self {
            Coeff::Exact(r) => Af::from_rational(r, 64).to_f64(),
            Coeff::Approx(a) => a.to_f64(),
        }
    }
}

fn binop(
    lhs: &Coeff,
    rhs: &Coeff,
    exact: impl FnOnce(&Rational, &Rational) -> Rational,
    approx: impl FnOnce(&Af, &Af) -> Af,
    what: &str,
) -> Coeff {
    match (lhs, rhs) {
        (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(exact(a, b)),
        (Coeff::Approx(a), Coeff::Approx(b)) => Coeff::Approx(approx(a, b)),
        _ => panic!("implicit Exact/Approx mixing in {what}; promote explicitly"),
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Exact(r) => write!(f, "{r}"),
            Coeff::Approx(a) => write!(f, "{a}"),
        }
    }
}

/// Generalized binomial coefficient x(x-1)...(x-k+1)/k!.
///
/// binom_gen(x, 0) = 1 in either lane.
pub fn binom_gen(x: &Coeff, k: u64) -> Coeff {
    match x {
        Coeff::Exact(r) => Coeff::Exact(binom_rat(r, k)),
        Coeff::Approx(a) => {
            let p = a.precision_bits();
            let mut acc = Af::one(p);
            let mut factor = a.clone();
            for i in 0..k {
                if i > 0 {
                    factor = factor.sub(&Af::one(p));
                }
                acc = acc.mul(&factor);
            }
            for i in 2..=k {
                acc = acc.div(&Af::from_i64(i as i64, p));
            }
            Coeff::Approx(acc)
        }
    }
}
