//! Truncated formal power series with explicit truncation order.
//!
//! A `Series` knows its coefficients for t^0..t^order; coefficients past the
//! order are *unknown*, not zero. Every operation truncates its result to the
//! order it can actually justify — nothing silently extends.

use num_bigint::BigInt;

use crate::coeff::{binom_gen, Coeff, CoeffMode};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    coeffs: Vec<Coeff>,
    order: usize,
}

impl Series {
    /// Build from coefficients of t^0..t^n (order = len - 1).
    pub fn new(coeffs: Vec<Coeff>) -> Series {
        assert!(!coeffs.is_empty(), "a series needs at least the constant term");
        let mode = coeffs[0].mode();
        assert!(
            coeffs.iter().all(|c| c.mode().is_exact() == mode.is_exact()),
            "all coefficients of a series must live in one lane"
        );
        let order = coeffs.len() - 1;
        Series { coeffs, order }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Coeff) -> Series {
        Series::new((0..=order).map(f).collect())
    }

    pub fn zero(order: usize, mode: CoeffMode) -> Series {
        Series::from_fn(order, |_| Coeff::zero(mode))
    }

    pub fn one(order: usize, mode: CoeffMode) -> Series {
        Series::from_fn(order, |k| if k == 0 { Coeff::one(mode) } else { Coeff::zero(mode) })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mode(&self) -> CoeffMode {
        self.coeffs[0].mode()
    }

    /// Coefficient of t^k. Panics past the truncation order: those values are
    /// unknown, and reading them would be a logic error, not a zero.
    pub fn coeff(&self, k: usize) -> &Coeff {
        assert!(
            k <= self.order,
            "coefficient of t^{k} requested from a series only known to order {}",
            self.order
        );
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> &Coeff {
        &self.coeffs[0]
    }

    /// Drop knowledge above `order` (must not exceed the current order).
    pub fn truncate(&self, order: usize) -> Series {
        assert!(order <= self.order, "truncate cannot extend a series");
        Series::new(self.coeffs[..=order].to_vec())
    }

    pub fn add(&self, rhs: &Series) -> Series {
        let order = self.order.min(rhs.order);
        Series::from_fn(order, |k| self.coeffs[k].add(&rhs.coeffs[k]))
    }

    pub fn sub(&self, rhs: &Series) -> Series {
        let order = self.order.min(rhs.order);
        Series::from_fn(order, |k| self.coeffs[k].sub(&rhs.coeffs[k]))
    }

    pub fn neg(&self) -> Series {
        Series::from_fn(self.order, |k| self.coeffs[k].neg())
    }

    pub fn scale(&self, c: &Coeff) -> Series {
        Series::from_fn(self.order, |k| self.coeffs[k].mul(c))
    }

    pub fn scale_bigint(&self, n: &BigInt) -> Series {
        let c = Coeff::from_bigint(n, self.mode());
        self.scale(&c)
    }

    /// Cauchy product truncated to min(order(a), order(b)), skipping zero
    /// coefficients (the factor series of the Euler product are lacunary, so
    /// this is where the q-fixed exact path earns its run time).
    pub fn mul(&self, rhs: &Series) -> Series {
        let order = self.order.min(rhs.order);
        let mode = self.mode();
        let mut out = vec![Coeff::zero(mode); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Series::new(out)
    }

    /// ln(self); requires constant term 1.
    ///
    /// Uses the log-derivative recurrence: with f = 1 + Σ d_k t^k and
    /// ln f = Σ a_k t^k,  n·a_n = n·d_n − Σ_{k=1}^{n−1} k·a_k·d_{n−k}.
    pub fn log(&self) -> Result<Series> {
        if !self.coeffs[0].sub(&Coeff::one(self.mode())).is_zero() {
            return Err(Error::NonUnitConstantTerm(format!(
                "series_log requires constant term 1, got {}",
                self.coeffs[0]
            )));
        }
        let mode = self.mode();
        let mut a = vec![Coeff::zero(mode); self.order + 1];
        for n in 1..=self.order {
            let mut s = self.coeffs[n].mul_int(n as i64);
            for k in 1..n {
                if a[k].is_zero() || self.coeffs[n - k].is_zero() {
                    continue;
                }
                s = s.sub(&a[k].mul_int(k as i64).mul(&self.coeffs[n - k]));
            }
            a[n] = s.div_int(n as i64);
        }
        Ok(Series::new(a))
    }

    /// exp(self); requires constant term 0.
    ///
    /// Inverse recurrence: n·f_n = Σ_{k=1}^{n} k·a_k·f_{n−k}, f_0 = 1.
    pub fn exp(&self) -> Result<Series> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonZeroConstantTerm(format!(
                "series_exp requires constant term 0, got {}",
                self.coeffs[0]
            )));
        }
        let mode = self.mode();
        let mut f = vec![Coeff::zero(mode); self.order + 1];
        f[0] = Coeff::one(mode);
        for n in 1..=self.order {
            let mut s = Coeff::zero(mode);
            for k in 1..=n {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                s = s.add(&self.coeffs[k].mul_int(k as i64).mul(&f[n - k]));
            }
            f[n] = s.div_int(n as i64);
        }
        Ok(Series::new(f))
    }

    /// Evaluate at a point, same lane as the coefficients (Horner).
    pub fn eval_at(&self, x: &Coeff) -> Coeff {
        let mut acc = self.coeffs[self.order].clone();
        for k in (0..self.order).rev() {
            acc = acc.mul(x).add(&self.coeffs[k]);
        }
        acc
    }

    /// Term-by-term derivative; the result is only known to order − 1.
    pub fn derivative(&self) -> Series {
        assert!(self.order >= 1, "derivative of an order-0 series is unknown at every order");
        Series::from_fn(self.order - 1, |k| self.coeffs[k + 1].mul_int((k + 1) as i64))
    }

    /// Substitute t ← s·t^l (s optional): coefficient of t^k moves to t^{lk},
    /// scaled by s^k. The input must be known far enough to justify every
    /// requested output coefficient.
    pub fn substitute_power(&self, l: usize, out_order: usize, scale: Option<&Coeff>) -> Series {
        assert!(l >= 1, "substitute_power needs l >= 1");
        assert!(
            out_order / l <= self.order,
            "substitute_power to order {out_order} with step {l} needs input order {}, have {}",
            out_order / l,
            self.order
        );
        let mode = self.mode();
        let mut out = vec![Coeff::zero(mode); out_order + 1];
        let mut s_pow = Coeff::one(mode);
        for k in 0..=self.order {
            if l * k > out_order {
                break;
            }
            out[l * k] = match scale {
                Some(_) => self.coeffs[k].mul(&s_pow),
                None => self.coeffs[k].clone(),
            };
            if let Some(s) = scale {
                s_pow = s_pow.mul(s);
            }
        }
        Series::new(out)
    }

    /// Explicit promotion of every coefficient to the float lane.
    pub fn to_approx(&self, precision_bits: u32) -> Series {
        Series::from_fn(self.order, |k| Coeff::Approx(self.coeffs[k].to_af(precision_bits)))
    }

    /// (1 − t^m)^h to the given order: coefficient of t^{mk} is
    /// (−1)^k · binom_gen(h, k); everything else is genuinely zero.
    pub fn binomial_pow(m: usize, h: &Coeff, order: usize) -> Series {
        assert!(m >= 1, "binomial_pow needs m >= 1");
        let mode = h.mode();
        let mut out = vec![Coeff::zero(mode); order + 1];
        let mut k = 0usize;
        while m * k <= order {
            let b = binom_gen(h, k as u64);
            out[m * k] = if k % 2 == 0 { b } else { b.neg() };
            k += 1;
        }
        Series::new(out)
    }
}
