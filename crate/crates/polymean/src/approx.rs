//! High-precision floating point wrapper.
//!
//! `Af` pairs an `astro_float::BigFloat` with the precision (in bits) it was
//! created at. All operations round to that precision with round-to-even.
//! Transcendental functions share a thread-local constants cache.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_traits::Signed;

use crate::rational::Rational;

pub const DEFAULT_PRECISION_BITS: u32 = 128;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

#[derive(Clone, Debug)]
pub struct Af {
    value: BigFloat,
    prec: u32,
}

impl Af {
    fn wrap(value: BigFloat, prec: u32) -> Self {
        debug_assert!(!value.is_nan(), "NaN produced in high-precision arithmetic");
        Af { value, prec }
    }

    pub fn precision_bits(&self) -> u32 {
        self.prec
    }

    pub fn zero(prec: u32) -> Self {
        Af::wrap(BigFloat::from_i64(0, prec as usize), prec)
    }

    pub fn one(prec: u32) -> Self {
        Af::wrap(BigFloat::from_i64(1, prec as usize), prec)
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Af::wrap(BigFloat::from_i64(n, prec as usize), prec)
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        Af::wrap(BigFloat::from_f64(x, prec as usize), prec)
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> Self {
        let hex = format!("{:x}", n.abs());
        let parsed = with_consts(|cc| {
            BigFloat::parse(&hex, Radix::Hex, prec as usize + 64, RM, cc)
        });
        let v = if n.is_negative() { parsed.neg() } else { parsed };
        Af::wrap(round(v, prec), prec)
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        let num = Af::from_bigint(r.numer(), prec + 64);
        let den = Af::from_bigint(r.denom(), prec + 64);
        Af::wrap(num.value.div(&den.value, prec as usize, RM), prec)
    }

    pub fn add(&self, rhs: &Af) -> Af {
        let p = self.prec.max(rhs.prec);
        Af::wrap(self.value.add(&rhs.value, p as usize, RM), p)
    }

    pub fn sub(&self, rhs: &Af) -> Af {
        let p = self.prec.max(rhs.prec);
        Af::wrap(self.value.sub(&rhs.value, p as usize, RM), p)
    }

    pub fn mul(&self, rhs: &Af) -> Af {
        let p = self.prec.max(rhs.prec);
        Af::wrap(self.value.mul(&rhs.value, p as usize, RM), p)
    }

    pub fn div(&self, rhs: &Af) -> Af {
        let p = self.prec.max(rhs.prec);
        Af::wrap(self.value.div(&rhs.value, p as usize, RM), p)
    }

    pub fn neg(&self) -> Af {
        Af::wrap(self.value.neg(), self.prec)
    }

    pub fn abs(&self) -> Af {
        Af::wrap(self.value.abs(), self.prec)
    }

    pub fn recip(&self) -> Af {
        Af::one(self.prec).div(self)
    }

    pub fn ln(&self) -> Af {
        Af::wrap(with_consts(|cc| self.value.ln(self.prec as usize, RM, cc)), self.prec)
    }

    pub fn exp(&self) -> Af {
        Af::wrap(with_consts(|cc| self.value.exp(self.prec as usize, RM, cc)), self.prec)
    }

    pub fn sqrt(&self) -> Af {
        Af::wrap(self.value.sqrt(self.prec as usize, RM), self.prec)
    }

    /// self^e for a real exponent; self must be positive.
    ///
    /// Not delegated to astro-float's `pow`: that routine raises its working
    /// precision until the result can be correctly rounded, and when x^e
    /// lands exactly on a representable value (4^0.5 = 2) the search never
    /// terminates. Composing exp(e·ln x) with guard bits terminates on every
    /// input — ln and exp of nonzero dyadic arguments are irrational, so each
    /// step resolves at finite precision — at the cost of the last couple of
    /// guard bits, far below the tracked precision.
    pub fn pow(&self, e: &Af) -> Af {
        let p = self.prec.max(e.prec);
        let pg = p as usize + 64;
        let ln = with_consts(|cc| self.value.ln(pg, RM, cc));
        let m = e.value.mul(&ln, pg, RM);
        let r = with_consts(|cc| m.exp(pg, RM, cc));
        Af::wrap(round(r, p), p)
    }

    pub fn powi(&self, e: usize) -> Af {
        Af::wrap(self.value.powi(e, self.prec as usize, RM), self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_negative()
    }

    /// 2^-k at this value's precision, for tolerance construction.
    pub fn pow2(k: i64, prec: u32) -> Af {
        let two = Af::from_i64(2, prec);
        if k >= 0 {
            two.powi(k as usize)
        } else {
            two.powi((-k) as usize).recip()
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.value.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.value.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        self.to_dec_string().parse().unwrap_or(f64::NAN)
    }

    pub fn to_dec_string(&self) -> String {
        with_consts(|cc| self.value.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "nan".into())
    }
}

fn round(v: BigFloat, prec: u32) -> BigFloat {
    let mut v = v;
    // astro-float keeps the precision of the operation; normalize explicitly.
    if v.mantissa_max_bit_len().map_or(false, |n| n != prec as usize) {
        v.set_precision(prec as usize, RM).expect("set precision");
    }
    v
}

impl PartialEq for Af {
    fn eq(&self, other: &Self) -> bool {
        self.value.cmp(&other.value) == Some(0)
    }
}

impl PartialOrd for Af {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.cmp(&other.value).map(|c| c.cmp(&0))
    }
}

impl fmt::Display for Af {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dec_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn close(a: &Af, b: &Af, tol: f64) -> bool {
        a.sub(b).abs().to_f64() <= tol
    }

    #[test]
    fn rational_conversion_is_faithful() {
        let x = Af::from_rational(&rat(1, 3), 128);
        let direct = Af::from_i64(1, 128).div(&Af::from_i64(3, 128));
        assert!(close(&x, &direct, 1e-36));
    }

    #[test]
    fn exp_ln_round_trip() {
        let x = Af::from_f64(7.5, 128);
        let y = x.ln().exp();
        assert!(close(&x, &y, 1e-35));
    }

    #[test]
    fn pow_terminates_on_exactly_representable_results() {
        // Results landing exactly on binary-representable values (powers of
        // two especially) hang astro-float's own correctly-rounding pow.
        let half = Af::from_rational(&rat(1, 2), 128);
        let cases: [(i64, &Af, f64); 5] = [
            (4, &half, 2.0),
            (16, &half, 4.0),
            (256, &half, 16.0),
            (4, &half.neg(), 0.5),
            (16, &Af::from_rational(&rat(3, 4), 128), 8.0),
        ];
        for (base, e, want) in cases {
            let got = Af::from_i64(base, 128).pow(e);
            assert!(
                close(&got, &Af::from_f64(want, 128), 1e-35),
                "{base}^{} should be {want}, got {}",
                e.to_f64(),
                got.to_f64()
            );
        }
        // Fractional base on a power-of-two result.
        let got = Af::from_rational(&rat(1, 4), 128).pow(&half);
        assert!(close(&got, &Af::from_f64(0.5, 128), 1e-35));
    }

    #[test]
    fn pow_matches_exp_ln() {
        let x = Af::from_i64(190, 128);
        let e = Af::from_f64(0.5, 128);
        let a = x.pow(&e);
        let b = x.sqrt();
        assert!(close(&a, &b, 1e-34));
    }

    #[test]
    fn bigint_conversion_round_trips_to_string() {
        let n: BigInt = "-123456789012345678901234567890".parse().unwrap();
        let x = Af::from_bigint(&n, 192);
        assert!(x.is_negative());
        let back = x.abs().to_f64();
        assert!((back - 1.2345678901234568e29).abs() / 1.23e29 < 1e-12);
    }

    #[test]
    fn ordering() {
        let a = Af::from_f64(1.0, 128);
        let b = Af::from_f64(2.0, 128);
        assert!(a < b);
        assert!(b > a);
        assert_eq!(a, a.clone());
        assert!(Af::pow2(-10, 64).to_f64() == 0.0009765625);
    }
}
