//! Exact rational arithmetic helpers.
//!
//! `Rational` is an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator (both guaranteed by `num_rational::Ratio`). Everything
//! downstream that claims "exact" bottoms out here.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Rational = Ratio<BigInt>;

/// Shorthand for small literal fractions.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Integer binomial coefficient C(n, k) as a big integer; 0 for k > n.
pub fn binom_int(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Generalized binomial coefficient x(x-1)...(x-k+1)/k! for rational x.
pub fn binom_rat(x: &Rational, k: u64) -> Rational {
    let mut num = Rational::one();
    let mut factor = x.clone();
    for i in 0..k {
        if i > 0 {
            factor -= Rational::one();
        }
        num *= factor.clone();
    }
    let mut fact = BigInt::one();
    for i in 2..=k {
        fact *= BigInt::from(i);
    }
    num / Rational::from_integer(fact)
}

/// x^e for a signed integer exponent; panics on 0^negative.
pub fn pow_rat(x: &Rational, e: i64) -> Rational {
    if e >= 0 {
        x.pow(e as i32)
    } else {
        assert!(!x.is_zero(), "zero raised to a negative power");
        x.pow(e as i32)
    }
}

/// q^e as a rational for a u64 base and signed exponent.
pub fn pow_q(q: u64, e: i64) -> Rational {
    pow_rat(&Rational::from_integer(BigInt::from(q)), e)
}

/// Parse "a/b", an integer, or a plain decimal ("0.25") into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: BigInt = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| format!("bad decimal in {s:?}"))?
        };
        let digits = frac.trim();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal in {s:?}"));
        }
        let frac_num: BigInt = digits.parse().map_err(|_| format!("bad decimal in {s:?}"))?;
        let scale = BigInt::from(10u32).pow(digits.len() as u32);
        let abs = Rational::new(int.abs() * &scale + frac_num, scale);
        return Ok(if neg { -abs } else { abs });
    }
    let n: BigInt = s.parse().map_err(|_| format!("bad rational {s:?}"))?;
    Ok(Rational::from_integer(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binom_int_basic() {
        assert_eq!(binom_int(5, 2), big(10));
        assert_eq!(binom_int(4, 0), big(1));
        assert_eq!(binom_int(3, 5), big(0));
        assert_eq!(binom_int(50, 25), "126410606437752".parse().unwrap());
    }

    #[test]
    fn binom_rat_matches_integer_case() {
        assert_eq!(binom_rat(&rat_int(5), 2), rat_int(10));
        assert_eq!(binom_rat(&rat(-1, 2), 2), rat(3, 8));
        assert_eq!(binom_rat(&rat(7, 3), 0), rat_int(1));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("17").unwrap(), rat_int(17));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn pow_signed() {
        assert_eq!(pow_q(2, 10), rat_int(1024));
        assert_eq!(pow_q(2, -2), rat(1, 4));
        assert_eq!(pow_rat(&rat(2, 3), -1), rat(3, 2));
    }
}
