//! The integer-indexed sequences derived from a d-profile — h_k, a_k, c_ν,
//! A_k, B_k — plus the arithmetic helpers μ(d), p(l), π_q(l).
//!
//! Conventions: all sequences are 1-based in the mathematics; returned vectors
//! start at the first defined index (a_1, h_1, c_{n+1}, A_{n+1}), except B
//! which starts at B_0.

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use crate::coeff::{Coeff, CoeffMode};
use crate::profile::DProfile;
use crate::series::Series;

/// Möbius function by trial division (arguments stay small).
pub fn mobius(n: u64) -> i64 {
    assert!(n >= 1, "mobius is defined for n >= 1");
    let mut n = n;
    let mut primes = 0u32;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            primes += 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        primes += 1;
    }
    if primes % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Divisors of n in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// p(0..=l) by the Euler pentagonal-number recurrence, exact.
pub fn partition_counts_up_to(l: u64) -> Vec<BigInt> {
    let l = l as usize;
    let mut p = vec![BigInt::zero(); l + 1];
    p[0] = BigInt::one();
    for n in 1..=l {
        let mut acc = BigInt::zero();
        let mut k = 1i64;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            let g2 = k * (3 * k + 1) / 2;
            if g1 as usize > n {
                break;
            }
            let sign_plus = k % 2 != 0;
            let mut term = p[n - g1 as usize].clone();
            if g2 as usize <= n {
                term += &p[n - g2 as usize];
            }
            if sign_plus {
                acc += term;
            } else {
                acc -= term;
            }
            k += 1;
        }
        p[n] = acc;
    }
    p
}

/// Number of integer partitions of l.
pub fn partition_count(l: u64) -> BigInt {
    partition_counts_up_to(l).pop().unwrap()
}

/// π_q(l) = (1/l) Σ_{d|l} μ(d) q^{l/d}: monic irreducibles of degree l
/// over F_q. Exact; the division is asserted to come out even.
pub fn pi_q(l: u64, q: u64) -> BigInt {
    assert!(l >= 1 && q >= 2, "pi_q needs l >= 1, q >= 2");
    let qq = BigInt::from(q);
    let mut sum = BigInt::zero();
    for d in divisors(l) {
        let mu = mobius(d);
        if mu == 0 {
            continue;
        }
        let term = Pow::pow(&qq, l / d);
        if mu > 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let (quot, rem) = num_integer::Integer::div_rem(&sum, &BigInt::from(l));
    assert!(rem.is_zero(), "necklace-count sum for pi_q(l={l}, q={q}) not divisible by l");
    quot
}

/// a_1..a_K, the Taylor coefficients of ln f(t), by the recursion
/// a_{n+1} = ((n+1)·d_{n+1} − Σ_{k=1}^{n} k·a_k·d_{n+1−k}) / (n+1).
pub fn a_from_d(profile: &DProfile, big_k: usize) -> Vec<Coeff> {
    assert!(big_k >= 1);
    let d: Vec<Coeff> = (1..=big_k as u64).map(|k| profile.d(k)).collect();
    let mut a: Vec<Coeff> = Vec::with_capacity(big_k);
    a.push(d[0].clone()); // a_1 = d_1
    for n in 1..big_k {
        // building a_{n+1}; vectors are 0-based: a[i] = a_{i+1}, d[i] = d_{i+1}
        let mut s = d[n].mul_int((n + 1) as i64);
        for k in 1..=n {
            s = s.sub(&a[k - 1].mul_int(k as i64).mul(&d[n - k]));
        }
        a.push(s.div_int((n + 1) as i64));
    }
    a
}

/// h_1..h_K by sequential annihilation: multiply f(t) by (1−t^k)^{h_k} and
/// read the next surviving coefficient.
pub fn h_from_d(profile: &DProfile, big_k: usize) -> Vec<Coeff> {
    assert!(big_k >= 1);
    let mut g = profile.f_series(big_k);
    let mut h = Vec::with_capacity(big_k);
    for k in 1..=big_k {
        let hk = g.coeff(k).clone();
        if k < big_k {
            g = g.mul(&Series::binomial_pow(k, &hk, big_k));
        }
        h.push(hk);
    }
    h
}

/// h_1..h_K from the a-sequence by Möbius inversion:
/// h_k = Σ_{d|k} μ(d)·a_{k/d}/d.
pub fn h_from_a_mobius(a: &[Coeff], big_k: usize) -> Vec<Coeff> {
    assert!(a.len() >= big_k, "need a_1..a_K to invert");
    let mode = a[0].mode();
    (1..=big_k as u64)
        .map(|k| {
            let mut s = Coeff::zero(mode);
            for d in divisors(k) {
                let mu = mobius(d);
                if mu == 0 {
                    continue;
                }
                let term = a[(k / d - 1) as usize].mul_int(mu).div_int(d as i64);
                s = s.add(&term);
            }
            s
        })
        .collect()
}

/// a_k = Σ_{d|k} d·h_d/k, the inverse identity (cross-check direction).
pub fn a_from_h_divisor_sum(h: &[Coeff], big_k: usize) -> Vec<Coeff> {
    assert!(h.len() >= big_k);
    let mode = h[0].mode();
    (1..=big_k as u64)
        .map(|k| {
            let mut s = Coeff::zero(mode);
            for d in divisors(k) {
                s = s.add(&h[(d - 1) as usize].mul_int(d as i64));
            }
            s.div_int(k as i64)
        })
        .collect()
}

/// c_{n+1}..c_{ν_max}: the log coefficients of the tail factor f_{n+1},
/// c_ν = a_ν − Σ_{d|ν, d≤n} d·h_d/ν.
pub fn c_coeffs(profile: &DProfile, n: usize, nu_max: usize) -> Vec<Coeff> {
    assert!(nu_max >= n + 1, "c_coeffs needs nu_max >= n+1");
    let a = a_from_d(profile, nu_max);
    let h = h_from_d(profile, n);
    (n + 1..=nu_max)
        .map(|nu| {
            let mut s = a[nu - 1].clone();
            for d in divisors(nu as u64) {
                if d as usize > n {
                    continue;
                }
                s = s.sub(&h[(d - 1) as usize].mul_int(d as i64).div_int(nu as i64));
            }
            s
        })
        .collect()
}

fn coeff_q_pow(q: u64, e: u64, mode: CoeffMode) -> Coeff {
    Coeff::from_bigint(&Pow::pow(&BigInt::from(q), e), mode)
}

/// A_{n+1}..A_{k_max}: A_k = q^{−k} Σ_{νdδ=k, ν≥n+1} μ(d)·q^δ·c_ν/(dδ).
pub fn cap_a_range(profile: &DProfile, n: usize, q: u64, k_max: usize) -> Vec<Coeff> {
    assert!(q >= 2 && k_max >= n + 1);
    let mode = profile.mode();
    let c = c_coeffs(profile, n, k_max);
    (n + 1..=k_max)
        .map(|k| {
            let mut s = Coeff::zero(mode);
            for nu in divisors(k as u64) {
                if (nu as usize) <= n {
                    continue;
                }
                let rest = k as u64 / nu;
                for d in divisors(rest) {
                    let mu = mobius(d);
                    if mu == 0 {
                        continue;
                    }
                    let delta = rest / d;
                    let term = coeff_q_pow(q, delta, mode)
                        .mul(&c[(nu as usize) - n - 1])
                        .mul_int(mu)
                        .div_int((d * delta) as i64);
                    s = s.add(&term);
                }
            }
            s.div(&coeff_q_pow(q, k as u64, mode))
        })
        .collect()
}

/// A_k for a single k; zero for k ≤ n (empty sum).
pub fn cap_a(profile: &DProfile, n: usize, k: usize, q: u64) -> Coeff {
    assert!(k >= 1);
    if k <= n {
        return Coeff::zero(profile.mode());
    }
    cap_a_range(profile, n, q, k).pop().unwrap()
}

/// B_0..B_K: coefficients of exp(Σ_{k≥n+1} A_k z^k).
pub fn cap_b(profile: &DProfile, n: usize, q: u64, big_k: usize) -> Vec<Coeff> {
    let mode = profile.mode();
    if big_k <= n {
        // exp of a series with no terms up to this order
        let mut b = vec![Coeff::zero(mode); big_k + 1];
        b[0] = Coeff::one(mode);
        return b;
    }
    let cap_a = cap_a_range(profile, n, q, big_k);
    let exponent = Series::from_fn(big_k, |k| {
        if k <= n {
            Coeff::zero(mode)
        } else {
            cap_a[k - n - 1].clone()
        }
    });
    exponent
        .exp()
        .expect("exponent series has zero constant term")
        .coeffs()
        .to_vec()
}

/// The h- and a-sequences of a profile to depth K.
#[derive(Clone, Debug)]
pub struct DerivedSequences {
    pub h: Vec<Coeff>,
    pub a: Vec<Coeff>,
    pub depth: usize,
}

pub fn derive_sequences(profile: &DProfile, big_k: usize) -> DerivedSequences {
    let h = h_from_d(profile, big_k);
    let a = a_from_d(profile, big_k);
    debug_assert!(h[0].sub(&a[0]).is_zero(), "h_1 = a_1 = d_1 must hold");
    DerivedSequences { h, a, depth: big_k }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::DProfile;
    use crate::rational::{rat, rat_int, Rational};

    fn exact(c: &Coeff) -> Rational {
        c.expect_exact("test").clone()
    }

    #[test]
    fn mobius_values() {
        let want = [
            (1, 1),
            (2, -1),
            (3, -1),
            (4, 0),
            (6, 1),
            (12, 0),
            (30, -1),
            (49, 0),
            (210, 1),
        ];
        for (n, mu) in want {
            assert_eq!(mobius(n), mu, "mu({n})");
        }
    }

    #[test]
    fn divisors_sorted() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(49), vec![1, 7, 49]);
    }

    #[test]
    fn partition_counts() {
        assert_eq!(partition_count(0), BigInt::from(1));
        assert_eq!(partition_count(5), BigInt::from(7));
        assert_eq!(partition_count(10), BigInt::from(42));
        assert_eq!(partition_count(100), BigInt::from(190569292u64));
    }

    #[test]
    fn partition_matches_direct_dp() {
        // independent oracle: count partitions by parts-bounded DP
        let l = 120usize;
        let mut dp = vec![BigInt::zero(); l + 1];
        dp[0] = BigInt::one();
        for part in 1..=l {
            for n in part..=l {
                let add = dp[n - part].clone();
                dp[n] += add;
            }
        }
        let pent = partition_counts_up_to(l as u64);
        assert_eq!(pent, dp);
    }

    #[test]
    fn pi_q_values() {
        assert_eq!(pi_q(1, 2), BigInt::from(2));
        assert_eq!(pi_q(2, 2), BigInt::from(1));
        assert_eq!(pi_q(3, 2), BigInt::from(2));
        assert_eq!(pi_q(2, 3), BigInt::from(3));
        assert_eq!(pi_q(4, 5), BigInt::from(150));
    }

    #[test]
    fn a_recursion_examples() {
        // d_k = 1: f = 1/(1-t), a_k = 1/k
        let a = a_from_d(&DProfile::one(), 6);
        for (i, ak) in a.iter().enumerate() {
            assert_eq!(exact(ak), rat(1, (i + 1) as i64));
        }
        // d = (1/2, 1/3, 1/4, ...): a_1 = 1/2, a_2 = 1/3 - 1/8 = 5/24
        let a = a_from_d(&DProfile::inv_tau(), 2);
        assert_eq!(exact(&a[0]), rat(1, 2));
        assert_eq!(exact(&a[1]), rat(5, 24));
    }

    #[test]
    fn a_matches_series_log() {
        for p in [DProfile::inv_tau(), DProfile::tau3_of_f2(), DProfile::ratio_tau(2)] {
            let k = 10;
            let a = a_from_d(&p, k);
            let log = p.f_series(k).log().unwrap();
            for i in 1..=k {
                assert_eq!(&a[i - 1], log.coeff(i), "a_{i} of {}", p.name());
            }
        }
    }

    #[test]
    fn h_closed_forms() {
        for p in [
            DProfile::inv_tau(),
            DProfile::tau3_of_f2(),
            DProfile::inv_2_omega(),
            DProfile::explicit(vec![rat(2, 7), rat(-3, 5), rat(1, 11)]),
        ] {
            let h = h_from_d(&p, 3);
            let d1 = exact(&p.d(1));
            let d2 = exact(&p.d(2));
            let d3 = exact(&p.d(3));
            assert_eq!(exact(&h[0]), d1);
            let h2 = &d2 - &d1 * (&d1 + rat_int(1)) / rat_int(2);
            assert_eq!(exact(&h[1]), h2, "h_2 for {}", p.name());
            let h3 = &d3 - &d1 * &d2 + &d1 * (&d1 * &d1 - rat_int(1)) / rat_int(3);
            assert_eq!(exact(&h[2]), h3, "h_3 for {}", p.name());
        }
    }

    #[test]
    fn tau_annihilates_immediately() {
        // f = (1-t)^{-2}: h_1 = 2, everything after vanishes
        let h = h_from_d(&DProfile::tau(), 8);
        assert_eq!(exact(&h[0]), rat_int(2));
        for hk in &h[1..] {
            assert!(hk.is_zero());
        }
    }

    #[test]
    fn mobius_inversion_round_trip() {
        for p in [DProfile::inv_tau(), DProfile::tau3_of_f2(), DProfile::inv_tau_m(3)] {
            let k = 12;
            let a = a_from_d(&p, k);
            assert_eq!(h_from_a_mobius(&a, k), h_from_d(&p, k), "{}", p.name());
        }
        // a_k = 1/k inverts to h = (1, 0, 0, ...)
        let a: Vec<Coeff> = (1..=8).map(|k| Coeff::Exact(rat(1, k))).collect();
        let h = h_from_a_mobius(&a, 8);
        assert_eq!(exact(&h[0]), rat_int(1));
        for hk in &h[1..] {
            assert!(hk.is_zero());
        }
    }

    #[test]
    fn divisor_sum_identity() {
        let p = DProfile::inv_tau_fr(2);
        let k = 12;
        let h = h_from_d(&p, k);
        assert_eq!(a_from_h_divisor_sum(&h, k), a_from_d(&p, k));
    }

    #[test]
    fn c_coefficients() {
        // n=1: c_nu = a_nu - d_1/nu
        let p = DProfile::inv_tau();
        let c = c_coeffs(&p, 1, 4);
        assert_eq!(exact(&c[0]), rat(5, 24) - rat(1, 4)); // c_2 = -1/24
        let a = a_from_d(&p, 4);
        for (i, nu) in (2..=4).enumerate() {
            assert_eq!(
                exact(&c[i]),
                exact(&a[nu - 1]) - rat(1, 2) / rat_int(nu as i64)
            );
        }
        // g = tau: f_2 = 1, c identically zero
        for cv in c_coeffs(&DProfile::tau(), 1, 8) {
            assert!(cv.is_zero());
        }
    }

    #[test]
    fn c_matches_log_of_annihilated_series() {
        // multiply f by (1-t)^{h_1}...(1-t^n)^{h_n}, take log, compare
        let p = DProfile::inv_2_omega();
        let (n, nu_max) = (2, 9);
        let h = h_from_d(&p, n);
        let mut g = p.f_series(nu_max);
        for (j, hj) in h.iter().enumerate() {
            g = g.mul(&Series::binomial_pow(j + 1, hj, nu_max));
        }
        let log = g.log().unwrap();
        let c = c_coeffs(&p, n, nu_max);
        for nu in n + 1..=nu_max {
            assert_eq!(&c[nu - n - 1], log.coeff(nu), "c_{nu}");
        }
    }

    #[test]
    fn cap_a_examples() {
        let p = DProfile::inv_tau();
        // n=1, k=2, q=2: A_2 = c_2/2
        let c2 = exact(&c_coeffs(&p, 1, 2)[0]);
        assert_eq!(exact(&cap_a(&p, 1, 2, 2)), c2 / rat_int(2));
        // k <= n: empty sum
        assert!(cap_a(&p, 3, 2, 2).is_zero());
        // g = tau: all A_k vanish
        for k in 2..=8 {
            assert!(cap_a(&DProfile::tau(), 1, k, 3).is_zero());
        }
    }

    #[test]
    fn cap_b_structure() {
        let p = DProfile::inv_tau();
        let b = cap_b(&p, 1, 2, 6);
        assert_eq!(exact(&b[0]), rat_int(1));
        assert!(b[1].is_zero());
        // B_2 = A_2 (lowest order of exp linearization)
        assert_eq!(b[2], cap_a(&p, 1, 2, 2));
        // g = tau: B_k = 0 for k >= 1
        let bt = cap_b(&DProfile::tau(), 1, 2, 6);
        assert_eq!(exact(&bt[0]), rat_int(1));
        for bk in &bt[1..] {
            assert!(bk.is_zero());
        }
    }

    #[test]
    fn h_bound_under_conda() {
        // |h_k| <= tau(k)/k for profiles satisfying k|a_k| <= 1
        for p in [DProfile::inv_tau(), DProfile::inv_2_omega(), DProfile::ratio_tau(2)] {
            let h = h_from_d(&p, 50);
            for (i, hk) in h.iter().enumerate() {
                let k = (i + 1) as u64;
                let tau_k = divisors(k).len() as i64;
                let bound = rat(tau_k, k as i64);
                assert!(
                    exact(&hk.abs()) <= bound,
                    "|h_{k}| > tau(k)/k for {}",
                    p.name()
                );
            }
        }
    }
}
