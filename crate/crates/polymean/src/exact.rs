//! Exact mean values T(N) = Σ_{deg F = N, F monic} g(F), two independent ways:
//! as a polynomial in q (the A_l(N) expansion), and at fixed q by coefficient
//! extraction from the truncated Euler product.

use std::collections::HashMap;


use crate::coeff::{binom_gen, Coeff, CoeffMode};
use crate::error::{Error, Result};
use crate::polyq::PolyInQ;
use crate::profile::DProfile;
use crate::rational::Rational;
use crate::sequences::{h_from_d, pi_q};
use crate::series::Series;

/// T(N) as a polynomial in q: coefficient of q^{N−l} is A_l(N).
#[derive(Clone, Debug, PartialEq)]
pub struct MeanValuePoly {
    pub n: usize,
    pub poly: PolyInQ,
    /// A_0(N)..A_{N−1}(N)
    pub coefficients: Vec<Rational>,
}

/// Memo for the generalized binomials binom(−h_j, k): the A_l(N) enumeration
/// reuses identical factors heavily across l.
pub struct BinomMemo {
    cache: HashMap<(usize, u64), Coeff>,
}

impl BinomMemo {
    pub fn new() -> BinomMemo {
        BinomMemo { cache: HashMap::new() }
    }

    /// binom_gen(−h_j, k), memoized by (j, k); h is the 1-based h-sequence.
    fn get(&mut self, h: &[Coeff], j: usize, k: u64) -> Coeff {
        if let Some(c) = self.cache.get(&(j, k)) {
            return c.clone();
        }
        let v = binom_gen(&h[j - 1].neg(), k);
        self.cache.insert((j, k), v.clone());
        v
    }
}

impl Default for BinomMemo {
    fn default() -> Self {
        BinomMemo::new()
    }
}

/// Enumerate the multiplicity vectors (k_2..k_{l+1}) with
/// Σ_{j=2}^{l+1} (j−1)·k_j = l — i.e. the partitions of l, where k_j counts
/// parts of size j−1 — largest part first, recursively.
fn for_each_partition(l: usize, mut cb: impl FnMut(&[usize])) {
    // counts[s] = multiplicity of part size s, s = 1..=l
    fn rec(remaining: usize, size: usize, counts: &mut [usize], cb: &mut impl FnMut(&[usize])) {
        if remaining == 0 {
            cb(counts);
            return;
        }
        if size == 0 {
            return;
        }
        let max_cnt = remaining / size;
        for cnt in (0..=max_cnt).rev() {
            counts[size] = cnt;
            rec(remaining - cnt * size, size - 1, counts, cb);
        }
        counts[size] = 0;
    }
    if l == 0 {
        cb(&[]);
        return;
    }
    let mut counts = vec![0usize; l + 1];
    rec(l, l, &mut counts, &mut cb);
}

/// A_l(N) given the h-sequence h_1..h_{l+1} (at least) and a binomial memo.
///
/// Only l ≤ N−1 contributes to T(N); for l ≥ N ≥ 1 every partition leaves
/// k_1 < 0, so this returns zero and truncations may over-ask harmlessly.
pub fn a_l_with(h: &[Coeff], memo: &mut BinomMemo, mode: CoeffMode, l: usize, n: usize) -> Coeff {
    assert!(h.len() > l, "need h_1..h_{}", l + 1);
    let mut total = Coeff::zero(mode);
    for_each_partition(l, |counts| {
        // counts[s] = k_{s+1}; parts total Σ k_j (j >= 2)
        let parts: usize = counts.iter().sum();
        let weighted: usize = counts.iter().enumerate().map(|(s, c)| s * c).sum();
        debug_assert_eq!(weighted, l);
        if n < l + parts {
            return; // k_1 = N - l - Σk_j would be negative
        }
        let k1 = n - l - parts;
        let mut term = memo.get(h, 1, k1 as u64);
        for (s, &cnt) in counts.iter().enumerate().skip(1) {
            if cnt > 0 {
                term = term.mul(&memo.get(h, s + 1, cnt as u64));
            }
        }
        if (k1 + parts) % 2 != 0 {
            term = term.neg();
        }
        total = total.add(&term);
    });
    total
}

/// A_l(N): the q-independent coefficient of q^{N−l} in T(N).
pub fn a_l_of_n(profile: &DProfile, l: usize, n: usize) -> Coeff {
    let h = h_from_d(profile, l + 1);
    a_l_with(&h, &mut BinomMemo::new(), profile.mode(), l, n)
}

/// T(N) = Σ_{l=0}^{N−1} A_l(N)·q^{N−l}, exact profiles only.
pub fn t_poly_thm1(profile: &DProfile, n: usize) -> Result<MeanValuePoly> {
    assert!(n >= 1, "T(N) needs N >= 1");
    if !profile.is_exact() {
        return Err(Error::FloatProfileNotSupported(format!(
            "polynomial-in-q output requires exact rational coefficients; profile {} is float-valued",
            profile.name()
        )));
    }
    let h = h_from_d(profile, n);
    let mut memo = BinomMemo::new();
    let mut poly = PolyInQ::zero();
    let mut coefficients = Vec::with_capacity(n);
    for l in 0..n {
        let al = a_l_with(&h, &mut memo, CoeffMode::Exact, l, n);
        let al = al.expect_exact("A_l of an exact profile").clone();
        poly.set_coeff((n - l) as u64, al.clone());
        coefficients.push(al);
    }
    Ok(MeanValuePoly { n, poly, coefficients })
}

/// T(N) at fixed q from the Euler product ∏_{l=1}^{N} f(u^l)^{π_q(l)}:
/// computed as exp(Σ_l π_q(l)·(log f)(u^l)) so the huge integer exponents
/// π_q(l) enter as scalar multiplications, and the coefficient of u^N is read
/// off. Factors with l > N are ≡ 1 to this order and are dropped.
pub fn t_exact_euler(profile: &DProfile, n: usize, q: u64) -> Coeff {
    assert!(n >= 1 && q >= 2, "T_exact_euler needs N >= 1, q >= 2");
    let mode = profile.mode();
    let log_f = profile
        .f_series(n)
        .log()
        .expect("f has constant term 1 by construction");
    let mut total = Series::zero(n, mode);
    for l in 1..=n {
        let scaled = log_f.substitute_power(l, n, None).scale_bigint(&pi_q(l as u64, q));
        total = total.add(&scaled);
    }
    let product = total.exp().expect("sum of logs has zero constant term");
    product.coeff(n).clone()
}

#[derive(Clone, Debug)]
pub struct CrosscheckEntry {
    pub q: u64,
    pub value: Rational,
}

#[derive(Clone, Debug)]
pub struct CrosscheckReport {
    pub n: usize,
    pub poly: PolyInQ,
    pub entries: Vec<CrosscheckEntry>,
}

/// Assert T_poly_thm1 evaluated at q equals T_exact_euler at q, for each q.
pub fn crosscheck_exact(profile: &DProfile, n: usize, q_list: &[u64]) -> Result<CrosscheckReport> {
    let mean = t_poly_thm1(profile, n)?;
    let mut entries = Vec::with_capacity(q_list.len());
    for &q in q_list {
        let from_poly = mean.poly.eval(q);
        let from_euler = t_exact_euler(profile, n, q)
            .expect_exact("Euler product of an exact profile")
            .clone();
        if from_poly != from_euler {
            return Err(Error::MismatchDetected {
                q,
                n,
                poly: from_poly.to_string(),
                euler: from_euler.to_string(),
            });
        }
        entries.push(CrosscheckEntry { q, value: from_poly });
    }
    Ok(CrosscheckReport { n, poly: mean.poly, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{binom_int, binom_rat, rat, rat_int};

    fn exact(c: &Coeff) -> Rational {
        c.expect_exact("test").clone()
    }

    fn poly_of(profile: &DProfile, n: usize) -> PolyInQ {
        t_poly_thm1(profile, n).unwrap().poly
    }

    // binom(x, k) with the k < 0 convention: empty selection, 0
    fn binom_signed(x: &Rational, k: i64) -> Rational {
        if k < 0 {
            rat_int(0)
        } else {
            binom_rat(x, k as u64)
        }
    }

    #[test]
    fn a_l_vanishes_at_and_past_n() {
        for preset in [DProfile::inv_tau(), DProfile::tau(), DProfile::inv_2_omega()] {
            for n in 1..=6usize {
                for l in n..=n + 3 {
                    assert!(
                        a_l_of_n(&preset, l, n).is_zero(),
                        "A_{l}({n}) should vanish for {}",
                        preset.name()
                    );
                }
            }
        }
    }

    #[test]
    fn paper_n3_polynomials() {
        // τ_3(F²): 56q³ − 36q² + 8q
        assert_eq!(
            poly_of(&DProfile::tau3_of_f2(), 3).to_string(),
            "56*q^3 - 36*q^2 + 8*q"
        );
        // 1/2^ω: (5q³ + q² + 2q)/16
        let p = poly_of(&DProfile::inv_2_omega(), 3);
        assert_eq!(p.coeff(3), rat(5, 16));
        assert_eq!(p.coeff(2), rat(1, 16));
        assert_eq!(p.coeff(1), rat(2, 16));
        // 1/τ: (15q³ − q² − 2q)/48
        let p = poly_of(&DProfile::inv_tau(), 3);
        assert_eq!(p.coeff(3), rat(15, 48));
        assert_eq!(p.coeff(2), rat(-1, 48));
        assert_eq!(p.coeff(1), rat(-2, 48));
    }

    #[test]
    fn a_l_closed_forms() {
        let presets = [
            DProfile::inv_tau(),
            DProfile::inv_2_omega(),
            DProfile::tau3_of_f2(),
            DProfile::ratio_tau(2),
            DProfile::inv_tau_m(3),
        ];
        for p in &presets {
            let d1 = exact(&p.d(1));
            let d2 = exact(&p.d(2));
            let d3 = exact(&p.d(3));
            let h2 = &d2 - &d1 * (&d1 + rat_int(1)) / rat_int(2);
            let h3 = &d3 - &d1 * &d2 + &d1 * (&d1 * &d1 - rat_int(1)) / rat_int(3);
            for n in 3..=12usize {
                let nn = n as i64;
                // A_0(N) = binom(d_1 + N − 1, N)
                assert_eq!(
                    exact(&a_l_of_n(p, 0, n)),
                    binom_rat(&(&d1 + rat_int(nn - 1)), n as u64),
                    "A_0({n}) for {}",
                    p.name()
                );
                // A_1(N) = binom(d_1 + N − 3, N − 2) · h_2
                assert_eq!(
                    exact(&a_l_of_n(p, 1, n)),
                    binom_signed(&(&d1 + rat_int(nn - 3)), nn - 2) * &h2,
                    "A_1({n}) for {}",
                    p.name()
                );
                // A_2(N) = binom(d_1+N−4, N−3)·h_3 + binom(d_1+N−5, N−4)·binom(1+h_2, 2)
                let want = binom_signed(&(&d1 + rat_int(nn - 4)), nn - 3) * &h3
                    + binom_signed(&(&d1 + rat_int(nn - 5)), nn - 4)
                        * binom_rat(&(rat_int(1) + &h2), 2);
                assert_eq!(exact(&a_l_of_n(p, 2, n)), want, "A_2({n}) for {}", p.name());
            }
        }
    }

    #[test]
    fn partition_enumeration_count() {
        for (l, pl) in [(0usize, 1usize), (1, 1), (2, 2), (5, 7), (10, 42)] {
            let mut count = 0;
            for_each_partition(l, |_| count += 1);
            assert_eq!(count, pl, "p({l})");
        }
    }

    #[test]
    fn tau_m_collapses_to_leading_term() {
        for m in 2..=4u64 {
            let p = DProfile::tau_m(m);
            for n in 1..=10usize {
                let mean = t_poly_thm1(&p, n).unwrap();
                assert_eq!(
                    mean.poly,
                    PolyInQ::monomial(
                        n as u64,
                        Rational::from_integer(binom_int(n as u64 + m - 1, m - 1))
                    ),
                    "tau_{m} at N={n}"
                );
            }
        }
    }

    #[test]
    fn tau_k_of_fr_leading_term() {
        for (k, r) in [(2u64, 2u64), (3, 2), (2, 3)] {
            let p = DProfile::tau_k_of_f_r(k, r);
            for n in 1..=6usize {
                let a0 = exact(&a_l_of_n(&p, 0, n));
                let base = Rational::from_integer(binom_int(k + r - 1, k - 1));
                assert_eq!(
                    a0,
                    binom_rat(&(base + rat_int(n as i64 - 1)), n as u64),
                    "leading term of tau_{k}(F^{r}) at N={n}"
                );
            }
        }
    }

    #[test]
    fn euler_product_examples() {
        // g ≡ 1 counts monic polynomials: q^N
        assert_eq!(exact(&t_exact_euler(&DProfile::one(), 5, 7)), rat_int(16807));
        assert_eq!(exact(&t_exact_euler(&DProfile::one(), 3, 4)), rat_int(64));
        // g = τ at q=3, N=4: A_0 = 5, rest vanish → 5·81
        assert_eq!(exact(&t_exact_euler(&DProfile::tau(), 4, 3)), rat_int(405));
        // 1/τ at q=2, N=3: the N=3 polynomial (15q³−q²−2q)/48 at q=2 → 112/48
        assert_eq!(exact(&t_exact_euler(&DProfile::inv_tau(), 3, 2)), rat(7, 3));
    }

    #[test]
    fn euler_matches_polynomial() {
        let presets = [
            DProfile::inv_tau(),
            DProfile::inv_2_omega(),
            DProfile::tau3_of_f2(),
            DProfile::explicit(vec![rat(1, 2), rat_int(10)]),
        ];
        for p in &presets {
            for n in 1..=8usize {
                let mean = t_poly_thm1(p, n).unwrap();
                for q in [2u64, 3, 5] {
                    assert_eq!(
                        mean.poly.eval(q),
                        exact(&t_exact_euler(p, n, q)),
                        "{} at N={n}, q={q}",
                        p.name()
                    );
                }
            }
        }
    }

    #[test]
    fn crosscheck_passes_and_catches_mismatch() {
        let report = crosscheck_exact(&DProfile::c_omega(&rat(1, 3)), 6, &[2, 3]).unwrap();
        assert_eq!(report.entries.len(), 2);
        // the one preset gives q^N = 2^5 = 32 at the first entry
        let one = crosscheck_exact(&DProfile::one(), 5, &[2]).unwrap();
        assert_eq!(one.entries[0].value, rat_int(32));
    }

    #[test]
    fn float_profile_rejected_for_polynomial() {
        let p = DProfile::inv_tau_alpha(&rat(1, 2), 96);
        assert!(matches!(
            t_poly_thm1(&p, 3),
            Err(Error::FloatProfileNotSupported(_))
        ));
    }

    #[test]
    fn euler_product_works_in_float_lane() {
        // same value as exact inv_tau when α = 1 runs as a float profile
        let exact_val = exact(&t_exact_euler(&DProfile::inv_tau(), 5, 2));
        let float_p = DProfile::inv_tau_alpha(&rat(1, 2), 128);
        let v = t_exact_euler(&float_p, 3, 2); // well-defined, finite
        assert!(v.to_f64().is_finite());
        let alpha_one = DProfile::inv_tau_alpha(&rat_int(1), 128);
        assert!(alpha_one.is_exact());
        assert_eq!(exact(&t_exact_euler(&alpha_one, 5, 2)), exact_val);
    }
}
