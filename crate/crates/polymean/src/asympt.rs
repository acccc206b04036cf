//! Asymptotic expansions with explicit error bounds, sufficient-condition
//! checkers, and the limiting constants of the mean-value problem.
//!
//! Two expansion modes are provided. [`thm2_expand`] truncates the exact
//! expansion T(N) = Σ_l A_l(N) q^{N−l} after `h` terms and reports the
//! rigorous error bound 3.1·d_1·p(h)·q^{N−h}/N^{1−d_1}, together with the
//! preconditions under which that bound is proved (large N, small h, and an
//! astronomically large q). [`gorodetsky_expand`] evaluates the refined
//! correction series built from the auxiliary power series a(x) and its
//! derivatives at x = q^{−1}; its error term is an order-of-magnitude shape,
//! not a certified constant, and the report says so.
//!
//! Preconditions never abort an evaluation: every report carries a
//! [`Precondition`] list and a `rigorous` flag, so exploratory use outside
//! the proved regime stays possible while remaining clearly labelled. The
//! only hard gate is d_1 ∈ (0, 1), without which the expansions are
//! meaningless ([`crate::error::Error::D1OutOfRange`]).

use num_bigint::BigInt;
use num_traits::One;

use crate::approx::{Af, DEFAULT_PRECISION_BITS};
use crate::coeff::{binom_gen, Coeff, CoeffMode};
use crate::error::{Error, Result};
use crate::exact::{a_l_with, BinomMemo};
use crate::profile::DProfile;
use crate::sequences::{a_from_d, cap_a_range, h_from_d, partition_count, pi_q};
use crate::series::Series;

/// Depth to which `k·|a_k| ≤ 1` is spot-checked when an expansion report is
/// assembled and no explicit depth is requested.
pub const DEFAULT_CONDA_DEPTH: usize = 50;

/// Which expansion produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionMode {
    Thm2,
    Gorodetsky,
}

/// One entry of a report's precondition list: the hypothesis `name`, the
/// `required` threshold, the `actual` value in this invocation, and whether
/// the hypothesis is `satisfied`.
#[derive(Debug, Clone)]
pub struct Precondition {
    pub name: String,
    pub required: String,
    pub actual: String,
    pub satisfied: bool,
}

impl Precondition {
    fn new(name: &str, required: String, actual: String, satisfied: bool) -> Precondition {
        Precondition {
            name: name.to_string(),
            required,
            actual,
            satisfied,
        }
    }
}

/// Result of an asymptotic evaluation.
///
/// `main_value` is the computed approximation to T(N). For `Thm2` on an
/// exact profile it is an exact rational (a finite sum of A_l q^{N−l});
/// for `Gorodetsky` it is always a float, since the correction series is an
/// analytic object evaluated through a truncated Taylor expansion.
///
/// `error_bound` is a magnitude. For `Thm2` it is the theorem's explicit
/// constant (`error_bound_rigorous = true`, valid when every precondition
/// holds); for `Gorodetsky` it is the error's proved *shape* with an
/// implied constant of 1 (`error_bound_rigorous = false`).
#[derive(Debug, Clone)]
pub struct ExpansionReport {
    pub mode: ExpansionMode,
    /// Degree N of the mean value being approximated.
    pub n: usize,
    /// Field size q.
    pub q: u64,
    /// Truncation parameter: `h` for Thm2 (terms l < h), `n` for Gorodetsky
    /// (corrections k ≤ n).
    pub truncation: usize,
    pub main_value: Coeff,
    pub error_bound: Coeff,
    pub error_bound_rigorous: bool,
    pub preconditions: Vec<Precondition>,
    /// True iff every precondition is satisfied.
    pub rigorous: bool,
    /// Gorodetsky only: Taylor order used for the a(x) series.
    pub taylor_order: Option<usize>,
    /// Gorodetsky only: geometric estimate of the Taylor tail dropped when
    /// evaluating a(q^{−1}), from the observed decay of the last terms.
    pub taylor_tail_estimate: Option<Coeff>,
}

/// Which sufficient condition a [`ConditionReport`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    /// Proposition A: d_1 ∈ (0,1), d_{k+1} ≤ d_k, and k·d_k ≤ (k+1)·d_{k+1}.
    CondA,
    /// Proposition B: d_1 ∈ (0,1) and Σ_{k≤n} |d_k| + (n+1)|d_{n+1}| ≤ 1.
    CondB,
    /// The recursion bound k·|a_k| ≤ 1 on the logarithmic coefficients.
    CondARecursionBound,
}

/// Outcome of a sufficient-condition check up to a finite depth.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub condition: ConditionKind,
    /// Largest index examined.
    pub checked_up_to: usize,
    /// Smallest index at which the condition fails, if any.
    pub first_violation: Option<usize>,
    /// True iff no violation was found up to `checked_up_to`.
    pub holds: bool,
}

/// One row of [`check_al_bound`]: the coefficient magnitude |A_l(N)|, the
/// bound 3·d_1·p(l)/N^{1−d_1}, and their float-lane comparison.
#[derive(Debug, Clone)]
pub struct AlBoundEntry {
    pub l: usize,
    pub al_abs: Coeff,
    pub bound: Coeff,
    pub margin: Coeff,
    pub satisfied: bool,
}

/// Outcome of [`check_al_bound`] over l = 0..=l_max.
#[derive(Debug, Clone)]
pub struct AlBoundReport {
    pub n: usize,
    pub l_max: usize,
    /// N/(36 ln N): the range of l inside which the bound is asserted.
    pub rigorous_l_limit: f64,
    /// True when `l_max` exceeds `rigorous_l_limit`, i.e. some rows probe
    /// beyond the proved range.
    pub exploratory: bool,
    pub entries: Vec<AlBoundEntry>,
    pub all_satisfied: bool,
}

/// Which limiting constant [`constant_c`] computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantKind {
    /// C_0 = ∏_l ((2q^l − 1) / (2·sqrt(q^{2l} − q^l)))^{π_q(l)}.
    C0,
    /// C_1 = ∏_l (sqrt(q^{2l} − q^l) · ln(q^l/(q^l − 1)))^{π_q(l)}.
    C1,
}

/// A limiting constant together with a geometric estimate of the truncated
/// product's tail.
#[derive(Debug, Clone)]
pub struct ConstantReport {
    pub kind: ConstantKind,
    pub q: u64,
    pub l_max: usize,
    pub value: Coeff,
    pub tail_estimate: Coeff,
}

/// Options for [`gorodetsky_expand_with`].
#[derive(Debug, Clone)]
pub struct GorodetskyOpts {
    /// Taylor order for the a(x) series; default max(2n + 8, 32). At small q
    /// the series coefficients grow like q^{k/2}, so the term of order M
    /// contributes ~q^{−M/2} at x = q^{−1}: raise this when the reported
    /// `taylor_tail_estimate` is not far below the error bound.
    pub taylor_order: Option<usize>,
    /// Depth of the conda spot-check recorded in the preconditions.
    pub conda_depth: usize,
}

impl Default for GorodetskyOpts {
    fn default() -> GorodetskyOpts {
        GorodetskyOpts {
            taylor_order: None,
            conda_depth: DEFAULT_CONDA_DEPTH,
        }
    }
}

fn profile_precision(profile: &DProfile) -> u32 {
    match profile.mode() {
        CoeffMode::Exact => DEFAULT_PRECISION_BITS,
        CoeffMode::Approx { precision_bits } => precision_bits,
    }
}

/// Hard gate shared by all expansions: d_1 must lie strictly inside (0, 1).
fn gate_d1(profile: &DProfile) -> Result<Coeff> {
    let d1 = profile.d1();
    let mode = profile.mode();
    let zero = Coeff::zero(mode);
    let one = Coeff::one(mode);
    if zero.lt(&d1) && d1.lt(&one) {
        Ok(d1)
    } else {
        Err(Error::D1OutOfRange(format!(
            "profile {} has d_1 = {}, outside (0, 1)",
            profile.name(),
            d1
        )))
    }
}

/// q^e as a float, for possibly negative e.
fn q_pow_af(q: u64, e: i64, prec: u32) -> Af {
    let p = Af::from_bigint(&BigInt::from(q).pow(e.unsigned_abs() as u32), prec);
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

/// Render e^{ln_value} compactly, falling back to the exp form when the
/// magnitude overflows f64.
fn display_exp(ln_value: f64) -> String {
    if ln_value < 700.0 {
        format!("{:.6e}", ln_value.exp())
    } else {
        format!("exp({ln_value:.3})")
    }
}

fn conda_precondition(report: &ConditionReport) -> Precondition {
    let actual = match report.first_violation {
        None => "holds".to_string(),
        Some(k) => format!("violated at k = {k}"),
    };
    Precondition::new(
        &format!("k*|a_k| <= 1 for k <= {}", report.checked_up_to),
        "holds".to_string(),
        actual,
        report.holds,
    )
}

/// The cutoff N/(36 ln N) below which both the Theorem 2 truncation depth
/// and the A_l bound are proved.
pub fn rigorous_l_limit(n: usize) -> f64 {
    if n >= 2 {
        (n as f64) / (36.0 * (n as f64).ln())
    } else {
        0.0
    }
}

/// Theorem 2 truncation with the default conda spot-check depth.
pub fn thm2_expand(profile: &DProfile, n: usize, q: u64, h: usize) -> Result<ExpansionReport> {
    thm2_expand_with(profile, n, q, h, DEFAULT_CONDA_DEPTH)
}

/// Main value Σ_{l<h} A_l(N)·q^{N−l} plus the explicit remainder bound
/// 3.1·d_1·p(h)·q^{N−h}/N^{1−d_1}.
///
/// The main value is computed in the profile's lane (exact rationals for
/// exact profiles); the bound involves N^{1−d_1} and is always a float.
/// Preconditions recorded: N ≥ 190, 1 ≤ h ≤ N/(36 ln N), the q-threshold in
/// both its statement form (17h)^{12h+9} (this one gates `rigorous`) and its
/// proof form (6eh)^{12h+9}, and the conda recursion bound up to
/// `conda_depth`. Unsatisfied preconditions flag the report non-rigorous but
/// never block evaluation.
pub fn thm2_expand_with(
    profile: &DProfile,
    n: usize,
    q: u64,
    h: usize,
    conda_depth: usize,
) -> Result<ExpansionReport> {
    assert!(n >= 1, "thm2_expand needs N >= 1");
    assert!(h >= 1, "thm2_expand needs h >= 1");
    assert!(q >= 2, "q must be a prime power >= 2");
    let d1 = gate_d1(profile)?;
    let mode = profile.mode();
    let prec = profile_precision(profile);

    // Main term: Σ_{l<h} A_l(N) q^{N−l}. Terms with l > N vanish (every
    // partition leaves k_1 < 0) and would need a negative q-power, so skip.
    let hs = h_from_d(profile, h);
    let mut memo = BinomMemo::new();
    let qq = BigInt::from(q);
    let mut main = Coeff::zero(mode);
    for l in 0..h.min(n + 1) {
        let al = a_l_with(&hs, &mut memo, mode, l, n);
        if al.is_zero() {
            continue;
        }
        let qpow = Coeff::from_bigint(&qq.pow((n - l) as u32), mode);
        main = main.add(&al.mul(&qpow));
    }

    // Error bound, float lane: 3.1 · d_1 · p(h) · q^{N−h} / N^{1−d_1}.
    let d1f = d1.to_af(prec);
    let one_af = Af::one(prec);
    let n_af = Af::from_i64(n as i64, prec);
    let c31 = Af::from_rational(&crate::rational::rat(31, 10), prec);
    let ph = Af::from_bigint(&partition_count(h as u64), prec);
    let qnh = q_pow_af(q, n as i64 - h as i64, prec);
    let n_pow = n_af.pow(&one_af.sub(&d1f));
    let bound = c31.mul(&d1f).mul(&ph).mul(&qnh).div(&n_pow);

    // Preconditions of the theorem.
    let mut preconditions = Vec::new();
    preconditions.push(Precondition::new(
        "N >= 190",
        "190".to_string(),
        n.to_string(),
        n >= 190,
    ));
    let l_limit = rigorous_l_limit(n);
    preconditions.push(Precondition::new(
        "h <= N/(36 ln N)",
        format!("{l_limit:.4}"),
        h.to_string(),
        (h as f64) <= l_limit,
    ));
    let exponent = 12 * (h as u32) + 9;
    let q_threshold = BigInt::from(17u64 * h as u64).pow(exponent);
    preconditions.push(Precondition::new(
        "q >= (17h)^(12h+9)",
        q_threshold.to_string(),
        q.to_string(),
        BigInt::from(q) >= q_threshold,
    ));
    // The proof actually needs only (6eh)^{12h+9}; record it alongside the
    // statement's rounder 17h form (6e < 17, so it is never the binding one).
    let ln_proof = (12.0 * h as f64 + 9.0) * (6.0 * std::f64::consts::E * h as f64).ln();
    preconditions.push(Precondition::new(
        "q >= (6eh)^(12h+9) [proof form]",
        display_exp(ln_proof),
        q.to_string(),
        (q as f64).ln() >= ln_proof,
    ));
    let conda = check_conda(profile, conda_depth);
    preconditions.push(conda_precondition(&conda));

    let rigorous = preconditions.iter().all(|p| p.satisfied);
    Ok(ExpansionReport {
        mode: ExpansionMode::Thm2,
        n,
        q,
        truncation: h,
        main_value: main,
        error_bound: Coeff::Approx(bound),
        error_bound_rigorous: true,
        preconditions,
        rigorous,
        taylor_order: None,
        taylor_tail_estimate: None,
    })
}

/// Verify |A_l(N)| ≤ 3·d_1·p(l)/N^{1−d_1} for l = 0..=l_max.
///
/// A_l(N) is computed exactly (in the profile's lane) and the bound in
/// high-precision floats; `margin = bound − |A_l|`. Rows with l beyond
/// N/(36 ln N) probe outside the proved range and set `exploratory`.
pub fn check_al_bound(profile: &DProfile, n: usize, l_max: usize) -> Result<AlBoundReport> {
    assert!(n >= 2, "check_al_bound needs N >= 2");
    let d1 = gate_d1(profile)?;
    let mode = profile.mode();
    let prec = profile_precision(profile);

    let hs = h_from_d(profile, l_max + 1);
    let mut memo = BinomMemo::new();
    let d1f = d1.to_af(prec);
    let one_af = Af::one(prec);
    let n_af = Af::from_i64(n as i64, prec);
    let n_pow = n_af.pow(&one_af.sub(&d1f));
    let three_d1 = Af::from_i64(3, prec).mul(&d1f);

    let mut entries = Vec::with_capacity(l_max + 1);
    let mut all_satisfied = true;
    for l in 0..=l_max {
        let al = a_l_with(&hs, &mut memo, mode, l, n);
        let al_abs = al.to_af(prec).abs();
        let bound = three_d1
            .mul(&Af::from_bigint(&partition_count(l as u64), prec))
            .div(&n_pow);
        let margin = bound.sub(&al_abs);
        let satisfied = !margin.is_negative();
        all_satisfied &= satisfied;
        entries.push(AlBoundEntry {
            l,
            al_abs: Coeff::Approx(al_abs),
            bound: Coeff::Approx(bound),
            margin: Coeff::Approx(margin),
            satisfied,
        });
    }
    let rigorous_l_limit = rigorous_l_limit(n);
    Ok(AlBoundReport {
        n,
        l_max,
        rigorous_l_limit,
        exploratory: (l_max as f64) > rigorous_l_limit,
        entries,
        all_satisfied,
    })
}

/// Check the recursion bound k·|a_k| ≤ 1 for k = 1..=big_k, where a_k are
/// the Taylor coefficients of ln f.
pub fn check_conda(profile: &DProfile, big_k: usize) -> ConditionReport {
    assert!(big_k >= 1);
    let a = a_from_d(profile, big_k);
    let one = Coeff::one(profile.mode());
    let mut first_violation = None;
    for (i, ak) in a.iter().enumerate() {
        let k = i + 1;
        let v = ak.abs().mul_int(k as i64);
        if !v.le(&one) {
            first_violation = Some(k);
            break;
        }
    }
    ConditionReport {
        condition: ConditionKind::CondARecursionBound,
        checked_up_to: big_k,
        first_violation,
        holds: first_violation.is_none(),
    }
}

/// Check Proposition A's hypotheses: d_1 ∈ (0,1), and for every k < K both
/// d_{k+1} ≤ d_k (monotone) and k·d_k ≤ (k+1)·d_{k+1} (log-growth). A pair
/// failure at (k, k+1) is reported at index k.
pub fn check_prop_a(profile: &DProfile, big_k: usize) -> ConditionReport {
    assert!(big_k >= 1);
    let mode = profile.mode();
    let zero = Coeff::zero(mode);
    let one = Coeff::one(mode);
    let d: Vec<Coeff> = (1..=big_k).map(|k| profile.d(k as u64)).collect();
    let mut first_violation = None;
    if !(zero.lt(&d[0]) && d[0].lt(&one)) {
        first_violation = Some(1);
    } else {
        for k in 1..big_k {
            let dk = &d[k - 1];
            let dk1 = &d[k];
            let monotone = dk1.le(dk);
            let growth = dk.mul_int(k as i64).le(&dk1.mul_int(k as i64 + 1));
            if !(monotone && growth) {
                first_violation = Some(k);
                break;
            }
        }
    }
    ConditionReport {
        condition: ConditionKind::CondA,
        checked_up_to: big_k,
        first_violation,
        holds: first_violation.is_none(),
    }
}

/// Check Proposition B's hypotheses: d_1 ∈ (0,1) and, for every n < K,
/// Σ_{k≤n} |d_k| + (n+1)·|d_{n+1}| ≤ 1.
pub fn check_prop_b(profile: &DProfile, big_k: usize) -> ConditionReport {
    assert!(big_k >= 1);
    let mode = profile.mode();
    let zero = Coeff::zero(mode);
    let one = Coeff::one(mode);
    let d: Vec<Coeff> = (1..=big_k).map(|k| profile.d(k as u64)).collect();
    let mut first_violation = None;
    if !(zero.lt(&d[0]) && d[0].lt(&one)) {
        first_violation = Some(1);
    } else {
        let mut partial = Coeff::zero(mode);
        for nn in 1..big_k {
            partial = partial.add(&d[nn - 1].abs());
            let lhs = partial.add(&d[nn].abs().mul_int(nn as i64 + 1));
            if !lhs.le(&one) {
                first_violation = Some(nn);
                break;
            }
        }
    }
    ConditionReport {
        condition: ConditionKind::CondB,
        checked_up_to: big_k,
        first_violation,
        holds: first_violation.is_none(),
    }
}

/// The auxiliary series a(x) = exp(Σ_{k≥2} A_k q^k x^k), with A_k the n = 1
/// correction coefficients, truncated at `order`. Exact profiles yield exact
/// rational coefficients.
pub fn a_series(profile: &DProfile, q: u64, order: usize) -> Series {
    let mode = profile.mode();
    let caps = cap_a_range(profile, 1, q, order);
    let qq = BigInt::from(q);
    let mut coeffs = vec![Coeff::zero(mode); order + 1];
    let mut qpow = &qq * &qq;
    for (i, cap) in caps.iter().enumerate() {
        let k = i + 2;
        coeffs[k] = cap.mul_bigint(&qpow);
        if k < order {
            qpow *= &qq;
        }
    }
    Series::new(coeffs)
        .exp()
        .expect("constant term is zero by construction")
}

/// Independent route to the same series: the truncated Euler-style product
/// a(x) = ∏_{l≤order} { f(x^l) · (1 − x^l)^{d_1} }^{π_q(l)}, computed as the
/// exponential of the summed logarithms. Agrees with [`a_series`]
/// identically on every coefficient up to `order`; kept as a cross-check.
pub fn a_series_product(profile: &DProfile, q: u64, order: usize) -> Series {
    let mode = profile.mode();
    let d1 = profile.d1();
    let logf = profile
        .f_series(order)
        .log()
        .expect("f has unit constant term");
    let mut total = Series::zero(order, mode);
    for l in 1..=order {
        // log factor_l = (log f)(x^l) + d_1 · log(1 − x^l), the latter being
        // −Σ_j x^{lj}/j.
        let sub = logf.substitute_power(l, order, None);
        let mut lg = vec![Coeff::zero(mode); order + 1];
        let mut j = 1usize;
        while l * j <= order {
            lg[l * j] = Coeff::from_int(-1, mode).div_int(j as i64);
            j += 1;
        }
        let factor_log = sub.add(&Series::new(lg).scale(&d1));
        total = total.add(&factor_log.scale_bigint(&pi_q(l as u64, q)));
    }
    total.exp().expect("constant term is zero by construction")
}

/// Geometric tail estimate for a truncated Taylor evaluation at |x|: fit a
/// ratio to the last observed nonzero terms |c_k|·|x|^k and sum the implied
/// geometric series. Purely observational — reported, never used as a bound.
fn taylor_tail_estimate(series: &Series, x: &Af) -> Af {
    let prec = x.precision_bits();
    let xabs = x.abs();
    let mut terms: Vec<(usize, Af)> = Vec::new();
    let mut xp = Af::one(prec);
    for k in 0..=series.order() {
        if k > 0 {
            xp = xp.mul(&xabs);
        }
        let c = series.coeff(k);
        if !c.is_zero() {
            terms.push((k, c.to_af(prec).abs().mul(&xp)));
        }
    }
    if terms.len() < 2 {
        return Af::zero(prec);
    }
    let i = terms.len().saturating_sub(9);
    let (k1, v1) = terms[i].clone();
    let (k2, v2) = terms[terms.len() - 1].clone();
    if v1.is_zero() || v2.is_zero() {
        return v2;
    }
    let ln_r = v2
        .ln()
        .sub(&v1.ln())
        .div(&Af::from_i64((k2 - k1) as i64, prec));
    let r = ln_r.exp();
    if r.to_f64() < 1.0 {
        let one = Af::one(prec);
        v2.mul(&r).div(&one.sub(&r))
    } else {
        // Terms are not visibly decaying at this order; report the last term
        // itself so the caller sees the truncation is unresolved.
        v2
    }
}

/// Gorodetsky-style refined expansion with default options.
pub fn gorodetsky_expand(
    profile: &DProfile,
    n: usize,
    q: u64,
    corrections: usize,
) -> Result<ExpansionReport> {
    gorodetsky_expand_with(profile, n, q, corrections, &GorodetskyOpts::default())
}

/// Evaluate the refined expansion
///
/// T(N) ≈ (−1)^N·binom(−d_1, N)·q^N·[ a(q^{−1})
///        + Σ_{k=1}^{n} binom(k−d_1, k)/binom(N+d_1−1, k) · q^{−k}/k! · a^{(k)}(q^{−1}) ]
///
/// where `corrections` is the paper's n. The a(x) series is built in the
/// profile's lane, promoted to floats, and differentiated term by term; the
/// report records the Taylor order used and a geometric estimate of the
/// dropped tail. The error bound is the proved shape
/// q^N/N^{1−d_1}·(1/(√q·N))^{n+1} with an implied constant of 1, flagged
/// non-rigorous. Preconditions: N ≥ n+1 and the conda spot-check.
pub fn gorodetsky_expand_with(
    profile: &DProfile,
    n: usize,
    q: u64,
    corrections: usize,
    opts: &GorodetskyOpts,
) -> Result<ExpansionReport> {
    assert!(n >= 1, "gorodetsky_expand needs N >= 1");
    assert!(q >= 2, "q must be a prime power >= 2");
    let d1 = gate_d1(profile)?;
    let prec = profile_precision(profile);
    let taylor_order = opts.taylor_order.unwrap_or((2 * corrections + 8).max(32));
    assert!(
        taylor_order > corrections,
        "taylor_order must exceed the correction order"
    );

    let a = a_series(profile, q, taylor_order).to_approx(prec);
    let x = Af::from_i64(q as i64, prec).recip();
    let xq = Coeff::Approx(x.clone());
    let tail = taylor_tail_estimate(&a, &x);

    // Bracket: a(q^{−1}) + Σ_{k=1}^{n} binom(k−d_1,k)/binom(N+d_1−1,k) · q^{−k}/k! · a^{(k)}(q^{−1}).
    let d1f = d1.to_af(prec);
    let one_af = Af::one(prec);
    let n_af = Af::from_i64(n as i64, prec);
    let mut bracket = a.eval_at(&xq);
    let mut deriv = a;
    let mut k_factorial = BigInt::one();
    let mut xpow = Coeff::Approx(Af::one(prec));
    for k in 1..=corrections {
        deriv = deriv.derivative();
        k_factorial *= k;
        xpow = xpow.mul(&xq);
        let top = binom_gen(
            &Coeff::Approx(Af::from_i64(k as i64, prec).sub(&d1f)),
            k as u64,
        );
        let bot = binom_gen(
            &Coeff::Approx(n_af.add(&d1f).sub(&one_af)),
            k as u64,
        );
        let weight = top
            .div(&bot)
            .mul(&xpow)
            .div(&Coeff::Approx(Af::from_bigint(&k_factorial, prec)));
        bracket = bracket.add(&weight.mul(&deriv.eval_at(&xq)));
    }

    // Leading factor (−1)^N binom(−d_1, N) q^N, positive for d_1 ∈ (0,1).
    let mut lead = binom_gen(&Coeff::Approx(d1f.neg()), n as u64);
    if n % 2 == 1 {
        lead = lead.neg();
    }
    let qn = Coeff::Approx(q_pow_af(q, n as i64, prec));
    let main = lead.mul(&qn).mul(&bracket);

    // Error shape: q^N / N^{1−d_1} · (1/(√q·N))^{n+1}, implied constant 1.
    let decay = Af::from_i64(q as i64, prec)
        .sqrt()
        .mul(&n_af)
        .recip()
        .powi(corrections + 1);
    let shape = q_pow_af(q, n as i64, prec)
        .div(&n_af.pow(&one_af.sub(&d1f)))
        .mul(&decay);

    let mut preconditions = Vec::new();
    preconditions.push(Precondition::new(
        "N >= n+1",
        (corrections + 1).to_string(),
        n.to_string(),
        n >= corrections + 1,
    ));
    preconditions.push(Precondition::new(
        "0 < d_1 < 1",
        "(0, 1)".to_string(),
        format!("{d1}"),
        true,
    ));
    let conda = check_conda(profile, opts.conda_depth);
    preconditions.push(conda_precondition(&conda));

    let rigorous = preconditions.iter().all(|p| p.satisfied);
    Ok(ExpansionReport {
        mode: ExpansionMode::Gorodetsky,
        n,
        q,
        truncation: corrections,
        main_value: main,
        error_bound: Coeff::Approx(shape),
        error_bound_rigorous: false,
        preconditions,
        rigorous,
        taylor_order: Some(taylor_order),
        taylor_tail_estimate: Some(Coeff::Approx(tail)),
    })
}

/// Compute C_0 or C_1 as a truncated product over irreducible degrees
/// l ≤ l_max.
///
/// Each factor is 1 + O(q^{−2l}) but is raised to the power π_q(l) ≈ q^l/l,
/// so terms of the log-sum decay like q^{−l}/l: internal precision is
/// boosted past the cancellation in ln(1 + q^{−2l}) and the leftover tail is
/// estimated geometrically from the last two terms.
pub fn constant_c(kind: ConstantKind, q: u64, l_max: usize, precision_bits: u32) -> ConstantReport {
    assert!(q >= 2, "q must be a prime power >= 2");
    assert!(l_max >= 2, "need at least two factors to estimate the tail");
    let boost = (2.0 * l_max as f64 * (q as f64).log2()).ceil() as u32 + 32;
    let prec = precision_bits + boost.min(4096);
    let one = Af::one(prec);
    let two = Af::from_i64(2, prec);
    let qq = BigInt::from(q);

    let mut ln_total = Af::zero(prec);
    let mut qpow = BigInt::one();
    let mut prev_term = Af::zero(prec);
    let mut last_term = Af::zero(prec);
    for l in 1..=l_max {
        qpow *= &qq;
        let x = Af::from_bigint(&qpow, prec);
        let x2x = x.mul(&x).sub(&x); // q^{2l} − q^l
        let factor = match kind {
            ConstantKind::C0 => {
                let num = two.mul(&x).sub(&one);
                num.div(&two.mul(&x2x.sqrt()))
            }
            ConstantKind::C1 => x2x.sqrt().mul(&x.div(&x.sub(&one)).ln()),
        };
        let term = Af::from_bigint(&pi_q(l as u64, q), prec).mul(&factor.ln());
        ln_total = ln_total.add(&term);
        prev_term = last_term;
        last_term = term.abs();
    }
    let value = ln_total.exp();

    // Tail of the log-sum, extended geometrically from the last ratio, then
    // pushed through exp: |value|·(e^tail − 1) ≈ |value|·tail.
    let tail_log = if !prev_term.is_zero() && last_term.to_f64() < prev_term.to_f64() {
        let r = last_term.div(&prev_term);
        last_term.mul(&r).div(&one.sub(&r))
    } else {
        last_term
    };
    let tail = value.abs().mul(&tail_log);
    ConstantReport {
        kind,
        q,
        l_max,
        value: Coeff::Approx(value),
        tail_estimate: Coeff::Approx(tail),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{a_l_of_n, t_exact_euler};
    use crate::rational::{big, binom_int, rat, rat_int};
    use crate::Rational;
    use num_traits::ToPrimitive;

    #[test]
    fn thm2_truncation_past_n_recovers_the_exact_value() {
        // h > N includes every nonzero A_l, so the "truncation" is exact.
        let p = DProfile::inv_tau();
        for n in 1..=5usize {
            let report = thm2_expand(&p, n, 3, n + 2).unwrap();
            assert_eq!(report.main_value, t_exact_euler(&p, n, 3), "N = {n}");
        }
    }

    #[test]
    fn thm2_inv_2_omega_at_the_gate() {
        let p = DProfile::inv_2_omega();
        let report = thm2_expand(&p, 190, 2, 1).unwrap();
        assert_eq!(report.mode, ExpansionMode::Thm2);
        assert!(report.error_bound_rigorous);

        // Main term is exactly A_0(190)·2^190.
        let expected = a_l_of_n(&p, 0, 190).mul(&Coeff::from_bigint(
            &big(2).pow(190),
            CoeffMode::Exact,
        ));
        assert_eq!(
            report.main_value.expect_exact("main"),
            expected.expect_exact("expected")
        );

        // Error bound = 3.1·(1/2)·p(1)·2^189/190^{1/2}.
        let ratio = report.error_bound.to_f64() / 2f64.powi(189);
        let expected_ratio = 3.1 * 0.5 / 190f64.sqrt();
        assert!((ratio - expected_ratio).abs() < 1e-12);

        // N and h gates pass at (190, 1); the q-threshold 17^21 does not.
        let by_name = |needle: &str| {
            report
                .preconditions
                .iter()
                .find(|p| p.name.contains(needle))
                .unwrap()
        };
        assert!(by_name("N >= 190").satisfied);
        assert!(by_name("36 ln N").satisfied);
        let qgate = by_name("(17h)");
        assert_eq!(qgate.required, big(17).pow(21).to_string());
        assert!(!qgate.satisfied);
        assert!(by_name("(6eh)").name.contains("proof form"));
        assert!(by_name("k*|a_k|").satisfied);
        assert!(!report.rigorous);
    }

    #[test]
    fn thm2_rejects_d1_out_of_range() {
        let err = thm2_expand(&DProfile::tau(), 200, 2, 1).unwrap_err();
        assert!(matches!(err, Error::D1OutOfRange(_)));
        let err = check_al_bound(&DProfile::one(), 200, 1).unwrap_err();
        assert!(matches!(err, Error::D1OutOfRange(_)));
    }

    #[test]
    fn a0_is_central_binomial_for_inv_2_omega() {
        // A_0(N) = binom(d_1+N−1, N) at d_1 = 1/2 equals binom(2N, N)/4^N.
        let p = DProfile::inv_2_omega();
        for n in 1..=50usize {
            let a0 = a_l_of_n(&p, 0, n);
            let expected = Rational::new(binom_int(2 * n as u64, n as u64), big(4).pow(n as u32));
            assert_eq!(a0.expect_exact("A_0"), &expected, "N = {n}");
        }
    }

    #[test]
    fn al_bound_holds_in_rigorous_range() {
        for p in [DProfile::inv_tau(), DProfile::inv_2_omega()] {
            let report = check_al_bound(&p, 1000, 4).unwrap();
            assert!(report.all_satisfied, "{}", p.name());
            assert!(!report.exploratory); // 1000/(36 ln 1000) ≈ 4.02
            assert_eq!(report.entries.len(), 5);

            let report = check_al_bound(&p, 190, 1).unwrap();
            assert!(report.all_satisfied);
        }
    }

    #[test]
    fn conda_examples() {
        let r = check_conda(&DProfile::inv_tau(), 200);
        assert!(r.holds && r.first_violation.is_none());
        assert_eq!(r.condition, ConditionKind::CondARecursionBound);
        assert_eq!(r.checked_up_to, 200);

        let r = check_conda(&DProfile::tau(), 10);
        assert_eq!(r.first_violation, Some(1));
        assert!(!r.holds);

        // a_2 = d_2 − d_1²/2 = 10 − 1/8, so 2|a_2| > 1.
        let r = check_conda(&DProfile::explicit(vec![rat(1, 2), rat_int(10)]), 10);
        assert_eq!(r.first_violation, Some(2));
    }

    #[test]
    fn prop_a_examples() {
        for p in [
            DProfile::inv_tau(),
            DProfile::inv_tau_alpha(&rat_int(1), 128),
            DProfile::c_omega(&rat(1, 2)),
            DProfile::ratio_tau(2),
            DProfile::inv_tau_fr(2),
        ] {
            let r = check_prop_a(&p, 100);
            assert!(r.holds, "propA should hold for {}", p.name());
            assert_eq!(r.condition, ConditionKind::CondA);
        }
        let r = check_prop_a(&DProfile::tau(), 100);
        assert_eq!(r.first_violation, Some(1));
    }

    #[test]
    fn prop_b_examples() {
        for p in [
            DProfile::inv_tau_alpha(&rat_int(2), 128),
            DProfile::inv_tau_m(3),
            DProfile::g7(&[(2, rat_int(1)), (2, rat_int(1))], 128),
            DProfile::inv_tau_m_fr(3, 2),
        ] {
            let r = check_prop_b(&p, 100);
            assert!(r.holds, "propB should hold for {}", p.name());
            assert_eq!(r.condition, ConditionKind::CondB);
        }
        // 1/τ: n = 1 gives |d_1| + 2|d_2| = 1/2 + 2/3 > 1.
        let r = check_prop_b(&DProfile::inv_tau(), 100);
        assert_eq!(r.first_violation, Some(1));
        let r = check_prop_b(&DProfile::tau(), 100);
        assert_eq!(r.first_violation, Some(1));
    }

    #[test]
    fn conditions_imply_conda() {
        let prop_a_presets = [
            DProfile::inv_tau(),
            DProfile::c_omega(&rat(1, 2)),
            DProfile::ratio_tau(2),
            DProfile::inv_tau_fr(2),
        ];
        let prop_b_presets = [
            DProfile::inv_tau_alpha(&rat_int(2), 128),
            DProfile::inv_tau_m(3),
            DProfile::g7(&[(2, rat_int(1)), (2, rat_int(1))], 128),
            DProfile::inv_tau_m_fr(3, 2),
        ];
        for p in prop_a_presets.iter().chain(prop_b_presets.iter()) {
            assert!(check_conda(p, 60).holds, "conda should hold for {}", p.name());
        }
    }

    #[test]
    fn a_series_paths_agree_exactly_in_exact_lane() {
        for (p, q) in [
            (DProfile::inv_tau(), 2u64),
            (DProfile::inv_2_omega(), 3u64),
        ] {
            let via_caps = a_series(&p, q, 12);
            let via_product = a_series_product(&p, q, 12);
            for k in 0..=12 {
                assert_eq!(
                    via_caps.coeff(k).expect_exact("caps"),
                    via_product.coeff(k).expect_exact("product"),
                    "{} q={q} k={k}",
                    p.name()
                );
            }
        }
    }

    #[test]
    fn a_series_paths_agree_in_float_lane() {
        let prec = 128u32;
        let p = DProfile::inv_tau_alpha(&rat(1, 2), prec);
        let via_caps = a_series(&p, 2, 10);
        let via_product = a_series_product(&p, 2, 10);
        let tol = Af::pow2(-(prec as i64) + 16, prec);
        for k in 0..=10 {
            let diff = via_caps.coeff(k).sub(via_product.coeff(k)).abs();
            assert!(
                diff.to_af(prec).to_f64() <= tol.to_f64(),
                "k={k}: diff {}",
                diff
            );
        }
    }

    #[test]
    fn a_series_structure_and_large_q_limit() {
        let p = DProfile::inv_2_omega();
        let a = a_series(&p, 101, 40);
        assert_eq!(a.coeff(0).expect_exact("a_0"), &rat_int(1));
        assert!(a.coeff(1).is_zero());
        // |a(1/101) − 1| < 5/101.
        let val = a.eval_at(&Coeff::from_rational(&rat(1, 101), CoeffMode::Exact));
        let dev = val.sub(&Coeff::one(CoeffMode::Exact)).abs();
        assert!(dev.expect_exact("dev") < &rat(5, 101));
    }

    #[test]
    fn constants_match_a_series_limits() {
        // C_1(q) = a_{1/τ}(q^{−1}) and C_0(q) = a_{1/2^ω}(q^{−1}): same
        // quantity through the closed product and the generic series.
        let c1 = constant_c(ConstantKind::C1, 2, 60, 128);
        let a = a_series(&DProfile::inv_tau(), 2, 120).to_approx(128);
        let half = Coeff::Approx(Af::from_rational(&rat(1, 2), 128));
        let dev = (c1.value.to_f64() - a.eval_at(&half).to_f64()).abs();
        assert!(dev < 1e-12, "C_1 vs a(1/2): dev {dev:.3e}");
        assert!(c1.tail_estimate.to_f64() < 1e-15);

        let c0 = constant_c(ConstantKind::C0, 2, 60, 128);
        let a = a_series(&DProfile::inv_2_omega(), 2, 120).to_approx(128);
        let dev = (c0.value.to_f64() - a.eval_at(&half).to_f64()).abs();
        assert!(dev < 1e-12, "C_0 vs a(1/2): dev {dev:.3e}");

        // Stabilization in l_max.
        let c0_50 = constant_c(ConstantKind::C0, 2, 50, 128);
        assert!((c0.value.to_f64() - c0_50.value.to_f64()).abs() < 1e-12);
    }

    #[test]
    fn gorodetsky_corrections_shrink_the_deviation() {
        let p = DProfile::inv_2_omega();
        let (n, q) = (60usize, 3u64);
        let exact = t_exact_euler(&p, n, q).to_f64();
        let opts = GorodetskyOpts {
            taylor_order: Some(64),
            ..GorodetskyOpts::default()
        };
        let mut devs = Vec::new();
        for corrections in 0..=2usize {
            let report = gorodetsky_expand_with(&p, n, q, corrections, &opts).unwrap();
            assert_eq!(report.mode, ExpansionMode::Gorodetsky);
            assert!(!report.error_bound_rigorous);
            assert_eq!(report.taylor_order, Some(64));
            devs.push(((report.main_value.to_f64() - exact) / exact).abs());
        }
        assert!(devs[0] < 5e-2, "n=0 deviation {:.3e}", devs[0]);
        assert!(devs[1] < devs[0], "devs {devs:?}");
        assert!(devs[2] < devs[1], "devs {devs:?}");
    }

    #[test]
    fn gorodetsky_small_n_flags_precondition_but_evaluates() {
        let report = gorodetsky_expand(&DProfile::inv_2_omega(), 2, 3, 2).unwrap();
        assert!(!report.rigorous);
        let gate = report
            .preconditions
            .iter()
            .find(|p| p.name == "N >= n+1")
            .unwrap();
        assert!(!gate.satisfied);
        assert!(report.main_value.to_f64().is_finite());
        assert!(report.taylor_tail_estimate.unwrap().to_f64() >= 0.0);
    }

    #[test]
    fn gorodetsky_rejects_tau() {
        let err = gorodetsky_expand(&DProfile::tau(), 100, 2, 1).unwrap_err();
        assert!(matches!(err, Error::D1OutOfRange(_)));
    }

    #[test]
    fn conda_violation_degrades_gorodetsky_to_non_rigorous() {
        // d = (1/2, 10, 0, ...) violates conda at k = 2 but still evaluates.
        let p = DProfile::explicit(vec![rat(1, 2), rat_int(10)]);
        let report = gorodetsky_expand(&p, 40, 3, 1).unwrap();
        assert!(!report.rigorous);
        let row = report
            .preconditions
            .iter()
            .find(|r| r.name.contains("k*|a_k|"))
            .unwrap();
        assert!(!row.satisfied);
        assert!(row.actual.contains("k = 2"));
        assert!(report.main_value.to_f64().is_finite());
    }

    #[test]
    fn thm2_error_bound_scaling_in_h() {
        // p(h) and q^{N−h} both enter the bound; check the h-dependence.
        let p = DProfile::inv_tau();
        let r1 = thm2_expand(&p, 400, 5, 1).unwrap();
        let r3 = thm2_expand(&p, 400, 5, 3).unwrap();
        let expected = (partition_count(3).to_f64().unwrap()
            / partition_count(1).to_f64().unwrap())
            / 25.0;
        let observed = r3.error_bound.to_f64() / r1.error_bound.to_f64();
        assert!((observed - expected).abs() < 1e-9 * expected);

        // Residual really is below the bound here even outside the proved
        // q-regime: compare against the exact value at modest size.
        let n = 250usize;
        let exact = t_exact_euler(&p, n, 5);
        let report = thm2_expand(&p, n, 5, 2).unwrap();
        let resid = exact
            .sub(&report.main_value)
            .abs()
            .expect_exact("residual")
            .clone();
        let bound = report.error_bound.to_f64();
        let resid_over_q_nh = &resid / &Rational::from_integer(big(5).pow((n - 2) as u32));
        let bound_over_q_nh = bound / 5f64.powi((n - 2) as i32);
        assert!(
            resid_over_q_nh.to_f64().unwrap() < bound_over_q_nh,
            "residual/q^(N-h) = {} vs bound/q^(N-h) = {}",
            resid_over_q_nh.to_f64().unwrap(),
            bound_over_q_nh
        );
    }
}
