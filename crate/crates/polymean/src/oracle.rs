//! Brute-force ground truth over F_p[T]: enumerate every monic polynomial of
//! degree N, factor it into monic irreducibles, evaluate g from its
//! prime-power profile, and sum exactly.
//!
//! Monic degree-n polynomials are indexed 0..p^n by their n non-leading
//! coefficients as base-p digits, c_0 least significant; enumeration order is
//! ascending index.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_traits::Pow;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::profile::DProfile;

pub const DEFAULT_WORK_BUDGET: u64 = 100_000_000;

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NonPrimeModulus(p))
    }
}

/// Dense polynomial over F_p; index = degree. Trimmed: the leading stored
/// coefficient is nonzero (the constant 0 polynomial never arises here).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn from_coeffs(p: u64, mut coeffs: Vec<u64>) -> FpPoly {
        assert!(coeffs.iter().all(|&c| c < p), "residues must lie in [0, p)");
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0 {
            coeffs.pop();
        }
        assert!(!coeffs.is_empty(), "empty coefficient vector");
        FpPoly { p, coeffs }
    }

    pub fn one(p: u64) -> FpPoly {
        FpPoly { p, coeffs: vec![1] }
    }

    /// Monic polynomial of degree n whose n non-leading coefficients are the
    /// base-p digits of idx (c_0 least significant).
    pub fn monic_from_index(p: u64, n: usize, idx: u64) -> FpPoly {
        let mut coeffs = vec![0u64; n + 1];
        let mut rest = idx;
        for c in coeffs.iter_mut().take(n) {
            *c = rest % p;
            rest /= p;
        }
        debug_assert_eq!(rest, 0, "index out of range for degree {n}");
        coeffs[n] = 1;
        FpPoly { p, coeffs }
    }

    /// Inverse of `monic_from_index` for monic polynomials.
    pub fn index(&self) -> u64 {
        let n = self.degree();
        let mut idx = 0u64;
        for i in (0..n).rev() {
            idx = idx * self.p + self.coeffs[i];
        }
        idx
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_monic(&self) -> bool {
        *self.coeffs.last().unwrap() == 1
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn mul(&self, rhs: &FpPoly) -> FpPoly {
        assert_eq!(self.p, rhs.p);
        let p = self.p;
        let mut out = vec![0u64; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % p;
            }
        }
        FpPoly::from_coeffs(p, out)
    }

    /// Exact division by a monic divisor: Some(quotient) iff remainder is 0.
    pub fn div_exact(&self, divisor: &FpPoly) -> Option<FpPoly> {
        assert_eq!(self.p, divisor.p);
        assert!(divisor.is_monic(), "division only by monic divisors");
        let dd = divisor.degree();
        if dd > self.degree() {
            return None;
        }
        let p = self.p;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; self.degree() - dd + 1];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            quot[i - dd] = c;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                let k = i - dd + j;
                rem[k] = (rem[k] + (p - dc % p) * c) % p;
            }
        }
        if rem.iter().take(dd).any(|&r| r != 0) {
            return None;
        }
        Some(FpPoly::from_coeffs(p, quot))
    }
}

impl std::fmt::Display for FpPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 && self.degree() > 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "T")?,
                (1, c) => write!(f, "{c}*T")?,
                (i, 1) => write!(f, "T^{i}")?,
                (i, c) => write!(f, "{c}*T^{i}")?,
            }
        }
        Ok(())
    }
}

/// All p^n monic polynomials of degree n, ascending index order.
pub fn enumerate_monic(p: u64, n: usize) -> Result<impl Iterator<Item = FpPoly>> {
    check_prime(p)?;
    let count = Pow::pow(&BigInt::from(p), n);
    let count = u64::try_from(&count).expect("enumeration size fits u64");
    Ok((0..count).map(move |idx| FpPoly::monic_from_index(p, n, idx)))
}

/// Monic irreducibles over F_p, by degree.
#[derive(Clone, Debug)]
pub struct IrreducibleTable {
    p: u64,
    max_degree: usize,
    by_degree: Vec<Vec<FpPoly>>, // [0] unused
}

impl IrreducibleTable {
    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn irreducibles(&self, degree: usize) -> &[FpPoly] {
        &self.by_degree[degree]
    }

    pub fn count(&self, degree: usize) -> usize {
        self.by_degree[degree].len()
    }
}

/// Sieve of monic irreducibles: degree by degree, mark every product of a
/// lower-degree irreducible with a monic cofactor; survivors are irreducible.
pub fn irreducible_sieve(p: u64, max_degree: usize) -> Result<IrreducibleTable> {
    check_prime(p)?;
    assert!(max_degree >= 1, "sieve needs max_degree >= 1");
    let mut by_degree: Vec<Vec<FpPoly>> = vec![Vec::new()];
    for n in 1..=max_degree {
        let size = p.pow(n as u32);
        let mut reducible = vec![false; size as usize];
        for a in 1..=n / 2 {
            let cofactor_count = p.pow((n - a) as u32);
            for irr in &by_degree[a] {
                for g_idx in 0..cofactor_count {
                    let g = FpPoly::monic_from_index(p, n - a, g_idx);
                    let product = irr.mul(&g);
                    debug_assert_eq!(product.degree(), n);
                    reducible[product.index() as usize] = true;
                }
            }
        }
        let mut irreducibles = Vec::new();
        for idx in 0..size {
            if !reducible[idx as usize] {
                irreducibles.push(FpPoly::monic_from_index(p, n, idx));
            }
        }
        by_degree.push(irreducibles);
    }
    Ok(IrreducibleTable { p, max_degree, by_degree })
}

/// F = ∏ P_i^{e_i} with distinct monic irreducibles P_i, sorted by
/// (degree, index).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<(FpPoly, u32)>,
}

impl Factorization {
    pub fn exponents(&self) -> Vec<u32> {
        let mut e: Vec<u32> = self.factors.iter().map(|(_, e)| *e).collect();
        e.sort_unstable();
        e
    }

    pub fn product(&self, p: u64) -> FpPoly {
        let mut acc = FpPoly::one(p);
        for (f, e) in &self.factors {
            for _ in 0..*e {
                acc = acc.mul(f);
            }
        }
        acc
    }
}

/// Trial division by table irreducibles of degree ≤ deg(F)/2; whatever
/// survives with positive degree is itself irreducible. The factors are
/// multiplied back together as a self-check.
pub fn factor(f: &FpPoly, table: &IrreducibleTable) -> Result<Factorization> {
    assert!(f.is_monic() && f.degree() >= 1, "factor wants a monic polynomial of degree >= 1");
    assert_eq!(f.modulus(), table.p);
    let needed = f.degree() / 2;
    if table.max_degree < needed {
        return Err(Error::TableTooShallow { max_degree: table.max_degree, needed });
    }
    let mut factors: Vec<(FpPoly, u32)> = Vec::new();
    let mut rem = f.clone();
    let mut a = 1usize;
    while 2 * a <= rem.degree() {
        for irr in &table.by_degree[a] {
            if 2 * a > rem.degree() {
                break;
            }
            let mut e = 0u32;
            while let Some(q) = rem.div_exact(irr) {
                rem = q;
                e += 1;
            }
            if e > 0 {
                factors.push((irr.clone(), e));
            }
        }
        a += 1;
    }
    if rem.degree() >= 1 {
        factors.push((rem, 1));
    }
    factors.sort_by_key(|(p, _)| (p.degree(), p.index()));
    let fz = Factorization { factors };
    assert_eq!(fz.product(f.modulus()), *f, "factor product check failed for {f}");
    Ok(fz)
}

/// g(F) = ∏ d(e_i) over the factorization's exponents (empty product = 1).
pub fn eval_g(profile: &DProfile, fz: &Factorization) -> Coeff {
    let mut acc = Coeff::one(profile.mode());
    for (_, e) in &fz.factors {
        acc = acc.mul(&profile.d(*e as u64));
    }
    acc
}

#[derive(Clone, Copy, Debug)]
pub struct BruteOpts {
    /// Maximum number of polynomial factorizations (p^N must not exceed it).
    pub budget: u64,
    /// Worker threads; 0 means use the available parallelism.
    pub workers: usize,
}

impl Default for BruteOpts {
    fn default() -> Self {
        BruteOpts { budget: DEFAULT_WORK_BUDGET, workers: 0 }
    }
}

/// Exponent-multiset histogram of all monic degree-n polynomials: how many
/// factor with each multiset of prime-power exponents. g(F) depends on the
/// factorization only through this multiset, so one enumeration serves any
/// number of profiles.
fn exponent_histogram(p: u64, n: usize, opts: &BruteOpts) -> Result<BTreeMap<Vec<u32>, u64>> {
    check_prime(p)?;
    assert!(n >= 1);
    let total_big = Pow::pow(&BigInt::from(p), n);
    if total_big > BigInt::from(opts.budget) {
        return Err(Error::BudgetExceeded {
            needed: total_big.to_string(),
            budget: opts.budget,
        });
    }
    let total = u64::try_from(&total_big).expect("within budget, fits u64");
    let table = irreducible_sieve(p, (n / 2).max(1))?;

    // Fixed coefficient-prefix blocks: the top t digits of the index. The
    // block layout depends only on (p, n), never on the worker count, and
    // block results are merged in block order, so the outcome is
    // deterministic under any scheduling.
    let mut t = 0usize;
    let mut blocks = 1u64;
    while t < n && blocks < 256 {
        t += 1;
        blocks *= p;
    }
    let block_len = total / blocks;

    let workers = if opts.workers == 0 {
        std::thread::available_parallelism().map(|c| c.get()).unwrap_or(1)
    } else {
        opts.workers
    };
    let workers = workers.min(blocks as usize).max(1);

    let next_block = AtomicU64::new(0);
    let slots: Vec<std::sync::Mutex<BTreeMap<Vec<u32>, u64>>> =
        (0..blocks).map(|_| std::sync::Mutex::new(BTreeMap::new())).collect();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let b = next_block.fetch_add(1, Ordering::Relaxed);
                if b >= blocks {
                    break;
                }
                let mut hist: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
                for idx in b * block_len..(b + 1) * block_len {
                    let poly = FpPoly::monic_from_index(p, n, idx);
                    let fz = factor(&poly, &table).expect("table is deep enough");
                    *hist.entry(fz.exponents()).or_insert(0) += 1;
                }
                *slots[b as usize].lock().unwrap() = hist;
            });
        }
    });

    let mut merged: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    for slot in slots {
        for (k, v) in slot.into_inner().unwrap() {
            *merged.entry(k).or_insert(0) += v;
        }
    }
    debug_assert_eq!(merged.values().sum::<u64>(), total);
    Ok(merged)
}

/// brute_T for several profiles from one shared enumeration.
pub fn brute_t_batch(profiles: &[&DProfile], p: u64, n: usize, opts: BruteOpts) -> Result<Vec<Coeff>> {
    let hist = exponent_histogram(p, n, &opts)?;
    let mut out = Vec::with_capacity(profiles.len());
    for profile in profiles {
        // d(e) is reused across histogram entries; cache up to the max exponent
        let d: Vec<Coeff> = (1..=n as u64).map(|e| profile.d(e)).collect();
        let mut sum = Coeff::zero(profile.mode());
        for (exponents, count) in &hist {
            let mut term = Coeff::from_bigint(&BigInt::from(*count), profile.mode());
            for &e in exponents {
                term = term.mul(&d[(e - 1) as usize]);
            }
            sum = sum.add(&term);
        }
        out.push(sum);
    }
    Ok(out)
}

/// T(N) = Σ_{deg F = N, F monic} g(F) over F_p, by exhaustive enumeration.
pub fn brute_t_with(profile: &DProfile, p: u64, n: usize, opts: BruteOpts) -> Result<Coeff> {
    Ok(brute_t_batch(&[profile], p, n, opts)?.pop().unwrap())
}

pub fn brute_t(profile: &DProfile, p: u64, n: usize) -> Result<Coeff> {
    brute_t_with(profile, p, n, BruteOpts::default())
}
