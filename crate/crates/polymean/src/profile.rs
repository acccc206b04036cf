//! d-profiles: the sequence d_k = g(P^k) that completely determines a
//! multiplicative function g, with the preset catalog.
//!
//! Presets with rational d_k run in the exact lane; presets that produce
//! irrational values (non-integer exponents) run in the float lane at the
//! precision chosen at construction. d(0) is implicitly 1 (g of a unit).

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::approx::{Af, DEFAULT_PRECISION_BITS};
use crate::coeff::{Coeff, CoeffMode};
use crate::rational::{binom_int, parse_rational, pow_rat, Rational};
use crate::series::Series;

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    /// d_k = 1 (g ≡ 1)
    One,
    /// d_k = k+1 (g = τ)
    Tau,
    /// d_k = binom(k+m−1, m−1) (g = τ_m)
    TauM { m: u64 },
    /// d_j = binom(jr+k−1, k−1) (g = τ_k(F^r))
    TauKOfFr { k: u64, r: u64 },
    /// d_k = 1/(k+1) (g = 1/τ)
    InvTau,
    /// d_k = (k+1)^{−α}; exact iff α is an integer
    InvTauAlpha { alpha: Rational },
    /// d_k = c (g = c^ω)
    COmega { c: Rational },
    /// d_k = binom(k+m−1, m−1)/binom(k+m, m)
    RatioTau { m: u64 },
    /// d_k = 1/(kr+1) (g = 1/τ(F^r))
    InvTauFr { r: u64 },
    /// d_k = 1/binom(k+m−1, m−1) (g = 1/τ_m)
    InvTauM { m: u64 },
    /// d_k = ∏_i binom(k+m_i−1, m_i−1)^{−γ_i}; exact iff every γ_i is an integer
    G7 { pairs: Vec<(u64, Rational)> },
    /// d_k = 1/binom(kr+m−1, m−1) (g = 1/τ_m(F^r))
    InvTauMFr { m: u64, r: u64 },
    /// d_k = list[k−1], zero past the end
    Explicit { ds: Vec<Rational> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DProfile {
    kind: Kind,
    mode: CoeffMode,
    name: String,
}

fn tau_m_of(k: u64, m: u64) -> BigInt {
    binom_int(k + m - 1, m - 1)
}

impl DProfile {
    fn new(kind: Kind, precision_bits: u32) -> DProfile {
        let float = match &kind {
            Kind::InvTauAlpha { alpha } => !alpha.is_integer(),
            Kind::G7 { pairs } => pairs.iter().any(|(_, g)| !g.is_integer()),
            _ => false,
        };
        let mode = if float {
            CoeffMode::Approx { precision_bits }
        } else {
            CoeffMode::Exact
        };
        let name = kind_name(&kind);
        DProfile { kind, mode, name }
    }

    pub fn one() -> DProfile {
        DProfile::new(Kind::One, DEFAULT_PRECISION_BITS)
    }

    pub fn tau() -> DProfile {
        DProfile::new(Kind::Tau, DEFAULT_PRECISION_BITS)
    }

    pub fn tau_m(m: u64) -> DProfile {
        assert!(m >= 1, "tau_m needs m >= 1");
        DProfile::new(Kind::TauM { m }, DEFAULT_PRECISION_BITS)
    }

    pub fn tau_k_of_f_r(k: u64, r: u64) -> DProfile {
        assert!(k >= 1 && r >= 1, "tau_k_of_F_r needs k, r >= 1");
        DProfile::new(Kind::TauKOfFr { k, r }, DEFAULT_PRECISION_BITS)
    }

    /// τ_3(F²), the paper's worked N=3 example.
    pub fn tau3_of_f2() -> DProfile {
        DProfile::tau_k_of_f_r(3, 2)
    }

    pub fn inv_tau() -> DProfile {
        DProfile::new(Kind::InvTau, DEFAULT_PRECISION_BITS)
    }

    pub fn inv_tau_alpha(alpha: &Rational, precision_bits: u32) -> DProfile {
        DProfile::new(Kind::InvTauAlpha { alpha: alpha.clone() }, precision_bits)
    }

    pub fn c_omega(c: &Rational) -> DProfile {
        DProfile::new(Kind::COmega { c: c.clone() }, DEFAULT_PRECISION_BITS)
    }

    /// c_omega(1/2): g = 1/2^ω.
    pub fn inv_2_omega() -> DProfile {
        DProfile::c_omega(&Rational::new(BigInt::one(), BigInt::from(2)))
    }

    pub fn ratio_tau(m: u64) -> DProfile {
        assert!(m >= 1, "ratio_tau needs m >= 1");
        DProfile::new(Kind::RatioTau { m }, DEFAULT_PRECISION_BITS)
    }

    pub fn inv_tau_fr(r: u64) -> DProfile {
        assert!(r >= 1, "inv_tau_Fr needs r >= 1");
        DProfile::new(Kind::InvTauFr { r }, DEFAULT_PRECISION_BITS)
    }

    pub fn inv_tau_m(m: u64) -> DProfile {
        assert!(m >= 1, "inv_tau_m needs m >= 1");
        DProfile::new(Kind::InvTauM { m }, DEFAULT_PRECISION_BITS)
    }

    pub fn g7(pairs: &[(u64, Rational)], precision_bits: u32) -> DProfile {
        assert!(!pairs.is_empty(), "g7 needs at least one (m, gamma) pair");
        assert!(pairs.iter().all(|(m, _)| *m >= 1), "g7 needs every m >= 1");
        assert!(pairs.iter().all(|(_, g)| g.is_positive()), "g7 needs every gamma > 0");
        DProfile::new(Kind::G7 { pairs: pairs.to_vec() }, precision_bits)
    }

    pub fn inv_tau_m_fr(m: u64, r: u64) -> DProfile {
        assert!(m >= 1 && r >= 1, "inv_tau_m_Fr needs m, r >= 1");
        DProfile::new(Kind::InvTauMFr { m, r }, DEFAULT_PRECISION_BITS)
    }

    pub fn explicit(ds: Vec<Rational>) -> DProfile {
        DProfile::new(Kind::Explicit { ds }, DEFAULT_PRECISION_BITS)
    }

    pub fn mode(&self) -> CoeffMode {
        self.mode
    }

    pub fn is_exact(&self) -> bool {
        self.mode.is_exact()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// d_k = g(P^k) for k ≥ 1 (d_0 is implicitly 1 and never asked for).
    pub fn d(&self, k: u64) -> Coeff {
        assert!(k >= 1, "d(k) is defined for k >= 1; d(0) is implicitly 1");
        match &self.kind {
            Kind::One => Coeff::from_int(1, self.mode),
            Kind::Tau => Coeff::from_int(k as i64 + 1, self.mode),
            Kind::TauM { m } => Coeff::from_bigint(&tau_m_of(k, *m), self.mode),
            Kind::TauKOfFr { k: kk, r } => {
                Coeff::from_bigint(&tau_m_of(k * r, *kk), self.mode)
            }
            Kind::InvTau => Coeff::Exact(Rational::new(BigInt::one(), BigInt::from(k + 1))),
            Kind::InvTauAlpha { alpha } => {
                let base = Rational::from_integer(BigInt::from(k + 1));
                self.power(&base, &-alpha.clone())
            }
            Kind::COmega { c } => Coeff::Exact(c.clone()),
            Kind::RatioTau { m } => Coeff::Exact(Rational::new(
                tau_m_of(k, *m),
                binom_int(k + m, *m),
            )),
            Kind::InvTauFr { r } => {
                Coeff::Exact(Rational::new(BigInt::one(), BigInt::from(k * r + 1)))
            }
            Kind::InvTauM { m } => Coeff::Exact(Rational::new(BigInt::one(), tau_m_of(k, *m))),
            Kind::G7 { pairs } => {
                if self.mode.is_exact() {
                    let mut den = BigInt::one();
                    for (m, gamma) in pairs {
                        let g = gamma.to_integer().to_i64().expect("gamma fits i64");
                        den *= pow_rat(&Rational::from_integer(tau_m_of(k, *m)), g)
                            .to_integer();
                    }
                    Coeff::Exact(Rational::new(BigInt::one(), den))
                } else {
                    let mut acc = Coeff::one(self.mode);
                    for (m, gamma) in pairs {
                        let base = Rational::from_integer(tau_m_of(k, *m));
                        acc = acc.mul(&self.power(&base, &-gamma.clone()));
                    }
                    acc
                }
            }
            Kind::InvTauMFr { m, r } => {
                Coeff::Exact(Rational::new(BigInt::one(), tau_m_of(k * r, *m)))
            }
            Kind::Explicit { ds } => Coeff::Exact(
                ds.get((k - 1) as usize).cloned().unwrap_or_else(Rational::zero),
            ),
        }
    }

    /// base^e in the profile's lane (e rational; float lane handles
    /// non-integer exponents, exact lane requires integer e).
    fn power(&self, base: &Rational, e: &Rational) -> Coeff {
        match self.mode {
            CoeffMode::Exact => {
                assert!(e.is_integer(), "exact lane cannot take irrational powers");
                let ei = e.to_integer().to_i64().expect("exponent fits i64");
                Coeff::Exact(pow_rat(base, ei))
            }
            CoeffMode::Approx { precision_bits } => {
                let b = Af::from_rational(base, precision_bits);
                let ee = Af::from_rational(e, precision_bits);
                Coeff::Approx(b.pow(&ee))
            }
        }
    }

    pub fn d1(&self) -> Coeff {
        self.d(1)
    }

    /// f(t) = 1 + Σ_{k=1}^{order} d_k t^k.
    pub fn f_series(&self, order: usize) -> Series {
        Series::from_fn(order, |k| {
            if k == 0 {
                Coeff::one(self.mode)
            } else {
                self.d(k as u64)
            }
        })
    }
}

fn kind_name(kind: &Kind) -> String {
    match kind {
        Kind::One => "one".into(),
        Kind::Tau => "tau".into(),
        Kind::TauM { m } => format!("tau_m({m})"),
        Kind::TauKOfFr { k, r } => format!("tau_k_of_F_r({k},{r})"),
        Kind::InvTau => "inv_tau".into(),
        Kind::InvTauAlpha { alpha } => format!("inv_tau_alpha({alpha})"),
        Kind::COmega { c } => {
            if *c == Rational::new(BigInt::one(), BigInt::from(2)) {
                "inv_2_omega".into()
            } else {
                format!("c_omega({c})")
            }
        }
        Kind::RatioTau { m } => format!("ratio_tau({m})"),
        Kind::InvTauFr { r } => format!("inv_tau_Fr({r})"),
        Kind::InvTauM { m } => format!("inv_tau_m({m})"),
        Kind::G7 { pairs } => {
            let parts: Vec<String> =
                pairs.iter().map(|(m, g)| format!("{m}:{g}")).collect();
            format!("g7({})", parts.join(","))
        }
        Kind::InvTauMFr { m, r } => format!("inv_tau_m_Fr({m},{r})"),
        Kind::Explicit { ds } => {
            let parts: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
            format!("explicit({})", parts.join(","))
        }
    }
}

/// Parse "name" or "name(arg,arg,...)" into a profile.
///
/// Accepted names (case-insensitive): one, tau, tau_m(m), tau_k_of_F_r(k,r),
/// tau3_of_F2, inv_tau, inv_tau_alpha(α), c_omega(c), inv_2_omega,
/// ratio_tau(m), inv_tau_Fr(r), inv_tau_m(m), g7(m:γ,m:γ,...),
/// inv_tau_m_Fr(m,r), explicit(d1,d2,...). Rational arguments accept "a/b",
/// integers, and decimals.
pub fn parse_preset(text: &str, precision_bits: u32) -> Result<DProfile, String> {
    let text = text.trim();
    let (name, args) = match text.find('(') {
        Some(i) => {
            let close = text
                .rfind(')')
                .ok_or_else(|| format!("unbalanced parentheses in preset {text:?}"))?;
            (text[..i].trim(), Some(text[i + 1..close].trim()))
        }
        None => (text, None),
    };
    let args_list: Vec<&str> = match args {
        Some("") | None => vec![],
        Some(a) => a.split(',').map(str::trim).collect(),
    };
    let want = |n: usize| -> Result<(), String> {
        if args_list.len() == n {
            Ok(())
        } else {
            Err(format!("preset {name} expects {n} argument(s), got {}", args_list.len()))
        }
    };
    let uint = |s: &str| -> Result<u64, String> {
        s.parse::<u64>().map_err(|_| format!("bad integer argument {s:?}"))
    };
    match name.to_ascii_lowercase().as_str() {
        "one" => {
            want(0)?;
            Ok(DProfile::one())
        }
        "tau" => {
            want(0)?;
            Ok(DProfile::tau())
        }
        "tau_m" => {
            want(1)?;
            let m = uint(args_list[0])?;
            if m < 1 {
                return Err("tau_m needs m >= 1".into());
            }
            Ok(DProfile::tau_m(m))
        }
        "tau_k_of_f_r" => {
            want(2)?;
            let k = uint(args_list[0])?;
            let r = uint(args_list[1])?;
            if k < 1 || r < 1 {
                return Err("tau_k_of_F_r needs k, r >= 1".into());
            }
            Ok(DProfile::tau_k_of_f_r(k, r))
        }
        "tau3_of_f2" => {
            want(0)?;
            Ok(DProfile::tau3_of_f2())
        }
        "inv_tau" => {
            want(0)?;
            Ok(DProfile::inv_tau())
        }
        "inv_tau_alpha" => {
            want(1)?;
            let alpha = parse_rational(args_list[0])?;
            Ok(DProfile::inv_tau_alpha(&alpha, precision_bits))
        }
        "c_omega" => {
            want(1)?;
            let c = parse_rational(args_list[0])?;
            Ok(DProfile::c_omega(&c))
        }
        "inv_2_omega" => {
            want(0)?;
            Ok(DProfile::inv_2_omega())
        }
        "ratio_tau" => {
            want(1)?;
            let m = uint(args_list[0])?;
            if m < 1 {
                return Err("ratio_tau needs m >= 1".into());
            }
            Ok(DProfile::ratio_tau(m))
        }
        "inv_tau_fr" => {
            want(1)?;
            let r = uint(args_list[0])?;
            if r < 1 {
                return Err("inv_tau_Fr needs r >= 1".into());
            }
            Ok(DProfile::inv_tau_fr(r))
        }
        "inv_tau_m" => {
            want(1)?;
            let m = uint(args_list[0])?;
            if m < 1 {
                return Err("inv_tau_m needs m >= 1".into());
            }
            Ok(DProfile::inv_tau_m(m))
        }
        "g7" => {
            if args_list.is_empty() {
                // minimal paper case: 1/(τ(F))², i.e. two τ_2 factors
                return Ok(DProfile::g7(
                    &[(2, Rational::one()), (2, Rational::one())],
                    precision_bits,
                ));
            }
            let mut pairs = Vec::new();
            for part in &args_list {
                let (m, g) = part
                    .split_once(':')
                    .ok_or_else(|| format!("g7 arguments are m:gamma pairs, got {part:?}"))?;
                let m = uint(m.trim())?;
                if m < 1 {
                    return Err("g7 needs every m >= 1".into());
                }
                pairs.push((m, parse_rational(g)?));
            }
            Ok(DProfile::g7(&pairs, precision_bits))
        }
        "inv_tau_m_fr" => {
            want(2)?;
            let m = uint(args_list[0])?;
            let r = uint(args_list[1])?;
            if m < 1 || r < 1 {
                return Err("inv_tau_m_Fr needs m, r >= 1".into());
            }
            Ok(DProfile::inv_tau_m_fr(m, r))
        }
        "explicit" => {
            if args_list.is_empty() {
                return Err("explicit needs at least one d value".into());
            }
            let ds = args_list
                .iter()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(DProfile::explicit(ds))
        }
        other => Err(format!("unknown preset {other:?}")),
    }
}
