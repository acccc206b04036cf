//! polymean: mean values of multiplicative functions over F_q[T].
//!
//! A multiplicative function g on monic polynomials is determined by the
//! sequence d_k = g(P^k) on prime powers. This library computes the mean
//! value T(N) = Σ_{deg F = N, F monic} g(F):
//!
//! - exactly as a polynomial in q ([`exact::t_poly_thm1`]),
//! - exactly at fixed q from the Euler product ([`exact::t_exact_euler`]),
//! - asymptotically with explicit error bounds ([`asympt::thm2_expand`],
//!   [`asympt::gorodetsky_expand`]),
//! - and by brute-force enumeration over F_p as ground truth
//!   ([`oracle::brute_t`]).
//!
//! Rational-valued profiles run in exact arbitrary-precision rational
//! arithmetic end to end; irrational profiles run in high-precision floats.

pub mod approx;
pub mod asympt;
pub mod coeff;
pub mod error;
pub mod exact;
pub mod oracle;
pub mod polyq;
pub mod profile;
pub mod rational;
pub mod sequences;
pub mod series;

pub use approx::Af;
pub use coeff::{binom_gen, Coeff, CoeffMode};
pub use error::{Error, Result};
pub use polyq::PolyInQ;
pub use profile::{parse_preset, DProfile};
pub use rational::Rational;
pub use series::Series;
