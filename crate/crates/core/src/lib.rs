//! Symmetric increasing equilibria of k-th price auctions.
//!
//! For values drawn iid from a distribution with linear density
//! `f(x) = a·x + b` on `[0, ω]`, the equilibrium bid of a k-th price auction
//! is a finite series whose ℓ-th term carries the ℓ-th Catalan number.
//! This crate evaluates those bid functions, keeps every coefficient in exact
//! rational arithmetic, and checks the results several independent ways:
//!
//! * [`equilibrium::psi_ladder_oracle`] rebuilds the derivative ladder
//!   symbolically over exact rational functions,
//! * [`verification::revenue_equivalence_check`] integrates the expected
//!   payment numerically and compares it with the second-price benchmark,
//! * [`verification::monte_carlo_expected_payment`] and
//!   [`verification::expected_revenue`] simulate the auction directly.

pub mod combinatorics;
pub mod distributions;
mod double_double;
pub mod equilibrium;
mod error;
pub mod poly;
pub mod quadrature;
pub mod verification;

pub use combinatorics::{catalan, omega, theta_table, ThetaTable};
pub use distributions::{AuctionConfig, LinearDensity};
pub use equilibrium::{BidFunction, BidKind};
pub use error::{Error, Result};
pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;
pub use poly::{Polynomial, RationalFunction};
pub use quadrature::QuadratureConfig;
pub use verification::{MonteCarloResult, VerificationReport};
