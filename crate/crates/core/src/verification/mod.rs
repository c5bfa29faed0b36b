//! Independent checks of equilibrium claims.
//!
//! * [`revenue_equivalence_check`]: numerical quadrature of a bidder's
//!   expected payment against the second-price benchmark `∫₀ˣ y g(y) dy`.
//! * [`best_response_profile`]: the payoff `π(z, x) = G(z)·x - m(z)` of
//!   bidding as if one's value were `z`, scanned on a grid.
//! * [`monte_carlo_expected_payment`] / [`expected_revenue`]: direct
//!   simulation of the auction.
//! * [`oracle_report`] / [`ladder_report`]: the exact symbolic identities,
//!   packaged as reports.

mod montecarlo;
mod payment;
mod report;

pub use montecarlo::{expected_revenue, monte_carlo_expected_payment, revenue_across_k, MonteCarloResult, SHARD_SIZE};
pub use payment::{
    best_response_profile, best_response_report, expected_payment_benchmark, expected_payment_quadrature,
    revenue_equivalence_check, uniform_grid, value_grid, BestResponse,
};
pub use report::{ladder_report, oracle_report, ReportParams, VerificationReport};
