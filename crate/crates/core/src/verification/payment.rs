use std::cell::Cell;

use num_rational::BigRational;
use num_traits::FromPrimitive;
use serde::Serialize;

use crate::combinatorics::rational_to_f64;
use crate::distributions::LinearDensity;
use crate::equilibrium::{psi_zero, BidFunction};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::{Error, Result};

use super::report::{ReportParams, VerificationReport};

/// `size` evenly spaced points `ω·i/size`, `i = 1..=size`, in `(0, ω]`.
pub fn value_grid(omega: f64, size: usize) -> Vec<f64> {
    (1..=size).map(|i| omega * i as f64 / size as f64).collect()
}

/// `points` evenly spaced points from 0 to ω inclusive.
pub fn uniform_grid(omega: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2, "a grid needs at least two points");
    let last = (points - 1) as f64;
    (0..points).map(|i| omega * i as f64 / last).collect()
}

/// Second-price expected payment `∫₀ˣ y·g(y) dy = (n-1)·ψ₀(x)`, from the
/// exact polynomial antiderivative.
pub fn expected_payment_benchmark(dist: &LinearDensity, n: u32, x: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!("need n ≥ 2 bidders, got {n}")));
    }
    dist.require_support("x", x)?;
    let antiderivative = psi_zero(dist, n);
    let xq = BigRational::from_f64(x).expect("finite");
    let value = antiderivative.eval(&xq) * BigRational::from_integer((n - 1).into());
    Ok(rational_to_f64(&value))
}

/// Expected payment of a bidder with value `x` when everyone bids `bid`:
/// `(n-1)·C(n-2, k-2)·∫₀ˣ β(y)·[F(x) - F(y)]^{k-2}·F(y)^{n-k}·f(y) dy`,
/// by Gauss-Legendre quadrature.
///
/// `bid` need not be an equilibrium; compare against
/// [`expected_payment_benchmark`] to find out.
pub fn expected_payment_quadrature(bid: &BidFunction, x: f64, quad: &QuadratureConfig) -> Result<f64> {
    let dist = bid.dist();
    dist.require_support("x", x)?;
    let config = bid.config();
    let (n, k) = (config.n as i32, config.k as i32);
    let weight = (n - 1) as f64 * rational_to_f64(&config.payment_binomial());
    let fx = dist.cdf(x);
    let failure: Cell<Option<Error>> = Cell::new(None);
    let est = integrate(
        |y: f64| {
            let beta = match bid.eval_in_support(y) {
                Ok(b) => b,
                Err(e) => {
                    failure.set(Some(e));
                    return f64::NAN;
                }
            };
            let fy = dist.cdf(y);
            beta * (fx - fy).powi(k - 2) * fy.powi(n - k) * dist.pdf(y)
        },
        0.0,
        x,
        quad,
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(weight * est?.value)
}

/// Compares quadrature payments with the benchmark on `grid_size` points of
/// `(0, ω]`; passes iff the largest absolute difference is within `tol`.
pub fn revenue_equivalence_check(
    bid: &BidFunction,
    grid_size: usize,
    tol: f64,
    quad: &QuadratureConfig,
) -> Result<VerificationReport> {
    if grid_size < 3 {
        return Err(Error::InvalidConfig(format!("grid_size must be ≥ 3, got {grid_size}")));
    }
    let dist = bid.dist();
    let grid = value_grid(dist.omega(), grid_size);
    let errors = grid
        .iter()
        .map(|&x| {
            let m = expected_payment_quadrature(bid, x, quad)?;
            let bench = expected_payment_benchmark(dist, bid.config().n, x)?;
            Ok((m - bench).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let params = ReportParams {
        n: bid.config().n,
        k: bid.config().k,
        bid: Some(bid.kind()),
        dist: *dist,
    };
    Ok(VerificationReport::new("revenue_equivalence", params, grid, errors, tol)
        .with_metadata("quadrature_tolerance", quad.tolerance)
        .with_metadata("quadrature_max_nodes", quad.max_nodes as f64))
}

/// Payoff profile `π(z, x)` over a grid of pretend values `z`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestResponse {
    pub value: f64,
    /// Grid point with the highest payoff (the smallest one on ties).
    pub argmax: f64,
    pub profile: Vec<(f64, f64)>,
}

/// Evaluates `π(z, x) = G(z)·x - m(z)` for every `z` in `z_grid`, with the
/// payment `m` from [`expected_payment_quadrature`].
pub fn best_response_profile(bid: &BidFunction, x: f64, z_grid: &[f64], quad: &QuadratureConfig) -> Result<BestResponse> {
    let dist = bid.dist();
    if !(x > 0.0 && x <= dist.omega()) {
        return Err(Error::OutOfDomain {
            name: "x",
            value: x,
            domain: format!("(0, {}]", dist.omega()),
        });
    }
    if z_grid.is_empty() {
        return Err(Error::InvalidConfig("empty z grid".into()));
    }
    let n = bid.config().n as i32;
    let profile = z_grid
        .iter()
        .map(|&z| {
            dist.require_support("z", z)?;
            let win = dist.cdf(z).powi(n - 1);
            Ok((z, win * x - expected_payment_quadrature(bid, z, quad)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let argmax = profile
        .iter()
        .fold(profile[0], |best, &p| if p.1 > best.1 { p } else { best })
        .0;
    Ok(BestResponse { value: x, argmax, profile })
}

/// Best-response argmax for each value in `values` on a `grid_points`-point
/// grid over `[0, ω]`; passes iff every `|z* - x|` is within one grid spacing.
pub fn best_response_report(
    bid: &BidFunction,
    values: &[f64],
    grid_points: usize,
    quad: &QuadratureConfig,
) -> Result<VerificationReport> {
    let dist = bid.dist();
    if grid_points < 2 {
        return Err(Error::InvalidConfig(format!("grid_points must be ≥ 2, got {grid_points}")));
    }
    let z_grid = uniform_grid(dist.omega(), grid_points);
    let spacing = dist.omega() / (grid_points - 1) as f64;
    let errors = values
        .iter()
        .map(|&x| Ok((best_response_profile(bid, x, &z_grid, quad)?.argmax - x).abs()))
        .collect::<Result<Vec<f64>>>()?;
    let params = ReportParams {
        n: bid.config().n,
        k: bid.config().k,
        bid: Some(bid.kind()),
        dist: *dist,
    };
    // Grid points are i·ω/(N-1) in floating point; allow for that rounding.
    let tolerance = spacing * (1.0 + 1e-9);
    Ok(VerificationReport::new("best_response", params, values.to_vec(), errors, tolerance)
        .with_metadata("z_grid_points", grid_points as f64))
}
