//! Equilibrium bid functions of the k-th price auction.
//!
//! Closed forms exist for the uniform distribution (`a = 0`) and the
//! triangle distribution (`b = 0`); both are linear in `x` and their slopes
//! are computed exactly. The general linear-density case uses the Catalan
//! series with exact θ coefficients and floating-point evaluation.

mod ladder;

pub use ladder::{
    bid_from_psi, integral_equation_residual, phi_ladder_check, phi_ladder_residuals, psi_closed_form,
    psi_ladder, psi_ladder_oracle, psi_oracle_matches, psi_zero,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::combinatorics::{omega, omega_bracket, rational_to_f64, theta_table, bracket_applies};
use crate::distributions::{AuctionConfig, LinearDensity};
use crate::{Error, Result};

/// Truthful bidding, the second-price equilibrium.
pub fn bid_second_price(x: f64) -> f64 {
    x
}

/// `β₃(x) = x + F(x)/((n-2)·f(x))`.
///
/// Rejects `x = 0` when `f(0) = 0`; the limit there is 0.
pub fn bid_third_price(dist: &LinearDensity, n: u32, x: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidConfig(format!("third-price bid needs n ≥ 3, got {n}")));
    }
    dist.require_support("x", x)?;
    let f = dist.pdf(x);
    if f <= 0.0 {
        return Err(Error::Singular(format!("f({x}) = {f}: F/f is a 0/0 form here")));
    }
    Ok(x + dist.cdf(x) / ((n - 2) as f64 * f))
}

fn series_coefficients(n: u32, k: u32) -> Result<Vec<f64>> {
    let table = theta_table(n, k)?;
    let norm = AuctionConfig::new(n, k)?.payment_binomial();
    Ok(table
        .entries
        .iter()
        .map(|theta| rational_to_f64(&(theta / &norm)))
        .collect())
}

/// Evaluates `x + Σ_ℓ coeffs[ℓ]·(-a)^ℓ·F^{ℓ+1}/f^{2ℓ+1}` with `coeffs = θ/C(n-2, k-2)`.
fn eval_series(dist: &LinearDensity, coeffs: &[f64], x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let f = dist.pdf(x);
    if f <= 0.0 {
        return Err(Error::Singular(format!("density vanishes at interior point x = {x}")));
    }
    let big_f = dist.cdf(x);
    let ratio = -dist.a() * big_f / (f * f);
    let mut power = big_f / f;
    let mut sum = 0.0;
    for c in coeffs {
        sum += c * power;
        power *= ratio;
    }
    Ok(x + sum)
}

/// The Catalan-series bid for `3 ≤ k ≤ n` under a linear density.
///
/// `β_k(0)` is defined as 0 by continuity.
pub fn bid_kth_series(dist: &LinearDensity, n: u32, k: u32, x: f64) -> Result<f64> {
    let coeffs = series_coefficients(n, k)?;
    dist.require_support("x", x)?;
    eval_series(dist, &coeffs, x)
}

/// Exact slope `1 + (k-2)/(n-k+1)` of the uniform-distribution equilibrium.
pub fn uniform_slope(n: u32, k: u32) -> Result<BigRational> {
    AuctionConfig::new(n, k)?;
    Ok(BigRational::one() + BigRational::new(BigInt::from(k - 2), BigInt::from(n - k + 1)))
}

/// Exact slope `1 + Ω_k / C(n-2, k-2)` of the triangle-distribution equilibrium.
pub fn triangle_slope(n: u32, k: u32) -> Result<BigRational> {
    let om = omega(n, k)?;
    let norm = AuctionConfig::new(n, k)?.payment_binomial();
    Ok(BigRational::one() + om / norm)
}

/// `x·(1 + (k-2)/(n-k+1))`; independent of ω.
pub fn bid_kth_uniform(n: u32, k: u32, x: f64) -> Result<f64> {
    Ok(rational_to_f64(&uniform_slope(n, k)?) * x)
}

pub fn bid_kth_triangle(n: u32, k: u32, omega: f64, x: f64) -> Result<f64> {
    let slope = triangle_slope(n, k)?;
    if !(0.0..=omega).contains(&x) {
        return Err(Error::OutOfDomain {
            name: "x",
            value: x,
            domain: format!("[0, {omega}]"),
        });
    }
    Ok(rational_to_f64(&slope) * x)
}

/// The slope bracket `[1 + (k-2)/(2(n-2)), 1 + 7(k-2)/(8(n-2))]` claimed for
/// the triangle equilibrium when `n + 4 > 2k`.
pub fn triangle_slope_bounds(n: u32, k: u32) -> Result<(BigRational, BigRational)> {
    AuctionConfig::new(n, k)?;
    if k < 3 {
        return Err(Error::InvalidConfig(format!("slope bounds need k ≥ 3, got {k}")));
    }
    if !bracket_applies(n, k) {
        return Err(Error::InvalidConfig(format!(
            "n + 4 > 2k violated (n = {n}, k = {k}); the bounds are not claimed there"
        )));
    }
    let base = BigRational::new(BigInt::from(k - 2), BigInt::from(n - 2));
    let lower = BigRational::one() + &base / BigInt::from(2);
    let upper = BigRational::one() + base * BigRational::new(BigInt::from(7), BigInt::from(8));
    Ok((lower, upper))
}

/// Verifies `(k-2)/(2(n-2)) ≤ Ω_k / C(n-2, k-2) ≤ 7(k-2)/(8(n-2))` exactly,
/// via the equivalent bracket on `Ω_k` itself.
pub fn bid_bounds_check(n: u32, k: u32) -> Result<bool> {
    let (lower, upper) = triangle_slope_bounds(n, k)?;
    let slope = triangle_slope(n, k)?;
    let (om_lo, om_hi) = omega_bracket(n, k)?;
    let om = omega(n, k)?;
    let direct = lower <= slope && slope <= upper;
    let via_omega = om_lo <= om && om <= om_hi;
    Ok(direct && via_omega)
}

/// Which closed form or series a [`BidFunction`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BidKind {
    SecondPrice,
    ThirdPriceGeneral,
    UniformClosedForm,
    TriangleClosedForm,
    LinearDensitySeries,
}

/// A symmetric bid strategy bound to an auction and a value distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct BidFunction {
    kind: BidKind,
    config: AuctionConfig,
    dist: LinearDensity,
    exact_slope: Option<BigRational>,
    slope: f64,
    series: Vec<f64>,
}

impl BidFunction {
    fn linear(kind: BidKind, config: AuctionConfig, dist: LinearDensity, slope: BigRational) -> Self {
        Self {
            kind,
            config,
            dist,
            slope: rational_to_f64(&slope),
            exact_slope: Some(slope),
            series: Vec::new(),
        }
    }

    /// `β(x) = x` in a second-price auction with `n` bidders.
    pub fn second_price(dist: LinearDensity, n: u32) -> Result<Self> {
        let config = AuctionConfig::new(n, 2)?;
        Ok(Self::linear(BidKind::SecondPrice, config, dist, BigRational::one()))
    }

    /// Truthful bidding in an arbitrary k-th price auction. Not an
    /// equilibrium for `k ≥ 3`; used as a negative control.
    pub fn truthful(dist: LinearDensity, config: AuctionConfig) -> Self {
        Self::linear(BidKind::SecondPrice, config, dist, BigRational::one())
    }

    pub fn third_price(dist: LinearDensity, n: u32) -> Result<Self> {
        let config = AuctionConfig::new(n, 3)?;
        Ok(Self {
            kind: BidKind::ThirdPriceGeneral,
            config,
            dist,
            exact_slope: None,
            slope: f64::NAN,
            series: Vec::new(),
        })
    }

    pub fn uniform_closed_form(dist: LinearDensity, config: AuctionConfig) -> Result<Self> {
        if !dist.is_uniform() {
            return Err(Error::InvalidDistribution(format!(
                "uniform closed form needs a = 0, got a = {}",
                dist.a()
            )));
        }
        let slope = uniform_slope(config.n, config.k)?;
        Ok(Self::linear(BidKind::UniformClosedForm, config, dist, slope))
    }

    pub fn triangle_closed_form(dist: LinearDensity, config: AuctionConfig) -> Result<Self> {
        if !dist.is_triangle() {
            return Err(Error::InvalidDistribution(format!(
                "triangle closed form needs b = 0, got b = {}",
                dist.b()
            )));
        }
        let slope = triangle_slope(config.n, config.k)?;
        Ok(Self::linear(BidKind::TriangleClosedForm, config, dist, slope))
    }

    pub fn series(dist: LinearDensity, config: AuctionConfig) -> Result<Self> {
        let series = series_coefficients(config.n, config.k)?;
        Ok(Self {
            kind: BidKind::LinearDensitySeries,
            config,
            dist,
            exact_slope: None,
            slope: f64::NAN,
            series,
        })
    }

    /// The most specific equilibrium form available for `(dist, config)`.
    pub fn equilibrium(dist: LinearDensity, config: AuctionConfig) -> Result<Self> {
        if config.k == 2 {
            Self::second_price(dist, config.n)
        } else if dist.is_uniform() {
            Self::uniform_closed_form(dist, config)
        } else if dist.is_triangle() {
            Self::triangle_closed_form(dist, config)
        } else {
            Self::series(dist, config)
        }
    }

    pub fn kind(&self) -> BidKind {
        self.kind
    }

    pub fn config(&self) -> AuctionConfig {
        self.config
    }

    pub fn dist(&self) -> &LinearDensity {
        &self.dist
    }

    /// Slope of linear bid kinds, exactly.
    pub fn exact_slope(&self) -> Option<&BigRational> {
        self.exact_slope.as_ref()
    }

    /// Evaluates `β(x)` for `x ∈ [0, ω]`; `β(0) = 0` for every kind.
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.dist.require_support("x", x)?;
        self.eval_in_support(x)
    }

    pub(crate) fn eval_in_support(&self, x: f64) -> Result<f64> {
        match self.kind {
            BidKind::ThirdPriceGeneral => {
                if x == 0.0 {
                    Ok(0.0)
                } else {
                    bid_third_price(&self.dist, self.config.n, x)
                }
            }
            BidKind::LinearDensitySeries => eval_series(&self.dist, &self.series, x),
            _ => Ok(self.slope * x),
        }
    }
}

/// Outcome of [`monotonicity_certificate`].
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityCertificate {
    pub increasing: bool,
    /// Present when the verdict comes from an exact slope.
    pub exact_slope: Option<BigRational>,
    /// First grid point where the bid failed to increase.
    pub witness: Option<f64>,
}

/// Certifies that `bid` is strictly increasing on `(0, ω]`: exactly from the
/// slope for linear kinds, otherwise on a grid of `grid_size` points.
pub fn monotonicity_certificate(bid: &BidFunction, grid_size: usize) -> Result<MonotonicityCertificate> {
    if grid_size < 2 {
        return Err(Error::InvalidConfig(format!("grid_size must be ≥ 2, got {grid_size}")));
    }
    if let Some(slope) = bid.exact_slope() {
        return Ok(MonotonicityCertificate {
            increasing: slope.is_positive(),
            exact_slope: Some(slope.clone()),
            witness: None,
        });
    }
    let omega = bid.dist().omega();
    let mut prev = bid.eval(omega / grid_size as f64)?;
    for i in 2..=grid_size {
        let x = omega * i as f64 / grid_size as f64;
        let value = bid.eval(x)?;
        if value <= prev {
            return Ok(MonotonicityCertificate {
                increasing: false,
                exact_slope: None,
                witness: Some(x),
            });
        }
        prev = value;
    }
    Ok(MonotonicityCertificate {
        increasing: true,
        exact_slope: None,
        witness: None,
    })
}
