use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed};
use serde::Serialize;

use crate::combinatorics::rational_to_f64;
use crate::distributions::{AuctionConfig, LinearDensity};
use crate::equilibrium::{phi_ladder_residuals, psi_closed_form, psi_ladder_oracle, BidKind};
use crate::poly::RationalFunction;
use crate::Result;

use super::value_grid;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportParams {
    pub n: u32,
    pub k: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bid: Option<BidKind>,
    pub dist: LinearDensity,
}

/// Outcome of one verification check; serializes as
/// `{check, params{n, k, bid?, dist{a, b, omega}}, grid, errors, max_error, tolerance, pass, seed?, metadata}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub params: ReportParams,
    pub grid: Vec<f64>,
    pub errors: Vec<f64>,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, f64>,
}

impl VerificationReport {
    /// Builds a report with `max_error = max(errors)` and
    /// `pass = max_error <= tolerance`.
    pub fn new(check: impl Into<String>, params: ReportParams, grid: Vec<f64>, errors: Vec<f64>, tolerance: f64) -> Self {
        let max_error = errors.iter().copied().fold(0.0, f64::max);
        Self {
            check: check.into(),
            params,
            grid,
            errors,
            max_error,
            tolerance,
            pass: max_error <= tolerance,
            seed: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_metadata(mut self, key: &str, value: f64) -> Self {
        self.metadata.insert(key.to_string(), value);
        self
    }

    /// Raises `max_error` to at least `floor` and re-derives `pass`.
    fn raise_max_error(mut self, floor: f64) -> Self {
        self.max_error = self.max_error.max(floor);
        self.pass = self.max_error <= self.tolerance;
        self
    }
}

fn residual_at(r: &RationalFunction, x: f64) -> f64 {
    let xq = BigRational::from_f64(x).expect("finite grid point");
    match r.eval(&xq) {
        Some(v) => rational_to_f64(&v.abs()),
        None => f64::MAX,
    }
}

/// Exact symbolic residuals sampled on the grid. The report's tolerance is
/// zero; `max_error` also folds in the largest residual coefficient, so a
/// nonzero residual fails even if it happens to vanish on every grid point.
fn symbolic_report(check: &str, params: ReportParams, residuals: &[RationalFunction], grid_size: usize) -> VerificationReport {
    let grid = value_grid(params.dist.omega(), grid_size);
    let errors = grid
        .iter()
        .map(|&x| residuals.iter().map(|r| residual_at(r, x)).fold(0.0, f64::max))
        .collect();
    let coeff = residuals
        .iter()
        .map(|r| r.numerator().max_abs_coeff())
        .fold(0.0, f64::max);
    VerificationReport::new(check, params, grid, errors, 0.0)
        .raise_max_error(coeff)
        .with_metadata("symbolic_terms", residuals.len() as f64)
}

/// `ψ_{k-1}` from the symbolic ladder against the Catalan closed form.
pub fn oracle_report(dist: &LinearDensity, n: u32, k: u32, grid_size: usize) -> Result<VerificationReport> {
    let config = AuctionConfig::new(n, k)?;
    let diff = &psi_ladder_oracle(dist, n, k)? - &psi_closed_form(dist, n, k)?;
    let params = ReportParams {
        n: config.n,
        k: config.k,
        bid: None,
        dist: *dist,
    };
    Ok(symbolic_report("psi_oracle", params, &[diff], grid_size))
}

/// The Φ-ladder identities (step relations and top rung).
pub fn ladder_report(dist: &LinearDensity, n: u32, k: u32, grid_size: usize) -> Result<VerificationReport> {
    let config = AuctionConfig::new(n, k)?;
    let residuals: Vec<RationalFunction> = phi_ladder_residuals(dist, n, k)?.into_iter().map(|(_, r)| r).collect();
    let params = ReportParams {
        n: config.n,
        k: config.k,
        bid: None,
        dist: *dist,
    };
    Ok(symbolic_report("phi_ladder", params, &residuals, grid_size))
}
