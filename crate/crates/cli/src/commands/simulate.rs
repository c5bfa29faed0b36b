use std::io::Write;

use kthprice_core::quadrature::integrate;
use kthprice_core::verification::{expected_payment_benchmark, expected_revenue, monte_carlo_expected_payment};
use kthprice_core::{AuctionConfig, LinearDensity, MonteCarloResult, QuadratureConfig};

use super::build_bid;
use crate::config::{Format, RunConfig, SimTarget};
use crate::output::{Cell, Table};
use crate::CliError;

/// Monte Carlo estimates with their standard error next to the analytic
/// benchmark. With `--all-k` the run for price index `k` uses seed
/// `seed + k`.
pub fn simulate(cfg: &RunConfig, target: SimTarget, out: &mut dyn Write) -> Result<(), CliError> {
    let config = cfg.auction()?;
    let ks: Vec<u32> = if cfg.all_k { (2..=config.n).collect() } else { vec![config.k] };
    let xs = match target {
        SimTarget::Payment => cfg
            .x
            .clone()
            .ok_or_else(|| CliError::Config("invalid --x: required for simulate payment".into()))?,
        SimTarget::Revenue => Vec::new(),
    };

    let mut table = Table::new(&[
        "target", "n", "k", "x", "estimate", "standard_error", "benchmark", "z_score", "samples", "seed",
    ]);
    for &k in &ks {
        let auction = AuctionConfig::new(config.n, k)?;
        let bid = build_bid(cfg.bid, cfg.dist, auction)?;
        let seed = if cfg.all_k { cfg.seed.wrapping_add(k as u64) } else { cfg.seed };
        match target {
            SimTarget::Revenue => {
                let mc = expected_revenue(&bid, cfg.samples, seed)?;
                let bench = revenue_benchmark(&cfg.dist, config.n)?;
                table.push(row("revenue", auction, None, &mc, bench));
            }
            SimTarget::Payment => {
                for &x in &xs {
                    let mc = monte_carlo_expected_payment(&bid, x, cfg.samples, seed)?;
                    let bench = expected_payment_benchmark(&cfg.dist, config.n, x)?;
                    table.push(row("payment", auction, Some(x), &mc, bench));
                }
            }
        }
    }
    table.write(cfg.format_or(Format::Csv), out)
}

fn row(target: &str, auction: AuctionConfig, x: Option<f64>, mc: &MonteCarloResult, bench: f64) -> Vec<Cell> {
    vec![
        target.into(),
        auction.n.into(),
        auction.k.into(),
        x.into(),
        mc.estimate.into(),
        mc.standard_error.into(),
        bench.into(),
        mc.z_score(bench).into(),
        mc.samples.into(),
        mc.seed.into(),
    ]
}

/// Second-price revenue `n·∫ m(x) f(x) dx`, the value every equilibrium
/// shares.
pub fn revenue_benchmark(dist: &LinearDensity, n: u32) -> Result<f64, CliError> {
    let quad = QuadratureConfig::default();
    let est = integrate(
        |x| expected_payment_benchmark(dist, n, x).map_or(f64::NAN, |m| m * dist.pdf(x)),
        0.0,
        dist.omega(),
        &quad,
    )?;
    Ok(n as f64 * est.value)
}
