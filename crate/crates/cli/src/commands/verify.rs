use std::io::Write;

use kthprice_core::verification::{
    best_response_report, ladder_report, oracle_report, revenue_equivalence_check,
};
use kthprice_core::{QuadratureConfig, VerificationReport};

use super::build_bid;
use crate::config::{Format, RunConfig, Suite, DEFAULT_VALUE_FRACTIONS};
use crate::output::{write_json_line, Cell, Table};
use crate::CliError;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_GRID: usize = 20;

/// Runs the selected suites and streams one report per suite. `all` skips
/// the oracle for `k = 2` and the ladder for densities other than uniform
/// and triangle, noting each skip on stderr.
pub fn verify(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let config = cfg.auction()?;
    let bid = build_bid(cfg.bid, cfg.dist, config)?;
    let quad = QuadratureConfig::default();
    let grid = cfg.grid.unwrap_or(DEFAULT_GRID);
    let (n, k) = (config.n, config.k);
    let has_ladder = cfg.dist.is_uniform() || cfg.dist.is_triangle();

    let suites: Vec<Suite> = match cfg.suite {
        Suite::All => {
            let mut all = vec![Suite::Re, Suite::BestResponse];
            if k >= 3 {
                all.push(Suite::Oracle);
                if has_ladder {
                    all.push(Suite::Ladder);
                } else {
                    eprintln!("note: ladder suite skipped (needs --dist uniform or triangle)");
                }
            } else {
                eprintln!("note: oracle and ladder suites skipped (need k ≥ 3)");
            }
            all
        }
        one => vec![one],
    };

    let mut reports = Vec::new();
    for suite in suites {
        let report = match suite {
            Suite::Re => revenue_equivalence_check(&bid, grid.max(3), cfg.tol.unwrap_or(DEFAULT_TOLERANCE), &quad)?,
            Suite::BestResponse => best_response_report(&bid, &cfg.values(&DEFAULT_VALUE_FRACTIONS), cfg.z_grid, &quad)?,
            Suite::Oracle => oracle_report(&cfg.dist, n, k, grid)?,
            Suite::Ladder => ladder_report(&cfg.dist, n, k, grid)?,
            Suite::All => unreachable!("expanded above"),
        };
        reports.push(report.with_seed(cfg.seed));
    }
    write_reports(&reports, cfg.format_or(Format::Json), out)?;

    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.check.as_str()).collect();
    let ok = if cfg.expect_fail {
        failed.len() == reports.len()
    } else {
        failed.is_empty()
    };
    if ok {
        Ok(())
    } else if cfg.expect_fail {
        Err(CliError::CheckFailed("expected every check to fail, but some passed".into()))
    } else {
        Err(CliError::CheckFailed(failed.join(", ")))
    }
}

fn write_reports(reports: &[VerificationReport], format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Json => reports.iter().try_for_each(|r| write_json_line(r, out)),
        Format::Csv => {
            let mut table = Table::new(&[
                "check", "n", "k", "bid", "a", "b", "omega", "points", "max_error", "tolerance", "pass", "seed",
            ]);
            for r in reports {
                table.push(vec![
                    r.check.as_str().into(),
                    r.params.n.into(),
                    r.params.k.into(),
                    r.params.bid.map(|b| format!("{b:?}")).into(),
                    r.params.dist.a().into(),
                    r.params.dist.b().into(),
                    r.params.dist.omega().into(),
                    r.grid.len().into(),
                    r.max_error.into(),
                    r.tolerance.into(),
                    r.pass.into(),
                    Cell::from(r.seed),
                ]);
            }
            table.write(Format::Csv, out)
        }
    }
}
