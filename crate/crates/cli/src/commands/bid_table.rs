use std::io::Write;

use kthprice_core::combinatorics::{bracket_applies, rational_to_f64};
use kthprice_core::equilibrium::triangle_slope_bounds;
use kthprice_core::verification::uniform_grid;

use super::build_bid;
use crate::config::{Format, RunConfig};
use crate::output::{fmt_rational, Cell, Table};
use crate::CliError;

pub const DEFAULT_ROWS: usize = 11;

/// Rows `x, beta, slope, slope_decimal, lower, upper, lower_slope,
/// upper_slope` on an inclusive grid over `[0, ω]`. Slopes are exact; the
/// bound columns are filled for the triangle with `k ≥ 3` and `n + 4 > 2k`.
pub fn bid_table(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let config = cfg.auction()?;
    let bid = build_bid(cfg.bid, cfg.dist, config)?;
    let (n, k) = (config.n, config.k);
    let bounds = if cfg.dist.is_triangle() && k >= 3 && bracket_applies(n, k) {
        Some(triangle_slope_bounds(n, k)?)
    } else {
        None
    };
    let mut table = Table::new(&[
        "x",
        "beta",
        "slope",
        "slope_decimal",
        "lower",
        "upper",
        "lower_slope",
        "upper_slope",
    ]);
    for x in uniform_grid(cfg.dist.omega(), cfg.grid.unwrap_or(DEFAULT_ROWS)) {
        let (lower, upper, lower_slope, upper_slope) = match &bounds {
            Some((lo, hi)) => (
                Cell::from(rational_to_f64(lo) * x),
                Cell::from(rational_to_f64(hi) * x),
                Cell::from(fmt_rational(lo)),
                Cell::from(fmt_rational(hi)),
            ),
            None => (Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty),
        };
        table.push(vec![
            x.into(),
            bid.eval(x)?.into(),
            bid.exact_slope().map(fmt_rational).into(),
            bid.exact_slope().map(rational_to_f64).into(),
            lower,
            upper,
            lower_slope,
            upper_slope,
        ]);
    }
    table.write(cfg.format_or(Format::Csv), out)
}
