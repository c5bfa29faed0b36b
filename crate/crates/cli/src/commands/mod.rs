//! One module per subcommand; each writes its table or reports to `out`
//! and returns [`CliError::CheckFailed`] when a requested check fails.

mod bid_table;
mod bounds;
mod identities;
mod simulate;
mod verify;

use std::io::Write;

use kthprice_core::{AuctionConfig, BidFunction, LinearDensity};

use crate::config::{BidChoice, Command, RunConfig};
use crate::output::open_output;
use crate::CliError;

pub use bid_table::bid_table;
pub use bounds::bounds;
pub use identities::identities;
pub use simulate::simulate;
pub use verify::verify;

/// Runs `cfg.command`, writing to `--output` or stdout.
pub fn execute(cfg: &RunConfig) -> Result<(), CliError> {
    let mut out = open_output(cfg.output.as_deref())?;
    let result = run_into(cfg, &mut out);
    out.flush()?;
    result
}

/// Runs `cfg.command`, writing to `out`.
pub fn run_into(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    match cfg.command {
        Command::BidTable => bid_table(cfg, out),
        Command::Verify => verify(cfg, out),
        Command::Identities => identities(cfg, out),
        Command::Simulate { target } => simulate(cfg, target, out),
        Command::Bounds => bounds(cfg, out),
    }
}

pub(crate) fn build_bid(choice: BidChoice, dist: LinearDensity, config: AuctionConfig) -> Result<BidFunction, CliError> {
    Ok(match choice {
        BidChoice::Equilibrium => BidFunction::equilibrium(dist, config)?,
        BidChoice::Truthful => BidFunction::truthful(dist, config),
        BidChoice::Third => {
            if config.k != 3 {
                return Err(CliError::Config(format!("invalid --bid: third needs k = 3 (k = {})", config.k)));
            }
            BidFunction::third_price(dist, config.n)?
        }
        BidChoice::Uniform => BidFunction::uniform_closed_form(dist, config)?,
        BidChoice::Triangle => BidFunction::triangle_closed_form(dist, config)?,
        BidChoice::Series => BidFunction::series(dist, config)?,
    })
}
