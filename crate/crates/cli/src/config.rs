//! Command-line flags, the optional JSON config file, and their resolution
//! into a validated [`RunConfig`].

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kthprice_core::{AuctionConfig, LinearDensity};
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_N: u32 = 5;
pub const DEFAULT_K: u32 = 3;
pub const DEFAULT_OMEGA: f64 = 1.0;
pub const DEFAULT_LMAX: u32 = 40;
pub const DEFAULT_RANDOM_TRIALS: usize = 500;
pub const DEFAULT_NMAX: u32 = 30;
pub const DEFAULT_Z_GRID: usize = 101;
/// Best-response values as fractions of ω.
pub const DEFAULT_VALUE_FRACTIONS: [f64; 3] = [0.2, 0.5, 0.8];

#[derive(Debug, Parser)]
#[command(name = "kthprice", version, about = "Equilibrium bids for k-th price auctions with linear-density values")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Tabulate β_k(x) on a grid over [0, ω] with its exact slope and bounds.
    BidTable,
    /// Run verification suites and stream their reports.
    Verify,
    /// Check the Catalan, binomial-identity, θ and Ω properties.
    Identities,
    /// Monte Carlo estimates of expected payment or seller revenue.
    Simulate {
        #[arg(value_enum)]
        target: SimTarget,
    },
    /// Ω_k and the triangle slope bracket, exactly.
    Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimTarget {
    Revenue,
    Payment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistKind {
    Uniform,
    Triangle,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BidChoice {
    /// The most specific equilibrium form for the distribution.
    Equilibrium,
    /// β(x) = x, an equilibrium only for k = 2.
    Truthful,
    /// The general third-price formula (k = 3).
    Third,
    Uniform,
    Triangle,
    /// The Catalan series for any linear density.
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Revenue equivalence by quadrature.
    Re,
    BestResponse,
    /// Series ψ against the symbolic derivative ladder.
    Oracle,
    /// The Φ ladder relations (uniform and triangle only).
    Ladder,
    All,
}

/// Every flag, also accepted as a key of the `--config` JSON file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Options {
    /// Number of bidders.
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Price index: the winner pays the k-th highest bid.
    #[arg(long, global = true)]
    pub k: Option<u32>,
    #[arg(long, global = true, value_enum)]
    pub dist: Option<DistKind>,
    /// Density slope for --dist linear.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Upper end of the value support.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Grid size (bid-table rows, verification points).
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Check tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// JSON file of defaults for any of these flags; flags win.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub bid: Option<BidChoice>,
    #[arg(long, global = true, value_enum)]
    pub suite: Option<Suite>,
    /// Fail-expected mode: exit 0 iff every report fails.
    #[arg(long, global = true)]
    #[serde(default)]
    pub expect_fail: bool,
    /// Largest Catalan index checked.
    #[arg(long, global = true)]
    pub lmax: Option<u32>,
    #[arg(long, global = true)]
    pub random_trials: Option<usize>,
    /// Largest n in the θ/Ω sweeps.
    #[arg(long, global = true)]
    pub nmax: Option<u32>,
    /// Bidder values (comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(default, deserialize_with = "one_or_many")]
    pub x: Option<Vec<f64>>,
    /// Run every k = 2..=n.
    #[arg(long, global = true)]
    #[serde(default)]
    pub all_k: bool,
    /// Points of the best-response z grid over [0, ω].
    #[arg(long, global = true)]
    pub z_grid: Option<usize>,
}

fn one_or_many<'de, D>(d: D) -> Result<Option<Vec<f64>>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(Option::<OneOrMany>::deserialize(d)?.map(|v| match v {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(xs) => xs,
    }))
}

impl Options {
    /// Fills every unset field from `file`.
    fn or(self, file: Options) -> Options {
        Options {
            n: self.n.or(file.n),
            k: self.k.or(file.k),
            dist: self.dist.or(file.dist),
            a: self.a.or(file.a),
            omega: self.omega.or(file.omega),
            grid: self.grid.or(file.grid),
            samples: self.samples.or(file.samples),
            seed: self.seed.or(file.seed),
            tol: self.tol.or(file.tol),
            format: self.format.or(file.format),
            output: self.output.or(file.output),
            config: self.config,
            bid: self.bid.or(file.bid),
            suite: self.suite.or(file.suite),
            expect_fail: self.expect_fail || file.expect_fail,
            lmax: self.lmax.or(file.lmax),
            random_trials: self.random_trials.or(file.random_trials),
            nmax: self.nmax.or(file.nmax),
            x: self.x.or(file.x),
            all_k: self.all_k || file.all_k,
            z_grid: self.z_grid.or(file.z_grid),
        }
    }
}

/// Validated settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    /// `None` when neither a flag nor the config file set it.
    pub n: Option<u32>,
    pub k: Option<u32>,
    pub dist: LinearDensity,
    pub grid: Option<usize>,
    pub samples: u64,
    pub seed: u64,
    pub tol: Option<f64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub bid: BidChoice,
    pub suite: Suite,
    pub expect_fail: bool,
    pub lmax: u32,
    pub random_trials: usize,
    pub nmax: u32,
    pub x: Option<Vec<f64>>,
    pub all_k: bool,
    pub z_grid: usize,
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("invalid --{field}: {msg}"))
}

impl RunConfig {
    pub fn resolve(cli: Cli) -> Result<Self, CliError> {
        let options = match &cli.options.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| invalid("config", format!("{}: {e}", path.display())))?;
                let file: Options =
                    serde_json::from_str(&text).map_err(|e| invalid("config", format!("{}: {e}", path.display())))?;
                cli.options.clone().or(file)
            }
            None => cli.options.clone(),
        };
        Self::from_options(cli.command, options)
    }

    pub fn from_options(command: Command, o: Options) -> Result<Self, CliError> {
        let omega = o.omega.unwrap_or(DEFAULT_OMEGA);
        if !(omega.is_finite() && omega > 0.0) {
            return Err(invalid("omega", format!("must be a positive number (got {omega})")));
        }
        let dist = match o.dist.unwrap_or(DistKind::Uniform) {
            DistKind::Uniform => LinearDensity::uniform(omega).map_err(|e| invalid("dist", e))?,
            DistKind::Triangle => LinearDensity::triangle(omega).map_err(|e| invalid("dist", e))?,
            DistKind::Linear => {
                let a = o.a.ok_or_else(|| invalid("a", "required with --dist linear"))?;
                LinearDensity::linear(a, omega).map_err(|e| invalid("a", e))?
            }
        };

        if let Some(grid) = o.grid {
            if grid < 2 {
                return Err(invalid("grid", format!("must be ≥ 2 (got {grid})")));
            }
        }
        let samples = o.samples.unwrap_or(DEFAULT_SAMPLES);
        if samples < 1 {
            return Err(invalid("samples", "must be ≥ 1 (got 0)"));
        }
        if let Some(tol) = o.tol {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(invalid("tol", format!("must be > 0 (got {tol})")));
            }
        }
        let z_grid = o.z_grid.unwrap_or(DEFAULT_Z_GRID);
        if z_grid < 2 {
            return Err(invalid("z-grid", format!("must be ≥ 2 (got {z_grid})")));
        }
        if let Some(xs) = &o.x {
            if let Some(&bad) = xs.iter().find(|&&x| !(x > 0.0 && x <= omega)) {
                return Err(invalid("x", format!("{bad} is outside (0, {omega}]")));
            }
        }
        if let Some(n) = o.n {
            if n < 2 {
                return Err(invalid("n", format!("n ≥ 2 violated (n = {n})")));
            }
        }
        if let Some(k) = o.k {
            if k < 2 {
                return Err(invalid("k", format!("k ≥ 2 violated (k = {k})")));
            }
        }
        if let (Some(n), Some(k)) = (o.n, o.k) {
            if n < k {
                return Err(invalid("k", format!("n ≥ k violated (n = {n}, k = {k})")));
            }
        }
        Ok(Self {
            command,
            n: o.n,
            k: o.k,
            dist,
            grid: o.grid,
            samples,
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            tol: o.tol,
            format: o.format,
            output: o.output,
            bid: o.bid.unwrap_or(BidChoice::Equilibrium),
            suite: o.suite.unwrap_or(Suite::All),
            expect_fail: o.expect_fail,
            lmax: o.lmax.unwrap_or(DEFAULT_LMAX),
            random_trials: o.random_trials.unwrap_or(DEFAULT_RANDOM_TRIALS),
            nmax: o.nmax.unwrap_or(DEFAULT_NMAX),
            x: o.x,
            all_k: o.all_k,
            z_grid,
        })
    }

    /// `(n, k)` with defaults for unset values.
    pub fn auction(&self) -> Result<AuctionConfig, CliError> {
        let n = self.n.unwrap_or(DEFAULT_N);
        let k = self.k.unwrap_or(DEFAULT_K.min(n));
        Ok(AuctionConfig::new(n, k)?)
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    /// Values `x`: the explicit list, or fractions of ω.
    pub fn values(&self, fractions: &[f64]) -> Vec<f64> {
        match &self.x {
            Some(xs) => xs.clone(),
            None => fractions.iter().map(|f| f * self.dist.omega()).collect(),
        }
    }
}
