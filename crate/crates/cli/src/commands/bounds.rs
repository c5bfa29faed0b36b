use std::io::Write;

use kthprice_core::combinatorics::{bracket_applies, omega_bracket, rational_to_f64};
use kthprice_core::equilibrium::triangle_slope;
use kthprice_core::{omega, BigRational};

use crate::config::{Format, RunConfig};
use crate::output::{fmt_rational, Cell, Table};
use crate::CliError;

/// Exact Ω_k, the bracket `[C(n-3,k-3)/2, 7C(n-3,k-3)/8]` and the triangle
/// slope for one `(n, k)`, every `k` of one `n`, or all `3 ≤ k ≤ n ≤ nmax`.
/// `holds` is filled where `n + 4 > 2k`.
pub fn bounds(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let pairs: Vec<(u32, u32)> = match (cfg.n, cfg.k) {
        (Some(n), Some(k)) => vec![(n, k)],
        (Some(n), None) => (3..=n).map(|k| (n, k)).collect(),
        (None, Some(k)) => return Err(CliError::Config(format!("invalid --k: needs --n as well (k = {k})"))),
        (None, None) => (3..=cfg.nmax).flat_map(|n| (3..=n).map(move |k| (n, k))).collect(),
    };
    let mut table = Table::new(&[
        "n",
        "k",
        "omega",
        "omega_lower",
        "omega_upper",
        "slope",
        "slope_decimal",
        "positive",
        "bracket_applies",
        "holds",
    ]);
    let mut failures = Vec::new();
    for (n, k) in pairs {
        let w = omega(n, k)?;
        let slope = triangle_slope(n, k)?;
        let positive = w > BigRational::from_integer(0.into());
        let applies = bracket_applies(n, k);
        let (lower, upper, holds): (Cell, Cell, Cell) = if applies {
            let (lo, hi) = omega_bracket(n, k)?;
            let holds = lo <= w && w <= hi;
            (fmt_rational(&lo).into(), fmt_rational(&hi).into(), holds.into())
        } else {
            (Cell::Empty, Cell::Empty, Cell::Empty)
        };
        if !positive || holds == Cell::Bool(false) {
            failures.push(format!("(n = {n}, k = {k}, omega = {})", fmt_rational(&w)));
        }
        table.push(vec![
            n.into(),
            k.into(),
            fmt_rational(&w).into(),
            lower,
            upper,
            fmt_rational(&slope).into(),
            rational_to_f64(&slope).into(),
            positive.into(),
            applies.into(),
            holds,
        ]);
    }
    table.write(cfg.format_or(Format::Csv), out)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!("Ω bound violated at {}", failures.join(", "))))
    }
}
