use std::io::Write;

use kthprice_core::combinatorics::{
    bracket_applies, catalan_integral, catalan_recurrence_holds, omega_bracket, random_identity_trials,
    rational_to_f64, IDENTITY_TOLERANCE,
};
use kthprice_core::{catalan, omega, theta_table, BigRational, QuadratureConfig};

use crate::config::{Format, RunConfig};
use crate::output::{fmt_sig, Cell, Table};
use crate::CliError;

/// Relative tolerance of the Catalan integral representation.
pub const CATALAN_INTEGRAL_TOLERANCE: f64 = 1e-6;

struct Check {
    name: &'static str,
    cases: usize,
    skipped: usize,
    max_error: f64,
    tolerance: f64,
    witness: Option<String>,
}

impl Check {
    fn exact(name: &'static str) -> Self {
        Check {
            name,
            cases: 0,
            skipped: 0,
            max_error: 0.0,
            tolerance: 0.0,
            witness: None,
        }
    }

    /// Counts one exact case; a failure scores error 1 and keeps the first witness.
    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.max_error = 1.0;
            self.witness.get_or_insert_with(witness);
        }
    }

    fn pass(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

/// Catalan recurrence and integral (`ℓ ≤ lmax`), the three randomized
/// binomial identities (`random-trials`, `seed`, `tol`), and the θ
/// recurrences, Ω positivity, Ω bracket and its equality at `k = 3` for
/// `3 ≤ k ≤ n ≤ nmax`.
pub fn identities(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let mut checks = Vec::new();

    let mut recurrence = Check::exact("catalan_recurrence");
    recurrence.cases = cfg.lmax as usize + 1;
    if !catalan_recurrence_holds(cfg.lmax) {
        recurrence.max_error = 1.0;
        recurrence.witness = Some(format!("lmax={}", cfg.lmax));
    }
    checks.push(recurrence);

    let quad = QuadratureConfig::default();
    let mut integral = Check::exact("catalan_integral");
    integral.tolerance = CATALAN_INTEGRAL_TOLERANCE;
    for l in 0..=cfg.lmax {
        let exact = rational_to_f64(&BigRational::from_integer(catalan(l).into()));
        let rel = (catalan_integral(l, &quad)? - exact).abs() / exact;
        integral.cases += 1;
        if rel > integral.max_error {
            integral.max_error = rel;
            integral.witness = Some(format!("l={l}"));
        }
    }
    checks.push(integral);

    let tol = cfg.tol.unwrap_or(IDENTITY_TOLERANCE);
    for summary in random_identity_trials(cfg.random_trials, cfg.seed, tol) {
        checks.push(Check {
            name: summary.identity,
            cases: summary.trials,
            skipped: summary.skipped,
            max_error: summary.max_rel_error,
            tolerance: summary.tolerance,
            witness: summary.witness.map(|w| {
                format!(
                    "m={} r={} z={} s={} lhs={} rhs={}",
                    fmt_sig(w.m),
                    fmt_sig(w.r),
                    fmt_sig(w.z),
                    w.s,
                    fmt_sig(w.lhs),
                    fmt_sig(w.rhs)
                )
            }),
        });
    }

    let mut theta = Check::exact("theta_recurrences");
    let mut positive = Check::exact("omega_positive");
    let mut bracket = Check::exact("omega_bracket");
    let mut equality = Check::exact("omega_lower_bound_equality_k3");
    for n in 3..=cfg.nmax {
        for k in 3..=n {
            let w = || format!("n={n} k={k}");
            theta.record(theta_table(n, k)?.recurrences_hold(), w);
            let value = omega(n, k)?;
            positive.record(value > BigRational::from_integer(0.into()), w);
            if bracket_applies(n, k) {
                let (lo, hi) = omega_bracket(n, k)?;
                bracket.record(lo <= value && value <= hi, w);
                if k == 3 {
                    equality.record(value == lo, w);
                }
            }
        }
    }
    checks.extend([theta, positive, bracket, equality]);
    // Exact checks score 0 or 1 against tolerance 0. Randomized checks always
    // name their worst case.

    let mut table = Table::new(&[
        "check", "cases", "skipped", "max_error", "tolerance", "pass", "seed", "witness",
    ]);
    for c in &checks {
        table.push(vec![
            c.name.into(),
            c.cases.into(),
            c.skipped.into(),
            c.max_error.into(),
            c.tolerance.into(),
            c.pass().into(),
            cfg.seed.into(),
            Cell::from(c.witness.clone()),
        ]);
    }
    table.write(cfg.format_or(Format::Csv), out)?;

    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass())
        .map(|c| format!("{} ({})", c.name, c.witness.as_deref().unwrap_or("no witness")))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(failed.join("; ")))
    }
}
