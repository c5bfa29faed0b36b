//! Catalan numbers, the Catalan-weighted coefficients θ and Ω of the bid
//! series, and evaluate-both-sides checkers for the binomial identities
//! (Jensen, Hagen-Rothe, and the shifted Jensen form) used to bound Ω.
//!
//! Everything that decides a sign or an inequality is computed exactly with
//! big rationals. Floating point is only used where the arguments are real.

use std::f64::consts::{FRAC_PI_2, PI};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::double_double::Dd;
use crate::quadrature::{integrate, QuadratureConfig};
use crate::{Error, Result};

/// Relative tolerance for the floating-point identity checkers:
/// `|lhs - rhs| <= IDENTITY_TOLERANCE * max(1, |rhs|)`.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// Exact binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial coefficient over signed indices: zero unless `0 <= k <= n`.
pub(crate) fn binomial_signed(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        BigInt::zero()
    } else {
        BigInt::from(binomial(n as u64, k as u64))
    }
}

pub(crate) fn rational(value: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

/// The ℓ-th Catalan number `C(2ℓ, ℓ) / (ℓ + 1)`.
pub fn catalan(l: u32) -> BigUint {
    binomial(2 * l as u64, l as u64) / (l as u64 + 1)
}

/// Checks `C_ℓ = 2(2ℓ - 1)/(ℓ + 1) · C_{ℓ-1}` exactly for `ℓ = 1..=l_max`.
pub fn catalan_recurrence_holds(l_max: u32) -> bool {
    let mut prev = catalan(0);
    for l in 1..=l_max {
        let next = catalan(l);
        // cross-multiplied: (ℓ + 1)·C_ℓ == 2(2ℓ - 1)·C_{ℓ-1}
        let lhs = &next * (l as u64 + 1);
        let rhs = &prev * (2 * (2 * l as u64 - 1));
        if lhs != rhs {
            return false;
        }
        prev = next;
    }
    true
}

/// `C_ℓ` from its integral representation
/// `(2^{2ℓ+1}/π) ∫₀¹ t^ℓ √((1-t)/t) dt`.
///
/// With `t = sin²u` the integrand becomes `2 sin^{2ℓ}u cos²u` on `[0, π/2]`,
/// which is smooth, so both endpoint singularities disappear. The prefactor
/// is folded into the integrand so the quadrature tolerance acts relative
/// to `C_ℓ ≥ 1`.
pub fn catalan_integral(l: u32, quad: &QuadratureConfig) -> Result<f64> {
    let l = l as i32;
    let scale = 4.0 / PI;
    let est = integrate(
        |u: f64| {
            let (s, c) = u.sin_cos();
            scale * (4.0 * s * s).powi(l) * c * c
        },
        0.0,
        FRAC_PI_2,
        quad,
    )?;
    Ok(est.value)
}

/// Generalised binomial coefficient `r(r-1)···(r-s+1)/s!` for real `r`.
pub fn binom_real(r: f64, s: u32) -> f64 {
    binom_dd(Dd::from(r), s).to_f64()
}

fn binom_dd(r: Dd, s: u32) -> Dd {
    let mut acc = Dd::ONE;
    for i in 0..s {
        acc = acc * (r - Dd::from(i as f64)) / Dd::from((i + 1) as f64);
    }
    acc
}

// m + z·ℓ without rounding the product.
fn shift(m: f64, z: f64, l: u32) -> Dd {
    Dd::from(m) + Dd::from(z) * Dd::from(l as f64)
}

// The identity sums below cancel heavily (summands near 1e8 against sides
// near 1), so they are accumulated in double-double and rounded once.

/// Both sides of Jensen's identity
/// `Σ C(m+zℓ, ℓ)·C(r-zℓ, s-ℓ) = Σ C(m+r-ℓ, s-ℓ)·z^ℓ`.
pub fn jensen_sides(m: f64, r: f64, z: f64, s: u32) -> (f64, f64) {
    let mut lhs = Dd::ZERO;
    let mut rhs = Dd::ZERO;
    let zd = Dd::from(z);
    for l in 0..=s {
        lhs = lhs + binom_dd(shift(m, z, l), l) * binom_dd(shift(r, -z, l), s - l);
        rhs = rhs + binom_dd(Dd::from(m) + Dd::from(r) - Dd::from(l as f64), s - l) * zd.powi(l);
    }
    (lhs.to_f64(), rhs.to_f64())
}

/// Both sides of the Hagen-Rothe identity
/// `Σ m/(m+zℓ)·C(m+zℓ, ℓ)·C(r-zℓ, s-ℓ) = C(m+r, s)`.
///
/// Rejects inputs where some `m + zℓ` vanishes.
pub fn hagen_rothe_sides(m: f64, r: f64, z: f64, s: u32) -> Result<(f64, f64)> {
    let mut lhs = Dd::ZERO;
    for l in 0..=s {
        let shifted = shift(m, z, l);
        if shifted.is_zero() {
            return Err(Error::Singular(format!(
                "m + z·ℓ = 0 at ℓ = {l} (m = {m}, z = {z})"
            )));
        }
        lhs = lhs + Dd::from(m) / shifted * binom_dd(shifted, l) * binom_dd(shift(r, -z, l), s - l);
    }
    Ok((lhs.to_f64(), binom_dd(Dd::from(m) + Dd::from(r), s).to_f64()))
}

/// Both sides of `Σ C(r-ℓ, s-ℓ)·z^ℓ = Σ C(r+1, s-ℓ)·(z-1)^ℓ`.
pub fn shifted_jensen_sides(r: f64, z: f64, s: u32) -> (f64, f64) {
    let mut lhs = Dd::ZERO;
    let mut rhs = Dd::ZERO;
    let zd = Dd::from(z);
    let zm1 = zd - Dd::ONE;
    for l in 0..=s {
        lhs = lhs + binom_dd(Dd::from(r) - Dd::from(l as f64), s - l) * zd.powi(l);
        rhs = rhs + binom_dd(Dd::from(r) + Dd::ONE, s - l) * zm1.powi(l);
    }
    (lhs.to_f64(), rhs.to_f64())
}

/// Worst case found by [`random_identity_trials`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityWitness {
    pub m: f64,
    pub r: f64,
    pub z: f64,
    pub s: u32,
    pub lhs: f64,
    pub rhs: f64,
}

/// Randomized sweep of one identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentitySummary {
    pub identity: &'static str,
    pub trials: usize,
    /// Trials rejected by the identity's precondition.
    pub skipped: usize,
    /// Largest `|lhs - rhs| / max(1, |rhs|)`.
    pub max_rel_error: f64,
    pub witness: Option<IdentityWitness>,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentitySummary {
    fn new(identity: &'static str, tolerance: f64) -> Self {
        Self {
            identity,
            trials: 0,
            skipped: 0,
            max_rel_error: 0.0,
            witness: None,
            tolerance,
            pass: true,
        }
    }

    fn record(&mut self, (m, r, z, s): (f64, f64, f64, u32), (lhs, rhs): (f64, f64)) {
        self.trials += 1;
        let rel = (lhs - rhs).abs() / rhs.abs().max(1.0);
        if rel > self.max_rel_error || rel.is_nan() || self.witness.is_none() {
            self.max_rel_error = if rel.is_nan() { f64::INFINITY } else { rel.max(self.max_rel_error) };
            self.witness = Some(IdentityWitness { m, r, z, s, lhs, rhs });
        }
        self.pass = self.max_rel_error <= self.tolerance;
    }
}

/// Evaluates Jensen, Hagen-Rothe and the shifted identity on `trials`
/// random tuples `m ∈ (0, 5]`, `r ∈ [-3, 10]`, `z ∈ [-2, 2]`, `s ∈ 0..=12`.
pub fn random_identity_trials(trials: usize, seed: u64, tol: f64) -> [IdentitySummary; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jensen = IdentitySummary::new("jensen", tol);
    let mut hagen = IdentitySummary::new("hagen_rothe", tol);
    let mut shifted = IdentitySummary::new("shifted_jensen", tol);
    for _ in 0..trials {
        let m = 5.0 * (1.0 - rng.random::<f64>());
        let r = rng.random_range(-3.0..=10.0);
        let z = rng.random_range(-2.0..=2.0);
        let s = rng.random_range(0..=12u32);
        let tuple = (m, r, z, s);
        jensen.record(tuple, jensen_sides(m, r, z, s));
        match hagen_rothe_sides(m, r, z, s) {
            Ok(sides) => hagen.record(tuple, sides),
            Err(_) => hagen.skipped += 1,
        }
        shifted.record(tuple, shifted_jensen_sides(r, z, s));
    }
    [jensen, hagen, shifted]
}

/// `|lhs - rhs| <= tol · max(1, |rhs|)`.
pub fn sides_agree((lhs, rhs): (f64, f64), tol: f64) -> bool {
    (lhs - rhs).abs() <= tol * rhs.abs().max(1.0)
}

fn check_series_range(n: u32, k: u32) -> Result<()> {
    if k < 3 || k > n {
        return Err(Error::InvalidConfig(format!(
            "series coefficients need 3 ≤ k ≤ n, got n = {n}, k = {k}"
        )));
    }
    Ok(())
}

/// Catalan-weighted coefficients `θ^k_ℓ = C(n-2, k-3-ℓ)·C_ℓ/2^ℓ`, `ℓ = 0..=k-3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaTable {
    pub n: u32,
    pub k: u32,
    pub entries: Vec<BigRational>,
}

fn theta_entries(n: u32, k: u32) -> Vec<BigRational> {
    (0..=(k as i64 - 3))
        .map(|l| {
            let weight = binomial_signed(n as i64 - 2, k as i64 - 3 - l);
            let c = BigInt::from(catalan(l as u32));
            BigRational::new(weight * c, BigInt::one() << (l as usize))
        })
        .collect()
}

/// Builds the θ table for `3 ≤ k ≤ n`.
pub fn theta_table(n: u32, k: u32) -> Result<ThetaTable> {
    check_series_range(n, k)?;
    Ok(ThetaTable {
        n,
        k,
        entries: theta_entries(n, k),
    })
}

impl ThetaTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The entries as floats, for series evaluation.
    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(rational_to_f64).collect()
    }

    /// Checks, against the θ^{k+1} row, both
    /// `θ^{k+1}_ℓ = (2ℓ-1)/(ℓ+1)·θ^k_{ℓ-1}` for `ℓ = 1..=k-2` and
    /// `(n-k+ℓ+1)·θ^k_ℓ = (k-2-ℓ)·θ^{k+1}_ℓ` for `ℓ = 0..=k-3`.
    pub fn recurrences_hold(&self) -> bool {
        let next = theta_entries(self.n, self.k + 1);
        let shift_ok = (1..=self.k as usize - 2).all(|l| {
            let factor = BigRational::new(BigInt::from(2 * l as i64 - 1), BigInt::from(l as i64 + 1));
            next[l] == factor * &self.entries[l - 1]
        });
        let ratio_ok = self.entries.iter().enumerate().all(|(l, theta)| {
            let lhs = theta * BigInt::from(self.n as i64 - self.k as i64 + l as i64 + 1);
            let rhs = &next[l] * BigInt::from(self.k as i64 - 2 - l as i64);
            lhs == rhs
        });
        shift_ok && ratio_ok
    }

    /// `Ω_k = Σ (-1)^ℓ θ^k_ℓ / 2^{ℓ+1}`.
    pub fn omega(&self) -> BigRational {
        self.entries
            .iter()
            .enumerate()
            .fold(BigRational::zero(), |acc, (l, theta)| {
                let term = theta / (BigInt::one() << (l + 1));
                if l % 2 == 0 {
                    acc + term
                } else {
                    acc - term
                }
            })
    }
}

/// `Ω_k` for `3 ≤ k ≤ n`, exactly.
pub fn omega(n: u32, k: u32) -> Result<BigRational> {
    Ok(theta_table(n, k)?.omega())
}

/// The bracket `[(1/2)·C(n-3, k-3), (7/8)·C(n-3, k-3)]` that contains `Ω_k`
/// whenever `n + 4 > 2k`.
pub fn omega_bracket(n: u32, k: u32) -> Result<(BigRational, BigRational)> {
    check_series_range(n, k)?;
    let base = rational(binomial(n as u64 - 3, k as u64 - 3));
    let lower = &base * BigRational::new(BigInt::from(1), BigInt::from(2));
    let upper = base * BigRational::new(BigInt::from(7), BigInt::from(8));
    Ok((lower, upper))
}

/// Whether the bracket of [`omega_bracket`] is claimed for `(n, k)`.
pub fn bracket_applies(n: u32, k: u32) -> bool {
    n + 4 > 2 * k
}

/// `Ω_k` through its integral form
/// `(1/π) ∫₀¹ √(z/(1-z)) Σ_ℓ C(n-3-ℓ, k-3-ℓ) z^ℓ dz`, a numerical
/// cross-check of the exact alternating sum.
pub fn omega_integral(n: u32, k: u32, quad: &QuadratureConfig) -> Result<f64> {
    check_series_range(n, k)?;
    let coeffs: Vec<f64> = (0..=(k - 3) as u64)
        .map(|l| rational_to_f64(&rational(binomial(n as u64 - 3 - l, k as u64 - 3 - l))))
        .collect();
    // z = sin²u turns √(z/(1-z)) dz into 2 sin²u du.
    let est = integrate(
        |u: f64| {
            let s2 = u.sin().powi(2);
            let poly = coeffs.iter().rev().fold(0.0, |acc, c| acc * s2 + c);
            2.0 * s2 * poly
        },
        0.0,
        FRAC_PI_2,
        quad,
    )?;
    Ok(est.value / PI)
}

/// Lossy conversion, correct to within a couple of ulps.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Scale huge numerators and denominators into range first.
    let num_bits = q.numer().bits() as i64;
    let den_bits = q.denom().bits() as i64;
    let shift = (num_bits - den_bits) - 60;
    let scaled = if shift > 0 {
        q / BigRational::from_integer(BigInt::one() << shift as usize)
    } else {
        q * BigRational::from_integer(BigInt::one() << (-shift) as usize)
    };
    let mantissa = scaled.numer().to_f64().unwrap_or(f64::NAN) / scaled.denom().to_f64().unwrap_or(f64::NAN);
    let sign = if q.is_negative() { -1.0 } else { 1.0 };
    sign * mantissa.abs() * 2f64.powi(shift as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn small_catalan_numbers() {
        let got: Vec<u64> = (0..=10).map(|l| catalan(l).try_into().unwrap()).collect();
        assert_eq!(got, [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796]);
    }

    #[test]
    fn catalan_matches_ballot_count() {
        // Independent count: lattice paths of length 2ℓ that never dip below zero.
        fn dyck(l: usize) -> u64 {
            let mut ways = vec![0u64; 2 * l + 2];
            ways[0] = 1;
            for _ in 0..2 * l {
                let mut next = vec![0u64; 2 * l + 2];
                for h in 0..=2 * l {
                    if ways[h] == 0 {
                        continue;
                    }
                    next[h + 1] += ways[h];
                    if h > 0 {
                        next[h - 1] += ways[h];
                    }
                }
                ways = next;
            }
            ways[0]
        }
        for l in 0..=15u32 {
            assert_eq!(catalan(l), BigUint::from(dyck(l as usize)), "ℓ = {l}");
        }
    }

    #[test]
    fn recurrence() {
        assert!(catalan_recurrence_holds(1));
        assert!(catalan_recurrence_holds(10));
        assert!(catalan_recurrence_holds(50));
    }

    #[test]
    fn integral_representation() {
        let tight = QuadratureConfig::with_tolerance(1e-8);
        assert!((catalan_integral(0, &tight).unwrap() - 1.0).abs() < 1e-8);
        assert!((catalan_integral(2, &tight).unwrap() - 2.0).abs() < 1e-8);
        let loose = QuadratureConfig::with_tolerance(1e-6);
        let c8 = catalan_integral(8, &loose).unwrap();
        assert!((c8 - 1430.0).abs() <= 1e-6 * 1430.0);
    }

    #[test]
    fn catalan_integral_is_relative() {
        let quad = QuadratureConfig::with_tolerance(1e-10);
        for l in [12u32, 25, 40] {
            let exact = rational_to_f64(&rational(catalan(l)));
            let got = catalan_integral(l, &quad).unwrap();
            assert!((got - exact).abs() <= 1e-9 * exact, "ℓ = {l}: {got} vs {exact}");
        }
    }

    #[test]
    fn random_trials_agree() {
        for summary in random_identity_trials(500, 7, IDENTITY_TOLERANCE) {
            assert!(summary.pass, "{summary:?}");
            assert_eq!(summary.trials + summary.skipped, 500);
        }
    }

    #[test]
    fn random_trials_report_worst_case() {
        let sweep = random_identity_trials(200, 3, IDENTITY_TOLERANCE);
        for s in &sweep {
            let w = s.witness.unwrap();
            let rel = (w.lhs - w.rhs).abs() / w.rhs.abs().max(1.0);
            assert_eq!(rel, s.max_rel_error);
        }
    }

    #[test]
    fn plain_f64_summation_is_not_enough() {
        // The worst Jensen tuple of the 500-trial sweep, summed naively in f64.
        let (m, r, z, s) = (2.567865805005174, -0.9649807608121583, 1.8046018925543423, 12u32);
        let naive = |r0: f64, s0: u32| (0..s0).fold(1.0, |acc, i| acc * (r0 - i as f64) / (i + 1) as f64);
        let lhs: f64 = (0..=s).map(|l| naive(m + z * l as f64, l) * naive(r - z * l as f64, s - l)).sum();
        let (_, rhs) = jensen_sides(m, r, z, s);
        assert!((lhs - rhs).abs() > 1e-9);
        assert!(sides_agree(jensen_sides(m, r, z, s), IDENTITY_TOLERANCE));
    }

    #[test]
    fn binom_real_values() {
        assert_eq!(binom_real(5.0, 0), 1.0);
        assert_eq!(binom_real(2.5, 2), 1.875);
        assert_eq!(binom_real(-1.0, 3), -1.0);
        assert_eq!(binom_real(3.0, 5), 0.0);
    }

    #[test]
    fn binomial_exact() {
        assert_eq!(binomial(10, 5), BigUint::from(252u32));
        assert_eq!(binomial(3, 4), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial_signed(-1, 0), BigInt::zero());
    }

    #[test]
    fn jensen_examples() {
        assert_eq!(jensen_sides(1.0, 1.0, 0.5, 0), (1.0, 1.0));
        let (l, r) = jensen_sides(2.0, 3.0, 0.0, 2);
        assert!((l - 10.0).abs() < 1e-12 && (r - 10.0).abs() < 1e-12);
        assert!(sides_agree(jensen_sides(1.7, 4.2, -0.9, 7), IDENTITY_TOLERANCE));
    }

    #[test]
    fn identity_sides_match_exact_rational_values() {
        // Both sides evaluated over exact rationals from the same f64 inputs.
        let close = |got: f64, want: f64| (got - want).abs() <= 2e-16 * want.abs();
        let (l, r) = jensen_sides(2.567865805005174, -0.9649807608121583, 1.8046018925543423, 12);
        assert!(close(l, 0.6025455072338295) && close(r, 0.6025455072338295), "{l} {r}");
        let (l, r) = hagen_rothe_sides(2.3, 5.1, 1.4, 6).unwrap();
        assert!(close(l, 12.75310079999999) && close(r, 12.75310079999999), "{l} {r}");
    }

    #[test]
    fn hagen_rothe_examples() {
        let (l, r) = hagen_rothe_sides(3.0, 2.0, 0.0, 2).unwrap();
        assert!((l - 10.0).abs() < 1e-12 && (r - 10.0).abs() < 1e-12);
        assert_eq!(hagen_rothe_sides(1.0, 1.0, 0.5, 0).unwrap(), (1.0, 1.0));
        assert!(sides_agree(hagen_rothe_sides(2.3, 5.1, 1.4, 6).unwrap(), IDENTITY_TOLERANCE));
    }

    #[test]
    fn hagen_rothe_rejects_vanishing_denominator() {
        // m + z·2 = 0
        assert!(matches!(hagen_rothe_sides(1.0, 3.0, -0.5, 3), Err(Error::Singular(_))));
    }

    #[test]
    fn shifted_jensen_examples() {
        let (l, r) = shifted_jensen_sides(4.0, 1.0, 3);
        assert!((l - 10.0).abs() < 1e-12 && (r - 10.0).abs() < 1e-12);
        assert_eq!(shifted_jensen_sides(3.0, 0.0, 0), (1.0, 1.0));
        assert!(sides_agree(shifted_jensen_sides(6.5, -0.3, 8), IDENTITY_TOLERANCE));
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_table(3, 3).unwrap().entries, vec![q(1, 1)]);
        assert_eq!(theta_table(5, 4).unwrap().entries, vec![q(3, 1), q(1, 2)]);
        assert_eq!(theta_table(4, 4).unwrap().entries, vec![q(2, 1), q(1, 2)]);
    }

    #[test]
    fn theta_rejects_bad_ranges() {
        assert!(theta_table(5, 2).is_err());
        assert!(theta_table(4, 5).is_err());
        assert!(omega(3, 4).is_err());
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(3, 3).unwrap(), q(1, 2));
        assert_eq!(omega(5, 4).unwrap(), q(11, 8));
        assert_eq!(omega(4, 4).unwrap(), q(7, 8));
    }

    #[test]
    fn theta_and_omega_sweep() {
        for n in 3..=30 {
            for k in 3..=n {
                let table = theta_table(n, k).unwrap();
                assert!(table.recurrences_hold(), "n = {n}, k = {k}");
                let om = table.omega();
                assert!(om.is_positive(), "n = {n}, k = {k}");
                if bracket_applies(n, k) {
                    let (lo, hi) = omega_bracket(n, k).unwrap();
                    assert!(lo <= om && om <= hi, "n = {n}, k = {k}");
                }
            }
        }
    }

    #[test]
    fn omega_integral_matches_exact_sum() {
        let quad = QuadratureConfig::default();
        for (n, k) in [(3, 3), (5, 4), (9, 7), (20, 12)] {
            let exact = rational_to_f64(&omega(n, k).unwrap());
            let num = omega_integral(n, k, &quad).unwrap();
            assert!((exact - num).abs() <= 1e-10 * exact.max(1.0), "{n},{k}: {exact} vs {num}");
        }
    }

    #[test]
    fn rational_to_f64_handles_huge_operands() {
        let big = BigRational::new(BigInt::one() << 2000usize, (BigInt::one() << 1999usize) * 3);
        assert!((rational_to_f64(&big) - 2.0 / 3.0).abs() < 1e-15);
    }
}
