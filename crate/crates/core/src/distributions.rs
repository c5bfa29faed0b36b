//! Linear-density value distributions `F(x) = a·x²/2 + b·x` on `[0, ω]`,
//! order statistics of iid draws, and seeded inverse-CDF sampling.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::FromPrimitive;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::combinatorics::{binomial, rational, rational_to_f64};
use crate::poly::Polynomial;
use crate::{Error, Result};

/// Tolerance on `F(ω) = 1` accepted at construction.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Value distribution with density `f(x) = a·x + b` on `[0, ω]`.
///
/// Construction enforces `F(ω) = 1` and `f > 0` on `(0, ω]`; `f(0) = 0`
/// is allowed (the triangle case).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearDensity {
    a: f64,
    b: f64,
    omega: f64,
}

impl LinearDensity {
    pub fn new(a: f64, b: f64, omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "support end ω must be positive and finite, got {omega}"
            )));
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidDistribution(format!(
                "density coefficients must be finite, got a = {a}, b = {b}"
            )));
        }
        let mass = a * omega * omega / 2.0 + b * omega;
        if (mass - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "F(ω) = {mass}, expected 1 (a = {a}, b = {b}, ω = {omega})"
            )));
        }
        // f is linear, so positivity on (0, ω] reduces to the endpoints.
        if b < 0.0 || a * omega + b <= 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "density a·x + b is not positive on (0, ω] (a = {a}, b = {b}, ω = {omega})"
            )));
        }
        Ok(Self { a, b, omega })
    }

    pub fn uniform(omega: f64) -> Result<Self> {
        Self::check_omega(omega)?;
        Self::new(0.0, 1.0 / omega, omega)
    }

    pub fn triangle(omega: f64) -> Result<Self> {
        Self::check_omega(omega)?;
        Self::new(2.0 / (omega * omega), 0.0, omega)
    }

    /// Normalized distribution with slope `a`; the intercept is
    /// `b = (1 - a·ω²/2)/ω`.
    pub fn linear(a: f64, omega: f64) -> Result<Self> {
        Self::check_omega(omega)?;
        let b = (1.0 - a * omega * omega / 2.0) / omega;
        Self::new(a, b, omega)
    }

    fn check_omega(omega: f64) -> Result<()> {
        if omega.is_finite() && omega > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidDistribution(format!(
                "support end ω must be positive and finite, got {omega}"
            )))
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn is_uniform(&self) -> bool {
        self.a == 0.0
    }

    pub fn is_triangle(&self) -> bool {
        self.b == 0.0
    }

    pub fn cdf(&self, x: f64) -> f64 {
        (self.a * x / 2.0 + self.b) * x
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.a * x + self.b
    }

    /// Root of `a·x²/2 + b·x = u` in `[0, ω]`.
    ///
    /// Written as `2u / (b + √(b² + 2au))`, which is stable for either sign
    /// of `a` and reduces to `u/b` when `a = 0`.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let disc = (self.b * self.b + 2.0 * self.a * u).max(0.0);
        let x = 2.0 * u / (self.b + disc.sqrt());
        x.clamp(0.0, self.omega)
    }

    pub fn contains(&self, x: f64) -> bool {
        (0.0..=self.omega).contains(&x)
    }

    pub(crate) fn require_support(&self, name: &'static str, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                name,
                value: x,
                domain: format!("[0, {}]", self.omega),
            })
        }
    }

    /// `a` as an exact rational (the float's exact binary value).
    pub fn exact_a(&self) -> BigRational {
        BigRational::from_f64(self.a).expect("finite by construction")
    }

    pub fn exact_b(&self) -> BigRational {
        BigRational::from_f64(self.b).expect("finite by construction")
    }

    /// `F` as an exact polynomial `(a/2)x² + bx`.
    pub fn exact_cdf(&self) -> Polynomial {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        Polynomial::new(vec![BigRational::from_integer(BigInt::from(0)), self.exact_b(), self.exact_a() * half])
    }

    /// `f` as an exact polynomial `ax + b`.
    pub fn exact_pdf(&self) -> Polynomial {
        Polynomial::new(vec![self.exact_b(), self.exact_a()])
    }
}

impl Distribution<f64> for LinearDensity {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // 1 - u lies in (0, 1], keeping draws off the measure-zero point 0.
        let u: f64 = rng.random();
        self.inverse_cdf(1.0 - u)
    }
}

/// Number of bidders `n` and price index `k` with `n ≥ k ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AuctionConfig {
    pub n: u32,
    pub k: u32,
}

impl AuctionConfig {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidConfig(format!("k ≥ 2 violated (k = {k})")));
        }
        if n < k {
            return Err(Error::InvalidConfig(format!("n ≥ k violated (n = {n}, k = {k})")));
        }
        Ok(Self { n, k })
    }

    /// `C(n-2, k-2)`, the normalizer of the payment integral.
    pub fn payment_binomial(&self) -> BigRational {
        rational(binomial(self.n as u64 - 2, self.k as u64 - 2))
    }
}

/// Distribution `G(y) = F(y)^{n-1}` and density `g(y) = (n-1)F(y)^{n-2}f(y)`
/// of the highest of `n - 1` opponent values.
pub fn highest_order_stat(dist: &LinearDensity, n: u32, y: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!("need n ≥ 2 bidders, got {n}")));
    }
    dist.require_support("y", y)?;
    let big_f = dist.cdf(y);
    let g_cdf = big_f.powi(n as i32 - 1);
    let g_pdf = (n - 1) as f64 * big_f.powi(n as i32 - 2) * dist.pdf(y);
    Ok((g_cdf, g_pdf))
}

/// Density at `y` of the r-th highest of `m` iid draws, conditional on the
/// highest draw being below `x`:
/// `(m / F(x)^m)·C(m-1, r-1)·[F(x) - F(y)]^{r-1}·F(y)^{m-r}·f(y)`.
pub fn conditional_order_stat_density(dist: &LinearDensity, m: u32, r: u32, x: f64, y: f64) -> Result<f64> {
    if r < 1 || r > m {
        return Err(Error::InvalidConfig(format!("need 1 ≤ r ≤ m, got r = {r}, m = {m}")));
    }
    if !(x > 0.0 && x <= dist.omega()) {
        return Err(Error::OutOfDomain {
            name: "x",
            value: x,
            domain: format!("(0, {}]", dist.omega()),
        });
    }
    if !(0.0..=x).contains(&y) {
        return Err(Error::OutOfDomain {
            name: "y",
            value: y,
            domain: format!("[0, {x}]"),
        });
    }
    let fx = dist.cdf(x);
    let fy = dist.cdf(y);
    let weight = rational_to_f64(&rational(binomial(m as u64 - 1, r as u64 - 1)));
    Ok(m as f64 / fx.powi(m as i32)
        * weight
        * (fx - fy).powi(r as i32 - 1)
        * fy.powi((m - r) as i32)
        * dist.pdf(y))
}

/// `count` iid draws by inverse-CDF sampling, reproducible from `seed`.
pub fn sample_values(dist: &LinearDensity, count: usize, seed: u64) -> Vec<f64> {
    let rng = ChaCha8Rng::seed_from_u64(seed);
    dist.sample_iter(rng).take(count).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_constructor() {
        let d = LinearDensity::uniform(1.0).unwrap();
        assert_eq!(d.cdf(0.5), 0.5);
        assert_eq!(d.cdf(1.0), 1.0);
        let d2 = LinearDensity::uniform(2.0).unwrap();
        assert_eq!(d2.pdf(0.3), 0.5);
        assert_eq!(d2.pdf(1.9), 0.5);
        assert!(LinearDensity::uniform(0.0).is_err());
        assert!(LinearDensity::uniform(-1.0).is_err());
    }

    #[test]
    fn triangle_constructor() {
        let d = LinearDensity::triangle(1.0).unwrap();
        assert_eq!(d.a(), 2.0);
        assert_eq!(d.cdf(0.5), 0.25);
        assert_eq!(d.pdf(0.5), 1.0);
        assert_eq!(d.pdf(0.0), 0.0);
        let d2 = LinearDensity::triangle(2.0).unwrap();
        assert_eq!(d2.a(), 0.5);
        assert_eq!(d2.cdf(2.0), 1.0);
        assert!(LinearDensity::triangle(0.0).is_err());
    }

    #[test]
    fn linear_constructor() {
        assert_eq!(LinearDensity::linear(0.0, 1.0).unwrap(), LinearDensity::uniform(1.0).unwrap());
        assert_eq!(LinearDensity::linear(2.0, 1.0).unwrap(), LinearDensity::triangle(1.0).unwrap());
        let d = LinearDensity::linear(1.0, 1.0).unwrap();
        assert_eq!(d.b(), 0.5);
        assert_eq!(d.cdf(1.0), 1.0);
        assert_eq!(d.pdf(0.0), 0.5);
        // a = 3 forces b < 0; a = -3 forces f(ω) < 0.
        assert!(LinearDensity::linear(3.0, 1.0).is_err());
        assert!(LinearDensity::linear(-3.0, 1.0).is_err());
        // decreasing density that stays positive is fine
        assert!(LinearDensity::linear(-1.5, 1.0).is_ok());
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(matches!(LinearDensity::new(0.0, 0.9, 1.0), Err(Error::InvalidDistribution(_))));
    }

    #[test]
    fn auction_config_validation() {
        assert!(AuctionConfig::new(3, 2).is_ok());
        assert!(AuctionConfig::new(3, 4).is_err());
        assert!(AuctionConfig::new(5, 1).is_err());
    }

    #[test]
    fn highest_order_statistic() {
        let u = LinearDensity::uniform(1.0).unwrap();
        let (g, gd) = highest_order_stat(&u, 3, 0.5).unwrap();
        assert!((g - 0.25).abs() < 1e-15 && (gd - 1.0).abs() < 1e-15);
        let t = LinearDensity::triangle(1.0).unwrap();
        let (g, gd) = highest_order_stat(&t, 2, 0.5).unwrap();
        assert!((g - 0.25).abs() < 1e-15 && (gd - 1.0).abs() < 1e-15);
        for n in 2..6 {
            assert_eq!(highest_order_stat(&t, n, 1.0).unwrap().0, 1.0);
        }
        assert!(highest_order_stat(&t, 3, 1.5).is_err());
    }

    #[test]
    fn conditional_density_examples() {
        let u = LinearDensity::uniform(1.0).unwrap();
        let h = conditional_order_stat_density(&u, 2, 1, 0.5, 0.25).unwrap();
        assert!((h - 2.0).abs() < 1e-12);
        let t = LinearDensity::triangle(1.0).unwrap();
        let h = conditional_order_stat_density(&t, 3, 2, 1.0, 0.5).unwrap();
        assert!((h - 1.125).abs() < 1e-12);
    }

    #[test]
    fn conditional_density_rejects_bad_arguments() {
        let u = LinearDensity::uniform(1.0).unwrap();
        assert!(conditional_order_stat_density(&u, 2, 1, 0.5, 0.6).is_err());
        assert!(conditional_order_stat_density(&u, 2, 1, 0.0, 0.0).is_err());
        assert!(conditional_order_stat_density(&u, 2, 3, 0.5, 0.1).is_err());
        assert!(conditional_order_stat_density(&u, 2, 0, 0.5, 0.1).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_in_range() {
        let t = LinearDensity::triangle(2.0).unwrap();
        let a = sample_values(&t, 1000, 42);
        assert_eq!(a, sample_values(&t, 1000, 42));
        assert_ne!(a, sample_values(&t, 1000, 43));
        assert!(a.iter().all(|&x| x > 0.0 && x <= 2.0));
    }

    #[test]
    fn sample_means() {
        let u = LinearDensity::uniform(1.0).unwrap();
        let xs = sample_values(&u, 1_000_000, 1);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.5).abs() < 0.002, "{mean}");
        let t = LinearDensity::triangle(1.0).unwrap();
        let xs = sample_values(&t, 1_000_000, 2);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 2.0 / 3.0).abs() < 0.002, "{mean}");
    }

    #[test]
    fn exact_polynomials_match_floats() {
        let d = LinearDensity::linear(1.0, 1.0).unwrap();
        assert!((d.exact_cdf().eval_f64(0.3) - d.cdf(0.3)).abs() < 1e-15);
        assert!((d.exact_pdf().eval_f64(0.3) - d.pdf(0.3)).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn inverse_cdf_round_trip(a in -1.9f64..2.0, omega in 0.1f64..5.0, u in 0.0f64..=1.0) {
            let a = a / (omega * omega);
            let d = LinearDensity::linear(a, omega).unwrap();
            let x = d.inverse_cdf(u);
            prop_assert!(d.contains(x));
            prop_assert!((d.cdf(x) - u).abs() <= 1e-12, "F({}) = {} vs {}", x, d.cdf(x), u);
        }

        #[test]
        fn normalized_after_construction(a in -1.9f64..2.0, omega in 0.1f64..5.0) {
            let d = LinearDensity::linear(a / (omega * omega), omega).unwrap();
            prop_assert!((d.cdf(d.omega()) - 1.0).abs() <= NORMALIZATION_TOLERANCE);
            prop_assert_eq!(d.cdf(0.0), 0.0);
        }
    }
}
