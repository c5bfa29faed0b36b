//! Exact derivative ladders behind the equilibrium condition.
//!
//! With `ψ₀(x) = ∫₀ˣ y F^{n-2} f dy` and `ψ_{t+1} = ψ_t′/f`, the equilibrium
//! bid is `β_k = ψ_{k-1} / (C(n-2, k-2)·(k-2)!·F^{n-k})`. For linear
//! densities every integrand is a polynomial, so the whole ladder is built
//! over exact rational functions; no numerical differentiation is involved.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{triangle_slope, uniform_slope};
use crate::combinatorics::{binomial, rational, theta_table};
use crate::distributions::{AuctionConfig, LinearDensity};
use crate::poly::{Polynomial, RationalFunction};
use crate::{Error, Result};

fn factorial(m: u32) -> BigRational {
    BigRational::from_integer((1..=m as u64).fold(BigInt::one(), |acc, i| acc * i))
}

fn series_config(n: u32, k: u32) -> Result<AuctionConfig> {
    let config = AuctionConfig::new(n, k)?;
    if k < 3 {
        return Err(Error::InvalidConfig(format!("the ladder needs k ≥ 3, got {k}")));
    }
    Ok(config)
}

/// `ψ₀(x) = ∫₀ˣ y·F(y)^{n-2}·f(y) dy` as an exact polynomial.
pub fn psi_zero(dist: &LinearDensity, n: u32) -> Polynomial {
    let integrand = &(&Polynomial::x() * &dist.exact_cdf().pow(n - 2)) * &dist.exact_pdf();
    integrand.antiderivative()
}

/// `[ψ₀, ψ₁, …, ψ_steps]`.
pub fn psi_ladder(dist: &LinearDensity, n: u32, steps: u32) -> Vec<RationalFunction> {
    let f = dist.exact_pdf();
    let mut rungs = vec![RationalFunction::from(psi_zero(dist, n))];
    for _ in 0..steps {
        let next = rungs.last().unwrap().derivative().div_poly(&f);
        rungs.push(next);
    }
    rungs
}

/// `ψ_{k-1}` computed by climbing the ladder symbolically.
pub fn psi_ladder_oracle(dist: &LinearDensity, n: u32, k: u32) -> Result<RationalFunction> {
    series_config(n, k)?;
    Ok(psi_ladder(dist, n, k - 1).pop().unwrap())
}

/// `ψ_{k-1}` from its Catalan-series closed form:
/// `(k-2)!·[C(n-2, k-2)·x·F^{n-k} + Σ_ℓ (-1)^ℓ θ^k_ℓ a^ℓ F^{n-k+ℓ+1}/f^{2ℓ+1}]`.
pub fn psi_closed_form(dist: &LinearDensity, n: u32, k: u32) -> Result<RationalFunction> {
    let config = series_config(n, k)?;
    let table = theta_table(n, k)?;
    let big_f = dist.exact_cdf();
    let f = dist.exact_pdf();
    let a = dist.exact_a();

    let lead = (&Polynomial::x() * &big_f.pow(n - k)).scale(&config.payment_binomial());
    let mut total = RationalFunction::from(lead);
    let mut a_power = BigRational::one();
    for (l, theta) in table.entries.iter().enumerate() {
        let mut coeff = theta * &a_power;
        if l % 2 == 1 {
            coeff = -coeff;
        }
        let num = big_f.pow(n - k + l as u32 + 1).scale(&coeff);
        let den = f.pow(2 * l as u32 + 1);
        total = &total + &RationalFunction::new(num, den);
        a_power *= &a;
    }
    Ok(total.scale(&factorial(k - 2)))
}

/// Whether the symbolic ladder and the Catalan closed form agree as
/// rational functions (cross-multiplied, coefficient by coefficient).
pub fn psi_oracle_matches(dist: &LinearDensity, n: u32, k: u32) -> Result<bool> {
    let oracle = psi_ladder_oracle(dist, n, k)?;
    let closed = psi_closed_form(dist, n, k)?;
    Ok(oracle.same_function(&closed))
}

/// `β_k = ψ_{k-1} / (C(n-2, k-2)·(k-2)!·F^{n-k})` as an exact rational function.
pub fn bid_from_psi(dist: &LinearDensity, n: u32, k: u32) -> Result<RationalFunction> {
    let config = series_config(n, k)?;
    let psi = psi_ladder_oracle(dist, n, k)?;
    let norm = config.payment_binomial() * factorial(k - 2);
    let den = dist.exact_cdf().pow(n - k).scale(&norm);
    Ok(psi.div_poly(&den))
}

/// Exact linear equilibrium bid `s·x` for the uniform and triangle cases.
fn exact_linear_bid(dist: &LinearDensity, n: u32, k: u32) -> Result<Polynomial> {
    let slope = if dist.is_uniform() {
        uniform_slope(n, k)?
    } else if dist.is_triangle() {
        triangle_slope(n, k)?
    } else {
        return Err(Error::InvalidDistribution(format!(
            "the Φ ladder is built for uniform or triangle densities, got a = {}, b = {}",
            dist.a(),
            dist.b()
        )));
    };
    Ok(Polynomial::monomial(slope, 1))
}

struct PhiLadder {
    f: Polynomial,
    big_f: Polynomial,
    beta: Polynomial,
    /// `phis[t - 2] = Φ_t` for `t = 2..=k`.
    phis: Vec<Polynomial>,
}

fn build_phi_ladder(dist: &LinearDensity, n: u32, k: u32) -> Result<PhiLadder> {
    series_config(n, k)?;
    let beta = exact_linear_bid(dist, n, k)?;
    let big_f = dist.exact_cdf();
    let f = dist.exact_pdf();
    // γ_ℓ(x) = ∫₀ˣ β F^{n-k+ℓ} f dy, ℓ = 0..=k-2
    let gammas: Vec<Polynomial> = (0..=k - 2)
        .map(|l| (&(&beta * &big_f.pow(n - k + l)) * &f).antiderivative())
        .collect();
    let phis = (2..=k)
        .map(|t| {
            (0..=k - t).fold(Polynomial::zero(), |acc, l| {
                let mut weight = rational(binomial((k - t) as u64, l as u64));
                if l % 2 == 1 {
                    weight = -weight;
                }
                let term = (&big_f.pow(k - t - l) * &gammas[l as usize]).scale(&weight);
                &acc + &term
            })
        })
        .collect();
    Ok(PhiLadder { f, big_f, beta, phis })
}

/// Residuals that vanish identically when the Φ ladder is consistent:
/// `Φ_t′ - (k-t)·f·Φ_{t+1}` for `t = 2..k-1`, then
/// `φ_{k-1} - (k-2)!·β_k·F^{n-k}` where `φ₀ = Φ₂` and `φ_{j+1} = φ_j′/f`.
///
/// Only uniform and triangle densities are accepted, where `β_k` is linear
/// with an exact rational slope.
pub fn phi_ladder_residuals(dist: &LinearDensity, n: u32, k: u32) -> Result<Vec<(String, RationalFunction)>> {
    let ladder = build_phi_ladder(dist, n, k)?;
    let mut residuals = Vec::new();
    for t in 2..k {
        let idx = (t - 2) as usize;
        let lhs = ladder.phis[idx].derivative();
        let rhs = (&ladder.f * &ladder.phis[idx + 1]).scale(&BigRational::from_integer(BigInt::from(k - t)));
        residuals.push((format!("phi_step_t{t}"), RationalFunction::from(&lhs - &rhs)));
    }
    let mut phi = RationalFunction::from(ladder.phis[0].clone());
    for _ in 0..k - 1 {
        phi = phi.derivative().div_poly(&ladder.f);
    }
    let target = (&ladder.beta * &ladder.big_f.pow(n - k)).scale(&factorial(k - 2));
    residuals.push(("phi_top_rung".to_string(), &phi - &RationalFunction::from(target)));
    Ok(residuals)
}

/// True iff every residual of [`phi_ladder_residuals`] is identically zero.
pub fn phi_ladder_check(dist: &LinearDensity, n: u32, k: u32) -> Result<bool> {
    Ok(phi_ladder_residuals(dist, n, k)?.iter().all(|(_, r)| r.is_zero()))
}

/// `C(n-2, k-2)·φ₀ - ψ₀` with `φ₀ = Φ₂` built from the exact linear bid:
/// the equilibrium integral equation itself, which must vanish identically.
pub fn integral_equation_residual(dist: &LinearDensity, n: u32, k: u32) -> Result<Polynomial> {
    let ladder = build_phi_ladder(dist, n, k)?;
    let config = AuctionConfig::new(n, k)?;
    Ok(&ladder.phis[0].scale(&config.payment_binomial()) - &psi_zero(dist, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn triangle_ladder_by_hand() {
        let t = LinearDensity::triangle(1.0).unwrap();
        let rungs = psi_ladder(&t, 3, 2);
        // ψ₀ = a²x⁵/10, ψ₁ = a x³/2, ψ₂ = 3x/2 with a = 2
        assert_eq!(rungs[0], Polynomial::monomial(q(2, 5), 5).into());
        assert_eq!(rungs[1], Polynomial::monomial(q(1, 1), 3).into());
        assert_eq!(rungs[2], Polynomial::monomial(q(3, 2), 1).into());
        let beta = bid_from_psi(&t, 3, 3).unwrap();
        assert_eq!(beta, Polynomial::monomial(q(3, 2), 1).into());
    }

    #[test]
    fn uniform_ladder_by_hand() {
        let u = LinearDensity::uniform(1.0).unwrap();
        let rungs = psi_ladder(&u, 3, 2);
        assert_eq!(rungs[0], Polynomial::monomial(q(1, 3), 3).into());
        assert_eq!(rungs[1], Polynomial::monomial(q(1, 1), 2).into());
        assert_eq!(rungs[2], Polynomial::monomial(q(2, 1), 1).into());
        assert_eq!(bid_from_psi(&u, 3, 3).unwrap(), Polynomial::monomial(q(2, 1), 1).into());
    }

    #[test]
    fn psi_two_general_form() {
        // ψ₂ = (n-2)·x·F^{n-3} + F^{n-2}/f
        for dist in [
            LinearDensity::linear(1.0, 1.0).unwrap(),
            LinearDensity::linear(-0.3, 2.0).unwrap(),
            LinearDensity::triangle(1.5).unwrap(),
        ] {
            for n in 3..=7 {
                let big_f = dist.exact_cdf();
                let f = dist.exact_pdf();
                let first = (&Polynomial::x() * &big_f.pow(n - 3)).scale(&q(n as i64 - 2, 1));
                let expected = &RationalFunction::from(first) + &RationalFunction::new(big_f.pow(n - 2), f);
                assert!(psi_ladder_oracle(&dist, n, 3).unwrap().same_function(&expected), "n = {n}");
            }
        }
    }

    #[test]
    fn oracle_matches_closed_form_small() {
        for dist in [
            LinearDensity::uniform(1.0).unwrap(),
            LinearDensity::triangle(1.0).unwrap(),
            LinearDensity::linear(1.0, 1.0).unwrap(),
        ] {
            for n in 3..=6 {
                for k in 3..=n {
                    assert!(psi_oracle_matches(&dist, n, k).unwrap(), "{dist:?} n = {n} k = {k}");
                }
            }
        }
    }

    #[test]
    fn oracle_detects_a_perturbed_closed_form() {
        let d = LinearDensity::linear(1.0, 1.0).unwrap();
        let oracle = psi_ladder_oracle(&d, 6, 5).unwrap();
        let closed = psi_closed_form(&d, 6, 5).unwrap();
        let bumped = &closed + &RationalFunction::new(Polynomial::one(), d.exact_pdf().pow(7));
        assert!(!oracle.same_function(&bumped));
    }

    #[test]
    fn phi_ladder_examples() {
        assert!(phi_ladder_check(&LinearDensity::triangle(1.0).unwrap(), 3, 3).unwrap());
        assert!(phi_ladder_check(&LinearDensity::uniform(1.0).unwrap(), 5, 4).unwrap());
        assert!(phi_ladder_check(&LinearDensity::triangle(1.0).unwrap(), 6, 5).unwrap());
        assert!(phi_ladder_check(&LinearDensity::linear(1.0, 1.0).unwrap(), 5, 4).is_err());
    }

    #[test]
    fn integral_equation_holds_exactly() {
        for dist in [LinearDensity::uniform(2.0).unwrap(), LinearDensity::triangle(0.5).unwrap()] {
            for n in 3..=7 {
                for k in 3..=n {
                    assert!(integral_equation_residual(&dist, n, k).unwrap().is_zero(), "n = {n}, k = {k}");
                }
            }
        }
    }

    #[test]
    fn rejects_k_below_three() {
        let u = LinearDensity::uniform(1.0).unwrap();
        assert!(psi_ladder_oracle(&u, 4, 2).is_err());
        assert!(psi_closed_form(&u, 3, 4).is_err());
        assert!(phi_ladder_check(&u, 4, 2).is_err());
    }
}
