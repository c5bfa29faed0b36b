//! Sharded, seed-deterministic auction simulation.
//!
//! The sample stream is cut into shards of [`SHARD_SIZE`] draws. Shard `i`
//! uses ChaCha8 seeded with `seed` on stream `i`, so every shard is
//! reproducible on its own; shard statistics are merged in shard order.
//! Results are therefore bit-identical however many threads run the shards.
//!
//! Ties between continuous draws have probability zero. When they do occur
//! the lowest-index bidder wins; the bidder under study has the highest
//! index, so it wins only when every opponent value is strictly below its own.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{AuctionConfig, LinearDensity};
use crate::equilibrium::BidFunction;
use crate::{Error, Result};

pub const SHARD_SIZE: u64 = 1 << 16;

/// Monte Carlo mean with its standard error `s / √samples`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloResult {
    pub estimate: f64,
    pub standard_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl MonteCarloResult {
    /// `|estimate - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.estimate - target).abs();
        if self.standard_error > 0.0 {
            diff / self.standard_error
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    /// `|Δ| / √(se₁² + se₂²)` for two independent estimates.
    pub fn combined_z_score(&self, other: &MonteCarloResult) -> f64 {
        let diff = (self.estimate - other.estimate).abs();
        let se = self.standard_error.hypot(other.standard_error);
        if se > 0.0 {
            diff / se
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Welford running moments.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.count += 1;
        let delta = v - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (v - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Moments { count, mean, m2 }
    }
}

fn run_sharded<F>(samples: u64, seed: u64, draws_per_sample: usize, sample: F) -> MonteCarloResult
where
    F: Fn(&mut [f64]) -> f64 + Sync,
{
    let shards = samples.div_ceil(SHARD_SIZE);
    let partials: Vec<Moments> = (0..shards)
        .into_par_iter()
        .map_init(
            || vec![0.0; draws_per_sample],
            |buf, shard| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(shard);
                let len = SHARD_SIZE.min(samples - shard * SHARD_SIZE);
                let mut moments = Moments::default();
                for _ in 0..len {
                    for v in buf.iter_mut() {
                        *v = rng_draw(&mut rng);
                    }
                    moments.push(sample(buf));
                }
                moments
            },
        )
        .collect();
    let total = partials.into_iter().fold(Moments::default(), Moments::merge);
    let standard_error = if total.count > 1 {
        (total.m2 / (total.count - 1) as f64).sqrt() / (total.count as f64).sqrt()
    } else {
        0.0
    };
    MonteCarloResult {
        estimate: total.mean,
        standard_error,
        samples,
        seed,
    }
}

// Uniform(0, 1] driver; values are mapped through the inverse CDF by callers.
fn rng_draw(rng: &mut ChaCha8Rng) -> f64 {
    use rand::Rng;
    1.0 - rng.random::<f64>()
}

fn check_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be ≥ 1".into()));
    }
    Ok(())
}

/// Simulated expected payment `m(x) = G(x)·E[β(Y_{k-1}) | Y_1 < x]` of a
/// bidder with value `x`: each sample draws the `n - 1` opponent values from
/// `F` truncated to `[0, x]` (the event that the bidder wins) and records the
/// bid of the (k-1)-th highest; the mean is scaled by `G(x) = F(x)^{n-1}`.
///
/// Conditioning on the win keeps every sample informative when `G(x)` is
/// tiny, where recording 0 for lost auctions would see no wins at all.
pub fn monte_carlo_expected_payment(bid: &BidFunction, x: f64, samples: u64, seed: u64) -> Result<MonteCarloResult> {
    check_samples(samples)?;
    let dist = *bid.dist();
    if !(x > 0.0 && x <= dist.omega()) {
        return Err(Error::OutOfDomain {
            name: "x",
            value: x,
            domain: format!("(0, {}]", dist.omega()),
        });
    }
    let AuctionConfig { n, k } = bid.config();
    // Surface evaluation errors before entering the hot loop.
    bid.eval(x)?;
    let fx = dist.cdf(x);
    let win = fx.powi(n as i32 - 1);
    let rank = (k - 2) as usize;
    let conditional = run_sharded(samples, seed, (n - 1) as usize, |u| {
        for v in u.iter_mut() {
            *v = dist.inverse_cdf(*v * fx).min(x);
        }
        let (_, y, _) = u.select_nth_unstable_by(rank, |p, q| q.total_cmp(p));
        bid.eval_in_support(*y).unwrap_or(f64::NAN)
    });
    Ok(MonteCarloResult {
        estimate: win * conditional.estimate,
        standard_error: win * conditional.standard_error,
        ..conditional
    })
}

/// Simulated seller revenue: draw `n` values, every bidder bids `β(v)`, and
/// the winner pays the k-th highest bid.
pub fn expected_revenue(bid: &BidFunction, samples: u64, seed: u64) -> Result<MonteCarloResult> {
    check_samples(samples)?;
    let dist = *bid.dist();
    let AuctionConfig { n, k } = bid.config();
    let rank = (k - 1) as usize;
    Ok(run_sharded(samples, seed, n as usize, |u| {
        for v in u.iter_mut() {
            *v = bid.eval_in_support(dist.inverse_cdf(*v)).unwrap_or(f64::NAN);
        }
        let (_, price, _) = u.select_nth_unstable_by(rank, |p, q| q.total_cmp(p));
        *price
    }))
}

/// Equilibrium revenue for every `k = 2..=n`, each with its own seed
/// `seed + k` so the estimates are independent.
pub fn revenue_across_k(dist: &LinearDensity, n: u32, samples: u64, seed: u64) -> Result<Vec<(u32, MonteCarloResult)>> {
    (2..=n)
        .map(|k| {
            let bid = BidFunction::equilibrium(*dist, AuctionConfig::new(n, k)?)?;
            Ok((k, expected_revenue(&bid, samples, seed.wrapping_add(k as u64))?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::distr::Distribution;

    fn uniform() -> LinearDensity {
        LinearDensity::uniform(1.0).unwrap()
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let values: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut whole = Moments::default();
        values.iter().for_each(|&v| whole.push(v));
        let (a, b) = values.split_at(313);
        let mut left = Moments::default();
        let mut right = Moments::default();
        a.iter().for_each(|&v| left.push(v));
        b.iter().for_each(|&v| right.push(v));
        let merged = left.merge(right);
        assert_eq!(merged.count, whole.count);
        assert!((merged.mean - whole.mean).abs() < 1e-12);
        assert!((merged.m2 - whole.m2).abs() < 1e-9 * whole.m2);
    }

    #[test]
    fn draws_match_distribution_sampler() {
        let t = LinearDensity::triangle(1.0).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(5);
        let mut r2 = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            assert_eq!(t.inverse_cdf(rng_draw(&mut r1)), t.sample(&mut r2));
        }
    }

    #[test]
    fn second_price_payment_and_revenue() {
        let b = BidFunction::second_price(uniform(), 3).unwrap();
        let r = monte_carlo_expected_payment(&b, 1.0, 1_000_000, 11).unwrap();
        assert!(r.z_score(2.0 / 3.0) < 3.0, "{r:?}");
        let r = expected_revenue(&b, 1_000_000, 12).unwrap();
        assert!(r.z_score(0.5) < 3.0, "{r:?}");
    }

    #[test]
    fn tiny_value_still_resolves_its_payment() {
        // Win probability 1e-12; the payment is 4x^5/5.
        let b = BidFunction::second_price(uniform(), 5).unwrap();
        let r = monte_carlo_expected_payment(&b, 1e-3, 10_000, 1).unwrap();
        assert!(r.standard_error > 0.0);
        assert!(r.z_score(0.8e-15) < 4.0, "{r:?}");
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let b = BidFunction::equilibrium(uniform(), AuctionConfig::new(5, 4).unwrap()).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| expected_revenue(&b, 300_000, 99).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(4));
        assert_eq!(one.estimate.to_bits(), run(3).estimate.to_bits());
    }

    #[test]
    fn rejects_bad_inputs() {
        let b = BidFunction::second_price(uniform(), 3).unwrap();
        assert!(monte_carlo_expected_payment(&b, 0.0, 10, 1).is_err());
        assert!(monte_carlo_expected_payment(&b, 0.5, 0, 1).is_err());
        assert!(expected_revenue(&b, 0, 1).is_err());
    }
}
