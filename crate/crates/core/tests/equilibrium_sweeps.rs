use kthprice_core::combinatorics::{bracket_applies, omega_bracket};
use kthprice_core::equilibrium::{
    bid_bounds_check, bid_from_psi, bid_kth_series, bid_kth_uniform, monotonicity_certificate, phi_ladder_check,
    psi_oracle_matches, triangle_slope,
};
use kthprice_core::{omega, AuctionConfig, BidFunction, BigRational, LinearDensity};
use num_traits::{FromPrimitive, Signed, ToPrimitive};
use proptest::prelude::*;

fn oracle_dists() -> Vec<LinearDensity> {
    vec![
        LinearDensity::uniform(1.0).unwrap(),
        LinearDensity::triangle(1.0).unwrap(),
        LinearDensity::linear(1.0, 1.0).unwrap(),
    ]
}

#[test]
fn series_matches_symbolic_ladder_up_to_eight_bidders() {
    for dist in oracle_dists() {
        for n in 3..=8 {
            for k in 3..=n {
                assert!(psi_oracle_matches(&dist, n, k).unwrap(), "n={n} k={k} a={}", dist.a());
            }
        }
    }
}

#[test]
fn phi_ladder_holds_up_to_seven_bidders() {
    for dist in [LinearDensity::uniform(1.0).unwrap(), LinearDensity::triangle(1.0).unwrap()] {
        for n in 3..=7 {
            for k in 3..=n {
                assert!(phi_ladder_check(&dist, n, k).unwrap(), "n={n} k={k}");
            }
        }
    }
}

#[test]
fn triangle_bids_are_increasing_and_bracketed_to_thirty() {
    let dist = LinearDensity::triangle(1.0).unwrap();
    for n in 3..=30 {
        for k in 3..=n {
            let bid = BidFunction::equilibrium(dist, AuctionConfig::new(n, k).unwrap()).unwrap();
            assert!(monotonicity_certificate(&bid, 10).unwrap().increasing);
            assert!(omega(n, k).unwrap().is_positive());
            if bracket_applies(n, k) {
                assert!(bid_bounds_check(n, k).unwrap(), "n={n} k={k}");
                let (lo, hi) = omega_bracket(n, k).unwrap();
                let w = omega(n, k).unwrap();
                assert!(lo <= w && w <= hi);
            }
        }
        assert_eq!(omega(n, 3).unwrap(), omega_bracket(n, 3).unwrap().0);
    }
}

#[test]
fn series_bids_are_increasing_for_linear_densities() {
    for a in [-1.5, -0.5, 0.5, 1.0, 1.9] {
        let dist = LinearDensity::linear(a, 1.0).unwrap();
        for n in 3..=12 {
            for k in 3..=n {
                let bid = BidFunction::series(dist, AuctionConfig::new(n, k).unwrap()).unwrap();
                assert!(monotonicity_certificate(&bid, 64).unwrap().increasing, "a={a} n={n} k={k}");
            }
        }
    }
}

#[test]
fn uniform_series_reduces_to_closed_form() {
    let dist = LinearDensity::uniform(1.0).unwrap();
    for n in 3..=10 {
        for k in 3..=n {
            let slope = 1.0 + (k - 2) as f64 / (n - k + 1) as f64;
            for i in 1..=20 {
                let x = i as f64 / 20.0;
                let series = bid_kth_series(&dist, n, k, x).unwrap();
                assert!((series - slope * x).abs() <= 1e-12, "n={n} k={k} x={x}");
                assert!((bid_kth_uniform(n, k, x).unwrap() - slope * x).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn triangle_slope_tabulated_values() {
    let q = |p: i64, d: i64| BigRational::new(p.into(), d.into());
    assert_eq!(triangle_slope(5, 4).unwrap(), q(35, 24));
    // Ω = θ_0/2 = 1/2 over binom(1, 1).
    assert_eq!(triangle_slope(3, 3).unwrap(), q(3, 2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn series_matches_symbolic_bid(a in -1.9f64..1.9, n in 3u32..8, dk in 0u32..5, x in 0.05f64..1.0) {
        let k = 3 + dk % (n - 2);
        let dist = LinearDensity::linear(a, 1.0).unwrap();
        let exact = bid_from_psi(&dist, n, k).unwrap();
        let want = exact.eval(&BigRational::from_f64(x).unwrap()).unwrap().to_f64().unwrap();
        let got = bid_kth_series(&dist, n, k, x).unwrap();
        prop_assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0), "{} vs {}", got, want);
    }
}
