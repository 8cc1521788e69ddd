//! Independent oracles for the normal kernel: a scaled-series erf plus a
//! continued-fraction tail, and fixed-bracket bisection for the inverse
//! problems. These share no code path with the library's minimax/Acklam
//! implementations.

use gdp_evalues::normal::{
    gdp_tradeoff, mills_ratio, normal_cdf, normal_pdf, normal_quantile, solve_z_star,
};
use proptest::prelude::*;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

fn oracle_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// erf via the all-positive-terms series 2x·e^{-x²}/√π · Σ (2x²)^n/(2n+1)!!,
/// free of the alternating-series cancellation.
fn oracle_erf(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x * 2.0 / std::f64::consts::PI.sqrt() * (-x2).exp();
    let mut sum = 0.0;
    for n in 0..500 {
        sum += term;
        term *= 2.0 * x2 / (2.0 * n as f64 + 3.0);
        if term.abs() < 1e-20 * sum.abs() {
            break;
        }
    }
    sum
}

/// Upper-tail Mills ratio denominator x + CF(x), so that
/// 1 − Φ(x) = φ(x)/(x + CF(x)). Converges for x ≥ 2.
fn oracle_tail_denominator(x: f64) -> f64 {
    let mut f = 0.0;
    for k in (1..=400u32).rev() {
        f = f64::from(k) / (x + f);
    }
    x + f
}

fn oracle_phi(z: f64) -> f64 {
    if z < -2.0 {
        oracle_pdf(z) / oracle_tail_denominator(-z)
    } else if z > 2.0 {
        1.0 - oracle_pdf(z) / oracle_tail_denominator(z)
    } else {
        0.5 + 0.5 * oracle_erf(z / SQRT_2)
    }
}

fn oracle_mills(z: f64) -> f64 {
    if z <= -2.0 {
        oracle_tail_denominator(-z)
    } else {
        oracle_pdf(z) / oracle_phi(z)
    }
}

/// Bisection of a monotone function over a fixed bracket.
fn bisect(mut lo: f64, mut hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    // assumes f(lo) < 0 < f(hi) or the reverse; orient so f(lo) < 0
    let increasing = f(hi) > f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        let below = if increasing { v < 0.0 } else { v > 0.0 };
        if below {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn cdf_matches_oracle_across_the_range() {
    let mut worst = 0.0f64;
    let mut i = -800;
    while i <= 800 {
        let z = i as f64 / 100.0;
        let err = (normal_cdf(z) - oracle_phi(z)).abs();
        worst = worst.max(err);
        i += 1;
    }
    assert!(worst <= 1e-15, "worst |cdf - oracle| = {worst:e}");
}

#[test]
fn cdf_deep_tail_relative_accuracy() {
    // Inverse-CDF sampling never reaches past |z| ~ 9.5; a few hundred ulp
    // of slack deep in the tail is inconsequential there.
    for &z in &[-10.0, -15.0, -20.0, -30.0] {
        let a = normal_cdf(z);
        let b = oracle_phi(z);
        assert!((a - b).abs() <= 1e-12 * b, "z={z} a={a:e} b={b:e}");
    }
}

#[test]
fn pdf_matches_direct_formula() {
    let mut i = -600;
    while i <= 600 {
        let z = i as f64 / 50.0;
        assert!((normal_pdf(z) - oracle_pdf(z)).abs() <= 1e-17 + 1e-15 * oracle_pdf(z));
        i += 1;
    }
}

#[test]
fn quantile_matches_bisection_oracle() {
    for i in 1..100 {
        let p = i as f64 / 100.0;
        let z = normal_quantile(p).unwrap();
        let z_oracle = bisect(-40.0, 40.0, |x| oracle_phi(x) - p);
        assert!(
            (z - z_oracle).abs() <= 1e-12,
            "p={p} z={z} oracle={z_oracle}"
        );
    }
    // Frozen spec example.
    let z = normal_quantile(0.975).unwrap();
    let z_oracle = bisect(-40.0, 40.0, |x| oracle_phi(x) - 0.975);
    assert!((z - 1.959_963_984_540_054).abs() <= 1e-12);
    assert!((z_oracle - 1.959_963_984_540_054).abs() <= 1e-10);
}

#[test]
fn mills_matches_oracle_including_tail_switch() {
    let mut i = -2500;
    while i <= 1000 {
        let z = i as f64 / 100.0;
        let h = mills_ratio(z);
        let o = oracle_mills(z);
        assert!((h - o).abs() <= 1e-12 * o.max(1.0), "z={z} h={h} o={o}");
        i += 7;
    }
}

#[test]
fn z_star_matches_independent_bisection() {
    // h is decreasing, so solve h(z) = sigma by bisection on the oracle.
    for &sigma in &[0.01, 0.1, 0.5, 0.797, 1.0, 2.0, 5.0] {
        let z = solve_z_star(sigma).unwrap();
        let z_oracle = bisect(-35.0, 35.0, |x| sigma - oracle_mills(x));
        assert!(
            (z - z_oracle).abs() <= 1e-9 * z_oracle.abs().max(1.0),
            "sigma={sigma} z={z} oracle={z_oracle}"
        );
        assert!((mills_ratio(z) - sigma).abs() <= 1e-12 * sigma.max(1.0));
    }
    // Frozen spec example at its stated tolerance.
    assert!((solve_z_star(0.1).unwrap() - 1.6917).abs() <= 1e-3);
}

#[test]
fn gdp_curve_against_oracle_composition() {
    for &mu in &[0.1, 0.5, 1.0, 3.0] {
        for i in 1..40 {
            let alpha = i as f64 / 40.0;
            let g = gdp_tradeoff(alpha, mu).unwrap();
            let z = bisect(-40.0, 40.0, |x| oracle_phi(x) - (1.0 - alpha));
            let oracle = oracle_phi(z - mu);
            assert!((g - oracle).abs() <= 1e-11, "mu={mu} alpha={alpha}");
        }
    }
}

#[test]
fn quantile_round_trip_thousand_points() {
    // 1000 seeded random p in (1e-9, 1 - 1e-9).
    let mut rng = gdp_evalues::RngSeed::new(424_243).rng();
    for _ in 0..1000 {
        let p = 1e-9 + (1.0 - 2e-9) * rng.uniform();
        let z = normal_quantile(p).unwrap();
        assert!((normal_cdf(z) - p).abs() <= 1e-12, "p={p}");
    }
}

proptest! {
    #[test]
    fn quantile_round_trip(p in 1e-9f64..1.0) {
        prop_assume!(p < 1.0 - 1e-9);
        let z = normal_quantile(p).unwrap();
        prop_assert!((normal_cdf(z) - p).abs() <= 1e-12);
    }

    #[test]
    fn mills_strictly_decreasing(a in -30.0f64..30.0, gap in 1e-6f64..5.0) {
        let b = a + gap;
        prop_assert!(mills_ratio(a) > mills_ratio(b));
    }

    #[test]
    fn z_star_solves_and_signs(sigma in 1e-6f64..10.0) {
        let z = solve_z_star(sigma).unwrap();
        prop_assert!((mills_ratio(z) - sigma).abs() <= 1e-12 * sigma.max(1.0));
        let boundary = (2.0 / std::f64::consts::PI).sqrt();
        if sigma < boundary - 1e-9 {
            prop_assert!(z > 0.0);
        } else if sigma > boundary + 1e-9 {
            prop_assert!(z < 0.0);
        }
    }

    #[test]
    fn tradeoff_within_unit_square(alpha in 0.0f64..=1.0, mu in 0.0f64..5.0) {
        let g = gdp_tradeoff(alpha, mu).unwrap();
        prop_assert!((0.0..=1.0).contains(&g));
        prop_assert!(g <= 1.0 - alpha + 1e-12);
    }
}
