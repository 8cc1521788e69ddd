//! Empirical privacy invariants: the canonical mechanism exhausts its
//! trade-off budget exactly, and validity survives privatization.

use gdp_evalues::mechanism::{noise_spec, privatize, EValue, PrivacyBudget, Sensitivity};
use gdp_evalues::normal::{gdp_tradeoff, normal_quantile};
use gdp_evalues::stats::{mean, proportion_se, standard_error};
use gdp_evalues::RngSeed;

/// Worst-case neighboring pair (log-shift exactly Δ): the empirical
/// trade-off of the privatized outputs matches G_μ pointwise.
#[test]
fn canonical_mechanism_exhausts_the_tradeoff_budget() {
    let n = 100_000u64;
    for (case, (d, m)) in [(0u64, (1.0, 1.0)), (1, (0.5, 0.25))] {
        let delta = Sensitivity::new(d).unwrap();
        let mu = PrivacyBudget::new(m).unwrap();
        let spec = noise_spec(delta, mu);
        let seed = RngSeed::new(42_000).child(case);
        // log outputs: null side -xi, shifted side d - xi
        let mut null_logs = Vec::with_capacity(n as usize);
        let mut alt_logs = Vec::with_capacity(n as usize);
        for i in 0..n {
            let mut rng = seed.stream(i);
            null_logs.push(-(spec.tau + spec.sd() * rng.standard_normal()));
            alt_logs.push(d - (spec.tau + spec.sd() * rng.standard_normal()));
        }
        for &alpha in &[0.05, 0.1, 0.25, 0.5] {
            // Likelihood-ratio test threshold from the known null law.
            let t = -spec.tau + spec.sd() * normal_quantile(1.0 - alpha).unwrap();
            let type1 = null_logs.iter().filter(|&&x| x >= t).count() as f64 / n as f64;
            let type2 = alt_logs.iter().filter(|&&x| x < t).count() as f64 / n as f64;
            let se1 = proportion_se(type1, n as usize);
            assert!(
                (type1 - alpha).abs() <= 3.0 * se1,
                "alpha={alpha} type1={type1}"
            );
            let g = gdp_tradeoff(alpha, m).unwrap();
            let se2 = proportion_se(type2, n as usize);
            assert!(
                (type2 - g).abs() <= 3.0 * se2,
                "delta={d} mu={m} alpha={alpha}: beta={type2} G_mu={g}"
            );
        }
    }
}

/// Null e-values with mean one keep mean at most one after privatization.
#[test]
fn privatization_preserves_validity() {
    let delta = Sensitivity::new(0.4).unwrap();
    let mu = PrivacyBudget::new(0.7).unwrap();
    let seed = RngSeed::new(43_000);
    let n = 100_000u64;
    let lambda = 1.3f64;
    let vals: Vec<f64> = (0..n)
        .map(|i| {
            let trial = seed.child(i);
            let z = trial.child(0).rng().standard_normal();
            let e = EValue::new((lambda * z - 0.5 * lambda * lambda).exp()).unwrap();
            privatize(e, delta, mu, &trial.child(1)).value
        })
        .collect();
    let m_hat = mean(&vals);
    let se = standard_error(&vals);
    assert!(m_hat <= 1.0 + 3.0 * se, "mean={m_hat} se={se}");
}
