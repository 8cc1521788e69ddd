//! The canonical μ-GDP e-value mechanism: multiplicative perturbation
//! E·e^(−ξ) with ξ ~ N(Δ²/(2μ²), Δ²/μ²), which exhausts the budget while
//! keeping the unit-expectation bound (E[e^(−ξ)] = 1 exactly).

use crate::error::Error;
use crate::rng::RngSeed;

/// GDP privacy parameter μ > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyBudget(f64);

impl PrivacyBudget {
    pub fn new(mu: f64) -> Result<Self, Error> {
        if mu > 0.0 && mu.is_finite() {
            Ok(PrivacyBudget(mu))
        } else {
            Err(Error::domain(format!(
                "privacy budget mu must be positive and finite, got {mu}"
            )))
        }
    }

    pub fn mu(self) -> f64 {
        self.0
    }

    /// Budget per step when evenly split across `k` composed steps.
    pub fn split(self, k: usize) -> Result<Self, Error> {
        if k == 0 {
            return Err(Error::domain("cannot split a budget over zero steps"));
        }
        PrivacyBudget::new(self.0 / (k as f64).sqrt())
    }
}

/// Log-scale sensitivity Δ = sup |log E(D) − log E(D′)| over neighbors, Δ ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivity(f64);

impl Sensitivity {
    pub fn new(delta: f64) -> Result<Self, Error> {
        if delta >= 0.0 && delta.is_finite() {
            Ok(Sensitivity(delta))
        } else {
            Err(Error::domain(format!(
                "sensitivity delta must be nonnegative and finite, got {delta}"
            )))
        }
    }

    pub fn delta(self) -> f64 {
        self.0
    }
}

/// Parameters of the canonical log-scale noise: ξ ~ N(τ, σ²) with
/// τ = Δ²/(2μ²) and σ² = Δ²/μ², so exp(−τ + σ²/2) = 1 exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub tau: f64,
    pub sigma2: f64,
}

impl NoiseSpec {
    pub fn sd(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

/// Canonical noise parameters for the pair (Δ, μ).
pub fn noise_spec(delta: Sensitivity, mu: PrivacyBudget) -> NoiseSpec {
    let ratio = delta.delta() / mu.mu();
    NoiseSpec {
        tau: 0.5 * ratio * ratio,
        sigma2: ratio * ratio,
    }
}

/// A nonnegative test statistic. Validity (mean at most 1 under the null) is a
/// property of the generating process, not checkable from one value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EValue(f64);

impl EValue {
    pub fn new(value: f64) -> Result<Self, Error> {
        if value >= 0.0 && !value.is_nan() {
            Ok(EValue(value))
        } else {
            Err(Error::domain(format!(
                "e-value must be nonnegative, got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// How a private e-value was produced; aggregation rules depend on it.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Direct output of the canonical mechanism.
    Canonical,
    /// Convex combination of same-budget private values.
    WeightedAverage,
    /// Product across datasets the caller asserted to be disjoint.
    IndependentProduct { sources_asserted_disjoint: bool },
}

/// A privatized e-value together with the budget and noise provenance
/// needed to replay or further aggregate it.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivateEValue {
    pub value: f64,
    pub budget: PrivacyBudget,
    pub sensitivity: Sensitivity,
    /// Substream path of the noise draw, for replay.
    pub seed_path: Vec<u64>,
    pub provenance: Provenance,
}

/// Apply the canonical mechanism to one e-value.
///
/// Δ = 0 is the analytically forced no-noise limit and passes the value
/// through unchanged. Deterministic given the seed.
pub fn privatize(
    e: EValue,
    delta: Sensitivity,
    mu: PrivacyBudget,
    seed: &RngSeed,
) -> PrivateEValue {
    let spec = noise_spec(delta, mu);
    let value = if delta.delta() == 0.0 {
        e.value()
    } else {
        let xi = seed.rng().normal(spec.tau, spec.sd());
        e.value() * (-xi).exp()
    };
    PrivateEValue {
        value,
        budget: mu,
        sensitivity: delta,
        seed_path: seed.path().to_vec(),
        provenance: Provenance::Canonical,
    }
}

/// Privatize all m coordinates simultaneously under one total budget μ.
///
/// Coordinate i gets independent ξ_i ~ N(mΔ²/(2μ²), mΔ²/μ²), i.e. the
/// canonical mechanism at per-coordinate budget μ/√m.
pub fn all_noisy_privatize(
    es: &[EValue],
    delta: Sensitivity,
    mu: PrivacyBudget,
    seed: &RngSeed,
) -> Result<Vec<PrivateEValue>, Error> {
    if es.is_empty() {
        return Err(Error::EmptyInput("all_noisy_privatize"));
    }
    let per_coordinate = mu.split(es.len())?;
    Ok(es
        .iter()
        .enumerate()
        .map(|(i, &e)| privatize(e, delta, per_coordinate, &seed.child(i as u64)))
        .collect())
}
