//! Privacy accounting and e-value merging: quadratic composition over a
//! budget ledger, weighted averaging under arbitrary dependence, and the
//! sharp product rule for independent datasets.

use crate::error::Error;
use crate::mechanism::{PrivacyBudget, PrivateEValue, Provenance, Sensitivity};

/// Budgets of the mechanisms composed so far.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BudgetLedger {
    components: Vec<PrivacyBudget>,
}

impl BudgetLedger {
    pub fn new() -> Self {
        BudgetLedger::default()
    }

    pub fn from_budgets(components: Vec<PrivacyBudget>) -> Self {
        BudgetLedger { components }
    }

    pub fn push(&mut self, budget: PrivacyBudget) {
        self.components.push(budget);
    }

    pub fn components(&self) -> &[PrivacyBudget] {
        &self.components
    }
}

/// Total budget √(Σ μ_k²) of the ledger's components.
pub fn compose(ledger: &BudgetLedger) -> Result<PrivacyBudget, Error> {
    if ledger.components.is_empty() {
        return Err(Error::EmptyInput("compose"));
    }
    let total = ledger
        .components
        .iter()
        .map(|b| b.mu() * b.mu())
        .sum::<f64>()
        .sqrt();
    PrivacyBudget::new(total)
}

/// Convex combination Σ λ_k E_k of K same-budget private e-values.
///
/// Valid under arbitrary dependence; the result carries budget √K·μ.
pub fn weighted_average(es: &[PrivateEValue], weights: &[f64]) -> Result<PrivateEValue, Error> {
    if es.is_empty() {
        return Err(Error::EmptyInput("weighted_average"));
    }
    if es.len() != weights.len() {
        return Err(Error::domain(format!(
            "{} values but {} weights",
            es.len(),
            weights.len()
        )));
    }
    if weights
        .iter()
        .any(|&w| w.is_nan() || w < 0.0 || !w.is_finite())
    {
        return Err(Error::domain("weights must be nonnegative and finite"));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::WeightSum { sum });
    }
    let mu = es[0].budget;
    if es.iter().any(|e| e.budget != mu) {
        return Err(Error::MixedBudgets);
    }
    let value = es
        .iter()
        .zip(weights)
        .map(|(e, &w)| w * e.value)
        .sum::<f64>();
    let k = es.len() as f64;
    let max_delta = es
        .iter()
        .map(|e| e.sensitivity.delta())
        .fold(0.0f64, f64::max);
    Ok(PrivateEValue {
        value,
        budget: PrivacyBudget::new(k.sqrt() * mu.mu())?,
        sensitivity: Sensitivity::new(max_delta)?,
        seed_path: Vec::new(),
        provenance: Provenance::WeightedAverage,
    })
}

/// Product Π E_k of canonical private e-values from disjoint datasets.
///
/// Disjointness of the source datasets is invisible to the library; the
/// caller's assertion is recorded in the output provenance. The product
/// carries the sharpened budget μ·max Δ_k / √(Σ Δ_k²) ≤ μ.
pub fn independent_product(
    es: &[PrivateEValue],
    deltas: &[Sensitivity],
    mu: PrivacyBudget,
) -> Result<PrivateEValue, Error> {
    if es.is_empty() {
        return Err(Error::EmptyInput("independent_product"));
    }
    if es.len() != deltas.len() {
        return Err(Error::domain(format!(
            "{} values but {} sensitivities",
            es.len(),
            deltas.len()
        )));
    }
    for (e, &d) in es.iter().zip(deltas) {
        if e.provenance != Provenance::Canonical {
            return Err(Error::NonCanonicalProvenance);
        }
        if e.budget != mu {
            return Err(Error::BudgetMismatch {
                expected: mu.mu(),
                got: e.budget.mu(),
            });
        }
        if e.sensitivity != d {
            return Err(Error::SensitivityMismatch {
                expected: d.delta(),
                got: e.sensitivity.delta(),
            });
        }
    }
    let value = es.iter().map(|e| e.value).product::<f64>();
    let max_delta = deltas.iter().map(|d| d.delta()).fold(0.0f64, f64::max);
    let norm = deltas
        .iter()
        .map(|d| d.delta() * d.delta())
        .sum::<f64>()
        .sqrt();
    if norm == 0.0 {
        return Err(Error::domain(
            "independent_product needs at least one positive sensitivity",
        ));
    }
    let mu_prod = mu.mu() * max_delta / norm;
    Ok(PrivateEValue {
        value,
        budget: PrivacyBudget::new(mu_prod)?,
        sensitivity: Sensitivity::new(max_delta)?,
        seed_path: Vec::new(),
        provenance: Provenance::IndependentProduct {
            sources_asserted_disjoint: true,
        },
    })
}
