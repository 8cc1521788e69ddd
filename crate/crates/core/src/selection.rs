//! The Report Noisy Max extractor: Gumbel-perturbed argmax over log
//! e-values, then canonical Gaussian release of the winner's value.
//!
//! Gumbel noise keeps the selection step stable as the candidate pool grows
//! (max-stability), and the pure-DP level ε is chosen so the selection's
//! trade-off envelope dominates G_{μ/√2}; composed with the μ/√2 release,
//! one extraction costs μ in total.

use crate::error::Error;
use crate::mechanism::{privatize, EValue, PrivacyBudget, PrivateEValue, Sensitivity};
use crate::normal::normal_cdf;
use crate::rng::{RngSeed, Substream};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Pure-DP parameter of the Gumbel selection step for total budget μ:
/// ε = log(Φ(μ/(2√2)) / Φ(−μ/(2√2))). Increasing in μ.
pub fn selection_epsilon(mu: PrivacyBudget) -> f64 {
    let x = mu.mu() / (2.0 * SQRT_2);
    (normal_cdf(x) / normal_cdf(-x)).ln()
}

/// How one extraction's budget μ splits between selection and release.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionBudgetSplit {
    /// Pure-DP level of the Gumbel argmax.
    pub epsilon: f64,
    /// Gumbel scale β = 2Δ/ε.
    pub gumbel_scale: f64,
    /// Release noise mean Δ²/μ² (canonical at budget μ/√2).
    pub release_tau: f64,
    /// Release noise variance 2Δ²/μ².
    pub release_var: f64,
}

impl SelectionBudgetSplit {
    pub fn new(delta: Sensitivity, mu: PrivacyBudget) -> Result<Self, Error> {
        if delta.delta() <= 0.0 {
            return Err(Error::domain(
                "selection requires delta > 0 for a finite Gumbel scale",
            ));
        }
        let epsilon = selection_epsilon(mu);
        let d = delta.delta();
        let m = mu.mu();
        Ok(SelectionBudgetSplit {
            epsilon,
            gumbel_scale: 2.0 * d / epsilon,
            release_tau: d * d / (m * m),
            release_var: 2.0 * d * d / (m * m),
        })
    }
}

/// One Gumbel(0, scale) draw via the inverse CDF −scale·log(−log U).
///
/// The substream uniform already lives strictly inside (0, 1), so the double
/// logarithm cannot overflow.
pub fn gumbel_sample(scale: f64, rng: &mut Substream) -> Result<f64, Error> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::domain(format!(
            "gumbel scale must be positive, got {scale}"
        )));
    }
    Ok(gumbel_unchecked(scale, rng))
}

#[inline]
pub(crate) fn gumbel_unchecked(scale: f64, rng: &mut Substream) -> f64 {
    -scale * (-rng.uniform().ln()).ln()
}

/// The winning hypothesis and its privatized value.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub index: usize,
    pub private_value: PrivateEValue,
}

/// Select argmax of log E_i + Gumbel noise over the active set, then release
/// the winner under canonical Gaussian noise at budget μ/√2. The whole
/// extraction satisfies μ-GDP.
///
/// Zero e-values score −∞ and can only win when every active value is zero,
/// in which case the lowest active index wins and the release is 0. Finite
/// ties also break to the lowest index.
pub fn report_noisy_max(
    active: &[usize],
    es: &[EValue],
    delta: Sensitivity,
    mu: PrivacyBudget,
    seed: &RngSeed,
) -> Result<Extraction, Error> {
    if active.is_empty() {
        return Err(Error::EmptyInput("report_noisy_max"));
    }
    if let Some(&bad) = active.iter().find(|&&i| i >= es.len()) {
        return Err(Error::domain(format!(
            "active index {bad} out of range for {} e-values",
            es.len()
        )));
    }
    let split = SelectionBudgetSplit::new(delta, mu)?;
    // Per-candidate noise on disjoint substreams: child 0 holds the Gumbel
    // draws keyed by candidate index, child 1 the release noise.
    let gumbel_seed = seed.child(0);
    let mut best: Option<(usize, f64)> = None;
    for &i in active {
        let e = es[i].value();
        if e == 0.0 {
            continue;
        }
        let g = gumbel_unchecked(split.gumbel_scale, &mut gumbel_seed.stream(i as u64));
        let score = e.ln() + g;
        let better = match best {
            None => true,
            Some((bi, bs)) => score > bs || (score == bs && i < bi),
        };
        if better {
            best = Some((i, score));
        }
    }
    // All actives zero: the only positive-probability tie at -infinity.
    let winner = match best {
        Some((i, _)) => i,
        None => *active.iter().min().unwrap(),
    };
    let release_seed = seed.child(1);
    let release_budget = PrivacyBudget::new(mu.mu() / SQRT_2)?;
    let private_value = privatize(es[winner], delta, release_budget, &release_seed);
    Ok(Extraction {
        index: winner,
        private_value,
    })
}
