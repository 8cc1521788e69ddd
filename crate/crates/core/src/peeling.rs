//! Recursive peeling: extract the noisy max s times at per-iteration budget
//! μ/√s, zeroing everything never selected, plus a private data-adaptive
//! rule that picks the peeling size from noisy e-BH margins.

use crate::ebh::log_ebh_threshold;
use crate::error::Error;
use crate::mechanism::{EValue, PrivacyBudget, Sensitivity};
use crate::rng::RngSeed;
use crate::selection::report_noisy_max;

/// Configuration of the fixed-size peeling loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeelingConfig {
    /// Number of extractions, 1 ≤ s ≤ m.
    pub s: usize,
    pub delta: Sensitivity,
    pub mu: PrivacyBudget,
}

/// Configuration of the adaptive peeling-size rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveConfig {
    /// Smallest candidate size; the dyadic grid starts here.
    pub s_min: usize,
    /// Budget spent on the noisy margins, 0 < mu0 < mu.
    pub mu0: PrivacyBudget,
    /// FDR level the margins are computed against.
    pub alpha: f64,
}

/// One grid point's exact and noise-perturbed e-BH margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginEntry {
    pub k: usize,
    /// Q_k = L_(k) − log(m/(αk)), order statistics on log e-values.
    pub q: f64,
    /// Q_k plus N(0, |K|Δ²/μ0²) noise.
    pub q_noisy: f64,
}

/// Noisy margins over the dyadic grid; releasing the whole vector costs μ0.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginVector {
    pub entries: Vec<MarginEntry>,
}

/// A full-length private e-value vector: zeros off the selected set.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivateEVector {
    pub values: Vec<f64>,
    pub selected: Vec<usize>,
    /// Total privacy spent producing the vector.
    pub budget: PrivacyBudget,
}

/// Outcome of adaptive peeling, keeping the released margins for audit.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptivePeelOutcome {
    pub evector: PrivateEVector,
    pub margins: MarginVector,
    pub chosen_s: usize,
}

/// Peel `cfg.s` winners at per-iteration budget μ/√s; composed cost exactly μ.
pub fn peel_fixed(
    es: &[EValue],
    cfg: &PeelingConfig,
    seed: &RngSeed,
) -> Result<PrivateEVector, Error> {
    let m = es.len();
    if m == 0 {
        return Err(Error::EmptyInput("peel_fixed"));
    }
    if cfg.s == 0 || cfg.s > m {
        return Err(Error::PeelSize { s: cfg.s, m });
    }
    let per_iteration = cfg.mu.split(cfg.s)?;
    let mut values = vec![0.0; m];
    let mut selected = Vec::with_capacity(cfg.s);
    let mut active: Vec<usize> = (0..m).collect();
    for t in 0..cfg.s {
        let extraction =
            report_noisy_max(&active, es, cfg.delta, per_iteration, &seed.child(t as u64))?;
        values[extraction.index] = extraction.private_value.value;
        selected.push(extraction.index);
        active.retain(|&i| i != extraction.index);
    }
    Ok(PrivateEVector {
        values,
        selected,
        budget: cfg.mu,
    })
}

/// Dyadic grid {s_min, 2·s_min, 4·s_min, …} ∩ {1..m}.
fn dyadic_grid(s_min: usize, m: usize) -> Vec<usize> {
    let mut grid = Vec::new();
    let mut k = s_min;
    while k <= m {
        grid.push(k);
        match k.checked_mul(2) {
            Some(next) => k = next,
            None => break,
        }
    }
    grid
}

/// Noisy e-BH margins Q̃_k = Q_k + Z_k on the dyadic grid.
///
/// Order statistics use a descending stable sort (ties by ascending index),
/// so Q_k is a deterministic function of the input multiset. Zero e-values
/// contribute −∞, which compares as negative in every margin test.
pub fn noisy_margins(
    es: &[EValue],
    acfg: &AdaptiveConfig,
    delta: Sensitivity,
    seed: &RngSeed,
) -> Result<MarginVector, Error> {
    let m = es.len();
    if m == 0 {
        return Err(Error::EmptyInput("noisy_margins"));
    }
    if acfg.s_min == 0 || acfg.s_min > m {
        return Err(Error::PeelSize { s: acfg.s_min, m });
    }
    if !(acfg.alpha > 0.0 && acfg.alpha < 1.0) {
        return Err(Error::domain(format!(
            "noisy_margins requires alpha in (0,1), got {}",
            acfg.alpha
        )));
    }
    let grid = dyadic_grid(acfg.s_min, m);
    let mut log_sorted: Vec<f64> = es.iter().map(|e| e.value().ln()).collect();
    log_sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let noise_sd = (grid.len() as f64).sqrt() * delta.delta() / acfg.mu0.mu();
    let entries = grid
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let q = log_sorted[k - 1] - log_ebh_threshold(m, acfg.alpha, k);
            let z = noise_sd * seed.stream(j as u64).standard_normal();
            MarginEntry {
                k,
                q,
                q_noisy: q + z,
            }
        })
        .collect();
    Ok(MarginVector { entries })
}

/// Peeling size from the noisy margins: s_min when every margin is negative;
/// otherwise the grid point just above the largest nonnegative one (itself
/// when it is already the largest), clamped to m.
pub fn choose_peel_size(margins: &MarginVector, acfg: &AdaptiveConfig, m: usize) -> usize {
    let entries = &margins.entries;
    let mut k_hat_pos = None;
    for (j, e) in entries.iter().enumerate() {
        if e.q_noisy >= 0.0 {
            k_hat_pos = Some(j);
        }
    }
    let s_hat = match k_hat_pos {
        None => acfg.s_min,
        Some(j) if j + 1 < entries.len() => entries[j + 1].k,
        Some(j) => entries[j].k,
    };
    s_hat.clamp(acfg.s_min, m)
}

/// Adaptive peeling: spend μ0 on noisy margins to pick ŝ, then run the fixed
/// loop at μ_peel = √(μ² − μ0²). Total cost √(μ0² + μ_peel²) = μ.
pub fn peel_adaptive(
    es: &[EValue],
    acfg: &AdaptiveConfig,
    delta: Sensitivity,
    mu: PrivacyBudget,
    seed: &RngSeed,
) -> Result<AdaptivePeelOutcome, Error> {
    if acfg.mu0.mu() >= mu.mu() {
        return Err(Error::MarginBudget {
            mu0: acfg.mu0.mu(),
            mu: mu.mu(),
        });
    }
    let m = es.len();
    let margins = noisy_margins(es, acfg, delta, &seed.child(0))?;
    let chosen_s = choose_peel_size(&margins, acfg, m);
    let mu_peel = PrivacyBudget::new((mu.mu() * mu.mu() - acfg.mu0.mu() * acfg.mu0.mu()).sqrt())?;
    let cfg = PeelingConfig {
        s: chosen_s,
        delta,
        mu: mu_peel,
    };
    let mut evector = peel_fixed(es, &cfg, &seed.child(1))?;
    evector.budget = mu;
    Ok(AdaptivePeelOutcome {
        evector,
        margins,
        chosen_s,
    })
}
