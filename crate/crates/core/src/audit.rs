//! Privacy audit of argmax selection mechanisms via the two-group swap test.
//!
//! Two groups of N candidates get centered scores 0 and γ; swapping the groups
//! gives a neighboring pair. The symmetric test that picks whichever group
//! holds the noisy argmax has Type I = Type II = p_error(N). A claimed μ-GDP
//! guarantee forces p_error ≥ G_μ(p_error); Gaussian selection noise drives
//! p_error(N) → 0 as N grows and lands in the violation zone, while Gumbel
//! noise keeps a cardinality-independent logistic error.

use rayon::prelude::*;

use crate::error::Error;
use crate::mechanism::{PrivacyBudget, Sensitivity};
use crate::normal::{gdp_tradeoff, normal_quantile_unchecked};
use crate::rng::{RngSeed, Substream};
use crate::selection::{gumbel_unchecked, selection_epsilon};
use crate::stats::proportion_se;

/// Which noise family the audited selection mechanism uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    /// N(0, 8Δ²/μ²), the calibration under audit.
    Gaussian,
    /// Gumbel(0, 2Δ/ε) with ε = selection_epsilon(μ).
    Gumbel,
}

impl NoiseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::Gumbel => "gumbel",
        }
    }
}

/// Audit configuration: the two-group construction and the claim to test.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditConfig {
    /// Centered score gap γ between the two groups.
    pub gamma: f64,
    /// Score sensitivity Δ of the audited mechanism.
    pub delta: Sensitivity,
    /// Candidates per group.
    pub n_grid: Vec<usize>,
    /// Budget parameter the noise scales are derived from.
    pub mu: PrivacyBudget,
    /// GDP level the mechanism claims; the trade-off comparison point.
    pub mu_claimed: f64,
    pub trials: usize,
    pub noise: NoiseKind,
}

impl AuditConfig {
    /// The audited construction: Δ = 1, ε-gap 0.01 so γ = 0.49, μ = 1/√2,
    /// with the claimed level μ/√2 for the selection step.
    pub fn counterexample(noise: NoiseKind, n_grid: Vec<usize>, trials: usize) -> Self {
        let mu = PrivacyBudget::new(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        AuditConfig {
            gamma: 0.49,
            delta: Sensitivity::new(1.0).unwrap(),
            n_grid,
            mu,
            mu_claimed: mu.mu() / std::f64::consts::SQRT_2,
            trials,
            noise,
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::domain(format!(
                "audit gamma must be nonnegative, got {}",
                self.gamma
            )));
        }
        if !(self.mu_claimed >= 0.0 && self.mu_claimed.is_finite()) {
            return Err(Error::domain(format!(
                "claimed mu must be nonnegative, got {}",
                self.mu_claimed
            )));
        }
        if self.trials == 0 {
            return Err(Error::domain("audit trials must be >= 1"));
        }
        if self.n_grid.is_empty() {
            return Err(Error::EmptyInput("audit n grid"));
        }
        if self.n_grid.contains(&0) {
            return Err(Error::domain("audit group sizes must be >= 1"));
        }
        Ok(())
    }

    fn noise_scale(&self) -> f64 {
        match self.noise {
            // std sqrt(8) Δ/μ, exactly the audited claim's calibration.
            NoiseKind::Gaussian => 8f64.sqrt() * self.delta.delta() / self.mu.mu(),
            NoiseKind::Gumbel => 2.0 * self.delta.delta() / selection_epsilon(self.mu),
        }
    }
}

/// Draw max of n i.i.d. noise variables. Both families admit an exact
/// one-draw sampler for the group maximum: Gumbel by max-stability, Gaussian
/// by inverting F_max = Φ(·/s)^n through the upper tail.
fn group_max(noise: NoiseKind, scale: f64, n: usize, rng: &mut Substream) -> f64 {
    match noise {
        NoiseKind::Gaussian => {
            let u = rng.uniform();
            // upper-tail mass q = 1 - u^(1/n), kept exact near 1 via expm1
            let q = -(u.ln() / n as f64).exp_m1();
            scale * -normal_quantile_unchecked(q)
        }
        NoiseKind::Gumbel => scale * (n as f64).ln() + gumbel_unchecked(scale, rng),
    }
}

/// Monte-Carlo estimate of p_error(N) = P(max of N loser draws > γ + max of
/// N winner draws), with its exact binomial standard error.
pub fn selection_error_mc(
    cfg: &AuditConfig,
    n: usize,
    seed: &RngSeed,
) -> Result<(f64, f64), Error> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::domain("audit group size must be >= 1"));
    }
    let scale = cfg.noise_scale();
    let errors: u64 = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed.stream(t);
            let losers = group_max(cfg.noise, scale, n, &mut rng);
            let winners = group_max(cfg.noise, scale, n, &mut rng);
            u64::from(losers > cfg.gamma + winners)
        })
        .sum();
    let p = errors as f64 / cfg.trials as f64;
    Ok((p, proportion_se(p, cfg.trials)))
}

/// Exact error of Gumbel selection with a score gap: 1/(1 + exp(gap/scale)).
pub fn gumbel_error_closed_form(gap: f64, scale: f64) -> Result<f64, Error> {
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(Error::domain(format!("gap must be positive, got {gap}")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::domain(format!(
            "scale must be positive, got {scale}"
        )));
    }
    Ok(1.0 / (1.0 + (gap / scale).exp()))
}

/// One audited grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditRow {
    pub noise: NoiseKind,
    pub n: usize,
    pub p_error: f64,
    pub se: f64,
    /// G_{μ_claimed} evaluated at the empirical error.
    pub g_mu_at_p: f64,
    /// True when p_error + 3·se < g_mu_at_p: the anchor point sits strictly
    /// below the claimed trade-off curve.
    pub violation: bool,
}

pub const AUDIT_CSV_HEADER: &str = "noise,n,p_error,se,g_mu_at_p,violation";

impl AuditRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.noise.as_str(),
            self.n,
            self.p_error,
            self.se,
            self.g_mu_at_p,
            self.violation
        )
    }
}

/// Serialize audit rows with the standard header.
pub fn audit_rows_to_csv(rows: &[AuditRow]) -> String {
    let mut out = String::from(AUDIT_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}

/// Estimate p_error across the n grid and flag claimed-trade-off violations.
pub fn violation_report(cfg: &AuditConfig, seed: &RngSeed) -> Result<Vec<AuditRow>, Error> {
    cfg.validate()?;
    cfg.n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let (p_error, se) = selection_error_mc(cfg, n, &seed.child(i as u64))?;
            let g_mu_at_p = gdp_tradeoff(p_error, cfg.mu_claimed)?;
            Ok(AuditRow {
                noise: cfg.noise,
                n,
                p_error,
                se,
                g_mu_at_p,
                violation: p_error + 3.0 * se < g_mu_at_p,
            })
        })
        .collect()
}
