//! Noise-calibrated rejection thresholds for canonical private e-values.
//!
//! Exploiting the known Gaussian noise law yields a threshold c* strictly
//! below the Markov bound 1/α that still controls Type I error at α. The
//! module also quantifies the resulting power change: the improvement
//! profile G(x) with its maximizer, the boundary-shift probability, and the
//! leading-order rates of the benefit and of the noise-induced cost.

use crate::error::Error;
use crate::mechanism::{PrivacyBudget, PrivateEValue, Sensitivity};
use crate::normal::{normal_cdf, normal_quantile, solve_z_star};

/// Which branch of the sharp-threshold formula applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// α ≤ Φ(z*): threshold from the worst-case two-point e-value.
    MarkovLike,
    /// α > Φ(z*): threshold pinned by the constant e-value E ≡ 1.
    QuantileLike,
}

/// Sharp threshold and the quantities it is built from, for one (α, Δ, μ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationResult {
    pub alpha: f64,
    /// Noise scale σ = Δ/μ.
    pub sigma: f64,
    /// Root of φ(z)/Φ(z) = σ.
    pub z_star: f64,
    /// log c*; threshold math stays in log space to avoid overflow.
    pub log_c_star: f64,
    pub branch: Branch,
    pub budget: PrivacyBudget,
    pub sensitivity: Sensitivity,
}

impl CalibrationResult {
    pub fn c_star(&self) -> f64 {
        self.log_c_star.exp()
    }
}

/// Power-gain summary derived from a calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerProfile {
    /// Signal strength at which the improvement G(x) peaks.
    pub x_opt: f64,
    /// Largest attainable improvement, sup over alternatives of E[G(E)].
    pub g_max: f64,
    /// P(ζ < 0): probability the random boundary shift lowers the threshold.
    pub shift_neg_prob: f64,
}

/// Compute the sharp threshold c* for level `alpha` under canonical noise.
///
/// Branch selection compares alpha to Φ(z*) with ties going to the
/// two-point branch.
pub fn calibrate(
    alpha: f64,
    delta: Sensitivity,
    mu: PrivacyBudget,
) -> Result<CalibrationResult, Error> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!(
            "calibrate requires alpha in (0,1), got {alpha}"
        )));
    }
    if delta.delta() <= 0.0 {
        return Err(Error::domain(
            "calibrate requires delta > 0; with delta = 0 the Markov rule is already sharp",
        ));
    }
    let sigma = delta.delta() / mu.mu();
    let tau = 0.5 * sigma * sigma;
    let z_star = solve_z_star(sigma)?;
    let phi_z = normal_cdf(z_star);
    let (branch, log_c_star) = if alpha <= phi_z {
        (
            Branch::MarkovLike,
            -alpha.ln() + phi_z.ln() - tau - sigma * z_star,
        )
    } else {
        (Branch::QuantileLike, -tau - sigma * normal_quantile(alpha)?)
    };
    Ok(CalibrationResult {
        alpha,
        sigma,
        z_star,
        log_c_star,
        branch,
        budget: mu,
        sensitivity: delta,
    })
}

/// The standard private rule: reject when the value reaches 1/α.
pub fn markov_reject(e_dp: &PrivateEValue, alpha: f64) -> bool {
    e_dp.value >= 1.0 / alpha
}

/// Reject when the value reaches the calibrated threshold c* < 1/α.
///
/// Errors if the calibration was computed for a different (Δ, μ) than the
/// value carries; the threshold is only valid for its own noise law.
pub fn calibrated_reject(e_dp: &PrivateEValue, cal: &CalibrationResult) -> Result<bool, Error> {
    if e_dp.budget != cal.budget {
        return Err(Error::BudgetMismatch {
            expected: cal.budget.mu(),
            got: e_dp.budget.mu(),
        });
    }
    if e_dp.sensitivity != cal.sensitivity {
        return Err(Error::SensitivityMismatch {
            expected: cal.sensitivity.delta(),
            got: e_dp.sensitivity.delta(),
        });
    }
    Ok(e_dp.value > 0.0 && e_dp.value.ln() >= cal.log_c_star)
}

/// Power improvement G(x) = P(c* ≤ x·e^(−ξ) < 1/α) for a signal of size x.
pub fn power_improvement_g(x: f64, cal: &CalibrationResult) -> Result<f64, Error> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::domain(format!(
            "power_improvement_g requires x > 0, got {x}"
        )));
    }
    let s = cal.sigma;
    let tau = 0.5 * s * s;
    let upper = (x.ln() - cal.log_c_star - tau) / s;
    let lower = (x.ln() + cal.alpha.ln() - tau) / s;
    Ok((normal_cdf(upper) - normal_cdf(lower)).max(0.0))
}

/// Maximizer, maximum, and boundary-shift probability for a calibration.
pub fn power_profile(cal: &CalibrationResult) -> PowerProfile {
    let s = cal.sigma;
    let log_inv_alpha = -cal.alpha.ln();
    let x_opt = (0.5 * s * s + 0.5 * (log_inv_alpha + cal.log_c_star)).exp();
    let g_max = 2.0 * normal_cdf((log_inv_alpha - cal.log_c_star) / (2.0 * s)) - 1.0;
    let phi_z = normal_cdf(cal.z_star);
    let shift_neg_prob = normal_cdf(cal.z_star - phi_z.ln() / s);
    PowerProfile {
        x_opt,
        g_max,
        shift_neg_prob,
    }
}

/// Leading-order rate of the calibration benefit as Δ → 0:
/// (f_E(1/α)/(αμ)) · Δ·sqrt(−2·log Δ).
pub fn calibration_benefit_rate(
    delta: Sensitivity,
    mu: PrivacyBudget,
    alpha: f64,
    f_at: f64,
) -> Result<f64, Error> {
    rate_preconditions(delta, alpha, f_at)?;
    let d = delta.delta();
    Ok(f_at / (alpha * mu.mu()) * d * (-2.0 * d.ln()).sqrt())
}

/// Leading-order rate of the noise-induced cost as Δ → 0:
/// (f_E(1/α)/(2eαμ²)) · Δ²/(−log Δ).
pub fn noise_cost_rate(
    delta: Sensitivity,
    mu: PrivacyBudget,
    alpha: f64,
    f_at: f64,
) -> Result<f64, Error> {
    rate_preconditions(delta, alpha, f_at)?;
    let d = delta.delta();
    Ok(f_at / (2.0 * std::f64::consts::E * alpha * mu.mu() * mu.mu()) * d * d / (-d.ln()))
}

fn rate_preconditions(delta: Sensitivity, alpha: f64, f_at: f64) -> Result<(), Error> {
    let d = delta.delta();
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::domain(format!(
            "asymptotic rates require delta in (0,1), got {d}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!(
            "asymptotic rates require alpha in (0,1), got {alpha}"
        )));
    }
    if !(f_at >= 0.0 && f_at.is_finite()) {
        return Err(Error::domain(format!(
            "density value must be nonnegative and finite, got {f_at}"
        )));
    }
    Ok(())
}
