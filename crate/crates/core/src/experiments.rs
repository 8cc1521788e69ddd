//! Monte-Carlo harness for the single-test threshold sweep, the multiple
//! testing comparisons (independent and one-factor correlated), and the
//! GWAS discovery counts. Emits tidy rows, one (method, metric) per line.
//!
//! Trials run in parallel over disjoint substreams and are reduced in trial
//! order, so output is independent of scheduling.

use rayon::prelude::*;

use crate::calibration::calibrate;
use crate::ebh::{ebh, ebh_with_truth, GroundTruth};
use crate::error::Error;
use crate::mechanism::{all_noisy_privatize, noise_spec, EValue, PrivacyBudget, Sensitivity};
use crate::normal::normal_cdf;
use crate::peeling::{peel_adaptive, peel_fixed, AdaptiveConfig, PeelingConfig};
use crate::rng::RngSeed;
use crate::stats::{mean, proportion_se, standard_error};

/// Choice of the e-value tilt λ in E = exp(λX − λ²/2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaRule {
    /// λ = sqrt(log(1/α)); non-private power Φ(−λ/2).
    SqrtLog,
    /// λ = sqrt(2·log(1/α)); non-private power exactly 1/2.
    SqrtTwoLog,
}

impl LambdaRule {
    pub fn lambda(self, alpha: f64) -> f64 {
        match self {
            LambdaRule::SqrtLog => (-alpha.ln()).sqrt(),
            LambdaRule::SqrtTwoLog => (-2.0 * alpha.ln()).sqrt(),
        }
    }
}

/// Which procedure a result row describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    NonprivateEbh,
    AllNoisy,
    PeelFixed,
    PeelAdaptive,
    MarkovPrivate,
    CalibratedPrivate,
    NonprivateSingle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::NonprivateEbh => "nonprivate_ebh",
            Method::AllNoisy => "all_noisy",
            Method::PeelFixed => "peel_fixed",
            Method::PeelAdaptive => "peel_adaptive",
            Method::MarkovPrivate => "markov_private",
            Method::CalibratedPrivate => "calibrated_private",
            Method::NonprivateSingle => "nonprivate_single",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Type1,
    Power,
    Fdr,
    Ap,
    Discoveries,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Type1 => "type1",
            Metric::Power => "power",
            Metric::Fdr => "fdr",
            Metric::Ap => "ap",
            Metric::Discoveries => "discoveries",
        }
    }
}

/// One output line of the harness.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: Method,
    pub sweep_param: &'static str,
    pub sweep_value: f64,
    pub metric: Metric,
    pub value: f64,
    pub se: f64,
    pub trials: usize,
    pub seed: u64,
}

pub const RESULT_CSV_HEADER: &str = "method,sweep_param,sweep_value,metric,value,se,trials,seed";

impl ResultRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.method.as_str(),
            self.sweep_param,
            self.sweep_value,
            self.metric.as_str(),
            self.value,
            self.se,
            self.trials,
            self.seed
        )
    }
}

/// Serialize rows with the standard header and trailing newline.
pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(RESULT_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}

/// Single-hypothesis sweep configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleTestConfig {
    pub mu: PrivacyBudget,
    pub alpha: f64,
    pub log10_delta_grid: Vec<f64>,
    pub trials: usize,
    pub lambda_rule: LambdaRule,
}

impl SingleTestConfig {
    /// Desk-scale defaults: μ = 0.25, α = 0.05, the log₁₀Δ grid from −3 to 1
    /// in steps of 0.25, 2·10⁴ trials.
    pub fn desk_scale() -> Self {
        SingleTestConfig {
            mu: PrivacyBudget::new(0.25).unwrap(),
            alpha: 0.05,
            log10_delta_grid: (0..=16).map(|i| -3.0 + 0.25 * i as f64).collect(),
            trials: 20_000,
            lambda_rule: LambdaRule::SqrtLog,
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain(format!(
                "single-test alpha must be in (0,1), got {}",
                self.alpha
            )));
        }
        if self.trials == 0 {
            return Err(Error::domain("single-test trials must be >= 1"));
        }
        if self.log10_delta_grid.is_empty() {
            return Err(Error::EmptyInput("single-test delta grid"));
        }
        Ok(())
    }
}

/// Closed-form power of the non-private rule E ≥ 1/α against the shifted
/// alternative: Φ(λ/2 − log(1/α)/λ). Independent of Δ.
pub fn nonprivate_single_power(alpha: f64, rule: LambdaRule) -> f64 {
    let lambda = rule.lambda(alpha);
    normal_cdf(0.5 * lambda - (-alpha.ln()) / lambda)
}

/// Type-I error and power of the Markov, calibrated, and non-private rules
/// across the sensitivity grid.
pub fn run_single_test_sweep(
    cfg: &SingleTestConfig,
    seed: &RngSeed,
) -> Result<Vec<ResultRow>, Error> {
    cfg.validate()?;
    let lambda = cfg.lambda_rule.lambda(cfg.alpha);
    let log_markov = -cfg.alpha.ln();
    let mut rows = Vec::new();
    for &log10_delta in &cfg.log10_delta_grid {
        let delta = Sensitivity::new(10f64.powf(log10_delta))?;
        let cal = calibrate(cfg.alpha, delta, cfg.mu)?;
        let spec = noise_spec(delta, cfg.mu);
        // Trial substreams are shared across grid points (common random
        // numbers): sweep curves vary only through (tau, sigma), and the
        // non-private rule comes out identical at every grid point.
        // counts: [markov t1, cal t1, np t1, markov power, cal power, np power]
        let counts: [u64; 6] = (0..cfg.trials as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = seed.stream(t);
                let mut c = [0u64; 6];
                for (offset, shift) in [(0usize, 0.0), (3usize, lambda)] {
                    let z = shift + rng.standard_normal();
                    let log_e = lambda * z - 0.5 * lambda * lambda;
                    let xi = spec.tau + spec.sd() * rng.standard_normal();
                    let log_private = log_e - xi;
                    if log_private >= log_markov {
                        c[offset] += 1;
                    }
                    if log_private >= cal.log_c_star {
                        c[offset + 1] += 1;
                    }
                    if log_e >= log_markov {
                        c[offset + 2] += 1;
                    }
                }
                c
            })
            .reduce(
                || [0u64; 6],
                |mut a, b| {
                    for i in 0..6 {
                        a[i] += b[i];
                    }
                    a
                },
            );
        let n = cfg.trials;
        let methods = [
            Method::MarkovPrivate,
            Method::CalibratedPrivate,
            Method::NonprivateSingle,
        ];
        for (mi, &method) in methods.iter().enumerate() {
            for (metric, count) in [(Metric::Type1, counts[mi]), (Metric::Power, counts[mi + 3])] {
                let p = count as f64 / n as f64;
                rows.push(ResultRow {
                    method,
                    sweep_param: "log10_delta",
                    sweep_value: log10_delta,
                    metric,
                    value: p,
                    se: proportion_se(p, n),
                    trials: n,
                    seed: seed.root(),
                });
            }
        }
    }
    Ok(rows)
}

/// Multiple-testing experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiTestConfig {
    pub m: usize,
    pub m1: usize,
    pub eta_alt: f64,
    /// One-factor correlation; 0 recovers independence.
    pub rho: f64,
    pub alpha: f64,
    pub delta: Sensitivity,
    pub mu: PrivacyBudget,
    pub s_fixed: usize,
    /// Fraction of μ spent on the adaptive margin step.
    pub mu0_fraction: f64,
    pub s_min: usize,
    pub trials: usize,
}

/// μ_gdp = 4ε/√(10·log(1/δ_dp)), the (ε, δ)-to-GDP presentation glue used
/// by the privacy-budget sweep.
pub fn epsilon_to_mu(epsilon: f64, delta_dp: f64) -> f64 {
    4.0 * epsilon / (10.0 * (1.0 / delta_dp).ln()).sqrt()
}

impl MultiTestConfig {
    /// Desk-scale defaults: m = 2000, m1 = 20, η = 4, α = 0.05, Δ = 5e-3,
    /// μ from ε = 0.5 and δ_dp = 1e-3, s = 500, μ0 = 0.1μ, s_min = 50,
    /// 200 trials.
    pub fn desk_scale() -> Self {
        MultiTestConfig {
            m: 2000,
            m1: 20,
            eta_alt: 4.0,
            rho: 0.0,
            alpha: 0.05,
            delta: Sensitivity::new(5e-3).unwrap(),
            mu: PrivacyBudget::new(epsilon_to_mu(0.5, 1e-3)).unwrap(),
            s_fixed: 500,
            mu0_fraction: 0.1,
            s_min: 50,
            trials: 200,
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if self.m == 0 {
            return Err(Error::EmptyInput("multi-test m"));
        }
        if self.m1 > self.m {
            return Err(Error::domain(format!(
                "m1 = {} exceeds m = {}",
                self.m1, self.m
            )));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::domain(format!(
                "rho must be in [0,1), got {}",
                self.rho
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain(format!(
                "alpha must be in (0,1), got {}",
                self.alpha
            )));
        }
        if self.s_fixed == 0 || self.s_fixed > self.m {
            return Err(Error::PeelSize {
                s: self.s_fixed,
                m: self.m,
            });
        }
        if self.s_min == 0 || self.s_min > self.m {
            return Err(Error::PeelSize {
                s: self.s_min,
                m: self.m,
            });
        }
        if !(self.mu0_fraction > 0.0 && self.mu0_fraction < 1.0) {
            return Err(Error::domain(format!(
                "mu0_fraction must be in (0,1), got {}",
                self.mu0_fraction
            )));
        }
        if self.trials == 0 {
            return Err(Error::domain("multi-test trials must be >= 1"));
        }
        Ok(())
    }

    fn truth(&self) -> GroundTruth {
        GroundTruth::new(0..self.m1)
    }

    fn adaptive(&self) -> Result<AdaptiveConfig, Error> {
        Ok(AdaptiveConfig {
            s_min: self.s_min,
            mu0: PrivacyBudget::new(self.mu0_fraction * self.mu.mu())?,
            alpha: self.alpha,
        })
    }
}

/// One trial's e-values under the factor model X_i = η_i + √ρ·W + √(1−ρ)·Z_i,
/// with E_i = exp(λX_i − λ²/2) and λ = sqrt(log(m/α)). Signals occupy the
/// first m1 coordinates.
pub fn gen_multi_data(cfg: &MultiTestConfig, seed: &RngSeed) -> Vec<EValue> {
    let lambda = ((cfg.m as f64 / cfg.alpha).ln()).sqrt();
    let mut rng = seed.rng();
    let w = rng.standard_normal();
    let sqrt_rho = cfg.rho.sqrt();
    let sqrt_comp = (1.0 - cfg.rho).sqrt();
    (0..cfg.m)
        .map(|i| {
            let eta = if i < cfg.m1 { cfg.eta_alt } else { 0.0 };
            let x = eta + sqrt_rho * w + sqrt_comp * rng.standard_normal();
            EValue::new((lambda * x - 0.5 * lambda * lambda).exp()).unwrap()
        })
        .collect()
}

/// Which parameter a multi-test sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Grid of log₁₀(Δ) values.
    Delta,
    /// Grid of signal counts.
    M1,
    /// Grid of signal strengths.
    Eta,
    /// Grid of ε values, mapped through `epsilon_to_mu` at δ_dp = 1e-3.
    Epsilon,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Delta => "log10_delta",
            SweepParam::M1 => "m1",
            SweepParam::Eta => "eta_alt",
            SweepParam::Epsilon => "epsilon",
        }
    }

    fn apply(self, base: &MultiTestConfig, value: f64) -> Result<MultiTestConfig, Error> {
        let mut cfg = base.clone();
        match self {
            SweepParam::Delta => cfg.delta = Sensitivity::new(10f64.powf(value))?,
            SweepParam::M1 => cfg.m1 = value as usize,
            SweepParam::Eta => cfg.eta_alt = value,
            SweepParam::Epsilon => cfg.mu = PrivacyBudget::new(epsilon_to_mu(value, 1e-3))?,
        }
        Ok(cfg)
    }
}

/// Method order of the per-trial metric arrays.
pub const MULTI_METHODS: [Method; 4] = [
    Method::NonprivateEbh,
    Method::AllNoisy,
    Method::PeelFixed,
    Method::PeelAdaptive,
];

/// Realized (FDP, true-positive fraction) of every method on one trial's
/// shared data, in `MULTI_METHODS` order. Paired per-trial values support
/// method-difference tests that aggregated rows cannot express.
pub fn run_multi_trials(
    cfg: &MultiTestConfig,
    seed: &RngSeed,
) -> Result<Vec<[(f64, f64); 4]>, Error> {
    cfg.validate()?;
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| run_multi_trial(cfg, &seed.child(t)))
        .collect()
}

/// Per-method (FDP, TP) for one trial.
fn run_multi_trial(cfg: &MultiTestConfig, seed: &RngSeed) -> Result<[(f64, f64); 4], Error> {
    let truth = cfg.truth();
    let es = gen_multi_data(cfg, &seed.child(0));
    let raw: Vec<f64> = es.iter().map(|e| e.value()).collect();

    let nonprivate = ebh_with_truth(&raw, cfg.alpha, &truth)?;

    let noisy = all_noisy_privatize(&es, cfg.delta, cfg.mu, &seed.child(1))?;
    let noisy_vals: Vec<f64> = noisy.iter().map(|p| p.value).collect();
    let all_noisy = ebh_with_truth(&noisy_vals, cfg.alpha, &truth)?;

    let fixed_cfg = PeelingConfig {
        s: cfg.s_fixed,
        delta: cfg.delta,
        mu: cfg.mu,
    };
    let fixed = peel_fixed(&es, &fixed_cfg, &seed.child(2))?;
    let peel_fixed_report = ebh_with_truth(&fixed.values, cfg.alpha, &truth)?;

    let adaptive = peel_adaptive(&es, &cfg.adaptive()?, cfg.delta, cfg.mu, &seed.child(3))?;
    let peel_adaptive_report = ebh_with_truth(&adaptive.evector.values, cfg.alpha, &truth)?;

    let pair = |r: &crate::ebh::TestingReport| (r.fdp.unwrap(), r.tp_fraction.unwrap());
    Ok([
        pair(&nonprivate),
        pair(&all_noisy),
        pair(&peel_fixed_report),
        pair(&peel_adaptive_report),
    ])
}

/// Mean FDR and AP with standard errors for each method at each grid point.
pub fn run_multi_sweep(
    base: &MultiTestConfig,
    sweep: SweepParam,
    grid: &[f64],
    seed: &RngSeed,
) -> Result<Vec<ResultRow>, Error> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("multi-test sweep grid"));
    }
    let mut rows = Vec::new();
    for (gi, &value) in grid.iter().enumerate() {
        let cfg = sweep.apply(base, value)?;
        let per_trial = run_multi_trials(&cfg, &seed.child(gi as u64))?;
        for (mi, &method) in MULTI_METHODS.iter().enumerate() {
            let fdps: Vec<f64> = per_trial.iter().map(|r| r[mi].0).collect();
            let tps: Vec<f64> = per_trial.iter().map(|r| r[mi].1).collect();
            for (metric, vals) in [(Metric::Fdr, &fdps), (Metric::Ap, &tps)] {
                rows.push(ResultRow {
                    method,
                    sweep_param: sweep.as_str(),
                    sweep_value: value,
                    metric,
                    value: mean(vals),
                    se: standard_error(vals),
                    trials: cfg.trials,
                    seed: seed.root(),
                });
            }
        }
    }
    Ok(rows)
}

/// Discovery counts per method across the FDR-level grid for one set of
/// observed z-scores: E_i = exp(λ·z_i − λ²/2) with λ = sqrt(log(m/α)).
#[allow(clippy::too_many_arguments)]
pub fn run_gwas(
    zscores: &[f64],
    alpha_grid: &[f64],
    mu: PrivacyBudget,
    delta: Sensitivity,
    s_fixed: usize,
    s_min: usize,
    mu0_fraction: f64,
    seed: &RngSeed,
) -> Result<Vec<ResultRow>, Error> {
    if zscores.is_empty() {
        return Err(Error::EmptyInput("gwas z-scores"));
    }
    if alpha_grid.is_empty() {
        return Err(Error::EmptyInput("gwas alpha grid"));
    }
    let m = zscores.len();
    if s_fixed == 0 || s_fixed > m {
        return Err(Error::PeelSize { s: s_fixed, m });
    }
    if s_min == 0 || s_min > m {
        return Err(Error::PeelSize { s: s_min, m });
    }
    if !(mu0_fraction > 0.0 && mu0_fraction < 1.0) {
        return Err(Error::domain(format!(
            "mu0_fraction must be in (0,1), got {mu0_fraction}"
        )));
    }
    let mut rows = Vec::new();
    for (ai, &alpha) in alpha_grid.iter().enumerate() {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!(
                "gwas alpha grid values must be in (0,1), got {alpha}"
            )));
        }
        let lambda = ((m as f64 / alpha).ln()).sqrt();
        let es: Vec<EValue> = zscores
            .iter()
            .map(|&z| EValue::new((lambda * z - 0.5 * lambda * lambda).exp()).unwrap())
            .collect();
        let raw: Vec<f64> = es.iter().map(|e| e.value()).collect();
        let alpha_seed = seed.child(ai as u64);

        let nonprivate = ebh(&raw, alpha)?.k_star;

        let noisy = all_noisy_privatize(&es, delta, mu, &alpha_seed.child(0))?;
        let noisy_vals: Vec<f64> = noisy.iter().map(|p| p.value).collect();
        let all_noisy = ebh(&noisy_vals, alpha)?.k_star;

        let fixed_cfg = PeelingConfig {
            s: s_fixed,
            delta,
            mu,
        };
        let fixed = peel_fixed(&es, &fixed_cfg, &alpha_seed.child(1))?;
        let fixed_k = ebh(&fixed.values, alpha)?.k_star;

        let acfg = AdaptiveConfig {
            s_min,
            mu0: PrivacyBudget::new(mu0_fraction * mu.mu())?,
            alpha,
        };
        let adaptive = peel_adaptive(&es, &acfg, delta, mu, &alpha_seed.child(2))?;
        let adaptive_k = ebh(&adaptive.evector.values, alpha)?.k_star;

        for (method, k) in [
            (Method::NonprivateEbh, nonprivate),
            (Method::AllNoisy, all_noisy),
            (Method::PeelFixed, fixed_k),
            (Method::PeelAdaptive, adaptive_k),
        ] {
            rows.push(ResultRow {
                method,
                sweep_param: "alpha",
                sweep_value: alpha,
                metric: Metric::Discoveries,
                value: k as f64,
                se: 0.0,
                trials: 1,
                seed: seed.root(),
            });
        }
    }
    Ok(rows)
}
