//! `gdpe`: private e-value tooling over the gdp-evalues library.
//!
//! Subcommands cover threshold calibration, canonical privatization, the
//! peeling algorithms, e-BH, the simulation harness, the selection-noise
//! audit, and GWAS discovery counts. Every stochastic subcommand takes an
//! explicit --seed, and every --out file gets a sibling manifest that
//! reproduces it byte-for-byte.

mod error;
mod formats;
mod manifest;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use gdp_evalues::audit::{audit_rows_to_csv, AuditConfig, NoiseKind};
use gdp_evalues::calibration::{calibrate, power_profile, Branch};
use gdp_evalues::ebh::ebh;
use gdp_evalues::experiments::{
    epsilon_to_mu, rows_to_csv, run_gwas, run_multi_sweep, run_single_test_sweep, LambdaRule,
    MultiTestConfig, SingleTestConfig, SweepParam,
};
use gdp_evalues::mechanism::{privatize, PrivacyBudget, Sensitivity};
use gdp_evalues::peeling::{peel_adaptive, peel_fixed, AdaptiveConfig, PeelingConfig};
use gdp_evalues::RngSeed;

use error::{io_err, CliError};
use formats::{evalue_csv, parse_evalue_csv, parse_float_list, parse_gwas_tsv, parse_usize_list};
use manifest::RunManifest;

#[derive(Parser)]
#[command(
    name = "gdpe",
    version,
    about = "Gaussian differentially private e-values"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PeelMode {
    Fixed,
    Adaptive,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExperimentKind {
    Single,
    MultiIndep,
    MultiCorr,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NoiseArg {
    Gaussian,
    Gumbel,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LambdaRuleArg {
    SqrtLog,
    SqrtTwoLog,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepArg {
    Delta,
    M1,
    Eta,
    Epsilon,
}

#[derive(Subcommand)]
enum Command {
    /// Print the calibrated threshold and power profile for one (α, Δ, μ).
    Calibrate {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Apply the canonical mechanism to each e-value in a file.
    Privatize {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run fixed or adaptive peeling over a file of e-values.
    Peel {
        #[arg(long, value_enum)]
        mode: PeelMode,
        /// Peeling size (fixed mode).
        #[arg(long)]
        s: Option<usize>,
        /// Smallest grid size (adaptive mode).
        #[arg(long)]
        s_min: Option<usize>,
        #[arg(long)]
        mu: f64,
        /// Margin budget (adaptive mode).
        #[arg(long)]
        mu0: Option<f64>,
        #[arg(long)]
        delta: f64,
        /// FDR level for the adaptive margins.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        seed: u64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// e-BH over a file of (private or plain) e-values.
    Ebh {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "in")]
        input: PathBuf,
        /// Write `key,value` output here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo experiments: single-test sweep or multiple testing.
    Simulate {
        #[arg(long, value_enum)]
        experiment: ExperimentKind,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        mu: Option<f64>,
        /// ε mapped to μ through 4ε/√(10·log(1/δ_dp)) at δ_dp = 1e-3.
        #[arg(long, conflicts_with = "mu")]
        epsilon: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        /// Single-test λ rule.
        #[arg(long, value_enum)]
        lambda_rule: Option<LambdaRuleArg>,
        /// Single-test sensitivity grid, comma-separated log₁₀ values.
        #[arg(long, allow_hyphen_values = true)]
        log10_delta_grid: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        m1: Option<usize>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        s_min: Option<usize>,
        #[arg(long)]
        mu0_fraction: Option<f64>,
        /// Which parameter the multi-test sweep varies.
        #[arg(long, value_enum)]
        sweep: Option<SweepArg>,
        /// Comma-separated sweep grid values.
        #[arg(long, allow_hyphen_values = true)]
        sweep_grid: Option<String>,
        /// Restore the publication-scale defaults (slow).
        #[arg(long)]
        paper_scale: bool,
    },
    /// Audit an argmax selection mechanism against its claimed GDP level.
    AuditSelection {
        #[arg(long, value_enum)]
        noise: NoiseArg,
        /// Comma-separated candidates-per-group grid.
        #[arg(long)]
        n_grid: String,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Score sensitivity of the audited mechanism.
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Claimed GDP level to compare against; defaults to μ/√2.
        #[arg(long)]
        mu_claimed: Option<f64>,
    },
    /// Discovery counts on GWAS summary statistics across FDR levels.
    Gwas {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated FDR levels.
        #[arg(long)]
        alpha_grid: String,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        delta: f64,
        /// Fixed peeling size.
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 50)]
        s_min: usize,
        #[arg(long, default_value_t = 0.1)]
        mu0_fraction: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(run(&args));
}

/// Parse and dispatch; returns the process exit code.
fn run(args: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints --help/--version to stdout with status 0.
            if e.use_stderr() {
                eprint!("{e}");
                return 1;
            }
            print!("{e}");
            return 0;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Calibrate { alpha, mu, delta } => cmd_calibrate(alpha, mu, delta),
        Command::Privatize {
            mu,
            delta,
            seed,
            input,
            out,
        } => cmd_privatize(mu, delta, seed, &input, &out),
        Command::Peel {
            mode,
            s,
            s_min,
            mu,
            mu0,
            delta,
            alpha,
            seed,
            input,
            out,
        } => cmd_peel(mode, s, s_min, mu, mu0, delta, alpha, seed, &input, &out),
        Command::Ebh { alpha, input, out } => cmd_ebh(alpha, &input, out.as_deref()),
        Command::Simulate {
            experiment,
            trials,
            seed,
            out,
            mu,
            epsilon,
            alpha,
            delta,
            lambda_rule,
            log10_delta_grid,
            m,
            m1,
            eta,
            rho,
            s,
            s_min,
            mu0_fraction,
            sweep,
            sweep_grid,
            paper_scale,
        } => cmd_simulate(SimulateArgs {
            experiment,
            trials,
            seed,
            out,
            mu,
            epsilon,
            alpha,
            delta,
            lambda_rule,
            log10_delta_grid,
            m,
            m1,
            eta,
            rho,
            s,
            s_min,
            mu0_fraction,
            sweep,
            sweep_grid,
            paper_scale,
        }),
        Command::AuditSelection {
            noise,
            n_grid,
            gamma,
            mu,
            trials,
            seed,
            out,
            delta,
            mu_claimed,
        } => cmd_audit(
            noise, &n_grid, gamma, mu, trials, seed, &out, delta, mu_claimed,
        ),
        Command::Gwas {
            input,
            alpha_grid,
            mu,
            delta,
            s,
            s_min,
            mu0_fraction,
            seed,
            out,
        } => cmd_gwas(
            &input,
            &alpha_grid,
            mu,
            delta,
            s,
            s_min,
            mu0_fraction,
            seed,
            &out,
        ),
    }
}

fn cmd_calibrate(alpha: f64, mu: f64, delta: f64) -> Result<(), CliError> {
    let cal = calibrate(alpha, Sensitivity::new(delta)?, PrivacyBudget::new(mu)?)?;
    let profile = power_profile(&cal);
    let branch = match cal.branch {
        Branch::MarkovLike => "markov_like",
        Branch::QuantileLike => "quantile_like",
    };
    print!(
        "z_star,{}\nc_star,{}\nbranch,{}\ng_max,{}\nx_opt,{}\nshift_neg_prob,{}\n",
        cal.z_star,
        cal.c_star(),
        branch,
        profile.g_max,
        profile.x_opt,
        profile.shift_neg_prob
    );
    Ok(())
}

fn cmd_privatize(mu: f64, delta: f64, seed: u64, input: &Path, out: &Path) -> Result<(), CliError> {
    let budget = PrivacyBudget::new(mu)?;
    let sensitivity = Sensitivity::new(delta)?;
    let file = parse_evalue_csv(&read_to_string(input)?)?;
    let root = RngSeed::new(seed);
    let values: Vec<f64> = file
        .values
        .iter()
        .enumerate()
        .map(|(i, &e)| privatize(e, sensitivity, budget, &root.child(i as u64)).value)
        .collect();
    let labels: Vec<String> = (0..values.len()).map(|i| file.label(i)).collect();
    let mut manifest = RunManifest::new("privatize");
    manifest
        .arg("mu", mu)
        .arg("delta", delta)
        .arg("in", input.display())
        .seed(seed);
    manifest.write_with_output(out, &evalue_csv(&labels, &values))
}

#[allow(clippy::too_many_arguments)]
fn cmd_peel(
    mode: PeelMode,
    s: Option<usize>,
    s_min: Option<usize>,
    mu: f64,
    mu0: Option<f64>,
    delta: f64,
    alpha: Option<f64>,
    seed: u64,
    input: &Path,
    out: &Path,
) -> Result<(), CliError> {
    let budget = PrivacyBudget::new(mu)?;
    let sensitivity = Sensitivity::new(delta)?;
    let file = parse_evalue_csv(&read_to_string(input)?)?;
    let root = RngSeed::new(seed);
    let mut manifest = RunManifest::new("peel");
    manifest
        .arg("mu", mu)
        .arg("delta", delta)
        .arg("in", input.display())
        .seed(seed);
    let values = match mode {
        PeelMode::Fixed => {
            let s = s.ok_or_else(|| CliError::validation("--mode fixed requires --s"))?;
            manifest.arg("mode", "fixed").arg("s", s);
            let cfg = PeelingConfig {
                s,
                delta: sensitivity,
                mu: budget,
            };
            peel_fixed(&file.values, &cfg, &root)?.values
        }
        PeelMode::Adaptive => {
            let s_min =
                s_min.ok_or_else(|| CliError::validation("--mode adaptive requires --s-min"))?;
            let mu0 = mu0.ok_or_else(|| CliError::validation("--mode adaptive requires --mu0"))?;
            let alpha =
                alpha.ok_or_else(|| CliError::validation("--mode adaptive requires --alpha"))?;
            manifest
                .arg("mode", "adaptive")
                .arg("s_min", s_min)
                .arg("mu0", mu0)
                .arg("alpha", alpha);
            let acfg = AdaptiveConfig {
                s_min,
                mu0: PrivacyBudget::new(mu0)?,
                alpha,
            };
            let outcome = peel_adaptive(&file.values, &acfg, sensitivity, budget, &root)?;
            // The noisy margins are themselves released (their budget is
            // spent); log them for audit alongside the chosen size.
            manifest.arg("chosen_s", outcome.chosen_s);
            for entry in &outcome.margins.entries {
                manifest.arg(&format!("margin.{}", entry.k), entry.q_noisy);
            }
            outcome.evector.values
        }
    };
    let labels: Vec<String> = (0..values.len()).map(|i| file.label(i)).collect();
    manifest.write_with_output(out, &evalue_csv(&labels, &values))
}

fn cmd_ebh(alpha: f64, input: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let file = parse_evalue_csv(&read_to_string(input)?)?;
    let raw: Vec<f64> = file.values.iter().map(|e| e.value()).collect();
    let report = ebh(&raw, alpha)?;
    let mut text = format!("k_star,{}\n", report.k_star);
    for &i in &report.rejected {
        text.push_str(&format!("rejected,{}\n", file.label(i)));
    }
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(out) => {
            let mut manifest = RunManifest::new("ebh");
            manifest.arg("alpha", alpha).arg("in", input.display());
            manifest.write_with_output(out, &text)
        }
    }
}

struct SimulateArgs {
    experiment: ExperimentKind,
    trials: Option<usize>,
    seed: u64,
    out: PathBuf,
    mu: Option<f64>,
    epsilon: Option<f64>,
    alpha: Option<f64>,
    delta: Option<f64>,
    lambda_rule: Option<LambdaRuleArg>,
    log10_delta_grid: Option<String>,
    m: Option<usize>,
    m1: Option<usize>,
    eta: Option<f64>,
    rho: Option<f64>,
    s: Option<usize>,
    s_min: Option<usize>,
    mu0_fraction: Option<f64>,
    sweep: Option<SweepArg>,
    sweep_grid: Option<String>,
    paper_scale: bool,
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let seed = RngSeed::new(args.seed);
    let mu_flag = match (args.mu, args.epsilon) {
        (Some(mu), _) => Some(mu),
        (None, Some(eps)) => Some(epsilon_to_mu(eps, 1e-3)),
        (None, None) => None,
    };
    match args.experiment {
        ExperimentKind::Single => {
            let mut cfg = SingleTestConfig::desk_scale();
            if args.paper_scale {
                cfg.trials = 100_000;
            }
            if let Some(mu) = mu_flag {
                cfg.mu = PrivacyBudget::new(mu)?;
            }
            if let Some(alpha) = args.alpha {
                cfg.alpha = alpha;
            }
            if let Some(trials) = args.trials {
                cfg.trials = trials;
            }
            if let Some(rule) = args.lambda_rule {
                cfg.lambda_rule = match rule {
                    LambdaRuleArg::SqrtLog => LambdaRule::SqrtLog,
                    LambdaRuleArg::SqrtTwoLog => LambdaRule::SqrtTwoLog,
                };
            }
            if let Some(grid) = &args.log10_delta_grid {
                cfg.log10_delta_grid = parse_float_list(grid, "--log10-delta-grid")?;
            }
            let rows = run_single_test_sweep(&cfg, &seed)?;
            let mut manifest = RunManifest::new("simulate");
            manifest
                .arg("experiment", "single")
                .arg("mu", cfg.mu.mu())
                .arg("alpha", cfg.alpha)
                .arg("trials", cfg.trials)
                .arg(
                    "lambda_rule",
                    match cfg.lambda_rule {
                        LambdaRule::SqrtLog => "sqrt_log",
                        LambdaRule::SqrtTwoLog => "sqrt_two_log",
                    },
                )
                .arg(
                    "log10_delta_grid",
                    cfg.log10_delta_grid
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(";"),
                )
                .seed(args.seed);
            manifest.write_with_output(&args.out, &rows_to_csv(&rows))
        }
        ExperimentKind::MultiIndep | ExperimentKind::MultiCorr => {
            let mut cfg = MultiTestConfig::desk_scale();
            if args.paper_scale {
                cfg.m = 100_000;
                cfg.m1 = 100;
                cfg.trials = 100;
            }
            cfg.rho = match args.experiment {
                ExperimentKind::MultiCorr => args.rho.unwrap_or(0.3),
                _ => args.rho.unwrap_or(0.0),
            };
            if let Some(mu) = mu_flag {
                cfg.mu = PrivacyBudget::new(mu)?;
            }
            if let Some(alpha) = args.alpha {
                cfg.alpha = alpha;
            }
            if let Some(delta) = args.delta {
                cfg.delta = Sensitivity::new(delta)?;
            }
            if let Some(trials) = args.trials {
                cfg.trials = trials;
            }
            if let Some(m) = args.m {
                cfg.m = m;
            }
            if let Some(m1) = args.m1 {
                cfg.m1 = m1;
            }
            if let Some(eta) = args.eta {
                cfg.eta_alt = eta;
            }
            if let Some(s) = args.s {
                cfg.s_fixed = s;
            }
            if let Some(s_min) = args.s_min {
                cfg.s_min = s_min;
            }
            if let Some(f) = args.mu0_fraction {
                cfg.mu0_fraction = f;
            }
            let sweep = match args.sweep {
                Some(SweepArg::Delta) | None => SweepParam::Delta,
                Some(SweepArg::M1) => SweepParam::M1,
                Some(SweepArg::Eta) => SweepParam::Eta,
                Some(SweepArg::Epsilon) => SweepParam::Epsilon,
            };
            let grid = match &args.sweep_grid {
                Some(text) => parse_float_list(text, "--sweep-grid")?,
                // Default: the current configuration as a one-point sweep.
                None => vec![cfg.delta.delta().log10()],
            };
            let rows = run_multi_sweep(&cfg, sweep, &grid, &seed)?;
            let mut manifest = RunManifest::new("simulate");
            manifest
                .arg(
                    "experiment",
                    match args.experiment {
                        ExperimentKind::MultiCorr => "multi-corr",
                        _ => "multi-indep",
                    },
                )
                .arg("m", cfg.m)
                .arg("m1", cfg.m1)
                .arg("eta_alt", cfg.eta_alt)
                .arg("rho", cfg.rho)
                .arg("alpha", cfg.alpha)
                .arg("delta", cfg.delta.delta())
                .arg("mu", cfg.mu.mu())
                .arg("s", cfg.s_fixed)
                .arg("s_min", cfg.s_min)
                .arg("mu0_fraction", cfg.mu0_fraction)
                .arg("trials", cfg.trials)
                .arg("sweep", sweep.as_str())
                .arg(
                    "sweep_grid",
                    grid.iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(";"),
                )
                .seed(args.seed);
            manifest.write_with_output(&args.out, &rows_to_csv(&rows))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_audit(
    noise: NoiseArg,
    n_grid: &str,
    gamma: f64,
    mu: f64,
    trials: usize,
    seed: u64,
    out: &Path,
    delta: f64,
    mu_claimed: Option<f64>,
) -> Result<(), CliError> {
    let noise = match noise {
        NoiseArg::Gaussian => NoiseKind::Gaussian,
        NoiseArg::Gumbel => NoiseKind::Gumbel,
    };
    let cfg = AuditConfig {
        gamma,
        delta: Sensitivity::new(delta)?,
        n_grid: parse_usize_list(n_grid, "--n-grid")?,
        mu: PrivacyBudget::new(mu)?,
        mu_claimed: mu_claimed.unwrap_or(mu / std::f64::consts::SQRT_2),
        trials,
        noise,
    };
    let rows = gdp_evalues::audit::violation_report(&cfg, &RngSeed::new(seed))?;
    let mut manifest = RunManifest::new("audit-selection");
    manifest
        .arg("noise", noise.as_str())
        .arg(
            "n_grid",
            cfg.n_grid
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(";"),
        )
        .arg("gamma", gamma)
        .arg("mu", mu)
        .arg("mu_claimed", cfg.mu_claimed)
        .arg("delta", delta)
        .arg("trials", trials)
        .seed(seed);
    manifest.write_with_output(out, &audit_rows_to_csv(&rows))
}

#[allow(clippy::too_many_arguments)]
fn cmd_gwas(
    input: &Path,
    alpha_grid: &str,
    mu: f64,
    delta: f64,
    s: usize,
    s_min: usize,
    mu0_fraction: f64,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    let records = parse_gwas_tsv(&read_to_string(input)?)?;
    let zscores: Vec<f64> = records.iter().map(|r| r.z).collect();
    let alphas = parse_float_list(alpha_grid, "--alpha-grid")?;
    let rows = run_gwas(
        &zscores,
        &alphas,
        PrivacyBudget::new(mu)?,
        Sensitivity::new(delta)?,
        s,
        s_min,
        mu0_fraction,
        &RngSeed::new(seed),
    )?;
    let mut manifest = RunManifest::new("gwas");
    manifest
        .arg("in", input.display())
        .arg(
            "alpha_grid",
            alphas
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(";"),
        )
        .arg("mu", mu)
        .arg("delta", delta)
        .arg("s", s)
        .arg("s_min", s_min)
        .arg("mu0_fraction", mu0_fraction)
        .seed(seed);
    manifest.write_with_output(out, &rows_to_csv(&rows))
}
