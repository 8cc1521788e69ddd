//! Small statistical helpers shared by the simulation harness and tests.

/// Arithmetic mean; 0 for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean from the sample standard deviation.
pub fn standard_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n as f64 - 1.0);
    (var / n as f64).sqrt()
}

/// Standard error of a sample proportion p over n Bernoulli trials.
pub fn proportion_se(p: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

/// One-sample Kolmogorov–Smirnov statistic against a CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Critical KS value at the given level (supports 0.05 and 0.01), using
/// Stephens' finite-sample correction.
pub fn ks_critical(n: usize, level: f64) -> f64 {
    let c = if level <= 0.01 { 1.6276 } else { 1.3581 };
    let sqrt_n = (n as f64).sqrt();
    c / (sqrt_n + 0.12 + 0.11 / sqrt_n)
}
