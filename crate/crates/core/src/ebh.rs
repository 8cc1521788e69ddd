//! The e-BH procedure: reject the k* largest e-values where
//! k* = max{k : E_(k) ≥ m/(αk)}, FDR-valid under arbitrary dependence.

use crate::error::Error;
use std::collections::BTreeSet;

/// log of the e-BH boundary m/(αk); margin computations stay in log space.
pub(crate) fn log_ebh_threshold(m: usize, alpha: f64, k: usize) -> f64 {
    (m as f64).ln() - alpha.ln() - (k as f64).ln()
}

/// Rejection summary of one e-BH run.
#[derive(Debug, Clone, PartialEq)]
pub struct TestingReport {
    pub k_star: usize,
    /// Indices of the k* largest values (descending value, ties by index).
    pub rejected: Vec<usize>,
    /// Filled in when evaluated against a ground truth.
    pub fdp: Option<f64>,
    pub tp_fraction: Option<f64>,
}

/// Known signal set for simulation metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub signal_indices: BTreeSet<usize>,
}

impl GroundTruth {
    pub fn new(signal_indices: impl IntoIterator<Item = usize>) -> Self {
        GroundTruth {
            signal_indices: signal_indices.into_iter().collect(),
        }
    }

    pub fn m1(&self) -> usize {
        self.signal_indices.len()
    }
}

/// Run e-BH at level alpha over raw nonnegative values.
pub fn ebh(es: &[f64], alpha: f64) -> Result<TestingReport, Error> {
    if es.is_empty() {
        return Err(Error::EmptyInput("ebh"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!(
            "ebh requires alpha in (0,1), got {alpha}"
        )));
    }
    if let Some(&bad) = es.iter().find(|v| v.is_nan() || **v < 0.0) {
        return Err(Error::domain(format!(
            "ebh requires nonnegative values, got {bad}"
        )));
    }
    let m = es.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| es[b].partial_cmp(&es[a]).unwrap().then_with(|| a.cmp(&b)));
    let m_f = m as f64;
    let mut k_star = 0;
    for (pos, &idx) in order.iter().enumerate() {
        let k = pos + 1;
        if es[idx] >= m_f / (alpha * k as f64) {
            k_star = k;
        }
    }
    let rejected = order[..k_star].to_vec();
    Ok(TestingReport {
        k_star,
        rejected,
        fdp: None,
        tp_fraction: None,
    })
}

/// Realized false discovery proportion and true-positive fraction.
///
/// fdp uses the max(1, |rejected|) convention so an empty rejection set
/// scores zero; tp_fraction is 0 when there are no signals.
pub fn fdp_and_tp(report: &TestingReport, truth: &GroundTruth) -> (f64, f64) {
    let rejected = report.rejected.len();
    let true_pos = report
        .rejected
        .iter()
        .filter(|i| truth.signal_indices.contains(i))
        .count();
    let false_pos = rejected - true_pos;
    let fdp = false_pos as f64 / rejected.max(1) as f64;
    let tp_fraction = if truth.m1() == 0 {
        0.0
    } else {
        true_pos as f64 / truth.m1() as f64
    };
    (fdp, tp_fraction)
}

/// Convenience: run e-BH and attach metrics against the truth.
pub fn ebh_with_truth(es: &[f64], alpha: f64, truth: &GroundTruth) -> Result<TestingReport, Error> {
    let mut report = ebh(es, alpha)?;
    let (fdp, tp) = fdp_and_tp(&report, truth);
    report.fdp = Some(fdp);
    report.tp_fraction = Some(tp);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_example() {
        // (10, 9, 1, 0.1), m = 4, alpha = 0.5: thresholds 8, 4, 8/3, 2.
        let report = ebh(&[10.0, 9.0, 1.0, 0.1], 0.5).unwrap();
        assert_eq!(report.k_star, 2);
        assert_eq!(report.rejected, vec![0, 1]);
    }

    #[test]
    fn all_zeros_reject_nothing() {
        let report = ebh(&[0.0; 6], 0.2).unwrap();
        assert_eq!(report.k_star, 0);
        assert!(report.rejected.is_empty());
    }

    #[test]
    fn boundary_value_rejects_everything() {
        let m = 5;
        let alpha = 0.25;
        let v = m as f64 / alpha;
        let report = ebh(&vec![v; m], alpha).unwrap();
        assert_eq!(report.k_star, m);
    }

    #[test]
    fn invalid_inputs() {
        assert!(ebh(&[], 0.5).is_err());
        assert!(ebh(&[1.0], 0.0).is_err());
        assert!(ebh(&[1.0], 1.0).is_err());
        assert!(ebh(&[-1.0], 0.5).is_err());
        assert!(ebh(&[f64::NAN], 0.5).is_err());
    }

    #[test]
    fn ties_break_by_index() {
        let report = ebh(&[8.0, 8.0, 8.0, 0.0], 0.5).unwrap();
        assert_eq!(report.k_star, 3);
        assert_eq!(report.rejected, vec![0, 1, 2]);
    }

    #[test]
    fn scale_threshold_identity() {
        // Rejecting i iff E_i >= m/(alpha k*) reproduces the e-BH set.
        let es = [3.0, 40.0, 0.2, 11.0, 11.0, 7.0, 0.0, 25.0];
        let alpha = 0.3;
        let report = ebh(&es, alpha).unwrap();
        let cutoff = es.len() as f64 / (alpha * report.k_star as f64);
        let by_cutoff: Vec<usize> = (0..es.len()).filter(|&i| es[i] >= cutoff).collect();
        let mut rejected = report.rejected.clone();
        rejected.sort_unstable();
        assert_eq!(rejected, by_cutoff);
    }

    #[test]
    fn metrics_counting() {
        let truth = GroundTruth::new([2, 3]);
        let report = TestingReport {
            k_star: 2,
            rejected: vec![1, 2],
            fdp: None,
            tp_fraction: None,
        };
        assert_eq!(fdp_and_tp(&report, &truth), (0.5, 0.5));

        let empty = TestingReport {
            k_star: 0,
            rejected: vec![],
            fdp: None,
            tp_fraction: None,
        };
        assert_eq!(fdp_and_tp(&empty, &truth), (0.0, 0.0));

        let exact = TestingReport {
            k_star: 2,
            rejected: vec![2, 3],
            fdp: None,
            tp_fraction: None,
        };
        assert_eq!(fdp_and_tp(&exact, &truth), (0.0, 1.0));

        let no_signals = GroundTruth::new([]);
        assert_eq!(fdp_and_tp(&report, &no_signals), (1.0, 0.0));
    }

    /// Independent maximizer of {k : E_(k) >= m/(alpha k)} by explicit scan
    /// over a descending sort.
    fn brute_force_k_star(es: &[f64], alpha: f64) -> usize {
        let mut sorted = es.to_vec();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let m = es.len() as f64;
        (1..=es.len())
            .filter(|&k| sorted[k - 1] >= m / (alpha * k as f64))
            .max()
            .unwrap_or(0)
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            es in prop::collection::vec(0.0f64..50.0, 1..12),
            alpha in 0.05f64..0.95,
        ) {
            let report = ebh(&es, alpha).unwrap();
            prop_assert_eq!(report.k_star, brute_force_k_star(&es, alpha));
        }

        #[test]
        fn raising_a_value_never_decreases_k_star(
            es in prop::collection::vec(0.0f64..50.0, 1..12),
            alpha in 0.05f64..0.95,
            bump in 0.0f64..100.0,
            pick in any::<prop::sample::Index>(),
        ) {
            let before = ebh(&es, alpha).unwrap().k_star;
            let mut raised = es.clone();
            let i = pick.index(raised.len());
            raised[i] += bump;
            let after = ebh(&raised, alpha).unwrap().k_star;
            prop_assert!(after >= before);
        }

        #[test]
        fn rejected_are_the_top_k(
            es in prop::collection::vec(0.0f64..50.0, 1..12),
            alpha in 0.05f64..0.95,
        ) {
            let report = ebh(&es, alpha).unwrap();
            prop_assert_eq!(report.rejected.len(), report.k_star);
            if report.k_star > 0 {
                let min_rej = report
                    .rejected
                    .iter()
                    .map(|&i| es[i])
                    .fold(f64::INFINITY, f64::min);
                for (i, &v) in es.iter().enumerate() {
                    if !report.rejected.contains(&i) {
                        prop_assert!(v <= min_rej);
                    }
                }
            }
        }
    }
}
