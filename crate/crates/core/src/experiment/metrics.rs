use crate::experiment::sim::{StepLog, ACCEPTANCE_WINDOW};

/// Per-exchange time series derived from a run's logs.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsSeries {
    /// Divergence before any exchange.
    pub initial_jsd: f64,
    pub step: Vec<u64>,
    pub jsd_c: Vec<f64>,
    /// Acceptance rate over the trailing window, recomputed from the
    /// acceptance flags.
    pub acceptance_rate: Vec<f64>,
    pub entropy_a: Vec<f64>,
    pub entropy_b: Vec<f64>,
}

impl MetricsSeries {
    pub fn from_logs(initial_jsd: f64, logs: &[StepLog]) -> Self {
        let accepted: Vec<bool> = logs.iter().map(|l| l.outcome.accepted).collect();
        MetricsSeries {
            initial_jsd,
            step: logs.iter().map(|l| l.step).collect(),
            jsd_c: logs.iter().map(|l| l.jsd_c).collect(),
            acceptance_rate: acceptance_rate(&accepted, ACCEPTANCE_WINDOW),
            entropy_a: logs.iter().map(|l| l.entropy_a).collect(),
            entropy_b: logs.iter().map(|l| l.entropy_b).collect(),
        }
    }

    /// Divergence after the last exchange, or the initial value for an empty
    /// run.
    pub fn final_jsd(&self) -> f64 {
        self.jsd_c.last().copied().unwrap_or(self.initial_jsd)
    }

    /// First exchange index at which both agents' mean likelihood entropy is
    /// below `threshold`, per agent.
    pub fn first_below(&self, threshold: f64) -> [Option<usize>; 2] {
        [
            self.entropy_a.iter().position(|&h| h < threshold),
            self.entropy_b.iter().position(|&h| h < threshold),
        ]
    }
}

/// Fraction of `true` over the trailing `window` entries, at every position.
pub fn acceptance_rate(accepted: &[bool], window: usize) -> Vec<f64> {
    assert!(window > 0);
    let mut out = Vec::with_capacity(accepted.len());
    let mut in_window = 0usize;
    for (i, &a) in accepted.iter().enumerate() {
        in_window += usize::from(a);
        if i >= window && accepted[i - window] {
            in_window -= 1;
        }
        out.push(in_window as f64 / (i + 1).min(window) as f64);
    }
    out
}

/// Means of the first and last quarter of a series.
pub fn quartile_means(series: &[f64]) -> Option<(f64, f64)> {
    let q = series.len() / 4;
    if q == 0 {
        return None;
    }
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    Some((mean(&series[..q]), mean(&series[series.len() - q..])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trailing_acceptance_rate() {
        assert_eq!(acceptance_rate(&[true; 5], 3), vec![1.0; 5]);
        let r = acceptance_rate(&[true, false, false, true, true], 2);
        assert_eq!(r, vec![1.0, 0.5, 0.0, 0.5, 1.0]);
        assert!(acceptance_rate(&[], 200).is_empty());
    }

    #[test]
    fn quartiles() {
        let s: Vec<f64> = (0..8).map(f64::from).collect();
        assert_eq!(quartile_means(&s), Some((0.5, 6.5)));
        assert_eq!(quartile_means(&[1.0, 2.0]), None);
    }
}
