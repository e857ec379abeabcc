use serde::{Deserialize, Serialize};

use crate::complex::Graph;
use crate::error::{Error, Result};

/// One seeded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub seed: u64,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_epoch: Option<usize>,
    pub epochs_run: usize,
    /// Training loss per epoch (or iteration).
    pub loss_curve: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strength: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub task: String,
    /// Name of `value` in each run, e.g. `accuracy` (equal to micro-F1) or `kendall_tau`.
    pub metric: String,
    pub runs: Vec<RunMetrics>,
    pub mean: f64,
    /// `1.96 · stderr`; absent for a single run.
    pub ci95_half_width: Option<f64>,
}

impl MetricsReport {
    pub fn from_runs(task: &str, metric: &str, runs: Vec<RunMetrics>) -> Self {
        let values: Vec<f64> = runs.iter().map(|r| r.value).collect();
        let (mean, ci95_half_width) = mean_ci95(&values);
        MetricsReport { task: task.into(), metric: metric.into(), runs, mean, ci95_half_width }
    }

    pub fn values(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.value).collect()
    }
}

/// Mean and `1.96 · s/√m` (sample standard deviation); no interval below two values.
pub fn mean_ci95(values: &[f64]) -> (f64, Option<f64>) {
    let m = values.len();
    if m == 0 {
        return (f64::NAN, None);
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    if m < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    (mean, Some(1.96 * (var / m as f64).sqrt()))
}

pub fn accuracy(predicted: &[usize], labels: &[usize], index: &[usize]) -> f64 {
    if index.is_empty() {
        return f64::NAN;
    }
    let hits = index.iter().filter(|&&i| predicted[i] == labels[i]).count();
    hits as f64 / index.len() as f64
}

/// Fraction of edges whose endpoints share a label.
pub fn compute_homophily(g: &Graph) -> Result<f64> {
    let labels = g.labels.as_ref().ok_or_else(|| Error::MissingData("labels".into()))?;
    if g.edge_count() == 0 {
        return Err(Error::InvalidArgument("homophily needs at least one edge".into()));
    }
    let same = g.edges().iter().filter(|(u, v)| labels[*u] == labels[*v]).count();
    Ok(same as f64 / g.edge_count() as f64)
}

/// Kendall tau-b in `O(n log n)`: sort by `(a, b)`, then count discordant pairs as
/// merge-sort inversions in `b`.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!("kendall_tau on lengths {} and {}", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(Error::InvalidArgument("kendall_tau needs at least two points".into()));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::NonFinite("kendall_tau input".into()));
    }
    let n = a.len();
    let mut pairs: Vec<(f64, f64)> = a.iter().copied().zip(b.iter().copied()).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));

    let n0 = (n * (n - 1) / 2) as i64;
    let tie_pairs = |runs: &mut dyn Iterator<Item = usize>| runs.map(|t| (t * (t - 1) / 2) as i64).sum::<i64>();
    let n1 = tie_pairs(&mut run_lengths(&pairs, |x, y| x.0 == y.0));
    let n3 = tie_pairs(&mut run_lengths(&pairs, |x, y| x == y));

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = vec![0.0; n];
    let swaps = merge_count(&mut ys, &mut buf) as i64;
    let n2 = tie_pairs(&mut run_lengths(&ys, |x, y| x == y));

    if n1 == n0 || n2 == n0 {
        return Err(Error::ConstantInput);
    }
    let numerator = n0 - n1 - n2 + n3 - 2 * swaps;
    Ok(numerator as f64 / (((n0 - n1) as f64) * ((n0 - n2) as f64)).sqrt())
}

fn run_lengths<'a, T>(xs: &'a [T], eq: impl Fn(&T, &T) -> bool + 'a) -> impl Iterator<Item = usize> + 'a {
    let mut i = 0;
    std::iter::from_fn(move || {
        if i >= xs.len() {
            return None;
        }
        let start = i;
        while i + 1 < xs.len() && eq(&xs[i + 1], &xs[start]) {
            i += 1;
        }
        i += 1;
        Some(i - start)
    })
}

/// Sorts `xs` ascending, returning the number of strict inversions.
fn merge_count(xs: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = xs.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = {
        let (l, r) = xs.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(l, bl) + merge_count(r, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if xs[j] < xs[i] {
            buf[k] = xs[j];
            count += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = xs[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&xs[i..mid]);
    k += mid - i;
    buf[k..n].copy_from_slice(&xs[j..n]);
    xs.copy_from_slice(&buf[..n]);
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_examples() {
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        let t = kendall_tau(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((t - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn tau_with_ties() {
        // a ties (1,2); b ties (0,1). Pairs: (0,1) b-tie, (0,2) +, (0,3) +, (1,2) a-tie,
        // (1,3) +, (2,3) +  => 4 concordant, n0=6, n1=1, n2=1.
        let t = kendall_tau(&[1.0, 2.0, 2.0, 3.0], &[1.0, 1.0, 2.0, 3.0]).unwrap();
        assert!((t - 4.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn tau_errors() {
        assert!(matches!(kendall_tau(&[1.0, 2.0], &[1.0]), Err(Error::DimensionMismatch(_))));
        assert!(matches!(kendall_tau(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::ConstantInput)));
        assert!(matches!(kendall_tau(&[1.0, 2.0], &[5.0, 5.0]), Err(Error::ConstantInput)));
        assert!(kendall_tau(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn homophily_examples() {
        let g = crate::synth::complete_graph(3).with_labels(vec![0, 0, 1]).unwrap();
        assert!((compute_homophily(&g).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let c6 = crate::synth::cycle_graph(6).with_labels(vec![0, 1, 0, 1, 0, 1]).unwrap();
        assert_eq!(compute_homophily(&c6).unwrap(), 0.0);
        let same = crate::synth::cycle_graph(6).with_labels(vec![2; 6]).unwrap();
        assert_eq!(compute_homophily(&same).unwrap(), 1.0);
        assert!(compute_homophily(&crate::synth::cycle_graph(4)).is_err());
    }

    #[test]
    fn ci_needs_two_runs() {
        assert_eq!(mean_ci95(&[0.5]), (0.5, None));
        let (m, ci) = mean_ci95(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((ci.unwrap() - 1.96).abs() < 1e-12);
    }
}
