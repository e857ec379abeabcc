use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synth;

/// Disjoint train/validation/test index sets covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl SplitSpec {
    pub fn len(&self) -> usize {
        self.train.len() + self.val.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Applies a node relabeling `v -> perm[v]` to every part.
    pub fn permuted(&self, perm: &[usize]) -> SplitSpec {
        let map = |ix: &[usize]| ix.iter().map(|&v| perm[v]).collect();
        SplitSpec { train: map(&self.train), val: map(&self.val), test: map(&self.test) }
    }
}

pub const DEFAULT_RATIOS: [f64; 3] = [0.6, 0.2, 0.2];

/// Part sizes: floor of `ratio·n`, then the remainder goes one at a time to the
/// parts with the largest fractional parts (earlier part wins ties).
pub fn part_sizes(n: usize, ratios: &[f64]) -> Result<Vec<usize>> {
    if ratios.is_empty() || ratios.iter().any(|r| r.is_nan() || *r <= 0.0) {
        return Err(Error::InvalidArgument("split ratios must be positive".into()));
    }
    let total: f64 = ratios.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("split ratios sum to {total}, not 1")));
    }
    let exact: Vec<f64> = ratios.iter().map(|r| r * n as f64).collect();
    let mut sizes: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut order: Vec<usize> = (0..ratios.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let remainder = n - sizes.iter().sum::<usize>();
    for &i in order.iter().take(remainder) {
        sizes[i] += 1;
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidArgument(format!("n = {n} is too small for non-empty parts {sizes:?}")));
    }
    Ok(sizes)
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut ix: Vec<usize> = (0..n).collect();
    ix.shuffle(&mut synth::rng(seed));
    ix
}

/// Seeded shuffle followed by contiguous slicing into train/val/test.
pub fn make_splits(n: usize, ratios: [f64; 3], seed: u64) -> Result<SplitSpec> {
    let sizes = part_sizes(n, &ratios)?;
    let ix = shuffled(n, seed);
    let (train, rest) = ix.split_at(sizes[0]);
    let (val, test) = rest.split_at(sizes[1]);
    Ok(SplitSpec { train: train.to_vec(), val: val.to_vec(), test: test.to_vec() })
}

/// `(train, held_out)` pairs for seeded k-fold cross-validation.
pub fn kfold(n: usize, folds: usize, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if folds < 2 || n < folds {
        return Err(Error::InvalidArgument(format!("cannot cut {n} items into {folds} folds")));
    }
    let ix = shuffled(n, seed);
    let sizes = part_sizes(n, &vec![1.0 / folds as f64; folds])?;
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for size in sizes {
        let held: Vec<usize> = ix[start..start + size].to_vec();
        let train: Vec<usize> = ix[..start].iter().chain(&ix[start + size..]).copied().collect();
        out.push((train, held));
        start += size;
    }
    Ok(out)
}
