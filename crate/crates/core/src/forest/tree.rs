use serde::{Deserialize, Serialize};

use super::{ForestParams, FEATURE_COUNT};
use crate::rng::SplitMix64;

/// Regression tree node. On the wire a split is `{"f","t","l","r"}` and a
/// leaf is `{"v"}`; samples with `x[f] <= t` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Node {
    Split {
        #[serde(rename = "f")]
        feature: usize,
        #[serde(rename = "t")]
        threshold: f64,
        #[serde(rename = "l")]
        left: Box<Node>,
        #[serde(rename = "r")]
        right: Box<Node>,
    },
    Leaf {
        #[serde(rename = "v")]
        value: f64,
    },
}

impl Node {
    pub fn predict(&self, x: &[f64; FEATURE_COUNT]) -> f64 {
        let mut node = self;
        loop {
            match node {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold {
                        left
                    } else {
                        right
                    }
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Split { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    pub(super) fn check(&self) -> Result<(), String> {
        match self {
            Node::Leaf { value } if value.is_finite() => Ok(()),
            Node::Leaf { value } => Err(format!("non-finite leaf {value}")),
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if *feature >= FEATURE_COUNT {
                    return Err(format!("feature index {feature} out of range"));
                }
                if !threshold.is_finite() {
                    return Err(format!("non-finite threshold {threshold}"));
                }
                left.check()?;
                right.check()
            }
        }
    }
}

/// Mean that is exact when all values agree and never leaves `[min, max]`.
pub(crate) fn bounded_mean(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let mut it = values.clone();
    let first = it.next().expect("mean of an empty set");
    let (mut lo, mut hi, mut acc, mut n) = (first, first, 0.0, 1usize);
    for v in it {
        lo = lo.min(v);
        hi = hi.max(v);
        acc += v - first;
        n += 1;
    }
    (first + acc / n as f64).clamp(lo, hi)
}

struct Split {
    feature: usize,
    threshold: f64,
    gain: f64,
}

pub(super) struct TreeBuilder<'a> {
    pub xs: &'a [[f64; FEATURE_COUNT]],
    pub ys: &'a [f64],
    pub params: &'a ForestParams,
}

impl TreeBuilder<'_> {
    pub fn grow(&self, rng: &mut SplitMix64) -> Node {
        let n = self.ys.len();
        let mut sample: Vec<usize> = if self.params.bootstrap {
            (0..n).map(|_| rng.below(n)).collect()
        } else {
            (0..n).collect()
        };
        self.grow_node(&mut sample, 0, rng)
    }

    fn grow_node(&self, sample: &mut [usize], depth: usize, rng: &mut SplitMix64) -> Node {
        let ys = self.ys;
        let value = bounded_mean(sample.iter().map(|&i| ys[i]));
        let first = ys[sample[0]];
        let pure = sample.iter().all(|&i| ys[i] == first);
        if pure || depth >= self.params.max_depth || sample.len() < 2 * self.params.min_samples_leaf
        {
            return Node::Leaf { value };
        }

        let features = self.candidate_features(rng);
        let Some(best) = self.best_split(sample, &features) else {
            return Node::Leaf { value };
        };

        let (left, right) = partition(sample, |i| self.xs[i][best.feature] <= best.threshold);
        let left = self.grow_node(left, depth + 1, rng);
        let right = self.grow_node(right, depth + 1, rng);
        Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// `features_per_split` distinct indices, ascending.
    fn candidate_features(&self, rng: &mut SplitMix64) -> Vec<usize> {
        let k = self.params.features_per_split;
        let mut pool: Vec<usize> = (0..FEATURE_COUNT).collect();
        if k < FEATURE_COUNT {
            for i in 0..k {
                let j = i + rng.below(FEATURE_COUNT - i);
                pool.swap(i, j);
            }
        }
        pool.truncate(k);
        pool.sort_unstable();
        pool
    }

    /// Largest SSE reduction over midpoints of adjacent distinct values.
    /// The reduction of a split into `n_l` and `n_r` samples is
    /// `n_l * n_r / n * (mean_l - mean_r)^2`. Earlier candidates win ties, so
    /// the lowest feature index and then the lowest threshold are preferred.
    fn best_split(&self, sample: &[usize], features: &[usize]) -> Option<Split> {
        let n = sample.len();
        let min_leaf = self.params.min_samples_leaf;
        let total: f64 = sample.iter().map(|&i| self.ys[i]).sum();
        let mut best: Option<Split> = None;
        let mut order = sample.to_vec();

        for &f in features {
            order.sort_by(|&a, &b| self.xs[a][f].total_cmp(&self.xs[b][f]));
            let mut left_sum = 0.0;
            for pos in 1..n {
                left_sum += self.ys[order[pos - 1]];
                if pos < min_leaf || n - pos < min_leaf {
                    continue;
                }
                let lo = self.xs[order[pos - 1]][f];
                let hi = self.xs[order[pos]][f];
                if lo == hi {
                    continue;
                }
                let (nl, nr) = (pos as f64, (n - pos) as f64);
                let diff = left_sum / nl - (total - left_sum) / nr;
                let gain = nl * nr / n as f64 * diff * diff;
                if gain > 0.0 && best.as_ref().is_none_or(|b| gain > b.gain) {
                    let mut threshold = lo + (hi - lo) / 2.0;
                    // adjacent floats can round the midpoint up to `hi`
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some(Split {
                        feature: f,
                        threshold,
                        gain,
                    });
                }
            }
        }
        best
    }
}

fn partition(
    sample: &mut [usize],
    goes_left: impl Fn(usize) -> bool,
) -> (&mut [usize], &mut [usize]) {
    let mut mid = 0;
    for i in 0..sample.len() {
        if goes_left(sample[i]) {
            sample.swap(mid, i);
            mid += 1;
        }
    }
    sample.split_at_mut(mid)
}
