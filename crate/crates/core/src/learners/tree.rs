//! CART-style binary decision tree.
//!
//! Classification splits maximize Gini impurity decrease, regression splits
//! maximize variance reduction. Candidate thresholds are midpoints between
//! consecutive distinct sorted feature values; equal-gain ties resolve to the
//! lowest feature index, then the lowest threshold. Growth stops at
//! max-depth, min-leaf-size, or zero impurity.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{majority_class, Prediction, Task, TreeConfig};
use crate::dataset::{FeatureMatrix, TargetVector};
use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    nodes: Vec<Node>,
    arity: usize,
    task: Task,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "node")]
enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: Prediction,
    },
}

impl TreeModel {
    pub fn task(&self) -> Task {
        self.task
    }

    pub fn feature_arity(&self) -> usize {
        self.arity
    }

    pub fn depth(&self) -> usize {
        fn depth_of(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => {
                    1 + depth_of(nodes, *left).max(depth_of(nodes, *right))
                }
            }
        }
        depth_of(&self.nodes, 0)
    }

    pub fn predict(&self, row: &[f64]) -> Prediction {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

/// Internal targets view with the bookkeeping each task needs.
enum Outcome<'a> {
    Classes { labels: &'a [usize], class_count: usize },
    Reals(&'a [f64]),
}

/// Builds a tree, optionally sampling `subsample` candidate features per
/// split from `rng` (the random-forest hook). `subsample = None` or a value
/// equal to the feature count considers every feature and draws nothing.
pub(crate) fn build_tree(
    features: &FeatureMatrix,
    targets: &TargetVector,
    config: &TreeConfig,
    subsample: Option<usize>,
    rng: Option<&mut ChaCha8Rng>,
) -> Result<TreeModel, ModelError> {
    super::check_nonempty(features, targets)?;
    if config.max_depth == 0 || config.min_leaf_size == 0 {
        return Err(ModelError::InvalidConfig(
            "max_depth and min_leaf_size must be at least 1".into(),
        ));
    }
    let p = features.n_cols();
    if let Some(m) = subsample {
        if m == 0 {
            return Err(ModelError::InvalidConfig("feature subsample of 0".into()));
        }
        if m > p {
            return Err(ModelError::SubsampleTooLarge { m, n: p });
        }
    }
    let outcome = match targets {
        TargetVector::Classes { labels, class_count } => Outcome::Classes {
            labels,
            class_count: *class_count,
        },
        TargetVector::Reals(y) => Outcome::Reals(y),
    };

    let mut builder = Builder {
        features,
        outcome,
        config,
        subsample: subsample.filter(|&m| m < p),
        rng,
        nodes: Vec::new(),
        scratch: (0..p).collect(),
    };
    let rows: Vec<usize> = (0..features.n_rows()).collect();
    builder.grow(rows, 0);
    Ok(TreeModel {
        nodes: builder.nodes,
        arity: p,
        task: targets.task(),
    })
}

struct Builder<'a> {
    features: &'a FeatureMatrix,
    outcome: Outcome<'a>,
    config: &'a TreeConfig,
    subsample: Option<usize>,
    rng: Option<&'a mut ChaCha8Rng>,
    nodes: Vec<Node>,
    scratch: Vec<usize>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    score: f64,
}

impl Builder<'_> {
    /// Appends the subtree for `rows` and returns its root index.
    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let leaf = |nodes: &mut Vec<Node>, value: Prediction| {
            nodes.push(Node::Leaf { value });
            nodes.len() - 1
        };

        if depth >= self.config.max_depth
            || rows.len() < 2 * self.config.min_leaf_size
            || self.is_pure(&rows)
        {
            let value = self.leaf_value(&rows);
            return leaf(&mut self.nodes, value);
        }

        let candidates = self.candidate_features();
        let best = self.best_split(&rows, &candidates);
        let Some(best) = best else {
            let value = self.leaf_value(&rows);
            return leaf(&mut self.nodes, value);
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| self.features.row(r)[best.feature] <= best.threshold);
        debug_assert!(!left_rows.is_empty() && !right_rows.is_empty());

        let at = self.nodes.len();
        self.nodes.push(Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: 0,
            right: 0,
        });
        let left = self.grow(left_rows, depth + 1);
        let right = self.grow(right_rows, depth + 1);
        if let Node::Split {
            left: l, right: r, ..
        } = &mut self.nodes[at]
        {
            *l = left;
            *r = right;
        }
        at
    }

    /// Feature indices to scan, ascending. With subsampling active this is a
    /// fresh seeded draw per split (partial Fisher-Yates), re-sorted so ties
    /// still break toward the lowest index.
    fn candidate_features(&mut self) -> Vec<usize> {
        match (self.subsample, self.rng.as_deref_mut()) {
            (Some(m), Some(rng)) => {
                let p = self.features.n_cols();
                let mut pool: Vec<usize> = std::mem::take(&mut self.scratch);
                for i in 0..m {
                    let j = rng.random_range(i..p);
                    pool.swap(i, j);
                }
                let mut chosen: Vec<usize> = pool[..m].to_vec();
                self.scratch = pool;
                chosen.sort_unstable();
                chosen
            }
            _ => (0..self.features.n_cols()).collect(),
        }
    }

    fn is_pure(&self, rows: &[usize]) -> bool {
        match &self.outcome {
            Outcome::Classes { labels, .. } => {
                let first = labels[rows[0]];
                rows.iter().all(|&r| labels[r] == first)
            }
            Outcome::Reals(y) => {
                let first = y[rows[0]];
                rows.iter().all(|&r| y[r] == first)
            }
        }
    }

    fn leaf_value(&self, rows: &[usize]) -> Prediction {
        match &self.outcome {
            Outcome::Classes { labels, class_count } => Prediction::Class(majority_class(
                rows.iter().map(|&r| labels[r]),
                *class_count,
            )),
            Outcome::Reals(y) => {
                let mean = rows.iter().map(|&r| y[r]).sum::<f64>() / rows.len() as f64;
                Prediction::Real(mean)
            }
        }
    }

    /// Scans candidate features in ascending order and thresholds in
    /// ascending order, keeping a split only when it strictly improves the
    /// score, which realizes the tie-breaking rule.
    fn best_split(&self, rows: &[usize], candidates: &[usize]) -> Option<BestSplit> {
        let n = rows.len() as f64;
        let min_leaf = self.config.min_leaf_size;
        let mut best: Option<BestSplit> = None;

        // a split must beat the parent's score by more than float noise
        let parent_score = match &self.outcome {
            Outcome::Classes { labels, class_count } => {
                let mut counts = vec![0.0_f64; *class_count];
                for &r in rows {
                    counts[labels[r]] += 1.0;
                }
                counts.iter().map(|c| c * c).sum::<f64>() / n
            }
            Outcome::Reals(y) => {
                let sum: f64 = rows.iter().map(|&r| y[r]).sum();
                sum * sum / n
            }
        };
        let improvement_floor = parent_score.abs().max(1.0) * 1e-12;

        let mut order: Vec<usize> = Vec::with_capacity(rows.len());
        for &feature in candidates {
            order.clear();
            order.extend_from_slice(rows);
            order.sort_by(|&a, &b| {
                self.features.row(a)[feature].total_cmp(&self.features.row(b)[feature])
            });

            match &self.outcome {
                Outcome::Classes { labels, class_count } => {
                    let mut left_counts = vec![0.0_f64; *class_count];
                    // running sum of squared class counts on the left side
                    let mut left_sum_sq = 0.0;
                    let mut right_counts = vec![0.0_f64; *class_count];
                    for &r in rows {
                        right_counts[labels[r]] += 1.0;
                    }
                    let mut right_sum_sq: f64 = right_counts.iter().map(|c| c * c).sum();

                    for i in 0..order.len() - 1 {
                        let r = order[i];
                        let label = labels[r];
                        left_sum_sq += 2.0 * left_counts[label] + 1.0;
                        left_counts[label] += 1.0;
                        right_sum_sq -= 2.0 * right_counts[label] - 1.0;
                        right_counts[label] -= 1.0;

                        let nl = i + 1;
                        let v = self.features.row(r)[feature];
                        let v_next = self.features.row(order[i + 1])[feature];
                        if v == v_next || nl < min_leaf || rows.len() - nl < min_leaf {
                            continue;
                        }
                        let score = left_sum_sq / nl as f64
                            + right_sum_sq / (rows.len() - nl) as f64;
                        if score > parent_score + improvement_floor
                            && best.as_ref().is_none_or(|b| score > b.score)
                        {
                            best = Some(BestSplit {
                                feature,
                                threshold: midpoint(v, v_next),
                                score,
                            });
                        }
                    }
                }
                Outcome::Reals(y) => {
                    let total: f64 = rows.iter().map(|&r| y[r]).sum();
                    let mut left_sum = 0.0;
                    for i in 0..order.len() - 1 {
                        let r = order[i];
                        left_sum += y[r];
                        let nl = i + 1;
                        let v = self.features.row(r)[feature];
                        let v_next = self.features.row(order[i + 1])[feature];
                        if v == v_next || nl < min_leaf || rows.len() - nl < min_leaf {
                            continue;
                        }
                        let right_sum = total - left_sum;
                        let score = left_sum * left_sum / nl as f64
                            + right_sum * right_sum / (rows.len() - nl) as f64;
                        if score > parent_score + improvement_floor
                            && best.as_ref().is_none_or(|b| score > b.score)
                        {
                            best = Some(BestSplit {
                                feature,
                                threshold: midpoint(v, v_next),
                                score,
                            });
                        }
                    }
                }
            }
        }
        best
    }
}

/// Midpoint between two distinct sorted values that is guaranteed to send
/// `a` left and `b` right under `x <= t`, even when rounding collapses the
/// midpoint onto `b`.
fn midpoint(a: f64, b: f64) -> f64 {
    debug_assert!(a < b);
    let t = a + (b - a) / 2.0;
    if t < b {
        t
    } else {
        a
    }
}
