//! Holdout, k-fold, and leave-one-out index splitting, all seeded.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::EvalError;
use crate::rng::substream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "scheme")]
pub enum SplitScheme {
    Holdout { train_fraction: f64 },
    KFold { k: usize },
    Loocv,
}

/// A splitting recipe: scheme, seed, and (for classification) whether k-fold
/// test folds should preserve class proportions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    #[serde(flatten)]
    pub scheme: SplitScheme,
    pub seed: u64,
    /// Only meaningful for k-fold on classification targets; ignored
    /// elsewhere.
    pub stratify: bool,
}

impl SplitPlan {
    /// Unstratified shuffle split.
    pub fn holdout(train_fraction: f64, seed: u64) -> Self {
        SplitPlan {
            scheme: SplitScheme::Holdout { train_fraction },
            seed,
            stratify: false,
        }
    }

    /// Stratification is on by default; classification reproductions assume
    /// it.
    pub fn kfold(k: usize, seed: u64) -> Self {
        SplitPlan {
            scheme: SplitScheme::KFold { k },
            seed,
            stratify: true,
        }
    }

    pub fn loocv() -> Self {
        SplitPlan {
            scheme: SplitScheme::Loocv,
            seed: 0,
            stratify: false,
        }
    }

    pub fn reseeded(&self, seed: u64) -> SplitPlan {
        SplitPlan { seed, ..*self }
    }
}

/// Produces `(train indices, test indices)` pairs over `0..n`, sorted
/// ascending within each side. `labels` drives stratification when the plan
/// asks for it.
pub fn make_splits(
    n: usize,
    plan: &SplitPlan,
    labels: Option<&[usize]>,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>, EvalError> {
    if n < 2 {
        return Err(EvalError::BadSplit {
            n,
            detail: "need at least two rows".into(),
        });
    }
    match plan.scheme {
        SplitScheme::Holdout { train_fraction } => {
            if !(train_fraction > 0.0 && train_fraction < 1.0) {
                return Err(EvalError::BadSplit {
                    n,
                    detail: format!("train fraction {train_fraction} outside (0,1)"),
                });
            }
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut substream(plan.seed, 0));
            let train_size = (train_fraction * n as f64).floor() as usize;
            if train_size == 0 || train_size == n {
                return Err(EvalError::BadSplit {
                    n,
                    detail: "holdout leaves an empty side".into(),
                });
            }
            let mut train = perm[..train_size].to_vec();
            let mut test = perm[train_size..].to_vec();
            train.sort_unstable();
            test.sort_unstable();
            Ok(vec![(train, test)])
        }
        SplitScheme::KFold { k } => {
            if k < 2 || k > n {
                return Err(EvalError::BadSplit {
                    n,
                    detail: format!("k = {k} outside 2..={n}"),
                });
            }
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut substream(plan.seed, 0));

            let mut fold_of = vec![0usize; n];
            match labels.filter(|_| plan.stratify) {
                Some(labels) => {
                    if labels.len() != n {
                        return Err(EvalError::BadSplit {
                            n,
                            detail: format!("{} labels for {n} rows", labels.len()),
                        });
                    }
                    // group the shuffled order by label, then deal the groups
                    // onto folds with one global round-robin counter so fold
                    // sizes still differ by at most one
                    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                    for &idx in &perm {
                        groups.entry(labels[idx]).or_default().push(idx);
                    }
                    let mut counter = 0;
                    for members in groups.values() {
                        for &idx in members {
                            fold_of[idx] = counter % k;
                            counter += 1;
                        }
                    }
                }
                None => {
                    for (i, &idx) in perm.iter().enumerate() {
                        fold_of[idx] = i % k;
                    }
                }
            }

            let mut splits = Vec::with_capacity(k);
            for fold in 0..k {
                let test: Vec<usize> = (0..n).filter(|&i| fold_of[i] == fold).collect();
                let train: Vec<usize> = (0..n).filter(|&i| fold_of[i] != fold).collect();
                if test.is_empty() || train.is_empty() {
                    return Err(EvalError::BadSplit {
                        n,
                        detail: format!("fold {fold} has an empty side"),
                    });
                }
                splits.push((train, test));
            }
            Ok(splits)
        }
        SplitScheme::Loocv => Ok((0..n)
            .map(|i| {
                let train: Vec<usize> = (0..n).filter(|&j| j != i).collect();
                (train, vec![i])
            })
            .collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holdout_sizes_follow_the_floor_rule() {
        let splits = make_splits(286, &SplitPlan::holdout(0.7, 1), None).unwrap();
        assert_eq!(splits.len(), 1);
        let (train, test) = &splits[0];
        assert_eq!(train.len(), 200);
        assert_eq!(test.len(), 86);
    }

    #[test]
    fn kfold_sizes_differ_by_at_most_one() {
        // 286 = 10 * 28 + 6: six folds of 29 and four of 28
        let splits = make_splits(286, &SplitPlan::kfold(10, 2).reseeded(5), None).unwrap();
        let mut sizes: Vec<usize> = splits.iter().map(|(_, t)| t.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![28, 28, 28, 28, 29, 29, 29, 29, 29, 29]);
    }

    #[test]
    fn kfold_test_folds_partition_the_indices() {
        let splits = make_splits(53, &SplitPlan::kfold(7, 11), None).unwrap();
        let mut seen = vec![false; 53];
        for (train, test) in &splits {
            for &i in test {
                assert!(!seen[i], "index {i} in two test folds");
                seen[i] = true;
            }
            let mut joined: Vec<usize> = train.iter().chain(test).copied().collect();
            joined.sort_unstable();
            assert_eq!(joined, (0..53).collect::<Vec<_>>());
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn stratified_folds_balance_the_classes() {
        // 40 rows, 10 of class 1; every fold of 5 gets at least one
        let labels: Vec<usize> = (0..40).map(|i| usize::from(i % 4 == 0)).collect();
        let plan = SplitPlan::kfold(5, 3);
        let splits = make_splits(40, &plan, Some(&labels)).unwrap();
        for (_, test) in &splits {
            let ones = test.iter().filter(|&&i| labels[i] == 1).count();
            assert_eq!(ones, 2, "stratified fold should hold 2 of 10 ones");
            assert_eq!(test.len(), 8);
        }
    }

    #[test]
    fn loocv_holds_out_each_index_once() {
        let splits = make_splits(5, &SplitPlan::loocv(), None).unwrap();
        assert_eq!(splits.len(), 5);
        for (i, (train, test)) in splits.iter().enumerate() {
            assert_eq!(test, &vec![i]);
            assert_eq!(train.len(), 4);
            assert!(!train.contains(&i));
        }
    }

    #[test]
    fn split_errors() {
        assert!(make_splits(1, &SplitPlan::loocv(), None).is_err());
        assert!(make_splits(5, &SplitPlan::kfold(6, 0), None).is_err());
        assert!(make_splits(5, &SplitPlan::kfold(1, 0), None).is_err());
        assert!(make_splits(5, &SplitPlan::holdout(0.1, 0), None).is_err());
        assert!(make_splits(5, &SplitPlan::holdout(1.0, 0), None).is_err());
    }

    #[test]
    fn splits_are_seed_deterministic() {
        let a = make_splits(30, &SplitPlan::kfold(3, 9), None).unwrap();
        let b = make_splits(30, &SplitPlan::kfold(3, 9), None).unwrap();
        assert_eq!(a, b);
        let c = make_splits(30, &SplitPlan::kfold(3, 10), None).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn train_and_test_never_overlap() {
        for plan in [
            SplitPlan::holdout(0.7, 4),
            SplitPlan::kfold(4, 4),
            SplitPlan::loocv(),
        ] {
            for (train, test) in make_splits(17, &plan, None).unwrap() {
                for i in &test {
                    assert!(!train.contains(i));
                }
            }
        }
    }
}
