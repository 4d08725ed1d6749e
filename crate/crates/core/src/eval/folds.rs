use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const DEFAULT_FOLDS: usize = 10;

/// Stratified partition of `0..n` into test folds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldPlan {
    pub seed: u64,
    n: usize,
    folds: Vec<Vec<usize>>,
}

impl FoldPlan {
    /// Shuffles every class with `seed` and deals its members round-robin,
    /// continuing where the previous class stopped so fold sizes stay
    /// within one of each other.
    pub fn stratified(labels: &[u32], folds: usize, seed: u64) -> Result<Self> {
        if folds < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 folds, got {folds}")));
        }
        let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, &l) in labels.iter().enumerate() {
            by_class.entry(l).or_default().push(i);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = vec![Vec::new(); folds];
        let mut next = 0;
        for members in by_class.values_mut() {
            members.shuffle(&mut rng);
            for &i in members.iter() {
                out[next].push(i);
                next = (next + 1) % folds;
            }
        }
        for f in &mut out {
            f.sort_unstable();
        }
        Ok(FoldPlan {
            seed,
            n: labels.len(),
            folds: out,
        })
    }

    /// Ten folds, or as many as the smallest class has members.
    pub fn for_labels(labels: &[u32], seed: u64) -> Result<Self> {
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for &l in labels {
            *counts.entry(l).or_insert(0) += 1;
        }
        let (&class, &smallest) = counts
            .iter()
            .min_by_key(|(_, &c)| c)
            .ok_or_else(|| Error::InvalidDataset("no labelled instances".into()))?;
        if counts.len() < 2 {
            return Err(Error::InvalidDataset("cross-validation needs at least two classes".into()));
        }
        if smallest < 2 {
            return Err(Error::InsufficientClassSize { class, count: smallest });
        }
        let k = DEFAULT_FOLDS.min(smallest);
        if k < DEFAULT_FOLDS {
            log::warn!("class {class} has {smallest} instances; using {k} folds");
        }
        Self::stratified(labels, k, seed)
    }

    pub fn len(&self) -> usize {
        self.folds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.folds.is_empty()
    }

    pub fn instance_count(&self) -> usize {
        self.n
    }

    pub fn test(&self, fold: usize) -> &[usize] {
        &self.folds[fold]
    }

    pub fn train(&self, fold: usize) -> Vec<usize> {
        let mut held = vec![false; self.n];
        for &i in &self.folds[fold] {
            held[i] = true;
        }
        (0..self.n).filter(|&i| !held[i]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_class_reduces_fold_count() {
        let labels = [1, 1, 1, 1, 2, 2, 2, 1, 1, 1, 1, 1];
        assert_eq!(FoldPlan::for_labels(&labels, 0).unwrap().len(), 3);
        assert!(matches!(
            FoldPlan::for_labels(&[1, 1, 2], 0),
            Err(Error::InsufficientClassSize { class: 2, count: 1 })
        ));
    }

    proptest! {
        #[test]
        fn partitions_are_exact_and_stratified(
            labels in prop::collection::vec(1u32..4, 20..120),
            seed in any::<u64>(),
            k in 2usize..11,
        ) {
            let plan = FoldPlan::stratified(&labels, k, seed).unwrap();
            prop_assert_eq!(&plan, &FoldPlan::stratified(&labels, k, seed).unwrap());
            let mut seen = vec![0; labels.len()];
            for f in 0..plan.len() {
                for &i in plan.test(f) {
                    seen[i] += 1;
                }
                prop_assert_eq!(plan.train(f).len() + plan.test(f).len(), labels.len());
            }
            prop_assert!(seen.iter().all(|&s| s == 1));
            for class in 1..4 {
                let total = labels.iter().filter(|&&l| l == class).count();
                for f in 0..plan.len() {
                    let here = plan.test(f).iter().filter(|&&i| labels[i] == class).count();
                    let expected = total as f64 / k as f64;
                    prop_assert!((here as f64 - expected).abs() <= 1.0);
                }
            }
            let sizes: Vec<usize> = (0..plan.len()).map(|f| plan.test(f).len()).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }
}
