use std::collections::BTreeMap;
use std::fmt;

use crate::features::Dataset;
use crate::scalar::Scalar;

use super::MembershipVector;

/// Shannon entropy (bits) of a class histogram.
pub fn entropy<F: Scalar>(counts: &[usize]) -> F {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return F::zero();
    }
    let nf = F::of_usize(n);
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = F::of_usize(c) / nf;
            -p * p.log2()
        })
        .sum()
}

/// `H(parent) - weighted H(children)` for a binary split.
pub fn information_gain<F: Scalar>(parent: &[usize], left: &[usize], right: &[usize]) -> F {
    let n = F::of_usize(parent.iter().sum());
    let nl = F::of_usize(left.iter().sum());
    let nr = F::of_usize(right.iter().sum());
    let children = (nl * entropy::<F>(left) + nr * entropy::<F>(right)) / n;
    (entropy::<F>(parent) - children).max(F::zero())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeConfig {
    /// Partitions smaller than this become leaves.
    pub min_size: usize,
    pub max_depth: Option<usize>,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            min_size: 2,
            max_depth: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TreeNode<F> {
    /// Training class histogram of the partition, aligned with the tree's
    /// class list.
    Leaf { counts: Vec<usize> },
    /// `x[feature] >= threshold` goes to `at_least`, the rest to `below`.
    Split {
        feature: usize,
        threshold: F,
        gain: F,
        below: Box<TreeNode<F>>,
        at_least: Box<TreeNode<F>>,
    },
}

/// Binary decision tree grown by information gain over midpoint thresholds,
/// without pruning.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionTree<F> {
    pub classes: Vec<u32>,
    pub root: TreeNode<F>,
    pub feature_names: Vec<String>,
}

struct Grower<'a, F> {
    rows: Vec<&'a [F]>,
    labels: Vec<usize>,
    k: usize,
    config: TreeConfig,
}

impl<F: Scalar> Grower<'_, F> {
    fn histogram(&self, idx: &[usize]) -> Vec<usize> {
        let mut h = vec![0; self.k];
        for &i in idx {
            h[self.labels[i]] += 1;
        }
        h
    }

    /// Best `(gain, feature, threshold)`; ties keep the earliest feature and
    /// the smallest threshold.
    fn best_split(&self, idx: &[usize], parent: &[usize]) -> Option<(F, usize, F)> {
        let d = self.rows.first().map_or(0, |r| r.len());
        let mut best: Option<(F, usize, F)> = None;
        let mut order = idx.to_vec();
        for f in 0..d {
            order.sort_by(|&a, &b| self.rows[a][f].partial_cmp(&self.rows[b][f]).unwrap().then(a.cmp(&b)));
            let mut left = vec![0usize; self.k];
            let mut right = parent.to_vec();
            for w in 0..order.len() - 1 {
                let c = self.labels[order[w]];
                left[c] += 1;
                right[c] -= 1;
                let (lo, hi) = (self.rows[order[w]][f], self.rows[order[w + 1]][f]);
                if lo == hi {
                    continue;
                }
                let gain = information_gain::<F>(parent, &left, &right);
                if best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, f, (lo + hi) / F::of(2.0)));
                }
            }
        }
        best
    }

    fn grow(&self, idx: &[usize], depth: usize) -> TreeNode<F> {
        let counts = self.histogram(idx);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let capped = self.config.max_depth.is_some_and(|m| depth >= m);
        if pure || capped || idx.len() < self.config.min_size.max(2) {
            return TreeNode::Leaf { counts };
        }
        let Some((gain, feature, threshold)) = self.best_split(idx, &counts) else {
            return TreeNode::Leaf { counts };
        };
        let (at_least, below): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| self.rows[i][feature] >= threshold);
        TreeNode::Split {
            feature,
            threshold,
            gain,
            below: Box::new(self.grow(&below, depth + 1)),
            at_least: Box::new(self.grow(&at_least, depth + 1)),
        }
    }
}

impl<F: Scalar> DecisionTree<F> {
    /// Panics if `train` has unlabeled instances.
    pub fn fit(train: &Dataset<F>, config: TreeConfig) -> Self {
        let labels = train.require_labels().expect("C4.5 needs a labelled training set");
        let classes: Vec<u32> = train.class_counts().into_keys().collect();
        let slot: BTreeMap<u32, usize> = classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let grower = Grower {
            rows: train.rows().collect(),
            labels: labels.iter().map(|l| slot[l]).collect(),
            k: classes.len(),
            config,
        };
        let all: Vec<usize> = (0..train.len()).collect();
        let root = if all.is_empty() {
            TreeNode::Leaf { counts: vec![0; classes.len()] }
        } else {
            grower.grow(&all, 0)
        };
        DecisionTree {
            classes,
            root,
            feature_names: train.feature_names.clone(),
        }
    }

    pub fn from_root(classes: Vec<u32>, root: TreeNode<F>) -> Self {
        DecisionTree {
            classes,
            root,
            feature_names: Vec::new(),
        }
    }

    fn leaf(&self, x: &[F]) -> &[usize] {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { counts } => return counts,
                TreeNode::Split { feature, threshold, below, at_least, .. } => {
                    node = if x[*feature] >= *threshold { at_least } else { below };
                }
            }
        }
    }

    /// Class proportions of the leaf `x` falls into.
    pub fn predict(&self, x: &[F]) -> MembershipVector<F> {
        let counts = self.leaf(x);
        MembershipVector::from_weights(self.classes.clone(), counts.iter().map(|&c| F::of_usize(c)).collect())
    }

    pub fn depth(&self) -> usize {
        fn go<F>(n: &TreeNode<F>) -> usize {
            match n {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { below, at_least, .. } => 1 + go(below).max(go(at_least)),
            }
        }
        go(&self.root)
    }

    /// Gains of all internal nodes, pre-order.
    pub fn split_gains(&self) -> Vec<F> {
        fn go<F: Copy>(n: &TreeNode<F>, out: &mut Vec<F>) {
            if let TreeNode::Split { gain, below, at_least, .. } = n {
                out.push(*gain);
                go(below, out);
                go(at_least, out);
            }
        }
        let mut out = Vec::new();
        go(&self.root, &mut out);
        out
    }
}

impl<F: Scalar> fmt::Display for DecisionTree<F> {
    /// Indented rule listing.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go<F: Scalar>(t: &DecisionTree<F>, n: &TreeNode<F>, indent: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let pad = "  ".repeat(indent);
            match n {
                TreeNode::Leaf { counts } => {
                    let best = MembershipVector::from_weights(
                        t.classes.clone(),
                        counts.iter().map(|&c| F::of_usize(c)).collect(),
                    )
                    .argmax();
                    let hist: Vec<String> = t.classes.iter().zip(counts).map(|(c, n)| format!("{c}:{n}")).collect();
                    writeln!(f, "{pad}class {best} [{}]", hist.join(" "))
                }
                TreeNode::Split { feature, threshold, below, at_least, .. } => {
                    let name = t.feature_names.get(*feature).cloned().unwrap_or_else(|| format!("f{feature}"));
                    writeln!(f, "{pad}if {name} >= {threshold}:")?;
                    go(t, at_least, indent + 1, f)?;
                    writeln!(f, "{pad}else:")?;
                    go(t, below, indent + 1, f)
                }
            }
        }
        go(self, &self.root, 0, f)
    }
}
