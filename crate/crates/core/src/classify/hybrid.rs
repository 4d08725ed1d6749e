use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::features::Dataset;
use crate::scalar::Scalar;

use super::{DecisionTree, KnnClassifier, MembershipVector, ParzenBayes, TreeConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LowLevelKind {
    Knn,
    Bayes,
    C45,
}

impl LowLevelKind {
    pub const ALL: [LowLevelKind; 3] = [LowLevelKind::Knn, LowLevelKind::Bayes, LowLevelKind::C45];
}

impl fmt::Display for LowLevelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LowLevelKind::Knn => "knn",
            LowLevelKind::Bayes => "bayes",
            LowLevelKind::C45 => "c45",
        })
    }
}

impl FromStr for LowLevelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "knn" | "1nn" => Ok(LowLevelKind::Knn),
            "bayes" | "nb" => Ok(LowLevelKind::Bayes),
            "c45" | "c4.5" | "tree" => Ok(LowLevelKind::C45),
            _ => Err(Error::InvalidConfig(format!("unknown low-level classifier '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LowLevelParams {
    pub knn_k: usize,
    pub tree: TreeConfig,
}

impl Default for LowLevelParams {
    fn default() -> Self {
        LowLevelParams {
            knn_k: 1,
            tree: TreeConfig::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum LowLevelModel<F> {
    Knn(KnnClassifier<F>),
    Bayes(ParzenBayes<F>),
    C45(DecisionTree<F>),
}

impl<F: Scalar> LowLevelModel<F> {
    pub fn fit(kind: LowLevelKind, train: &Dataset<F>, params: &LowLevelParams) -> Result<Self> {
        train.require_labels()?;
        if train.is_empty() {
            return Err(Error::InvalidDataset("empty training set".into()));
        }
        Ok(match kind {
            LowLevelKind::Knn => LowLevelModel::Knn(KnnClassifier::fit(train, params.knn_k)),
            LowLevelKind::Bayes => LowLevelModel::Bayes(ParzenBayes::fit(train)),
            LowLevelKind::C45 => LowLevelModel::C45(DecisionTree::fit(train, params.tree)),
        })
    }

    pub fn kind(&self) -> LowLevelKind {
        match self {
            LowLevelModel::Knn(_) => LowLevelKind::Knn,
            LowLevelModel::Bayes(_) => LowLevelKind::Bayes,
            LowLevelModel::C45(_) => LowLevelKind::C45,
        }
    }

    pub fn predict(&self, x: &[F]) -> MembershipVector<F> {
        match self {
            LowLevelModel::Knn(m) => m.predict(x),
            LowLevelModel::Bayes(m) => m.predict(x),
            LowLevelModel::C45(m) => m.predict(x),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HybridConfig<F> {
    pub lambda: F,
    pub low_level: LowLevelKind,
}

impl<F: Scalar> HybridConfig<F> {
    pub fn validate(&self) -> Result<()> {
        if self.lambda >= F::zero() && self.lambda <= F::one() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("lambda {} outside [0, 1]", self.lambda)))
        }
    }
}

/// `(1 - lambda) L + lambda H` and its argmax. Without `high` the result is
/// `low` unchanged.
pub fn hybrid_predict<F: Scalar>(
    lambda: F,
    low: &MembershipVector<F>,
    high: Option<&MembershipVector<F>>,
) -> (MembershipVector<F>, u32) {
    let m = match high {
        None => low.clone(),
        Some(h) => {
            assert_eq!(low.classes, h.classes, "membership class lists differ");
            let scores = low
                .scores
                .iter()
                .zip(&h.scores)
                .map(|(&l, &h)| (F::one() - lambda) * l + lambda * h)
                .collect();
            MembershipVector {
                classes: low.classes.clone(),
                scores,
            }
        }
    };
    let label = m.argmax();
    (m, label)
}
