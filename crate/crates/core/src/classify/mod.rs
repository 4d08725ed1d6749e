//! Low-level classifiers, the tourist-walk high-level classifier and their
//! convex combination.

mod bayes;
mod high_level;
mod hybrid;
mod knn;
mod membership;
mod tree;

pub use bayes::{silverman_bandwidth, ParzenBayes, BANDWIDTH_FLOOR};
pub use high_level::{high_level_membership, HighLevelClassifier, HighLevelConfig};
pub use hybrid::{hybrid_predict, HybridConfig, LowLevelKind, LowLevelModel, LowLevelParams};
pub use knn::KnnClassifier;
pub use membership::MembershipVector;
pub use tree::{entropy, information_gain, DecisionTree, TreeConfig, TreeNode};
