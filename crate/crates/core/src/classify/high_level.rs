use std::collections::BTreeMap;

use crate::attgraph::{build_training_graph, commit_or_discard, insert_test, ClassGraph, CommitMode, GraphConfig, InsertionView};
use crate::error::{Error, Result};
use crate::features::{Dataset, Instance};
use crate::scalar::Scalar;
use crate::tourist::{component_stats, insertion_variation, ComponentWalkStats, InsertionVariation};

use super::MembershipVector;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HighLevelConfig<F> {
    pub alpha_t: F,
    pub alpha_c: F,
    /// Largest memory length summed over.
    pub mu_critical: usize,
}

impl<F: Scalar> Default for HighLevelConfig<F> {
    fn default() -> Self {
        HighLevelConfig {
            alpha_t: F::of(0.5),
            alpha_c: F::of(0.5),
            mu_critical: 10,
        }
    }
}

impl<F: Scalar> HighLevelConfig<F> {
    /// Sets `alpha_t` and `alpha_c = 1 - alpha_t`.
    pub fn with_alpha_t(mut self, alpha_t: F) -> Self {
        self.alpha_t = alpha_t;
        self.alpha_c = F::one() - alpha_t;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |a: F| a >= F::zero() && a <= F::one();
        if !unit(self.alpha_t) || !unit(self.alpha_c) {
            return Err(Error::InvalidConfig("alpha_t and alpha_c must lie in [0, 1]".into()));
        }
        if (self.alpha_t + self.alpha_c - F::one()).abs() > F::of(1e-9) {
            return Err(Error::InvalidConfig("alpha_t + alpha_c must equal 1".into()));
        }
        Ok(())
    }
}

/// Structural membership from normalized walk variations and class priors.
///
/// Per class, sums `alpha_t (1 - dt p) + alpha_c (1 - dc p)` over memory
/// lengths `0..=mu_critical` and normalizes over classes.
pub fn high_level_membership<F: Scalar>(
    variation: &InsertionVariation<F>,
    priors: &[F],
    config: &HighLevelConfig<F>,
) -> MembershipVector<F> {
    let k = variation.classes.len();
    assert_eq!(priors.len(), k);
    let mu_max = config.mu_critical.min(variation.delta_transient.len().saturating_sub(1));
    let mut weights = vec![F::zero(); k];
    for mu in 0..=mu_max {
        for (j, w) in weights.iter_mut().enumerate() {
            let t = variation.delta_transient[mu][j] * priors[j];
            let c = variation.delta_cycle[mu][j] * priors[j];
            *w = *w + config.alpha_t * (F::one() - t) + config.alpha_c * (F::one() - c);
        }
    }
    MembershipVector::from_weights(variation.classes.clone(), weights)
}

/// Per-class training components plus cached walk statistics.
#[derive(Clone, Debug)]
pub struct HighLevelClassifier<F> {
    pub graphs: Vec<ClassGraph<F>>,
    stats: Vec<ComponentWalkStats<F>>,
    pub graph_config: GraphConfig<F>,
    pub config: HighLevelConfig<F>,
    priors: Vec<F>,
}

impl<F: Scalar> HighLevelClassifier<F> {
    pub fn fit(train: &Dataset<F>, graph_config: GraphConfig<F>, config: HighLevelConfig<F>) -> Result<Self> {
        graph_config.validate()?;
        config.validate()?;
        let graphs = build_training_graph(train, &graph_config)?;
        Ok(Self::from_graphs(graphs, graph_config, config))
    }

    pub fn from_graphs(graphs: Vec<ClassGraph<F>>, graph_config: GraphConfig<F>, config: HighLevelConfig<F>) -> Self {
        let stats = graphs.iter().map(|g| component_stats(g, config.mu_critical)).collect();
        let mut c = HighLevelClassifier {
            graphs,
            stats,
            graph_config,
            config,
            priors: Vec::new(),
        };
        c.refresh_priors();
        c
    }

    fn refresh_priors(&mut self) {
        let total = F::of_usize(self.graphs.iter().map(ClassGraph::len).sum::<usize>().max(1));
        self.priors = self.graphs.iter().map(|g| F::of_usize(g.len()) / total).collect();
    }

    pub fn classes(&self) -> Vec<u32> {
        self.graphs.iter().map(|g| g.class_id).collect()
    }

    /// Class frequencies in the current components.
    pub fn priors(&self) -> BTreeMap<u32, F> {
        self.classes().into_iter().zip(self.priors.iter().copied()).collect()
    }

    pub fn stats(&self) -> &[ComponentWalkStats<F>] {
        &self.stats
    }

    pub fn views(&self, x: &[F]) -> Vec<InsertionView<F>> {
        insert_test(x, &self.graphs, &self.graph_config)
    }

    pub fn variation(&self, x: &[F]) -> Result<InsertionVariation<F>> {
        insertion_variation(&self.graphs, &self.stats, &self.views(x))
    }

    /// Fails with `AllViewsEmpty` when the point reaches no component.
    pub fn predict(&self, x: &[F]) -> Result<MembershipVector<F>> {
        Ok(high_level_membership(&self.variation(x)?, &self.priors, &self.config))
    }

    /// Applies the post-classification policy and refreshes the statistics
    /// of any component that changed.
    pub fn commit(&mut self, instance: &Instance<F>, predicted: u32, mode: CommitMode) -> Result<bool> {
        let changed = commit_or_discard(&mut self.graphs, instance, predicted, mode, &self.graph_config)?;
        if changed {
            for (g, s) in self.graphs.iter().zip(self.stats.iter_mut()) {
                if g.revision() != s.revision {
                    *s = component_stats(g, self.config.mu_critical);
                }
            }
            self.refresh_priors();
        }
        Ok(changed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn variation(dt: Vec<Vec<f64>>, dc: Vec<Vec<f64>>) -> InsertionVariation<f64> {
        InsertionVariation {
            classes: vec![1, 2],
            linked: vec![true, true],
            delta_transient: dt,
            delta_cycle: dc,
        }
    }

    #[test]
    fn identical_variations_split_evenly() {
        let v = variation(vec![vec![0.5, 0.5]; 3], vec![vec![0.5, 0.5]; 3]);
        let h = high_level_membership(&v, &[0.5, 0.5], &HighLevelConfig::default());
        assert_eq!(h.scores, vec![0.5, 0.5]);
    }

    #[test]
    fn unchanged_class_wins_by_hand_arithmetic() {
        // Per mu: class 1 -> 0.5 + 0.5 = 1; class 2 -> 2 * 0.5 * (1 - 0.5) = 0.5.
        // Two memory lengths: 2 vs 1.
        let v = variation(vec![vec![0.0, 1.0]; 2], vec![vec![0.0, 1.0]; 2]);
        let config = HighLevelConfig { mu_critical: 1, ..Default::default() };
        let h = high_level_membership(&v, &[0.5, 0.5], &config);
        assert_relative_eq!(h.scores[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(h.scores[1], 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn mu_critical_truncates_the_sum() {
        let v = variation(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let config = HighLevelConfig { mu_critical: 0, ..Default::default() };
        let h = high_level_membership(&v, &[0.5, 0.5], &config);
        assert_relative_eq!(h.scores[0], 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn alpha_validation() {
        assert!(HighLevelConfig::<f64>::default().with_alpha_t(0.3).validate().is_ok());
        let bad = HighLevelConfig { alpha_t: 0.7, alpha_c: 0.7, mu_critical: 1 };
        assert!(bad.validate().is_err());
    }

    fn two_clusters() -> Dataset<f64> {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..6 {
            rows.push(vec![i as f64 * 0.1, 0.0]);
            labels.push(Some(1));
            rows.push(vec![5.0 + (i % 3) as f64 * 0.1, (i / 3) as f64 * 0.1]);
            labels.push(Some(2));
        }
        Dataset::from_rows("t", rows, labels).unwrap()
    }

    #[test]
    fn classifier_sums_to_one_and_reports_empty_views() {
        let d = two_clusters();
        let hl = HighLevelClassifier::fit(&d, GraphConfig::new(0.25, 2), HighLevelConfig::default()).unwrap();
        assert_eq!(hl.priors()[&1], 0.5);
        let h = hl.predict(&[0.25, 0.0]).unwrap();
        assert_relative_eq!(h.sum(), 1.0, epsilon = 1e-12);
        assert!(matches!(hl.predict(&[100.0, 100.0]), Err(Error::AllViewsEmpty)));
    }

    #[test]
    fn incorporation_refreshes_stats() {
        let d = two_clusters();
        let mut hl = HighLevelClassifier::fit(&d, GraphConfig::new(0.25, 2), HighLevelConfig::default()).unwrap();
        let inst = Instance::new(crate::features::InstanceId::new("x", 0), vec![0.65, 0.0], None);
        assert!(!hl.commit(&inst, 1, CommitMode::Discard).unwrap());
        assert!(hl.commit(&inst, 1, CommitMode::Incorporate).unwrap());
        assert_eq!(hl.stats()[0].vertex_count, 7);
        assert_eq!(hl.stats()[0].revision, hl.graphs[0].revision());
        assert_relative_eq!(hl.priors()[&1], 7.0 / 13.0);
    }
}
