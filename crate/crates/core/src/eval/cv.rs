use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::attgraph::{median_same_class_distance, GraphConfig};
use crate::classify::{
    hybrid_predict, HighLevelClassifier, HighLevelConfig, LowLevelKind, LowLevelModel, LowLevelParams, MembershipVector,
};
use crate::error::{Error, Result};
use crate::features::{Dataset, Standardizer};
use crate::scalar::Scalar;

use super::{p_value, FoldPlan};

/// Everything a cross-validation run needs besides the data.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig<F> {
    pub low_level: LowLevelKind,
    pub params: LowLevelParams,
    /// `None` uses the median same-class distance of each training fold.
    pub epsilon: Option<F>,
    pub kappa: usize,
    pub fallback_factor: F,
    pub high_level: HighLevelConfig<F>,
    /// Skip graph construction and walks; only the low level is evaluated.
    pub low_level_only: bool,
}

impl<F: Scalar> Default for PipelineConfig<F> {
    fn default() -> Self {
        PipelineConfig {
            low_level: LowLevelKind::Knn,
            params: LowLevelParams::default(),
            epsilon: None,
            kappa: 3,
            fallback_factor: F::of(3.0),
            high_level: HighLevelConfig::default(),
            low_level_only: false,
        }
    }
}

impl<F: Scalar> PipelineConfig<F> {
    pub fn with_low_level(mut self, kind: LowLevelKind) -> Self {
        self.low_level = kind;
        self
    }

    /// Graph parameters for a (standardized) training fold.
    pub fn graph_config(&self, train: &Dataset<F>) -> GraphConfig<F> {
        let eps = self
            .epsilon
            .or_else(|| median_same_class_distance(train))
            .filter(|e| *e > F::zero())
            .unwrap_or_else(|| F::of(1e-9));
        GraphConfig::new(eps, self.kappa).with_fallback_factor(self.fallback_factor)
    }
}

/// Low- and high-level memberships of one held-out instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction<F> {
    /// Row in the evaluated dataset.
    pub index: usize,
    pub fold: usize,
    pub truth: u32,
    pub low: MembershipVector<F>,
    /// `None` when the instance reached no class component.
    pub high: Option<MembershipVector<F>>,
}

impl<F: Scalar> Prediction<F> {
    pub fn label_at(&self, lambda: F) -> u32 {
        hybrid_predict(lambda, &self.low, self.high.as_ref()).1
    }
}

/// Pooled predictions of every fold, in dataset order. Since `lambda` only
/// enters at the final blend, one run serves a whole sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct CvOutcome<F> {
    pub predictions: Vec<Prediction<F>>,
    pub class_counts: Vec<usize>,
}

impl<F: Scalar> CvOutcome<F> {
    pub fn correct_at(&self, lambda: F) -> usize {
        self.predictions.iter().filter(|p| p.label_at(lambda) == p.truth).count()
    }

    pub fn accuracy_at(&self, lambda: F) -> f64 {
        self.correct_at(lambda) as f64 / self.predictions.len().max(1) as f64
    }

    pub fn p_value_at(&self, lambda: F) -> f64 {
        p_value(self.correct_at(lambda), self.predictions.len(), &self.class_counts)
    }

    /// Instances for which the high level was unavailable.
    pub fn fallback_count(&self) -> usize {
        self.predictions.iter().filter(|p| p.high.is_none()).count()
    }
}

/// Stratified cross-validation. Per fold: columns constant on the training
/// part are dropped, standardization is fitted on the training part, and
/// the low-level model and class graphs are built from it alone. Test
/// instances are never incorporated into the graphs.
pub fn cross_validate<F: Scalar>(data: &Dataset<F>, config: &PipelineConfig<F>, plan: &FoldPlan) -> Result<CvOutcome<F>> {
    let labels = data.require_labels()?;
    if plan.instance_count() != data.len() {
        return Err(Error::InvalidConfig(format!(
            "fold plan covers {} instances, dataset has {}",
            plan.instance_count(),
            data.len()
        )));
    }
    config.high_level.validate()?;
    let folds: Vec<Vec<Prediction<F>>> = (0..plan.len())
        .into_par_iter()
        .map(|fold| run_fold(data, &labels, config, plan, fold))
        .collect::<Result<_>>()?;
    let mut predictions: Vec<Prediction<F>> = folds.into_iter().flatten().collect();
    predictions.sort_by_key(|p| p.index);
    Ok(CvOutcome {
        predictions,
        class_counts: data.class_counts().into_values().collect(),
    })
}

fn run_fold<F: Scalar>(
    data: &Dataset<F>,
    labels: &[u32],
    config: &PipelineConfig<F>,
    plan: &FoldPlan,
    fold: usize,
) -> Result<Vec<Prediction<F>>> {
    let train_idx = plan.train(fold);
    let test_idx = plan.test(fold);
    let raw_train = data.subset(&train_idx);
    let columns = raw_train.varying_columns();
    let raw_train = raw_train.select_columns(&columns);
    let scaler = Standardizer::fit(&raw_train);
    let train = scaler.transform(&raw_train);
    let low = LowLevelModel::fit(config.low_level, &train, &config.params)?;
    let classes: Vec<u32> = train.class_counts().into_keys().collect();
    let high = if config.low_level_only {
        None
    } else {
        match HighLevelClassifier::fit(&train, config.graph_config(&train), config.high_level) {
            Ok(h) => Some(h),
            Err(e @ Error::ClassTooSmall { .. }) => {
                log::warn!("fold {fold}: {e}; high level disabled");
                None
            }
            Err(e) => return Err(e),
        }
    };
    test_idx
        .iter()
        .map(|&i| {
            let row: Vec<F> = columns.iter().map(|&c| data.instances[i].features[c]).collect();
            let x = scaler.transform_row(&row);
            let l = align(low.predict(&x), &classes);
            let h = match &high {
                None => None,
                Some(h) => match h.predict(&x) {
                    Ok(m) => Some(align(m, &classes)),
                    Err(Error::AllViewsEmpty) => {
                        log::debug!("instance {i}: no class component reachable, low level only");
                        None
                    }
                    Err(e) => return Err(e),
                },
            };
            Ok(Prediction {
                index: i,
                fold,
                truth: labels[i],
                low: l,
                high: h,
            })
        })
        .collect()
}

fn align<F: Scalar>(m: MembershipVector<F>, classes: &[u32]) -> MembershipVector<F> {
    if m.classes == classes {
        return m;
    }
    MembershipVector {
        classes: classes.to_vec(),
        scores: classes.iter().map(|&c| m.get(c)).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Paradigm {
    Semantic,
    Topological,
}

impl fmt::Display for Paradigm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Paradigm::Semantic => "semantic",
            Paradigm::Topological => "topological",
        })
    }
}

impl FromStr for Paradigm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "semantic" => Ok(Paradigm::Semantic),
            "topological" => Ok(Paradigm::Topological),
            _ => Err(Error::InvalidConfig(format!("unknown paradigm '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReportRow {
    pub lambda: f64,
    pub accuracy: f64,
    pub p_value: f64,
}

/// Accuracy and p-value per compliance value for one word, paradigm and
/// low-level classifier.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub word: String,
    pub paradigm: Paradigm,
    pub low_level: LowLevelKind,
    pub rows: Vec<ReportRow>,
    pub best_lambda: f64,
}

pub const CSV_HEADER: &str = "word,paradigm,algorithm,lambda,accuracy,p_value";

impl ExperimentReport {
    pub fn best(&self) -> &ReportRow {
        self.rows
            .iter()
            .find(|r| r.lambda == self.best_lambda)
            .expect("best lambda is one of the rows")
    }

    /// Row at `lambda = 0` when the grid contains it.
    pub fn baseline(&self) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.lambda == 0.0)
    }

    pub fn write_csv<W: Write>(&self, mut out: W, header: bool) -> Result<()> {
        if header {
            writeln!(out, "{CSV_HEADER}")?;
        }
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{:.2},{:.6},{:.6e}",
                self.word, self.paradigm, self.low_level, r.lambda, r.accuracy, r.p_value
            )?;
        }
        Ok(())
    }
}

/// `0, step, 2 step, ..., 1`.
pub fn lambda_grid(step: f64) -> Vec<f64> {
    let n = (1.0 / step).round().max(1.0) as usize;
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

pub fn default_lambda_grid() -> Vec<f64> {
    lambda_grid(0.05)
}

/// Scores every `lambda` of `grid` on one cross-validation outcome. The
/// best value is the most accurate one, the smallest on ties.
pub fn lambda_sweep<F: Scalar>(
    outcome: &CvOutcome<F>,
    grid: &[f64],
    word: &str,
    paradigm: Paradigm,
    low_level: LowLevelKind,
) -> ExperimentReport {
    let rows: Vec<ReportRow> = grid
        .iter()
        .map(|&lambda| ReportRow {
            lambda,
            accuracy: outcome.accuracy_at(F::of(lambda)),
            p_value: outcome.p_value_at(F::of(lambda)),
        })
        .collect();
    let mut best = rows.first().map_or(0.0, |r| r.lambda);
    let mut best_acc = f64::NEG_INFINITY;
    for r in &rows {
        if r.accuracy > best_acc || (r.accuracy == best_acc && r.lambda < best) {
            best_acc = r.accuracy;
            best = r.lambda;
        }
    }
    ExperimentReport {
        word: word.to_owned(),
        paradigm,
        low_level,
        rows,
        best_lambda: best,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::KnnClassifier;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn clusters(n: usize, gap: f64, seed: u64) -> Dataset<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let c = (i % 2) as u32 + 1;
            let off = if c == 1 { 0.0 } else { gap };
            rows.push(vec![off + rng.gen::<f64>(), rng.gen::<f64>()]);
            labels.push(Some(c));
        }
        Dataset::from_rows("t", rows, labels).unwrap()
    }

    #[test]
    fn separable_clusters_are_perfect_with_one_nn() {
        let d = clusters(60, 10.0, 1);
        let plan = FoldPlan::for_labels(&d.require_labels().unwrap(), 3).unwrap();
        let out = cross_validate(&d, &PipelineConfig::default(), &plan).unwrap();
        assert_eq!(out.accuracy_at(0.0), 1.0);
        assert_eq!(out.predictions.len(), 60);
    }

    #[test]
    fn constant_feature_gives_majority_accuracy() {
        // Nothing to split on: the tree is one leaf holding the majority.
        let rows = vec![vec![1.0]; 40];
        let labels: Vec<Option<u32>> = (0..40).map(|i| Some(if i < 28 { 1 } else { 2 })).collect();
        let d = Dataset::from_rows("t", rows, labels).unwrap();
        let plan = FoldPlan::for_labels(&d.require_labels().unwrap(), 0).unwrap();
        let config = PipelineConfig::default().with_low_level(LowLevelKind::C45);
        let out = cross_validate(&d, &config, &plan).unwrap();
        assert_eq!(out.accuracy_at(0.0), 0.7);
    }

    #[test]
    fn zero_lambda_matches_direct_low_level_run() {
        let d = clusters(80, 0.6, 5);
        let labels = d.require_labels().unwrap();
        let plan = FoldPlan::for_labels(&labels, 11).unwrap();
        let out = cross_validate(&d, &PipelineConfig::default(), &plan).unwrap();
        let mut correct = 0;
        for f in 0..plan.len() {
            let train = d.subset(&plan.train(f));
            let scaler = Standardizer::fit(&train);
            let knn = KnnClassifier::fit(&scaler.transform(&train), 1);
            for &i in plan.test(f) {
                let x = scaler.transform_row(&d.instances[i].features);
                correct += (knn.predict(&x).argmax() == labels[i]) as usize;
            }
        }
        assert_eq!(out.correct_at(0.0), correct);
    }

    #[test]
    fn fold_order_does_not_matter() {
        let d = clusters(50, 0.8, 2);
        let plan = FoldPlan::for_labels(&d.require_labels().unwrap(), 4).unwrap();
        let a = cross_validate(&d, &PipelineConfig::default(), &plan).unwrap();
        let b = cross_validate(&d, &PipelineConfig::default(), &plan).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sweep_picks_smallest_best_lambda() {
        let mv = |s: [f64; 2]| MembershipVector { classes: vec![1, 2], scores: s.to_vec() };
        // Low level always wrong, high level always right.
        let preds = (0..10)
            .map(|i| Prediction {
                index: i,
                fold: 0,
                truth: 1,
                low: mv([0.4, 0.6]),
                high: Some(mv([1.0, 0.0])),
            })
            .collect();
        let out = CvOutcome { predictions: preds, class_counts: vec![5, 5] };
        let r = lambda_sweep(&out, &default_lambda_grid(), "w", Paradigm::Semantic, LowLevelKind::Knn);
        assert_eq!(r.rows.len(), 21);
        assert_eq!(r.baseline().unwrap().accuracy, 0.0);
        // M_1 = 0.4 + 0.6 lambda beats M_2 = 0.6 - 0.6 lambda once lambda > 1/6.
        assert_eq!(r.best_lambda, 0.2);
        assert_eq!(r.best().accuracy, 1.0);
        let mut buf = Vec::new();
        r.write_csv(&mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("word,paradigm,algorithm,lambda,accuracy,p_value\nw,semantic,knn,0.00,0.000000,1.000000e0\n"));
        assert_eq!(text.lines().count(), 22);
    }

    #[test]
    fn perfect_high_level_best_at_one() {
        let mv = |s: [f64; 2]| MembershipVector { classes: vec![1, 2], scores: s.to_vec() };
        let preds = (0..20)
            .map(|i| {
                let truth = (i % 2) as u32 + 1;
                // Confidently wrong low level; the high level is right by a
                // margin that only wins once lambda > 1 / 1.02.
                let (l, h) = if truth == 1 { ([0.0, 1.0], [0.51, 0.49]) } else { ([1.0, 0.0], [0.49, 0.51]) };
                Prediction { index: i, fold: 0, truth, low: mv(l), high: Some(mv(h)) }
            })
            .collect();
        let out = CvOutcome { predictions: preds, class_counts: vec![10, 10] };
        let r = lambda_sweep(&out, &default_lambda_grid(), "w", Paradigm::Topological, LowLevelKind::Bayes);
        assert_eq!(r.best_lambda, 1.0);
    }

    #[test]
    fn grid_endpoints() {
        let g = default_lambda_grid();
        assert_eq!(g.len(), 21);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[20], 1.0);
        assert_eq!(g[1], 0.05);
    }
}
