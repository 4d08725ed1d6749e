use std::collections::BTreeMap;

use crate::features::Dataset;
use crate::scalar::{euclidean, Scalar};

use super::MembershipVector;

/// k-nearest-neighbor vote with Euclidean distance. Distance ties are broken
/// by training order.
#[derive(Clone, Debug)]
pub struct KnnClassifier<F> {
    k: usize,
    points: Vec<Vec<F>>,
    labels: Vec<u32>,
    classes: Vec<u32>,
}

impl<F: Scalar> KnnClassifier<F> {
    /// Panics if `train` has unlabeled instances.
    pub fn fit(train: &Dataset<F>, k: usize) -> Self {
        let labels = train.require_labels().expect("kNN needs a labelled training set");
        KnnClassifier {
            k: k.max(1),
            points: train.rows().map(<[F]>::to_vec).collect(),
            classes: train.class_counts().into_keys().collect(),
            labels,
        }
    }

    pub fn predict(&self, x: &[F]) -> MembershipVector<F> {
        let mut d: Vec<(F, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (euclidean(x, p), i))
            .collect();
        let k = self.k.min(d.len());
        if k < d.len() {
            d.select_nth_unstable_by(k - 1, |a, b| a.partial_cmp(b).unwrap());
        }
        let mut votes: BTreeMap<u32, usize> = self.classes.iter().map(|&c| (c, 0)).collect();
        for &(_, i) in &d[..k] {
            *votes.get_mut(&self.labels[i]).unwrap() += 1;
        }
        let weights = votes.values().map(|&v| F::of_usize(v)).collect();
        MembershipVector::from_weights(votes.into_keys().collect(), weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(points: &[(f64, f64, u32)]) -> Dataset<f64> {
        Dataset::from_rows(
            "t",
            points.iter().map(|&(x, y, _)| vec![x, y]).collect(),
            points.iter().map(|&(_, _, c)| Some(c)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn coincident_point() {
        let knn = KnnClassifier::fit(&data(&[(0.0, 0.0, 1), (1.0, 0.0, 2)]), 1);
        let m = knn.predict(&[1.0, 0.0]);
        assert_eq!(m.get(2), 1.0);
        assert_eq!(m.get(1), 0.0);
    }

    /// Red (1) and blue (2) around a query at the origin: the five closest
    /// hold four reds, the thirteen closest a blue majority.
    fn voting_layout() -> Dataset<f64> {
        let mut pts = Vec::new();
        // Reds at radius 1..4, one blue at radius 2.5
        for (i, r) in [1.0, 2.0, 3.0, 4.0].iter().enumerate() {
            let a = i as f64;
            pts.push((r * a.cos(), r * a.sin(), 1));
        }
        pts.push((0.0, 2.5, 2));
        // Ring of eight blues at radius 6, and one red at radius 7.
        for i in 0..8 {
            let a = i as f64 * std::f64::consts::FRAC_PI_4;
            pts.push((6.0 * a.cos(), 6.0 * a.sin(), 2));
        }
        pts.push((7.0, 0.0, 1));
        data(&pts)
    }

    #[test]
    fn five_neighbors_four_red() {
        let knn = KnnClassifier::fit(&voting_layout(), 5);
        let m = knn.predict(&[0.0, 0.0]);
        assert_eq!(m.get(1), 0.8);
        assert_eq!(m.get(2), 0.2);
        assert_eq!(m.argmax(), 1);
    }

    #[test]
    fn thirteen_neighbors_blue_majority() {
        let layout = voting_layout();
        // Independent count over the 13 closest points.
        let mut d: Vec<(f64, u32)> = layout
            .instances
            .iter()
            .map(|i| (euclidean(&i.features, &[0.0, 0.0]), i.label.unwrap()))
            .collect();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let blue = d[..13].iter().filter(|x| x.1 == 2).count();
        assert_eq!(blue, 9);
        let m = KnnClassifier::fit(&layout, 13).predict(&[0.0, 0.0]);
        assert_eq!(m.argmax(), 2);
        assert_eq!(m.get(2), 9.0 / 13.0);
    }

    #[test]
    fn distance_ties_use_training_order() {
        let knn = KnnClassifier::fit(&data(&[(1.0, 0.0, 2), (-1.0, 0.0, 1)]), 1);
        assert_eq!(knn.predict(&[0.0, 0.0]).argmax(), 2);
    }
}
