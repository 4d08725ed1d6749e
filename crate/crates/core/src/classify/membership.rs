use crate::scalar::Scalar;

/// Per-class scores in `[0, 1]` summing to one, classes in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipVector<F> {
    pub classes: Vec<u32>,
    pub scores: Vec<F>,
}

impl<F: Scalar> MembershipVector<F> {
    /// Normalizes non-negative weights; all-zero weights become uniform.
    pub fn from_weights(classes: Vec<u32>, weights: Vec<F>) -> Self {
        assert_eq!(classes.len(), weights.len());
        let sum: F = weights.iter().copied().sum();
        let scores = if sum > F::zero() {
            weights.into_iter().map(|w| w / sum).collect()
        } else {
            let k = F::of_usize(classes.len().max(1));
            vec![F::one() / k; classes.len()]
        };
        MembershipVector { classes, scores }
    }

    /// Softmax of log-weights, stable for very negative inputs.
    pub fn from_log_weights(classes: Vec<u32>, logs: Vec<F>) -> Self {
        let max = logs.iter().copied().fold(F::neg_infinity(), F::max);
        if !max.is_finite() {
            return Self::from_weights(classes, vec![F::zero(); logs.len()]);
        }
        Self::from_weights(classes, logs.into_iter().map(|l| (l - max).exp()).collect())
    }

    pub fn get(&self, class: u32) -> F {
        self.classes
            .iter()
            .position(|&c| c == class)
            .map_or(F::zero(), |i| self.scores[i])
    }

    pub fn sum(&self) -> F {
        self.scores.iter().copied().sum()
    }

    /// Class with the highest score; ties go to the smallest class id.
    pub fn argmax(&self) -> u32 {
        let mut best = 0;
        for i in 1..self.scores.len() {
            if self.scores[i] > self.scores[best] {
                best = i;
            }
        }
        self.classes[best]
    }
}
