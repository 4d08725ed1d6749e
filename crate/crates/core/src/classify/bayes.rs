use std::io::Write;

use crate::error::Result;
use crate::features::Dataset;
use crate::scalar::Scalar;

use super::MembershipVector;

/// Smallest kernel width a feature may get.
pub const BANDWIDTH_FLOOR: f64 = 1e-6;

/// Silverman's rule of thumb, `0.9 * min(sd, IQR / 1.34) * n^(-1/5)`,
/// floored at [`BANDWIDTH_FLOOR`]. Falls back to the standard deviation when
/// the interquartile range is zero.
pub fn silverman_bandwidth<F: Scalar>(values: &[F]) -> F {
    let floor = F::of(BANDWIDTH_FLOOR);
    let n = values.len();
    if n < 2 {
        return floor;
    }
    let nf = F::of_usize(n);
    let mean = values.iter().copied().sum::<F>() / nf;
    let sd = (values.iter().map(|&v| (v - mean) * (v - mean)).sum::<F>() / F::of_usize(n - 1)).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let spread = if iqr > F::zero() { sd.min(iqr / F::of(1.34)) } else { sd };
    (F::of(0.9) * spread * nf.powf(F::of(-0.2))).max(floor)
}

/// Linear-interpolation quantile of sorted data.
fn quantile<F: Scalar>(sorted: &[F], q: f64) -> F {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = F::of(pos - lo as f64);
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[derive(Clone, Debug)]
struct ClassDensity<F> {
    log_prior: F,
    /// `[feature][sample]`
    columns: Vec<Vec<F>>,
    bandwidths: Vec<F>,
}

/// Naive Bayes with one Gaussian Parzen-window density per class and feature.
#[derive(Clone, Debug)]
pub struct ParzenBayes<F> {
    classes: Vec<u32>,
    densities: Vec<ClassDensity<F>>,
}

impl<F: Scalar> ParzenBayes<F> {
    /// Panics if `train` has unlabeled instances.
    pub fn fit(train: &Dataset<F>) -> Self {
        let labels = train.require_labels().expect("Bayes needs a labelled training set");
        let counts = train.class_counts();
        let total = F::of_usize(train.len());
        let d = train.dim();
        let mut classes = Vec::new();
        let mut densities = Vec::new();
        for (&class, &count) in &counts {
            let rows: Vec<&[F]> = train
                .rows()
                .zip(&labels)
                .filter(|(_, &l)| l == class)
                .map(|(r, _)| r)
                .collect();
            let columns: Vec<Vec<F>> = (0..d).map(|f| rows.iter().map(|r| r[f]).collect()).collect();
            let bandwidths = columns.iter().map(|c| silverman_bandwidth(c)).collect();
            classes.push(class);
            densities.push(ClassDensity {
                log_prior: (F::of_usize(count) / total).ln(),
                columns,
                bandwidths,
            });
        }
        ParzenBayes { classes, densities }
    }

    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    /// `log P(class) + sum_j log p(x_j | class)` for every class.
    pub fn log_scores(&self, x: &[F]) -> Vec<F> {
        let half_ln_2pi = F::of(0.5 * (2.0 * std::f64::consts::PI).ln());
        self.densities
            .iter()
            .map(|cd| {
                let mut total = cd.log_prior;
                for ((col, &h), &v) in cd.columns.iter().zip(&cd.bandwidths).zip(x) {
                    let n = F::of_usize(col.len());
                    let exps: Vec<F> = col
                        .iter()
                        .map(|&s| {
                            let z = (v - s) / h;
                            -(z * z) / F::of(2.0)
                        })
                        .collect();
                    let max = exps.iter().copied().fold(F::neg_infinity(), F::max);
                    let lse = max + exps.iter().map(|&e| (e - max).exp()).sum::<F>().ln();
                    total = total + lse - n.ln() - h.ln() - half_ln_2pi;
                }
                total
            })
            .collect()
    }

    pub fn predict(&self, x: &[F]) -> MembershipVector<F> {
        MembershipVector::from_log_weights(self.classes.clone(), self.log_scores(x))
    }

    /// `class,feature,bandwidth` CSV.
    pub fn write_bandwidths<W: Write>(&self, feature_names: &[String], mut out: W) -> Result<()> {
        writeln!(out, "class,feature,bandwidth")?;
        for (class, cd) in self.classes.iter().zip(&self.densities) {
            for (f, h) in cd.bandwidths.iter().enumerate() {
                let name = feature_names.get(f).map_or_else(|| format!("f{f}"), Clone::clone);
                writeln!(out, "{class},{name},{h}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(points: &[(f64, u32)]) -> Dataset<f64> {
        Dataset::from_rows(
            "t",
            points.iter().map(|&(x, _)| vec![x]).collect(),
            points.iter().map(|&(_, c)| Some(c)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn symmetric_densities_split_evenly() {
        let m = ParzenBayes::fit(&one_d(&[(-1.0, 1), (-0.5, 1), (0.5, 2), (1.0, 2)]));
        let p = m.predict(&[0.0]);
        assert!((p.get(1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn feature_under_class_density() {
        let m = ParzenBayes::fit(&one_d(&[(-1.0, 1), (-1.2, 1), (-0.9, 1), (3.0, 2), (3.3, 2), (2.8, 2)]));
        assert_eq!(m.predict(&[-1.1]).argmax(), 1);
        assert_eq!(m.predict(&[2.9]).argmax(), 2);
    }

    #[test]
    fn single_points_use_bandwidth_floor() {
        // blue (1) at -1, red (2) at +1
        let m = ParzenBayes::fit(&one_d(&[(-1.0, 1), (1.0, 2)]));
        assert_eq!(m.predict(&[0.5]).argmax(), 2);
        assert_eq!(m.predict(&[-0.01]).argmax(), 1);
        assert_eq!(m.predict(&[0.01]).argmax(), 2);
        let mid = m.predict(&[0.0]);
        assert_eq!(mid.scores, vec![0.5, 0.5]);
    }

    #[test]
    fn silverman_rule() {
        // sd = 1.5811, IQR = 2 -> min(1.5811, 1.4925) * 0.9 * 5^-0.2
        let h = silverman_bandwidth(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let expected = 0.9 * (2.0f64 / 1.34) * 5f64.powf(-0.2);
        assert!((h - expected).abs() < 1e-12);
        assert_eq!(silverman_bandwidth(&[2.0, 2.0, 2.0]), BANDWIDTH_FLOOR);
        assert_eq!(silverman_bandwidth(&[2.0]), BANDWIDTH_FLOOR);
    }

    #[test]
    fn argmax_invariant_to_score_scaling() {
        let m = ParzenBayes::fit(&one_d(&[(-1.0, 1), (0.2, 1), (1.0, 2), (1.5, 2), (2.0, 2)]));
        for x in [-2.0, -0.3, 0.4, 0.9, 3.0] {
            let logs = m.log_scores(&[x]);
            let shifted: Vec<f64> = logs.iter().map(|l| l + 7.5).collect();
            let a = MembershipVector::from_log_weights(vec![1, 2], logs);
            let b = MembershipVector::from_log_weights(vec![1, 2], shifted);
            assert_eq!(a.argmax(), b.argmax());
        }
    }

    #[test]
    fn bandwidth_dump() {
        let m = ParzenBayes::fit(&one_d(&[(-1.0, 1), (1.0, 2)]));
        let mut buf = Vec::new();
        m.write_bandwidths(&["x".into()], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "class,feature,bandwidth\n1,x,0.000001\n2,x,0.000001\n");
    }
}
