use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attgraph::GraphConfig;
use crate::classify::{hybrid_predict, HighLevelClassifier, HighLevelConfig, KnnClassifier, MembershipVector};
use crate::error::{Error, Result};
use crate::features::{Dataset, Instance, InstanceId};

use super::default_lambda_grid;

/// Shipped toy configuration: `x,y,class` rows, the probe marked `probe`.
pub const TOY_CSV: &str = include_str!("../../data/toy.csv");

pub const STRUCTURED: u32 = 1;
pub const UNSTRUCTURED: u32 = 2;

/// Seed that produced [`TOY_CSV`] from the default [`ToyShape`].
pub const TOY_SEED: u64 = 23;

/// Two-class point set with one unlabeled probe.
#[derive(Clone, Debug, PartialEq)]
pub struct ToyData {
    pub train: Dataset<f64>,
    pub probe: Vec<f64>,
}

/// Shape parameters of [`generate_toy`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToyShape {
    /// Lattice spacing of the pyramid.
    pub spacing: f64,
    /// Center of the unstructured cloud relative to the probe.
    pub cloud_offset: (f64, f64),
    pub cloud_radius: f64,
    pub cloud_size: usize,
}

impl Default for ToyShape {
    fn default() -> Self {
        ToyShape {
            spacing: 0.015,
            cloud_offset: (0.02, 0.0),
            cloud_radius: 0.02,
            cloud_size: 20,
        }
    }
}

/// A 14-point pyramid (rows of 5, 4, 3 and 2 on a triangular lattice) and a
/// uniform cloud beside its missing apex. The probe sits on the apex.
pub fn generate_toy(shape: &ToyShape, seed: u64) -> ToyData {
    let s = shape.spacing;
    let h = s * 3f64.sqrt() / 2.0;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (r, width) in [5usize, 4, 3, 2].into_iter().enumerate() {
        for i in 0..width {
            rows.push(vec![(r as f64 * 0.5 + i as f64) * s, r as f64 * h]);
            labels.push(Some(STRUCTURED));
        }
    }
    let probe = vec![2.0 * s, 4.0 * h];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (cx, cy) = (probe[0] + shape.cloud_offset.0, probe[1] + shape.cloud_offset.1);
    while rows.len() < 14 + shape.cloud_size {
        let (dx, dy): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if dx * dx + dy * dy <= 1.0 {
            rows.push(vec![cx + dx * shape.cloud_radius, cy + dy * shape.cloud_radius]);
            labels.push(Some(UNSTRUCTURED));
        }
    }
    ToyData {
        train: Dataset::from_rows("toy", rows, labels).expect("two columns everywhere"),
        probe,
    }
}

impl ToyData {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,class\n");
        for inst in &self.train.instances {
            let _ = writeln!(out, "{:.6},{:.6},{}", inst.features[0], inst.features[1], inst.label.unwrap_or(0));
        }
        let _ = writeln!(out, "{:.6},{:.6},probe", self.probe[0], self.probe[1]);
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        let mut probe = None;
        for (n, line) in text.lines().enumerate().skip(1) {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| Error::Parse { line: n + 1, message };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(bad(format!("expected 3 fields, found {}", fields.len())));
            }
            let x: f64 = fields[0].parse().map_err(|e| bad(format!("x: {e}")))?;
            let y: f64 = fields[1].parse().map_err(|e| bad(format!("y: {e}")))?;
            if fields[2] == "probe" {
                probe = Some(vec![x, y]);
            } else {
                rows.push(vec![x, y]);
                labels.push(Some(fields[2].parse().map_err(|e| bad(format!("class: {e}")))?));
            }
        }
        Ok(ToyData {
            train: Dataset::from_rows("toy", rows, labels)?,
            probe: probe.ok_or_else(|| Error::InvalidDataset("toy data has no probe row".into()))?,
        })
    }

    pub fn shipped() -> Self {
        Self::parse(TOY_CSV).expect("shipped toy data parses")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToyConfig {
    pub epsilon: f64,
    pub kappa: usize,
    pub knn_k: usize,
    pub high_level: HighLevelConfig<f64>,
}

impl Default for ToyConfig {
    fn default() -> Self {
        ToyConfig {
            epsilon: 0.02,
            kappa: 3,
            knn_k: 1,
            high_level: HighLevelConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ToyRow {
    pub lambda: f64,
    pub label: u32,
    pub membership: MembershipVector<f64>,
}

/// Label of the probe along the compliance grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ToyReport {
    pub low: MembershipVector<f64>,
    pub high: MembershipVector<f64>,
    pub rows: Vec<ToyRow>,
}

impl ToyReport {
    pub fn label_at(&self, lambda: f64) -> Option<u32> {
        self.rows.iter().find(|r| (r.lambda - lambda).abs() < 1e-12).map(|r| r.label)
    }

    /// Smallest grid value from which the probe stays in the structured
    /// class.
    pub fn flip_lambda(&self) -> Option<f64> {
        let last_other = self.rows.iter().rposition(|r| r.label != STRUCTURED);
        let first = last_other.map_or(0, |i| i + 1);
        self.rows.get(first).map(|r| r.lambda)
    }

    /// Whether the label changes at most once along the grid.
    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).filter(|w| w[0].label != w[1].label).count() <= 1
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,label,m_structured,m_unstructured\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:.2},{},{:.6},{:.6}",
                r.lambda,
                r.label,
                r.membership.get(STRUCTURED),
                r.membership.get(UNSTRUCTURED)
            );
        }
        out
    }
}

/// Classifies the probe over the default compliance grid with a kNN low
/// level on raw coordinates.
pub fn toy_experiment(data: &ToyData, config: &ToyConfig) -> Result<ToyReport> {
    let low = KnnClassifier::fit(&data.train, config.knn_k).predict(&data.probe);
    let graph = GraphConfig::new(config.epsilon, config.kappa);
    let hl = HighLevelClassifier::fit(&data.train, graph, config.high_level)?;
    let high = hl.predict(&data.probe)?;
    let rows = default_lambda_grid()
        .into_iter()
        .map(|lambda| {
            let (membership, label) = hybrid_predict(lambda, &low, Some(&high));
            ToyRow { lambda, label, membership }
        })
        .collect();
    Ok(ToyReport { low, high, rows })
}

/// The probe as an instance, for callers that want to commit it.
pub fn probe_instance(data: &ToyData) -> Instance<f64> {
    Instance::new(InstanceId::new("toy", data.train.len()), data.probe.clone(), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::euclidean;

    #[test]
    fn shipped_file_is_the_seeded_generator_output() {
        let generated = generate_toy(&ToyShape::default(), TOY_SEED);
        assert_eq!(generated.to_csv(), TOY_CSV);
        let shipped = ToyData::shipped();
        assert_eq!(shipped.train.class_counts().into_values().collect::<Vec<_>>(), vec![14, 20]);
    }

    #[test]
    fn pyramid_rows_and_probe_position() {
        let d = generate_toy(&ToyShape::default(), 0);
        let pyramid: Vec<&[f64]> = d.train.rows().take(14).collect();
        let levels: Vec<usize> = (0..4)
            .map(|r| pyramid.iter().filter(|p| (p[1] - r as f64 * 0.015 * 3f64.sqrt() / 2.0).abs() < 1e-12).count())
            .collect();
        assert_eq!(levels, vec![5, 4, 3, 2]);
        // The apex is one lattice step from both top-row points.
        for top in &pyramid[12..14] {
            assert!((euclidean(top, &d.probe) - 0.015).abs() < 1e-12);
        }
    }

    #[test]
    fn nearest_neighbor_of_probe_is_unstructured() {
        let d = ToyData::shipped();
        let nearest = d
            .train
            .instances
            .iter()
            .min_by(|a, b| euclidean(&a.features, &d.probe).partial_cmp(&euclidean(&b.features, &d.probe)).unwrap())
            .unwrap();
        assert_eq!(nearest.label, Some(UNSTRUCTURED));
    }

    #[test]
    fn boundary_shifts_towards_structure() {
        let r = toy_experiment(&ToyData::shipped(), &ToyConfig::default()).unwrap();
        assert_eq!(r.label_at(0.0), Some(UNSTRUCTURED));
        assert_eq!(r.label_at(0.8), Some(STRUCTURED));
        assert!(r.is_monotone());
        assert!(r.flip_lambda().unwrap() <= 0.8);
        assert!(r.high.get(STRUCTURED) > r.high.get(UNSTRUCTURED));
    }

    #[test]
    fn parse_rejects_missing_probe() {
        assert!(ToyData::parse("x,y,class\n0,0,1\n1,1,2\n").is_err());
        assert!(matches!(ToyData::parse("x,y,class\n0,0\n"), Err(Error::Parse { line: 2, .. })));
    }
}
