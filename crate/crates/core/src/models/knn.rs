use serde::{Deserialize, Serialize};

use super::features::{check_vector, FeatureSet};
use crate::corpus::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnParams {
    /// Odd, so uniform two-class votes never tie.
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 7 }
    }
}

impl KnnParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k % 2 == 0 {
            return Err(Error::Config(format!(
                "k must be a positive odd integer, got {}",
                self.k
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub vectors: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
}

pub fn train_knn(features: &FeatureSet, params: &KnnParams) -> Result<KnnModel> {
    params.validate()?;
    features.ensure_trainable()?;
    if params.k > features.len() {
        return Err(Error::Config(format!(
            "k = {} exceeds the {} training documents",
            params.k,
            features.len()
        )));
    }
    Ok(KnnModel {
        k: params.k,
        vectors: features.vectors().to_vec(),
        labels: features.labels().to_vec(),
    })
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl KnnModel {
    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    /// Indices of the `k` nearest training points; equal distances prefer the lower index.
    pub fn neighbors(&self, x: &[f64]) -> Result<Vec<usize>> {
        check_vector(x, self.dim())?;
        let mut order: Vec<(f64, usize)> = self
            .vectors
            .iter()
            .enumerate()
            .map(|(i, v)| (squared_distance(v, x), i))
            .collect();
        let by_key = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < order.len() {
            order.select_nth_unstable_by(self.k - 1, by_key);
            order.truncate(self.k);
        }
        order.sort_unstable_by(by_key);
        Ok(order.into_iter().map(|(_, i)| i).collect())
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        let nearest = self.neighbors(x)?;
        let positives = nearest.iter().filter(|&&i| self.labels[i].is_positive()).count();
        Ok(Label::from(2 * positives > nearest.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Label::*;

    /// Repeatedly extracts the closest remaining point by full scan.
    fn oracle(vectors: &[Vec<f64>], labels: &[Label], k: usize, x: &[f64]) -> Label {
        let mut taken = vec![false; vectors.len()];
        let mut votes = 0;
        for _ in 0..k {
            let mut best: Option<(usize, f64)> = None;
            for (i, v) in vectors.iter().enumerate() {
                if taken[i] {
                    continue;
                }
                let d: f64 = v.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum();
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((i, d));
                }
            }
            let (i, _) = best.unwrap();
            taken[i] = true;
            votes += usize::from(labels[i].is_positive());
        }
        Label::from(2 * votes > k)
    }

    #[test]
    fn exact_hit_with_k1() {
        let f = FeatureSet::new(vec![vec![0.0, 0.0], vec![1.0, 1.0]], vec![Negative, Positive]).unwrap();
        let m = train_knn(&f, &KnnParams { k: 1 }).unwrap();
        assert_eq!(m.predict(&[1.0, 1.0]).unwrap(), Positive);
        assert_eq!(m.predict(&[0.0, 0.0]).unwrap(), Negative);
    }

    #[test]
    fn crafted_ten_points() {
        // Seven positives cluster near the origin, three negatives sit on top of the query.
        let mut vectors: Vec<Vec<f64>> = (0..7).map(|i| vec![f64::from(i) * 0.1, 1.0]).collect();
        vectors.extend([vec![0.3, 0.0], vec![0.3, 0.05], vec![0.3, -0.05]]);
        let mut labels = vec![Positive; 7];
        labels.extend([Negative; 3]);
        let f = FeatureSet::new(vectors.clone(), labels.clone()).unwrap();
        let m = train_knn(&f, &KnnParams::default()).unwrap();
        let q = [0.3, 0.0];
        assert_eq!(m.predict(&q).unwrap(), oracle(&vectors, &labels, 7, &q));
        assert_eq!(m.predict(&q).unwrap(), Positive);
        assert_eq!(
            train_knn(&f, &KnnParams { k: 3 }).unwrap().predict(&q).unwrap(),
            Negative
        );
    }

    #[test]
    fn distance_ties_prefer_lower_index() {
        let f = FeatureSet::new(
            vec![vec![-1.0], vec![1.0], vec![5.0]],
            vec![Positive, Negative, Negative],
        )
        .unwrap();
        let m = train_knn(&f, &KnnParams { k: 1 }).unwrap();
        assert_eq!(m.neighbors(&[0.0]).unwrap(), [0]);
        assert_eq!(m.predict(&[0.0]).unwrap(), Positive);
    }

    #[test]
    fn config_errors() {
        let f = FeatureSet::new(vec![vec![0.0], vec![1.0]], vec![Negative, Positive]).unwrap();
        assert!(matches!(train_knn(&f, &KnnParams { k: 2 }), Err(Error::Config(_))));
        assert!(matches!(train_knn(&f, &KnnParams { k: 3 }), Err(Error::Config(_))));
        let m = train_knn(&f, &KnnParams { k: 1 }).unwrap();
        assert!(m.predict(&[0.0, 1.0]).is_err());
    }

    proptest! {
        #[test]
        fn equals_exhaustive_scan(
            points in proptest::collection::vec((-3i32..3, -3i32..3, any::<bool>()), 8..30),
            query in (-3i32..3, -3i32..3),
            k_half in 0usize..4,
        ) {
            // Integer grid coordinates make distance ties common.
            let vectors: Vec<Vec<f64>> = points.iter().map(|&(a, b, _)| vec![f64::from(a), f64::from(b)]).collect();
            let mut labels: Vec<Label> = points.iter().map(|&(_, _, p)| Label::from(p)).collect();
            labels[0] = Negative;
            labels[1] = Positive;
            let k = 2 * k_half + 1;
            let f = FeatureSet::new(vectors.clone(), labels.clone()).unwrap();
            let m = train_knn(&f, &KnnParams { k }).unwrap();
            let q = [f64::from(query.0), f64::from(query.1)];
            prop_assert_eq!(m.predict(&q).unwrap(), oracle(&vectors, &labels, k, &q));
        }
    }
}
