//! Clustering quality against ground truth: maximum minimax radius and
//! pair-counting misclassification, precision and recall.

use crate::agglomerate::{prototypes, Clustering};
use crate::dissim::DissimilarityMatrix;
use crate::error::{Error, Result};

/// Pair counts over all `n(n-1)/2` item pairs. A pair is predicted positive
/// when co-clustered and truly positive when it shares a label.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.true_positives + self.false_positives + self.false_negatives + self.true_negatives
    }

    pub fn misclassification(&self) -> f64 {
        (self.false_positives + self.false_negatives) as f64 / self.total() as f64
    }

    pub fn accuracy(&self) -> f64 {
        (self.true_positives + self.true_negatives) as f64 / self.total() as f64
    }

    /// `TP / (TP + FP)`, or `None` when nothing is co-clustered.
    pub fn precision(&self) -> Option<f64> {
        ratio(self.true_positives, self.true_positives + self.false_positives)
    }

    /// `TP / (TP + FN)`, or `None` when no two items share a label.
    pub fn recall(&self) -> Option<f64> {
        ratio(self.true_positives, self.true_positives + self.false_negatives)
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Largest minimax radius among the clusters of `c`.
pub fn max_minimax_radius(c: &Clustering, d: &DissimilarityMatrix) -> Result<f64> {
    Ok(prototypes(c, d)?.max_radius())
}

pub fn pairwise_confusion(c: &Clustering, truth: &[usize]) -> Result<ConfusionCounts> {
    let assignment = c.assignment();
    if truth.len() != assignment.len() {
        return Err(Error::LabelLength {
            expected: assignment.len(),
            got: truth.len(),
        });
    }
    let mut cc = ConfusionCounts::default();
    for i in 0..assignment.len() {
        for j in i + 1..assignment.len() {
            match (assignment[i] == assignment[j], truth[i] == truth[j]) {
                (true, true) => cc.true_positives += 1,
                (true, false) => cc.false_positives += 1,
                (false, true) => cc.false_negatives += 1,
                (false, false) => cc.true_negatives += 1,
            }
        }
    }
    Ok(cc)
}

pub fn misclassification(cc: &ConfusionCounts) -> f64 {
    cc.misclassification()
}

pub fn precision_recall(cc: &ConfusionCounts) -> (Option<f64>, Option<f64>) {
    (cc.precision(), cc.recall())
}

/// All four metrics for one cut.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricRecord {
    pub k: usize,
    pub max_minimax_radius: f64,
    pub misclassification: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

impl MetricRecord {
    pub fn from_counts(k: usize, max_minimax_radius: f64, cc: &ConfusionCounts) -> Self {
        MetricRecord {
            k,
            max_minimax_radius,
            misclassification: cc.misclassification(),
            precision: cc.precision(),
            recall: cc.recall(),
        }
    }

    pub fn evaluate(c: &Clustering, d: &DissimilarityMatrix, truth: &[usize]) -> Result<Self> {
        let cc = pairwise_confusion(c, truth)?;
        Ok(Self::from_counts(c.k(), max_minimax_radius(c, d)?, &cc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clustering(ids: &[usize]) -> Clustering {
        Clustering::new(ids.to_vec()).unwrap()
    }

    const TRUTH: [usize; 6] = [0, 0, 0, 1, 1, 2];

    #[test]
    fn perfect_clustering() {
        let cc = pairwise_confusion(&clustering(&TRUTH), &TRUTH).unwrap();
        assert_eq!((cc.false_positives, cc.false_negatives), (0, 0));
        assert_eq!(misclassification(&cc), 0.0);
        assert_eq!(precision_recall(&cc), (Some(1.0), Some(1.0)));
    }

    #[test]
    fn one_cluster() {
        let cc = pairwise_confusion(&clustering(&[0; 6]), &TRUTH).unwrap();
        // same-label pairs: 3 + 1
        assert_eq!(cc.false_negatives, 0);
        assert_eq!(cc.true_positives, 4);
        assert_eq!(cc.false_positives, 11);
        assert_eq!(cc.recall(), Some(1.0));
    }

    #[test]
    fn all_singletons() {
        let cc = pairwise_confusion(&clustering(&[0, 1, 2, 3, 4, 5]), &TRUTH).unwrap();
        assert_eq!((cc.true_positives, cc.false_positives), (0, 0));
        assert_eq!(cc.precision(), None);
        assert_eq!(cc.recall(), Some(0.0));
        assert_eq!(cc.total(), 15);
    }

    #[test]
    fn recall_undefined_without_same_label_pairs() {
        let cc = pairwise_confusion(&clustering(&[0, 0, 1]), &[0, 1, 2]).unwrap();
        assert_eq!(cc.recall(), None);
        assert_eq!(cc.precision(), Some(0.0));
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            pairwise_confusion(&clustering(&[0, 1]), &[0, 0, 0]),
            Err(Error::LabelLength { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn all_singletons_radius_zero() {
        let d = DissimilarityMatrix::from_fn(3, |i, j| (i * j + 1) as f64).unwrap();
        assert_eq!(max_minimax_radius(&clustering(&[2, 0, 1]), &d).unwrap(), 0.0);
    }
}
