use super::dendrogram::{Dendrogram, Merge};
use super::linkage::{mean_of, CentroidFeatures, Linkage};
use crate::dissim::DissimilarityMatrix;
use crate::error::{Error, Result};

/// Runs agglomerative clustering to completion.
///
/// Each active cluster lives in the slot of its smallest item index, so the
/// pair scan in ascending slot order with a strict `<` resolves ties by
/// `(min index of left group, min index of right group)`.
///
/// Per-rule update after merging `b` into `a`:
/// - single / complete: min / max of the two old values
/// - average: running cross-pair sums, divided by `|G||H|` when read
/// - centroid: Lance-Williams centroid recurrence on the dissimilarities
/// - centroid-means: group means recomputed from the features
/// - minimax: every member caches its radius within its own cluster, so a
///   candidate union only needs the cross-group block scanned
pub fn agglomerate(
    d: &DissimilarityMatrix,
    linkage: Linkage,
    features: Option<CentroidFeatures<'_>>,
) -> Result<Dendrogram> {
    let n = d.n();
    if linkage == Linkage::CentroidMeans {
        let cf = features.as_ref().ok_or(Error::MissingFeatures)?;
        if cf.features.n() != n {
            return Err(Error::InvalidInput(format!(
                "feature matrix has {} rows but the dissimilarity matrix has {n} items",
                cf.features.n()
            )));
        }
    }

    let mut sq = vec![0.0; n * n];
    for (i, j, v) in d.pairs() {
        sq[i * n + j] = v;
        sq[j * n + i] = v;
    }
    let mut state = State {
        n,
        linkage,
        dist: sq.clone(),
        sq,
        sums: Vec::new(),
        members: (0..n).map(|i| vec![i]).collect(),
        node: (0..n).collect(),
        own_radius: vec![0.0; n],
        centroids: Vec::new(),
        active: (0..n).collect(),
    };
    match linkage {
        Linkage::Average => state.sums = state.sq.clone(),
        Linkage::CentroidMeans => {
            let cf = features.as_ref().expect("checked above");
            state.centroids = cf.features.rows().map(<[f64]>::to_vec).collect();
            for i in 0..n {
                for j in i + 1..n {
                    let v = cf
                        .metric
                        .distance(&state.centroids[i], &state.centroids[j])
                        .unwrap_or(f64::NAN);
                    state.set(i, j, v);
                }
            }
        }
        _ => {}
    }

    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        let (a, b, height) = state.closest_pair()?;
        let size = state.members[a].len() + state.members[b].len();
        merges.push(Merge {
            left: state.node[a],
            right: state.node[b],
            height,
            size,
        });
        state.merge(a, b, height, features.as_ref())?;
        state.node[a] = n + step;
    }
    Ok(Dendrogram::new_unchecked(n, linkage, merges))
}

struct State {
    n: usize,
    linkage: Linkage,
    /// Square copy of the item dissimilarities.
    sq: Vec<f64>,
    /// Current linkage value between active slots, stored symmetrically.
    dist: Vec<f64>,
    /// Cross-pair sums (average linkage only).
    sums: Vec<f64>,
    members: Vec<Vec<usize>>,
    node: Vec<usize>,
    /// `r(i, cluster containing i)` (minimax only).
    own_radius: Vec<f64>,
    /// Group means (centroid-means only).
    centroids: Vec<Vec<f64>>,
    /// Active slots in ascending order.
    active: Vec<usize>,
}

impl State {
    #[inline]
    fn set(&mut self, a: usize, c: usize, v: f64) {
        self.dist[a * self.n + c] = v;
        self.dist[c * self.n + a] = v;
    }

    #[inline]
    fn get(&self, a: usize, c: usize) -> f64 {
        self.dist[a * self.n + c]
    }

    fn closest_pair(&self) -> Result<(usize, usize, f64)> {
        let mut best = (usize::MAX, usize::MAX, f64::INFINITY);
        for (pos, &a) in self.active.iter().enumerate() {
            let row = &self.dist[a * self.n..(a + 1) * self.n];
            for &c in &self.active[pos + 1..] {
                let v = row[c];
                if !v.is_finite() {
                    return Err(Error::NonFiniteLinkage {
                        left: a,
                        right: c,
                        value: v,
                    });
                }
                if v < best.2 || best.0 == usize::MAX {
                    best = (a, c, v);
                }
            }
        }
        Ok(best)
    }

    fn merge(&mut self, a: usize, b: usize, height: f64, features: Option<&CentroidFeatures<'_>>) -> Result<()> {
        let n = self.n;
        let (size_a, size_b) = (self.members[a].len() as f64, self.members[b].len() as f64);
        let moved = std::mem::take(&mut self.members[b]);

        if self.linkage == Linkage::Minimax {
            for &i in &self.members[a] {
                let far = moved.iter().map(|&j| self.sq[i * n + j]).fold(0.0, f64::max);
                self.own_radius[i] = self.own_radius[i].max(far);
            }
            for &j in &moved {
                let far = self.members[a].iter().map(|&i| self.sq[i * n + j]).fold(0.0, f64::max);
                self.own_radius[j] = self.own_radius[j].max(far);
            }
        }
        self.members[a].extend_from_slice(&moved);
        self.active.retain(|&s| s != b);

        if self.linkage == Linkage::CentroidMeans {
            let cf = features.ok_or(Error::MissingFeatures)?;
            self.centroids[a] = mean_of(cf.features, &self.members[a]);
        }

        let others: Vec<usize> = self.active.iter().copied().filter(|&c| c != a).collect();
        for c in others {
            let v = match self.linkage {
                Linkage::Single => self.get(a, c).min(self.get(b, c)),
                Linkage::Complete => self.get(a, c).max(self.get(b, c)),
                Linkage::Average => {
                    let s = self.sums[a * n + c] + self.sums[b * n + c];
                    self.sums[a * n + c] = s;
                    self.sums[c * n + a] = s;
                    s / (self.members[a].len() * self.members[c].len()) as f64
                }
                Linkage::Centroid => {
                    let total = size_a + size_b;
                    (size_a * self.get(a, c) + size_b * self.get(b, c)) / total
                        - size_a * size_b * height / (total * total)
                }
                Linkage::CentroidMeans => {
                    let cf = features.ok_or(Error::MissingFeatures)?;
                    cf.metric
                        .distance(&self.centroids[a], &self.centroids[c])
                        .unwrap_or(f64::NAN)
                }
                Linkage::Minimax => self.union_radius(a, c),
            };
            self.set(a, c, v);
        }
        Ok(())
    }

    /// Minimax radius of `members[a] u members[c]` from the cached per-member
    /// radii plus one pass over the cross block.
    fn union_radius(&self, a: usize, c: usize) -> f64 {
        let n = self.n;
        let other = &self.members[c];
        let mut col_max: Vec<f64> = other.iter().map(|&j| self.own_radius[j]).collect();
        let mut best = f64::INFINITY;
        for &i in &self.members[a] {
            let row = &self.sq[i * n..(i + 1) * n];
            let mut row_max = self.own_radius[i];
            for (slot, &j) in col_max.iter_mut().zip(other) {
                let v = row[j];
                row_max = row_max.max(v);
                *slot = slot.max(v);
            }
            best = best.min(row_max);
        }
        col_max.into_iter().fold(best, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissim::{FeatureMatrix, Metric};

    fn line(points: &[f64]) -> DissimilarityMatrix {
        DissimilarityMatrix::from_fn(points.len(), |i, j| (points[i] - points[j]).abs()).unwrap()
    }

    #[test]
    fn two_items_merge_once() {
        let d = line(&[0.0, 4.0]);
        let f = FeatureMatrix::new(2, 1, vec![0.0, 4.0]).unwrap();
        for rule in Linkage::STANDARD.into_iter().chain([Linkage::CentroidMeans]) {
            let cf = CentroidFeatures {
                features: &f,
                metric: Metric::L2,
            };
            let dend = agglomerate(&d, rule, Some(cf)).unwrap();
            assert_eq!(
                dend.merges(),
                &[Merge {
                    left: 0,
                    right: 1,
                    height: 4.0,
                    size: 2
                }]
            );
        }
    }

    #[test]
    fn two_pairs_on_a_line() {
        let d = line(&[0.0, 1.0, 10.0, 11.0]);
        let dend = agglomerate(&d, Linkage::Single, None).unwrap();
        let got: Vec<_> = dend.merges().iter().map(|m| (m.left, m.right, m.height)).collect();
        assert_eq!(got, vec![(0, 1, 1.0), (2, 3, 1.0), (4, 5, 9.0)]);
        assert_eq!(dend.merge_leaders(), vec![(0, 1), (2, 3), (0, 2)]);
    }

    #[test]
    fn minimax_heights_on_a_line() {
        // {0,1,2} has radius 1 around item 1; adding 10 gives radius 8 around item 2
        let d = line(&[0.0, 1.0, 2.0, 10.0]);
        let dend = agglomerate(&d, Linkage::Minimax, None).unwrap();
        let h: Vec<f64> = dend.heights().collect();
        assert_eq!(h, vec![1.0, 1.0, 8.0]);
    }

    #[test]
    fn centroid_means_requires_features() {
        let d = line(&[0.0, 1.0, 3.0]);
        assert!(matches!(
            agglomerate(&d, Linkage::CentroidMeans, None),
            Err(Error::MissingFeatures)
        ));
    }
}
