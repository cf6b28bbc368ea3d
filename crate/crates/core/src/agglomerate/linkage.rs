use std::fmt;
use std::str::FromStr;

use crate::dissim::{DissimilarityMatrix, FeatureMatrix, Metric};
use crate::error::{Error, Result};

/// Rule for the dissimilarity between two groups of items.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Linkage {
    /// Smallest cross-group dissimilarity.
    Single,
    /// Largest cross-group dissimilarity.
    Complete,
    /// Unweighted mean over all cross-group pairs (UPGMA).
    Average,
    /// Centroid linkage expressed purely in terms of the dissimilarities:
    ///
    /// `mean_{G x H} d - mean_{G x G} d / 2 - mean_{H x H} d / 2`
    ///
    /// This is what the Lance-Williams centroid recurrence computes for any
    /// input. With squared Euclidean input it is the squared distance between
    /// the group means; on plain distances it is the value produced by the
    /// usual `hclust(dist(x), "centroid")` pipeline. It needs no features, so
    /// it also runs on pairwise-only data.
    Centroid,
    /// Centroid linkage on feature means: the metric applied to the two group
    /// mean vectors, recomputed from the features for every evaluation.
    CentroidMeans,
    /// Radius of the smallest ball centred on a member of `G u H` that covers
    /// `G u H`.
    Minimax,
}

impl Linkage {
    /// The five rules compared by the benchmark.
    pub const STANDARD: [Linkage; 5] = [
        Linkage::Single,
        Linkage::Complete,
        Linkage::Average,
        Linkage::Centroid,
        Linkage::Minimax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
            Linkage::Centroid => "centroid",
            Linkage::CentroidMeans => "centroid-means",
            Linkage::Minimax => "minimax",
        }
    }

    /// Whether merge heights are guaranteed non-decreasing.
    pub fn is_monotone(self) -> bool {
        !matches!(self, Linkage::Centroid | Linkage::CentroidMeans)
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" | "upgma" => Ok(Linkage::Average),
            "centroid" => Ok(Linkage::Centroid),
            "centroid-means" | "centroid_means" => Ok(Linkage::CentroidMeans),
            "minimax" => Ok(Linkage::Minimax),
            other => Err(Error::InvalidInput(format!("unknown linkage '{other}'"))),
        }
    }
}

/// Features and point metric used by [`Linkage::CentroidMeans`].
#[derive(Clone, Copy, Debug)]
pub struct CentroidFeatures<'a> {
    pub features: &'a FeatureMatrix,
    pub metric: Metric,
}

/// `r(i, G) = max_{j in G} d_ij`.
pub fn radius(i: usize, group: &[usize], d: &DissimilarityMatrix) -> Result<f64> {
    if !group.contains(&i) {
        return Err(Error::NotAMember { item: i });
    }
    Ok(group.iter().map(|&j| d.get(i, j)).fold(0.0, f64::max))
}

/// Member of `group` with the smallest radius, and that radius. Ties go to the
/// lowest item index.
pub fn minimax_radius(group: &[usize], d: &DissimilarityMatrix) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for &i in group {
        let r = group.iter().map(|&j| d.get(i, j)).fold(0.0, f64::max);
        best = match best {
            Some((bi, br)) if br < r || (br == r && bi < i) => Some((bi, br)),
            _ => Some((i, r)),
        };
    }
    best.ok_or(Error::EmptyGroup)
}

pub(crate) fn mean_of(features: &FeatureMatrix, group: &[usize]) -> Vec<f64> {
    let mut acc = vec![0.0; features.p()];
    for &i in group {
        for (a, v) in acc.iter_mut().zip(features.row(i)) {
            *a += v;
        }
    }
    let m = group.len() as f64;
    acc.iter_mut().for_each(|a| *a /= m);
    acc
}

/// Direct evaluation of the linkage formula for two disjoint, non-empty groups.
pub fn linkage_distance(
    g: &[usize],
    h: &[usize],
    linkage: Linkage,
    d: &DissimilarityMatrix,
    features: Option<&CentroidFeatures<'_>>,
) -> Result<f64> {
    if g.is_empty() || h.is_empty() {
        return Err(Error::EmptyGroup);
    }
    if let Some(&i) = g.iter().find(|i| h.contains(i)) {
        return Err(Error::InvalidInput(format!("item {i} appears in both groups")));
    }
    let cross = || g.iter().flat_map(|&i| h.iter().map(move |&j| d.get(i, j)));
    let value = match linkage {
        Linkage::Single => cross().fold(f64::INFINITY, f64::min),
        Linkage::Complete => cross().fold(f64::NEG_INFINITY, f64::max),
        Linkage::Average => cross().sum::<f64>() / (g.len() * h.len()) as f64,
        Linkage::Centroid => {
            let within = |s: &[usize]| {
                let mut sum = 0.0;
                for (a, &i) in s.iter().enumerate() {
                    for &j in &s[a + 1..] {
                        sum += d.get(i, j);
                    }
                }
                2.0 * sum / (s.len() * s.len()) as f64
            };
            cross().sum::<f64>() / (g.len() * h.len()) as f64 - 0.5 * within(g) - 0.5 * within(h)
        }
        Linkage::CentroidMeans => {
            let cf = features.ok_or(Error::MissingFeatures)?;
            let (mg, mh) = (mean_of(cf.features, g), mean_of(cf.features, h));
            cf.metric.distance(&mg, &mh).ok_or(Error::NonFiniteLinkage {
                left: g[0],
                right: h[0],
                value: f64::NAN,
            })?
        }
        Linkage::Minimax => {
            let union: Vec<usize> = g.iter().chain(h).copied().collect();
            minimax_radius(&union, d)?.1
        }
    };
    Ok(value)
}
