//! Brute-force references kept independent of the library's code paths.
#![allow(dead_code)]

use minimax_core::{DissimilarityMatrix, FeatureMatrix, Linkage, Metric};
use rand::Rng;

pub fn exhaustive_minimax(group: &[usize], d: &DissimilarityMatrix) -> (usize, f64) {
    let mut sorted = group.to_vec();
    sorted.sort_unstable();
    let mut best = (usize::MAX, f64::INFINITY);
    for &c in &sorted {
        let mut r = 0.0f64;
        for &j in &sorted {
            if j != c {
                r = r.max(d.get(c, j));
            }
        }
        if r < best.1 {
            best = (c, r);
        }
    }
    best
}

fn mean_row(f: &FeatureMatrix, g: &[usize]) -> Vec<f64> {
    (0..f.p())
        .map(|c| g.iter().map(|&i| f.row(i)[c]).sum::<f64>() / g.len() as f64)
        .collect()
}

fn point_distance(metric: Metric, a: &[f64], b: &[f64]) -> f64 {
    match metric {
        Metric::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        Metric::L2 => a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt(),
        Metric::Correlation(_) => unimplemented!("oracle covers L1/L2 only"),
    }
}

/// The linkage formulas, written out literally.
pub fn formula(
    g: &[usize],
    h: &[usize],
    rule: Linkage,
    d: &DissimilarityMatrix,
    features: Option<(&FeatureMatrix, Metric)>,
) -> f64 {
    let mut cross = Vec::new();
    for &i in g {
        for &j in h {
            cross.push(d.get(i, j));
        }
    }
    match rule {
        Linkage::Single => cross.iter().cloned().fold(f64::INFINITY, f64::min),
        Linkage::Complete => cross.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        Linkage::Average => cross.iter().sum::<f64>() / cross.len() as f64,
        Linkage::Centroid => {
            let within = |s: &[usize]| {
                let mut t = 0.0;
                for &a in s {
                    for &b in s {
                        t += d.get(a, b);
                    }
                }
                t / (s.len() * s.len()) as f64
            };
            cross.iter().sum::<f64>() / cross.len() as f64 - within(g) / 2.0 - within(h) / 2.0
        }
        Linkage::CentroidMeans => {
            let (f, m) = features.expect("features");
            point_distance(m, &mean_row(f, g), &mean_row(f, h))
        }
        Linkage::Minimax => {
            let u: Vec<usize> = g.iter().chain(h).copied().collect();
            exhaustive_minimax(&u, d).1
        }
    }
}

/// Merge record as (left leader, right leader, height).
pub type NaiveMerge = (usize, usize, f64);

/// Re-evaluates every group pair from scratch at every step. Groups are kept
/// ordered by smallest member, and the first strict minimum wins.
pub fn naive_agglomerate(
    d: &DissimilarityMatrix,
    rule: Linkage,
    features: Option<(&FeatureMatrix, Metric)>,
) -> Vec<NaiveMerge> {
    let mut groups: Vec<Vec<usize>> = (0..d.n()).map(|i| vec![i]).collect();
    let mut out = Vec::new();
    while groups.len() > 1 {
        let mut best = (0, 0, f64::INFINITY);
        let mut found = false;
        for a in 0..groups.len() {
            for b in a + 1..groups.len() {
                let v = formula(&groups[a], &groups[b], rule, d, features);
                if !found || v < best.2 {
                    best = (a, b, v);
                    found = true;
                }
            }
        }
        let (a, b, h) = best;
        out.push((groups[a][0], groups[b][0], h));
        let moved = groups.remove(b);
        groups[a].extend(moved);
        groups[a].sort_unstable();
    }
    out
}

pub fn random_dissimilarity<R: Rng>(rng: &mut R, n: usize) -> DissimilarityMatrix {
    DissimilarityMatrix::from_fn(n, |_, _| rng.random_range(0.0..10.0)).unwrap()
}

pub fn random_features<R: Rng>(rng: &mut R, n: usize, p: usize) -> FeatureMatrix {
    FeatureMatrix::new(n, p, (0..n * p).map(|_| rng.random_range(-5.0..5.0)).collect()).unwrap()
}

/// Two disjoint non-empty groups drawn from `0..n`.
pub fn random_groups<R: Rng>(rng: &mut R, n: usize, max_size: usize) -> (Vec<usize>, Vec<usize>) {
    let mut items: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        items.swap(i, rng.random_range(0..=i));
    }
    let gs = rng.random_range(1..=max_size.min(n - 1));
    let hs = rng.random_range(1..=max_size.min(n - gs));
    (items[..gs].to_vec(), items[gs..gs + hs].to_vec())
}
