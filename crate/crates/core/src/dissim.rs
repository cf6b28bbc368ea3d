//! Feature matrices and condensed pairwise dissimilarity matrices.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major `n x p` matrix of item features.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    n: usize,
    p: usize,
    values: Vec<f64>,
}

impl FeatureMatrix {
    /// Builds a matrix from row-major values. Requires `n >= 2`, `p >= 1` and
    /// finite entries.
    pub fn new(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 rows, got {n}")));
        }
        if p < 1 {
            return Err(Error::InvalidInput("need at least 1 column".into()));
        }
        if values.len() != n * p {
            return Err(Error::InvalidInput(format!(
                "expected {} values for a {n}x{p} matrix, got {}",
                n * p,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature {
                row: pos / p,
                col: pos % p,
            });
        }
        Ok(FeatureMatrix { n, p, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::InvalidInput(format!(
                "row {i} has {} columns, expected {p}",
                rows[i].len()
            )));
        }
        Self::new(rows.len(), p, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.p)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[j])
    }
}

/// Symmetric dissimilarity matrix with an implied zero diagonal, stored as the
/// row-major upper triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    data: Vec<f64>,
}

/// Position of pair `(i, j)`, `i < j < n`, in the condensed upper triangle.
#[inline]
pub fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl DissimilarityMatrix {
    /// Wraps a condensed vector of length `n(n-1)/2`. Entries must be finite
    /// and non-negative.
    pub fn from_condensed(n: usize, data: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 items, got {n}")));
        }
        if data.len() != n * (n - 1) / 2 {
            return Err(Error::InvalidInput(format!(
                "condensed matrix for n = {n} needs {} entries, got {}",
                n * (n - 1) / 2,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput(format!(
                "dissimilarity entry {pos} is {} (must be finite and >= 0)",
                data[pos]
            )));
        }
        Ok(DissimilarityMatrix { n, data })
    }

    /// Fills the matrix from a pairwise function evaluated once per `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                data.push(f(i, j));
            }
        }
        Self::from_condensed(n, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.data[condensed_index(self.n, i, j)],
            std::cmp::Ordering::Greater => self.data[condensed_index(self.n, j, i)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    pub fn condensed(&self) -> &[f64] {
        &self.data
    }

    /// Iterates `(i, j, d_ij)` over `i < j` in condensed order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .zip(self.data.iter())
            .map(|((i, j), &v)| (i, j, v))
    }
}

/// Pairwise metric applied to feature rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    L1,
    L2,
    Correlation(CorrelationOptions),
}

/// How the correlation dissimilarity is formed. Defaults to signed Pearson,
/// giving `1 - r` in `[0, 2]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct CorrelationOptions {
    pub kind: CorrelationKind,
    /// Use `1 - |r|` instead of `1 - r`.
    pub absolute: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationKind {
    #[default]
    Pearson,
    Spearman,
}

impl Metric {
    pub const CORRELATION: Metric = Metric::Correlation(CorrelationOptions {
        kind: CorrelationKind::Pearson,
        absolute: false,
    });

    /// Distance between two rows of equal length. For correlation the rows
    /// must not be constant.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> Option<f64> {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Metric::L1 => Some(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()),
            Metric::L2 => Some(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()),
            Metric::Correlation(opts) => {
                let r = match opts.kind {
                    CorrelationKind::Pearson => pearson(a, b)?,
                    CorrelationKind::Spearman => pearson(&ranks(a), &ranks(b))?,
                };
                let r = r.clamp(-1.0, 1.0);
                Some(if opts.absolute { 1.0 - r.abs() } else { 1.0 - r })
            }
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::L1 => f.write_str("L1"),
            Metric::L2 => f.write_str("L2"),
            Metric::Correlation(_) => f.write_str("correlation"),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" | "manhattan" => Ok(Metric::L1),
            "l2" | "euclidean" => Ok(Metric::L2),
            "correlation" | "pearson" => Ok(Metric::CORRELATION),
            "spearman" => Ok(Metric::Correlation(CorrelationOptions {
                kind: CorrelationKind::Spearman,
                absolute: false,
            })),
            other => Err(Error::InvalidInput(format!("unknown metric '{other}'"))),
        }
    }
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some(sab / (saa.sqrt() * sbb.sqrt()))
}

/// Average ranks (1-based, ties share the mean rank).
fn ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
    let mut out = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            out[i] = rank;
        }
        start = end;
    }
    out
}

fn is_constant(row: &[f64]) -> bool {
    row.iter().all(|v| *v == row[0])
}

/// Computes all pairwise dissimilarities between the rows of `features`.
pub fn compute_dissimilarity(features: &FeatureMatrix, metric: Metric) -> Result<DissimilarityMatrix> {
    if let Metric::Correlation(_) = metric {
        if features.p() < 2 {
            return Err(Error::InvalidInput(
                "correlation dissimilarity needs at least 2 features".into(),
            ));
        }
        if let Some(row) = features.rows().position(is_constant) {
            return Err(Error::ZeroVarianceRow { row });
        }
    }
    let n = features.n();
    let mut data = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let v = metric
                .distance(features.row(i), features.row(j))
                .ok_or(Error::ZeroVarianceRow { row: i })?;
            data.push(v);
        }
    }
    DissimilarityMatrix::from_condensed(n, data)
}

/// Centers every column to mean 0 and scales it to sample standard deviation 1
/// (`n - 1` denominator).
pub fn scale_center(features: &FeatureMatrix) -> Result<FeatureMatrix> {
    let (n, p) = (features.n(), features.p());
    let mut values = features.values().to_vec();
    for j in 0..p {
        let mean = features.column(j).sum::<f64>() / n as f64;
        let ss: f64 = features.column(j).map(|v| (v - mean) * (v - mean)).sum();
        let sd = (ss / (n - 1) as f64).sqrt();
        if sd == 0.0 || !sd.is_finite() {
            return Err(Error::ConstantColumn { col: j });
        }
        for i in 0..n {
            values[i * p + j] = (values[i * p + j] - mean) / sd;
        }
    }
    FeatureMatrix::new(n, p, values)
}
