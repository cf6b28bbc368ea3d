//! Seeded Gaussian cluster generators: spherical, elliptical and spherical
//! with outliers.
//!
//! Cluster `c` has mean `separation / sqrt(2) * e_c`, so every pair of means
//! is exactly `separation` apart. Draws use ChaCha8 with one stream per
//! cluster, making each cluster's points independent of the cluster count.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dissim::FeatureMatrix;
use crate::error::{Error, Result};
use crate::labels::Labels;

/// Generator identity recorded alongside generated data.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng/rand_chacha-0.9/stream-per-cluster";

const ROTATION_STREAM: u64 = 1 << 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Spherical,
    Elliptical,
    Outliers,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Spherical => "spherical",
            Family::Elliptical => "elliptical",
            Family::Outliers => "outliers",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spherical" => Ok(Family::Spherical),
            "elliptical" => Ok(Family::Elliptical),
            "outliers" | "outlier" => Ok(Family::Outliers),
            other => Err(Error::InvalidInput(format!("unknown simulation family '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimSpec {
    pub family: Family,
    pub clusters: usize,
    pub points_per_cluster: usize,
    pub dim: usize,
    pub seed: u64,
    /// Distance between every pair of cluster means.
    pub separation: f64,
    /// Per-coordinate standard deviation of spherical clusters.
    pub sigma: f64,
    /// Standard deviation along the long axis of elliptical clusters.
    pub long_sd: f64,
    /// Standard deviation along every other axis of elliptical clusters.
    pub short_sd: f64,
    /// Fraction of each cluster's points redrawn as outliers.
    pub outlier_fraction: f64,
    /// Outlier standard deviation as a multiple of `sigma`.
    pub outlier_scale: f64,
}

impl SimSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        SimSpec {
            family,
            clusters: 3,
            points_per_cluster: 100,
            dim: 10,
            seed,
            separation: 5.0,
            sigma: 1.0,
            long_sd: 2.5,
            short_sd: 0.5,
            outlier_fraction: 0.05,
            outlier_scale: 3.0,
        }
    }

    pub fn n(&self) -> usize {
        self.clusters * self.points_per_cluster
    }

    /// Outlier rows per cluster (outliers family only).
    pub fn outliers_per_cluster(&self) -> usize {
        match self.family {
            Family::Outliers => (self.outlier_fraction * self.points_per_cluster as f64).round() as usize,
            _ => 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.clusters == 0 || self.points_per_cluster == 0 || self.dim == 0 {
            return Err(Error::InvalidInput(
                "cluster count, cluster size and dimension must be positive".into(),
            ));
        }
        if self.n() < 2 {
            return Err(Error::InvalidInput("a simulation needs at least 2 points".into()));
        }
        if self.clusters > self.dim {
            return Err(Error::InvalidInput(format!(
                "{} equidistant means need dim >= {}, got {}",
                self.clusters, self.clusters, self.dim
            )));
        }
        let params = [
            self.separation,
            self.sigma,
            self.long_sd,
            self.short_sd,
            self.outlier_scale,
        ];
        if params.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput(
                "simulation scales must be finite and non-negative".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.outlier_fraction) {
            return Err(Error::InvalidInput("outlier fraction must lie in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn mean(&self, cluster: usize) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        if self.clusters > 1 {
            m[cluster] = self.separation / std::f64::consts::SQRT_2;
        }
        m
    }

    /// Orthonormal rotation applied to elliptical cluster `cluster`, as rows:
    /// row `a` is the direction of the cluster's `a`-th principal axis.
    pub fn rotation(&self, cluster: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(ROTATION_STREAM | cluster as u64);
        random_rotation(self.dim, &mut rng)
    }
}

/// Haar-distributed orthonormal basis via Gram-Schmidt on Gaussian vectors.
fn random_rotation(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    basis
}

#[derive(Clone, Debug)]
pub struct Simulated {
    pub features: FeatureMatrix,
    pub labels: Labels,
}

/// Draws `clusters * points_per_cluster` rows, cluster by cluster. For the
/// outliers family the last `outliers_per_cluster()` rows of each cluster are
/// redrawn around the same mean with `outlier_scale * sigma` spread and keep
/// their cluster's label.
pub fn generate(spec: &SimSpec) -> Result<Simulated> {
    spec.validate()?;
    let (dim, per) = (spec.dim, spec.points_per_cluster);
    let mut values = Vec::with_capacity(spec.n() * dim);
    let mut ids = Vec::with_capacity(spec.n());
    for c in 0..spec.clusters {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(c as u64);
        let mean = spec.mean(c);
        let rotation = (spec.family == Family::Elliptical).then(|| spec.rotation(c));
        let regular = per - spec.outliers_per_cluster();
        for row in 0..per {
            let z: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let point: Vec<f64> = match &rotation {
                Some(axes) => {
                    let mut x = mean.clone();
                    for (a, axis) in axes.iter().enumerate() {
                        let sd = if a == 0 { spec.long_sd } else { spec.short_sd };
                        x.iter_mut().zip(axis).for_each(|(xi, u)| *xi += sd * z[a] * u);
                    }
                    x
                }
                None => {
                    let sd = if row < regular {
                        spec.sigma
                    } else {
                        spec.outlier_scale * spec.sigma
                    };
                    mean.iter().zip(&z).map(|(m, zi)| m + sd * zi).collect()
                }
            };
            values.extend(point);
            ids.push(c);
        }
    }
    Ok(Simulated {
        features: FeatureMatrix::new(spec.n(), dim, values)?,
        labels: Labels::from_ids(ids),
    })
}
