use super::dendrogram::Clustering;
use super::linkage::minimax_radius;
use crate::dissim::DissimilarityMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prototype {
    /// Original item index of the prototype.
    pub index: usize,
    /// Minimax radius of the cluster around the prototype.
    pub radius: f64,
}

/// Prototype of every cluster, indexed by cluster id.
#[derive(Clone, Debug, PartialEq)]
pub struct PrototypeAssignment {
    pub prototypes: Vec<Prototype>,
}

impl PrototypeAssignment {
    /// Largest minimax radius over all clusters.
    pub fn max_radius(&self) -> f64 {
        self.prototypes.iter().map(|p| p.radius).fold(0.0, f64::max)
    }
}

pub fn prototypes(c: &Clustering, d: &DissimilarityMatrix) -> Result<PrototypeAssignment> {
    if c.n() != d.n() {
        return Err(Error::InvalidInput(format!(
            "clustering covers {} items but the dissimilarity matrix has {}",
            c.n(),
            d.n()
        )));
    }
    let prototypes = c
        .clusters()
        .iter()
        .map(|members| minimax_radius(members, d).map(|(index, radius)| Prototype { index, radius }))
        .collect::<Result<_>>()?;
    Ok(PrototypeAssignment { prototypes })
}
