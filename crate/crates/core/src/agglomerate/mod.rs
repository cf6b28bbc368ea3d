//! Agglomerative clustering under single, complete, average, centroid and
//! minimax linkage, plus dendrogram cuts and cluster prototypes.

mod dendrogram;
mod engine;
mod linkage;
mod prototype;

pub use dendrogram::{Clustering, Dendrogram, Merge};
pub use engine::agglomerate;
pub use linkage::{linkage_distance, minimax_radius, radius, CentroidFeatures, Linkage};
pub use prototype::{prototypes, Prototype, PrototypeAssignment};
