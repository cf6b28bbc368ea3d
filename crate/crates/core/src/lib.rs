//! Hierarchical agglomerative clustering with minimax linkage, the standard
//! linkage rules, and the pair-counting evaluation used to compare them.
//!
//! The usual flow is: build a [`DissimilarityMatrix`] (from features or a
//! pairwise file), run [`agglomerate`] once per linkage rule, then either
//! [`Dendrogram::cut`] at a single `k` or [`sweep`] every `k` to get
//! [`MetricRecord`]s.

pub mod agglomerate;
pub mod datagen;
pub mod dissim;
mod error;
pub mod ingest;
mod labels;
pub mod metrics;
pub mod plot;
pub mod report;
pub mod sweep;

pub use agglomerate::{
    agglomerate, linkage_distance, minimax_radius, prototypes, radius, CentroidFeatures, Clustering, Dendrogram,
    Linkage, Merge, Prototype, PrototypeAssignment,
};
pub use dissim::{compute_dissimilarity, scale_center, DissimilarityMatrix, FeatureMatrix, Metric};
pub use error::{Error, Result};
pub use ingest::{Dataset, DatasetDescriptor};
pub use labels::Labels;
pub use metrics::{ConfusionCounts, MetricRecord};
pub use sweep::{sweep, CurveRow, CurveTable};
