//! Dataset descriptors and loaders for feature CSVs and pairwise comparison
//! files.
//!
//! Descriptor files are flat TOML:
//!
//! ```toml
//! name = "iris"
//! kind = "features"          # features | pairwise | simulation
//! path = "iris.csv"          # relative to the data root
//! label_column = "species"
//! metric = "L2"              # L1 | L2 | correlation | spearman
//! scale_center = true
//! true_k = 3
//! n = 150                    # optional, checked when present
//! sha256 = "..."             # optional content hash of `path`
//! ```
//!
//! Pairwise datasets use `labels_path` (CSV `id,label`), `score` =
//! `"similarity"` or `"dissimilarity"`, and an optional `score_range`.
//! Simulations use `family` plus optional generator overrides.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::datagen::{self, Family, SimSpec};
use crate::dissim::{self, CorrelationKind, CorrelationOptions, DissimilarityMatrix, FeatureMatrix, Metric};
use crate::error::{Error, Result};
use crate::labels::Labels;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Features,
    Pairwise,
    Simulation,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreOrientation {
    #[default]
    Similarity,
    Dissimilarity,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetDescriptor {
    pub name: String,
    pub kind: DatasetKind,
    pub path: Option<PathBuf>,
    pub true_k: usize,
    pub n: Option<usize>,
    pub sha256: Option<String>,

    pub label_column: Option<String>,
    #[serde(default)]
    pub ignore_columns: Vec<String>,
    pub metric: Option<String>,
    pub correlation: Option<CorrelationKind>,
    #[serde(default)]
    pub absolute_correlation: bool,
    #[serde(default)]
    pub scale_center: bool,

    pub labels_path: Option<PathBuf>,
    #[serde(default)]
    pub score: ScoreOrientation,
    pub score_range: Option<[f64; 2]>,

    pub family: Option<String>,
    pub clusters: Option<usize>,
    pub points_per_cluster: Option<usize>,
    pub dim: Option<usize>,
    pub separation: Option<f64>,
    pub sigma: Option<f64>,
    pub long_sd: Option<f64>,
    pub short_sd: Option<f64>,
    pub outlier_fraction: Option<f64>,
    pub outlier_scale: Option<f64>,
}

impl DatasetDescriptor {
    pub fn from_toml(text: &str) -> Result<Self> {
        let d: DatasetDescriptor = toml::from_str(text).map_err(|e| Error::Descriptor(e.to_string()))?;
        d.validate()?;
        Ok(d)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.into(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| Error::Descriptor(format!("{}: {e}", path.display())))
    }

    /// Descriptor for a built-in simulation named `<family>-<l1|l2>`.
    pub fn simulation(family: Family, metric: Metric) -> Self {
        let tag = match metric {
            Metric::L1 => "l1",
            Metric::L2 => "l2",
            Metric::Correlation(_) => "correlation",
        };
        DatasetDescriptor {
            name: format!("{family}-{tag}"),
            kind: DatasetKind::Simulation,
            path: None,
            true_k: 3,
            n: None,
            sha256: None,
            label_column: None,
            ignore_columns: Vec::new(),
            metric: Some(metric.to_string()),
            correlation: None,
            absolute_correlation: false,
            scale_center: false,
            labels_path: None,
            score: ScoreOrientation::Similarity,
            score_range: None,
            family: Some(family.name().into()),
            clusters: None,
            points_per_cluster: None,
            dim: None,
            separation: None,
            sigma: None,
            long_sd: None,
            short_sd: None,
            outlier_fraction: None,
            outlier_scale: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.true_k < 1 {
            return Err(Error::Descriptor(format!("{}: true_k must be >= 1", self.name)));
        }
        match self.kind {
            DatasetKind::Features | DatasetKind::Pairwise if self.path.is_none() => {
                Err(Error::Descriptor(format!("{}: missing 'path'", self.name)))
            }
            DatasetKind::Pairwise if self.labels_path.is_none() => {
                Err(Error::Descriptor(format!("{}: missing 'labels_path'", self.name)))
            }
            DatasetKind::Simulation if self.family.is_none() => {
                Err(Error::Descriptor(format!("{}: missing 'family'", self.name)))
            }
            _ => {
                if let Some(m) = &self.metric {
                    m.parse::<Metric>().map_err(|e| Error::Descriptor(e.to_string()))?;
                }
                Ok(())
            }
        }
    }

    /// Metric declared by the descriptor, with correlation options applied.
    pub fn metric(&self) -> Result<Metric> {
        let base: Metric = self.metric.as_deref().unwrap_or("L2").parse()?;
        Ok(match base {
            Metric::Correlation(opts) => Metric::Correlation(CorrelationOptions {
                kind: self.correlation.unwrap_or(opts.kind),
                absolute: self.absolute_correlation,
            }),
            m => m,
        })
    }

    /// Simulation parameters with descriptor overrides applied to the defaults.
    pub fn sim_spec(&self, seed: u64) -> Result<SimSpec> {
        let family: Family = self
            .family
            .as_deref()
            .ok_or_else(|| Error::Descriptor(format!("{}: missing 'family'", self.name)))?
            .parse()?;
        let mut spec = SimSpec::new(family, seed);
        macro_rules! apply {
            ($($field:ident),*) => { $( if let Some(v) = self.$field { spec.$field = v; } )* };
        }
        apply!(
            clusters,
            points_per_cluster,
            dim,
            separation,
            sigma,
            long_sd,
            short_sd,
            outlier_fraction,
            outlier_scale
        );
        Ok(spec)
    }
}

/// A loaded dataset ready for clustering.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub name: String,
    pub dissimilarity: DissimilarityMatrix,
    /// Features after preprocessing; absent for pairwise data.
    pub features: Option<FeatureMatrix>,
    /// Metric that produced `dissimilarity`, when it came from features.
    pub metric: Option<Metric>,
    pub labels: Labels,
    pub true_k: usize,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.dissimilarity.n()
    }
}

/// Loads any descriptor kind. `seed` is used by simulations; `metric_override`
/// replaces the descriptor's metric for feature-based kinds.
pub fn load_dataset(
    desc: &DatasetDescriptor,
    data_root: &Path,
    seed: u64,
    metric_override: Option<Metric>,
) -> Result<Dataset> {
    let (features, labels) = match desc.kind {
        DatasetKind::Pairwise => {
            let (dissimilarity, labels) = load_pairwise(data_root, desc)?;
            check_true_k(desc, dissimilarity.n())?;
            return Ok(Dataset {
                name: desc.name.clone(),
                dissimilarity,
                features: None,
                metric: None,
                labels,
                true_k: desc.true_k,
            });
        }
        DatasetKind::Features => load_features(data_root, desc)?,
        DatasetKind::Simulation => {
            let sim = datagen::generate(&desc.sim_spec(seed)?)?;
            (sim.features, sim.labels)
        }
    };
    let features = if desc.scale_center {
        dissim::scale_center(&features)?
    } else {
        features
    };
    let metric = match metric_override {
        Some(m) => m,
        None => desc.metric()?,
    };
    let dissimilarity = dissim::compute_dissimilarity(&features, metric)?;
    check_true_k(desc, features.n())?;
    Ok(Dataset {
        name: desc.name.clone(),
        dissimilarity,
        features: Some(features),
        metric: Some(metric),
        labels,
        true_k: desc.true_k,
    })
}

fn check_true_k(desc: &DatasetDescriptor, n: usize) -> Result<()> {
    if desc.true_k > n {
        return Err(Error::Descriptor(format!(
            "{}: true_k = {} exceeds n = {n}",
            desc.name, desc.true_k
        )));
    }
    Ok(())
}

fn resolve(data_root: &Path, rel: &Path) -> PathBuf {
    if rel.is_absolute() {
        rel.to_path_buf()
    } else {
        data_root.join(rel)
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut buf))
        .map_err(|source| Error::Io {
            path: path.into(),
            source,
        })?;
    Ok(buf)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn verify_hash(desc: &DatasetDescriptor, path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(expected) = &desc.sha256 {
        let actual = sha256_hex(bytes);
        if !actual.eq_ignore_ascii_case(expected.trim()) {
            return Err(Error::Data {
                path: path.into(),
                message: format!("content hash {actual} does not match descriptor hash {expected}"),
            });
        }
    }
    Ok(())
}

fn check_n(desc: &DatasetDescriptor, path: &Path, n: usize) -> Result<()> {
    match desc.n {
        Some(declared) if declared != n => Err(Error::Data {
            path: path.into(),
            message: format!("descriptor declares n = {declared}, file has {n} items"),
        }),
        _ => Ok(()),
    }
}

fn csv_position(e: &csv::Error) -> u64 {
    e.position().map_or(0, |p| p.line())
}

/// Reads a headered feature CSV. Every column other than the label column and
/// any ignored columns must be numeric.
pub fn load_features(data_root: &Path, desc: &DatasetDescriptor) -> Result<(FeatureMatrix, Labels)> {
    let path = resolve(data_root, desc.path.as_deref().unwrap_or(Path::new("")));
    let bytes = read_bytes(&path)?;
    verify_hash(desc, &path, &bytes)?;
    let label_column = desc.label_column.as_deref().unwrap_or("label");
    let (features, labels) = read_features(&bytes[..], label_column, &desc.ignore_columns, &path)?;
    check_n(desc, &path, features.n())?;
    Ok((features, labels))
}

pub fn read_features<R: Read>(
    reader: R,
    label_column: &str,
    ignore: &[String],
    path: &Path,
) -> Result<(FeatureMatrix, Labels)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::Data {
            path: path.into(),
            message: format!("missing label column '{label_column}'"),
        })?;
    let feature_cols: Vec<usize> = (0..headers.len())
        .filter(|&c| c != label_idx && !ignore.iter().any(|g| g == &headers[c]))
        .collect();

    let mut values = Vec::new();
    let mut names = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            path: path.into(),
            line: csv_position(&e),
            column: String::new(),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        for &c in &feature_cols {
            let cell = &record[c];
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                path: path.into(),
                line,
                column: headers[c].to_string(),
                message: format!("'{cell}' is not a number"),
            })?;
            values.push(v);
        }
        names.push(record[label_idx].to_string());
    }
    let features = FeatureMatrix::new(names.len(), feature_cols.len(), values).map_err(|e| Error::Data {
        path: path.into(),
        message: e.to_string(),
    })?;
    Ok((features, Labels::from_names(names)))
}

/// Writes features as `x1,...,xp,label`, readable by [`read_features`].
pub fn write_features<W: Write>(features: &FeatureMatrix, labels: &Labels, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=features.p()).map(|j| format!("x{j}")).collect();
    header.push("label".into());
    w.write_record(&header)?;
    for (i, row) in features.rows().enumerate() {
        let mut rec: Vec<String> = row.iter().map(f64::to_string).collect();
        rec.push(labels.name(i).to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Loads an `id_a,id_b,score` file plus its `id,label` companion.
pub fn load_pairwise(data_root: &Path, desc: &DatasetDescriptor) -> Result<(DissimilarityMatrix, Labels)> {
    let path = resolve(data_root, desc.path.as_deref().unwrap_or(Path::new("")));
    let bytes = read_bytes(&path)?;
    verify_hash(desc, &path, &bytes)?;
    let (d, ids) = read_pairwise(&bytes[..], desc.score, desc.score_range, &path)?;
    check_n(desc, &path, d.n())?;

    let labels_path = resolve(data_root, desc.labels_path.as_deref().unwrap_or(Path::new("")));
    let label_of = read_label_map(&read_bytes(&labels_path)?[..], &labels_path)?;
    let mut names = Vec::with_capacity(ids.len());
    for id in &ids {
        let name = label_of.get(id).ok_or_else(|| Error::Data {
            path: labels_path.clone(),
            message: format!("no label for item '{id}'"),
        })?;
        names.push(name.clone());
    }
    if label_of.len() != ids.len() {
        return Err(Error::Data {
            path: labels_path,
            message: format!(
                "{} labelled items, but the pairwise file has {}",
                label_of.len(),
                ids.len()
            ),
        });
    }
    Ok((d, Labels::from_names(names)))
}

fn read_label_map<R: Read>(reader: R, path: &Path) -> Result<HashMap<String, String>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut map = HashMap::new();
    for record in rdr.records() {
        let record = record?;
        if record.len() < 2 {
            return Err(Error::Data {
                path: path.into(),
                message: "label rows need 'id,label'".into(),
            });
        }
        if map.insert(record[0].to_string(), record[1].to_string()).is_some() {
            return Err(Error::Data {
                path: path.into(),
                message: format!("duplicate label for item '{}'", &record[0]),
            });
        }
    }
    Ok(map)
}

/// Parses a pairwise file. Ids become dense indices in order of first
/// appearance; similarities are mapped to `1 - s`. Returns the matrix and the
/// original ids in index order.
pub fn read_pairwise<R: Read>(
    reader: R,
    orientation: ScoreOrientation,
    range: Option<[f64; 2]>,
    path: &Path,
) -> Result<(DissimilarityMatrix, Vec<String>)> {
    let [lo, hi] = range.unwrap_or(match orientation {
        ScoreOrientation::Similarity => [-1.0, 1.0],
        ScoreOrientation::Dissimilarity => [0.0, f64::INFINITY],
    });
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut ids: Vec<String> = Vec::new();
    let mut entries: HashMap<(usize, usize), f64> = HashMap::new();
    let mut intern = |id: &str, ids: &mut Vec<String>| {
        *index.entry(id.to_string()).or_insert_with(|| {
            ids.push(id.to_string());
            ids.len() - 1
        })
    };
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            path: path.into(),
            line: csv_position(&e),
            column: String::new(),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let parse_err = |column: &str, message: String| Error::Parse {
            path: path.into(),
            line,
            column: column.into(),
            message,
        };
        if record.len() != 3 {
            return Err(parse_err("", format!("expected 3 fields, found {}", record.len())));
        }
        let score: f64 = record[2]
            .parse()
            .map_err(|_| parse_err("score", format!("'{}' is not a number", &record[2])))?;
        if !score.is_finite() || score < lo || score > hi {
            return Err(parse_err(
                "score",
                format!("{score} is outside the declared range [{lo}, {hi}]"),
            ));
        }
        let (a, b) = (intern(&record[0], &mut ids), intern(&record[1], &mut ids));
        if a == b {
            return Err(parse_err("id_b", format!("self-pair for item '{}'", &record[0])));
        }
        let value = match orientation {
            ScoreOrientation::Similarity => 1.0 - score,
            ScoreOrientation::Dissimilarity => score,
        };
        if entries.insert((a.min(b), a.max(b)), value).is_some() {
            return Err(parse_err(
                "",
                format!("duplicate pair ({}, {})", &record[0], &record[1]),
            ));
        }
    }
    let n = ids.len();
    let mut missing = Vec::new();
    let mut data = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            match entries.get(&(i, j)) {
                Some(&v) => data.push(v),
                None => missing.push(format!("({}, {})", ids[i], ids[j])),
            }
        }
    }
    if !missing.is_empty() {
        let shown: Vec<_> = missing.iter().take(10).cloned().collect();
        let more = if missing.len() > 10 {
            format!(" and {} more", missing.len() - 10)
        } else {
            String::new()
        };
        return Err(Error::Data {
            path: path.into(),
            message: format!("missing pairs: {}{more}", shown.join(", ")),
        });
    }
    let d = DissimilarityMatrix::from_condensed(n, data).map_err(|e| Error::Data {
        path: path.into(),
        message: e.to_string(),
    })?;
    Ok((d, ids))
}

/// Writes every pair as `id_a,id_b,score` with item indices as ids and the
/// dissimilarity as score.
pub fn write_pairwise<W: Write>(d: &DissimilarityMatrix, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id_a", "id_b", "score"])?;
    for (i, j, v) in d.pairs() {
        w.write_record([i.to_string(), j.to_string(), v.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
