//! Benchmark runner: resolves datasets, builds one dendrogram per
//! (dataset, linkage), sweeps every cut and writes tables and plots.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use minimax_core::datagen::{Family, RNG_ALGORITHM};
use minimax_core::ingest::{load_dataset, DatasetDescriptor, DatasetKind};
use minimax_core::plot::{plot_data, render_svg, PlotKind};
use minimax_core::report::TrueKReport;
use minimax_core::{agglomerate, sweep, CentroidFeatures, CurveTable, Dataset, Dendrogram, Linkage, Metric};
use rayon::prelude::*;

/// Environment variable consulted when `--data-root` is absent.
pub const DATA_ROOT_ENV: &str = "MINIMAX_DATA_ROOT";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(minimax_core::Error),
    #[error("numeric failure: {0}")]
    Numeric(minimax_core::Error),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
            CliError::Output { .. } => 5,
        }
    }
}

impl From<minimax_core::Error> for CliError {
    fn from(e: minimax_core::Error) -> Self {
        use minimax_core::Error as E;
        match e {
            e if e.is_numeric() => CliError::Numeric(e),
            E::Descriptor(_) | E::KOutOfRange { .. } | E::MissingFeatures => CliError::Config(e.to_string()),
            e => CliError::Data(e),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    Csv,
    Svg,
    #[default]
    Both,
}

impl OutputFormat {
    fn csv(self) -> bool {
        self != OutputFormat::Svg
    }

    fn svg(self) -> bool {
        self != OutputFormat::Csv
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub data_root: PathBuf,
    /// Dataset names, descriptor paths, or `<family>-<l1|l2>` simulations.
    pub datasets: Vec<String>,
    pub linkages: Vec<Linkage>,
    /// Inclusive `(first, last)`; `None` sweeps `1..=n`.
    pub k_range: Option<(usize, usize)>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub metric: Option<Metric>,
}

impl RunConfig {
    pub fn new(data_root: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            data_root: data_root.into(),
            datasets: Vec::new(),
            linkages: Linkage::STANDARD.to_vec(),
            k_range: None,
            seed: 1,
            out_dir: out_dir.into(),
            format: OutputFormat::Both,
            metric: None,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.linkages.is_empty() {
            return Err(CliError::Config("at least one linkage rule is required".into()));
        }
        if self.datasets.is_empty() {
            return Err(CliError::Config("at least one dataset is required".into()));
        }
        if let Some((a, b)) = self.k_range {
            if a < 1 || a > b {
                return Err(CliError::Config(format!("invalid k range {a}:{b}")));
            }
        }
        Ok(())
    }
}

/// Parses `a:b` (inclusive) or a single `k`.
pub fn parse_k_range(s: &str) -> Result<(usize, usize), String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("'{t}' is not a positive integer"))
    };
    let (a, b) = match s.split_once(':') {
        Some((a, b)) => (num(a)?, num(b)?),
        None => {
            let k = num(s)?;
            (k, k)
        }
    };
    if a < 1 || a > b {
        return Err(format!("k range {a}:{b} must satisfy 1 <= a <= b"));
    }
    Ok((a, b))
}

/// Data root from the flag, then the environment, then `./data`.
pub fn data_root(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(DATA_ROOT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("data"))
}

/// Resolves a dataset argument: an existing descriptor path, then
/// `<data_root>/<name>.toml`, then a built-in `<family>-<l1|l2>` simulation.
pub fn resolve_dataset(arg: &str, data_root: &Path) -> Result<DatasetDescriptor, CliError> {
    let direct = Path::new(arg);
    if direct.is_file() {
        return Ok(DatasetDescriptor::from_file(direct)?);
    }
    let named = data_root.join(format!("{arg}.toml"));
    if named.is_file() {
        return Ok(DatasetDescriptor::from_file(&named)?);
    }
    if let Some((family, metric)) = arg.rsplit_once('-') {
        if let (Ok(family), Ok(metric @ (Metric::L1 | Metric::L2))) =
            (family.parse::<Family>(), metric.parse::<Metric>())
        {
            return Ok(DatasetDescriptor::simulation(family, metric));
        }
    }
    Err(CliError::Config(format!(
        "unknown dataset '{arg}' (no such descriptor file, no {} and not a built-in simulation)",
        named.display()
    )))
}

/// Everything one run produced, before it is written out.
#[derive(Debug)]
pub struct RunOutput {
    pub curves: CurveTable,
    pub report: TrueKReport,
    pub dendrograms: Vec<(String, Dendrogram)>,
    pub manifest: String,
}

fn job(
    ds: &Dataset,
    linkage: Linkage,
    k_range: (usize, usize),
) -> Result<(Dendrogram, Vec<minimax_core::MetricRecord>), CliError> {
    let features = match (linkage, &ds.features) {
        (Linkage::CentroidMeans, Some(f)) => Some(CentroidFeatures {
            features: f,
            metric: ds.metric.unwrap_or(Metric::L2),
        }),
        (Linkage::CentroidMeans, None) => {
            return Err(CliError::Config(format!(
                "{}: centroid-means needs features, but this dataset is pairwise",
                ds.name
            )))
        }
        _ => None,
    };
    let dend = agglomerate(&ds.dissimilarity, linkage, features)?;
    let records = sweep(&dend, &ds.dissimilarity, ds.labels.ids(), k_range.0..=k_range.1)?;
    Ok((dend, records))
}

/// Loads every dataset and runs all (dataset, linkage) jobs in a work pool.
pub fn compute(config: &RunConfig) -> Result<RunOutput, CliError> {
    config.validate()?;
    let mut datasets = Vec::new();
    for arg in &config.datasets {
        let desc = resolve_dataset(arg, &config.data_root)?;
        let metric = match (desc.kind, config.metric) {
            (DatasetKind::Pairwise, Some(m)) => {
                eprintln!("warning: --metric {m} ignored for pairwise dataset '{}'", desc.name);
                None
            }
            (_, m) => m,
        };
        let ds = load_dataset(&desc, &config.data_root, config.seed, metric)?;
        if datasets.iter().any(|d: &Dataset| d.name == ds.name) {
            return Err(CliError::Config(format!("dataset '{}' given twice", ds.name)));
        }
        datasets.push(ds);
    }

    let mut ranges = Vec::with_capacity(datasets.len());
    for ds in &datasets {
        let range = config.k_range.unwrap_or((1, ds.n()));
        if range.1 > ds.n() {
            return Err(CliError::Config(format!(
                "k range {}:{} exceeds n = {} for dataset '{}'",
                range.0,
                range.1,
                ds.n(),
                ds.name
            )));
        }
        ranges.push(range);
    }

    let mut linkages = config.linkages.clone();
    linkages.sort();
    linkages.dedup();
    let jobs: Vec<(usize, Linkage)> = (0..datasets.len())
        .flat_map(|d| linkages.iter().map(move |&l| (d, l)))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(d, l)| job(&datasets[d], l, ranges[d]).map(|r| (d, l, r)))
        .collect::<Result<_, _>>()?;

    let mut curves = CurveTable::default();
    let mut dendrograms = Vec::new();
    for (d, linkage, (dend, records)) in results {
        curves.extend(&datasets[d].name, linkage, records);
        dendrograms.push((format!("{}_{}", datasets[d].name, linkage), dend));
    }
    curves.sort();
    dendrograms.sort_by(|a, b| a.0.cmp(&b.0));

    let in_range: Vec<&Dataset> = datasets
        .iter()
        .zip(&ranges)
        .filter(|(ds, r)| (r.0..=r.1).contains(&ds.true_k))
        .map(|(ds, _)| ds)
        .collect();
    let report_rows = CurveTable {
        rows: curves
            .rows
            .iter()
            .filter(|r| {
                in_range
                    .iter()
                    .any(|ds| ds.name == r.dataset && ds.true_k == r.record.k)
            })
            .cloned()
            .collect(),
    };
    let report = if report_rows.rows.is_empty() {
        TrueKReport::default()
    } else {
        let true_k = |name: &str| in_range.iter().find(|d| d.name == name).map_or(0, |d| d.true_k);
        TrueKReport::from_curves(&report_rows, true_k)?
    };

    Ok(RunOutput {
        curves,
        report,
        dendrograms,
        manifest: manifest(config, &datasets, &linkages, &ranges),
    })
}

fn manifest(config: &RunConfig, datasets: &[Dataset], linkages: &[Linkage], ranges: &[(usize, usize)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "version = \"{}\"", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "rng = \"{RNG_ALGORITHM}\"");
    let _ = writeln!(s, "seed = {}", config.seed);
    let names: Vec<String> = linkages.iter().map(|l| format!("\"{l}\"")).collect();
    let _ = writeln!(s, "linkages = [{}]", names.join(", "));
    if let Some(m) = config.metric {
        let _ = writeln!(s, "metric_override = \"{m}\"");
    }
    for (ds, r) in datasets.iter().zip(ranges) {
        let _ = writeln!(s, "\n[datasets.\"{}\"]", ds.name);
        let _ = writeln!(s, "n = {}", ds.n());
        let _ = writeln!(s, "true_k = {}", ds.true_k);
        let _ = writeln!(s, "k_range = [{}, {}]", r.0, r.1);
        match ds.metric {
            Some(m) => {
                let _ = writeln!(s, "metric = \"{m}\"");
            }
            None => {
                let _ = writeln!(s, "metric = \"precomputed\"");
            }
        }
    }
    s
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Output {
        path: path.into(),
        source,
    })
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> minimax_core::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

/// Writes a run's outputs under `out_dir`:
///
/// - `curves.csv`: every (dataset, linkage, k) row
/// - `true_k.csv`, `true_k.md`: the true-`k` rows, best values in bold
/// - `dendrograms/<dataset>_<linkage>.csv`
/// - `plots/<dataset>_<kind>.svg` and `.dat`
/// - `run.toml`: resolved configuration
pub fn write_outputs(output: &RunOutput, out_dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>, CliError> {
    let mkdir = |p: &Path| fs::create_dir_all(p).map_err(|source| CliError::Output { path: p.into(), source });
    mkdir(out_dir)?;
    let mut written = Vec::new();
    let mut emit = |path: PathBuf, bytes: &[u8]| -> Result<(), CliError> {
        write(&path, bytes)?;
        written.push(path);
        Ok(())
    };
    emit(out_dir.join("run.toml"), output.manifest.as_bytes())?;
    if format.csv() {
        emit(out_dir.join("curves.csv"), &csv_bytes(|b| output.curves.write_csv(b))?)?;
        if !output.report.rows.is_empty() {
            emit(out_dir.join("true_k.csv"), &csv_bytes(|b| output.report.write_csv(b))?)?;
            emit(out_dir.join("true_k.md"), output.report.render_text().as_bytes())?;
        }
        let dir = out_dir.join("dendrograms");
        mkdir(&dir)?;
        for (name, dend) in &output.dendrograms {
            emit(dir.join(format!("{name}.csv")), &csv_bytes(|b| dend.write_csv(b))?)?;
        }
    }
    if format.svg() {
        let dir = out_dir.join("plots");
        mkdir(&dir)?;
        for dataset in output.curves.datasets() {
            for kind in PlotKind::ALL {
                let stem = format!("{dataset}_{}", kind.file_stem());
                emit(
                    dir.join(format!("{stem}.svg")),
                    render_svg(&output.curves, dataset, kind).as_bytes(),
                )?;
                emit(
                    dir.join(format!("{stem}.dat")),
                    plot_data(&output.curves, dataset, kind).as_bytes(),
                )?;
            }
        }
    }
    Ok(written)
}

pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    let output = compute(config)?;
    write_outputs(&output, &config.out_dir, config.format)?;
    Ok(output)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_range_parsing() {
        assert_eq!(parse_k_range("1:150"), Ok((1, 150)));
        assert_eq!(parse_k_range("3"), Ok((3, 3)));
        assert!(parse_k_range("0:3").is_err());
        assert!(parse_k_range("5:3").is_err());
        assert!(parse_k_range("a:3").is_err());
    }

    #[test]
    fn builtin_simulation_names() {
        let d = resolve_dataset("elliptical-l1", Path::new("/nonexistent")).unwrap();
        assert_eq!(d.kind, DatasetKind::Simulation);
        assert_eq!(d.metric().unwrap(), Metric::L1);
        assert!(matches!(
            resolve_dataset("nonsense", Path::new("/nonexistent")),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn empty_rule_list_is_a_config_error() {
        let mut cfg = RunConfig::new("/nonexistent", "/tmp/unused");
        cfg.datasets = vec!["spherical-l2".into()];
        cfg.linkages.clear();
        let err = compute(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn error_categories() {
        assert_eq!(
            CliError::from(minimax_core::Error::ConstantColumn { col: 0 }).exit_code(),
            4
        );
        assert_eq!(
            CliError::from(minimax_core::Error::Descriptor("x".into())).exit_code(),
            2
        );
        let data = minimax_core::Error::Data {
            path: "x".into(),
            message: "y".into(),
        };
        assert_eq!(CliError::from(data).exit_code(), 3);
    }
}
