//! Metrics for every cut of a dendrogram, computed by replaying its merges.

use std::io::{Read, Write};
use std::ops::RangeInclusive;

use crate::agglomerate::{minimax_radius, Dendrogram, Linkage};
use crate::dissim::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::metrics::{ConfusionCounts, MetricRecord};

/// Evaluates every `k` in `k_range` against `truth`, in ascending `k`.
///
/// Starts from all singletons and applies the merges in order, so each step
/// only touches the two clusters being joined: pair counts change by the
/// product of their label histograms, and only the merged cluster's minimax
/// radius is recomputed.
pub fn sweep(
    dend: &Dendrogram,
    d: &DissimilarityMatrix,
    truth: &[usize],
    k_range: RangeInclusive<usize>,
) -> Result<Vec<MetricRecord>> {
    let n = dend.n();
    if d.n() != n {
        return Err(Error::InvalidInput(format!(
            "dendrogram covers {n} items but the dissimilarity matrix has {}",
            d.n()
        )));
    }
    if truth.len() != n {
        return Err(Error::LabelLength {
            expected: n,
            got: truth.len(),
        });
    }
    let (lo, hi) = (*k_range.start(), *k_range.end());
    if lo < 1 || hi > n || lo > hi {
        return Err(Error::KOutOfRange {
            k: if lo < 1 || lo > hi { lo } else { hi },
            n,
        });
    }

    let classes = truth.iter().max().map_or(0, |m| m + 1);
    let mut class_sizes = vec![0u64; classes];
    truth.iter().for_each(|&t| class_sizes[t] += 1);
    let same_label: u64 = class_sizes.iter().map(|c| c * c.saturating_sub(1) / 2).sum();
    let total = (n as u64) * (n as u64 - 1) / 2;
    let mut cc = ConfusionCounts {
        true_positives: 0,
        false_positives: 0,
        false_negatives: same_label,
        true_negatives: total - same_label,
    };

    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut histogram: Vec<Vec<(usize, u64)>> = truth.iter().map(|&t| vec![(t, 1)]).collect();
    let mut radius = vec![0.0f64; n];
    let mut active = vec![true; n];

    let mut out = Vec::with_capacity(hi - lo + 1);
    let mut push = |k: usize, radius: &[f64], active: &[bool], cc: &ConfusionCounts| {
        if k >= lo && k <= hi {
            let worst = radius
                .iter()
                .zip(active)
                .filter(|(_, a)| **a)
                .map(|(r, _)| *r)
                .fold(0.0, f64::max);
            out.push(MetricRecord::from_counts(k, worst, cc));
        }
    };
    push(n, &radius, &active, &cc);

    for (step, (a, b)) in dend.merge_leaders().into_iter().enumerate() {
        let k = n - step - 1;
        if k < lo {
            break;
        }
        let (keep, gone) = (a.min(b), a.max(b));
        let moved = std::mem::take(&mut members[gone]);
        let moved_hist = std::mem::take(&mut histogram[gone]);

        let co = (members[keep].len() * moved.len()) as u64;
        let shared: u64 = moved_hist
            .iter()
            .map(|(label, count)| {
                histogram[keep]
                    .iter()
                    .find(|(l, _)| l == label)
                    .map_or(0, |(_, c)| c * count)
            })
            .sum();
        cc.true_positives += shared;
        cc.false_negatives -= shared;
        cc.false_positives += co - shared;
        cc.true_negatives -= co - shared;

        for (label, count) in moved_hist {
            match histogram[keep].iter_mut().find(|(l, _)| *l == label) {
                Some(entry) => entry.1 += count,
                None => histogram[keep].push((label, count)),
            }
        }
        members[keep].extend(moved);
        radius[keep] = minimax_radius(&members[keep], d)?.1;
        radius[gone] = 0.0;
        active[gone] = false;
        push(k, &radius, &active, &cc);
    }
    out.reverse();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveRow {
    pub dataset: String,
    pub linkage: Linkage,
    pub record: MetricRecord,
}

/// Per-`k` metric rows for any number of (dataset, linkage) pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CurveTable {
    pub rows: Vec<CurveRow>,
}

pub const CSV_HEADER: [&str; 7] = [
    "dataset",
    "linkage",
    "k",
    "max_minimax_radius",
    "misclassification",
    "precision",
    "recall",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl CurveTable {
    pub fn extend(&mut self, dataset: &str, linkage: Linkage, records: impl IntoIterator<Item = MetricRecord>) {
        self.rows.extend(records.into_iter().map(|record| CurveRow {
            dataset: dataset.to_string(),
            linkage,
            record,
        }));
    }

    /// Orders rows by dataset name, linkage, then `k`.
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            (a.dataset.as_str(), a.linkage, a.record.k).cmp(&(b.dataset.as_str(), b.linkage, b.record.k))
        });
    }

    pub fn datasets(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !names.contains(&r.dataset.as_str()) {
                names.push(&r.dataset);
            }
        }
        names
    }

    pub fn linkages(&self, dataset: &str) -> Vec<Linkage> {
        let mut out: Vec<Linkage> = Vec::new();
        for r in self.rows.iter().filter(|r| r.dataset == dataset) {
            if !out.contains(&r.linkage) {
                out.push(r.linkage);
            }
        }
        out
    }

    /// Rows for one (dataset, linkage), in table order.
    pub fn series<'a>(&'a self, dataset: &'a str, linkage: Linkage) -> impl Iterator<Item = &'a MetricRecord> + 'a {
        self.rows
            .iter()
            .filter(move |r| r.dataset == dataset && r.linkage == linkage)
            .map(|r| &r.record)
    }

    /// Undefined precision or recall is written as an empty cell.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.dataset.clone(),
                r.linkage.to_string(),
                r.record.k.to_string(),
                r.record.max_minimax_radius.to_string(),
                r.record.misclassification.to_string(),
                opt(r.record.precision),
                opt(r.record.recall),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let bad = |msg: String| Error::InvalidInput(format!("curve table: {msg}"));
        if rdr.headers()?.iter().collect::<Vec<_>>() != CSV_HEADER {
            return Err(bad("unexpected header".into()));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("'{s}' is not a number")));
        let opt_num = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            rows.push(CurveRow {
                dataset: rec[0].to_string(),
                linkage: rec[1].parse()?,
                record: MetricRecord {
                    k: rec[2]
                        .parse()
                        .map_err(|_| bad(format!("'{}' is not a count", &rec[2])))?,
                    max_minimax_radius: num(&rec[3])?,
                    misclassification: num(&rec[4])?,
                    precision: opt_num(&rec[5])?,
                    recall: opt_num(&rec[6])?,
                },
            });
        }
        Ok(CurveTable { rows })
    }
}
