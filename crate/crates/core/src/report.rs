//! True-`k` comparison tables.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::sweep::{CurveRow, CurveTable};

/// One row per (dataset, linkage) at that dataset's true `k`.
#[derive(Clone, Debug, Default)]
pub struct TrueKReport {
    pub rows: Vec<CurveRow>,
}

/// Which of the four metric columns hold the best value in their dataset
/// block: smallest radius, smallest misclassification, largest precision,
/// largest recall. Comparison is on the two-decimal display values, so
/// displayed ties are all flagged.
pub type BestFlags = [bool; 4];

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn fmt2(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into())
}

impl TrueKReport {
    /// Picks the row at `true_k(dataset)` from every (dataset, linkage) series.
    pub fn from_curves(curves: &CurveTable, true_k: impl Fn(&str) -> usize) -> Result<Self> {
        if curves.rows.is_empty() {
            return Err(Error::InvalidInput("no curves to report".into()));
        }
        let mut rows = Vec::new();
        for dataset in curves.datasets() {
            let k = true_k(dataset);
            for linkage in curves.linkages(dataset) {
                let rec = curves.series(dataset, linkage).find(|r| r.k == k).ok_or_else(|| {
                    Error::InvalidInput(format!("{dataset}/{linkage}: k = {k} is not in the swept range"))
                })?;
                rows.push(CurveRow {
                    dataset: dataset.to_string(),
                    linkage,
                    record: *rec,
                });
            }
        }
        Ok(TrueKReport { rows })
    }

    pub fn best_flags(&self) -> Vec<BestFlags> {
        let cols = |r: &CurveRow| {
            [
                Some(-round2(r.record.max_minimax_radius)),
                Some(-round2(r.record.misclassification)),
                r.record.precision.map(round2),
                r.record.recall.map(round2),
            ]
        };
        self.rows
            .iter()
            .map(|row| {
                let mine = cols(row);
                let mut flags = [false; 4];
                for (c, flag) in flags.iter_mut().enumerate() {
                    let best = self
                        .rows
                        .iter()
                        .filter(|r| r.dataset == row.dataset)
                        .filter_map(|r| cols(r)[c])
                        .fold(f64::NEG_INFINITY, f64::max);
                    *flag = mine[c] == Some(best);
                }
                flags
            })
            .collect()
    }

    /// Markdown table with two-decimal values; best values are bold.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        s.push_str("| dataset | k | linkage | max minimax radius | misclassification | precision | recall |\n");
        s.push_str("|---|---|---|---|---|---|---|\n");
        for (row, flags) in self.rows.iter().zip(self.best_flags()) {
            let r = &row.record;
            let cells = [
                fmt2(Some(r.max_minimax_radius)),
                fmt2(Some(r.misclassification)),
                fmt2(r.precision),
                fmt2(r.recall),
            ];
            let _ = write!(s, "| {} | {} | {} |", row.dataset, r.k, row.linkage);
            for (cell, best) in cells.iter().zip(flags) {
                if best {
                    let _ = write!(s, " **{cell}** |");
                } else {
                    let _ = write!(s, " {cell} |");
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        CurveTable {
            rows: self.rows.clone(),
        }
        .write_csv(out)
    }
}
