//! Plot emission from curve tables: a standalone SVG per (dataset, kind) and
//! the same points as whitespace-separated text.

use std::fmt::Write as _;

use crate::agglomerate::Linkage;
use crate::metrics::MetricRecord;
use crate::sweep::CurveTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlotKind {
    RadiusVsK,
    MisclassificationVsK,
    PrecisionVsRecall,
}

impl PlotKind {
    pub const ALL: [PlotKind; 3] = [
        PlotKind::RadiusVsK,
        PlotKind::MisclassificationVsK,
        PlotKind::PrecisionVsRecall,
    ];

    pub fn file_stem(self) -> &'static str {
        match self {
            PlotKind::RadiusVsK => "radius_vs_k",
            PlotKind::MisclassificationVsK => "misclass_vs_k",
            PlotKind::PrecisionVsRecall => "precision_vs_recall",
        }
    }

    fn axis_labels(self) -> (&'static str, &'static str) {
        match self {
            PlotKind::RadiusVsK => ("k", "max minimax radius"),
            PlotKind::MisclassificationVsK => ("k", "misclassification"),
            PlotKind::PrecisionVsRecall => ("recall", "precision"),
        }
    }

    fn point(self, r: &MetricRecord) -> Option<(f64, f64)> {
        match self {
            PlotKind::RadiusVsK => Some((r.k as f64, r.max_minimax_radius)),
            PlotKind::MisclassificationVsK => Some((r.k as f64, r.misclassification)),
            PlotKind::PrecisionVsRecall => Some((r.recall?, r.precision?)),
        }
    }
}

/// One polyline: the points of one linkage, in increasing `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub linkage: Linkage,
    pub points: Vec<(usize, f64, f64)>,
}

/// Extracts the plotted points for `dataset`. Precision-recall points with
/// an undefined coordinate are dropped.
pub fn series(curves: &CurveTable, dataset: &str, kind: PlotKind) -> Vec<Series> {
    curves
        .linkages(dataset)
        .into_iter()
        .map(|linkage| {
            let mut recs: Vec<&MetricRecord> = curves.series(dataset, linkage).collect();
            recs.sort_by_key(|r| r.k);
            let points = recs
                .into_iter()
                .filter_map(|r| kind.point(r).map(|(x, y)| (r.k, x, y)))
                .collect();
            Series { linkage, points }
        })
        .collect()
}

/// Long-format text: `linkage k x y` per line after a header.
pub fn plot_data(curves: &CurveTable, dataset: &str, kind: PlotKind) -> String {
    let (xl, yl) = kind.axis_labels();
    let mut s = format!(
        "# {dataset} {}\nlinkage\tk\t{}\t{}\n",
        kind.file_stem(),
        xl.replace(' ', "_"),
        yl.replace(' ', "_")
    );
    for ser in series(curves, dataset, kind) {
        for (k, x, y) in &ser.points {
            let _ = writeln!(s, "{}\t{k}\t{x}\t{y}", ser.linkage);
        }
    }
    s
}

fn color(linkage: Linkage) -> &'static str {
    match linkage {
        Linkage::Single => "#1f77b4",
        Linkage::Complete => "#5b2a86",
        Linkage::Average => "#2ca02c",
        Linkage::Centroid => "#ff7f0e",
        Linkage::CentroidMeans => "#8c564b",
        Linkage::Minimax => "#a50f15",
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn tick_fmt(v: f64) -> String {
    if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// Standalone SVG line chart, one polyline per linkage.
pub fn render_svg(curves: &CurveTable, dataset: &str, kind: PlotKind) -> String {
    let all = series(curves, dataset, kind);
    let pts = || all.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y1) = match kind {
        PlotKind::PrecisionVsRecall => (0.0, 1.0, 1.0),
        _ => (
            pts().map(|p| p.1).fold(f64::INFINITY, f64::min),
            pts().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
            pts().map(|p| p.2).fold(0.0, f64::max),
        ),
    };
    if !x0.is_finite() || !x1.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= 0.0 {
        y1 = 1.0;
    }
    let y0 = 0.0;
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;
    let (xl, yl) = kind.axis_labels();

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{dataset}: {yl} vs {xl}</text>"#,
        LEFT + pw / 2.0
    );
    let _ = writeln!(
        s,
        r#"<path d="M{LEFT:.1},{TOP:.1} V{:.1} H{:.1}" fill="none" stroke="black"/>"#,
        TOP + ph,
        LEFT + pw
    );
    for t in 0..=5 {
        let fx = x0 + (x1 - x0) * t as f64 / 5.0;
        let fy = y0 + (y1 - y0) * t as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            sx(fx),
            TOP + ph + 16.0,
            tick_fmt(fx)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            sy(fy) + 4.0,
            tick_fmt(fy)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{xl}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{yl}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    for (i, ser) in all.iter().enumerate() {
        let c = color(ser.linkage);
        let path: Vec<String> = ser
            .points
            .iter()
            .map(|(_, x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" data-linkage="{}" fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#,
            ser.linkage,
            path.join(" ")
        );
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{c}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            ser.linkage
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> CurveTable {
        let mut t = CurveTable::default();
        let rec = |k, p, r| MetricRecord {
            k,
            max_minimax_radius: 3.0 - k as f64,
            misclassification: 0.1,
            precision: p,
            recall: r,
        };
        t.extend(
            "toy",
            Linkage::Minimax,
            [
                rec(1, Some(0.5), Some(1.0)),
                rec(2, Some(1.0), Some(1.0)),
                rec(3, None, Some(0.0)),
            ],
        );
        t
    }

    #[test]
    fn pr_series_skips_undefined_and_is_ordered() {
        let s = series(&table(), "toy", PlotKind::PrecisionVsRecall);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].points, vec![(1, 1.0, 0.5), (2, 1.0, 1.0)]);
    }

    #[test]
    fn one_polyline_per_linkage() {
        let svg = render_svg(&table(), "toy", PlotKind::RadiusVsK);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn plot_data_layout() {
        let text = plot_data(&table(), "toy", PlotKind::MisclassificationVsK);
        assert_eq!(text.lines().nth(1), Some("linkage\tk\tk\tmisclassification"));
        assert_eq!(text.lines().count(), 5);
    }
}
