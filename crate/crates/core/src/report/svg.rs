//! Box-and-whisker plot of per-sequence frequencies, one box per level.

use std::fmt::Write as _;

use super::{format_sig, ReportError};
use crate::analysis::AnalysisReport;

const WIDTH_PER_LEVEL: f64 = 90.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const PLOT_HEIGHT: f64 = 260.0;
const MARGIN_BOTTOM: f64 = 60.0;
const BOX_WIDTH: f64 = 40.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxStats {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Quartiles by linear interpolation; whiskers reach the most extreme
/// samples within 1.5 IQR of the box, anything beyond is an outlier.
pub fn box_stats(samples: &[f64]) -> Option<BoxStats> {
    if samples.is_empty() {
        return None;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile(&sorted, 0.25);
    let median = quantile(&sorted, 0.5);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    let (low_fence, high_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside: Vec<f64> = sorted
        .iter()
        .copied()
        .filter(|x| (low_fence..=high_fence).contains(x))
        .collect();
    Some(BoxStats {
        q1,
        median,
        q3,
        whisker_low: inside.first().copied().unwrap_or(q1).min(q1),
        whisker_high: inside.last().copied().unwrap_or(q3).max(q3),
        outliers: sorted
            .into_iter()
            .filter(|x| !(low_fence..=high_fence).contains(x))
            .collect(),
    })
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_box_plot(report: &AnalysisReport) -> Result<String, ReportError> {
    if report.levels.is_empty() || report.levels.iter().all(|l| l.sequences.is_empty()) {
        return Err(ReportError::Schema("report has no frequency samples to plot".into()));
    }
    let n = report.levels.len() as f64;
    let width = MARGIN_LEFT + n * WIDTH_PER_LEVEL + MARGIN_RIGHT;
    let height = MARGIN_TOP + PLOT_HEIGHT + MARGIN_BOTTOM;
    let bottom = MARGIN_TOP + PLOT_HEIGHT;
    let y = |v: f64| bottom - v.clamp(0.0, 1.0) * PLOT_HEIGHT;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<title>Frequency of coarse-grained refactorings per sequence</title>"#);
    let _ = writeln!(s, r#"<rect width="{width:.0}" height="{height:.0}" fill="white"/>"#);

    // Axes, ticks and grid.
    let right = width - MARGIN_RIGHT;
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{MARGIN_LEFT:.2}" y1="{bottom:.2}" x2="{right:.2}" y2="{bottom:.2}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{MARGIN_LEFT:.2}" y1="{MARGIN_TOP:.2}" x2="{MARGIN_LEFT:.2}" y2="{bottom:.2}" stroke="black"/>"#
    );
    for step in 0..=4 {
        let v = step as f64 / 4.0;
        let ty = y(v);
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN_LEFT:.2}" y1="{ty:.2}" x2="{right:.2}" y2="{ty:.2}" stroke="#dddddd"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 6.0,
            ty + 4.0,
            format_sig(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">frequency</text>"#,
        MARGIN_TOP + PLOT_HEIGHT / 2.0,
        MARGIN_TOP + PLOT_HEIGHT / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">granularity level</text>"#,
        MARGIN_LEFT + n * WIDTH_PER_LEVEL / 2.0,
        height - 12.0
    );

    for (i, level) in report.levels.iter().enumerate() {
        let cx = MARGIN_LEFT + (i as f64 + 0.5) * WIDTH_PER_LEVEL;
        let _ = writeln!(
            s,
            r#"<text class="level-label" x="{cx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            bottom + 18.0,
            level.level
        );
        let samples: Vec<f64> = level.sequences.iter().map(|q| q.frequency()).collect();
        let Some(stats) = box_stats(&samples) else {
            continue;
        };
        let _ = writeln!(s, r#"<g class="box" data-level="{}">"#, level.level);
        let (left, half) = (cx - BOX_WIDTH / 2.0, BOX_WIDTH / 4.0);
        let _ = writeln!(
            s,
            r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black"/>"#,
            y(stats.whisker_high),
            y(stats.q3)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black"/>"#,
            y(stats.q1),
            y(stats.whisker_low)
        );
        for w in [stats.whisker_low, stats.whisker_high] {
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
                cx - half,
                y(w),
                cx + half,
                y(w)
            );
        }
        let _ = writeln!(
            s,
            r##"<rect x="{left:.2}" y="{:.2}" width="{BOX_WIDTH:.2}" height="{:.2}" fill="#9ecae1" stroke="black"/>"##,
            y(stats.q3),
            y(stats.q1) - y(stats.q3)
        );
        let _ = writeln!(
            s,
            r#"<line class="median" x1="{left:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="2"/>"#,
            y(stats.median),
            left + BOX_WIDTH,
            y(stats.median)
        );
        for o in &stats.outliers {
            let _ = writeln!(
                s,
                r#"<circle class="outlier" cx="{cx:.2}" cy="{:.2}" r="3" fill="none" stroke="black"/>"#,
                y(*o)
            );
        }
        let _ = writeln!(
            s,
            r#"<title>level {}: n={} median={}</title>"#,
            level.level,
            samples.len(),
            escape(&format_sig(stats.median))
        );
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    Ok(s)
}
