//! Report files: one structured JSON document, three CSV tables and an SVG
//! box plot. Every float is written with 6 significant digits.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    AnalysisReport, CgrRecord, ConfigEcho, LevelResult, RatioResult, SequenceSample, UnitSummary,
};
use crate::history::CommitId;

pub use svg::{box_stats, render_box_plot, BoxStats};

pub const REPORT_FILE: &str = "report.json";
pub const FREQUENCY_CSV: &str = "frequency.csv";
pub const RATIO_CSV: &str = "ratio.csv";
pub const CGRS_CSV: &str = "cgrs.csv";
pub const PLOT_FILE: &str = "frequency.svg";

pub const FREQUENCY_HEADER: [&str; 4] = ["level", "units", "effective", "frequency"];
pub const RATIO_HEADER: [&str; 4] = ["type", "cgr_count", "effective_count", "ratio"];
pub const CGRS_HEADER: [&str; 5] = ["level", "unit_first_commit", "type", "classification", "description"];

const SCHEMA: &str = "cgrminer-report/1";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid report: {0}")]
    Schema(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    Structured,
    Tabular,
    #[default]
    Both,
}

/// Rounds to 6 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().expect("formatted float parses")
}

/// 6 significant digits, shortest form, no exponent: `0.333333`, `1`, `0`.
pub fn format_sig(x: f64) -> String {
    format!("{}", round_sig(x))
}

fn format_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), format_sig)
}

#[derive(Serialize)]
struct SampleOut<'a> {
    sequence_id: &'a CommitId,
    units: usize,
    effective: usize,
    frequency: f64,
}

#[derive(Serialize)]
struct LevelOut<'a> {
    level: usize,
    units: usize,
    effective: usize,
    frequency: Option<f64>,
    sequences: Vec<SampleOut<'a>>,
}

#[derive(Serialize)]
struct RatioOut<'a> {
    #[serde(rename = "type")]
    refactoring_type: &'a str,
    cgr_count: usize,
    effective_count: usize,
    ratio: Option<f64>,
}

#[derive(Serialize)]
struct ReportOut<'a> {
    schema: &'static str,
    config: &'a ConfigEcho,
    levels: Vec<LevelOut<'a>>,
    ratios: Vec<RatioOut<'a>>,
    cgrs: &'a [CgrRecord],
    units: &'a [UnitSummary],
}

#[derive(Deserialize)]
struct ReportIn {
    schema: String,
    #[serde(flatten)]
    report: AnalysisReport,
}

fn level_out(level: &LevelResult) -> LevelOut<'_> {
    LevelOut {
        level: level.level,
        units: level.units,
        effective: level.effective,
        frequency: level.frequency().map(round_sig),
        sequences: level
            .sequences
            .iter()
            .map(|s: &SequenceSample| SampleOut {
                sequence_id: &s.sequence_id,
                units: s.units,
                effective: s.effective,
                frequency: round_sig(s.frequency()),
            })
            .collect(),
    }
}

fn ratio_out(ratio: &RatioResult) -> RatioOut<'_> {
    RatioOut {
        refactoring_type: ratio.refactoring_type.name(),
        cgr_count: ratio.cgr_count,
        effective_count: ratio.effective_count,
        ratio: ratio.ratio().map(round_sig),
    }
}

/// The structured document. Derived values (frequencies, ratios) are
/// included for readers and recomputed from counts when read back.
pub fn to_structured(report: &AnalysisReport) -> String {
    let out = ReportOut {
        schema: SCHEMA,
        config: &report.config,
        levels: report.levels.iter().map(level_out).collect(),
        ratios: report.ratios.iter().map(ratio_out).collect(),
        cgrs: &report.cgrs,
        units: &report.units,
    };
    let mut text = serde_json::to_string_pretty(&out).expect("report serializes");
    text.push('\n');
    text
}

pub fn from_structured(text: &str) -> Result<AnalysisReport, ReportError> {
    let parsed: ReportIn = serde_json::from_str(text).map_err(|e| ReportError::Schema(e.to_string()))?;
    if parsed.schema != SCHEMA {
        return Err(ReportError::Schema(format!(
            "unsupported schema '{}', expected '{SCHEMA}'",
            parsed.schema
        )));
    }
    Ok(parsed.report)
}

pub fn read_report(path: &Path) -> Result<AnalysisReport, ReportError> {
    let text = fs::read_to_string(path).map_err(|e| ReportError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    from_structured(&text)
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, ReportError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    let bytes = writer.into_inner().map_err(|e| ReportError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv of UTF-8 fields is UTF-8"))
}

pub fn frequency_csv(report: &AnalysisReport) -> Result<String, ReportError> {
    csv_text(
        &FREQUENCY_HEADER,
        report.levels.iter().map(|l| {
            vec![
                l.level.to_string(),
                l.units.to_string(),
                l.effective.to_string(),
                format_opt(l.frequency()),
            ]
        }),
    )
}

pub fn ratio_csv(report: &AnalysisReport) -> Result<String, ReportError> {
    csv_text(
        &RATIO_HEADER,
        report.ratios.iter().map(|r| {
            vec![
                r.refactoring_type.name().to_string(),
                r.cgr_count.to_string(),
                r.effective_count.to_string(),
                format_opt(r.ratio()),
            ]
        }),
    )
}

pub fn cgrs_csv(report: &AnalysisReport) -> Result<String, ReportError> {
    csv_text(
        &CGRS_HEADER,
        report.cgrs.iter().map(|c| {
            vec![
                c.level.to_string(),
                c.unit.first().to_string(),
                c.instance.refactoring_type.name().to_string(),
                c.classification.as_str().to_string(),
                c.instance.description.clone(),
            ]
        }),
    )
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf, ReportError> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| ReportError::Io {
        path: path.clone(),
        source: e,
    })?;
    Ok(path)
}

/// Writes the report files for `format` into `out_dir`, creating it if
/// needed. Returns the written paths.
pub fn emit_report(report: &AnalysisReport, format: OutputFormat, out_dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    fs::create_dir_all(out_dir).map_err(|e| ReportError::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    let mut written = Vec::new();
    if matches!(format, OutputFormat::Structured | OutputFormat::Both) {
        written.push(write_file(out_dir, REPORT_FILE, &to_structured(report))?);
    }
    if matches!(format, OutputFormat::Tabular | OutputFormat::Both) {
        written.push(write_file(out_dir, FREQUENCY_CSV, &frequency_csv(report)?)?);
        written.push(write_file(out_dir, RATIO_CSV, &ratio_csv(report)?)?);
        written.push(write_file(out_dir, CGRS_CSV, &cgrs_csv(report)?)?);
    }
    Ok(written)
}

pub fn write_plot(report: &AnalysisReport, out_file: &Path) -> Result<(), ReportError> {
    let svg = render_box_plot(report)?;
    fs::write(out_file, svg).map_err(|e| ReportError::Io {
        path: out_file.to_path_buf(),
        source: e,
    })
}
