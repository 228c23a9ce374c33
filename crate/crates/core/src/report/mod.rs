//! Result bundle and its table, JSON and CSV renderings.
//!
//! Ratios print with four decimals; the recognition accuracy and
//! end-to-end tables print percentages with one decimal. JSON always
//! carries ratios in `[0, 1]` together with their exact form.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::metrics::{format_value, DetectionReport, E2EReport, Fraction, KindScores, RecognitionReport};
use crate::model::EvalConfig;
use crate::scalar::{Exact, Scalar};

/// Header of the CSV rendering, in column order.
pub const CSV_HEADER: &str = "section,metric,variant,max_dets,value,exact";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(Format::Table),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?} (expected table, json or csv)")),
        }
    }
}

/// Everything one evaluation produced, with the configuration it used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_version: Option<String>,
    pub config: EvalConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detection: Option<DetectionReport<Exact>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recognition: Option<RecognitionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e2e: Option<E2EReport>,
    #[serde(default)]
    pub diagnostics: Vec<String>,
}

impl RunResult {
    pub fn new(config: EvalConfig) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            prompt_version: None,
            config,
            detection: None,
            recognition: None,
            e2e: None,
            diagnostics: Vec::new(),
        }
    }
}

pub fn render_report(result: &RunResult, format: Format) -> String {
    match format {
        Format::Json => render_json(result),
        Format::Table => render_table(result),
        Format::Csv => render_csv(result),
    }
}

pub fn render_json(result: &RunResult) -> String {
    let mut s = serde_json::to_string_pretty(result).expect("report serializes");
    s.push('\n');
    s
}

fn ratio(f: &Fraction) -> String {
    format_value(f.to_f64(), 4)
}

fn percent(f: &Fraction) -> String {
    format_value(f.to_f64().map(|v| v * 100.0), 1)
}

fn exact(f: &Fraction) -> String {
    f.exact().map(|e| e.to_string()).unwrap_or_default()
}

/// Left-aligned first column, right-aligned remaining columns.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let mut out = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i == 0 {
                let _ = write!(out, "{c:<w$}", w = widths[0]);
            } else {
                let _ = write!(out, "  {c:>w$}", w = widths[i]);
            }
        }
        out.trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn detection_rows(d: &DetectionReport<Exact>) -> Vec<(String, String, usize, Option<f64>, String)> {
    d.rows
        .iter()
        .map(|r| {
            (
                r.label(),
                r.bucket.label().to_string(),
                r.max_dets,
                r.value.as_ref().map(|v| v.to_real()),
                r.value.as_ref().map(|v| v.to_string()).unwrap_or_default(),
            )
        })
        .collect()
}

/// `(column, text scores)` for the precision/recall table, strict first.
fn recognition_columns(r: &RecognitionReport) -> Vec<(&'static str, &KindScores)> {
    vec![
        ("Txt(E)", &r.strict.text),
        ("Txt(S)", &r.relaxed.text),
        ("Sym", &r.strict.symbol),
        ("All(E)", &r.strict.overall),
        ("All(S)", &r.relaxed.overall),
    ]
}

fn accuracy_columns(r: &RecognitionReport) -> Vec<(&'static str, &Fraction)> {
    vec![
        ("Text (E)", &r.strict.text.success_rate),
        ("Text (S)", &r.relaxed.text.success_rate),
        ("Sym", &r.strict.symbol.success_rate),
        ("Overall (E)", &r.strict.overall.success_rate),
        ("Overall (S)", &r.relaxed.overall.success_rate),
    ]
}

pub fn render_table(result: &RunResult) -> String {
    let mut out = String::new();
    if let Some(d) = &result.detection {
        let _ = writeln!(
            out,
            "Detection ({} images, {} ground-truth boxes, {} predictions)",
            d.images, d.ground_truth, d.predictions
        );
        let rows: Vec<Vec<String>> = detection_rows(d)
            .into_iter()
            .map(|(label, size, m, v, _)| vec![format!("{label} ({size})"), m.to_string(), format_value(v, 4)])
            .collect();
        out.push_str(&table(&["Metric", "MaxDets", "Value"], &rows));
        out.push('\n');
    }
    if let Some(r) = &result.recognition {
        let _ = writeln!(
            out,
            "Recognition ({} signs, symbol threshold {}, embedder {})",
            r.signs_evaluated, r.symbol_threshold, r.embedder
        );
        let cols = recognition_columns(r);
        let mut header = vec![""];
        header.extend(cols.iter().map(|c| c.0));
        let rows = vec![
            std::iter::once("Precision".to_string())
                .chain(cols.iter().map(|c| ratio(&c.1.precision)))
                .collect(),
            std::iter::once("Recall".to_string())
                .chain(cols.iter().map(|c| ratio(&c.1.recall)))
                .collect(),
        ];
        out.push_str(&table(&header, &rows));
        out.push('\n');
        let acc = accuracy_columns(r);
        let mut header = vec!["Accuracy (%)"];
        header.extend(acc.iter().map(|c| c.0));
        let row = std::iter::once(String::new())
            .chain(acc.iter().map(|c| percent(c.1)))
            .collect();
        out.push_str(&table(&header, &[row]));
        out.push('\n');
    }
    if let Some(e) = &result.e2e {
        let _ = writeln!(
            out,
            "End to end (IoU >= {}, {} readable signs, {} perfect, {} assigned, {} unmatched)",
            e.iou_threshold, e.readable_ground_truth, e.perfect, e.assigned_readable, e.unmatched_predictions
        );
        let rows = vec![vec![
            "".to_string(),
            percent(&e.precision_sign),
            percent(&e.recall_sign),
        ]];
        out.push_str(&table(&["", "Precision_sign", "Recall_sign"], &rows));
        out.push('\n');
    }
    for d in &result.diagnostics {
        let _ = writeln!(out, "note: {d}");
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_csv(result: &RunResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let mut row = |cells: [&str; 6]| {
        let line: Vec<String> = cells.iter().map(|c| csv_field(c)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    };
    if let Some(d) = &result.detection {
        for (label, size, m, v, ex) in detection_rows(d) {
            row(["detection", &label, &size, &m.to_string(), &format_value(v, 4), &ex]);
        }
    }
    if let Some(r) = &result.recognition {
        for (col, k) in recognition_columns(r) {
            row([
                "recognition",
                "precision",
                col,
                "",
                &ratio(&k.precision),
                &exact(&k.precision),
            ]);
            row(["recognition", "recall", col, "", &ratio(&k.recall), &exact(&k.recall)]);
        }
        for (col, f) in accuracy_columns(r) {
            row(["recognition", "accuracy", col, "", &ratio(f), &exact(f)]);
        }
    }
    if let Some(e) = &result.e2e {
        row([
            "e2e",
            "precision_sign",
            "",
            "",
            &ratio(&e.precision_sign),
            &exact(&e.precision_sign),
        ]);
        row([
            "e2e",
            "recall_sign",
            "",
            "",
            &ratio(&e.recall_sign),
            &exact(&e.recall_sign),
        ]);
    }
    out
}
