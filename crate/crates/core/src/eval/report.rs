use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::metrics::{errors_fixed, MetricsRow};

pub const COLUMNS: [&str; 8] = [
    "Tokenizer",
    "#Errors",
    "Errors Fixed (%)",
    "Precision (%)",
    "Recall (%)",
    "F1 (%)",
    "Accuracy (%)",
    "Time (s)",
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format `{s}`"))),
        }
    }
}

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

fn cells(row: &MetricsRow) -> [String; 8] {
    [
        row.name.clone(),
        row.counts.errors.to_string(),
        row.errors_fixed_pct.map_or_else(|| "-".into(), |v| format!("{v:.2}")),
        pct(row.precision),
        pct(row.recall),
        pct(row.f1),
        pct(row.accuracy),
        row.time_s.map_or_else(|| "-".into(), |v| format!("{v:.2}")),
    ]
}

/// Renders rows in the given format. JSON output is an array of rows; a single row renders as a
/// one-element array.
pub fn render(rows: &[MetricsRow], format: Format) -> Result<String> {
    match format {
        Format::Table => Ok(render_table(rows)),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::Config(format!("csv: {e}"));
            w.write_record(COLUMNS).map_err(csv_err)?;
            for row in rows {
                w.write_record(cells(row)).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
            Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows).map_err(|e| Error::Config(format!("json: {e}")))?;
            s.push('\n');
            Ok(s)
        }
    }
}

fn render_table(rows: &[MetricsRow]) -> String {
    let body: Vec<[String; 8]> = rows.iter().map(cells).collect();
    let mut widths = COLUMNS.map(|c| c.chars().count());
    for r in &body {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cols: &[String]| -> String {
        let mut out = String::new();
        for (i, (c, w)) in cols.iter().zip(widths).enumerate() {
            let pad = w - c.chars().count();
            if i == 0 {
                out.push_str(c);
                out.push_str(&" ".repeat(pad));
            } else {
                out.push_str("  ");
                out.push_str(&" ".repeat(pad));
                out.push_str(c);
            }
        }
        out.trim_end().to_string() + "\n"
    };
    let header: Vec<String> = COLUMNS.iter().map(|s| s.to_string()).collect();
    let mut out = line(&header);
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for r in &body {
        out.push_str(&line(r));
    }
    out
}

/// Fills in errors-fixed against the row named `baseline` and sorts by ascending error count
/// (ties keep input order).
pub fn compare_rows(mut rows: Vec<MetricsRow>, baseline: &str) -> Result<Vec<MetricsRow>> {
    let mut seen = BTreeSet::new();
    for row in &rows {
        if !seen.insert(row.name.as_str()) {
            return Err(Error::Config(format!("duplicate run name `{}`", row.name)));
        }
    }
    let base = rows
        .iter()
        .find(|r| r.name == baseline)
        .ok_or_else(|| Error::Config(format!("baseline `{baseline}` is not among the runs")))?
        .counts
        .errors;
    for row in &mut rows {
        row.errors_fixed_pct = Some(errors_fixed(base, row.counts.errors)?);
    }
    rows.sort_by_key(|r| r.counts.errors);
    Ok(rows)
}
