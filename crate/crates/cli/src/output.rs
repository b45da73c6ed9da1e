use crate::commands::Report;
use crate::Format;
use anyhow::{Context, Result};
use serde_json::Value;
use std::path::Path;

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// One CSV row per record: an object gives one row, an array of objects one
/// row each. Nested values are written as compact JSON.
pub fn summary_csv(summary: &Value) -> Result<String> {
    let rows: Vec<&serde_json::Map<String, Value>> = match summary {
        Value::Array(items) => items.iter().filter_map(Value::as_object).collect(),
        Value::Object(map) => vec![map],
        _ => Vec::new(),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = rows.first() {
        w.write_record(first.keys())?;
        for row in &rows {
            w.write_record(row.values().map(cell))?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn emit(report: &Report, format: Format, out: Option<&Path>, seed: u64) -> Result<()> {
    let json = serde_json::to_string_pretty(&report.summary)? + "\n";
    let csv = match &report.table {
        Some(t) => t.clone(),
        None => summary_csv(&report.summary)?,
    };
    match format {
        Format::Json => print!("{json}"),
        Format::Csv => print!("{csv}"),
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let base = match &report.n {
            Some(n) => format!("{}_{n}_{seed}", report.name),
            None => report.name.to_string(),
        };
        for (ext, body) in [("json", &json), ("csv", &csv)] {
            let file = dir.join(format!("{base}.{ext}"));
            std::fs::write(&file, body).with_context(|| format!("writing {}", file.display()))?;
        }
    }
    Ok(())
}
