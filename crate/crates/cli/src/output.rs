use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::{Cli, Format};

pub const CSV_PREFIX: &str = "# config: ";

/// Everything needed to reproduce an output file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub tool: String,
    pub version: String,
    pub cli: Cli,
}

impl RunConfig {
    pub fn new(cli: &Cli) -> Self {
        RunConfig {
            tool: "billiards".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            cli: cli.clone(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Command result in both renderings.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub table: Table,
}

pub fn render(config: &RunConfig, report: &Report, format: Format) -> Result<String, String> {
    match format {
        Format::Json => {
            let doc = serde_json::json!({ "config": config, "data": report.json });
            serde_json::to_string_pretty(&doc)
                .map(|s| s + "\n")
                .map_err(|e| e.to_string())
        }
        Format::Csv => {
            let mut out = String::from(CSV_PREFIX);
            out += &serde_json::to_string(config).map_err(|e| e.to_string())?;
            out.push('\n');
            let mut w = csv::Writer::from_writer(vec![]);
            w.write_record(&report.table.header).map_err(|e| e.to_string())?;
            for r in &report.table.rows {
                w.write_record(r).map_err(|e| e.to_string())?;
            }
            let bytes = w.into_inner().map_err(|e| e.to_string())?;
            out += &String::from_utf8(bytes).map_err(|e| e.to_string())?;
            Ok(out)
        }
    }
}

/// Recovers the embedded config and the data section of a rendered file.
pub fn split(text: &str) -> Result<(RunConfig, Format, String), String> {
    if let Some(rest) = text.strip_prefix(CSV_PREFIX) {
        let (cfg, data) = rest.split_once('\n').ok_or("truncated CSV header")?;
        let cfg: RunConfig = serde_json::from_str(cfg).map_err(|e| format!("config header: {e}"))?;
        return Ok((cfg, Format::Csv, data.to_string()));
    }
    let mut doc: Value = serde_json::from_str(text).map_err(|e| format!("not a report file: {e}"))?;
    let cfg: RunConfig =
        serde_json::from_value(doc["config"].take()).map_err(|e| format!("config section: {e}"))?;
    let data = serde_json::to_string_pretty(&doc["data"]).map_err(|e| e.to_string())?;
    Ok((cfg, Format::Json, data))
}
