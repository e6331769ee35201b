//! File layout shared by all subcommands.
//!
//! The first line is a JSON metadata object carrying the [`RunConfig`]. CSV
//! output prefixes it with `# ` and follows with a header row and data rows;
//! JSON output follows it with one line holding the data document.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig};
use crate::CliError;

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
}

impl Metadata {
    pub fn new(config: &RunConfig) -> Self {
        Metadata {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
        }
    }
}

/// Seventeen significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(columns: &[&str]) -> Self {
        Csv { text: format!("{}\n", columns.join(",")) }
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn comment(&mut self, line: &str) {
        let _ = writeln!(self.text, "# {line}");
    }
}

pub enum Body {
    Csv(Csv),
    Json(serde_json::Value),
}

pub fn emit(config: &RunConfig, body: Body) -> Result<(), CliError> {
    let header = serde_json::to_string(&Metadata::new(config)).expect("metadata serializes");
    let text = match (config.format, body) {
        (Format::Csv, Body::Csv(csv)) => format!("# {header}\n{}", csv.text),
        (Format::Json, Body::Json(v)) => format!("{header}\n{v}\n"),
        _ => unreachable!("body built for the configured format"),
    };
    match &config.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
