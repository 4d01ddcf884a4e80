use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Law, Metric};
use crate::error::{Error, Result};
use crate::rates::{RateFit, RateSample};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub metric: Metric,
    pub order: usize,
    pub samples: Vec<RateSample>,
}

/// Windowed log-log fit of one series; `fit` is absent when too few samples
/// survive underflow filtering, with the reason in `note`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFit {
    pub series: String,
    pub fit: Option<RateFit>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub series: String,
    pub law: Law,
    pub passed: bool,
    /// Fitted slope, or the max/min ratio of the compensated series.
    pub measured: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub times: Vec<f64>,
    pub series: Vec<Series>,
    pub fits: Vec<SeriesFit>,
    pub verdicts: Vec<Verdict>,
    /// Wall time; kept out of the serialized form so outputs are reproducible.
    #[serde(skip)]
    pub runtime: Option<Duration>,
}

impl PartialEq for Report {
    fn eq(&self, other: &Self) -> bool {
        self.schema_version == other.schema_version
            && self.tool == other.tool
            && self.tool_version == other.tool_version
            && self.config_hash == other.config_hash
            && self.config == other.config
            && self.times == other.times
            && self.series == other.series
            && self.fits == other.fits
            && self.verdicts == other.verdicts
    }
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Report = serde_json::from_str(text)?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(vec![format!(
                "report schema {} unsupported (expected {SCHEMA_VERSION})",
                r.schema_version
            )]));
        }
        Ok(r)
    }

    /// Long format, one row per series and time: `metric,t,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,t,value\n");
        for s in &self.series {
            for p in &s.samples {
                writeln!(out, "{},{},{}", s.name, p.t, p.value).expect("writing to a String");
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
        }
    }
}

/// Writes `<dir>/<name>.<ext>`, creating `dir`, and returns the path.
pub fn export(report: &Report, format: ExportFormat, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.{}", report.config.name, format.extension()));
    let body = match format {
        ExportFormat::Csv => report.to_csv(),
        ExportFormat::Json => report.to_json(),
    };
    std::fs::write(&path, body)?;
    Ok(path)
}

/// CSV and JSON side by side.
pub fn write_outputs(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    Ok(vec![
        export(report, ExportFormat::Csv, dir)?,
        export(report, ExportFormat::Json, dir)?,
    ])
}
