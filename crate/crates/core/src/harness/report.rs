use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ExperimentPlan;
use crate::error::{Error, Result};
use crate::format_float;
use crate::swarm::{Variant, GENERATOR_ID};

pub const CSV_HEADER: [&str; 10] = [
    "function",
    "mu",
    "dimension",
    "variant",
    "runs",
    "G",
    "L",
    "O",
    "precision",
    "failed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Classification counts and precision of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionSummary {
    pub function: String,
    pub mu: Option<f64>,
    pub dimension: usize,
    pub variant: Variant,
    pub runs: usize,
    #[serde(rename = "G")]
    pub g: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "O")]
    pub o: usize,
    /// Mean offset from the optimum value over G runs; `None` without G runs.
    #[serde(with = "precision_or_na")]
    pub precision: Option<f64>,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub function: String,
    pub mu: Option<f64>,
    pub dimension: usize,
    pub variant: Variant,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsEntry {
    pub function: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub generator: String,
    pub a: f64,
    pub b_glob: f64,
    pub b_loc: f64,
    pub n_particles: usize,
    pub maxiter: usize,
    /// Search box of every function in the plan.
    pub bounds: Vec<BoundsEntry>,
    pub timestamp: String,
}

impl Metadata {
    pub fn for_plan(plan: &ExperimentPlan) -> Self {
        let mut bounds: Vec<BoundsEntry> = Vec::new();
        for cell in &plan.cells {
            let b = cell.benchmark().bounds();
            let entry = BoundsEntry {
                function: cell.benchmark().id().to_string(),
                lo: b.lo,
                hi: b.hi,
            };
            if !bounds.contains(&entry) {
                bounds.push(entry);
            }
        }
        bounds.sort_by(|x, y| x.function.cmp(&y.function).then(x.lo.total_cmp(&y.lo)));
        Metadata {
            generator: GENERATOR_ID.to_owned(),
            a: plan.a,
            b_glob: plan.b_glob,
            b_loc: plan.b_loc,
            n_particles: plan.n_particles,
            maxiter: plan.maxiter,
            bounds,
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub metadata: Metadata,
    /// One entry per plan cell, in plan order.
    pub summaries: Vec<PrecisionSummary>,
    pub failures: Vec<FailureRecord>,
}

impl ExperimentReport {
    /// First summary matching a function name, dimension and variant.
    pub fn find(
        &self,
        function: &str,
        dimension: usize,
        variant: Variant,
    ) -> Option<&PrecisionSummary> {
        self.summaries
            .iter()
            .find(|s| s.function == function && s.dimension == dimension && s.variant == variant)
    }

    /// Like [`find`](Self::find), additionally matching the Griewank weight.
    pub fn find_mu(
        &self,
        mu: f64,
        dimension: usize,
        variant: Variant,
    ) -> Option<&PrecisionSummary> {
        self.summaries
            .iter()
            .find(|s| s.mu == Some(mu) && s.dimension == dimension && s.variant == variant)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let to_err = |e: csv::Error| Error::config(format!("csv encoding: {e}"));
        w.write_record(CSV_HEADER).map_err(to_err)?;
        for s in &self.summaries {
            w.write_record([
                s.function.clone(),
                s.mu.map(format_float).unwrap_or_default(),
                s.dimension.to_string(),
                s.variant.to_string(),
                s.runs.to_string(),
                s.g.to_string(),
                s.l.to_string(),
                s.o.to_string(),
                s.precision.map_or_else(|| "n/a".to_owned(), format_float),
                s.failed.to_string(),
            ])
            .map_err(to_err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::config(format!("csv encoding: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn write_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => report.to_csv()?,
        ReportFormat::Json => report.to_json(),
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_report_json(path: &Path) -> Result<ExperimentReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// `Option<f64>` as a number, or the string `"n/a"` for `None`.
mod precision_or_na {
    use serde::{Deserialize, Deserializer, Serializer};

    const NA: &str = "n/a";

    pub fn serialize<S: Serializer>(value: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_f64(*v),
            None => s.serialize_str(NA),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Some(v)),
            Raw::Text(t) if t == NA => Ok(None),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "expected a number or \"{NA}\", got \"{t}\""
            ))),
        }
    }
}
