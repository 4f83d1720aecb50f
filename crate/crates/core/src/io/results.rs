//! Benchmark result tables.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::PortfolioModel as Model;
use crate::solver::Termination;

use super::{io_err, IoError};

pub const RESULT_HEADER: &str = "instance,model,kappa,objective,outer_iters,inner_iters,final_rho,reason,seconds";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    /// From the file extension; csv unless it is `.json`.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

/// One solver run. `objective` is kept only for converged runs, so aborted
/// runs plot as empty bars. `seconds` is left out when timing is omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance: String,
    pub model: Model,
    pub kappa: usize,
    pub objective: Option<f64>,
    pub outer_iters: usize,
    pub inner_iters: usize,
    pub final_rho: f64,
    pub reason: Termination,
    pub seconds: Option<f64>,
}

impl ResultRow {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        instance: impl Into<String>,
        model: Model,
        kappa: usize,
        objective: f64,
        outer_iters: usize,
        inner_iters: usize,
        final_rho: f64,
        reason: Termination,
        seconds: Option<f64>,
    ) -> Self {
        ResultRow {
            instance: instance.into(),
            model,
            kappa,
            objective: (reason == Termination::Converged).then_some(objective),
            outer_iters,
            inner_iters,
            final_rho,
            reason,
            seconds,
        }
    }
}

pub fn write_results<W: std::io::Write>(rows: &[ResultRow], format: OutputFormat, out: W) -> Result<(), IoError> {
    if rows.is_empty() {
        return Err(IoError::Empty);
    }
    let err = |e: String| IoError::Parse(e);
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r).map_err(|e| err(e.to_string()))?;
            }
            w.flush().map_err(|e| err(e.to_string()))
        }
        OutputFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows).map_err(|e| err(e.to_string()))?;
            out.write_all(b"\n").map_err(|e| err(e.to_string()))
        }
    }
}

pub fn emit_results(rows: &[ResultRow], path: &Path, format: OutputFormat) -> Result<(), IoError> {
    let mut buf = Vec::new();
    write_results(rows, format, &mut buf)?;
    std::fs::write(path, buf).map_err(|e| io_err(path, e))
}

pub fn read_results(path: &Path, format: OutputFormat) -> Result<Vec<ResultRow>, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    match format {
        OutputFormat::Json => serde_json::from_str(&text).map_err(|e| IoError::Parse(e.to_string())),
        OutputFormat::Csv => {
            let mut r = csv::Reader::from_reader(text.as_bytes());
            let header = r.headers().map_err(|e| IoError::Parse(e.to_string()))?;
            if header.iter().collect::<Vec<_>>().join(",") != RESULT_HEADER {
                return Err(IoError::Parse(format!("unexpected header, want {RESULT_HEADER}")));
            }
            r.deserialize()
                .collect::<Result<_, _>>()
                .map_err(|e| IoError::Parse(e.to_string()))
        }
    }
}
