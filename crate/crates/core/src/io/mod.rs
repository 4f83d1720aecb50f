//! Instance files, dataset conversion, synthetic instances and result tables.

mod canonical;
mod convert;
mod results;
mod synthetic;

use thiserror::Error;

use crate::model::ModelError;

pub use canonical::{
    default_kappas, parse_canonical, parse_canonical_str, read_canonical, read_canonical_unchecked_feasibility,
    write_canonical, CanonicalInstanceFile, DEFAULT_KAPPAS,
};
pub use convert::{convert_frangioni_gentile, FgFiles};
pub use results::{emit_results, read_results, write_results, OutputFormat, ResultRow, RESULT_HEADER};
pub use synthetic::generate_synthetic;

pub use crate::model::PortfolioModel as Model;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Validation(#[from] ModelError),
    #[error("unrecognized layout in {file} line {line}: {message}")]
    UnrecognizedLayout { file: String, line: usize, message: String },
    #[error("nothing to write")]
    Empty,
}

pub(crate) fn io_err(path: &std::path::Path, source: std::io::Error) -> IoError {
    IoError::Io {
        path: path.display().to_string(),
        source,
    }
}
