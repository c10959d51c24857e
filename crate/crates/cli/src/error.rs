//! Error classes mapped to the process exit codes: 1 usage, 2 data or
//! validation, 3 I/O.

use std::fmt;

use geobench_core::baseline::BaselineError;
use geobench_core::encoding::ExportError;
use geobench_core::geo::GeoError;
use geobench_core::ingest::IngestError;
use geobench_core::metrics::MetricsError;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn io(context: impl fmt::Display, err: impl fmt::Display) -> CliError {
        CliError::Io(format!("{context}: {err}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) | CliError::Io(msg) => f.write_str(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

impl From<IngestError> for CliError {
    fn from(err: IngestError) -> Self {
        match err {
            IngestError::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(err: MetricsError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<GeoError> for CliError {
    fn from(err: GeoError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<BaselineError> for CliError {
    fn from(err: BaselineError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<ExportError> for CliError {
    fn from(err: ExportError) -> Self {
        CliError::Io(err.to_string())
    }
}
