//! Error type shared across the crate.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Configuration file problem (syntax, unknown key, bad value, missing
    /// dependency between keys). `line` is 0 when the problem is not tied to
    /// a single line.
    #[error("{path}:{line}: {message}")]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Malformed DEM / depth grid file.
    #[error("{path}:{line}: {message}")]
    Dem {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// NaN or Inf appeared in a field during a stage update.
    #[error("non-finite {field} at cell ({i}, {j}) in {stage} stage, t = {time}")]
    NonFinite {
        field: &'static str,
        i: usize,
        j: usize,
        stage: &'static str,
        time: f64,
    },

    /// Water depth dropped below the roundoff tolerance; the positivity
    /// guarantee of the scheme was violated.
    #[error("negative depth {value:e} at cell ({i}, {j}), t = {time} (tolerance -1e-15)")]
    NegativeDepth { i: usize, j: usize, value: f64, time: f64 },

    /// The corrector-stage CFL bound kept shrinking the step; the flow
    /// state is accelerating without limit.
    #[error("time step collapsed under the corrector CFL bound at t = {time}")]
    CflStall { time: f64 },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for input problems (config / file ingestion) as opposed to
    /// runtime numerical failures.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Config { .. } | Error::Dem { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
