use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain of a function (poles, negative abscissae, ...).
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    /// Invalid configuration value. `field` names the offending setting.
    #[error("invalid value for `{field}`: {reason}")]
    Config { field: String, reason: String },

    /// Adaptive quadrature ran out of its subdivision budget.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (best estimate {value:e}, error estimate {error_estimate:e})"
    )]
    Convergence {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },

    /// Not enough data for the requested operation.
    #[error("insufficient input: {0}")]
    Input(String),

    #[error("unknown problem `{0}` (expected one of normalized_rational, harmonic, rational_unnormalized, thermal_boson_demo)")]
    UnknownProblem(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
