use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the numerical pipeline and its file formats.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("root bracketing failed for mode {n}: f(lo)={f_lo:e}, f(hi)={f_hi:e}")]
    Bracket { n: usize, f_lo: f64, f_hi: f64 },

    /// Kernel evaluated at coincident points.
    #[error("coincident points in kernel evaluation at {0:?}")]
    Coincident([f64; 3]),

    /// Target point too close to a boundary sphere for the regular surface rule.
    #[error(
        "point at distance {distance:e} from boundary sphere (radius {radius}) is below the \
         near-singular threshold {threshold:e}; use boundary-limit mode or a refined rule"
    )]
    NearSingular {
        distance: f64,
        radius: f64,
        threshold: f64,
    },

    /// A dense system is singular or too ill-conditioned to trust.
    #[error("ill-conditioned system (condition estimate {cond:e}): {hint}")]
    IllConditioned { cond: f64, hint: String },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("collocation sampling exhausted after {attempts} candidates ({accepted} accepted)")]
    SamplingExhausted { attempts: usize, accepted: usize },

    /// Droplet position that leaves the unit ball or cannot be separated from collocation.
    #[error("droplet at {center:?} with radius {eps} is invalid: {reason}")]
    Droplet {
        center: [f64; 3],
        eps: f64,
        reason: String,
    },

    /// A per-position solve inside a scan failed.
    #[error("solve failed for droplet at {center:?}: {source}")]
    AtPosition {
        center: [f64; 3],
        #[source]
        source: Box<Error>,
    },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by invalid inputs rather than numerical breakdown.
    pub fn is_precondition(&self) -> bool {
        match self {
            Error::Domain(_)
            | Error::Droplet { .. }
            | Error::Grid(_)
            | Error::Io { .. }
            | Error::Format(_) => true,
            Error::AtPosition { source, .. } => source.is_precondition(),
            _ => false,
        }
    }
}
