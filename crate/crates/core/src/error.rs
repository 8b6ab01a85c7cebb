use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// How a failure should be reported to a caller (and mapped to a CLI exit code).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The input itself is malformed: wrong shapes, bad parameters, unreadable files.
    Malformed,
    /// The input is well formed but violates a mathematical precondition.
    Precondition,
    /// A numerical routine failed on valid input.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("eigenvalue iteration did not converge after {iterations} iterations (subdiagonal residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error(
        "channel is not bistochastic (trace-preserving residual {tp_residual:e}, unital residual {unital_residual:e})"
    )]
    NotBistochastic {
        tp_residual: f64,
        unital_residual: f64,
    },

    #[error("peripheral eigenvalues other than 1 are present ({}); the strict limit is not guaranteed, use the Cesaro limit instead", fmt_list(.others))]
    PeripheralObstruction { others: Vec<Complex64> },

    #[error("{} is not on the unit circle", fmt_complex(*.0))]
    NotPeripheral(Complex64),

    #[error("{} is not an eigenvalue of the superoperator", fmt_complex(*.0))]
    NotInSpectrum(Complex64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid walk: {0}")]
    InvalidWalk(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::NotBistochastic { .. }
            | Error::PeripheralObstruction { .. }
            | Error::NotPeripheral(_)
            | Error::NotInSpectrum(_) => ErrorKind::Precondition,
            Error::NoConvergence { .. } | Error::Numerical(_) => ErrorKind::Numerical,
            Error::ShapeMismatch { .. }
            | Error::NotSquare { .. }
            | Error::NonFinite { .. }
            | Error::InvalidDensity(_)
            | Error::InvalidParameter(_)
            | Error::InvalidWalk(_)
            | Error::Format(_)
            | Error::Json(_)
            | Error::Io(_) => ErrorKind::Malformed,
        }
    }
}

fn fmt_complex(z: Complex64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

fn fmt_list(zs: &[Complex64]) -> String {
    zs.iter().map(|z| fmt_complex(*z)).collect::<Vec<_>>().join(", ")
}
