use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension {
        what: String,
        expected: String,
        got: String,
    },

    #[error("matrix is not Hurwitz (max real part of eigenvalues = {margin:e})")]
    NotHurwitz { margin: f64 },

    #[error("{0} is not symmetric positive definite")]
    NotPositiveDefinite(String),

    #[error("{0} is singular")]
    Singular(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("strong convexity violated: {0}")]
    Convexity(String),

    #[error(
        "optimizer did not converge after {iterations} iterations (gradient norm {residual:e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("regression matrix is rank deficient: {0}")]
    Rank(String),

    #[error(
        "recursive least squares state lost positive definiteness; re-initialize the estimator"
    )]
    RlsState,

    #[error("closed loop diverged at t = {t}")]
    Divergence { t: f64 },

    #[error("output coupling l_y*|G|*|C| is zero; theta is undefined")]
    DegenerateCoupling,

    #[error("certificate invalid: {0}")]
    CertificateInvalid(String),

    #[error("configuration error(s):\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn dim(
        what: impl Into<String>,
        expected: impl ToString,
        got: impl ToString,
    ) -> Self {
        Error::Dimension {
            what: what.into(),
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
