use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("wavenumber k = 0 is not allowed here (zero mode belongs to the zeromode module)")]
    ZeroWavenumber,
    #[error("zero-mode content present in field `{0}`; route k = 0 data through the zeromode module")]
    ZeroModeViolation(&'static str),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("integration failed at t = {t}: {reason} (last step {h:e})")]
    Integration { t: f64, h: f64, reason: String },
    #[error("contraction failure: ||T2~|| = {norm} >= 1; profile too large for this grid")]
    Contraction { norm: f64 },
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("operator positivity lost: {0}")]
    Positivity(String),
    #[error("construction failed for mode (k = {k}, eta = {eta}): {reason}")]
    Construction { k: i64, eta: f64, reason: String },
    #[error("fit error: {0}")]
    Fit(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("cost guard: {0}")]
    CostGuard(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
