use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by constructors and numeric operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not symmetric (max asymmetry {max_asym:.3e})")]
    NotSymmetric { max_asym: f64 },

    #[error("matrix is not positive definite (min eigenvalue {min_eig:.3e}, max {max_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64, max_eig: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    EigNonConvergence { sweeps: usize },

    #[error("spectral function undefined at eigenvalue {eigenvalue:.6e}")]
    SpectralDomain { eigenvalue: f64 },

    #[error("invalid family parameters: n = {n}, p = {p} (requires p > n/(n+2))")]
    InvalidFamily { n: usize, p: f64 },

    #[error("parameter outside existence region: {0}")]
    EntropyDomain(String),

    #[error("q = 1 is excluded here; use the Shannon entropy instead")]
    OrderOne,

    #[error("log-gamma argument {0:.6e} outside supported range")]
    GammaRange(f64),

    #[error("the Fisher information does not exist for p = {p} (requires p < 2)")]
    FisherNonexistent { p: f64 },

    #[error("Fisher integral diverges for p = {p}: estimates {coarse:.6e} -> {fine:.6e} under resolution doubling")]
    FisherDiverges { p: f64, coarse: f64, fine: f64 },

    #[error("metric is degenerate at alpha = -1/(2n) (alpha = {alpha}, n = {n})")]
    DegenerateMetric { alpha: f64, n: usize },

    #[error("not a distance: {0}")]
    NotADistance(String),

    #[error("matrix left the positive definite cone at t = {t:.6e}")]
    SpdViolation { t: f64 },

    #[error("finite-difference step {h:.3e} leaves the valid region")]
    StepSize { h: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("embedded geodesic leaves the image of the embedding at t = {t} (corner entry {entry:.6e}, expected {beta:.6e})")]
    UnembedFailure { t: f64, entry: f64, beta: f64 },

    #[error("structural precondition violated: {0}")]
    StructuralPrecondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    /// Stable machine-readable code, used by the CLI `CommandResult`.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotSymmetric { .. } => "not_symmetric",
            Error::NotPositiveDefinite { .. } => "not_positive_definite",
            Error::EigNonConvergence { .. } => "eig_non_convergence",
            Error::SpectralDomain { .. } => "spectral_domain",
            Error::InvalidFamily { .. } => "invalid_family",
            Error::EntropyDomain(_) => "entropy_domain",
            Error::OrderOne => "order_one",
            Error::GammaRange(_) => "gamma_range",
            Error::FisherNonexistent { .. } => "fisher_nonexistent",
            Error::FisherDiverges { .. } => "fisher_diverges",
            Error::DegenerateMetric { .. } => "degenerate_metric",
            Error::NotADistance(_) => "not_a_distance",
            Error::SpdViolation { .. } => "spd_violation",
            Error::StepSize { .. } => "step_size",
            Error::NonConvergence { .. } => "non_convergence",
            Error::UnembedFailure { .. } => "unembed_failure",
            Error::StructuralPrecondition(_) => "structural_precondition",
            Error::Numerical(_) => "numerical",
            Error::Parse { .. } => "parse",
        }
    }
}
