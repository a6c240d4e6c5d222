use thiserror::Error;

/// Errors shared by all modules of the toolkit.
#[derive(Error, Debug)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Tabulated kernel queried outside its sample grid.
    #[error("extrapolation outside tabulated grid: {0}")]
    Extrapolation(String),

    /// Deconvolution or a Volterra march hit a non-positive pivot.
    #[error("singular kernel: {0}")]
    Singular(String),

    /// Query outside the solved time range of a table.
    #[error("range error: {0}")]
    Range(String),

    /// Spatial grid too small for the requested evolution.
    #[error("domain too small for t={t}: suggested extent {suggested_extent}")]
    DomainTooSmall { t: f64, suggested_extent: f64 },

    /// Spectral resolution insufficient (symbol not decayed at Nyquist,
    /// or a radial tail above tolerance).
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Oscillatory-tail quadrature failed to converge.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// A finite-difference stencil degenerated.
    #[error("stencil error: {0}")]
    Stencil(String),

    /// Malformed configuration or input file.
    #[error("config error: {0}")]
    Config(String),

    /// Internal invariant violated.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
