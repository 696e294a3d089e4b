use alloc::string::String;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what}: size {size} exceeds the configured cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("spectral parameter {re}+{im}i lies on the real axis")]
    RealSpectralParameter { re: f64, im: f64 },
    #[error("partition is crossing")]
    Crossing,
    #[error("partitions are not comparable in refinement order")]
    NotComparable,
    #[error("permutation is not an annular non-crossing permutation of the ({k},{l})-annulus")]
    NotAnnularNonCrossing { k: usize, l: usize },
    #[error("invalid labels: {0}")]
    InvalidLabels(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("matrix dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("mixed edge weight is unstable: |1 - sigma m_i m_j| = {0:e}")]
    UnstableMixedWeight(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("quadrature did not converge: {coarse} vs {fine}")]
    QuadratureNotConverged { coarse: f64, fine: f64 },
    #[error("singular matrix in linear solve")]
    Singular,
    #[error("at least {min} samples are required, got {got}")]
    TooFewSamples { min: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
