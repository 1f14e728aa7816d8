use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("scale must be positive and finite, got {0}")]
    NonPositiveScale(f64),
    #[error("scale must be non-negative and finite, got {0}")]
    NegativeScale(f64),
    #[error("drift must be finite, got {0}")]
    NonFiniteDrift(f64),
    #[error("stationary profile requires positive drift, got {0}")]
    NonPositiveDrift(f64),
    #[error("position {0} lies outside the past half-line (-inf, 0]")]
    OutsideHalfLine(f64),
    #[error("inverted interval [{lo}, {hi}]")]
    InvertedInterval { lo: f64, hi: f64 },
    #[error("mismatched drift: {0} vs {1}")]
    DriftMismatch(f64, f64),
    #[error("invalid series: {0}")]
    InvalidSeries(&'static str),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("grid needs at least 3 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("singular tridiagonal system at row {0}")]
    SingularSystem(usize),
}
