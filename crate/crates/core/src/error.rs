use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("could not build a ({d_l},{d_r})-regular graph on {n} variables with girth >= {min_girth} after {retries} attempts")]
    ConstructionFailure {
        n: usize,
        d_l: usize,
        d_r: usize,
        min_girth: usize,
        retries: usize,
    },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("word is not a codeword of the graph")]
    NotACodeword,

    #[error("check node degree {0} is too large for the explicit polytope (max 12)")]
    DegreeTooLarge(usize),

    #[error("numerical failure in floating-point simplex: {0}")]
    NumericalFailure(String),

    #[error("depth T = {depth} needs 4T < girth, but girth is {girth}")]
    GirthViolation { depth: usize, girth: usize },

    #[error("{count} deviations exceed the enumeration cap of {cap}")]
    ExplosionGuard { count: u128, cap: u128 },

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("word is not a codeword of the cover graph")]
    NotACoverCodeword,

    #[error("grid too small: tail mass {mass:e} exceeds tolerance {tolerance:e}")]
    GridTooSmall { mass: f64, tolerance: f64 },

    #[error("tail overflow at level {level}: truncated mass {mass:e} exceeds tolerance {tolerance:e}")]
    TailOverflow { level: usize, mass: f64, tolerance: f64 },

    #[error("quadrature did not converge")]
    QuadratureNonconvergence,

    #[error("bracket [{lo}, {hi}] does not straddle the threshold (condition at lo: {holds_lo}, at hi: {holds_hi})")]
    BracketFailure {
        lo: f64,
        hi: f64,
        holds_lo: bool,
        holds_hi: bool,
    },

    #[error("sigma = {sigma} is not below the threshold (c = {c} >= 1)")]
    SigmaAboveThreshold { sigma: f64, c: f64 },

    #[error("girth {girth} gives T = {depth}, which must exceed s = {s}")]
    GirthTooSmallForS { girth: usize, depth: usize, s: usize },

    #[error("bound condition fails (c = {c} >= 1)")]
    ConditionFails { c: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
