use thiserror::Error;

/// Errors produced by kernel construction, spectral analysis, evolution and
/// the epidemic solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid must have at least one cell per axis (got {0})")]
    ZeroCells(usize),

    #[error("grid bounds are degenerate: [{lo}, {hi}]")]
    DegenerateBounds { lo: f64, hi: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("kernel entry at ({row}, {col}) is negative: {value}")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("kernel entry at ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("kernel is not ergodic ({components} components); per-component analysis required")]
    NotErgodic { components: usize },

    #[error("emigration rate vanishes at cell {cell}; steady-state transformation undefined")]
    ZeroEmigration { cell: usize },

    #[error("dominant eigenvalue not separated from the essential threshold (s = {s}, threshold = {threshold})")]
    DominanceNotEstablished { s: f64, threshold: f64 },

    #[error("shift {shift} is within tolerance of an eigenvalue; resolvent is singular")]
    SingularShift { shift: f64 },

    #[error("initial data contains a negative value: {value} at cell {cell}")]
    NegativeInitialData { cell: usize, value: f64 },

    #[error("numerical failure during integration: {0}")]
    NumericalFailure(String),

    #[error("kernel is not piecewise semi-constant: column deviation {deviation} exceeds tolerance {tol}")]
    NotSemiConstant { deviation: f64, tol: f64 },

    #[error("block matrix is reducible; Perron reduction requires irreducible blocks")]
    ReducibleBlocks,

    #[error("kernel classification is {found}, expected one of {expected}")]
    WrongClassification {
        found: &'static str,
        expected: &'static str,
    },

    #[error("trajectory already converged (deviation {deviation} below fit floor); no decay to fit")]
    AlreadyConverged { deviation: f64 },

    #[error("deviation norms are not monotone over the fit window")]
    NonMonotoneTail,

    #[error("too few snapshots for a decay fit: need at least {need}, got {got}")]
    TooFewSnapshots { need: usize, got: usize },

    #[error("total destination rate is zero; closed form undefined")]
    ZeroTotalRate,

    #[error("two-piece ergodicity condition violated: {0}")]
    TwoPieceNotErgodic(&'static str),

    #[error("spectral bound did not cross zero below r = {limit}")]
    BracketExpansionFailure { limit: f64 },

    #[error("rate {name} = {value} outside the required regime: {requirement}")]
    RateOutsideRegime {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed file {path}: {reason}")]
    MalformedFile { path: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
