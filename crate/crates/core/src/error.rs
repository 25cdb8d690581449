use thiserror::Error;

/// Errors raised by the analysis pipeline.
///
/// Most variants are precondition failures (bad input, a Reeb field outside the
/// cone, ...). [`Error::FutakiMismatch`] and [`Error::Internal`] signal an
/// internal-consistency failure and should never occur on valid input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by a series that vanishes to its known order")]
    DivisionByZeroSeries,

    #[error("leading coefficient {0} is not invertible in the coefficient ring")]
    NonInvertibleLeading(String),

    #[error("rational function has a pole at s = {0}")]
    Pole(String),

    #[error("Reeb field lies outside the open Reeb cone: {0}")]
    OutsideReebCone(String),

    #[error("monomial support is not semi-invariant: {0}")]
    NotSemiInvariant(String),

    #[error("dimension {0} too small; Laurent data requires n >= 2")]
    DimensionTooSmall(usize),

    #[error("a1/a0 = {0} is not positive; no log-terminal normalization exists")]
    NotLogTerminal(String),

    #[error("Reeb field is not normalized on this variety: a1/a0 = {found}, expected {expected}")]
    NotNormalized { found: String, expected: String },

    #[error("canonical weight vanishes identically; the normalized slice is empty")]
    NoNormalizedSlice,

    #[error("normalized slice is unbounded in direction {0}")]
    UnboundedSlice(String),

    #[error("slice has dimension {found}, operation requires {expected}")]
    SliceDimension { found: usize, expected: usize },

    #[error("no critical point of the volume in the open slice; infimum is on the boundary")]
    BoundaryMinimum,

    #[error("Newton iteration did not converge after {iterations} steps (gradient norm {gradient_norm:e})")]
    NonConvergence { iterations: usize, gradient_norm: f64, last: Vec<String> },

    #[error("Reeb field is not a volume minimizer: derivative {derivative} along {direction}")]
    NotMinimizer { direction: String, derivative: String },

    #[error("lattice enumeration exceeds {limit} points")]
    LatticeTooLarge { limit: usize },

    #[error("coordinate weights must be positive integers for lattice counting: {0}")]
    NonIntegralWeights(String),

    #[error("F does not have a saturated image (elementary divisors {0})")]
    TorsionCokernel(String),

    #[error("invalid exact sequence data: {0}")]
    InvalidExactSequence(String),

    #[error("fiber polyhedron over ray {0} is empty")]
    EmptyPolyhedron(String),

    #[error("cone is not pointed; extreme rays are undefined")]
    ConeNotPointed,

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("Futaki formulas disagree: definition {definition}, volume derivative {via_volume}")]
    FutakiMismatch { definition: String, via_volume: String },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::FutakiMismatch { .. } | Error::Internal(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
