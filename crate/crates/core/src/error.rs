use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension {0} outside the supported range")]
    UnsupportedDimension(usize),
    #[error("polygon is not in strictly convex counterclockwise position (at vertex {0})")]
    NotConvex(usize),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("column {0} of the operator is zero")]
    ZeroColumn(usize),
    #[error("invalid pentagon parameters: {0}")]
    InvalidParams(String),
    #[error("body is not centrally symmetric")]
    NotSymmetric,
    #[error("symmetry center lies in no subtriangle of the maximal triangle")]
    NoContainingSubtriangle,
    #[error("vertex and halfspace representations disagree: {0}")]
    InconsistentRepresentations(String),
    #[error("body is not full-dimensional")]
    DegenerateBody,
    #[error("sampling exhausted after {0} attempts")]
    SamplingExhausted(usize),
    #[error("nothing found after {0} attempts")]
    NotFound(usize),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no side of the pentagon is parallel to a diagonal")]
    NoParallelPair,
    #[error("{0} side/diagonal pairs are parallel, expected exactly one")]
    MultiplePairs(usize),
    #[error("inclusion {which} failed at vertex {vertex}, halfspace {halfspace}")]
    InclusionFailed {
        which: String,
        vertex: usize,
        halfspace: usize,
    },
    #[error("rationalized candidate has exact ratio {exact}, float search reported {float}")]
    CertificationRegression { exact: f64, float: f64 },
    #[error("exact ratio {ratio} is below the proven lower bound {bound}")]
    TheoremViolation { ratio: String, bound: String },
    #[error("asymmetry of the constructed body is {got}, expected {expected}")]
    AsymmetryMismatch { expected: String, got: String },
    #[error("parse error: {0}")]
    Parse(String),
}
