use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("group closure exceeded {limit} elements")]
    ClosureOverflow { limit: usize },
    #[error("incompatible generators: {0}")]
    IncompatibleGenerators(String),
    #[error("invalid group specification: {0}")]
    InvalidSpec(String),
    #[error("invalid group table: {0}")]
    InvalidTable(String),
    #[error("element index {index} out of range for group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("group of order {order} exceeds the subgroup enumeration bound {limit}")]
    GroupTooLarge { order: usize, limit: usize },
    #[error("group is not abelian")]
    NotAbelian,
    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("homomorphism violated for elements ({a}, {b}): deviation {deviation:.3e}")]
    HomomorphismViolation { a: usize, b: usize, deviation: f64 },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("map is not trace preserving (deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },
    #[error("superoperator dimension {0} is not a perfect square")]
    NotSuperoperator(usize),
    #[error("invalid rate schedule: {0}")]
    InvalidRates(String),
    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),
    #[error("non-finite entries in matrix")]
    NonFinite,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix has an eigenvalue on the closed negative real axis")]
    NegativeRealEigenvalue,
    #[error("Schur decomposition did not converge")]
    NoConvergence,
    #[error("map lies outside the affine hull of the group polytope (distance {distance:.3e})")]
    NotInAffineHull { distance: f64 },
    #[error("polytope is degenerate (affine dimension 0 with {order} vertices)")]
    DegeneratePolytope { order: usize },
    #[error("triangulation supports at most {limit} vertices, got {order}")]
    TriangulationOverflow { order: usize, limit: usize },
    #[error("plane offset lies outside the polytope")]
    OffsetOutsidePolytope,
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable snake_case name for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ClosureOverflow { .. } => "closure_overflow",
            Error::IncompatibleGenerators { .. } => "incompatible_generators",
            Error::InvalidSpec { .. } => "invalid_spec",
            Error::InvalidTable { .. } => "invalid_table",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::GroupTooLarge { .. } => "group_too_large",
            Error::NotAbelian => "not_abelian",
            Error::NotUnitary { .. } => "not_unitary",
            Error::HomomorphismViolation { .. } => "homomorphism_violation",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::ShapeMismatch { .. } => "shape_mismatch",
            Error::NotTracePreserving { .. } => "not_trace_preserving",
            Error::NotSuperoperator { .. } => "not_superoperator",
            Error::InvalidRates { .. } => "invalid_rates",
            Error::InvalidWeights { .. } => "invalid_weights",
            Error::NonFinite => "non_finite",
            Error::SingularMatrix => "singular_matrix",
            Error::NegativeRealEigenvalue => "negative_real_eigenvalue",
            Error::NoConvergence => "no_convergence",
            Error::NotInAffineHull { .. } => "not_in_affine_hull",
            Error::DegeneratePolytope { .. } => "degenerate_polytope",
            Error::TriangulationOverflow { .. } => "triangulation_overflow",
            Error::OffsetOutsidePolytope => "offset_outside_polytope",
            Error::Overflow { .. } => "overflow",
            Error::InvalidArgument { .. } => "invalid_argument",
        }
    }

    /// Whether the failure is numerical (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonFinite
                | Error::SingularMatrix
                | Error::NegativeRealEigenvalue
                | Error::NoConvergence
                | Error::HomomorphismViolation { .. }
                | Error::DegeneratePolytope { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
