use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("attempted to form +inf - inf")]
    InfinityMinusInfinity,
    #[error("polyhedron is empty")]
    EmptyPolyhedron,
    #[error("point is not in the intersection of the two sets")]
    PointNotInIntersection,
    #[error("point is outside the domain")]
    PointOutsideDomain,
    #[error("point is outside the common domain")]
    PointOutsideCommonDomain,
    #[error("image of the point is outside the domain of the outer function")]
    CompositionPointOutsideDomain,
    #[error("range of the linear map misses the domain")]
    RangeMissesDomain,
    #[error("point is not on the graph")]
    PointNotOnGraph,
    #[error("invalid split of the sum value")]
    InvalidSplit,
    #[error("intermediate point is not in F(x) ∩ G⁻¹(z)")]
    InvalidIntermediatePoint,
    #[error("qualification condition is violated")]
    QualificationViolated,
    #[error("value is infinite")]
    ValueInfinite,
    #[error("function has no affine pieces")]
    NoPieces,
    #[error("certificate failed verification: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
