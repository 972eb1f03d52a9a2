//! Exact-arithmetic machinery for stability polytopes of type-A root data,
//! Arthur-style weight functions, and desk-scale SL(2) Hitchin-fiber point
//! counts over the function field of the projective line.
//!
//! Everything is computed over exact rationals (or exact finite-field /
//! truncated-series arithmetic in the adelic layer); no floating point is
//! used anywhere.

pub mod adelic;
pub mod genfam;
pub mod geom;
pub mod json;
pub mod polytope;
pub mod ratmat;
pub mod rootdata;
pub mod series;
pub mod suite;
pub mod weights;

use thiserror::Error;

/// Error type shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rank must be at least 2, got {0}")]
    RankTooSmall(usize),
    #[error("vector is not in the ambient trace-zero space: {0}")]
    NotInAmbient(String),
    #[error("incompatible (Levi, parabolic) pair")]
    IncompatiblePair,
    #[error("parabolics belong to different Levi subgroups")]
    DifferentLevis,
    #[error("lattices span different subspaces")]
    DifferentSpans,
    #[error("direction is not generic: {0}")]
    NonGenericDirection(String),
    #[error("invalid positive orthogonal family: {0}")]
    InvalidFamily(String),
    #[error("family points are not in the cocharacter lattice; the limit formula requires integral points")]
    NonIntegralFamily,
    #[error("nearest-point search failed: {0} candidate faces succeeded")]
    NearestPointAmbiguous(usize),
    #[error("no cone of the chamber partition contains the vector")]
    PartitionMiss,
    #[error("{0} cones of the chamber partition contain the vector")]
    PartitionOverlap(usize),
    #[error(
        "series precision exhausted: needed coefficient of degree {needed}, known below {trunc}"
    )]
    PrecisionLoss { needed: i64, trunc: i64 },
    #[error("series has no known nonzero leading coefficient")]
    NotInvertible,
    #[error("nonvanishing principal part in a family limit (degree {0})")]
    PrincipalPart(i64),
    #[error("family limit disagrees across directions")]
    DirectionDisagreement,
    #[error("restriction depends on the choice of refinement")]
    ChoiceDependent,
    #[error("scalars carry incompatible references")]
    IncompatibleReference,
    #[error("vector is not in the span of the requested basis")]
    NotInSpan,
    #[error("not a prime power: {0}")]
    NotPrimePower(u64),
    #[error("polynomial is not irreducible")]
    NotIrreducible,
    #[error("pole divisor exceeds D at place {0}")]
    PoleExcess(String),
    #[error("characteristic is not regular at infinity: {0}")]
    InfinityRegularity(String),
    #[error("the place at infinity may not appear in the divisor D")]
    InfinityInDivisor,
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("truncation parameter is not in general position")]
    NotGeneralPosition,
    #[error("enumeration window {given} is below the certified bound {needed}")]
    WindowTooSmall { given: i64, needed: i64 },
    #[error("the two counting pipelines disagree: {0} != {1}")]
    PipelineMismatch(String, String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema violation: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
