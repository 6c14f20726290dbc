use std::io;

use thiserror::Error;

use crate::solvers::SolverId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Layers do not tile the radial interval.
    #[error("structural error: {0}")]
    Structure(String),

    /// A value lies outside its admissible domain (radius, temperature, coefficient sign).
    #[error("domain error: {0}")]
    Domain(String),

    /// Contact stencils would overlap each other or a boundary stencil.
    #[error("spacing error: {0}")]
    Spacing(String),

    #[error("index {index} out of range {range}")]
    Index { index: usize, range: String },

    #[error("row {row}: {reason}")]
    StencilSelection { row: usize, reason: String },

    /// Pivot-free band reduction needs a nonzero entry in the neighbouring row.
    #[error("band reduction broke down at row {row}: neighbour coefficient is zero")]
    ReductionBreakdown { row: usize },

    /// Numerical elimination met a (relatively) zero pivot.
    #[error("{solver} broke down at row {row}: pivot {pivot:e} below threshold")]
    Breakdown {
        solver: SolverId,
        row: usize,
        pivot: f64,
    },

    #[error("{solver}: matrix is singular")]
    Singular { solver: SolverId },

    #[error("Picard iteration did not converge in {iterations} iterations (last change {last_change:e})")]
    NonConvergence { iterations: usize, last_change: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
