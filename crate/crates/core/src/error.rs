use thiserror::Error;

use crate::{Mat2, Vec2};

/// Errors raised by the compute modules.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix argument left the domain of a density (e.g. `det F <= 0`).
    #[error("domain error: {what} (matrix [[{:.6e}, {:.6e}], [{:.6e}, {:.6e}]])", .matrix[(0, 0)], .matrix[(0, 1)], .matrix[(1, 0)], .matrix[(1, 1)])]
    Domain { what: String, matrix: Mat2 },

    #[error("domain error: {0}")]
    DomainScalar(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("mesh validation error: {0}")]
    Mesh(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    /// Query point lies on (or numerically on) a loop segment.
    #[error("point ({:.6e}, {:.6e}) lies on the loop", .0.x, .0.y)]
    OnBoundary(Vec2),

    /// Deformation has a non-positive element determinant.
    #[error("infeasible deformation: det Dy = {det:.6e} on triangle {triangle}")]
    Infeasible { triangle: usize, det: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("Hessian unavailable for surface density kind {0}")]
    HessianUnavailable(&'static str),

    /// Point lies in a cavity where the inverse has no absolutely continuous gradient.
    #[error("no absolutely continuous part at ({:.6e}, {:.6e}): point is in a cavity", .0.x, .0.y)]
    InCavity(Vec2),

    #[error("point ({:.6e}, {:.6e}) is outside the deformed configuration", .0.x, .0.y)]
    Outside(Vec2),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
