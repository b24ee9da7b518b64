//! Numerical toolkit for cavitation in two-dimensional nonlinear elasticity.
//!
//! The energy of a deformation `y` of a (punctured) reference domain is the
//! polyconvex bulk term `∫ W(Dy)` plus the anisotropic perimeter
//! `∫ φ(ν) dH¹` of every cavity the deformation opens. Cavities are detected
//! through the topological degree of boundary traces, the invertibility
//! condition (INV) is checked on sampled balls, and minimizers are certified
//! through the first variation along outer variations `h_t = id + tψ`.
//!
//! Module map:
//!
//! * [`material`] – bulk density `W` and surface density `φ`.
//! * [`geometry`] – meshes, piecewise-affine deformations, boundary data.
//! * [`degree`] – winding numbers, topological images, (INV) checks.
//! * [`energy`] – total energy and the surface functional `S(y)`.
//! * [`inverse`] – discrete inverse deformation and its jump set.
//! * [`variation`] – outer variations, first-variation residuals, minimizer.
//! * [`radial`] – one-dimensional radial reduction used as ground truth.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contour;
pub mod degree;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod inverse;
pub mod material;
pub mod numeric;
pub mod polygon;
pub mod radial;
pub mod variation;

pub use error::{Error, Result};

pub type Vec2 = nalgebra::Vector2<f64>;
pub type Mat2 = nalgebra::Matrix2<f64>;

pub(crate) fn geometry_bbox<'a>(pts: impl IntoIterator<Item = &'a Vec2>) -> (Vec2, Vec2) {
    let mut lo = Vec2::repeat(f64::INFINITY);
    let mut hi = Vec2::repeat(f64::NEG_INFINITY);
    for p in pts {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}
