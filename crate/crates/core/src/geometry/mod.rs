//! Reference meshes, piecewise-affine deformations and boundary data.

mod field;
mod generate;
mod index;
mod io;
mod mesh;

pub use field::{BoundaryData, DeformationField, MollifyReport};
pub use generate::{annulus, delaunay_domain, disk, unit_square, DomainShape, MeshSpec};
pub use index::{barycentric, PointGrid, TriangleIndex};
pub use io::{read_mesh, write_mesh};
pub use mesh::{BoundaryTag, Mesh, Puncture};
pub(crate) use mesh::edge_matrix;
