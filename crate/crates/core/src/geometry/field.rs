use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::index::PointGrid;
use super::mesh::{edge_matrix, Mesh};
use crate::{Error, Mat2, Result, Vec2};

/// Boundary datum `d` imposed on the Dirichlet part `Γ` of the boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryData {
    /// `d(x) = diag(λ, 1) x`.
    AffineStretch { lambda: f64 },
    /// `d(x) = λ x` (uniform stretch about the origin).
    RadialStretch { lambda: f64 },
    /// Explicit positions per Dirichlet vertex.
    UserTable(Vec<(usize, Vec2)>),
}

impl BoundaryData {
    pub fn identity() -> Self {
        Self::RadialStretch { lambda: 1.0 }
    }

    /// `d(x)` for the closed-form kinds; `None` for tables.
    pub fn eval(&self, x: &Vec2) -> Option<Vec2> {
        match self {
            Self::AffineStretch { lambda } => Some(Vec2::new(lambda * x.x, x.y)),
            Self::RadialStretch { lambda } => Some(*lambda * x),
            Self::UserTable(_) => None,
        }
    }

    /// Target position of every Dirichlet vertex of `mesh`.
    pub fn targets(&self, mesh: &Mesh) -> Result<Vec<(usize, Vec2)>> {
        match self {
            Self::UserTable(rows) => {
                let mut map: HashMap<usize, Vec2> = HashMap::new();
                for (v, p) in rows {
                    if let Some(prev) = map.insert(*v, *p) {
                        if prev != *p {
                            return Err(Error::Config(format!(
                                "boundary table assigns two values to vertex {v}"
                            )));
                        }
                    }
                }
                mesh.dirichlet_vertices()
                    .map(|v| {
                        map.get(&v).map(|p| (v, *p)).ok_or_else(|| {
                            Error::Config(format!("boundary table has no value for Dirichlet vertex {v}"))
                        })
                    })
                    .collect()
            }
            _ => Ok(mesh
                .dirichlet_vertices()
                .map(|v| (v, self.eval(&mesh.vertices()[v]).expect("closed form")))
                .collect()),
        }
    }
}

/// Piecewise-affine deformation: one deformed position per mesh vertex.
#[derive(Debug, Clone)]
pub struct DeformationField {
    mesh: Arc<Mesh>,
    positions: Vec<Vec2>,
}

/// Feasibility of a mollified field.
#[derive(Debug, Clone, Copy)]
pub struct MollifyReport {
    pub min_det: f64,
    pub triangle: usize,
    pub feasible: bool,
}

impl DeformationField {
    pub fn identity(mesh: Arc<Mesh>) -> Self {
        let positions = mesh.vertices().to_vec();
        Self { mesh, positions }
    }

    pub fn from_map(mesh: Arc<Mesh>, f: impl Fn(&Vec2) -> Vec2) -> Self {
        let positions = mesh.vertices().iter().map(f).collect();
        Self { mesh, positions }
    }

    pub fn from_positions(mesh: Arc<Mesh>, positions: Vec<Vec2>) -> Result<Self> {
        if positions.len() != mesh.num_vertices() {
            return Err(Error::Argument(format!(
                "{} positions for a mesh with {} vertices",
                positions.len(),
                mesh.num_vertices()
            )));
        }
        Ok(Self { mesh, positions })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn positions(&self) -> &[Vec2] {
        &self.positions
    }

    pub fn positions_mut(&mut self) -> &mut [Vec2] {
        &mut self.positions
    }

    /// Constant gradient `Dy` on triangle `t`.
    pub fn element_gradient(&self, t: usize) -> Mat2 {
        let tri = &self.mesh.triangles()[t];
        edge_matrix(&self.positions, tri) * self.mesh.reference_inverse(t)
    }

    pub fn element_gradients(&self) -> Vec<Mat2> {
        (0..self.mesh.num_triangles())
            .into_par_iter()
            .map(|t| self.element_gradient(t))
            .collect()
    }

    /// Smallest element determinant and the triangle attaining it.
    pub fn min_det(&self) -> (f64, usize) {
        (0..self.mesh.num_triangles())
            .map(|t| (self.element_gradient(t).determinant(), t))
            .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a })
    }

    /// `y(x)` by barycentric interpolation, `None` outside the mesh.
    pub fn evaluate(&self, x: &Vec2) -> Option<Vec2> {
        let (t, l) = self.mesh.locate(x)?;
        let [a, b, c] = self.mesh.triangles()[t];
        Some(self.positions[a] * l[0] + self.positions[b] * l[1] + self.positions[c] * l[2])
    }

    /// Images of `m` equally spaced points of the circle `S(center, r)`,
    /// counter-clockwise starting at angle 0.
    pub fn trace_on_circle(&self, center: &Vec2, r: f64, m: usize) -> Result<Vec<Vec2>> {
        let name = || format!("circle S(({:.4}, {:.4}), {:.4})", center.x, center.y, r);
        if !(r > 0.0) || m < 3 {
            return Err(Error::Geometry(format!("{} needs r > 0 and m >= 3", name())));
        }
        for (k, p) in self.mesh.punctures().iter().enumerate() {
            let d = (center - p.center).norm();
            if (d - r).abs() < 1.5 * p.radius {
                return Err(Error::Geometry(format!("{} enters puncture {k}", name())));
            }
        }
        (0..m)
            .map(|j| {
                let t = std::f64::consts::TAU * j as f64 / m as f64;
                let x = center + r * Vec2::new(t.cos(), t.sin());
                self.evaluate(&x)
                    .ok_or_else(|| Error::Geometry(format!("{} exits the meshed domain", name())))
            })
            .collect()
    }

    /// Deformed positions along a vertex loop.
    pub fn image_loop(&self, ids: &[usize]) -> Vec<Vec2> {
        ids.iter().map(|&v| self.positions[v]).collect()
    }

    /// Image of the loop around puncture `k`, oriented counter-clockwise so
    /// that it bounds the cavity with outward normal pointing into the material.
    pub fn cavity_polygon(&self, k: usize) -> Vec<Vec2> {
        let mut pts = self.image_loop(self.mesh.puncture_loop(k));
        pts.reverse();
        pts
    }

    /// Images of all boundary loops in domain-on-the-left orientation.
    pub fn boundary_images(&self) -> Vec<Vec<Vec2>> {
        let mut out: Vec<Vec<Vec2>> = self.mesh.outer_loops().iter().map(|l| self.image_loop(l)).collect();
        for k in 0..self.mesh.punctures().len() {
            out.push(self.image_loop(self.mesh.puncture_loop(k)));
        }
        out
    }

    /// Overwrite the Dirichlet vertices with the boundary datum.
    pub fn impose(&mut self, data: &BoundaryData) -> Result<()> {
        for (v, p) in data.targets(&self.mesh)? {
            self.positions[v] = p;
        }
        Ok(())
    }

    /// Gaussian-weighted local-linear smoothing of the vertex positions with
    /// width `sigma`. Dirichlet vertices are kept; `sigma = 0` returns a copy.
    /// The local affine fit reproduces affine maps exactly on any mesh.
    pub fn mollify(&self, sigma: f64) -> Result<(DeformationField, MollifyReport)> {
        if !(sigma >= 0.0) {
            return Err(Error::Argument(format!("mollifier width must be >= 0, got {sigma}")));
        }
        let mut out = self.clone();
        if sigma > 0.0 {
            let xs = self.mesh.vertices();
            let reach = 3.0 * sigma;
            let grid = PointGrid::build(xs, reach.max(1e-12));
            out.positions = (0..xs.len())
                .into_par_iter()
                .map(|v| {
                    if self.mesh.is_dirichlet(v) {
                        return self.positions[v];
                    }
                    self.local_fit(&grid, v, sigma, reach)
                })
                .collect();
        }
        let (min_det, triangle) = out.min_det();
        Ok((
            out,
            MollifyReport {
                min_det,
                triangle,
                feasible: min_det > 0.0,
            },
        ))
    }

    fn local_fit(&self, grid: &PointGrid, v: usize, sigma: f64, reach: f64) -> Vec2 {
        let xs = self.mesh.vertices();
        let xv = xs[v];
        let nb = grid.within(xs, &xv, reach);
        let mut wsum = 0.0;
        let mut xbar = Vec2::zeros();
        let mut ybar = Vec2::zeros();
        let weights: Vec<f64> = nb
            .iter()
            .map(|&w| (-(xs[w] - xv).norm_squared() / (2.0 * sigma * sigma)).exp())
            .collect();
        for (&w, &k) in nb.iter().zip(&weights) {
            wsum += k;
            xbar += k * (xs[w] - xv);
            ybar += k * self.positions[w];
        }
        xbar /= wsum;
        ybar /= wsum;
        let mut cxx = Mat2::zeros();
        let mut cyx = Mat2::zeros();
        for (&w, &k) in nb.iter().zip(&weights) {
            let dx = xs[w] - xv - xbar;
            let dy = self.positions[w] - ybar;
            cxx += k * dx * dx.transpose();
            cyx += k * dy * dx.transpose();
        }
        let scale = cxx.trace();
        match cxx.try_inverse() {
            Some(inv) if cxx.determinant() > 1e-10 * scale * scale => ybar - cyx * inv * xbar,
            _ => ybar,
        }
    }
}
