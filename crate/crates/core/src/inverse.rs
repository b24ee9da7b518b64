//! Discrete inverse deformation: point inversion over the deformed mesh, the
//! absolutely continuous part of its gradient, and its jump set on the
//! cavity boundaries.

use std::io::Write;

use rayon::prelude::*;

use crate::contour::{marching_squares, Grid};
use crate::degree::winding_number_unchecked;
use crate::geometry::{DeformationField, TriangleIndex};
use crate::numeric::{pairwise_sum, rot_cw};
use crate::polygon::signed_area;
use crate::{geometry_bbox, Error, Mat2, Result, Vec2};

/// Pre-image of a deformed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preimage {
    /// Reference point and the triangle containing it.
    Reference { x: Vec2, triangle: usize },
    /// In the topological image but covered by no element: a cavity.
    Cavity,
    Outside,
}

/// Deformed-configuration point location for one deformation.
pub struct InverseMap<'a> {
    y: &'a DeformationField,
    index: TriangleIndex,
    outer: Vec<Vec<Vec2>>,
    /// Value assigned to cavity points.
    pub marker: Vec2,
}

/// `centroid(Ω) + 3 diam(Ω) (1, 0)`.
pub fn default_marker(y: &DeformationField) -> Vec2 {
    let mesh = y.mesh();
    let (lo, hi) = geometry_bbox(mesh.vertices().iter());
    let w: Vec<f64> = mesh.areas().to_vec();
    let cx: Vec<Vec2> = (0..mesh.num_triangles()).map(|t| mesh.centroid(t) * w[t]).collect();
    let c = crate::numeric::pairwise_sum_vec(&cx) / pairwise_sum(&w);
    c + Vec2::new(3.0 * (hi - lo).norm(), 0.0)
}

impl<'a> InverseMap<'a> {
    pub fn new(y: &'a DeformationField) -> Self {
        Self::with_marker(y, default_marker(y))
    }

    pub fn with_marker(y: &'a DeformationField, marker: Vec2) -> Self {
        let index = TriangleIndex::build(y.positions(), y.mesh().triangles());
        let outer = y.mesh().outer_loops().iter().map(|l| y.image_loop(l)).collect();
        Self { y, index, outer, marker }
    }

    pub fn field(&self) -> &DeformationField {
        self.y
    }

    /// Pre-image of `xi`; on a shared deformed edge the first triangle in
    /// index order is used.
    pub fn invert_point(&self, xi: &Vec2) -> Preimage {
        let mesh = self.y.mesh();
        if let Some((t, l)) = self.index.locate(self.y.positions(), mesh.triangles(), xi, 1e-12) {
            let [a, b, c] = mesh.triangles()[t];
            let v = mesh.vertices();
            return Preimage::Reference { x: v[a] * l[0] + v[b] * l[1] + v[c] * l[2], triangle: t };
        }
        let deg: i32 = self.outer.iter().map(|lp| winding_number_unchecked(lp, xi)).sum();
        if deg != 0 {
            Preimage::Cavity
        } else {
            Preimage::Outside
        }
    }

    /// Pre-image with cavities reported as the marker point.
    pub fn invert_or_marker(&self, xi: &Vec2) -> Option<Vec2> {
        match self.invert_point(xi) {
            Preimage::Reference { x, .. } => Some(x),
            Preimage::Cavity => Some(self.marker),
            Preimage::Outside => None,
        }
    }

    /// `(Dy)^{-1}` on the element containing the pre-image of `xi`.
    pub fn inverse_gradient(&self, xi: &Vec2) -> Result<Mat2> {
        match self.invert_point(xi) {
            Preimage::Reference { triangle, .. } => {
                let f = self.y.element_gradient(triangle);
                f.try_inverse()
                    .ok_or_else(|| Error::Infeasible { triangle, det: f.determinant() })
            }
            Preimage::Cavity => Err(Error::InCavity(*xi)),
            Preimage::Outside => Err(Error::Outside(*xi)),
        }
    }

    /// Raster of the inverse over the bounding box of the deformed outer boundary.
    pub fn rasterize(&self, delta: f64) -> Result<InverseField> {
        if !(delta > 0.0) {
            return Err(Error::Argument(format!("cell size must be positive, got {delta}")));
        }
        let (lo, hi) = geometry_bbox(self.outer.iter().flatten());
        let grid = Grid::covering(lo, hi, delta, 2);
        let values: Vec<Preimage> = (0..grid.len())
            .into_par_iter()
            .map(|id| self.invert_point(&grid.center(id % grid.nx, id / grid.nx)))
            .collect();
        Ok(InverseField { grid, values, marker: self.marker })
    }
}

/// Cell-centered samples of `ŷ^{-1}`.
#[derive(Debug, Clone)]
pub struct InverseField {
    pub grid: Grid,
    pub values: Vec<Preimage>,
    pub marker: Vec2,
}

impl InverseField {
    pub fn cavity_mask(&self) -> Vec<bool> {
        self.values.iter().map(|v| matches!(v, Preimage::Cavity)).collect()
    }

    /// Same cells with a different marker value.
    pub fn with_marker(&self, marker: Vec2) -> Self {
        Self { marker, ..self.clone() }
    }

    /// Rows `xi_x,xi_y,x_ref,y_ref`; cavity cells carry `CAVITY`, outside cells are omitted.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "xi_x,xi_y,x_ref,y_ref")?;
        for (id, v) in self.values.iter().enumerate() {
            let c = self.grid.center(id % self.grid.nx, id / self.grid.nx);
            match v {
                Preimage::Reference { x, .. } => writeln!(out, "{},{},{},{}", c.x, c.y, x.x, x.y)?,
                Preimage::Cavity => writeln!(out, "{},{},CAVITY,CAVITY", c.x, c.y)?,
                Preimage::Outside => {}
            }
        }
        Ok(())
    }
}

/// One closed component of the jump set with per-segment data; segment `i`
/// joins `points[i]` and `points[i + 1]` (cyclically).
#[derive(Debug, Clone)]
pub struct JumpCurve {
    pub points: Vec<Vec2>,
    /// Unit normal pointing out of the cavity.
    pub normals: Vec<Vec2>,
    /// `|a − o|` with `a` the pre-image on the material side.
    pub amplitudes: Vec<f64>,
}

/// Contours of the cavity cells, each oriented counter-clockwise around its cavity.
pub fn extract_jump_set(inv: &InverseField) -> Vec<JumpCurve> {
    let grid = &inv.grid;
    let contours = marching_squares(grid, &inv.cavity_mask());
    contours
        .into_iter()
        .filter(|c| signed_area(c) > 0.0)
        .map(|points| {
            let n = points.len();
            let mut normals = Vec::with_capacity(n);
            let mut amplitudes = Vec::with_capacity(n);
            for i in 0..n {
                let e = points[(i + 1) % n] - points[i];
                let nu = rot_cw(&e).normalize();
                let mid = 0.5 * (points[i] + points[(i + 1) % n]);
                normals.push(nu);
                amplitudes.push(material_side(inv, &mid, &nu).map_or(f64::NAN, |a| (a - inv.marker).norm()));
            }
            JumpCurve { points, normals, amplitudes }
        })
        .collect()
}

/// Nearest reference value on the material side of a jump segment.
fn material_side(inv: &InverseField, mid: &Vec2, nu: &Vec2) -> Option<Vec2> {
    let grid = &inv.grid;
    for k in 1..=4 {
        let p = mid + nu * (0.5 * k as f64 * grid.cell);
        if let Some((i, j)) = grid.cell_of(&p) {
            if let Preimage::Reference { x, .. } = inv.values[grid.index(i, j)] {
                return Some(x);
            }
        }
    }
    None
}

/// Rows `curve,index,x,y,nu_x,nu_y,amplitude`.
pub fn write_jump_set_csv<W: Write>(curves: &[JumpCurve], mut out: W) -> Result<()> {
    writeln!(out, "curve,index,x,y,nu_x,nu_y,amplitude")?;
    for (c, jc) in curves.iter().enumerate() {
        for i in 0..jc.points.len() {
            let p = jc.points[i];
            let nu = jc.normals[i];
            writeln!(out, "{c},{i},{},{},{},{},{}", p.x, p.y, nu.x, nu.y, jc.amplitudes[i])?;
        }
    }
    Ok(())
}

/// Both sides of the area formula for a scalar `f`:
/// `∫_{im_G} f(det Dŷ^{-1}) dξ` by raster quadrature with cell `delta`, and
/// `∫_Ω det(Dy) f(1/det Dy) dx` element by element. Returns
/// `(left, right, relative gap)`.
pub fn area_formula_check(y: &DeformationField, f: &(dyn Fn(f64) -> f64 + Sync), delta: f64) -> Result<(f64, f64, f64)> {
    let mesh = y.mesh();
    let dets: Vec<f64> = (0..mesh.num_triangles()).map(|t| y.element_gradient(t).determinant()).collect();
    if let Some((t, d)) = dets.iter().enumerate().find(|(_, d)| !(**d > 0.0)) {
        return Err(Error::Infeasible { triangle: t, det: *d });
    }
    let right: Vec<f64> = dets.iter().enumerate().map(|(t, &h)| mesh.area(t) * h * f(1.0 / h)).collect();
    let right = pairwise_sum(&right);
    let inv = InverseMap::new(y).rasterize(delta)?;
    let left: Vec<f64> = inv
        .values
        .iter()
        .map(|v| match v {
            Preimage::Reference { triangle, .. } => f(1.0 / dets[*triangle]),
            _ => 0.0,
        })
        .collect();
    let left = pairwise_sum(&left) * inv.grid.cell_area();
    let gap = (left - right).abs() / right.abs().max(f64::MIN_POSITIVE);
    Ok((left, right, gap))
}
