//! Mesh generators for the supported reference domains.

use std::f64::consts::TAU;

use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use super::mesh::{BoundaryTag, Mesh, Puncture};
use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainShape {
    /// Disk of the given radius centered at the origin.
    Disk { radius: f64 },
    /// Square of the given side centered at the origin.
    Square { side: f64 },
    /// Annulus centered at the origin; the inner loop is a free boundary.
    Annulus { inner: f64, outer: f64 },
}

impl DomainShape {
    /// Radius of the largest disk centered at the origin inside the domain.
    pub fn inradius(&self) -> f64 {
        match *self {
            Self::Disk { radius } => radius,
            Self::Square { side } => 0.5 * side,
            Self::Annulus { inner, outer } => 0.5 * (outer - inner),
        }
    }

    /// Signed distance from `x` to the outer boundary (positive inside).
    pub fn depth(&self, x: &Vec2) -> f64 {
        match *self {
            Self::Disk { radius } => radius - x.norm(),
            Self::Square { side } => 0.5 * side - x.x.abs().max(x.y.abs()),
            Self::Annulus { inner, outer } => (outer - x.norm()).min(x.norm() - inner),
        }
    }
}

/// Everything needed to mesh a reference domain.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpec {
    pub shape: DomainShape,
    /// Target edge length.
    pub h: f64,
    pub punctures: Vec<Puncture>,
    /// Tag of the outer boundary (`Dirichlet` makes it `Γ`).
    pub outer_tag: BoundaryTag,
    /// Prefer a structured mesh when the geometry allows one.
    pub structured: bool,
}

impl MeshSpec {
    pub fn build(&self) -> Result<Mesh> {
        if !(self.h > 0.0) {
            return Err(Error::Config(format!("mesh size h must be positive, got {}", self.h)));
        }
        let inr = self.shape.inradius();
        for (k, p) in self.punctures.iter().enumerate() {
            if !(p.radius > 0.0) || p.radius >= inr / 4.0 {
                return Err(Error::Config(format!(
                    "puncture {k} radius {} must be positive and below inradius/4 = {}",
                    p.radius,
                    inr / 4.0
                )));
            }
            if self.shape.depth(&p.center) < 4.0 * p.radius {
                return Err(Error::Config(format!(
                    "puncture {k} at ({}, {}) is too close to the outer boundary",
                    p.center.x, p.center.y
                )));
            }
            for (j, q) in self.punctures.iter().enumerate().take(k) {
                if (p.center - q.center).norm() < 4.0 * (p.radius + q.radius) {
                    return Err(Error::Config(format!("punctures {j} and {k} overlap")));
                }
            }
        }
        let centered = self.punctures.len() == 1 && self.punctures[0].center.norm() < 1e-14;
        match (self.shape, self.structured) {
            (DomainShape::Disk { radius }, true) if self.punctures.is_empty() => {
                disk(radius, (radius / self.h).ceil().max(1.0) as usize, self.outer_tag)
            }
            (DomainShape::Disk { radius }, true) if centered => {
                let rho = self.punctures[0].radius;
                let sectors = sectors_for(radius, self.h);
                let rings = rings_for(rho, radius, sectors);
                annulus(rho, radius, rings, sectors, BoundaryTag::Puncture(0), self.outer_tag, self.punctures.clone())
            }
            (DomainShape::Square { side }, true) if self.punctures.is_empty() => {
                unit_square_scaled(side, (side / self.h).ceil().max(1.0) as usize, self.outer_tag)
            }
            (DomainShape::Annulus { inner, outer }, _) if self.punctures.is_empty() => {
                let sectors = sectors_for(outer, self.h);
                let rings = rings_for(inner, outer, sectors);
                annulus(inner, outer, rings, sectors, BoundaryTag::Free, self.outer_tag, vec![])
            }
            (DomainShape::Annulus { .. }, _) => Err(Error::Config(
                "punctures are not supported on annulus domains".into(),
            )),
            _ => delaunay_domain(self.shape, &self.punctures, self.h, self.outer_tag),
        }
    }
}

fn sectors_for(radius: f64, h: f64) -> usize {
    let n = (TAU * radius / h).ceil() as usize;
    (n.div_ceil(4) * 4).max(16)
}

fn rings_for(inner: f64, outer: f64, sectors: usize) -> usize {
    let q = 1.0 + TAU / sectors as f64;
    ((outer / inner).ln() / q.ln()).ceil().max(1.0) as usize
}

/// Structured mesh of the square `[-1/2, 1/2]²` with `n × n` cells.
pub fn unit_square(n: usize, outer_tag: BoundaryTag) -> Result<Mesh> {
    unit_square_scaled(1.0, n, outer_tag)
}

fn unit_square_scaled(side: f64, n: usize, outer_tag: BoundaryTag) -> Result<Mesh> {
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Vec2::new(
                side * (i as f64 / n as f64 - 0.5),
                side * (j as f64 / n as f64 - 0.5),
            ));
        }
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v11, v01) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            } else {
                triangles.push([v00, v10, v01]);
                triangles.push([v10, v11, v01]);
            }
        }
    }
    let mut boundary = Vec::new();
    for k in 0..n {
        boundary.push(([id(k, 0), id(k + 1, 0)], outer_tag));
        boundary.push(([id(n, k), id(n, k + 1)], outer_tag));
        boundary.push(([id(k + 1, n), id(k, n)], outer_tag));
        boundary.push(([id(0, k + 1), id(0, k)], outer_tag));
    }
    Mesh::new(vertices, triangles, boundary, vec![])
}

/// Structured disk of the given radius: a center vertex and `rings` rings
/// with `6k` vertices on ring `k`.
pub fn disk(radius: f64, rings: usize, outer_tag: BoundaryTag) -> Result<Mesh> {
    let mut vertices = vec![Vec2::zeros()];
    let mut ring_ids: Vec<Vec<usize>> = vec![vec![0]];
    for k in 1..=rings {
        let r = radius * k as f64 / rings as f64;
        let n = 6 * k;
        let ids: Vec<usize> = (0..n)
            .map(|j| {
                let t = TAU * j as f64 / n as f64;
                vertices.push(r * Vec2::new(t.cos(), t.sin()));
                vertices.len() - 1
            })
            .collect();
        ring_ids.push(ids);
    }
    let mut triangles = Vec::new();
    let first = &ring_ids[1];
    for j in 0..first.len() {
        triangles.push([0, first[j], first[(j + 1) % first.len()]]);
    }
    for k in 1..rings {
        stitch(&ring_ids[k], &ring_ids[k + 1], &mut triangles);
    }
    let outer = &ring_ids[rings];
    let boundary = (0..outer.len())
        .map(|j| ([outer[j], outer[(j + 1) % outer.len()]], outer_tag))
        .collect();
    Mesh::new(vertices, triangles, boundary, vec![])
}

/// Triangulate the strip between two concentric counter-clockwise rings whose
/// first vertices sit at angle 0.
fn stitch(inner: &[usize], outer: &[usize], triangles: &mut Vec<[usize; 3]>) {
    let (na, nb) = (inner.len(), outer.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < na || j < nb {
        let advance_inner = if i == na {
            false
        } else if j == nb {
            true
        } else {
            // compare angles of the next vertices: (i+1)/na vs (j+1)/nb
            ((i + 1) * nb) < ((j + 1) * na)
        };
        if advance_inner {
            triangles.push([inner[i % na], outer[j % nb], inner[(i + 1) % na]]);
            i += 1;
        } else {
            triangles.push([inner[i % na], outer[j % nb], outer[(j + 1) % nb]]);
            j += 1;
        }
    }
}

/// Structured annulus with geometrically graded rings and `sectors` vertices
/// per ring. The inner loop gets `inner_tag`, the outer loop `outer_tag`.
pub fn annulus(
    inner: f64,
    outer: f64,
    rings: usize,
    sectors: usize,
    inner_tag: BoundaryTag,
    outer_tag: BoundaryTag,
    punctures: Vec<Puncture>,
) -> Result<Mesh> {
    if !(inner > 0.0 && outer > inner) {
        return Err(Error::Config(format!("annulus radii {inner}, {outer} are invalid")));
    }
    let ratio = outer / inner;
    let mut vertices = Vec::with_capacity((rings + 1) * sectors);
    for i in 0..=rings {
        let r = if i == rings {
            outer
        } else {
            inner * ratio.powf(i as f64 / rings as f64)
        };
        for j in 0..sectors {
            let t = TAU * j as f64 / sectors as f64;
            vertices.push(r * Vec2::new(t.cos(), t.sin()));
        }
    }
    let id = |i: usize, j: usize| i * sectors + (j % sectors);
    let mut triangles = Vec::with_capacity(2 * rings * sectors);
    for i in 0..rings {
        for j in 0..sectors {
            let (a0, a1, b0, b1) = (id(i, j), id(i, j + 1), id(i + 1, j), id(i + 1, j + 1));
            if (i + j) % 2 == 0 {
                triangles.push([a0, b0, b1]);
                triangles.push([a0, b1, a1]);
            } else {
                triangles.push([a0, b0, a1]);
                triangles.push([a1, b0, b1]);
            }
        }
    }
    let mut boundary = Vec::with_capacity(2 * sectors);
    for j in 0..sectors {
        boundary.push(([id(0, j + 1), id(0, j)], inner_tag));
        boundary.push(([id(rings, j), id(rings, j + 1)], outer_tag));
    }
    Mesh::new(vertices, triangles, boundary, punctures)
}

/// Constrained Delaunay mesh of a disk or square with arbitrary punctures.
/// Each puncture gets a graded fan of rings so that elements near the hole
/// are comparable to its circumference divided by the loop resolution.
pub fn delaunay_domain(
    shape: DomainShape,
    punctures: &[Puncture],
    h: f64,
    outer_tag: BoundaryTag,
) -> Result<Mesh> {
    let mut points: Vec<Vec2> = Vec::new();
    let mut outer_ids = Vec::new();
    match shape {
        DomainShape::Disk { radius } => {
            let n = sectors_for(radius, h);
            for j in 0..n {
                let t = TAU * j as f64 / n as f64;
                outer_ids.push(points.len());
                points.push(radius * Vec2::new(t.cos(), t.sin()));
            }
        }
        DomainShape::Square { side } => {
            let n = (side / h).ceil().max(1.0) as usize;
            let s = 0.5 * side;
            let corners = [Vec2::new(-s, -s), Vec2::new(s, -s), Vec2::new(s, s), Vec2::new(-s, s)];
            for c in 0..4 {
                let (p, q) = (corners[c], corners[(c + 1) % 4]);
                for k in 0..n {
                    outer_ids.push(points.len());
                    points.push(p + (q - p) * (k as f64 / n as f64));
                }
            }
        }
        DomainShape::Annulus { .. } => {
            return Err(Error::Config("unstructured annulus meshing is not supported".into()))
        }
    }
    let mut puncture_ids = Vec::new();
    let mut exclusion = Vec::new();
    for p in punctures {
        let n = sectors_for(p.radius, h).max(32);
        let q = 1.0 + TAU / n as f64;
        let mut ids = Vec::new();
        let mut r = p.radius;
        let mut ring = 0;
        loop {
            let spacing = TAU * r / n as f64;
            if ring > 0 && (spacing > h || shape.depth(&p.center) - r < 1.5 * h) {
                break;
            }
            let offset = if ring % 2 == 0 { 0.0 } else { 0.5 };
            for j in 0..n {
                let t = TAU * (j as f64 + offset) / n as f64;
                if ring == 0 {
                    ids.push(points.len());
                }
                points.push(p.center + r * Vec2::new(t.cos(), t.sin()));
            }
            ring += 1;
            r *= q;
        }
        exclusion.push((p.center, r / q + 0.6 * h));
        puncture_ids.push(ids);
    }
    // hexagonal lattice in the interior
    let (lo, hi) = match shape {
        DomainShape::Disk { radius } => (-radius, radius),
        DomainShape::Square { side } => (-0.5 * side, 0.5 * side),
        DomainShape::Annulus { .. } => unreachable!(),
    };
    let dy = h * 3f64.sqrt() / 2.0;
    let mut row = 0;
    let mut y = lo + 0.5 * dy;
    while y < hi {
        let shift = if row % 2 == 0 { 0.0 } else { 0.5 * h };
        let mut x = lo + shift + 0.25 * h;
        while x < hi {
            let pt = Vec2::new(x, y);
            let inside = shape.depth(&pt) > 0.6 * h;
            let clear = exclusion.iter().all(|(c, r)| (pt - c).norm() > *r);
            if inside && clear {
                points.push(pt);
            }
            x += h;
        }
        y += dy;
        row += 1;
    }

    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let mut handles = Vec::with_capacity(points.len());
    for p in &points {
        let hnd = cdt
            .insert(Point2::new(p.x, p.y))
            .map_err(|e| Error::Mesh(format!("Delaunay insertion failed: {e:?}")))?;
        handles.push(hnd);
    }
    let add_loop = |cdt: &mut ConstrainedDelaunayTriangulation<Point2<f64>>, ids: &[usize]| {
        for j in 0..ids.len() {
            cdt.add_constraint(handles[ids[j]], handles[ids[(j + 1) % ids.len()]]);
        }
    };
    add_loop(&mut cdt, &outer_ids);
    for ids in &puncture_ids {
        add_loop(&mut cdt, ids);
    }

    let vertices: Vec<Vec2> = cdt
        .vertices()
        .map(|v| Vec2::new(v.position().x, v.position().y))
        .collect();
    let mut triangles = Vec::new();
    for f in cdt.inner_faces() {
        let vs = f.vertices();
        let tri = [vs[0].fix().index(), vs[1].fix().index(), vs[2].fix().index()];
        let c = (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
        if shape.depth(&c) <= 0.0 {
            continue;
        }
        if punctures.iter().any(|p| (c - p.center).norm() < p.radius) {
            continue;
        }
        triangles.push(tri);
    }
    let mut boundary = Vec::new();
    let loop_edges = |ids: &[usize], tag: BoundaryTag, out: &mut Vec<([usize; 2], BoundaryTag)>| {
        for j in 0..ids.len() {
            out.push(([handles[ids[j]].index(), handles[ids[(j + 1) % ids.len()]].index()], tag));
        }
    };
    loop_edges(&outer_ids, outer_tag, &mut boundary);
    for (k, ids) in puncture_ids.iter().enumerate() {
        loop_edges(ids, BoundaryTag::Puncture(k), &mut boundary);
    }
    Mesh::new(vertices, triangles, boundary, punctures.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structured_square_has_unit_area() {
        let m = unit_square(8, BoundaryTag::Dirichlet).unwrap();
        assert!((m.total_area() - 1.0).abs() < 1e-14);
        assert_eq!(m.num_triangles(), 128);
    }

    #[test]
    fn structured_disk_area_converges() {
        let m = disk(1.0, 16, BoundaryTag::Dirichlet).unwrap();
        let n = 96.0;
        let polygon = 0.5 * n * (TAU / n).sin();
        assert!((m.total_area() - polygon).abs() < 1e-12);
    }

    #[test]
    fn punctured_disk_structured() {
        let spec = MeshSpec {
            shape: DomainShape::Disk { radius: 1.0 },
            h: 0.1,
            punctures: vec![Puncture { center: Vec2::zeros(), radius: 0.05 }],
            outer_tag: BoundaryTag::Dirichlet,
            structured: true,
        };
        let m = spec.build().unwrap();
        assert_eq!(m.outer_loops().len(), 1);
        assert_eq!(m.puncture_loop(0).len(), 64);
        let lp = m.puncture_loop(0);
        let pts: Vec<Vec2> = lp.iter().map(|&v| m.vertices()[v]).collect();
        assert!(crate::polygon::signed_area(&pts) < 0.0, "puncture loop runs clockwise");
    }

    #[test]
    fn delaunay_with_two_punctures() {
        let spec = MeshSpec {
            shape: DomainShape::Square { side: 2.0 },
            h: 0.1,
            punctures: vec![
                Puncture { center: Vec2::new(-0.4, 0.0), radius: 0.04 },
                Puncture { center: Vec2::new(0.45, 0.1), radius: 0.05 },
            ],
            outer_tag: BoundaryTag::Dirichlet,
            structured: true,
        };
        let m = spec.build().unwrap();
        let holes: f64 = (0..2)
            .map(|k| {
                let pts: Vec<Vec2> = m.puncture_loop(k).iter().map(|&v| m.vertices()[v]).collect();
                -crate::polygon::signed_area(&pts)
            })
            .sum();
        assert!((m.total_area() + holes - 4.0).abs() < 1e-9);
    }

    #[test]
    fn oversized_puncture_is_rejected() {
        let spec = MeshSpec {
            shape: DomainShape::Disk { radius: 1.0 },
            h: 0.1,
            punctures: vec![Puncture { center: Vec2::zeros(), radius: 0.3 }],
            outer_tag: BoundaryTag::Dirichlet,
            structured: true,
        };
        assert!(matches!(spec.build(), Err(Error::Config(_))));
    }
}
