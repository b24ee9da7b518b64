use crate::contour::Grid;
use crate::geometry::DeformationField;
use crate::polygon::{perimeter, signed_area};
use crate::{geometry_bbox, Error, Result, Vec2};

use super::DegreeRaster;

/// Region whose boundary trace generates a degree raster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Subdomain {
    /// Ball `B(center, radius)`; the trace is sampled on its circle.
    Disk { center: Vec2, radius: f64 },
    /// Whole domain including the punctures: outer boundary loops only.
    Outer,
    /// Meshed material region: outer loops together with the puncture loops.
    Domain,
}

const MIN_TRACE: usize = 256;
const MAX_TRACE: usize = 8192;

/// Trace of `y` on `S(center, r)` with about two samples per cell of size
/// `delta` along the image curve.
pub fn adaptive_trace(y: &DeformationField, center: &Vec2, r: f64, delta: f64) -> Result<Vec<Vec2>> {
    let coarse = y.trace_on_circle(center, r, MIN_TRACE)?;
    let want = (2.0 * perimeter(&coarse) / delta).ceil() as usize;
    let m = want.clamp(MIN_TRACE, MAX_TRACE);
    if m == MIN_TRACE {
        Ok(coarse)
    } else {
        y.trace_on_circle(center, r, m)
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Argument(format!("cell size must be positive, got {delta}")));
    }
    Ok(())
}

/// Raster of `deg(y*, U, ·)`.
pub fn topological_image(y: &DeformationField, u: &Subdomain, delta: f64) -> Result<DegreeRaster> {
    check_delta(delta)?;
    let loops = match *u {
        Subdomain::Disk { center, radius } => vec![adaptive_trace(y, &center, radius, delta)?],
        Subdomain::Outer => y.mesh().outer_loops().iter().map(|l| y.image_loop(l)).collect(),
        Subdomain::Domain => y.boundary_images(),
    };
    Ok(DegreeRaster::from_loops(loops, delta))
}

/// Cavity opened at a point, as recovered from degree rasters.
#[derive(Debug, Clone)]
pub struct CavityRecord {
    pub site: Vec2,
    /// Radius of the puncture at `site` (0 when the site is not punctured).
    pub puncture_radius: f64,
    /// Counter-clockwise contour of the cavity cells.
    pub boundary: Vec<Vec2>,
    /// Area extrapolated to vanishing ball radius.
    pub area: f64,
    /// Area of the rasterized intersection over all radii.
    pub raw_area: f64,
    /// Filled in by the energy module; zero here.
    pub aniso_perimeter: f64,
    pub simple: bool,
    /// `(r, area of im_T(y, B(a, r)))` for each radius, largest first.
    pub area_by_radius: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
pub struct PointImageOptions {
    /// Minimum extrapolated area for a point to count as a cavitation point,
    /// in units of `δ²`.
    pub threshold_cells: f64,
}

impl Default for PointImageOptions {
    fn default() -> Self {
        Self { threshold_cells: 4.0 }
    }
}

/// `count` geometrically spaced radii about `a`, largest first, that stay
/// clear of the outer boundary and of every puncture circle.
pub fn default_radii(y: &DeformationField, a: &Vec2, count: usize) -> Vec<f64> {
    let mesh = y.mesh();
    let own = mesh.punctures().iter().find(|p| (p.center - a).norm() < 1e-12);
    let outer = mesh
        .outer_loops()
        .iter()
        .map(|l| {
            let pts: Vec<Vec2> = l.iter().map(|&v| mesh.vertices()[v]).collect();
            crate::polygon::distance_to_loop(a, &pts)
        })
        .fold(f64::INFINITY, f64::min);
    let others = mesh
        .punctures()
        .iter()
        .filter(|p| (p.center - a).norm() >= 1e-12)
        .map(|p| (p.center - a).norm() - 2.0 * p.radius)
        .fold(f64::INFINITY, f64::min);
    let hi = 0.9 * outer.min(others);
    let lo = match own {
        Some(p) => (2.0 * p.radius).min(0.5 * hi),
        None => (4.0 * mesh.mesh_size()).min(0.25 * hi),
    };
    let hi = hi.min(lo * 8.0);
    if count <= 1 {
        return vec![hi];
    }
    (0..count)
        .map(|i| hi * (lo / hi).powf(i as f64 / (count - 1) as f64))
        .collect()
}

/// `im_T(y, a)` approximated by intersecting rasterized images of `B(a, r)`
/// over `radii`. Returns `None` when the extrapolated area is at most the
/// threshold.
pub fn topological_image_point(
    y: &DeformationField,
    a: &Vec2,
    radii: &[f64],
    delta: f64,
    opts: &PointImageOptions,
) -> Result<Option<CavityRecord>> {
    check_delta(delta)?;
    if radii.is_empty() {
        return Err(Error::Argument("radii list is empty".into()));
    }
    let mut radii = radii.to_vec();
    radii.sort_by(|p, q| q.partial_cmp(p).unwrap());
    let traces: Vec<Vec<Vec2>> = radii
        .iter()
        .map(|&r| adaptive_trace(y, a, r, delta))
        .collect::<Result<_>>()?;
    let (lo, hi) = geometry_bbox(traces.iter().flatten());
    let grid = Grid::covering(lo, hi, delta, 2);

    let mut inter = vec![true; grid.len()];
    let mut area_by_radius = Vec::with_capacity(radii.len());
    for (r, tr) in radii.iter().zip(&traces) {
        let raster = DegreeRaster::on_grid(vec![tr.clone()], grid);
        for (m, v) in inter.iter_mut().zip(&raster.values) {
            *m &= *v != 0;
        }
        area_by_radius.push((*r, signed_area(tr).abs()));
    }
    let raw_area = inter.iter().filter(|&&m| m).count() as f64 * grid.cell_area();
    let area = extrapolate_to_zero(&area_by_radius).max(0.0);
    if area <= opts.threshold_cells * grid.cell_area() {
        return Ok(None);
    }

    // Cavity cells: inside every ball image but outside the material image of
    // the smallest ball (whose boundary also contains the enclosed puncture loops).
    let r_min = *radii.last().unwrap();
    let mesh = y.mesh();
    let mut material = vec![traces.last().unwrap().clone()];
    let mut puncture_radius = 0.0;
    for (k, p) in mesh.punctures().iter().enumerate() {
        let d = (p.center - a).norm();
        if d < r_min {
            material.push(y.image_loop(mesh.puncture_loop(k)));
        }
        if d < 1e-12 {
            puncture_radius = p.radius;
        }
    }
    let mat = DegreeRaster::on_grid(material, grid);
    let cavity: Vec<bool> = inter.iter().zip(&mat.values).map(|(&m, &v)| m && v == 0).collect();
    let mut contours = crate::contour::marching_squares(&grid, &cavity);
    if contours.is_empty() {
        contours = crate::contour::marching_squares(&grid, &inter);
    }
    let boundary = contours
        .into_iter()
        .max_by(|p, q| signed_area(p).partial_cmp(&signed_area(q)).unwrap())
        .unwrap_or_default();
    let simple = crate::polygon::is_simple(&boundary);
    Ok(Some(CavityRecord {
        site: *a,
        puncture_radius,
        boundary,
        area,
        raw_area,
        aniso_perimeter: 0.0,
        simple,
        area_by_radius,
    }))
}

/// Least-squares line through `(r², A)` evaluated at `r = 0`.
fn extrapolate_to_zero(samples: &[(f64, f64)]) -> f64 {
    if samples.len() == 1 {
        return samples[0].1;
    }
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0 * s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxy: f64 = samples.iter().map(|s| (s.0 * s.0 - mx) * (s.1 - my)).sum();
    let sxx: f64 = samples.iter().map(|s| (s.0 * s.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return my;
    }
    my - sxy / sxx * mx
}
