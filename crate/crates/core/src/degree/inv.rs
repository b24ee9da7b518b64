use rayon::prelude::*;

use crate::contour::Grid;
use crate::geometry::DeformationField;
use crate::numeric::TriangleRule;
use crate::{geometry_bbox, Result, Vec2};

use super::{adaptive_trace, DegreeRaster};

/// Failure of one sample in an (INV) check.
#[derive(Debug, Clone, Copy)]
pub struct InvViolation {
    pub center: usize,
    pub radius: f64,
    pub x: Vec2,
    pub yx: Vec2,
    /// `true` when `x` lies in the ball but `y(x)` is outside its topological image.
    pub interior: bool,
}

/// Counts for one circle `S(center, radius)`.
#[derive(Debug, Clone, Copy)]
pub struct InvEntry {
    pub center: usize,
    pub radius: f64,
    pub interior_checked: usize,
    pub exterior_checked: usize,
    pub in_band: usize,
    pub interior_violations: usize,
    pub exterior_violations: usize,
}

#[derive(Debug, Clone, Default)]
pub struct InvReport {
    pub entries: Vec<InvEntry>,
    /// First violating samples (at most [`InvReport::MAX_EXAMPLES`]).
    pub examples: Vec<InvViolation>,
    /// Circles that could not be traced, with the reason.
    pub skipped: Vec<(usize, f64, String)>,
}

impl InvReport {
    pub const MAX_EXAMPLES: usize = 64;

    pub fn violations(&self) -> usize {
        self.entries
            .iter()
            .map(|e| e.interior_violations + e.exterior_violations)
            .sum()
    }

    pub fn pass(&self) -> bool {
        self.violations() == 0
    }
}

/// Reference sample points: centroids, then interior points of a degree-2
/// rule when the budget allows, strided down to `budget` points.
fn samples(y: &DeformationField, budget: usize) -> Vec<(Vec2, Vec2)> {
    let mesh = y.mesh();
    let nt = mesh.num_triangles();
    let rule = TriangleRule::with_order(2);
    let per = if nt * (1 + rule.points.len()) <= budget { 1 + rule.points.len() } else { 1 };
    let stride = (nt * per).div_ceil(budget.max(1)).max(1);
    let mut out = Vec::with_capacity(nt * per / stride + 1);
    let mut k = 0usize;
    for t in 0..nt {
        let [a, b, c] = mesh.triangles()[t];
        let vs = [mesh.vertices()[a], mesh.vertices()[b], mesh.vertices()[c]];
        let ys = [y.positions()[a], y.positions()[b], y.positions()[c]];
        let mut push = |l: [f64; 3]| {
            if k.is_multiple_of(stride) {
                out.push((
                    vs[0] * l[0] + vs[1] * l[1] + vs[2] * l[2],
                    ys[0] * l[0] + ys[1] * l[1] + ys[2] * l[2],
                ));
            }
            k += 1;
        };
        push([1.0 / 3.0; 3]);
        if per > 1 {
            for l in &rule.points {
                push(*l);
            }
        }
    }
    out
}

/// Cells whose center lies within `band` of some loop segment.
fn band_mask(grid: &Grid, lp: &[Vec2], band: f64) -> Vec<bool> {
    let mut mask = vec![false; grid.len()];
    let n = lp.len();
    for k in 0..n {
        let p = lp[k];
        let q = lp[(k + 1) % n];
        let lo = p.inf(&q) - Vec2::repeat(band);
        let hi = p.sup(&q) + Vec2::repeat(band);
        let i0 = ((lo.x - grid.origin.x) / grid.cell).floor().max(0.0) as usize;
        let j0 = ((lo.y - grid.origin.y) / grid.cell).floor().max(0.0) as usize;
        let i1 = (((hi.x - grid.origin.x) / grid.cell).ceil() as usize).min(grid.nx - 1);
        let j1 = (((hi.y - grid.origin.y) / grid.cell).ceil() as usize).min(grid.ny - 1);
        for j in j0..=j1 {
            for i in i0..=i1 {
                let c = grid.center(i, j);
                if crate::polygon::point_segment_distance(&c, &p, &q) <= band {
                    mask[grid.index(i, j)] = true;
                }
            }
        }
    }
    mask
}

/// Checks (INV) on sampled points: for each circle `S(a, r)`, points of the
/// ball must map into `im_T(y, B(a, r))` and points outside it must map
/// outside. Samples whose image is within `2δ` of the trace are not judged.
pub fn check_inv(
    y: &DeformationField,
    centers: &[Vec2],
    radii: &[Vec<f64>],
    budget: usize,
    delta: f64,
) -> Result<InvReport> {
    if centers.len() != radii.len() {
        return Err(crate::Error::Argument(format!(
            "{} centers but {} radius lists",
            centers.len(),
            radii.len()
        )));
    }
    let pts = samples(y, budget);
    let mut report = InvReport::default();
    for (ci, (a, rs)) in centers.iter().zip(radii).enumerate() {
        for &r in rs {
            let tr = match adaptive_trace(y, a, r, delta) {
                Ok(t) => t,
                Err(e) => {
                    report.skipped.push((ci, r, e.to_string()));
                    continue;
                }
            };
            let (lo, hi) = geometry_bbox(tr.iter());
            let grid = Grid::covering(lo, hi, delta, 4);
            // band radius padded by half a cell diagonal so unmasked cells lie
            // entirely in one complementary component
            let band = band_mask(&grid, &tr, 2.0 * delta + 0.75 * delta);
            let raster = DegreeRaster::on_grid(vec![tr], grid);
            let judged: Vec<(bool, bool, Option<bool>)> = pts
                .par_iter()
                .map(|(x, yx)| {
                    let inside = (x - a).norm() < r;
                    let (deg, near) = match grid.cell_of(yx) {
                        Some((i, j)) => {
                            let id = grid.index(i, j);
                            (raster.values[id], band[id])
                        }
                        None => (0, false),
                    };
                    if near {
                        (inside, true, None)
                    } else {
                        (inside, false, Some(if inside { deg == 0 } else { deg != 0 }))
                    }
                })
                .collect();
            let mut e = InvEntry {
                center: ci,
                radius: r,
                interior_checked: 0,
                exterior_checked: 0,
                in_band: 0,
                interior_violations: 0,
                exterior_violations: 0,
            };
            for (k, (inside, near, bad)) in judged.into_iter().enumerate() {
                if near {
                    e.in_band += 1;
                    continue;
                }
                if inside {
                    e.interior_checked += 1;
                } else {
                    e.exterior_checked += 1;
                }
                if bad == Some(true) {
                    if inside {
                        e.interior_violations += 1;
                    } else {
                        e.exterior_violations += 1;
                    }
                    if report.examples.len() < InvReport::MAX_EXAMPLES {
                        report.examples.push(InvViolation {
                            center: ci,
                            radius: r,
                            x: pts[k].0,
                            yx: pts[k].1,
                            interior: inside,
                        });
                    }
                }
            }
            report.entries.push(e);
        }
    }
    Ok(report)
}

/// `count` geometrically spaced radii from `1.5ρ` (or four mesh sizes) up to
/// 90% of the clearance of `a`, largest first.
pub fn default_inv_radii(y: &DeformationField, a: &Vec2, count: usize) -> Vec<f64> {
    let mesh = y.mesh();
    let outer = mesh
        .outer_loops()
        .iter()
        .map(|l| {
            let pts: Vec<Vec2> = l.iter().map(|&v| mesh.vertices()[v]).collect();
            crate::polygon::distance_to_loop(a, &pts)
        })
        .fold(f64::INFINITY, f64::min);
    let mut hi = 0.9 * outer;
    let mut lo = 4.0 * mesh.mesh_size();
    for p in mesh.punctures() {
        let d = (p.center - a).norm();
        if d < 1e-12 {
            lo = 2.0 * p.radius;
        } else {
            hi = hi.min(d - 2.0 * p.radius);
        }
    }
    let lo = lo.min(0.5 * hi);
    if count <= 1 {
        return vec![hi];
    }
    (0..count)
        .map(|i| hi * (lo / hi).powf(i as f64 / (count - 1) as f64))
        .collect()
}
