//! Topological degree of piecewise-affine boundary traces.
//!
//! In two dimensions the degree of `y*` on a domain `U` at a point `ξ` is
//! the winding number of the closed curve `y*(∂U)` around `ξ`. Rasters of the
//! degree give the topological image `im_T(y, U)` (cells with nonzero degree),
//! and intersecting the images of shrinking balls gives the cavity opened at
//! a point.

mod image;
mod inv;

use std::io::Write;

pub use image::{
    adaptive_trace, default_radii, topological_image, topological_image_point, CavityRecord,
    PointImageOptions, Subdomain,
};
pub use inv::{check_inv, default_inv_radii, InvEntry, InvReport, InvViolation};

use crate::contour::{marching_squares, Grid};
use crate::polygon::point_segment_distance;
use crate::{Error, Result, Vec2};

/// Minimum distance from a query point to the loop for the winding number to be defined.
pub const ON_LOOP_TOL: f64 = 1e-12;

/// Winding number of the closed polyline `lp` around `xi`, by signed crossings
/// of the ray from `xi` towards `+x`.
pub fn winding_number(lp: &[Vec2], xi: &Vec2) -> Result<i32> {
    let n = lp.len();
    for i in 0..n {
        if point_segment_distance(xi, &lp[i], &lp[(i + 1) % n]) <= ON_LOOP_TOL {
            return Err(Error::OnBoundary(*xi));
        }
    }
    Ok(winding_number_unchecked(lp, xi))
}

/// Ray-crossing winding number without the on-loop test.
pub fn winding_number_unchecked(lp: &[Vec2], xi: &Vec2) -> i32 {
    let n = lp.len();
    let mut w = 0;
    for i in 0..n {
        let p = lp[i];
        let q = lp[(i + 1) % n];
        let side = (q.x - p.x) * (xi.y - p.y) - (xi.x - p.x) * (q.y - p.y);
        if p.y <= xi.y {
            if q.y > xi.y && side > 0.0 {
                w += 1;
            }
        } else if q.y <= xi.y && side < 0.0 {
            w -= 1;
        }
    }
    w
}

/// Integer degree per raster cell for the union of `loops`.
#[derive(Debug, Clone)]
pub struct DegreeRaster {
    pub grid: Grid,
    pub values: Vec<i32>,
    pub loops: Vec<Vec<Vec2>>,
    /// Set when some loop comes closer to itself than one cell.
    pub under_resolved: bool,
}

impl DegreeRaster {
    /// Rasterize the summed winding number of `loops` on a grid of cell size
    /// `delta` covering their bounding box with a two-cell margin.
    pub fn from_loops(loops: Vec<Vec<Vec2>>, delta: f64) -> Self {
        let (lo, hi) = crate::geometry_bbox(loops.iter().flatten());
        let grid = Grid::covering(lo, hi, delta, 2);
        Self::on_grid(loops, grid)
    }

    /// Rasterize on a given grid (scanline evaluation of the same half-open
    /// crossing rule as [`winding_number`]).
    pub fn on_grid(loops: Vec<Vec<Vec2>>, grid: Grid) -> Self {
        let values = scanline_degree(&loops, &grid);
        let under_resolved = loops.iter().any(|lp| {
            let step = (lp.len() / 1024).max(1);
            let coarse: Vec<Vec2> = lp.iter().step_by(step).copied().collect();
            coarse.len() > 3 && crate::polygon::self_distance(&coarse) < grid.cell
        });
        static WARNED: std::sync::Once = std::sync::Once::new();
        if under_resolved {
            log::debug!("raster under-resolved at cell {:.3e}", grid.cell);
            WARNED.call_once(|| log::warn!(
                "raster under-resolved: a boundary image comes within one cell ({:.3e}) of itself; use a smaller cell size",
                grid.cell
            ));
        }
        Self {
            grid,
            values,
            loops,
            under_resolved,
        }
    }

    pub fn value(&self, i: usize, j: usize) -> i32 {
        self.values[self.grid.index(i, j)]
    }

    /// Degree at the cell nearest to `x` (0 off the grid).
    pub fn value_at(&self, x: &Vec2) -> i32 {
        self.grid.cell_of(x).map_or(0, |(i, j)| self.value(i, j))
    }

    pub fn nonzero_mask(&self) -> Vec<bool> {
        self.values.iter().map(|&v| v != 0).collect()
    }

    /// `(number of nonzero cells) · δ²`, the area of the topological image.
    pub fn area(&self) -> f64 {
        self.values.iter().filter(|&&v| v != 0).count() as f64 * self.grid.cell_area()
    }

    /// `Σ deg · δ²`.
    pub fn degree_integral(&self) -> f64 {
        self.values.iter().map(|&v| v as f64).sum::<f64>() * self.grid.cell_area()
    }

    /// Marching-squares contours of the nonzero set.
    pub fn contours(&self) -> Vec<Vec<Vec2>> {
        marching_squares(&self.grid, &self.nonzero_mask())
    }

    /// Portable greymap (`P2`) with values offset by +8 and clamped to `[0, 16]`,
    /// top row first.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "P2")?;
        writeln!(
            out,
            "# origin {} {} cell {}",
            self.grid.origin.x, self.grid.origin.y, self.grid.cell
        )?;
        writeln!(out, "{} {}", self.grid.nx, self.grid.ny)?;
        writeln!(out, "16")?;
        for j in (0..self.grid.ny).rev() {
            let row: Vec<String> = (0..self.grid.nx)
                .map(|i| (self.value(i, j) + 8).clamp(0, 16).to_string())
                .collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

fn scanline_degree(loops: &[Vec<Vec2>], grid: &Grid) -> Vec<i32> {
    use rayon::prelude::*;
    let rows: Vec<Vec<i32>> = (0..grid.ny)
        .into_par_iter()
        .map(|j| {
            let y = grid.center(0, j).y;
            let mut crossings: Vec<(f64, i32)> = Vec::new();
            for lp in loops {
                let n = lp.len();
                for k in 0..n {
                    let p = lp[k];
                    let q = lp[(k + 1) % n];
                    let sign = if p.y <= y && q.y > y {
                        1
                    } else if p.y > y && q.y <= y {
                        -1
                    } else {
                        continue;
                    };
                    let xc = p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y);
                    crossings.push((xc, sign));
                }
            }
            crossings.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mut row = vec![0; grid.nx];
            // winding at x = sum of signs of crossings strictly to the right
            let mut acc: i32 = crossings.iter().map(|c| c.1).sum();
            let mut k = 0;
            for (i, slot) in row.iter_mut().enumerate() {
                let x = grid.center(i, j).x;
                while k < crossings.len() && crossings[k].0 <= x {
                    acc -= crossings[k].1;
                    k += 1;
                }
                *slot = acc;
            }
            row
        })
        .collect();
    rows.concat()
}
