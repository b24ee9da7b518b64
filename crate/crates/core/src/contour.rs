//! Cell-centered rasters and marching-squares contours of indicator masks.

use std::collections::HashMap;

use crate::Vec2;

/// Axis-aligned raster; `origin` is the center of cell `(0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub origin: Vec2,
    pub cell: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    /// Grid of cell size `cell` covering `[lo, hi]` plus `pad` cells on every side.
    pub fn covering(lo: Vec2, hi: Vec2, cell: f64, pad: usize) -> Self {
        let nx = ((hi.x - lo.x) / cell).ceil() as usize + 1 + 2 * pad;
        let ny = ((hi.y - lo.y) / cell).ceil() as usize + 1 + 2 * pad;
        let origin = lo - Vec2::repeat(pad as f64 * cell);
        Self { origin, cell, nx, ny }
    }

    #[inline]
    pub fn center(&self, i: usize, j: usize) -> Vec2 {
        self.origin + Vec2::new(i as f64 * self.cell, j as f64 * self.cell)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.cell * self.cell
    }

    /// Cell whose center is nearest to `x`, if inside the grid.
    pub fn cell_of(&self, x: &Vec2) -> Option<(usize, usize)> {
        let r = (x - self.origin) / self.cell;
        let (i, j) = (r.x.round(), r.y.round());
        if i < 0.0 || j < 0.0 || i >= self.nx as f64 || j >= self.ny as f64 {
            None
        } else {
            Some((i as usize, j as usize))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum EdgeId {
    /// Between cell centers `(i, j)` and `(i + 1, j)`.
    H(i64, i64),
    /// Between cell centers `(i, j)` and `(i, j + 1)`.
    V(i64, i64),
}

/// Closed contours of the region `{mask = true}`, with the polyline vertices
/// at midpoints between cell centers. Outer contours run counter-clockwise
/// and holes clockwise; diagonal-only contacts are treated as separated.
pub fn marching_squares(grid: &Grid, mask: &[bool]) -> Vec<Vec<Vec2>> {
    let at = |i: i64, j: i64| -> bool {
        i >= 0 && j >= 0 && (i as usize) < grid.nx && (j as usize) < grid.ny && mask[grid.index(i as usize, j as usize)]
    };
    let mut next: HashMap<EdgeId, EdgeId> = HashMap::new();
    for j in -1..grid.ny as i64 {
        for i in -1..grid.nx as i64 {
            let case = (at(i, j) as u8)
                | ((at(i + 1, j) as u8) << 1)
                | ((at(i + 1, j + 1) as u8) << 2)
                | ((at(i, j + 1) as u8) << 3);
            let e = [EdgeId::H(i, j), EdgeId::V(i + 1, j), EdgeId::H(i, j + 1), EdgeId::V(i, j)];
            let segs: &[(usize, usize)] = match case {
                1 => &[(0, 3)],
                2 => &[(1, 0)],
                3 => &[(1, 3)],
                4 => &[(2, 1)],
                5 => &[(0, 3), (2, 1)],
                6 => &[(2, 0)],
                7 => &[(2, 3)],
                8 => &[(3, 2)],
                9 => &[(0, 2)],
                10 => &[(1, 0), (3, 2)],
                11 => &[(1, 2)],
                12 => &[(3, 1)],
                13 => &[(0, 1)],
                14 => &[(3, 0)],
                _ => &[],
            };
            for &(a, b) in segs {
                next.insert(e[a], e[b]);
            }
        }
    }
    let pos = |e: EdgeId| -> Vec2 {
        let h = 0.5 * grid.cell;
        match e {
            EdgeId::H(i, j) => grid.origin + Vec2::new(i as f64 * grid.cell + h, j as f64 * grid.cell),
            EdgeId::V(i, j) => grid.origin + Vec2::new(i as f64 * grid.cell, j as f64 * grid.cell + h),
        }
    };
    // deterministic start order
    let mut starts: Vec<EdgeId> = next.keys().copied().collect();
    starts.sort_by_key(|e| match *e {
        EdgeId::H(i, j) => (j, i, 0),
        EdgeId::V(i, j) => (j, i, 1),
    });
    let mut used: HashMap<EdgeId, bool> = HashMap::new();
    let mut out = Vec::new();
    for s in starts {
        if used.contains_key(&s) {
            continue;
        }
        let mut pts = Vec::new();
        let mut cur = s;
        loop {
            used.insert(cur, true);
            pts.push(pos(cur));
            match next.get(&cur) {
                Some(&n) if n == s => break,
                Some(&n) if !used.contains_key(&n) => cur = n,
                _ => break,
            }
        }
        if pts.len() >= 3 {
            out.push(pts);
        }
    }
    out
}
