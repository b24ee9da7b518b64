use crate::Vec2;

/// Uniform-grid bucket index over a set of triangles for point location.
#[derive(Debug, Clone)]
pub struct TriangleIndex {
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl TriangleIndex {
    pub fn build(points: &[Vec2], triangles: &[[usize; 3]]) -> Self {
        let (lo, hi) = bbox(points);
        let span = (hi - lo).max().max(1e-300);
        let target = (triangles.len() as f64).sqrt().ceil().max(1.0);
        let cell = span / target;
        let nx = (((hi.x - lo.x) / cell).floor() as usize + 1).max(1);
        let ny = (((hi.y - lo.y) / cell).floor() as usize + 1).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (t, tri) in triangles.iter().enumerate() {
            let ps = tri.map(|i| points[i]);
            let tlo = Vec2::new(ps[0].x.min(ps[1].x).min(ps[2].x), ps[0].y.min(ps[1].y).min(ps[2].y));
            let thi = Vec2::new(ps[0].x.max(ps[1].x).max(ps[2].x), ps[0].y.max(ps[1].y).max(ps[2].y));
            let (i0, j0) = cell_of(lo, cell, nx, ny, &tlo);
            let (i1, j1) = cell_of(lo, cell, nx, ny, &thi);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(t as u32);
                }
            }
        }
        Self {
            origin: lo,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    /// First triangle (in index order) containing `x`, with barycentric
    /// coordinates. Points within `tol` (in barycentric units) of an edge count
    /// as inside.
    pub fn locate(
        &self,
        points: &[Vec2],
        triangles: &[[usize; 3]],
        x: &Vec2,
        tol: f64,
    ) -> Option<(usize, [f64; 3])> {
        let rel = x - self.origin;
        let fi = (rel.x / self.cell).floor();
        let fj = (rel.y / self.cell).floor();
        if fi < 0.0 || fj < 0.0 || fi >= self.nx as f64 || fj >= self.ny as f64 {
            return None;
        }
        let bucket = &self.buckets[fj as usize * self.nx + fi as usize];
        for &t in bucket {
            let tri = triangles[t as usize];
            let bary = barycentric(&points[tri[0]], &points[tri[1]], &points[tri[2]], x);
            if bary.iter().all(|&l| l >= -tol) {
                return Some((t as usize, bary));
            }
        }
        None
    }
}

fn cell_of(origin: Vec2, cell: f64, nx: usize, ny: usize, x: &Vec2) -> (usize, usize) {
    let i = ((x.x - origin.x) / cell).floor().max(0.0) as usize;
    let j = ((x.y - origin.y) / cell).floor().max(0.0) as usize;
    (i.min(nx - 1), j.min(ny - 1))
}

pub(crate) fn bbox(points: &[Vec2]) -> (Vec2, Vec2) {
    let mut lo = Vec2::repeat(f64::INFINITY);
    let mut hi = Vec2::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

/// Barycentric coordinates of `x` with respect to the triangle `(a, b, c)`.
pub fn barycentric(a: &Vec2, b: &Vec2, c: &Vec2, x: &Vec2) -> [f64; 3] {
    let e1 = b - a;
    let e2 = c - a;
    let r = x - a;
    let det = e1.x * e2.y - e1.y * e2.x;
    let l1 = (r.x * e2.y - r.y * e2.x) / det;
    let l2 = (e1.x * r.y - e1.y * r.x) / det;
    [1.0 - l1 - l2, l1, l2]
}

/// Uniform-grid hash of points for radius queries.
#[derive(Debug, Clone)]
pub struct PointGrid {
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl PointGrid {
    pub fn build(points: &[Vec2], cell: f64) -> Self {
        let (lo, hi) = bbox(points);
        let nx = (((hi.x - lo.x) / cell).floor() as usize + 1).max(1);
        let ny = (((hi.y - lo.y) / cell).floor() as usize + 1).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (k, p) in points.iter().enumerate() {
            let (i, j) = cell_of(lo, cell, nx, ny, p);
            buckets[j * nx + i].push(k as u32);
        }
        Self {
            origin: lo,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    /// Indices of points within `radius` of `x`, ascending.
    pub fn within(&self, points: &[Vec2], x: &Vec2, radius: f64) -> Vec<usize> {
        let reach = (radius / self.cell).ceil() as i64;
        let ci = ((x.x - self.origin.x) / self.cell).floor() as i64;
        let cj = ((x.y - self.origin.y) / self.cell).floor() as i64;
        let mut out = Vec::new();
        for j in (cj - reach).max(0)..=(cj + reach).min(self.ny as i64 - 1) {
            for i in (ci - reach).max(0)..=(ci + reach).min(self.nx as i64 - 1) {
                for &k in &self.buckets[j as usize * self.nx + i as usize] {
                    if (points[k as usize] - x).norm() <= radius {
                        out.push(k as usize);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}
