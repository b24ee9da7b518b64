//! Closed-polyline utilities. A loop is a slice of points with an implicit
//! closing segment from the last point back to the first.

use crate::Vec2;

/// Shoelace signed area (positive for counter-clockwise loops).
pub fn signed_area(pts: &[Vec2]) -> f64 {
    let n = pts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        acc += p.x * q.y - q.x * p.y;
    }
    0.5 * acc
}

pub fn perimeter(pts: &[Vec2]) -> f64 {
    segments(pts).map(|(p, q)| (q - p).norm()).sum()
}

/// Iterator over the closed loop's segments.
pub fn segments(pts: &[Vec2]) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
    let n = pts.len();
    (0..n).map(move |i| (pts[i], pts[(i + 1) % n]))
}

/// Copy of the loop, reversed if needed so that it is counter-clockwise.
pub fn to_ccw(pts: &[Vec2]) -> Vec<Vec2> {
    let mut out = pts.to_vec();
    if signed_area(pts) < 0.0 {
        out.reverse();
    }
    out
}

pub fn centroid(pts: &[Vec2]) -> Vec2 {
    let n = pts.len().max(1) as f64;
    pts.iter().fold(Vec2::zeros(), |a, p| a + p) / n
}

pub fn point_segment_distance(x: &Vec2, p: &Vec2, q: &Vec2) -> f64 {
    let e = q - p;
    let len2 = e.norm_squared();
    if len2 == 0.0 {
        return (x - p).norm();
    }
    let t = ((x - p).dot(&e) / len2).clamp(0.0, 1.0);
    (x - (p + t * e)).norm()
}

/// Distance from `x` to the closed loop.
pub fn distance_to_loop(x: &Vec2, pts: &[Vec2]) -> f64 {
    segments(pts)
        .map(|(p, q)| point_segment_distance(x, &p, &q))
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric Hausdorff distance between two closed loops, measured from the
/// vertices (and segment midpoints) of each loop to the segments of the other.
pub fn hausdorff(a: &[Vec2], b: &[Vec2]) -> f64 {
    fn one_sided(a: &[Vec2], b: &[Vec2]) -> f64 {
        let mut worst: f64 = 0.0;
        for (p, q) in segments(a) {
            for x in [p, 0.5 * (p + q)] {
                worst = worst.max(distance_to_loop(&x, b));
            }
        }
        worst
    }
    one_sided(a, b).max(one_sided(b, a))
}

fn orient(a: &Vec2, b: &Vec2, c: &Vec2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Proper or touching intersection of the closed segments `[p1, p2]` and `[q1, q2]`.
pub fn segments_intersect(p1: &Vec2, p2: &Vec2, q1: &Vec2, q2: &Vec2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: &Vec2, b: &Vec2, c: &Vec2, d: f64| {
        d == 0.0
            && c.x >= a.x.min(b.x)
            && c.x <= a.x.max(b.x)
            && c.y >= a.y.min(b.y)
            && c.y <= a.y.max(b.y)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

/// True when no two non-adjacent segments of the loop intersect.
pub fn is_simple(pts: &[Vec2]) -> bool {
    let n = pts.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (p1, p2) = (pts[i], pts[(i + 1) % n]);
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (q1, q2) = (pts[j], pts[(j + 1) % n]);
            if segments_intersect(&p1, &p2, &q1, &q2) {
                return false;
            }
        }
    }
    true
}

/// Minimum distance between non-adjacent segments of a loop (its "reach" at
/// the resolution of the polyline).
pub fn self_distance(pts: &[Vec2]) -> f64 {
    let n = pts.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let (p1, p2) = (pts[i], pts[(i + 1) % n]);
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (q1, q2) = (pts[j], pts[(j + 1) % n]);
            if segments_intersect(&p1, &p2, &q1, &q2) {
                return 0.0;
            }
            let d = point_segment_distance(&p1, &q1, &q2)
                .min(point_segment_distance(&p2, &q1, &q2))
                .min(point_segment_distance(&q1, &p1, &p2))
                .min(point_segment_distance(&q2, &p1, &p2));
            best = best.min(d);
        }
    }
    best
}

/// Regular `n`-gon of radius `r` around `c`, counter-clockwise, first vertex at angle 0.
pub fn regular_polygon(c: Vec2, r: f64, n: usize) -> Vec<Vec2> {
    (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            c + r * Vec2::new(t.cos(), t.sin())
        })
        .collect()
}
