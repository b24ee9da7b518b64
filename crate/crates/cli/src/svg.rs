//! SVG drawings of a mesh under given vertex positions.

use std::fmt::Write as _;

use cavelast_core::geometry::{BoundaryTag, Mesh};
use cavelast_core::Vec2;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 20.0;

/// Triangle edges in grey, outer boundary in black, puncture loops filled red.
/// `pos` holds one point per mesh vertex.
pub fn render(mesh: &Mesh, pos: &[Vec2]) -> String {
    let (lo, hi) = pos.iter().fold(
        (Vec2::repeat(f64::INFINITY), Vec2::repeat(f64::NEG_INFINITY)),
        |(lo, hi), p| (lo.inf(p), hi.sup(p)),
    );
    let span = (hi - lo).max().max(1e-12);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let map = |p: &Vec2| (MARGIN + (p.x - lo.x) * scale, SIZE - MARGIN - (p.y - lo.y) * scale);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let mut d = String::new();
    for tri in mesh.triangles() {
        for k in 0..3 {
            let (i, j) = (tri[k], tri[(k + 1) % 3]);
            if i < j || mesh.is_boundary_vertex(i) && mesh.is_boundary_vertex(j) {
                let (a, b) = (map(&pos[i]), map(&pos[j]));
                let _ = write!(d, "M{:.2} {:.2}L{:.2} {:.2}", a.0, a.1, b.0, b.1);
            }
        }
    }
    let _ = writeln!(s, r##"<path d="{d}" stroke="#999" stroke-width="0.3" fill="none"/>"##);
    for k in 0..mesh.punctures().len() {
        let pts: Vec<String> = mesh
            .puncture_loop(k)
            .iter()
            .map(|&v| {
                let (x, y) = map(&pos[v]);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="#d33" fill-opacity="0.6" stroke="#900" stroke-width="1"/>"##,
            pts.join(" ")
        );
    }
    let mut b = String::new();
    for ([i, j], tag) in mesh.boundary_edges() {
        if !matches!(tag, BoundaryTag::Puncture(_)) {
            let (p, q) = (map(&pos[*i]), map(&pos[*j]));
            let _ = write!(b, "M{:.2} {:.2}L{:.2} {:.2}", p.0, p.1, q.0, q.1);
        }
    }
    let _ = writeln!(s, r#"<path d="{b}" stroke="black" stroke-width="1.2" fill="none"/>"#);
    s.push_str("</svg>\n");
    s
}
