use std::collections::HashMap;
use std::sync::OnceLock;

use super::index::TriangleIndex;
use crate::{Error, Mat2, Result, Vec2};

/// Tag carried by every boundary edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// Part of `Γ`, where the boundary datum is imposed.
    Dirichlet,
    Free,
    /// Loop around the `k`-th candidate cavitation point.
    Puncture(usize),
}

impl BoundaryTag {
    pub fn as_str(&self) -> String {
        match self {
            Self::Dirichlet => "dirichlet".into(),
            Self::Free => "free".into(),
            Self::Puncture(k) => format!("puncture_{k}"),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dirichlet" => Some(Self::Dirichlet),
            "free" => Some(Self::Free),
            _ => s.strip_prefix("puncture_")?.parse().ok().map(Self::Puncture),
        }
    }
}

/// Small hole of radius `radius` standing in for a candidate cavitation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Puncture {
    pub center: Vec2,
    pub radius: f64,
}

/// Conforming triangulation of a (punctured) reference domain.
///
/// Triangles are positively oriented. Boundary edges are stored as they occur
/// in their triangle, so every boundary loop keeps the domain on its left:
/// outer loops run counter-clockwise, puncture loops clockwise.
#[derive(Debug)]
pub struct Mesh {
    vertices: Vec<Vec2>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<([usize; 2], BoundaryTag)>,
    punctures: Vec<Puncture>,
    areas: Vec<f64>,
    ref_inverse: Vec<Mat2>,
    outer_loops: Vec<Vec<usize>>,
    puncture_loops: Vec<Vec<usize>>,
    dirichlet: Vec<bool>,
    boundary_vertex: Vec<bool>,
    index: OnceLock<TriangleIndex>,
}

impl Mesh {
    pub fn new(
        vertices: Vec<Vec2>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<([usize; 2], BoundaryTag)>,
        punctures: Vec<Puncture>,
    ) -> Result<Self> {
        let nv = vertices.len();
        let mut areas = Vec::with_capacity(triangles.len());
        let mut ref_inverse = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= nv) {
                return Err(Error::Mesh(format!("triangle {t} references a missing vertex")));
            }
            let m = edge_matrix(&vertices, tri);
            let det = m.determinant();
            let scale = m.norm_squared();
            if !(det > 1e-14 * scale) {
                return Err(Error::Mesh(format!(
                    "triangle {t} has non-positive signed area {:.3e}",
                    0.5 * det
                )));
            }
            areas.push(0.5 * det);
            ref_inverse.push(m.try_inverse().expect("nonsingular"));
        }

        // Count triangle incidences per undirected edge; remember the directed
        // occurrence for edges seen once.
        let mut incidence: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
        for tri in &triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let e = incidence.entry((a.min(b), a.max(b))).or_insert((0, [a, b]));
                e.0 += 1;
            }
        }
        if let Some(((a, b), _)) = incidence.iter().find(|(_, (c, _))| *c > 2) {
            return Err(Error::Mesh(format!(
                "non-conforming mesh: edge ({a}, {b}) is shared by more than two triangles"
            )));
        }
        let mut tags: HashMap<(usize, usize), BoundaryTag> = HashMap::new();
        for ([a, b], tag) in &boundary_edges {
            let key = (*a.min(b), *a.max(b));
            match incidence.get(&key) {
                Some((1, _)) => {}
                _ => {
                    return Err(Error::Mesh(format!(
                        "boundary edge ({a}, {b}) is not on the mesh boundary"
                    )))
                }
            }
            if let BoundaryTag::Puncture(k) = tag {
                if *k >= punctures.len() {
                    return Err(Error::Mesh(format!("edge ({a}, {b}) tagged with unknown puncture {k}")));
                }
            }
            tags.insert(key, *tag);
        }
        let mut directed = Vec::new();
        for (key, (count, dir)) in &incidence {
            if *count == 1 {
                let Some(tag) = tags.get(key) else {
                    return Err(Error::Mesh(format!(
                        "boundary edge ({}, {}) carries no tag",
                        key.0, key.1
                    )));
                };
                directed.push((*dir, *tag));
            }
        }
        directed.sort_by_key(|(d, _)| (d[0], d[1]));
        let boundary_edges: Vec<([usize; 2], BoundaryTag)> = directed;

        let mut next: HashMap<usize, usize> = HashMap::new();
        for ([a, b], _) in &boundary_edges {
            if next.insert(*a, *b).is_some() {
                return Err(Error::Mesh(format!(
                    "boundary is pinched at vertex {a} (two outgoing boundary edges)"
                )));
            }
        }
        let tag_of = |a: usize, b: usize| tags[&(a.min(b), a.max(b))];
        let mut visited: HashMap<usize, bool> = HashMap::new();
        let mut outer_loops = Vec::new();
        let mut puncture_loops: Vec<Option<Vec<usize>>> = vec![None; punctures.len()];
        for ([start, _], _) in &boundary_edges {
            if visited.contains_key(start) {
                continue;
            }
            let mut lp = vec![*start];
            visited.insert(*start, true);
            let mut cur = *start;
            loop {
                let Some(&nxt) = next.get(&cur) else {
                    return Err(Error::Mesh(format!("boundary polyline through {cur} is not closed")));
                };
                if nxt == *start {
                    break;
                }
                if visited.insert(nxt, true).is_some() {
                    return Err(Error::Mesh(format!("boundary polyline through {nxt} is not closed")));
                }
                lp.push(nxt);
                cur = nxt;
            }
            let first = tag_of(lp[0], lp[1 % lp.len()]);
            match first {
                BoundaryTag::Puncture(k) => {
                    for i in 0..lp.len() {
                        if tag_of(lp[i], lp[(i + 1) % lp.len()]) != first {
                            return Err(Error::Mesh(format!(
                                "puncture {k} loop mixes tags"
                            )));
                        }
                    }
                    let p = punctures[k];
                    if let Some(&v) = lp
                        .iter()
                        .find(|&&v| (vertices[v] - p.center).norm() > 1.5 * p.radius)
                    {
                        return Err(Error::Mesh(format!(
                            "puncture {k} loop vertex {v} lies farther than 1.5 rho from its center"
                        )));
                    }
                    if puncture_loops[k].replace(lp).is_some() {
                        return Err(Error::Mesh(format!("puncture {k} has more than one loop")));
                    }
                }
                _ => {
                    if lp.windows(2).chain(std::iter::once(&[lp[lp.len() - 1], lp[0]][..])).any(|w| {
                        matches!(tag_of(w[0], w[1]), BoundaryTag::Puncture(_))
                    }) {
                        return Err(Error::Mesh("outer boundary loop contains puncture edges".into()));
                    }
                    outer_loops.push(lp);
                }
            }
        }
        let puncture_loops = puncture_loops
            .into_iter()
            .enumerate()
            .map(|(k, l)| l.ok_or_else(|| Error::Mesh(format!("puncture {k} has no boundary loop"))))
            .collect::<Result<Vec<_>>>()?;

        let mut dirichlet = vec![false; nv];
        let mut boundary_vertex = vec![false; nv];
        for ([a, b], tag) in &boundary_edges {
            boundary_vertex[*a] = true;
            boundary_vertex[*b] = true;
            if *tag == BoundaryTag::Dirichlet {
                dirichlet[*a] = true;
                dirichlet[*b] = true;
            }
        }
        Ok(Self {
            vertices,
            triangles,
            boundary_edges,
            punctures,
            areas,
            ref_inverse,
            outer_loops,
            puncture_loops,
            dirichlet,
            boundary_vertex,
            index: OnceLock::new(),
        })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[([usize; 2], BoundaryTag)] {
        &self.boundary_edges
    }

    pub fn punctures(&self) -> &[Puncture] {
        &self.punctures
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Reference area of triangle `t`.
    pub fn area(&self, t: usize) -> f64 {
        self.areas[t]
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn total_area(&self) -> f64 {
        crate::numeric::pairwise_sum(&self.areas)
    }

    /// Inverse of the reference edge matrix `[x₁ − x₀, x₂ − x₀]`.
    pub fn reference_inverse(&self, t: usize) -> &Mat2 {
        &self.ref_inverse[t]
    }

    /// Gradients of the three barycentric coordinates of triangle `t`.
    pub fn shape_gradients(&self, t: usize) -> [Vec2; 3] {
        let inv = &self.ref_inverse[t];
        let g1 = Vec2::new(inv[(0, 0)], inv[(0, 1)]);
        let g2 = Vec2::new(inv[(1, 0)], inv[(1, 1)]);
        [-g1 - g2, g1, g2]
    }

    pub fn centroid(&self, t: usize) -> Vec2 {
        let [a, b, c] = self.triangles[t];
        (self.vertices[a] + self.vertices[b] + self.vertices[c]) / 3.0
    }

    /// Loops of the outer boundary, counter-clockwise.
    pub fn outer_loops(&self) -> &[Vec<usize>] {
        &self.outer_loops
    }

    /// Loop around puncture `k`, clockwise (domain on the left).
    pub fn puncture_loop(&self, k: usize) -> &[usize] {
        &self.puncture_loops[k]
    }

    pub fn is_dirichlet(&self, v: usize) -> bool {
        self.dirichlet[v]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn dirichlet_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(|&v| self.dirichlet[v])
    }

    /// Longest edge length (mesh size `h`).
    pub fn mesh_size(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
            .map(|(a, b)| (self.vertices[a] - self.vertices[b]).norm())
            .fold(0.0, f64::max)
    }

    /// Spatial index over the reference triangles (built on first use).
    pub fn index(&self) -> &TriangleIndex {
        self.index
            .get_or_init(|| TriangleIndex::build(&self.vertices, &self.triangles))
    }

    /// Reference triangle containing `x` and its barycentric coordinates.
    pub fn locate(&self, x: &Vec2) -> Option<(usize, [f64; 3])> {
        self.index().locate(&self.vertices, &self.triangles, x, 1e-12)
    }
}

pub(crate) fn edge_matrix(points: &[Vec2], tri: &[usize; 3]) -> Mat2 {
    let e1 = points[tri[1]] - points[tri[0]];
    let e2 = points[tri[2]] - points[tri[0]];
    Mat2::new(e1.x, e2.x, e1.y, e2.y)
}
