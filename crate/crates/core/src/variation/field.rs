use crate::geometry::{barycentric, DeformationField};
use crate::numeric::{cutoff, cutoff_deriv, CUTOFF_DERIV_MAX};
use crate::polygon::centroid;
use crate::{Error, Mat2, Result, Vec2};

/// Velocity field `ψ` on the deformed configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum TestField {
    /// `χ(|ξ − c|/w) v` with the C² cutoff `χ`.
    Bump { center: Vec2, width: f64, direction: Vec2 },
    /// `χ̂(|ξ − c|) (ξ − c)`: dilation about `c`, flat on `|ξ − c| ≤ inner` and
    /// vanishing beyond `outer`.
    RadialBump { center: Vec2, inner: f64, outer: f64 },
    /// `b + M ξ` (not compactly supported).
    Affine { offset: Vec2, linear: Mat2 },
    /// `(1 − |u|²)₊² m_k(u)` with `u = (ξ − c)/R` and one of eight polynomial
    /// modes `m_k`; vanishes outside `B(c, R)`.
    Envelope { center: Vec2, radius: f64, mode: usize },
    /// Hat function of one deformed mesh node times `v`. The patch stores the
    /// deformed triangles around the node, node first.
    FeBasis { node: usize, direction: Vec2, patch: Vec<[Vec2; 3]> },
}

impl TestField {
    /// Hat-function field of vertex `node` on the deformed mesh of `y`.
    pub fn fe_basis(y: &DeformationField, node: usize, direction: Vec2) -> Self {
        let p = y.positions();
        let patch = y
            .mesh()
            .triangles()
            .iter()
            .filter_map(|t| {
                let k = t.iter().position(|&v| v == node)?;
                Some([p[t[k]], p[t[(k + 1) % 3]], p[t[(k + 2) % 3]]])
            })
            .collect();
        Self::FeBasis { node, direction, patch }
    }

    pub fn value(&self, xi: &Vec2) -> Vec2 {
        match self {
            Self::Bump { center, width, direction } => direction * cutoff((xi - center).norm() / width),
            Self::RadialBump { center, inner, outer } => {
                let d = xi - center;
                d * plateau(d.norm(), *inner, *outer).0
            }
            Self::Affine { offset, linear } => offset + linear * xi,
            Self::Envelope { center, radius, mode } => {
                let u = (xi - center) / *radius;
                let q = u.norm_squared();
                if q >= 1.0 {
                    return Vec2::zeros();
                }
                envelope_mode(*mode, &u).0 * (1.0 - q).powi(2)
            }
            Self::FeBasis { direction, patch, .. } => match locate_patch(patch, xi) {
                Some((_, l)) => direction * l[0],
                None => Vec2::zeros(),
            },
        }
    }

    /// `Dψ(ξ)`, rows indexed by the component of `ψ`.
    pub fn gradient(&self, xi: &Vec2) -> Mat2 {
        match self {
            Self::Bump { center, width, direction } => {
                let d = xi - center;
                let s = d.norm();
                let ds = cutoff_deriv(s / width) / width;
                if s == 0.0 || ds == 0.0 {
                    Mat2::zeros()
                } else {
                    direction * (d / s).transpose() * ds
                }
            }
            Self::RadialBump { center, inner, outer } => {
                let d = xi - center;
                let s = d.norm();
                let (g, dg) = plateau(s, *inner, *outer);
                let mut m = Mat2::identity() * g;
                if s > 0.0 && dg != 0.0 {
                    m += d * d.transpose() * (dg / s);
                }
                m
            }
            Self::Affine { linear, .. } => *linear,
            Self::Envelope { center, radius, mode } => {
                let u = (xi - center) / *radius;
                let q = u.norm_squared();
                if q >= 1.0 {
                    return Mat2::zeros();
                }
                let (m, dm) = envelope_mode(*mode, &u);
                let g = (1.0 - q).powi(2);
                let dg = u * (-4.0 * (1.0 - q) / radius);
                m * dg.transpose() + dm * (g / radius)
            }
            Self::FeBasis { direction, patch, .. } => match locate_patch(patch, xi) {
                Some((k, _)) => {
                    let [a, b, c] = patch[k];
                    let e = b - a;
                    let f = c - a;
                    let det = e.x * f.y - e.y * f.x;
                    // ∇λ_a = −J(c − b)/det with J the +90° rotation
                    let g = Vec2::new(b.y - c.y, c.x - b.x) / det;
                    direction * g.transpose()
                }
                None => Mat2::zeros(),
            },
        }
    }

    /// Upper bound on `sup |Dψ|` (Frobenius norm).
    pub fn grad_bound(&self) -> f64 {
        match self {
            Self::Bump { width, direction, .. } => direction.norm() * CUTOFF_DERIV_MAX / width,
            Self::RadialBump { inner, outer, .. } => {
                2f64.sqrt() + CUTOFF_DERIV_MAX * outer / (outer - inner)
            }
            Self::Affine { linear, .. } => linear.norm(),
            // |∇g| ≤ 8/(3√3)/R, |m| ≤ 1, |Dm| ≤ 2/R
            Self::Envelope { radius, .. } => (8.0 / (3.0 * 3f64.sqrt()) + 2.0) / radius,
            Self::FeBasis { direction, patch, .. } => {
                let g = patch
                    .iter()
                    .map(|[a, b, c]| {
                        let det = (b - a).x * (c - a).y - (b - a).y * (c - a).x;
                        (c - b).norm() / det.abs()
                    })
                    .fold(0.0, f64::max);
                g * direction.norm()
            }
        }
    }

    /// Radius of a ball containing the support (infinite for affine fields).
    pub fn support_radius(&self) -> f64 {
        match self {
            Self::Bump { width, .. } => *width,
            Self::RadialBump { outer, .. } => *outer,
            Self::Affine { .. } => f64::INFINITY,
            Self::Envelope { radius, .. } => *radius,
            Self::FeBasis { patch, .. } => patch
                .iter()
                .flat_map(|t| [t[1], t[2]].map(|p| (p - t[0]).norm()))
                .fold(0.0, f64::max),
        }
    }

    /// Checks that `ψ` vanishes at the images of the Dirichlet vertices.
    pub fn check_vanishes_on_dirichlet(&self, y: &DeformationField) -> Result<()> {
        for v in y.mesh().dirichlet_vertices() {
            let p = y.positions()[v];
            let val = self.value(&p).norm();
            if val > 1e-12 {
                return Err(Error::Argument(format!(
                    "test field is {val:.3e} at the image ({:.4}, {:.4}) of Dirichlet vertex {v}",
                    p.x, p.y
                )));
            }
        }
        Ok(())
    }
}

fn plateau(s: f64, inner: f64, outer: f64) -> (f64, f64) {
    if s <= inner {
        (1.0, 0.0)
    } else {
        let w = outer - inner;
        let t = (s - inner) / w;
        (cutoff(t), cutoff_deriv(t) / w)
    }
}

/// Mode value and its derivative with respect to `u`.
fn envelope_mode(k: usize, u: &Vec2) -> (Vec2, Mat2) {
    let (x, y) = (u.x, u.y);
    match k % 8 {
        0 => (Vec2::new(1.0, 0.0), Mat2::zeros()),
        1 => (Vec2::new(0.0, 1.0), Mat2::zeros()),
        2 => (*u, Mat2::identity()),
        3 => (Vec2::new(-y, x), Mat2::new(0.0, -1.0, 1.0, 0.0)),
        4 => (Vec2::new(x, -y), Mat2::new(1.0, 0.0, 0.0, -1.0)),
        5 => (Vec2::new(y, x), Mat2::new(0.0, 1.0, 1.0, 0.0)),
        6 => (Vec2::new(0.5 * (x * x - y * y), x * y), Mat2::new(x, -y, y, x)),
        _ => (Vec2::new(x * y, -0.5 * (x * x - y * y)), Mat2::new(y, x, -x, y)),
    }
}

fn locate_patch(patch: &[[Vec2; 3]], xi: &Vec2) -> Option<(usize, [f64; 3])> {
    patch.iter().enumerate().find_map(|(k, [a, b, c])| {
        let l = barycentric(a, b, c, xi);
        l.iter().all(|&v| v >= -1e-12).then_some((k, l))
    })
}

/// Certification fields for `y`: 16 bumps on a ring around every cavity
/// (8 angles, radial and tangential) and 8 global envelope modes. All of
/// them vanish on the images of the Dirichlet vertices.
pub fn battery(y: &DeformationField) -> Vec<TestField> {
    let mesh = y.mesh();
    let gamma: Vec<Vec2> = mesh.dirichlet_vertices().map(|v| y.positions()[v]).collect();
    let h = mesh.mesh_size();
    let dist_gamma = |p: &Vec2| gamma.iter().map(|g| (g - p).norm()).fold(f64::INFINITY, f64::min);
    let mut out = Vec::new();
    for k in 0..mesh.punctures().len() {
        let poly = y.cavity_polygon(k);
        let c = centroid(&poly);
        let rc = poly.iter().map(|p| (p - c).norm()).sum::<f64>() / poly.len() as f64;
        for j in 0..8 {
            let t = std::f64::consts::TAU * j as f64 / 8.0;
            let e = Vec2::new(t.cos(), t.sin());
            let center = c + e * rc;
            // keep the support off Γ with a small margin
            let width = (0.5 * rc).max(3.0 * h).min(0.95 * dist_gamma(&center));
            if !(width > 0.0) {
                continue;
            }
            out.push(TestField::Bump { center, width, direction: e });
            out.push(TestField::Bump { center, width, direction: Vec2::new(-e.y, e.x) });
        }
    }
    let all = y.positions();
    let center = all.iter().sum::<Vec2>() / all.len() as f64;
    let radius = if gamma.is_empty() {
        2.0 * all.iter().map(|p| (p - center).norm()).fold(0.0, f64::max)
    } else {
        dist_gamma(&center)
    };
    if radius > 0.0 {
        for mode in 0..8 {
            out.push(TestField::Envelope { center, radius, mode });
        }
    }
    out
}
