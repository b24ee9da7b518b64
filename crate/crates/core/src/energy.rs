//! Total energy — bulk quadrature plus anisotropic perimeter of the cavities —
//! and the surface-creation functional `S(y)` in sum and test-field form.

use rayon::prelude::*;

use crate::degree::{check_inv, default_inv_radii, default_radii, topological_image_point, PointImageOptions};
use crate::geometry::DeformationField;
use crate::material::{BulkDensity, SurfaceDensity};
use crate::numeric::{cof, cutoff, cutoff_deriv, pairwise_sum, rot_cw, TriangleRule};
use crate::polygon::{hausdorff, is_simple, perimeter, signed_area, to_ccw};
use crate::{Error, Mat2, Result, Vec2};

/// `Σ_T |T| W(Dy|_T)`.
pub fn bulk_term(y: &DeformationField, density: &BulkDensity) -> Result<f64> {
    let mesh = y.mesh();
    let parts: Vec<Result<f64>> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let f = y.element_gradient(t);
            let det = f.determinant();
            if !(det > 0.0) {
                return Err(Error::Infeasible { triangle: t, det });
            }
            Ok(mesh.area(t) * density.energy(&f)?)
        })
        .collect();
    let parts: Vec<f64> = parts.into_iter().collect::<Result<_>>()?;
    Ok(pairwise_sum(&parts))
}

/// `Σ_e |e| φ(ν_e)` over a closed polyline, with outward normals taken from
/// the orientation of positive signed area. The flag is `false` when the
/// polyline intersects itself (the value is still returned).
pub fn anisotropic_perimeter(boundary: &[Vec2], phi: &SurfaceDensity) -> (f64, bool) {
    let simple = is_simple(boundary);
    if !simple {
        log::warn!("anisotropic perimeter of a self-intersecting polyline ({} vertices)", boundary.len());
    }
    (aniso_perimeter_ccw(&to_ccw(boundary), phi), simple)
}

/// Edge sum for a polyline already known to be counter-clockwise.
pub(crate) fn aniso_perimeter_ccw(pts: &[Vec2], phi: &SurfaceDensity) -> f64 {
    let n = pts.len();
    let parts: Vec<f64> = (0..n)
        .map(|i| phi.value(&rot_cw(&(pts[(i + 1) % n] - pts[i]))))
        .collect();
    pairwise_sum(&parts)
}

/// How cavities are found and cross-checked by [`total_energy`].
#[derive(Debug, Clone, PartialEq)]
pub struct CavityDetection {
    /// Also rasterize `im_T(y, a)` at every puncture and compare with the loop image.
    pub slow_path: bool,
    /// Raster cell size for the slow path and the (INV) check.
    pub delta: f64,
    /// Radii per site for the slow path.
    pub radii: usize,
    /// Run the (INV) check and record the result.
    pub check_inv: bool,
    pub inv_radii: usize,
    pub inv_budget: usize,
}

impl Default for CavityDetection {
    fn default() -> Self {
        Self {
            slow_path: false,
            delta: 0.01,
            radii: 3,
            check_inv: false,
            inv_radii: 8,
            inv_budget: 20_000,
        }
    }
}

/// Surface contribution of one puncture.
#[derive(Debug, Clone)]
pub struct CavitySurface {
    pub puncture: usize,
    pub site: Vec2,
    pub aniso_perimeter: f64,
    /// Euclidean length of the boundary image.
    pub perimeter: f64,
    /// Area enclosed by the boundary image.
    pub area: f64,
    pub simple: bool,
    /// Hausdorff distance between the loop image and the raster contour (slow path).
    pub contour_distance: Option<f64>,
    /// Extrapolated raster area of `im_T(y, a)` (slow path).
    pub raster_area: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct EnergyBreakdown {
    pub bulk: f64,
    pub surface: f64,
    pub total: f64,
    pub per_cavity: Vec<CavitySurface>,
    /// Surface energy the punctures carry with no deformation at all.
    pub rho_artifact: f64,
    /// `None` when the check was not requested.
    pub inv_pass: Option<bool>,
    pub inv_violations: Option<usize>,
}

impl EnergyBreakdown {
    /// Flat `key = value` block, one entry per line.
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let mut kv = vec![
            ("bulk".to_string(), fmt(self.bulk)),
            ("surface".to_string(), fmt(self.surface)),
            ("total".to_string(), fmt(self.total)),
            ("rho_artifact".to_string(), fmt(self.rho_artifact)),
            ("cavities".to_string(), self.per_cavity.len().to_string()),
        ];
        for c in &self.per_cavity {
            let p = format!("cavity.{}", c.puncture);
            kv.push((format!("{p}.site"), format!("{} {}", fmt(c.site.x), fmt(c.site.y))));
            kv.push((format!("{p}.aniso_perimeter"), fmt(c.aniso_perimeter)));
            kv.push((format!("{p}.perimeter"), fmt(c.perimeter)));
            kv.push((format!("{p}.area"), fmt(c.area)));
            kv.push((format!("{p}.simple"), c.simple.to_string()));
            if let Some(d) = c.contour_distance {
                kv.push((format!("{p}.contour_distance"), fmt(d)));
            }
            if let Some(a) = c.raster_area {
                kv.push((format!("{p}.raster_area"), fmt(a)));
            }
        }
        let inv = match self.inv_pass {
            None => "unchecked".to_string(),
            Some(true) => "pass".to_string(),
            Some(false) => "fail".to_string(),
        };
        kv.push(("inv".to_string(), inv));
        if let Some(v) = self.inv_violations {
            kv.push(("inv_violations".to_string(), v.to_string()));
        }
        kv
    }

    pub fn to_text(&self) -> String {
        self.to_key_values()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

/// Bulk energy plus `Σ_a ∫ φ(ν)` over the image of every puncture loop.
pub fn total_energy(
    y: &DeformationField,
    density: &BulkDensity,
    phi: &SurfaceDensity,
    detect: &CavityDetection,
) -> Result<EnergyBreakdown> {
    let bulk = bulk_term(y, density)?;
    let mesh = y.mesh();
    let mut per_cavity = Vec::with_capacity(mesh.punctures().len());
    let mut artifacts = Vec::with_capacity(mesh.punctures().len());
    for (k, p) in mesh.punctures().iter().enumerate() {
        let poly = y.cavity_polygon(k);
        let simple = is_simple(&poly);
        if !simple {
            log::warn!("image of puncture {k} intersects itself");
        }
        let ccw = to_ccw(&poly);
        let mut rec = CavitySurface {
            puncture: k,
            site: p.center,
            aniso_perimeter: aniso_perimeter_ccw(&ccw, phi),
            perimeter: perimeter(&poly),
            area: signed_area(&poly),
            simple,
            contour_distance: None,
            raster_area: None,
        };
        if detect.slow_path {
            let radii = default_radii(y, &p.center, detect.radii);
            let opts = PointImageOptions::default();
            if let Some(cr) = topological_image_point(y, &p.center, &radii, detect.delta, &opts)? {
                rec.contour_distance = Some(hausdorff(&cr.boundary, &poly));
                rec.raster_area = Some(cr.area);
            }
        }
        per_cavity.push(rec);
        let mut reference: Vec<Vec2> = mesh.puncture_loop(k).iter().map(|&v| mesh.vertices()[v]).collect();
        reference.reverse();
        artifacts.push(aniso_perimeter_ccw(&reference, phi));
    }
    let surface = pairwise_sum(&per_cavity.iter().map(|c| c.aniso_perimeter).collect::<Vec<_>>());
    let (inv_pass, inv_violations) = if detect.check_inv && !mesh.punctures().is_empty() {
        let centers: Vec<Vec2> = mesh.punctures().iter().map(|p| p.center).collect();
        let radii: Vec<Vec<f64>> = centers.iter().map(|a| default_inv_radii(y, a, detect.inv_radii)).collect();
        let rep = check_inv(y, &centers, &radii, detect.inv_budget, detect.delta)?;
        (Some(rep.pass()), Some(rep.violations()))
    } else if detect.check_inv {
        (Some(true), Some(0))
    } else {
        (None, None)
    };
    Ok(EnergyBreakdown {
        bulk,
        surface,
        total: bulk + surface,
        per_cavity,
        rho_artifact: pairwise_sum(&artifacts),
        inv_pass,
        inv_violations,
    })
}

/// `Σ_a ∫ φ(ν)` over the images of the puncture loops, without diagnostics.
pub fn surface_total(y: &DeformationField, phi: &SurfaceDensity) -> f64 {
    let parts: Vec<f64> = (0..y.mesh().punctures().len())
        .map(|k| aniso_perimeter_ccw(&to_ccw(&y.cavity_polygon(k)), phi))
        .collect();
    pairwise_sum(&parts)
}

/// `S(y) = Σ_a Per(im_T(y, a))` with the cavity boundaries of [`total_energy`].
pub fn surface_functional_s_sum(y: &DeformationField) -> f64 {
    let mesh = y.mesh();
    let parts: Vec<f64> = (0..mesh.punctures().len())
        .map(|k| aniso_perimeter_ccw(&to_ccw(&y.cavity_polygon(k)), &SurfaceDensity::Isotropic))
        .collect();
    pairwise_sum(&parts)
}

/// Linear fit of `(ρ, value)` samples evaluated at `ρ = 0`.
pub fn extrapolate_rho(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::Argument("need at least two puncture radii to extrapolate".into()));
    }
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Argument("puncture radii must differ".into()));
    }
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    Ok(my - sxy / sxx * mx)
}

/// Vector field `η(x, ξ)` on `Ω × ℝ²` entering the test-field form of `S(y)`.
pub trait SurfaceTestField: Sync {
    fn value(&self, x: &Vec2, xi: &Vec2) -> Vec2;
    /// `D_x η`, rows indexed by the component of `η`.
    fn dx(&self, x: &Vec2, xi: &Vec2) -> Mat2;
    /// `div_ξ η`.
    fn div_xi(&self, x: &Vec2, xi: &Vec2) -> f64;
}

/// Flat-top radial profile: 1 for `s ≤ inner`, C² decay to 0 at `outer`.
fn plateau(s: f64, inner: f64, outer: f64) -> (f64, f64) {
    if s <= inner {
        (1.0, 0.0)
    } else {
        let w = outer - inner;
        let t = (s - inner) / w;
        (cutoff(t), cutoff_deriv(t) / w)
    }
}

fn plateau_grad(x: &Vec2, c: &Vec2, inner: f64, outer: f64) -> (f64, Vec2) {
    let d = x - c;
    let s = d.norm();
    let (v, dv) = plateau(s, inner, outer);
    let g = if s > 0.0 && dv != 0.0 { d * (dv / s) } else { Vec2::zeros() };
    (v, g)
}

/// `η(x, ξ) = χ(x) χ̃(ξ) v`: product of flat-top bumps in `x` and `ξ` times
/// a constant vector with `|v| ≤ 1`.
#[derive(Debug, Clone, Copy)]
pub struct ProductBump {
    pub x_center: Vec2,
    pub x_radii: (f64, f64),
    pub xi_center: Vec2,
    pub xi_radii: (f64, f64),
    pub direction: Vec2,
}

impl SurfaceTestField for ProductBump {
    fn value(&self, x: &Vec2, xi: &Vec2) -> Vec2 {
        let (a, _) = plateau((x - self.x_center).norm(), self.x_radii.0, self.x_radii.1);
        let (b, _) = plateau((xi - self.xi_center).norm(), self.xi_radii.0, self.xi_radii.1);
        self.direction * (a * b)
    }

    fn dx(&self, x: &Vec2, xi: &Vec2) -> Mat2 {
        let (_, ga) = plateau_grad(x, &self.x_center, self.x_radii.0, self.x_radii.1);
        let (b, _) = plateau((xi - self.xi_center).norm(), self.xi_radii.0, self.xi_radii.1);
        self.direction * ga.transpose() * b
    }

    fn div_xi(&self, x: &Vec2, xi: &Vec2) -> f64 {
        let (a, _) = plateau((x - self.x_center).norm(), self.x_radii.0, self.x_radii.1);
        let (_, gb) = plateau_grad(xi, &self.xi_center, self.xi_radii.0, self.xi_radii.1);
        a * self.direction.dot(&gb)
    }
}

/// `η(x, ξ) = −A χ(x) g(|ξ − c|) (ξ − c)/|ξ − c|`: a field pointing into a
/// cavity centred at `c`, concentrated on a ring of radius `ring` in `ξ`.
#[derive(Debug, Clone, Copy)]
pub struct CavityNormalField {
    pub x_center: Vec2,
    pub x_radii: (f64, f64),
    pub xi_center: Vec2,
    pub ring: f64,
    /// `(plateau half-width, support half-width)` of the ring profile.
    pub widths: (f64, f64),
    pub amplitude: f64,
}

impl CavityNormalField {
    fn ring_profile(&self, s: f64) -> (f64, f64) {
        let (v, dv) = plateau((s - self.ring).abs(), self.widths.0, self.widths.1);
        (v, if s >= self.ring { dv } else { -dv })
    }
}

impl SurfaceTestField for CavityNormalField {
    fn value(&self, x: &Vec2, xi: &Vec2) -> Vec2 {
        let d = xi - self.xi_center;
        let s = d.norm();
        let (g, _) = self.ring_profile(s);
        if g == 0.0 {
            return Vec2::zeros();
        }
        let (a, _) = plateau((x - self.x_center).norm(), self.x_radii.0, self.x_radii.1);
        -d * (self.amplitude * a * g / s)
    }

    fn dx(&self, x: &Vec2, xi: &Vec2) -> Mat2 {
        let d = xi - self.xi_center;
        let s = d.norm();
        let (g, _) = self.ring_profile(s);
        if g == 0.0 {
            return Mat2::zeros();
        }
        let (_, ga) = plateau_grad(x, &self.x_center, self.x_radii.0, self.x_radii.1);
        -(d / s) * ga.transpose() * (self.amplitude * g)
    }

    fn div_xi(&self, x: &Vec2, xi: &Vec2) -> f64 {
        let s = (xi - self.xi_center).norm();
        let (g, dg) = self.ring_profile(s);
        if g == 0.0 && dg == 0.0 {
            return 0.0;
        }
        let (a, _) = plateau((x - self.x_center).norm(), self.x_radii.0, self.x_radii.1);
        // div(g(s) e_s) = g'(s) + g(s)/s in two dimensions
        -self.amplitude * a * (dg + g / s)
    }
}

/// `S_y(η) = ∫_Ω cof Dy : D_x η(x, y(x)) + div_ξ η(x, y(x)) det Dy dx` by a
/// triangle rule of the given polynomial order.
///
/// `η` must vanish for `x` on the outer boundary and satisfy `|η| ≤ 1`; both
/// are checked on the quadrature points and outer boundary vertices.
pub fn surface_functional_s_testfield(
    y: &DeformationField,
    eta: &dyn SurfaceTestField,
    order: usize,
) -> Result<f64> {
    let mesh = y.mesh();
    for l in mesh.outer_loops() {
        for &v in l {
            let e = eta.value(&mesh.vertices()[v], &y.positions()[v]);
            if e.norm() > 1e-12 {
                return Err(Error::Argument(format!(
                    "test field does not vanish on the outer boundary at vertex {v} (|η| = {:.3e})",
                    e.norm()
                )));
            }
        }
    }
    let rule = TriangleRule::with_order(order);
    let parts: Vec<(f64, f64)> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let [a, b, c] = mesh.triangles()[t];
            let (xa, xb, xc) = (mesh.vertices()[a], mesh.vertices()[b], mesh.vertices()[c]);
            let (ya, yb, yc) = (y.positions()[a], y.positions()[b], y.positions()[c]);
            let f = y.element_gradient(t);
            let (cf, det) = (cof(&f), f.determinant());
            let mut acc = 0.0;
            let mut sup: f64 = 0.0;
            for (l, w) in rule.points.iter().zip(&rule.weights) {
                let x = xa * l[0] + xb * l[1] + xc * l[2];
                let xi = ya * l[0] + yb * l[1] + yc * l[2];
                sup = sup.max(eta.value(&x, &xi).norm());
                acc += w * (cf.component_mul(&eta.dx(&x, &xi)).sum() + eta.div_xi(&x, &xi) * det);
            }
            (acc * mesh.area(t), sup)
        })
        .collect();
    let sup = parts.iter().map(|p| p.1).fold(0.0, f64::max);
    if sup > 1.0 + 1e-12 {
        return Err(Error::Argument(format!("test field exceeds unit sup norm ({sup:.6})")));
    }
    Ok(pairwise_sum(&parts.iter().map(|p| p.0).collect::<Vec<_>>()))
}
