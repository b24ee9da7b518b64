//! Outer variations `h_t = id + tψ` of a deformation, the first variation of
//! the total energy along them, and a descent minimizer on nodal positions.

mod field;
mod minimize;

use rayon::prelude::*;

pub use field::{battery, TestField};
pub use minimize::{certification_residual, energy_and_gradient, minimize, IterRecord, MinimizeOptions, MinimizeResult, Status};

use crate::energy::{bulk_term, surface_total};
use crate::geometry::{edge_matrix, DeformationField};
use crate::material::{BulkDensity, SurfaceDensity};
use crate::numeric::{pairwise_sum, rot_cw};
use crate::{Error, Mat2, Result, Vec2};

/// How the elastic term evaluates `Dψ` on an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ElasticRule {
    /// Gradient of the affine interpolant of `ψ` at the deformed vertices.
    /// This is the exact derivative of the discrete bulk energy.
    #[default]
    Nodal,
    /// `Dψ` at the image of the element centroid.
    Centroid,
}

/// How the surface term is evaluated along a cavity edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeRule {
    /// `ψ` differenced between the endpoints; the exact derivative of the
    /// polygonal anisotropic perimeter.
    #[default]
    Secant,
    /// `φ(ν) div_φ ψ` at the edge midpoint times the edge length.
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationOptions {
    pub elastic: ElasticRule,
    pub surface: EdgeRule,
    /// Central-difference step for the cross-check.
    pub fd_step: f64,
}

impl Default for VariationOptions {
    fn default() -> Self {
        Self { elastic: ElasticRule::Nodal, surface: EdgeRule::Secant, fd_step: 1e-5 }
    }
}

/// `h_t ∘ y`: every deformed vertex moved by `t ψ`.
pub fn outer_compose(y: &DeformationField, psi: &TestField, t: f64) -> Result<DeformationField> {
    let bound = psi.grad_bound();
    if t.abs() * bound >= 1.0 {
        return Err(Error::Precondition(format!(
            "|t| sup|Dψ| must be < 1: need |t| < {:.6e}, got {t:.6e}",
            1.0 / bound
        )));
    }
    let positions = y.positions().iter().map(|p| p + psi.value(p) * t).collect();
    DeformationField::from_positions(y.mesh().clone(), positions)
}

/// `∫_Ω DW(Dy)(Dy)ᵀ : Dψ(y) dx`.
pub fn elastic_first_variation(
    y: &DeformationField,
    psi: &TestField,
    density: &BulkDensity,
    rule: ElasticRule,
) -> Result<f64> {
    let mesh = y.mesh();
    let parts: Vec<Result<f64>> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let f = y.element_gradient(t);
            let det = f.determinant();
            if !(det > 0.0) {
                return Err(Error::Infeasible { triangle: t, det });
            }
            let dw = density.stress(&f)?;
            let tri = mesh.triangles()[t];
            let v = match rule {
                // DW : (Ψ R⁻¹) with Ψ the edge matrix of ψ(y) equals (DW Fᵀ) : Dψ_h
                ElasticRule::Nodal => {
                    let vals: Vec<Vec2> = tri.iter().map(|&i| psi.value(&y.positions()[i])).collect();
                    let e = edge_matrix(&vals, &[0, 1, 2]);
                    dw.component_mul(&(e * mesh.reference_inverse(t))).sum()
                }
                ElasticRule::Centroid => {
                    let c = (y.positions()[tri[0]] + y.positions()[tri[1]] + y.positions()[tri[2]]) / 3.0;
                    (dw * f.transpose()).component_mul(&psi.gradient(&c)).sum()
                }
            };
            Ok(mesh.area(t) * v)
        })
        .collect();
    let parts: Vec<f64> = parts.into_iter().collect::<Result<_>>()?;
    Ok(pairwise_sum(&parts))
}

/// `div_φ ψ = div ψ − Dφ(ν)·(Dψᵀ ν)/φ(ν)` for a given `Dψ`.
pub fn anisotropic_tangential_divergence(dpsi: &Mat2, nu: &Vec2, phi: &SurfaceDensity) -> Result<f64> {
    let p = phi.value(nu);
    if !(p > 0.0) {
        return Err(Error::Argument("φ(ν) must be positive".into()));
    }
    let g = phi.gradient(nu)?;
    Ok(dpsi.trace() - g.dot(&(dpsi.transpose() * nu)) / p)
}

/// `Σ_a ∫_{∂E_a} φ(ν) div_φ ψ dH¹` over counter-clockwise cavity polygons.
pub fn surface_first_variation(
    psi: &TestField,
    phi: &SurfaceDensity,
    cavities: &[Vec<Vec2>],
    rule: EdgeRule,
) -> Result<f64> {
    let mut parts = Vec::new();
    for poly in cavities {
        let n = poly.len();
        for i in 0..n {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            let e = q - p;
            let len = e.norm();
            if len == 0.0 {
                continue;
            }
            let v = match rule {
                EdgeRule::Secant => {
                    let g = phi.gradient(&rot_cw(&e))?;
                    g.dot(&rot_cw(&(psi.value(&q) - psi.value(&p))))
                }
                EdgeRule::Midpoint => {
                    let nu = rot_cw(&e) / len;
                    let dpsi = psi.gradient(&(0.5 * (p + q)));
                    len * phi.value(&nu) * anisotropic_tangential_divergence(&dpsi, &nu, phi)?
                }
            };
            parts.push(v);
        }
    }
    Ok(pairwise_sum(&parts))
}

/// Counter-clockwise images of all puncture loops.
pub fn cavity_boundaries(y: &DeformationField) -> Vec<Vec<Vec2>> {
    (0..y.mesh().punctures().len()).map(|k| y.cavity_polygon(k)).collect()
}

/// First variation of the total energy along `ψ` and its finite-difference check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationReport {
    pub elastic: f64,
    pub surface: f64,
    pub total: f64,
    /// `(ℰ(h_s ∘ y) − ℰ(h_{−s} ∘ y)) / 2s`.
    pub fd_value: f64,
    /// `|total − fd_value| / (|fd_value| + 1e-12)`.
    pub fd_gap: f64,
}

/// Bulk plus surface energy on the puncture images (the quantity whose
/// first variation is assembled).
pub fn discrete_energy(y: &DeformationField, density: &BulkDensity, phi: &SurfaceDensity) -> Result<f64> {
    Ok(bulk_term(y, density)? + surface_total(y, phi))
}

pub fn first_variation_residual(
    y: &DeformationField,
    psi: &TestField,
    density: &BulkDensity,
    phi: &SurfaceDensity,
    opts: &VariationOptions,
) -> Result<VariationReport> {
    let elastic = elastic_first_variation(y, psi, density, opts.elastic)?;
    let surface = surface_first_variation(psi, phi, &cavity_boundaries(y), opts.surface)?;
    let s = opts.fd_step.min(0.5 / psi.grad_bound().max(1e-300));
    let ep = discrete_energy(&outer_compose(y, psi, s)?, density, phi)?;
    let em = discrete_energy(&outer_compose(y, psi, -s)?, density, phi)?;
    let fd_value = (ep - em) / (2.0 * s);
    let total = elastic + surface;
    Ok(VariationReport {
        elastic,
        surface,
        total,
        fd_value,
        fd_gap: (total - fd_value).abs() / (fd_value.abs() + 1e-12),
    })
}
