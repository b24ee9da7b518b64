mod common;

use std::f64::consts::TAU;
use std::sync::Arc;

use cavelast_core::degree::{default_radii, topological_image_point, PointImageOptions};
use cavelast_core::energy::anisotropic_perimeter;
use cavelast_core::geometry::{unit_square, BoundaryTag, DeformationField};
use cavelast_core::material::{BulkDensity, SurfaceDensity};
use cavelast_core::polygon::{hausdorff, perimeter};
use cavelast_core::variation::{
    anisotropic_tangential_divergence, battery, cavity_boundaries, first_variation_residual, outer_compose,
    surface_first_variation, EdgeRule, TestField, VariationOptions,
};
use cavelast_core::{Mat2, Vec2};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn random_star(r: &mut rand_chacha::ChaCha8Rng) -> Vec<Vec2> {
    let n = r.gen_range(5..60);
    let c = Vec2::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            c + Vec2::new(t.cos(), t.sin()) * r.gen_range(0.3..1.5)
        })
        .collect()
}

fn random_field(r: &mut rand_chacha::ChaCha8Rng, near: Vec2, y: &DeformationField) -> TestField {
    let t: f64 = r.gen_range(0.0..TAU);
    let dir = Vec2::new(t.cos(), t.sin()) * r.gen_range(0.3..1.0);
    match r.gen_range(0..4) {
        0 => TestField::Bump { center: near + Vec2::new(r.gen_range(-0.2..0.2), r.gen_range(-0.2..0.2)), width: r.gen_range(0.3..0.6), direction: dir },
        1 => TestField::RadialBump { center: near, inner: r.gen_range(0.05..0.3), outer: r.gen_range(0.4..0.8) },
        2 => TestField::Envelope { center: near, radius: r.gen_range(0.5..0.9), mode: r.gen_range(0..8) },
        _ => {
            let mesh = y.mesh();
            let v = loop {
                let v = r.gen_range(0..mesh.num_vertices());
                if !mesh.is_dirichlet(v) {
                    break v;
                }
            };
            TestField::fe_basis(y, v, dir)
        }
    }
}

#[test]
fn first_variation_matches_central_differences() {
    let mesh = punctured_disk(1.0, 0.05, 0.08);
    let w = BulkDensity::default();
    let phis = [SurfaceDensity::Isotropic, SurfaceDensity::elliptic(Mat2::new(4.0, 0.0, 0.0, 1.0)).unwrap()];
    let mut r = rng(2024);
    for k in 0..20 {
        let c = r.gen_range(0.0..0.4);
        let (s, sh) = (r.gen_range(0.8..1.4), r.gen_range(-0.2..0.2));
        let y = DeformationField::from_map(mesh.clone(), move |x| {
            let z = cavitation_map(Vec2::zeros(), c)(x);
            Vec2::new(s * z.x + sh * z.y, z.y / s + 0.05 * z.x * z.x)
        });
        let near = y.evaluate(&Vec2::new(0.1, 0.0)).unwrap();
        let psi = random_field(&mut r, near, &y);
        let rep = first_variation_residual(&y, &psi, &w, &phis[k % 2], &VariationOptions::default()).unwrap();
        assert!(rep.fd_gap <= 1e-3, "pair {k}: {rep:?}");
    }
}

#[test]
fn dilation_reproduces_perimeter_on_random_polygons() {
    let mut r = rng(10);
    let iso = SurfaceDensity::Isotropic;
    for _ in 0..10 {
        let poly = random_star(&mut r);
        let per = perimeter(&poly);
        let o = Vec2::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
        let psi = TestField::Affine { offset: -o, linear: Mat2::identity() };
        for rule in [EdgeRule::Secant, EdgeRule::Midpoint] {
            let v = surface_first_variation(&psi, &iso, std::slice::from_ref(&poly), rule).unwrap();
            assert!((v - per).abs() <= 1e-6 * per);
        }
        for i in 0..poly.len() {
            let e = poly[(i + 1) % poly.len()] - poly[i];
            let nu = Vec2::new(e.y, -e.x).normalize();
            let d = anisotropic_tangential_divergence(&Mat2::identity(), &nu, &iso).unwrap();
            assert!((d - 1.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn surface_variation_matches_perimeter_differences(
        seed in 0u64..1000,
        a11 in 0.5f64..4.0,
        a22 in 0.5f64..4.0,
        a12 in -0.4f64..0.4,
    ) {
        let mut r = rng(seed);
        let poly = random_star(&mut r);
        let phi = SurfaceDensity::elliptic(Mat2::new(a11, a12, a12, a22)).unwrap();
        let psi = TestField::Bump {
            center: poly[0] + Vec2::new(0.1, 0.05),
            width: 1.2,
            direction: Vec2::new(0.6, -0.8),
        };
        let s = 1e-6;
        let moved = |t: f64| -> Vec<Vec2> { poly.iter().map(|p| p + psi.value(p) * t).collect() };
        let fd = (anisotropic_perimeter(&moved(s), &phi).0 - anisotropic_perimeter(&moved(-s), &phi).0) / (2.0 * s);
        let v = surface_first_variation(&psi, &phi, std::slice::from_ref(&poly), EdgeRule::Secant).unwrap();
        prop_assert!((v - fd).abs() <= 1e-3 * (fd.abs() + 1e-12) || (v - fd).abs() < 1e-8);
    }
}

#[test]
fn constant_velocity_translates_cavity() {
    let mesh = punctured_disk(1.0, 0.05, 0.08);
    let y = radial_cavity(&mesh, 0.3);
    let v = Vec2::new(0.3, -0.2);
    let psi = TestField::Affine { offset: v, linear: Mat2::zeros() };
    for t in [0.1, -0.25, 0.5] {
        let z = outer_compose(&y, &psi, t).unwrap();
        let shifted: Vec<Vec2> = y.cavity_polygon(0).iter().map(|p| p + v * t).collect();
        assert!(hausdorff(&z.cavity_polygon(0), &shifted) < 1e-12);
    }
}

#[test]
fn small_composition_of_identity_stays_orientation_preserving() {
    let sq = Arc::new(unit_square(16, BoundaryTag::Dirichlet).unwrap());
    let y = DeformationField::identity(sq.clone());
    let psi = TestField::Envelope { center: Vec2::new(0.05, 0.0), radius: 0.45, mode: 5 };
    let bound = psi.grad_bound();
    for frac in [0.1, 0.5, 0.9] {
        let t = frac / bound;
        let z = outer_compose(&y, &psi, t).unwrap();
        let (md, _) = z.min_det();
        assert!(md > 0.0);
        // smallest det(I + t Dψ) at element centroids, up to the interpolation error
        let oracle = (0..sq.num_triangles())
            .map(|e| (Mat2::identity() + psi.gradient(&sq.centroid(e)) * t).determinant())
            .fold(f64::INFINITY, f64::min);
        assert!((md - oracle).abs() < 0.1, "{md} vs {oracle}");
    }
    assert!(outer_compose(&y, &psi, 1.01 / bound).is_err());
}

#[test]
fn composition_keeps_cavity_count() {
    let mesh = punctured_disk(1.0, 0.05, 0.05);
    let y = radial_cavity(&mesh, 0.25);
    let a = Vec2::zeros();
    let count = |z: &DeformationField| -> usize {
        let radii = default_radii(z, &a, 3);
        topological_image_point(z, &a, &radii, 0.01, &PointImageOptions::default()).unwrap().iter().count()
    };
    assert_eq!(count(&y), 1);
    for psi in battery(&y).into_iter().step_by(3) {
        let bound = psi.grad_bound();
        for frac in [-0.5, 0.5] {
            let z = outer_compose(&y, &psi, frac / bound).unwrap();
            assert_eq!(count(&z), 1, "{psi:?}");
        }
    }
}

#[test]
fn battery_fields_vanish_on_dirichlet_images() {
    let mesh = punctured_disk(1.0, 0.05, 0.08);
    let y = radial_cavity(&mesh, 0.3);
    let fields = battery(&y);
    assert_eq!(fields.len(), 24);
    for f in &fields {
        f.check_vanishes_on_dirichlet(&y).unwrap();
    }
    assert_eq!(cavity_boundaries(&y).len(), 1);
}
