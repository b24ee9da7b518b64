mod common;

use std::io::BufReader;
use std::sync::Arc;

use cavelast_core::geometry::{
    read_mesh, unit_square, write_mesh, BoundaryData, BoundaryTag, DeformationField, DomainShape, MeshSpec, Puncture,
};
use cavelast_core::{Mat2, Vec2};
use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn affine_fields_have_constant_gradient(
        a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, d in -3.0f64..3.0,
        tx in -1.0f64..1.0, ty in -1.0f64..1.0,
    ) {
        let m = Mat2::new(a, b, c, d);
        let mesh = punctured_disk(1.0, 0.1, 0.2);
        let y = DeformationField::from_map(mesh.clone(), |x| m * x + Vec2::new(tx, ty));
        for t in 0..mesh.num_triangles() {
            prop_assert!((y.element_gradient(t) - m).norm() <= 1e-12 * m.norm().max(1.0));
        }
    }

    #[test]
    fn affine_trace_lies_on_ellipse(a in 0.2f64..3.0, d in 0.2f64..3.0, b in -0.5f64..0.5, r in 0.2f64..0.4) {
        let m = Mat2::new(a, b, 0.0, d);
        let sq = Arc::new(unit_square(10, BoundaryTag::Dirichlet).unwrap());
        let y = DeformationField::from_map(sq, |x| m * x);
        let c = Vec2::new(0.05, -0.02);
        let tr = y.trace_on_circle(&c, r, 97).unwrap();
        for (j, p) in tr.iter().enumerate() {
            let t = std::f64::consts::TAU * j as f64 / 97.0;
            let expect = m * (c + Vec2::new(t.cos(), t.sin()) * r);
            prop_assert!((p - expect).norm() <= 1e-12);
        }
    }
}

#[test]
fn dirichlet_energy_converges_under_refinement() {
    let f = |x: &Vec2| Vec2::new(x.x + 0.2 * (3.0 * x.y).sin(), x.y + 0.1 * (2.0 * x.x).cos());
    // ∫_{[-1/2,1/2]²} |Dy|² for the map above
    let exact = cavelast_core::numeric::integrate(
        &|s: f64| {
            cavelast_core::numeric::integrate(
                &|t: f64| {
                    let g = Mat2::new(1.0, 0.6 * (3.0 * t).cos(), -0.2 * (2.0 * s).sin(), 1.0);
                    g.norm_squared()
                },
                -0.5,
                0.5,
                1e-13,
            )
        },
        -0.5,
        0.5,
        1e-12,
    );
    let errs: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| {
            let y = DeformationField::from_map(Arc::new(unit_square(n, BoundaryTag::Dirichlet).unwrap()), f);
            let m = y.mesh();
            let e: f64 = (0..m.num_triangles()).map(|t| m.area(t) * y.element_gradient(t).norm_squared()).sum();
            (e - exact).abs()
        })
        .collect();
    for w in errs.windows(2) {
        assert!((w[0] / w[1]).log2() >= 0.9, "{errs:?}");
    }
}

#[test]
fn mesh_files_round_trip() {
    let spec = MeshSpec {
        shape: DomainShape::Square { side: 2.0 },
        h: 0.2,
        punctures: vec![Puncture { center: Vec2::new(0.3, -0.2), radius: 0.05 }],
        outer_tag: BoundaryTag::Dirichlet,
        structured: false,
    };
    let mesh = spec.build().unwrap();
    let mut buf = Vec::new();
    write_mesh(&mut buf, &mesh).unwrap();
    let back = read_mesh(BufReader::new(&buf[..])).unwrap();
    assert_eq!(back.vertices(), mesh.vertices());
    assert_eq!(back.triangles(), mesh.triangles());
    assert_eq!(back.boundary_edges(), mesh.boundary_edges());
    assert_eq!(back.punctures(), mesh.punctures());
    let mut again = Vec::new();
    write_mesh(&mut again, &back).unwrap();
    assert_eq!(buf, again);
}

#[test]
fn oversized_puncture_is_rejected() {
    let spec = MeshSpec {
        shape: DomainShape::Disk { radius: 1.0 },
        h: 0.1,
        punctures: vec![Puncture { center: Vec2::zeros(), radius: 0.3 }],
        outer_tag: BoundaryTag::Dirichlet,
        structured: true,
    };
    assert!(spec.build().is_err());
}

#[test]
fn boundary_data_is_imposed_on_dirichlet_vertices_only() {
    let mesh = punctured_disk(1.0, 0.05, 0.1);
    let mut y = DeformationField::identity(mesh.clone());
    y.impose(&BoundaryData::RadialStretch { lambda: 1.5 }).unwrap();
    for v in 0..mesh.num_vertices() {
        let x = mesh.vertices()[v];
        let expect = if mesh.is_dirichlet(v) { x * 1.5 } else { x };
        assert!((y.positions()[v] - expect).norm() < 1e-15);
    }
}

#[test]
fn mollifier_keeps_affine_maps() {
    let mesh = punctured_disk(1.0, 0.05, 0.1);
    let m = Mat2::new(1.2, 0.3, -0.1, 0.9);
    let y = DeformationField::from_map(mesh, |x| m * x);
    let (z, rep) = y.mollify(0.1).unwrap();
    assert!(rep.feasible);
    for (p, q) in y.positions().iter().zip(z.positions()) {
        assert!((p - q).norm() < 1e-12);
    }
}
